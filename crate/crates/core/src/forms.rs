//! Spaces of quaternionic modular forms on a special order and their Hecke
//! action.
//!
//! A form of weight `k` and character `psi` is a function on the finite adelic
//! points of the algebra which transforms under the unit group of the order by
//! the lifted character and under the distinguished prime `p` by the weight
//! action on `V_{k-2}`, the dual of degree-`k-2` homogeneous forms in two
//! variables.  Fixing class representatives `I_1, ..., I_h` whose norms avoid
//! the level and `p`, a form is the data of one vector `v_i` in `V_{k-2}` per
//! class, subject to
//!
//! ```text
//!     v_i = chi(g)^{-1} . v_i |_{iota_p(g)}        for g a unit of O_l(I_i),
//! ```
//!
//! so the space is cut out of the `h (k-1)`-dimensional ambient space by the
//! averaging idempotents of the twisted unit-group actions.  Hecke operators
//! act by coset transport: a coset matrix `g` at `t` moves `I_i` to a lattice
//! `J`, and writing `J = b I_j` the contribution to the matrix block `(j, i)`
//! is the cocycle value
//!
//! ```text
//!     chi(u)^{-1} . W(iota_p(b)^{-1} g_p)
//! ```
//!
//! with `u` the unit adele connecting the two representatives and `W` the
//! weight matrix; the factor at a level prime `t` reads off the lower-right
//! entry of `iota_t(b)^{-1} g`.  The operator at the ramified prime translates
//! by a fixed norm-`l` element of the maximal order; its translate is
//! assembled from two globally chosen elements that agree locally at `l`.
//!
//! Coefficients are either exact cyclotomic scalars (weight two) or `Z/p^M`
//! (any weight); the common interface is the `FormCoeff` trait.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::character::{lift_character, DirichletCharacter, LiftedCharacter, LocalLift};
use crate::ideal::{self, ClassSet, RightIdeal};
use crate::linalg::{self, Mat};
use crate::order::SpecialOrder;
use crate::quat::{Quat, QuatAlgebra};
use crate::ring::{self, Scalar, ZpM};
use crate::splitting::{LocalSplitting, M2};
use crate::{CoreError, Cyc, Int, Rat, Result};

/// Coefficient rings for spaces of forms.  Methods take `&self` so that a
/// prototype element can carry a modulus; the cyclotomic model ignores it.
pub trait FormCoeff: Scalar {
    /// Embed an integer.
    fn embed_int(&self, n: &Int) -> Self;

    /// Embed a cyclotomic scalar, typically a character value.
    fn embed_cyc(&self, c: &Cyc) -> Result<Self>;

    /// Embed a residue coming from a weight-action matrix.
    fn embed_zpm(&self, z: &ZpM) -> Result<Self>;

    /// Invert the order of a finite unit group.
    fn inv_group_order(&self, n: u64) -> Result<Self>;

    /// A canonical generating set of the row space of `m`.
    fn row_space(m: &Mat<Self>) -> Result<Mat<Self>>;

    /// Coordinates of `v` in the span of the rows of `basis`, if it lies there.
    fn in_row_space(basis: &Mat<Self>, v: &[Self]) -> Option<Vec<Self>>;

    /// The pair `(p, M)` when the ring is `Z/p^M`.
    fn padic_shape(&self) -> Option<(u64, u32)>;
}

impl FormCoeff for Cyc {
    fn embed_int(&self, n: &Int) -> Self {
        Cyc::from_rat(Rat::from(n.clone()))
    }

    fn embed_cyc(&self, c: &Cyc) -> Result<Self> {
        Ok(c.clone())
    }

    fn embed_zpm(&self, _z: &ZpM) -> Result<Self> {
        Err(CoreError::Data(
            "weight-action data requires p-adic coefficients".into(),
        ))
    }

    fn inv_group_order(&self, n: u64) -> Result<Self> {
        Ok(Cyc::from_rat(ring::rat(1, n as i64)))
    }

    fn row_space(m: &Mat<Self>) -> Result<Mat<Self>> {
        let mut red = m.clone();
        let pivots = red.rref();
        let rows = (0..pivots.len())
            .map(|i| (0..red.cols).map(|j| red.at(i, j).clone()).collect())
            .collect::<Vec<Vec<Cyc>>>();
        Ok(if rows.is_empty() {
            Mat::zeros(0, m.cols)
        } else {
            Mat::from_rows(rows)
        })
    }

    fn in_row_space(basis: &Mat<Self>, v: &[Self]) -> Option<Vec<Self>> {
        basis.transpose().solve(v)
    }

    fn padic_shape(&self) -> Option<(u64, u32)> {
        None
    }
}

impl FormCoeff for ZpM {
    fn embed_int(&self, n: &Int) -> Self {
        let (p, m) = self.padic_shape().expect("prototype carries a modulus");
        ZpM::from_big(n, p, m)
    }

    fn embed_cyc(&self, c: &Cyc) -> Result<Self> {
        let (p, m) = self.padic_shape().expect("prototype carries a modulus");
        c.to_zpm(p, m).ok_or_else(|| {
            CoreError::Data("character values do not embed into the coefficient ring".into())
        })
    }

    fn embed_zpm(&self, z: &ZpM) -> Result<Self> {
        let (p, m) = self.padic_shape().expect("prototype carries a modulus");
        if z.prime() != p {
            return Err(CoreError::Data("mixed coefficient primes".into()));
        }
        if z.precision() < m {
            return Err(CoreError::Precision(format!(
                "weight data at precision {} below coefficient precision {m}",
                z.precision()
            )));
        }
        Ok(z.truncate(m))
    }

    fn inv_group_order(&self, n: u64) -> Result<Self> {
        let (p, m) = self.padic_shape().expect("prototype carries a modulus");
        ZpM::new(n as i64, p, m)
            .try_inv()
            .ok_or_else(|| CoreError::Data("p divides the order of a unit group".into()))
    }

    fn row_space(m: &Mat<Self>) -> Result<Mat<Self>> {
        if m.rows == 0 {
            return Ok(Mat::zeros(0, m.cols));
        }
        let (_, d, v) = linalg::zpm_smith(m);
        let vinv = v
            .inverse()
            .ok_or_else(|| CoreError::Data("column transform is not invertible".into()))?;
        let mut rows = Vec::new();
        for i in 0..m.rows.min(m.cols) {
            let di = *d.at(i, i);
            if di.is_unit() {
                rows.push((0..m.cols).map(|j| di * *vinv.at(i, j)).collect());
            } else if !di.is_zero() {
                return Err(CoreError::Data(
                    "row module is not a direct summand".into(),
                ));
            }
        }
        Ok(if rows.is_empty() {
            Mat::zeros(0, m.cols)
        } else {
            Mat::from_rows(rows)
        })
    }

    fn in_row_space(basis: &Mat<Self>, v: &[Self]) -> Option<Vec<Self>> {
        linalg::zpm_solve(&basis.transpose(), v)
    }

    fn padic_shape(&self) -> Option<(u64, u32)> {
        if self.modulus() == 0 {
            panic!("prototype must carry a modulus");
        }
        Some((self.prime(), self.precision()))
    }
}

fn zpow(x: ZpM, e: u32) -> ZpM {
    let mut acc = x;
    let mut out: Option<ZpM> = None;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            out = Some(match out {
                None => acc,
                Some(y) => y * acc,
            });
        }
        e >>= 1;
        if e > 0 {
            acc = acc * acc;
        }
    }
    out.unwrap_or_else(|| ZpM::new(1, x.prime(), x.precision()))
}

fn binomials(d: usize) -> Vec<Vec<i64>> {
    let mut t = vec![vec![0i64; d + 1]; d + 1];
    for i in 0..=d {
        t[i][0] = 1;
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + if j <= i - 1 { t[i - 1][j] } else { 0 };
        }
    }
    t
}

/// Matrix of the right weight action of `g` on the dual of degree-`k-2`
/// forms, in the monomial dual basis `m_a = X^a Y^{k-2-a}`.  Row vectors act
/// by `v -> v W`, and `W[t][a]` is the coefficient of `m_t` in the substituted
/// monomial `m_a((X, Y) g)`; composition satisfies `W(g) W(h) = W(gh)`.
pub fn weight_matrix(g: &M2, k: u32) -> Mat<ZpM> {
    assert!(k >= 2);
    let d = (k - 2) as usize;
    let q = g.0[0].prime();
    let m = g.0[0].precision();
    let bin = binomials(d);
    let [a, b, c, dd] = g.0;
    let mut w = Mat::<ZpM>::zeros(d + 1, d + 1);
    for col in 0..=d {
        // (A X + C Y)^col and (B X + D Y)^{d-col}
        let left: Vec<ZpM> = (0..=col)
            .map(|r| {
                ZpM::new(bin[col][r], q, m) * zpow(a, r as u32) * zpow(c, (col - r) as u32)
            })
            .collect();
        let e = d - col;
        let right: Vec<ZpM> = (0..=e)
            .map(|s| ZpM::new(bin[e][s], q, m) * zpow(b, s as u32) * zpow(dd, (e - s) as u32))
            .collect();
        for (r, lv) in left.iter().enumerate() {
            for (s, rv) in right.iter().enumerate() {
                let t = r + s;
                *w.at_mut(t, col) = *w.at(t, col) + *lv * *rv;
            }
        }
    }
    w
}

/// `iota_q(b)^{-1} g` at precision `prec`, where `b` is integral at `q` with
/// reduced-norm valuation `v` and `g` is an optional integral coset matrix.
/// The division by `q^v` must be exact; failure means the connecting element
/// does not transport the coset into the representative.
pub(crate) fn unit_matrix(
    sp: &LocalSplitting,
    alg: &QuatAlgebra,
    b: &Quat,
    gamma: Option<&[i64; 4]>,
    prec: u32,
) -> Result<M2> {
    let q = sp.q;
    let nrd = alg.nrd(b);
    let v = ring::valuation_rat(&nrd, q);
    if v < 0 {
        return Err(CoreError::Data(format!(
            "connecting element is not integral at q = {q}"
        )));
    }
    let v = v as u32;
    let work = prec + v;
    if work > sp.target_prec {
        return Err(CoreError::Precision(format!(
            "unit matrix at q = {q} needs precision {work} > {}",
            sp.target_prec
        )));
    }
    let img = sp
        .try_image(b)
        .ok_or_else(|| CoreError::Data(format!("element is not integral at q = {q}")))?
        .truncate(work);
    let mut m = img.adjugate();
    if let Some(g) = gamma {
        let mk = |x: i64| ZpM::new(x, q, work);
        m = m.mul(&M2([mk(g[0]), mk(g[1]), mk(g[2]), mk(g[3])]));
    }
    let unit_part = nrd / Rat::from(Int::from(q).pow(v));
    let w_inv = ZpM::from_rat(&unit_part, q, work)
        .and_then(|z| z.try_inv())
        .ok_or_else(|| CoreError::Data("norm unit part is not invertible".into()))?;
    let m = m
        .scale(w_inv)
        .div_exact_p(v)
        .ok_or_else(|| {
            CoreError::Hypothesis("coset translate does not align with its class".into())
        })?;
    Ok(m.truncate(prec))
}

fn lex_min(mut vs: Vec<Quat>) -> Option<Quat> {
    vs.sort_by(|x, y| x.c.cmp(&y.c));
    vs.into_iter().next()
}

/// Two elements `(w, w')` generating the translate at the ramified prime: both
/// lie in the level-away enlargement of the order, have reduced norm of
/// `l`-valuation one, generate the same left coset of the local order at `l`,
/// and their norm unit parts `t, t'` are coprime so the two branches patch to
/// the adelic translate.  Deterministic first-hit choices throughout.
fn atkin_ell_elements(order: &SpecialOrder) -> Result<(Quat, Quat, u64, u64)> {
    let alg = &order.alg;
    let ell = order.ell;
    let e_ord = order
        .lattice
        .sum(&order.maximal.scale(&ring::rat_int(order.aux as i64)));
    let mut first: Option<(Quat, u64)> = None;
    for t in 1..=60u64 {
        if t % ell == 0 {
            continue;
        }
        let vs = e_ord.vectors_of_norm(alg, &ring::rat_int((ell * t) as i64));
        if let Some(w) = lex_min(vs) {
            first = Some((w, t));
            break;
        }
    }
    let (w, t) = first.ok_or_else(|| {
        CoreError::Hypothesis("no small-norm generator at the ramified prime".into())
    })?;
    if t == 1 {
        return Ok((w.clone(), w, 1, 1));
    }
    // Partner w' = w + l^c z with z in the enlargement; for c at least m/2
    // the difference has local valuation at least m - 1 after dividing by the
    // unit norm part, so w^{-1} w' is a local unit of the order at l.
    let c = order.m.div_ceil(2);
    let shift = ring::rat_int((ell as i64).pow(c));
    let zbasis = e_ord.basis();
    for radius in 1..=3i64 {
        let mut coeffs = vec![-radius; 4];
        loop {
            if coeffs.iter().any(|&x| x != 0) {
                let mut z = Quat::zero();
                for (cf, bq) in coeffs.iter().zip(zbasis.iter()) {
                    z = &z + &bq.scale(&ring::rat_int(*cf));
                }
                let wp = &w + &z.scale(&shift);
                let n = alg.nrd(&wp);
                if n.is_integer() && ring::valuation_rat(&n, ell) == 1 {
                    let tp = (n.to_integer() / Int::from(ell)).to_u64();
                    if let Some(tp) = tp {
                        if t.gcd(&tp) == 1 {
                            return Ok((w, wp, t, tp));
                        }
                    }
                }
            }
            let mut idx = 0;
            loop {
                if idx == 4 {
                    break;
                }
                coeffs[idx] += 1;
                if coeffs[idx] <= radius {
                    break;
                }
                coeffs[idx] = -radius;
                idx += 1;
            }
            if idx == 4 {
                break;
            }
        }
    }
    Err(CoreError::Hypothesis(
        "no coprime partner for the ramified-prime translate".into(),
    ))
}

/// A space of quaternionic forms: weight `k`, character `psi`, coefficients
/// `C`, over the class set of a special order with norms kept away from `p`.
pub struct FormSpace<C: FormCoeff> {
    pub classes: ClassSet,
    pub psi: DirichletCharacter,
    pub lifted: LiftedCharacter,
    pub k: u32,
    pub p: u64,
    proto: C,
    sp_p: LocalSplitting,
    basis: Mat<C>,
}

impl<C: FormCoeff> FormSpace<C> {
    pub fn new(
        order: &SpecialOrder,
        psi: &DirichletCharacter,
        k: u32,
        p: u64,
        proto: C,
    ) -> Result<Self> {
        if k < 2 {
            return Err(CoreError::Data("weight must be at least 2".into()));
        }
        if p == 2 || !ring::is_prime(p) {
            return Err(CoreError::Data("p must be an odd prime".into()));
        }
        if p == order.ell {
            return Err(CoreError::Data(
                "p must differ from the ramified prime".into(),
            ));
        }
        match proto.padic_shape() {
            Some((pp, _)) if pp != p => {
                return Err(CoreError::Data(
                    "coefficient prototype at a different prime".into(),
                ))
            }
            None if k > 2 => {
                return Err(CoreError::Data(
                    "weights above two require p-adic coefficients".into(),
                ))
            }
            _ => {}
        }
        let lifted = lift_character(order, psi)?;
        let classes = ClassSet::enumerate(order, &[p])?;
        let want = match proto.padic_shape() {
            Some((_, m)) => (m + 2).max(8),
            None => 8,
        };
        let sp_p = ideal::transport_splitting_prec(order, p, want)?;

        let h = classes.h();
        let bs = (k - 1) as usize;
        let n = h * bs;
        let mut rows_all: Vec<Vec<C>> = Vec::new();
        for i in 0..h {
            let gam = &classes.unit_groups[i];
            let mut pi = Mat::<C>::zeros(bs, bs);
            for g in gam {
                let chi = lifted.eval(g)?;
                let chi_inv = chi
                    .try_inv()
                    .ok_or_else(|| CoreError::Data("character value vanishes on a unit".into()))?;
                let cc = proto.embed_cyc(&chi_inv)?;
                let wm = if k == 2 {
                    Mat::from_rows(vec![vec![cc]])
                } else {
                    let (_, mp) = proto.padic_shape().expect("p-adic above weight two");
                    let img = sp_p
                        .try_image(g)
                        .ok_or_else(|| CoreError::Data("unit not integral at p".into()))?
                        .truncate(mp);
                    let wz = weight_matrix(&img, k);
                    let mut w = Mat::<C>::zeros(bs, bs);
                    for r in 0..bs {
                        for cidx in 0..bs {
                            *w.at_mut(r, cidx) = cc.clone() * proto.embed_zpm(wz.at(r, cidx))?;
                        }
                    }
                    w
                };
                pi = pi.add(&wm);
            }
            pi = pi.scale(&proto.inv_group_order(gam.len() as u64)?);
            if pi.matmul(&pi) != pi {
                return Err(CoreError::Hypothesis(
                    "unit-group averaging is not idempotent".into(),
                ));
            }
            let loc = C::row_space(&pi)?;
            for r in 0..loc.rows {
                let mut row = vec![C::zero(); n];
                for cidx in 0..bs {
                    row[i * bs + cidx] = loc.at(r, cidx).clone();
                }
                rows_all.push(row);
            }
        }
        let basis = if rows_all.is_empty() {
            Mat::zeros(0, n)
        } else {
            Mat::from_rows(rows_all)
        };
        Ok(FormSpace { classes, psi: psi.clone(), lifted, k, p, proto, sp_p, basis })
    }

    /// Dimension of the space over the coefficient ring.
    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    /// Ambient dimension `h (k-1)`.
    pub fn ambient_dim(&self) -> usize {
        self.classes.h() * (self.k - 1) as usize
    }

    /// The invariant basis as rows in the ambient coordinates.
    pub fn basis(&self) -> &Mat<C> {
        &self.basis
    }

    fn block(&self) -> usize {
        (self.k - 1) as usize
    }

    /// The cocycle factor `chi(u)^{-1}` of a transported coset: the product of
    /// the lifted character away from `t` at the connecting element, times the
    /// level factor at `t` when the conductor touches it.
    fn cocycle_factor(&self, t: u64, b: &Quat, g: &[i64; 4]) -> Result<Cyc> {
        let alg = &self.classes.order.alg;
        let mut fac = self.lifted.eval_away(t, b)?;
        if let Some(loc) = self.lifted.local_at(t) {
            match loc {
                LocalLift::Trivial { .. } => {}
                LocalLift::Eichler { chi_q, sp, prec, .. } => {
                    let m = unit_matrix(sp, alg, b, Some(g), *prec)?;
                    let val = chi_q.eval_int(m.0[3].value() as i64);
                    let inv = val.try_inv().ok_or_else(|| {
                        CoreError::Data("transported coset is not a local unit".into())
                    })?;
                    fac = fac * inv;
                }
                _ => {
                    return Err(CoreError::Hypothesis(
                        "transport prime meets the ramified place".into(),
                    ))
                }
            }
        }
        Ok(fac)
    }

    /// Weight block `W(iota_p(b)^{-1} g_p)`; `g_p` is present exactly when the
    /// operator prime is `p`.
    fn weight_block(&self, b: &Quat, gamma: Option<&[i64; 4]>) -> Result<Mat<C>> {
        let bs = self.block();
        if self.k == 2 {
            return Ok(Mat::identity(1));
        }
        let (_, mp) = self.proto.padic_shape().expect("p-adic above weight two");
        let alg = &self.classes.order.alg;
        let m = unit_matrix(&self.sp_p, alg, b, gamma, mp)?;
        let wz = weight_matrix(&m, self.k);
        let mut w = Mat::<C>::zeros(bs, bs);
        for r in 0..bs {
            for c in 0..bs {
                *w.at_mut(r, c) = self.proto.embed_zpm(wz.at(r, c))?;
            }
        }
        Ok(w)
    }

    fn restrict(&self, amb: &Mat<C>) -> Result<Mat<C>> {
        let prod = self.basis.matmul(amb);
        let mut rows = Vec::with_capacity(prod.rows);
        for r in 0..prod.rows {
            let v: Vec<C> = (0..prod.cols).map(|j| prod.at(r, j).clone()).collect();
            let coords = C::in_row_space(&self.basis, &v).ok_or_else(|| {
                CoreError::Hypothesis("operator does not preserve the space".into())
            })?;
            rows.push(coords);
        }
        Ok(if rows.is_empty() {
            Mat::zeros(0, self.basis.rows)
        } else {
            Mat::from_rows(rows)
        })
    }

    /// Splitting used for transports at `t`: the stored one at `p`, a fresh
    /// one elsewhere.
    pub(crate) fn transport_splitting_at(&self, t: u64) -> Result<LocalSplitting> {
        if t == self.p {
            Ok(self.sp_p.clone())
        } else {
            ideal::transport_splitting(&self.classes.order, t)
        }
    }

    /// Transport the coset translate `I_i g` at `t` back to a class
    /// representative: the class index `j`, the connecting element `b` with
    /// `b I_j` equal to the translate, and the character cocycle factor.
    pub(crate) fn transport(
        &self,
        t: u64,
        sp_t: &LocalSplitting,
        i: usize,
        g: &[i64; 4],
    ) -> Result<(usize, Quat, Cyc)> {
        let order = &self.classes.order;
        let lat = ideal::coset_translate(order, &self.classes.reps[i], t, g, sp_t)?;
        let jid = RightIdeal::new(order, lat)?;
        let (j, b) = self.classes.class_of(&jid)?;
        let fac = self.cocycle_factor(t, &b, g)?;
        Ok((j, b, fac))
    }

    pub(crate) fn splitting_p(&self) -> &LocalSplitting {
        &self.sp_p
    }

    pub(crate) fn proto(&self) -> &C {
        &self.proto
    }

    /// Assemble the operator attached to a family of integral cosets at `t`
    /// and restrict it to the invariant basis.  Matrices act on coordinate row
    /// vectors from the right.
    fn assemble(&self, t: u64, cosets: &[[i64; 4]]) -> Result<Mat<C>> {
        let order = &self.classes.order;
        assert!(t != order.ell, "transport prime must avoid the ramified place");
        let h = self.classes.h();
        let bs = self.block();
        let n = h * bs;
        let sp_t = self.transport_splitting_at(t)?;
        let mut amb = Mat::<C>::zeros(n, n);
        for i in 0..h {
            for g in cosets {
                let (j, b, fac) = self.transport(t, &sp_t, i, g)?;
                let cc = self.proto.embed_cyc(&fac)?;
                let wm = self.weight_block(&b, if t == self.p { Some(g) } else { None })?;
                for s in 0..bs {
                    for r in 0..bs {
                        let add = cc.clone() * wm.at(s, r).clone();
                        *amb.at_mut(j * bs + s, i * bs + r) =
                            amb.at(j * bs + s, i * bs + r).clone() + add;
                    }
                }
            }
        }
        self.restrict(&amb)
    }

    /// The Hecke operator at a prime `q` away from the ramified place: the
    /// `q + 1` neighbor cosets when `q` is coprime to the level, the `q`
    /// upper-triangular cosets at a level prime.
    pub fn hecke(&self, q: u64) -> Result<Mat<C>> {
        let order = &self.classes.order;
        if q == order.ell {
            return self.atkin_ell();
        }
        if !ring::is_prime(q) {
            return Err(CoreError::Data("operator prime must be prime".into()));
        }
        let qi = q as i64;
        let mut cosets: Vec<[i64; 4]> = (0..qi).map(|a| [qi, a, 0, 1]).collect();
        if order.aux % q != 0 {
            cosets.push([1, 0, 0, qi]);
        }
        self.assemble(q, &cosets)
    }

    /// The Hecke operator at `q^2` for `q` coprime to the level, with its
    /// `q^2 + q + 1` cosets.
    pub fn hecke_squared(&self, q: u64) -> Result<Mat<C>> {
        let order = &self.classes.order;
        assert!(q != order.ell && order.aux % q != 0);
        let qi = q as i64;
        let mut cosets: Vec<[i64; 4]> = (0..qi * qi).map(|a| [qi * qi, a, 0, 1]).collect();
        for b in 0..qi {
            cosets.push([qi, b, 0, qi]);
        }
        cosets.push([1, 0, 0, qi * qi]);
        self.assemble(q, &cosets)
    }

    /// The single central coset at `q`; together with `hecke` and
    /// `hecke_squared` it satisfies `T_q^2 = T_{q^2} + q D_q`.
    pub fn central(&self, q: u64) -> Result<Mat<C>> {
        let qi = q as i64;
        self.assemble(q, &[[qi, 0, 0, qi]])
    }

    /// Diamond operator at `d` coprime to the level: the scalar `psi(d)`
    /// twisted, at weight above two with `p` in the level, by the weight
    /// action of `diag(1, d^{-1})`.
    pub fn diamond(&self, d: u64) -> Result<Mat<C>> {
        let order = &self.classes.order;
        let level = order.aux as u64 * (order.ell as u64).pow(order.m);
        if d.gcd(&level) != 1 {
            return Err(CoreError::Data("diamond argument must be coprime to the level".into()));
        }
        let val = self.psi.eval_int(d as i64);
        let cc = self.proto.embed_cyc(&val)?;
        let bs = self.block();
        let wblk = if self.k > 2 && order.aux % self.p == 0 {
            let (_, mp) = self.proto.padic_shape().expect("p-adic above weight two");
            let dinv = ZpM::new(d as i64, self.p, mp)
                .try_inv()
                .ok_or_else(|| CoreError::Data("diamond argument not a unit at p".into()))?;
            let one = ZpM::new(1, self.p, mp);
            let zero = ZpM::new(0, self.p, mp);
            let wz = weight_matrix(&M2([one, zero, zero, dinv]), self.k);
            let mut w = Mat::<C>::zeros(bs, bs);
            for r in 0..bs {
                for c in 0..bs {
                    *w.at_mut(r, c) = self.proto.embed_zpm(wz.at(r, c))?;
                }
            }
            w
        } else {
            Mat::identity(bs)
        };
        let h = self.classes.h();
        let n = h * bs;
        let mut amb = Mat::<C>::zeros(n, n);
        for i in 0..h {
            for s in 0..bs {
                for r in 0..bs {
                    *amb.at_mut(i * bs + s, i * bs + r) = cc.clone() * wblk.at(s, r).clone();
                }
            }
        }
        self.restrict(&amb)
    }

    /// The operator at the ramified prime: right translation by the fixed
    /// norm-`l` adele supported at `l`.
    pub fn atkin_ell(&self) -> Result<Mat<C>> {
        let order = &self.classes.order;
        let alg = &order.alg;
        let ell = order.ell;
        let (w, wp, _, _) = atkin_ell_elements(order)?;
        let wr = order.lattice.mul_left(&w, alg);
        let wr2 = order.lattice.mul_left(&wp, alg);
        let h = self.classes.h();
        let bs = self.block();
        let n = h * bs;
        let ell_rat = ring::rat_int(ell as i64);
        let mut amb = Mat::<C>::zeros(n, n);
        for i in 0..h {
            let rep = &self.classes.reps[i];
            let ambient = rep.lattice.sum(&order.maximal.scale(&rep.norm));
            let j_lat = ambient.intersect(&wr).sum(&ambient.intersect(&wr2));
            let nj = ideal::lattice_norm(alg, &j_lat);
            if nj != rep.norm.clone() * ell_rat.clone() {
                return Err(CoreError::Hypothesis(
                    "ramified-prime translate has the wrong norm".into(),
                ));
            }
            // scale into the order if the local coset sticks out of it
            let mut c_exp = 0u32;
            let mut scaled = j_lat.clone();
            while !scaled.is_sublattice_of(&order.lattice) {
                c_exp += 1;
                if c_exp > order.m {
                    return Err(CoreError::Hypothesis(
                        "ramified-prime translate does not scale into the order".into(),
                    ));
                }
                scaled = j_lat.scale(&ring::rat_int((ell as i64).pow(c_exp)));
            }
            let jid = RightIdeal::new(order, scaled)?;
            let (j, bb) = self.classes.class_of(&jid)?;
            let b = if c_exp == 0 {
                bb
            } else {
                bb.scale(&ring::rat(1, (ell as i64).pow(c_exp)))
            };
            let mut fac = self.lifted.eval_away(ell, &b)?;
            if let Some(loc) = self.lifted.local_at(ell) {
                let nb = alg.nrd(&b);
                let z = alg.mul(&alg.conj(&b), &w).scale(&nb.recip());
                let val = loc.eval(alg, &z)?;
                let inv = val.try_inv().ok_or_else(|| {
                    CoreError::Data("character value vanishes at the ramified prime".into())
                })?;
                fac = fac * inv;
            }
            let cc = self.proto.embed_cyc(&fac)?;
            let wm = self.weight_block(&b, None)?;
            for s in 0..bs {
                for r in 0..bs {
                    let add = cc.clone() * wm.at(s, r).clone();
                    *amb.at_mut(j * bs + s, i * bs + r) =
                        amb.at(j * bs + s, i * bs + r).clone() + add;
                }
            }
        }
        self.restrict(&amb)
    }

    /// The Eisenstein part: nonzero only at weight two, spanned by the genus
    /// vectors `i -> eta(n(I_i))` for `eta` trivial on local norms of units.
    pub fn eisenstein(&self) -> Result<Mat<C>> {
        let n = self.ambient_dim();
        if self.k != 2 {
            return Ok(Mat::zeros(0, n));
        }
        let order = &self.classes.order;
        let ell = order.ell;
        let h = self.classes.h();
        let mut cands: Vec<Vec<C>> = Vec::new();
        cands.push(vec![self.proto.embed_int(&Int::one()); h]);
        if order.nrd_unit_index() == 2 {
            let mut v = Vec::with_capacity(h);
            for i in 0..h {
                let nm = self.classes.reps[i].norm.to_integer();
                let r = (nm % Int::from(ell)).to_i64().expect("small residue");
                v.push(self.proto.embed_int(&Int::from(ring::legendre(r, ell) as i64)));
            }
            cands.push(v);
        }
        let kept: Vec<Vec<C>> = cands
            .into_iter()
            .filter(|v| C::in_row_space(&self.basis, v).is_some())
            .collect();
        if kept.is_empty() {
            return Ok(Mat::zeros(0, n));
        }
        C::row_space(&Mat::from_rows(kept))
    }
}

impl FormSpace<Cyc> {
    /// The natural pairing at weight two: `<u, v> = sum_i |G_i|^{-1} u_i
    /// conj(v_i)`.
    pub fn petersson(&self, u: &[Cyc], v: &[Cyc]) -> Result<Cyc> {
        if self.k != 2 {
            return Err(CoreError::Data(
                "pairing implemented at weight two only".into(),
            ));
        }
        let h = self.classes.h();
        assert!(u.len() == h && v.len() == h);
        let mut acc = Cyc::from_int(0);
        for i in 0..h {
            let wgt = Cyc::from_rat(ring::rat(1, self.classes.unit_groups[i].len() as i64));
            acc = acc + wgt * u[i].clone() * v[i].conj();
        }
        Ok(acc)
    }

    /// Rows of `sub` paired against all rows of `against`; the orthocomplement
    /// inside the span of `sub`.
    fn ortho_in(&self, sub: &Mat<Cyc>, against: &Mat<Cyc>) -> Result<Mat<Cyc>> {
        if against.rows == 0 {
            return Ok(sub.clone());
        }
        let mut k = Mat::<Cyc>::zeros(against.rows, sub.rows);
        for r in 0..sub.rows {
            let urow: Vec<Cyc> = (0..sub.cols).map(|j| sub.at(r, j).clone()).collect();
            for s in 0..against.rows {
                let vrow: Vec<Cyc> = (0..against.cols).map(|j| against.at(s, j).clone()).collect();
                *k.at_mut(s, r) = self.petersson(&urow, &vrow)?;
            }
        }
        let ker = k.kernel();
        let mut rows = Vec::new();
        for coeffs in ker {
            let mut v = vec![Cyc::from_int(0); sub.cols];
            for (c, r) in coeffs.iter().zip(0..sub.rows) {
                for j in 0..sub.cols {
                    v[j] = v[j].clone() + c.clone() * sub.at(r, j).clone();
                }
            }
            rows.push(v);
        }
        if rows.is_empty() {
            return Ok(Mat::zeros(0, sub.cols));
        }
        <Cyc as FormCoeff>::row_space(&Mat::from_rows(rows))
    }

    /// The cuspidal part: the orthocomplement of the Eisenstein vectors.
    pub fn cuspidal(&self) -> Result<Mat<Cyc>> {
        let eis = self.eisenstein()?;
        self.ortho_in(&self.basis, &eis)
    }

    /// Transport of forms on a coarser order (smaller power of the ramified
    /// prime, same auxiliary level): the class map `I_i -> I_i R'` with its
    /// character factor, applied to the rows of `src` (vectors on the parent
    /// space's classes).
    pub fn degeneracy_from(&self, parent: &FormSpace<Cyc>, src: &Mat<Cyc>) -> Result<Mat<Cyc>> {
        let order = &self.classes.order;
        let parent_order = &parent.classes.order;
        if self.k != 2 || parent.k != 2 {
            return Err(CoreError::Data(
                "degeneracy maps implemented at weight two only".into(),
            ));
        }
        if parent_order.ell != order.ell
            || parent_order.aux != order.aux
            || parent_order.m >= order.m
        {
            return Err(CoreError::Data(
                "parent order does not refine the level".into(),
            ));
        }
        let alg = &order.alg;
        let h = self.classes.h();
        let mut targets = Vec::with_capacity(h);
        for i in 0..h {
            let rep = &self.classes.reps[i];
            let jl = rep.lattice.product(&parent_order.lattice, alg);
            let jid = RightIdeal::new(parent_order, jl)?;
            let (mu, b) = parent.classes.class_of(&jid)?;
            let fac = parent.lifted.eval(&b)?;
            targets.push((mu, fac));
        }
        let mut rows = Vec::with_capacity(src.rows);
        for r in 0..src.rows {
            let mut v = Vec::with_capacity(h);
            for (mu, fac) in &targets {
                v.push(fac.clone() * src.at(r, *mu).clone());
            }
            if <Cyc as FormCoeff>::in_row_space(&self.basis, &v).is_none() {
                return Err(CoreError::Hypothesis(
                    "degeneracy image escapes the invariant space".into(),
                ));
            }
            rows.push(v);
        }
        if rows.is_empty() {
            return Ok(Mat::zeros(0, h));
        }
        <Cyc as FormCoeff>::row_space(&Mat::from_rows(rows))
    }

    /// The old part: the image of the parent's cuspidal vectors.
    pub fn old_space(&self, parent: &FormSpace<Cyc>) -> Result<Mat<Cyc>> {
        let src = parent.cuspidal()?;
        self.degeneracy_from(parent, &src)
    }

    /// The new part: the orthocomplement of the old part inside the cuspidal
    /// part.
    pub fn new_space(&self, parent: &FormSpace<Cyc>) -> Result<Mat<Cyc>> {
        self.new_space_multi(&[parent])
    }

    /// The new part relative to several coarser orders at once: the
    /// orthocomplement of the span of all their images.
    pub fn new_space_multi(&self, parents: &[&FormSpace<Cyc>]) -> Result<Mat<Cyc>> {
        let cusp = self.cuspidal()?;
        let mut rows: Vec<Vec<Cyc>> = Vec::new();
        for par in parents {
            let old = self.old_space(par)?;
            for r in 0..old.rows {
                rows.push((0..old.cols).map(|j| old.at(r, j).clone()).collect());
            }
        }
        if rows.is_empty() {
            return Ok(cusp);
        }
        let old = <Cyc as FormCoeff>::row_space(&Mat::from_rows(rows))?;
        self.ortho_in(&cusp, &old)
    }

    /// Restrict an operator given on the invariant basis to a sub-span given
    /// by ambient rows; errors if the span is not preserved.
    pub fn restrict_to(&self, op: &Mat<Cyc>, sub: &Mat<Cyc>) -> Result<Mat<Cyc>> {
        // coordinates of sub in the invariant basis
        let mut coords = Vec::with_capacity(sub.rows);
        for r in 0..sub.rows {
            let v: Vec<Cyc> = (0..sub.cols).map(|j| sub.at(r, j).clone()).collect();
            let c = <Cyc as FormCoeff>::in_row_space(&self.basis, &v)
                .ok_or_else(|| CoreError::Data("sub-span is not inside the space".into()))?;
            coords.push(c);
        }
        let cm = Mat::from_rows(coords);
        let moved = cm.matmul(op);
        let mut rows = Vec::with_capacity(moved.rows);
        for r in 0..moved.rows {
            let v: Vec<Cyc> = (0..moved.cols).map(|j| moved.at(r, j).clone()).collect();
            let c = cm
                .transpose()
                .solve(&v)
                .ok_or_else(|| CoreError::Hypothesis("operator does not preserve the sub-span".into()))?;
            rows.push(c);
        }
        Ok(Mat::from_rows(rows))
    }
}

/// Integer eigenvalues of a matrix over the cyclotomic scalars with their
/// geometric multiplicities, scanned in `[-bound, bound]`.
pub fn integer_eigenvalues(m: &Mat<Cyc>, bound: i64) -> Vec<(i64, usize)> {
    let mut out = Vec::new();
    for lam in -bound..=bound {
        let shifted = m.sub_scalar_diag(&Cyc::from_int(lam));
        let mult = m.rows - shifted.rank();
        if mult > 0 {
            out.push((lam, mult));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LClass;
    use proptest::prelude::*;

    fn level_121(class: LClass) -> SpecialOrder {
        SpecialOrder::build(11, 1, 2, class).unwrap()
    }

    fn cyc_space(order: &SpecialOrder, psi: &DirichletCharacter, p: u64) -> FormSpace<Cyc> {
        FormSpace::new(order, psi, 2, p, Cyc::from_int(0)).unwrap()
    }

    #[test]
    fn weight_action_is_a_homomorphism() {
        let mk = |v: [i64; 4]| {
            M2([
                ZpM::new(v[0], 5, 4),
                ZpM::new(v[1], 5, 4),
                ZpM::new(v[2], 5, 4),
                ZpM::new(v[3], 5, 4),
            ])
        };
        for k in [2u32, 3, 4, 6] {
            let g = mk([2, 1, 7, 4]);
            let h = mk([1, 3, 5, 2]);
            let wg = weight_matrix(&g, k);
            let wh = weight_matrix(&h, k);
            let wgh = weight_matrix(&g.mul(&h), k);
            assert_eq!(wg.matmul(&wh), wgh);
            // central scalars act by the (k-2)-nd power
            let c = mk([3, 0, 0, 3]);
            let wc = weight_matrix(&c, k);
            let scal = zpow(ZpM::new(3, 5, 4), k - 2);
            assert_eq!(wc, Mat::identity((k - 1) as usize).scale(&scal));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn weight_matrices_compose(a in -9i64..9, b in -9i64..9, c in -9i64..9, d in -9i64..9,
                                   e in -9i64..9, f in -9i64..9, g in -9i64..9, h in -9i64..9) {
            let m1 = M2([ZpM::new(a, 3, 3), ZpM::new(b, 3, 3), ZpM::new(c, 3, 3), ZpM::new(d, 3, 3)]);
            let m2 = M2([ZpM::new(e, 3, 3), ZpM::new(f, 3, 3), ZpM::new(g, 3, 3), ZpM::new(h, 3, 3)]);
            let w1 = weight_matrix(&m1, 5);
            let w2 = weight_matrix(&m2, 5);
            prop_assert_eq!(w1.matmul(&w2), weight_matrix(&m1.mul(&m2), 5));
        }
    }

    #[test]
    fn dimensions_and_parity_at_level_121() {
        for class in [LClass::Ramified, LClass::RamifiedU] {
            let order = level_121(class);
            let triv = DirichletCharacter::trivial(11).unwrap();
            let sp = cyc_space(&order, &triv, 3);
            assert_eq!(sp.dim(), 10);
            assert_eq!(sp.classes.h(), 10);
            // odd character at even weight: the averaging kills everything
            let quad = DirichletCharacter::quadratic(11).unwrap();
            let sp2 = cyc_space(&order, &quad, 3);
            assert_eq!(sp2.dim(), 0);
        }
    }

    #[test]
    fn hecke_eisenstein_and_relations() {
        let order = level_121(LClass::Ramified);
        let triv = DirichletCharacter::trivial(11).unwrap();
        let sp = cyc_space(&order, &triv, 3);
        let t2 = sp.hecke(2).unwrap();
        let t3 = sp.hecke(3).unwrap();
        assert_eq!(t2.matmul(&t3), t3.matmul(&t2));

        // Eisenstein span: all-ones with eigenvalue q + 1, the genus vector
        // with eigenvalue (q + 1) eta(q)
        let eis = sp.eisenstein().unwrap();
        assert_eq!(eis.rows, 2);
        let h = sp.classes.h();
        let ones: Vec<Cyc> = vec![Cyc::from_int(1); h];
        let genus: Vec<Cyc> = (0..h)
            .map(|i| {
                let nm = sp.classes.reps[i].norm.to_integer();
                let r = (nm % Int::from(11)).to_i64().unwrap();
                Cyc::from_int(ring::legendre(r, 11) as i64)
            })
            .collect();
        for (v, twisted) in [(&ones, false), (&genus, true)] {
            assert!(<Cyc as FormCoeff>::in_row_space(&eis, v).is_some());
            let coords = <Cyc as FormCoeff>::in_row_space(sp.basis(), v).unwrap();
            let cm = Mat::from_rows(vec![coords.clone()]);
            for (op, q) in [(&t2, 2i64), (&t3, 3i64)] {
                let moved = cm.matmul(op);
                let eta = ring::legendre(q, 11) as i64;
                let lam = if twisted { (q + 1) * eta } else { q + 1 };
                for j in 0..coords.len() {
                    assert_eq!(
                        moved.at(0, j).clone(),
                        Cyc::from_int(lam) * coords[j].clone(),
                        "eigenvalue mismatch at q = {q}"
                    );
                }
            }
        }

        // diamond and the central coset at weight two with trivial character
        let id = Mat::<Cyc>::identity(sp.dim());
        assert_eq!(sp.diamond(2).unwrap(), id);
        let d2 = sp.central(2).unwrap();
        assert_eq!(d2, id);

        // T_2^2 = T_4 + 2 D_2
        let t4 = sp.hecke_squared(2).unwrap();
        assert_eq!(t2.matmul(&t2), t4.add(&d2.scale(&Cyc::from_int(2))));
    }

    #[test]
    fn eichler_relation_at_weight_four() {
        let order = level_121(LClass::Ramified);
        let triv = DirichletCharacter::trivial(11).unwrap();
        let proto = ZpM::new(0, 3, 4);
        let sp = FormSpace::new(&order, &triv, 4, 3, proto).unwrap();
        assert_eq!(sp.dim(), 30);
        let t2 = sp.hecke(2).unwrap();
        let t4 = sp.hecke_squared(2).unwrap();
        let d2 = sp.central(2).unwrap();
        let two = ZpM::new(2, 3, 4);
        assert_eq!(t2.matmul(&t2), t4.add(&d2.scale(&two)));
    }

    #[test]
    fn atkin_ell_involution() {
        // maximal order at 11: two classes
        let order = SpecialOrder::build(11, 1, 1, LClass::Unramified).unwrap();
        let triv = DirichletCharacter::trivial(11).unwrap();
        let sp = cyc_space(&order, &triv, 3);
        assert_eq!(sp.dim(), 2);
        let u = sp.atkin_ell().unwrap();
        let id = Mat::<Cyc>::identity(2);
        assert_eq!(u.matmul(&u), id);
        let t2 = sp.hecke(2).unwrap();
        assert_eq!(u.matmul(&t2), t2.matmul(&u));

        // level 121, both classes
        for class in [LClass::Ramified, LClass::RamifiedU] {
            let order = level_121(class);
            let sp = cyc_space(&order, &triv, 3);
            let u = sp.atkin_ell().unwrap();
            let id = Mat::<Cyc>::identity(sp.dim());
            assert_eq!(u.matmul(&u), id);
        }
    }

    #[test]
    fn decomposition_at_level_121() {
        let triv = DirichletCharacter::trivial(11).unwrap();
        let parent_order = SpecialOrder::build(11, 1, 1, LClass::Unramified).unwrap();
        let parent = cyc_space(&parent_order, &triv, 3);
        assert_eq!(parent.dim(), 2);
        assert_eq!(parent.eisenstein().unwrap().rows, 1);
        assert_eq!(parent.cuspidal().unwrap().rows, 1);

        let order = level_121(LClass::Ramified);
        let sp = cyc_space(&order, &triv, 3);
        let eis = sp.eisenstein().unwrap();
        let cusp = sp.cuspidal().unwrap();
        let old = sp.old_space(&parent).unwrap();
        let newp = sp.new_space(&parent).unwrap();
        assert_eq!(eis.rows, 2);
        assert_eq!(cusp.rows, 8);
        assert_eq!(old.rows, 1);
        assert_eq!(newp.rows, 7);

        // pairwise orthogonality of the new part against the old part
        for r in 0..newp.rows {
            let u: Vec<Cyc> = (0..newp.cols).map(|j| newp.at(r, j).clone()).collect();
            for s in 0..old.rows {
                let v: Vec<Cyc> = (0..old.cols).map(|j| old.at(s, j).clone()).collect();
                assert!(sp.petersson(&u, &v).unwrap().is_zero());
            }
        }

        // the Hecke action preserves the new part
        let t2 = sp.hecke(2).unwrap();
        let t2new = sp.restrict_to(&t2, &newp).unwrap();
        assert_eq!(t2new.rows, 7);
    }
}
