//! Local splittings `B tensor Q_q = M_2(Q_q)` at finite precision.
//!
//! For a prime `q` where `B = (a,b|Q)` splits, an explicit isomorphism is
//! assembled from one of three models:
//!
//! * `a = x^2` in `Z_q`:  `i -> diag(x, -x)`, `j -> [[0,1],[b,0]]`;
//! * `b = y^2` in `Z_q`:  `j -> diag(y, -y)`, `i -> [[0,1],[a,0]]`;
//! * `s^2 - b t^2 = a`:   `i -> [[s,t],[-tb,-s]]`, `j -> [[0,1],[b,0]]`.
//!
//! The third model exists with integral `s, t` for all the algebras produced
//! here (`a` is a norm from the quadratic algebra `Q_q(sqrt b)` exactly when
//! `B_q` splits); seeds are found by a bounded residue search and refined by
//! one-variable Hensel iteration on whichever variable has the smaller
//! derivative valuation.
//!
//! The raw splitting need not map a given maximal order onto `M_2(Z_q)`.
//! It is normalized by computing the lattice `Z_q^2 * iota(O)` (one
//! enlargement step suffices because the structure constants of an order are
//! integral) and conjugating by its triangular basis.  A determinant
//! certificate then checks that the images of the order basis span
//! `M_2(Z_q)`.  All arithmetic is carried out in `Z/q^P` with `P` the target
//! precision plus guard digits; divisions by powers of `q` during the
//! conjugation consume guard digits only.

use crate::quat::{Quat, QuatAlgebra};
use crate::ring::{Scalar, ZpM};
use crate::{CoreError, Rat, Result};
use num_bigint::BigInt;
use num_traits::Zero;

/// Guard digits added on top of the requested precision.
pub const GUARD_DIGITS: u32 = 8;

/// 2x2 matrix over `Z/q^P`, row-major `[a, b, c, d]` for `[[a,b],[c,d]]`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct M2(pub [ZpM; 4]);

impl M2 {
    pub fn zero(q: u64, m: u32) -> Self {
        M2([ZpM::new(0, q, m); 4])
    }

    pub fn identity(q: u64, m: u32) -> Self {
        let mut z = Self::zero(q, m);
        z.0[0] = ZpM::new(1, q, m);
        z.0[3] = ZpM::new(1, q, m);
        z
    }

    pub fn add(&self, o: &M2) -> M2 {
        M2([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }

    pub fn sub(&self, o: &M2) -> M2 {
        M2([
            self.0[0] - o.0[0],
            self.0[1] - o.0[1],
            self.0[2] - o.0[2],
            self.0[3] - o.0[3],
        ])
    }

    pub fn mul(&self, o: &M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    }

    pub fn scale(&self, t: ZpM) -> M2 {
        M2([self.0[0] * t, self.0[1] * t, self.0[2] * t, self.0[3] * t])
    }

    pub fn det(&self) -> ZpM {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    pub fn trace(&self) -> ZpM {
        self.0[0] + self.0[3]
    }

    pub fn adjugate(&self) -> M2 {
        let [a, b, c, d] = self.0;
        M2([d, -b, -c, a])
    }

    /// Inverse when the determinant is a unit.
    pub fn inverse(&self) -> Option<M2> {
        let inv = self.det().try_inv()?;
        Some(self.adjugate().scale(inv))
    }

    pub fn pow(&self, mut e: u64, q: u64, m: u32) -> M2 {
        let mut base = *self;
        let mut acc = Self::identity(q, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn truncate(&self, m2: u32) -> M2 {
        M2([
            self.0[0].truncate(m2),
            self.0[1].truncate(m2),
            self.0[2].truncate(m2),
            self.0[3].truncate(m2),
        ])
    }

    /// Exact division of every entry by `q^k`.
    pub fn div_exact_p(&self, k: u32) -> Option<M2> {
        Some(M2([
            self.0[0].div_exact_p(k)?,
            self.0[1].div_exact_p(k)?,
            self.0[2].div_exact_p(k)?,
            self.0[3].div_exact_p(k)?,
        ]))
    }
}

/// Square root in `Z/q^M` of an element with even valuation whose unit part
/// is a square; `None` otherwise.
pub fn padic_sqrt(x: ZpM) -> Option<ZpM> {
    let q = x.prime();
    let m = x.precision();
    if x.is_zero() {
        return Some(x);
    }
    let v = x.valuation();
    if v % 2 == 1 {
        return None;
    }
    let u = x.div_exact_p(v)?;
    let seed = if q == 2 {
        if m >= 3 && u.value() % 8 != 1 {
            return None;
        }
        ZpM::new(1, 2, m)
    } else {
        let r0 = (0..q).find(|r| (r * r) % q == u.value() % q)?;
        ZpM::new(r0 as i64, q, m)
    };
    let mut r = seed;
    for _ in 0..(2 * m + 4) {
        let f = r * r - u;
        if f.is_zero() {
            break;
        }
        // r <- r - f / (2r)
        let step = if q == 2 {
            f.div_exact_p(1)? * r.try_inv()?
        } else {
            f * (ZpM::new(2, q, m) * r).try_inv()?
        };
        r = r - step;
    }
    if !(r * r - u).is_zero() {
        return None;
    }
    Some(r * ZpM::new(q as i64, q, m).pow((v / 2) as u64))
}

/// Solve `s^2 - b t^2 = a` over `Z/q^P` by seed search + Hensel.
fn solve_norm_eq(a: ZpM, b: ZpM, q: u64, prec: u32) -> Option<(ZpM, ZpM)> {
    let f = |s: ZpM, t: ZpM| s * s - b * t * t - a;
    for w in 1..=5u32 {
        let qw = (q as u128).pow(w);
        if qw > 4096 {
            break;
        }
        let qw = qw as u64;
        for t0 in 0..qw {
            for s0 in 0..qw {
                let s = ZpM::new(s0 as i64, q, prec);
                let t = ZpM::new(t0 as i64, q, prec);
                let val = f(s, t);
                let vf = val.valuation();
                // ds = 2s, dt = -2bt
                let ds = ZpM::new(2, q, prec) * s;
                let dt = ZpM::new(2, q, prec) * b * t;
                let es = if ds.is_zero() { prec } else { ds.valuation() };
                let et = if dt.is_zero() { prec } else { dt.valuation() };
                if es <= et && vf > 2 * es && es < prec {
                    if let Some(sf) = hensel_1d(|x| f(x, t), |x| ZpM::new(2, q, prec) * x, s, es)
                    {
                        return Some((sf, t));
                    }
                }
                if et < es && vf > 2 * et && et < prec {
                    let neg2b = -(ZpM::new(2, q, prec) * b);
                    if let Some(tf) = hensel_1d(|x| f(s, x), |x| neg2b * x, t, et) {
                        return Some((s, tf));
                    }
                }
            }
        }
    }
    None
}

/// One-variable Hensel iteration at fixed modulus: refine `x0` with
/// `v(f(x0)) > 2 e`, `e = v(f'(x0))`, until `f(x) = 0` in `Z/q^P`.
fn hensel_1d(
    f: impl Fn(ZpM) -> ZpM,
    df: impl Fn(ZpM) -> ZpM,
    x0: ZpM,
    e: u32,
) -> Option<ZpM> {
    let mut x = x0;
    let prec = x0.precision();
    for _ in 0..(2 * prec + 4) {
        let fx = f(x);
        if fx.is_zero() {
            return Some(x);
        }
        let d = df(x);
        if d.is_zero() || d.valuation() != e {
            return None;
        }
        let step = fx.div_exact_p(e)? * d.div_exact_p(e)?.try_inv()?;
        x = x - step;
    }
    None
}

/// A normalized splitting at `q` for a fixed maximal order.
#[derive(Clone, Debug)]
pub struct LocalSplitting {
    pub q: u64,
    /// Working precision (target + guard digits).
    pub work_prec: u32,
    /// Requested precision; entries are reliable modulo `q^target`.
    pub target_prec: u32,
    alg: QuatAlgebra,
    /// Normalized images of `1, i, j, k` at working precision.
    base: [M2; 4],
}

impl LocalSplitting {
    /// Build a splitting at `q` normalized so the given maximal-order basis
    /// maps onto `M_2(Z_q)` (certified by a unit determinant).
    pub fn new(
        alg: &QuatAlgebra,
        order_basis: &[Quat],
        q: u64,
        target_prec: u32,
    ) -> Result<Self> {
        if crate::quat::hilbert_symbol(&alg.a, &alg.b, q) == -1 {
            return Err(CoreError::Hypothesis(format!(
                "algebra is ramified at q = {q}; no splitting exists"
            )));
        }
        let prec = target_prec + GUARD_DIGITS;
        let a = ZpM::from_big(&alg.a, q, prec);
        let b = ZpM::from_big(&alg.b, q, prec);
        let one = M2::identity(q, prec);
        let (im_i, im_j) = if let Some(x) = padic_sqrt(a) {
            (
                M2([x, ZpM::new(0, q, prec), ZpM::new(0, q, prec), -x]),
                M2([ZpM::new(0, q, prec), ZpM::new(1, q, prec), b, ZpM::new(0, q, prec)]),
            )
        } else if let Some(y) = padic_sqrt(b) {
            (
                M2([ZpM::new(0, q, prec), ZpM::new(1, q, prec), a, ZpM::new(0, q, prec)]),
                M2([y, ZpM::new(0, q, prec), ZpM::new(0, q, prec), -y]),
            )
        } else if let Some((s, t)) = solve_norm_eq(a, b, q, prec) {
            (
                M2([s, t, -(t * b), -s]),
                M2([ZpM::new(0, q, prec), ZpM::new(1, q, prec), b, ZpM::new(0, q, prec)]),
            )
        } else {
            return Err(CoreError::Hypothesis(format!(
                "no splitting model at q = {q}; is the algebra split there?"
            )));
        };
        let im_k = im_i.mul(&im_j);
        let mut sp = LocalSplitting {
            q,
            work_prec: prec,
            target_prec,
            alg: alg.clone(),
            base: [one, im_i, im_j, im_k],
        };
        sp.normalize_to_order(order_basis)?;
        sp.certify(order_basis)?;
        Ok(sp)
    }

    /// Conjugate so that the order basis images generate `M_2(Z_q)`.
    fn normalize_to_order(&mut self, order_basis: &[Quat]) -> Result<()> {
        let q = self.q;
        let prec = self.work_prec;
        // Common q-power denominator of the order basis images.
        let mut sc = 0u32;
        for e in order_basis {
            for c in &e.c {
                let v = crate::ring::valuation_big(c.denom(), q);
                sc = sc.max(v);
            }
        }
        let qs = ZpM::new(q as i64, q, prec).pow(sc as u64);
        // Lattice rows: q^sc * (e_std and e_std * iota(e)) for the two
        // standard basis vectors e_std of Z_q^2.
        let mut rows: Vec<[ZpM; 2]> = vec![
            [qs, ZpM::new(0, q, prec)],
            [ZpM::new(0, q, prec), qs],
        ];
        for e in order_basis {
            let img = self.scaled_image(e, sc)?; // q^sc * iota(e)
            rows.push([img.0[0], img.0[1]]);
            rows.push([img.0[2], img.0[3]]);
        }
        let g = local_hnf2(&mut rows, q, prec)?;
        // conjugate: iota'(x) = g iota(x) g^{-1}; det(g) = q^{v0+v1} * unit
        let det = g.det();
        let dv = det.valuation();
        let unit_inv = det
            .div_exact_p(dv)
            .and_then(|u| u.try_inv())
            .ok_or_else(|| CoreError::Precision("degenerate stable lattice".into()))?;
        let adj = g.adjugate().scale(unit_inv);
        for t in 1..4 {
            let prod = g.mul(&self.base[t]).mul(&adj);
            self.base[t] = prod.div_exact_p(dv).ok_or_else(|| {
                CoreError::Precision(format!(
                    "stable-lattice conjugation not integral at q = {q}"
                ))
            })?;
        }
        Ok(())
    }

    /// Determinant certificate: images of the order basis span `M_2(Z_q)`.
    fn certify(&self, order_basis: &[Quat]) -> Result<()> {
        let mut cols = Vec::with_capacity(4);
        for e in order_basis {
            let img = self.try_image(e).ok_or_else(|| {
                CoreError::Hypothesis(format!(
                    "order basis image not integral at q = {}",
                    self.q
                ))
            })?;
            cols.push(img.0);
        }
        // 4x4 determinant mod q must be a unit
        let det4 = det4_mod_q(&cols, self.q);
        if det4 == 0 {
            return Err(CoreError::Hypothesis(format!(
                "order does not map onto M2(Z_q) at q = {}",
                self.q
            )));
        }
        // sanity on the multiplicative structure at target precision
        let i_img = self.base[1].truncate(self.target_prec);
        let j_img = self.base[2].truncate(self.target_prec);
        let a = ZpM::from_big(&self.alg.a, self.q, self.target_prec);
        let b = ZpM::from_big(&self.alg.b, self.q, self.target_prec);
        let ii = i_img.mul(&i_img);
        let jj = j_img.mul(&j_img);
        let scal = |c: ZpM| M2::identity(self.q, self.target_prec).scale(c);
        if ii != scal(a) || jj != scal(b) {
            return Err(CoreError::Precision(format!(
                "splitting relations fail at q = {}",
                self.q
            )));
        }
        let anti = i_img.mul(&j_img).add(&j_img.mul(&i_img));
        if anti != M2::zero(self.q, self.target_prec) {
            return Err(CoreError::Precision(format!(
                "anticommutation fails at q = {}",
                self.q
            )));
        }
        Ok(())
    }

    /// `q^sc * iota(x)` for `x` with `q`-denominator at most `q^sc`.
    fn scaled_image(&self, x: &Quat, sc: u32) -> Result<M2> {
        let q = self.q;
        let prec = self.work_prec;
        let qs = BigInt::from(q).pow(sc);
        let mut acc = M2::zero(q, prec);
        for (t, c) in x.c.iter().enumerate() {
            let scaled = c * Rat::from(qs.clone());
            let dv = crate::ring::valuation_big(scaled.denom(), q);
            if dv > 0 {
                return Err(CoreError::Hypothesis(format!(
                    "element has q-denominator beyond q^{sc} at q = {q}"
                )));
            }
            let cz = ZpM::from_rat(&scaled, q, prec).ok_or_else(|| {
                CoreError::Hypothesis(format!("non-q-integral coefficient at q = {q}"))
            })?;
            acc = acc.add(&self.base[t].scale(cz));
        }
        Ok(acc)
    }

    /// Image of an element that is integral at `q` (denominator a unit times
    /// a q-power that divides out); `None` when the image is not integral.
    pub fn try_image(&self, x: &Quat) -> Option<M2> {
        let mut sc = 0u32;
        for c in &x.c {
            sc = sc.max(crate::ring::valuation_big(c.denom(), self.q));
        }
        let img = self.scaled_image(x, sc).ok()?;
        img.div_exact_p(sc)
    }

    /// Image of a q-integral element; panics on non-integral input.
    pub fn image(&self, x: &Quat) -> M2 {
        self.try_image(x)
            .expect("element image is not integral at q")
    }

    /// Image truncated to `q^m`, `m <= target precision`.
    pub fn image_mod(&self, x: &Quat, m: u32) -> M2 {
        assert!(m <= self.target_prec);
        self.image(x).truncate(m)
    }
}

/// Triangular local basis `[[q^v0, c], [0, q^v1]]` of the lattice spanned by
/// the given rows in `(Z/q^P)^2` (full rank required).
fn local_hnf2(rows: &mut Vec<[ZpM; 2]>, q: u64, prec: u32) -> Result<M2> {
    // pivot on minimal valuation in the first column
    let v0_idx = rows
        .iter()
        .enumerate()
        .filter(|(_, r)| !r[0].is_zero())
        .min_by_key(|(i, r)| (r[0].valuation(), *i))
        .map(|(i, _)| i)
        .ok_or_else(|| CoreError::Precision("rank collapse in local lattice".into()))?;
    rows.swap(0, v0_idx);
    let p0 = rows[0][0];
    let v0 = p0.valuation();
    let u0 = p0.div_exact_p(v0).unwrap().try_inv().unwrap();
    rows[0] = [p0 * u0, rows[0][1] * u0]; // first entry now q^{v0}
    for idx in 1..rows.len() {
        let x = rows[idx][0];
        if x.is_zero() {
            continue;
        }
        let f = x
            .div_exact_p(v0)
            .ok_or_else(|| CoreError::Precision("pivot valuation not minimal".into()))?;
        rows[idx] = [rows[idx][0] - f * rows[0][0], rows[idx][1] - f * rows[0][1]];
    }
    let v1_idx = rows
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, r)| !r[1].is_zero())
        .min_by_key(|(i, r)| (r[1].valuation(), *i))
        .map(|(i, _)| i)
        .ok_or_else(|| CoreError::Precision("rank collapse in local lattice".into()))?;
    rows.swap(1, v1_idx);
    let p1 = rows[1][1];
    let v1 = p1.valuation();
    let u1 = p1.div_exact_p(v1).unwrap().try_inv().unwrap();
    rows[1] = [ZpM::new(0, q, prec), p1 * u1];
    // reduce the (0,1) entry modulo q^{v1} (canonical representative)
    let c = rows[0][1];
    let mut qv1 = 1u64;
    for _ in 0..v1 {
        qv1 *= q;
    }
    let t = BigInt::from(c.value() / qv1);
    let red = c - ZpM::from_big(&t, q, prec) * rows[1][1];
    Ok(M2([rows[0][0], red, rows[1][0], rows[1][1]]))
}

/// Determinant mod q of the 4x4 matrix with the given rows of `Z/q^P`
/// entries (reduced mod q first).
fn det4_mod_q(rows: &[[ZpM; 4]], q: u64) -> u64 {
    let mut m = [[0i64; 4]; 4];
    for (i, r) in rows.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            m[i][j] = (x.value() % q) as i64;
        }
    }
    let qq = q as i64;
    // Laplace over the first row with 3x3 minors, all mod q
    let det3 = |a: [[i64; 3]; 3]| -> i64 {
        (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
            .rem_euclid(qq)
    };
    let mut acc = 0i64;
    for col in 0..4 {
        let mut minor = [[0i64; 3]; 3];
        for i in 1..4 {
            let mut jj = 0;
            for j in 0..4 {
                if j == col {
                    continue;
                }
                minor[i - 1][jj] = m[i][j];
                jj += 1;
            }
        }
        let sign = if col % 2 == 0 { 1 } else { -1 };
        acc = (acc + sign * m[0][col] * det3(minor)).rem_euclid(qq);
    }
    acc.rem_euclid(qq) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rat_int};

    fn max_order_neg1_neg11() -> Vec<Quat> {
        vec![
            Quat::one(),
            Quat::basis_i(),
            Quat::new([rat(1, 2), rat_int(0), rat(1, 2), rat_int(0)]),
            Quat::new([rat_int(0), rat(1, 2), rat_int(0), rat(1, 2)]),
        ]
    }

    #[test]
    fn padic_sqrt_values() {
        // 2 is a QR mod 7
        let r = padic_sqrt(ZpM::new(2, 7, 6)).unwrap();
        assert_eq!(r * r, ZpM::new(2, 7, 6));
        // 17 = 1 mod 8 is a 2-adic square
        let r = padic_sqrt(ZpM::new(17, 2, 10)).unwrap();
        assert_eq!(r * r, ZpM::new(17, 2, 10));
        // 3 mod 8 is not
        assert!(padic_sqrt(ZpM::new(3, 2, 10)).is_none());
        // even valuation with square unit part: 4*17
        let r = padic_sqrt(ZpM::new(68, 2, 10)).unwrap();
        assert_eq!(r * r, ZpM::new(68, 2, 10));
        // odd valuation
        assert!(padic_sqrt(ZpM::new(12, 2, 10)).is_none());
        assert!(padic_sqrt(ZpM::new(5, 5, 6)).is_none());
    }

    #[test]
    fn norm_equation_hard_cases() {
        // s^2 + 5 t^2 = -2 over Z_2 (the (-2,-5) algebra at q = 2)
        let prec = 12;
        let a = ZpM::new(-2, 2, prec);
        let b = ZpM::new(-5, 2, prec);
        let (s, t) = solve_norm_eq(a, b, 2, prec).unwrap();
        assert_eq!(s * s - b * t * t, a);
        // s^2 + 11 t^2 = -1 over Z_3
        let a = ZpM::new(-1, 3, prec);
        let b = ZpM::new(-11, 3, prec);
        let (s, t) = solve_norm_eq(a, b, 3, prec).unwrap();
        assert_eq!(s * s - b * t * t, a);
    }

    #[test]
    fn splitting_respects_structure() {
        let alg = QuatAlgebra::new(-1, -11);
        let basis = max_order_neg1_neg11();
        for q in [2u64, 3, 5, 7, 13] {
            let sp = LocalSplitting::new(&alg, &basis, q, 6).unwrap();
            // trd -> trace, nrd -> det on a sample of order elements
            let samples = [
                Quat::from_ints(1, 2, 3, 4),
                Quat::from_ints(0, 1, 1, -1),
                Quat::new([rat(1, 2), rat(3, 2), rat(1, 2), rat(1, 2)]),
                Quat::new([rat(5, 2), rat(-1, 2), rat(3, 2), rat(7, 2)]),
            ];
            for x in &samples {
                if !basis_contains(&basis, x) {
                    continue;
                }
                let img = sp.image_mod(x, 6);
                let tr = ZpM::from_rat(&alg.trd(x), q, 6).unwrap();
                let nr = ZpM::from_rat(&alg.nrd(x), q, 6).unwrap();
                assert_eq!(img.trace(), tr, "trace at q={q}");
                assert_eq!(img.det(), nr, "det at q={q}");
            }
            // multiplicativity at target precision
            let x = Quat::from_ints(1, 1, 0, 2);
            let y = Quat::new([rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2)]);
            let lhs = sp.image_mod(&alg.mul(&x, &y), 6);
            let rhs = sp.image(&x).mul(&sp.image(&y)).truncate(6);
            assert_eq!(lhs, rhs, "homomorphism at q={q}");
        }
    }

    fn basis_contains(basis: &[Quat], x: &Quat) -> bool {
        let l = crate::lattice::QuatLattice::from_generators(basis);
        l.contains(x)
    }

    #[test]
    fn splitting_at_two_with_quarter_denominators() {
        // (-2,-5) has discriminant 5; its maximal order
        // [1, i, (1+i+j)/2, (2+i+k)/4] has a 4-denominator, so the stable
        // lattice at q = 2 must absorb two digits of scaling.
        let alg = QuatAlgebra::new(-2, -5);
        let basis = vec![
            Quat::one(),
            Quat::basis_i(),
            Quat::new([rat(1, 2), rat(1, 2), rat(1, 2), rat_int(0)]),
            Quat::new([rat(1, 2), rat(1, 4), rat_int(0), rat(1, 4)]),
        ];
        let o = crate::lattice::QuatLattice::from_generators(&basis);
        assert_eq!(o.discrd(&alg), rat_int(5), "the test order must be maximal");
        let sp = LocalSplitting::new(&alg, &basis, 2, 6).unwrap();
        let x = Quat::from_ints(1, 1, 1, 0);
        let y = basis[3].clone();
        let lhs = sp.image_mod(&alg.mul(&x, &y), 6);
        let rhs = sp.image(&x).mul(&sp.image(&y)).truncate(6);
        assert_eq!(lhs, rhs);
        assert_eq!(sp.image_mod(&x, 6).det(), ZpM::from_rat(&alg.nrd(&x), 2, 6).unwrap());
        assert_eq!(sp.image_mod(&y, 6).trace(), ZpM::from_rat(&alg.trd(&y), 2, 6).unwrap());
    }

    #[test]
    fn rejects_ramified_prime() {
        let alg = QuatAlgebra::new(-1, -11);
        let basis = max_order_neg1_neg11();
        assert!(LocalSplitting::new(&alg, &basis, 11, 6).is_err());
    }
}
