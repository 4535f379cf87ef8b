//! Right ideals of a special order, their classes, and local coset transport.
//!
//! A right ideal of `R` is a full lattice `I` with `I R = I`.  Everything kept
//! here is integral (`I ⊆ R`) and locally principal; the norm `n(I)` is the
//! positive generator of the ℤ-module spanned by `nrd` on `I`, and local
//! principality is certified by the exact index identity `[R : I] = n(I)²`.
//!
//! Classes are enumerated by a neighbor walk.  For a prime `q` coprime to the
//! level, the translates `{x ∈ I : x ∈ g γ R_q}` over the `q + 1` determinant-q
//! coset matrices `γ` are right ideals of norm `q·n(I)`; here `g` is any local
//! generator of `I` at `q` and membership is tested through the local splitting
//! at finite precision.  Each translate is identified up to the left
//! `B^×`-action by an exact short-vector search, and the walk is complete when
//! the accumulated mass `Σ_i 1/#Γ̃_i` reaches the mass of the order — a
//! termination certificate independent of traversal order.  Neighbor primes are
//! tried in increasing order; a single prime can fail to connect the two genera
//! when the norm class group is nontrivial, so the walk widens automatically.

use crate::lattice::QuatLattice;
use crate::order::SpecialOrder;
use crate::quat::{Quat, QuatAlgebra};
use crate::ring::{self, ZpM};
use crate::splitting::{LocalSplitting, M2, GUARD_DIGITS};
use crate::{linalg, CoreError, Rat, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Positive generator of the ℤ-module generated by the reduced norm on `l`
/// (spanned by `nrd(e_i)` and the polarizations `trd(e_i ē_j)`).
pub fn lattice_norm(alg: &QuatAlgebra, l: &QuatLattice) -> Rat {
    let g = l.gram(alg);
    let mut vals: Vec<Rat> = Vec::new();
    for i in 0..4 {
        vals.push(g.at(i, i).clone());
        for j in (i + 1)..4 {
            vals.push(g.at(i, j) * &ring::rat_int(2));
        }
    }
    rational_gcd(&vals)
}

fn rational_gcd(vals: &[Rat]) -> Rat {
    let mut den = BigInt::one();
    for v in vals {
        den = den.lcm(v.denom());
    }
    let mut num = BigInt::zero();
    for v in vals {
        let scaled = v * &Rat::from(den.clone());
        num = num.gcd(scaled.numer());
    }
    Rat::new(num, den)
}

/// An integral, locally principal right ideal of a fixed special order.
#[derive(Clone, Debug, PartialEq)]
pub struct RightIdeal {
    pub lattice: QuatLattice,
    /// Lattice norm, a positive integer for the integral ideals kept here.
    pub norm: Rat,
}

impl RightIdeal {
    /// Wrap and certify: `I ⊆ R`, `I·R = I`, and `[R : I] = n(I)²`.
    pub fn new(order: &SpecialOrder, lattice: QuatLattice) -> Result<Self> {
        let alg = &order.alg;
        if !lattice.is_sublattice_of(&order.lattice) {
            return Err(CoreError::Data(
                "ideal lattice is not contained in the order".into(),
            ));
        }
        if lattice.product(&order.lattice, alg) != lattice {
            return Err(CoreError::Data(
                "lattice is not a right module over the order".into(),
            ));
        }
        let norm = lattice_norm(alg, &lattice);
        let index = Rat::from(lattice.index_in(&order.lattice));
        if index != &norm * &norm {
            return Err(CoreError::Hypothesis(
                "ideal fails the local principality certificate [R:I] = n(I)^2".into(),
            ));
        }
        Ok(RightIdeal { lattice, norm })
    }
}

/// Left order `O_l(I) = {x : x I ⊆ I} = ∩_μ I e_μ⁻¹` over a basis of `I`.
pub fn left_order(alg: &QuatAlgebra, l: &QuatLattice) -> QuatLattice {
    let mut acc: Option<QuatLattice> = None;
    for e in &l.basis() {
        let n = alg.nrd(e);
        let cand = l.mul_right(&alg.conj(e), alg).scale(&n.recip());
        acc = Some(match acc {
            None => cand,
            Some(a) => a.intersect(&cand),
        });
    }
    acc.unwrap()
}

/// All units of an order lattice: the finitely many norm-1 vectors.
pub fn unit_group(alg: &QuatAlgebra, o: &QuatLattice) -> Vec<Quat> {
    o.vectors_of_norm(alg, &ring::rat_int(1))
}

/// Largest usable splitting precision at `q` (`q^(prec + guard)` must fit u64).
pub fn max_splitting_precision(q: u64) -> u32 {
    let mut cap = 0u32;
    let mut acc: u128 = 1;
    while acc.saturating_mul(q as u128) <= u64::MAX as u128 {
        acc *= q as u128;
        cap += 1;
    }
    cap.saturating_sub(GUARD_DIGITS)
}

/// Splitting of the ambient maximal order at `q` sized for coset transport.
pub fn transport_splitting(order: &SpecialOrder, q: u64) -> Result<LocalSplitting> {
    transport_splitting_prec(order, q, 8)
}

/// Same, but asking for a specific target precision (clamped to what fits in
/// machine words).
pub fn transport_splitting_prec(
    order: &SpecialOrder,
    q: u64,
    want: u32,
) -> Result<LocalSplitting> {
    let want = want.max(2);
    let cap = max_splitting_precision(q);
    if cap < want {
        return Err(CoreError::Precision(format!(
            "splitting precision {want} at q = {q} exceeds machine range (max {cap})"
        )));
    }
    LocalSplitting::new(&order.alg, &order.maximal.basis(), q, want)
}

/// A `q`-local generator of `I`: an element of `I` whose reduced norm has the
/// same `q`-valuation as `n(I)`.  Deterministic (first hit of the short-vector
/// enumeration at the smallest admissible norm).
pub fn local_generator(alg: &QuatAlgebra, ideal: &RightIdeal, q: u64) -> Result<Quat> {
    for t in 1..=256u64 {
        if t % q == 0 {
            continue;
        }
        let target = &ideal.norm * &ring::rat_int(t as i64);
        if let Some(v) = ideal.lattice.vectors_of_norm(alg, &target).into_iter().next() {
            return Ok(v);
        }
    }
    Err(CoreError::Hypothesis(format!(
        "no local generator with q-coprime norm ratio found at q = {q}"
    )))
}

/// The translate `{x ∈ I : x ∈ g γ R_q}` of the determinant-q coset matrix
/// `γ = [a, b; c, d]` (row-major `[a, b, c, d]`).  At a prime dividing the
/// Eichler part of the level the membership condition includes the extra
/// lower-left congruence defining `R_q`.  Certified by `[I : J] = q²`.
pub fn coset_translate(
    order: &SpecialOrder,
    ideal: &RightIdeal,
    q: u64,
    gamma: &[i64; 4],
    sp: &LocalSplitting,
) -> Result<QuatLattice> {
    let alg = &order.alg;
    assert!(ideal.norm.denom().is_one());
    let v = ring::valuation_big(ideal.norm.numer(), q);
    let e = ring::valuation(order.aux, q);
    let det = gamma[0] * gamma[3] - gamma[1] * gamma[2];
    let vdet = ring::valuation(det.unsigned_abs(), q);
    assert!(vdet >= 1, "coset determinant must be divisible by q");
    let w0 = v + vdet;
    let w2 = v + vdet + e;
    if w2 > sp.target_prec {
        return Err(CoreError::Precision(format!(
            "coset transport at q = {q} needs precision {w2} > {}",
            sp.target_prec
        )));
    }

    let wp = sp.target_prec;
    let g = local_generator(alg, ideal, q)?;
    let adj_h = sp.image_mod(&g, wp).adjugate();
    let mk = |x: i64| ZpM::from_big(&BigInt::from(x), q, wp);
    let gadj = M2([mk(gamma[3]), mk(-gamma[1]), mk(-gamma[2]), mk(gamma[0])]);

    let basis = ideal.lattice.basis();
    let mut rows: Vec<Vec<BigInt>> = vec![Vec::with_capacity(8); 4];
    for b in &basis {
        let prod = gadj.mul(&adj_h).mul(&sp.image_mod(b, wp));
        for comp in 0..4 {
            let m = if comp == 2 { w2 } else { w0 };
            rows[comp].push(BigInt::from(prod.0[comp].truncate(m).value()));
        }
    }
    for comp in 0..4 {
        for c2 in 0..4 {
            let m = if c2 == 2 { w2 } else { w0 };
            rows[comp].push(if comp == c2 {
                BigInt::from(q).pow(m)
            } else {
                BigInt::zero()
            });
        }
    }
    let ker = linalg::int_kernel(&rows);
    let gens: Vec<Quat> = ker
        .iter()
        .map(|t| {
            let mut x = Quat::zero();
            for (c, b) in t[..4].iter().zip(basis.iter()) {
                x = &x + &b.scale(&Rat::from(c.clone()));
            }
            x
        })
        .collect();
    let j = QuatLattice::from_generators(&gens);
    if j.index_in(&ideal.lattice) != BigInt::from(q).pow(2 * vdet) {
        return Err(CoreError::Hypothesis(format!(
            "coset translate at q = {q} has wrong index"
        )));
    }
    Ok(j)
}

/// The `q + 1` neighbor translates of `ideal` at a prime `q` coprime to the
/// level: cosets `[[q, a], [0, 1]]` for `a mod q` together with `[[1, 0], [0, q]]`.
pub fn neighbors(
    order: &SpecialOrder,
    ideal: &RightIdeal,
    q: u64,
    sp: &LocalSplitting,
) -> Result<Vec<QuatLattice>> {
    assert!(order.aux % q != 0 && order.ell != q);
    let mut out = Vec::with_capacity(q as usize + 1);
    for a in 0..q as i64 {
        out.push(coset_translate(order, ideal, q, &[q as i64, a, 0, 1], sp)?);
    }
    out.push(coset_translate(order, ideal, q, &[1, 0, 0, q as i64], sp)?);
    Ok(out)
}

/// An element `b` with `b·I = J` when `I` and `J` are in the same class.
/// Exact: candidates are the vectors of norm `n(J)/n(I)` in `J·Ī/n(I)`, and
/// each is verified by lattice equality.
pub fn connecting_element(alg: &QuatAlgebra, i: &RightIdeal, j: &RightIdeal) -> Option<Quat> {
    let c = j
        .lattice
        .product(&i.lattice.conjugate(alg), alg)
        .scale(&i.norm.recip());
    let nu = &j.norm / &i.norm;
    for b in c.vectors_of_norm(alg, &nu) {
        if i.lattice.mul_left(&b, alg) == j.lattice {
            return Some(b);
        }
    }
    None
}

/// Locate the class of `j` among `reps`: `(index, b)` with `b·reps[index] = j`.
pub fn find_class(
    alg: &QuatAlgebra,
    reps: &[RightIdeal],
    j: &RightIdeal,
) -> Option<(usize, Quat)> {
    for (idx, rep) in reps.iter().enumerate() {
        if let Some(b) = connecting_element(alg, rep, j) {
            return Some((idx, b));
        }
    }
    None
}

/// Smallest-norm integral representative of the class of `j` whose norm is
/// coprime to every prime in `avoid`: `(w̄/n(J))·J` for a short vector `w ∈ J`.
pub fn reduce_to_rep(
    order: &SpecialOrder,
    j: &RightIdeal,
    avoid: &[u64],
) -> Result<RightIdeal> {
    let alg = &order.alg;
    for t in 1..=256i64 {
        if avoid.iter().any(|&q| t % q as i64 == 0) {
            continue;
        }
        let target = &j.norm * &ring::rat_int(t);
        if let Some(w) = j.lattice.vectors_of_norm(alg, &target).into_iter().next() {
            let lat = j
                .lattice
                .mul_left(&alg.conj(&w), alg)
                .scale(&j.norm.recip());
            return RightIdeal::new(order, lat);
        }
    }
    Err(CoreError::Hypothesis(
        "no short vector with level-coprime norm found during reduction".into(),
    ))
}

/// The right ideal class set of a special order, with left orders and unit
/// groups `Γ̃_i`, certified complete by the mass identity.
#[derive(Clone, Debug)]
pub struct ClassSet {
    pub order: SpecialOrder,
    pub reps: Vec<RightIdeal>,
    pub left_orders: Vec<QuatLattice>,
    pub unit_groups: Vec<Vec<Quat>>,
    /// Primes that every representative norm avoids (level primes plus extras).
    pub avoid: Vec<u64>,
}

impl ClassSet {
    /// Enumerate all classes.  `avoid_extra` adds primes (such as the working
    /// prime p of the interpolation tower) that representative norms must
    /// avoid, so that representatives stay locally trivial there.
    pub fn enumerate(order: &SpecialOrder, avoid_extra: &[u64]) -> Result<Self> {
        let alg = order.alg.clone();
        let mut avoid: Vec<u64> = ring::factor(order.aux).into_iter().map(|(q, _)| q).collect();
        avoid.push(order.ell);
        for &q in avoid_extra {
            if !avoid.contains(&q) {
                avoid.push(q);
            }
        }
        avoid.sort_unstable();

        let mut cs = ClassSet {
            order: order.clone(),
            reps: Vec::new(),
            left_orders: Vec::new(),
            unit_groups: Vec::new(),
            avoid: avoid.clone(),
        };
        cs.push_class(RightIdeal::new(order, order.lattice.clone())?);
        let target = order.mass();

        let mut qs: Vec<u64> = Vec::new();
        let mut q = 2u64;
        while qs.len() < 8 {
            if ring::is_prime(q) && !avoid.contains(&q) {
                qs.push(q);
            }
            q += 1;
        }

        'walk: for &q in &qs {
            if cs.mass() == target {
                break;
            }
            let sp = transport_splitting(order, q)?;
            loop {
                let before = cs.reps.len();
                for i in 0..cs.reps.len() {
                    let ideal = cs.reps[i].clone();
                    for lat in neighbors(order, &ideal, q, &sp)? {
                        let nj = RightIdeal::new(order, lat)?;
                        if find_class(&alg, &cs.reps, &nj).is_none() {
                            let red = reduce_to_rep(order, &nj, &avoid)?;
                            cs.push_class(red);
                            if cs.mass() == target {
                                break 'walk;
                            }
                        }
                    }
                }
                if cs.reps.len() == before {
                    break;
                }
            }
        }
        if cs.mass() != target {
            return Err(CoreError::Hypothesis(format!(
                "class walk exhausted neighbor primes at mass {} of {}",
                cs.mass(),
                target
            )));
        }
        Ok(cs)
    }

    fn push_class(&mut self, rep: RightIdeal) {
        let alg = &self.order.alg;
        let lo = left_order(alg, &rep.lattice);
        let units = unit_group(alg, &lo);
        self.reps.push(rep);
        self.left_orders.push(lo);
        self.unit_groups.push(units);
    }

    /// Class number.
    pub fn h(&self) -> usize {
        self.reps.len()
    }

    /// Accumulated mass `Σ_i 1/#Γ̃_i`.
    pub fn mass(&self) -> Rat {
        let mut acc = Rat::zero();
        for u in &self.unit_groups {
            acc += Rat::new(BigInt::one(), BigInt::from(u.len() as i64));
        }
        acc
    }

    /// The mass identity against the independent local-index oracle.
    pub fn mass_certified(&self) -> bool {
        self.mass() == self.order.mass()
    }

    /// Class index and connecting element of an arbitrary integral ideal.
    pub fn class_of(&self, j: &RightIdeal) -> Result<(usize, Quat)> {
        find_class(&self.order.alg, &self.reps, j).ok_or_else(|| {
            CoreError::Hypothesis("ideal matches no enumerated class".into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LClass;
    use crate::ring::rat_int;

    fn max_order(ell: u64) -> SpecialOrder {
        SpecialOrder::build(ell, 1, 1, LClass::Unramified).unwrap()
    }

    #[test]
    fn norms_of_orders_and_scalings() {
        let r = max_order(11);
        assert_eq!(lattice_norm(&r.alg, &r.lattice), rat_int(1));
        let scaled = r.lattice.scale(&rat_int(3));
        assert_eq!(lattice_norm(&r.alg, &scaled), rat_int(9));
    }

    #[test]
    fn maximal_class_sets_and_mass() {
        let r11 = max_order(11);
        let cs = ClassSet::enumerate(&r11, &[]).unwrap();
        assert_eq!(cs.h(), 2);
        let mut sizes: Vec<usize> = cs.unit_groups.iter().map(|u| u.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![4, 6]);
        assert!(cs.mass_certified());
        assert_eq!(cs.mass(), Rat::new(5.into(), 12.into()));

        let r3 = max_order(3);
        let cs3 = ClassSet::enumerate(&r3, &[]).unwrap();
        assert_eq!(cs3.h(), 1);
        assert_eq!(cs3.unit_groups[0].len(), 12);
        assert!(cs3.mass_certified());
    }

    #[test]
    fn level_121_class_sets() {
        for class in [LClass::Ramified, LClass::RamifiedU] {
            let r = SpecialOrder::build(11, 1, 2, class).unwrap();
            let cs = ClassSet::enumerate(&r, &[3]).unwrap();
            assert_eq!(cs.h(), 10, "class number at level 121, {}", class.label());
            assert!(cs.unit_groups.iter().all(|u| u.len() == 2));
            assert_eq!(cs.mass(), rat_int(5));
            // representative norms avoid the level prime and the extra prime
            for rep in &cs.reps {
                let n = rep.norm.numer().clone();
                assert!(!(&n % BigInt::from(11)).is_zero());
                assert!(!(&n % BigInt::from(3)).is_zero());
            }
        }
    }

    #[test]
    fn neighbor_translates_certify() {
        let r = max_order(11);
        let unit = RightIdeal::new(&r, r.lattice.clone()).unwrap();
        for q in [2u64, 3] {
            let sp = transport_splitting(&r, q).unwrap();
            let ns = neighbors(&r, &unit, q, &sp).unwrap();
            assert_eq!(ns.len(), q as usize + 1);
            let mut seen = Vec::new();
            for lat in ns {
                assert!(!seen.contains(&lat), "neighbors must be distinct");
                let j = RightIdeal::new(&r, lat.clone()).unwrap();
                assert_eq!(j.norm, rat_int(q as i64));
                seen.push(lat);
            }
        }
    }

    #[test]
    fn connecting_elements_verify() {
        let r = max_order(11);
        let cs = ClassSet::enumerate(&r, &[]).unwrap();
        let sp = transport_splitting(&r, 2).unwrap();
        let unit = &cs.reps[0];
        for lat in neighbors(&r, unit, 2, &sp).unwrap() {
            let j = RightIdeal::new(&r, lat).unwrap();
            let (idx, b) = cs.class_of(&j).unwrap();
            assert!(idx < cs.h());
            assert_eq!(cs.reps[idx].lattice.mul_left(&b, &r.alg), j.lattice);
            assert_eq!(r.alg.nrd(&b), &j.norm / &cs.reps[idx].norm);
        }
    }

    #[test]
    fn unit_groups_are_groups() {
        let r = max_order(11);
        let cs = ClassSet::enumerate(&r, &[]).unwrap();
        for (lo, units) in cs.left_orders.iter().zip(cs.unit_groups.iter()) {
            assert!(units.contains(&Quat::one()));
            assert!(units.contains(&Quat::one().scale(&rat_int(-1))));
            for u in units {
                assert_eq!(r.alg.nrd(u), rat_int(1));
                let inv = r.alg.inv(u).unwrap();
                assert!(units.contains(&inv));
                for v in units {
                    assert!(units.contains(&r.alg.mul(u, v)));
                }
            }
            // the left order is an order containing 1
            assert!(lo.contains(&Quat::one()));
            assert!(lo.product(lo, &r.alg).is_sublattice_of(lo));
        }
    }

    #[test]
    fn left_order_of_the_order_is_itself() {
        for ell in [3u64, 11] {
            let r = max_order(ell);
            assert_eq!(left_order(&r.alg, &r.lattice), r.lattice);
        }
        let r121 = SpecialOrder::build(11, 1, 2, LClass::Ramified).unwrap();
        assert_eq!(left_order(&r121.alg, &r121.lattice), r121.lattice);
    }

    #[test]
    fn special_order_unit_counts() {
        for ell in [7u64, 11, 13] {
            for class in [LClass::Ramified, LClass::RamifiedU] {
                let r = SpecialOrder::build(ell, 1, 2, class).unwrap();
                assert_eq!(
                    unit_group(&r.alg, &r.lattice).len(),
                    2,
                    "unit count at level {}^2, {}",
                    ell,
                    class.label()
                );
            }
        }
    }
}
