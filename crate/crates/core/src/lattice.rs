//! Full lattices in a quaternion algebra.
//!
//! A [`QuatLattice`] is a rank-4 Z-lattice `L` in `B = (a,b|Q)`, stored as a
//! positive denominator `d` and the canonical row Hermite normal form of the
//! integer matrix whose rows are the coordinates of `d L` in the basis
//! `1, i, j, k`.  The pair `(d, HNF)` with `gcd(d, entries) = 1` is a unique
//! normal form, so lattice equality is literal equality of the
//! representation.
//!
//! Supported operations: sums, intersections, products (pairwise generator
//! products), left/right translates by an element, conjugation, scaling,
//! membership, index of a sublattice, Gram matrix and reduced discriminant,
//! and exact Fincke-Pohst enumeration of vectors of a prescribed reduced
//! norm (the algebra must be definite for enumeration to terminate, and the
//! code asserts positive-definiteness of the Gram matrix).

use crate::linalg::{hnf, Mat};
use crate::quat::{Quat, QuatAlgebra};
use crate::Rat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Rank-4 lattice in canonical Hermite form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuatLattice {
    /// Common denominator, positive.
    pub den: BigInt,
    /// 4x4 upper-triangular integer HNF rows; `lattice = (1/den) * rowspan`.
    pub rows: Vec<Vec<BigInt>>,
}

impl std::fmt::Debug for QuatLattice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(1/{})*{:?}", self.den, self.rows)
    }
}

impl QuatLattice {
    /// Lattice generated by arbitrary rational-quaternion generators.
    /// Panics unless the generators span rank 4.
    pub fn from_generators(gens: &[Quat]) -> Self {
        let mut den = BigInt::one();
        for g in gens {
            for c in &g.c {
                den = den.lcm(c.denom());
            }
        }
        let rows: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| {
                g.c.iter()
                    .map(|c| {
                        let s = c * Rat::from(den.clone());
                        assert!(s.denom().is_one());
                        s.numer().clone()
                    })
                    .collect()
            })
            .collect();
        let h = hnf(&rows);
        assert_eq!(h.len(), 4, "generators do not span a full lattice");
        Self::normalize(den, h)
    }

    fn normalize(den: BigInt, rows: Vec<Vec<BigInt>>) -> Self {
        let mut g = den.clone();
        for r in &rows {
            for x in r {
                g = g.gcd(x);
            }
        }
        if g.is_one() {
            return QuatLattice { den, rows };
        }
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|x| x / &g).collect())
            .collect();
        QuatLattice { den: den / g, rows }
    }

    /// The standard lattice `Z<1, i, j, k>`.
    pub fn standard() -> Self {
        Self::from_generators(&[
            Quat::one(),
            Quat::basis_i(),
            Quat::basis_j(),
            Quat::basis_k(),
        ])
    }

    /// Basis as quaternions (rows of the HNF over the denominator).
    pub fn basis(&self) -> Vec<Quat> {
        let d = Rat::from(self.den.clone());
        self.rows
            .iter()
            .map(|r| {
                Quat::new([
                    Rat::from(r[0].clone()) / d.clone(),
                    Rat::from(r[1].clone()) / d.clone(),
                    Rat::from(r[2].clone()) / d.clone(),
                    Rat::from(r[3].clone()) / d.clone(),
                ])
            })
            .collect()
    }

    pub fn contains(&self, x: &Quat) -> bool {
        self.coords_of(x).is_some()
    }

    /// Integer coordinates of `x` in the lattice basis, if `x` lies in it.
    pub fn coords_of(&self, x: &Quat) -> Option<[BigInt; 4]> {
        // d*x must be an integer combination of the HNF rows (triangular solve)
        let d = Rat::from(self.den.clone());
        let mut v: Vec<Rat> = x.c.iter().map(|c| c * d.clone()).collect();
        let mut out = [
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
            BigInt::zero(),
        ];
        // echelon: column i only meets rows <= i, so solve ascending
        for i in 0..4 {
            let piv = &self.rows[i][i];
            let num = v[i].clone();
            if !num.denom().is_one() {
                return None;
            }
            let (q, r) = num.numer().div_mod_floor(piv);
            if !r.is_zero() {
                return None;
            }
            for j in 0..4 {
                v[j] -= Rat::from(&q * &self.rows[i][j]);
            }
            out[i] = q;
        }
        if v.iter().all(|c| c.is_zero()) {
            Some(out)
        } else {
            None
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut gens = self.basis();
        gens.extend(other.basis());
        Self::from_generators(&gens)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        // (u, v) with u*B1 = v*B2 form the kernel of [B1^T | -B2^T]
        let b1 = self.basis();
        let b2 = other.basis();
        let mut den = BigInt::one();
        for g in b1.iter().chain(b2.iter()) {
            for c in &g.c {
                den = den.lcm(c.denom());
            }
        }
        let to_int = |x: &Rat| -> BigInt {
            let s = x * Rat::from(den.clone());
            s.numer().clone()
        };
        let mut a_rows = Vec::with_capacity(4);
        for coord in 0..4 {
            let mut row = Vec::with_capacity(8);
            for g in &b1 {
                row.push(to_int(&g.c[coord]));
            }
            for g in &b2 {
                row.push(-to_int(&g.c[coord]));
            }
            a_rows.push(row);
        }
        let ker = crate::linalg::int_kernel(&a_rows);
        let gens: Vec<Quat> = ker
            .iter()
            .map(|uv| {
                let mut acc = Quat::zero();
                for (t, g) in uv[..4].iter().zip(b1.iter()) {
                    acc = &acc + &g.scale(&Rat::from(t.clone()));
                }
                acc
            })
            .collect();
        Self::from_generators(&gens)
    }

    /// Product lattice generated by all pairwise basis products.
    pub fn product(&self, other: &Self, alg: &QuatAlgebra) -> Self {
        let mut gens = Vec::with_capacity(16);
        for x in self.basis() {
            for y in other.basis() {
                gens.push(alg.mul(&x, &y));
            }
        }
        Self::from_generators(&gens)
    }

    pub fn mul_left(&self, x: &Quat, alg: &QuatAlgebra) -> Self {
        let gens: Vec<Quat> = self.basis().iter().map(|e| alg.mul(x, e)).collect();
        Self::from_generators(&gens)
    }

    pub fn mul_right(&self, x: &Quat, alg: &QuatAlgebra) -> Self {
        let gens: Vec<Quat> = self.basis().iter().map(|e| alg.mul(e, x)).collect();
        Self::from_generators(&gens)
    }

    pub fn conjugate(&self, alg: &QuatAlgebra) -> Self {
        let gens: Vec<Quat> = self.basis().iter().map(|e| alg.conj(e)).collect();
        Self::from_generators(&gens)
    }

    pub fn scale(&self, t: &Rat) -> Self {
        assert!(!t.is_zero());
        let gens: Vec<Quat> = self.basis().iter().map(|e| e.scale(t)).collect();
        Self::from_generators(&gens)
    }

    pub fn is_sublattice_of(&self, other: &Self) -> bool {
        self.basis().iter().all(|e| other.contains(e))
    }

    /// Index `[other : self]` for `self` a finite-index sublattice.
    pub fn index_in(&self, other: &Self) -> BigInt {
        assert!(self.is_sublattice_of(other), "index of a non-sublattice");
        let det = |l: &Self| -> Rat {
            let mut d = Rat::one();
            for i in 0..4 {
                d *= Rat::from(l.rows[i][i].clone());
            }
            d / Rat::from(l.den.pow(4))
        };
        let idx = det(self) / det(other);
        assert!(idx.denom().is_one());
        idx.numer().abs()
    }

    /// Gram matrix of the reduced-norm bilinear form: `trd(e_i conj(e_j))/2`.
    pub fn gram(&self, alg: &QuatAlgebra) -> Mat<Rat> {
        let b = self.basis();
        let mut m = Mat::zeros(4, 4);
        for ii in 0..4 {
            for jj in 0..4 {
                let t = alg.trd(&alg.mul(&b[ii], &alg.conj(&b[jj])));
                *m.at_mut(ii, jj) = t / Rat::from(BigInt::from(2));
            }
        }
        m
    }

    /// Reduced discriminant: `sqrt(|det(trd(e_i conj(e_j)))|)`; asserts the
    /// determinant is a perfect square of a rational with square numerator
    /// and denominator, and returns the value for integral lattices.
    pub fn discrd(&self, alg: &QuatAlgebra) -> Rat {
        let g = self.gram(alg).scale(&Rat::from(BigInt::from(2)));
        let d = g.det();
        let num = d.numer().abs();
        let den = d.denom().abs();
        let sn = num.sqrt();
        let sd = den.sqrt();
        assert_eq!(&sn * &sn, num, "trace-form determinant must be a square");
        assert_eq!(&sd * &sd, den);
        Rat::new(sn, sd)
    }

    /// All lattice vectors of exact reduced norm `t > 0` (both signs kept),
    /// in a deterministic enumeration order.
    pub fn vectors_of_norm(&self, alg: &QuatAlgebra, t: &Rat) -> Vec<Quat> {
        self.enumerate(alg, t, true)
    }

    /// All nonzero lattice vectors with reduced norm `<= t`.
    pub fn vectors_of_norm_up_to(&self, alg: &QuatAlgebra, t: &Rat) -> Vec<Quat> {
        self.enumerate(alg, t, false)
    }

    /// Smallest positive reduced norm of a nonzero vector.
    pub fn minimal_norm(&self, alg: &QuatAlgebra) -> Rat {
        let g = self.gram(alg);
        let mut bound = g.at(0, 0).clone();
        for i in 1..4 {
            if g.at(i, i) < &bound {
                bound = g.at(i, i).clone();
            }
        }
        self.vectors_of_norm_up_to(alg, &bound)
            .iter()
            .map(|v| alg.nrd(v))
            .min()
            .expect("definite lattice has short vectors")
    }

    fn enumerate(&self, alg: &QuatAlgebra, t: &Rat, exact: bool) -> Vec<Quat> {
        assert!(t.is_positive());
        let g = self.gram(alg);
        // LDL decomposition: Q(c) = sum_i d_i (c_i + sum_{j>i} u_ij c_j)^2
        let mut a: Vec<Vec<Rat>> = (0..4).map(|i| (0..4).map(|j| g.at(i, j).clone()).collect()).collect();
        let mut dq = vec![Rat::zero(); 4];
        let mut u = vec![vec![Rat::zero(); 4]; 4];
        for i in 0..4 {
            dq[i] = a[i][i].clone();
            assert!(
                dq[i].is_positive(),
                "norm form must be positive definite (definite algebra required)"
            );
            for j in i + 1..4 {
                u[i][j] = &a[i][j] / &dq[i];
            }
            for r in i + 1..4 {
                for s in i + 1..4 {
                    let t2 = &a[r][i] * &a[i][s] / &dq[i];
                    a[r][s] -= t2;
                }
            }
        }
        let basis = self.basis();
        let mut out = Vec::new();
        let mut c = [BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
        self.search(alg, &basis, &dq, &u, t, exact, 3, &mut c, &Rat::zero(), &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn search(
        &self,
        alg: &QuatAlgebra,
        basis: &[Quat],
        dq: &[Rat],
        u: &[Vec<Rat>],
        t: &Rat,
        exact: bool,
        level: usize,
        c: &mut [BigInt; 4],
        used: &Rat,
        out: &mut Vec<Quat>,
    ) {
        let center: Rat = (level + 1..4)
            .map(|j| &u[level][j] * Rat::from(c[j].clone()))
            .sum();
        let rem = t - used;
        if rem.is_negative() {
            return;
        }
        // integer range with d_level * (n + center)^2 <= rem
        let (lo, hi) = integer_range(&center, &(rem.clone() / dq[level].clone()));
        let mut n = lo;
        while n <= hi {
            let term = {
                let s = Rat::from(n.clone()) + center.clone();
                dq[level].clone() * &s * &s
            };
            let used2 = used + &term;
            c[level] = n.clone();
            if level == 0 {
                let ok = if exact { &used2 == t } else { used2 <= *t };
                if ok {
                    let mut v = Quat::zero();
                    for (ci, e) in c.iter().zip(basis.iter()) {
                        v = &v + &e.scale(&Rat::from(ci.clone()));
                    }
                    if !(v.is_zero()) {
                        debug_assert!(if exact { alg.nrd(&v) == *t } else { alg.nrd(&v) <= *t });
                        out.push(v);
                    }
                }
            } else if used2 <= *t {
                self.search(alg, basis, dq, u, t, exact, level - 1, c, &used2, out);
            }
            n += 1;
        }
        c[level] = BigInt::zero();
    }
}

/// All integers `n` with `(n + c)^2 <= r`, as a closed range (`lo > hi` when
/// empty).  Exact: starts from an integer-sqrt approximation and adjusts by
/// testing the inequality.
fn integer_range(c: &Rat, r: &Rat) -> (BigInt, BigInt) {
    if r.is_negative() {
        return (BigInt::one(), BigInt::zero());
    }
    // sqrt(r) = sqrt(num*den)/den, approximated from below by isqrt
    let num = r.numer().clone();
    let den = r.denom().clone();
    let s = (&num * &den).sqrt();
    let approx_sqrt = Rat::new(&s + 1, den.clone());
    let ok = |n: &BigInt| -> bool {
        let v = Rat::from(n.clone()) + c;
        &v * &v <= *r
    };
    // upper end
    let mut hi = (-c + &approx_sqrt).floor().numer().clone();
    while !ok(&hi) {
        hi -= 1;
        if &hi < &((-c - &approx_sqrt).floor().numer().clone() - 2) {
            break;
        }
    }
    while ok(&(&hi + 1)) {
        hi += 1;
    }
    // lower end
    let mut lo = (-c - &approx_sqrt).ceil().numer().clone();
    while !ok(&lo) {
        lo += 1;
        if &lo > &hi {
            break;
        }
    }
    while ok(&(&lo - 1)) {
        lo -= 1;
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rat_int};

    fn hamilton() -> QuatAlgebra {
        QuatAlgebra::new(-1, -1)
    }

    #[test]
    fn standard_lattice_shape() {
        let l = QuatLattice::standard();
        assert_eq!(l.den, BigInt::one());
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(l.rows[i][j], if i == j { BigInt::one() } else { BigInt::zero() });
            }
        }
        assert!(l.contains(&Quat::from_ints(3, -2, 7, 0)));
        assert!(!l.contains(&Quat::new([rat(1, 2), rat_int(0), rat_int(0), rat_int(0)])));
    }

    #[test]
    fn canonical_form_is_generator_independent() {
        let a = QuatLattice::from_generators(&[
            Quat::from_ints(1, 0, 0, 0),
            Quat::from_ints(1, 1, 0, 0),
            Quat::from_ints(0, 0, 1, 1),
            Quat::from_ints(0, 0, 0, 2),
            Quat::from_ints(3, 1, 1, 1),
        ]);
        let b = QuatLattice::from_generators(&[
            Quat::from_ints(0, 1, 0, 0),
            Quat::from_ints(1, 0, 0, 0),
            Quat::from_ints(0, 0, 1, -1),
            Quat::from_ints(0, 0, 2, 0),
        ]);
        assert_eq!(a, b);
    }

    #[test]
    fn sum_and_intersection() {
        let alg = hamilton();
        let l = QuatLattice::standard();
        let half = l.scale(&rat(1, 2));
        let two = l.scale(&rat_int(2));
        assert_eq!(l.sum(&half), half);
        assert_eq!(l.intersect(&half), l);
        assert_eq!(l.intersect(&two), two);
        assert_eq!(two.index_in(&l), BigInt::from(16));
        // intersection of shifted lattices: <1, i, j, (i+k)/2> with <1, i, j, k>
        let m = QuatLattice::from_generators(&[
            Quat::one(),
            Quat::basis_i(),
            Quat::basis_j(),
            Quat::new([rat_int(0), rat(1, 2), rat_int(0), rat(1, 2)]),
        ]);
        let int = m.intersect(&l);
        assert_eq!(int, l, "only integral combinations survive");
        let _ = alg; // algebra-independent checks
    }

    #[test]
    fn discriminant_of_standard_lattice() {
        // L = Z<1,i,j,k> has discrd 4|ab|
        for (a, b) in [(-1i64, -1i64), (-1, -11), (-2, -5)] {
            let alg = QuatAlgebra::new(a, b);
            let l = QuatLattice::standard();
            assert_eq!(l.discrd(&alg), rat_int(4 * (a * b).abs()));
        }
    }

    #[test]
    fn product_and_translates() {
        let alg = hamilton();
        let l = QuatLattice::standard();
        assert_eq!(l.product(&l, &alg), l, "Z<1,i,j,k> is a ring for (-1,-1)");
        let x = Quat::from_ints(1, 1, 0, 0); // nrd 2
        let lx = l.mul_right(&x, &alg);
        assert_eq!(lx.index_in(&l), BigInt::from(4), "index = nrd^2");
        assert_eq!(l.mul_left(&x, &alg).index_in(&l), BigInt::from(4));
    }

    #[test]
    fn norm_enumeration_hamilton() {
        // Hurwitz-adjacent counts: in Z<1,i,j,k> under nrd = sum of 4 squares,
        // r4(1) = 8, r4(2) = 24, r4(3) = 32, r4(4) = 24.
        let alg = hamilton();
        let l = QuatLattice::standard();
        for (t, expect) in [(1i64, 8usize), (2, 24), (3, 32), (4, 24)] {
            let vs = l.vectors_of_norm(&alg, &rat_int(t));
            assert_eq!(vs.len(), expect, "r4({t})");
            for v in &vs {
                assert_eq!(alg.nrd(v), rat_int(t));
            }
        }
        assert_eq!(l.minimal_norm(&alg), rat_int(1));
    }

    #[test]
    fn norm_enumeration_scaled_and_shifted() {
        let alg = QuatAlgebra::new(-1, -11);
        // maximal-order-like lattice [1, i, (1+j)/2, (i+k)/2]
        let o = QuatLattice::from_generators(&[
            Quat::one(),
            Quat::basis_i(),
            Quat::new([rat(1, 2), rat_int(0), rat(1, 2), rat_int(0)]),
            Quat::new([rat_int(0), rat(1, 2), rat_int(0), rat(1, 2)]),
        ]);
        let units = o.vectors_of_norm(&alg, &rat_int(1));
        // the unit group of this order has order 4: {1, -1, i, -i}
        assert_eq!(units.len(), 4);
        for u in &units {
            assert!(o.contains(u));
            assert_eq!(alg.nrd(u), rat_int(1));
        }
    }

    #[test]
    fn integer_range_exactness() {
        // (n + 1/3)^2 <= 5: n in [-2.56.., 1.90..] -> -2..=1
        let (lo, hi) = integer_range(&rat(1, 3), &rat_int(5));
        assert_eq!((lo, hi), (BigInt::from(-2), BigInt::from(1)));
        let (lo, hi) = integer_range(&rat_int(0), &rat(1, 4));
        assert_eq!((lo, hi), (BigInt::from(0), BigInt::from(0)));
        let (lo, hi) = integer_range(&rat_int(0), &rat_int(0));
        assert_eq!((lo, hi), (BigInt::from(0), BigInt::from(0)));
    }
}
