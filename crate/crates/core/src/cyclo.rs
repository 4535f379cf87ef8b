//! Exact cyclotomic arithmetic.
//!
//! [`Cyclotomic`] represents an element of `Q(zeta_T)` in the power basis
//! `1, zeta, ..., zeta^{phi(T)-1}` with `BigRational` coordinates, reduced
//! modulo the T-th cyclotomic polynomial.  Elements of different orders mix
//! by promotion into the compositum `Q(zeta_lcm)`, so character products of
//! coprime conductors work transparently.
//!
//! Besides field arithmetic the type provides complex conjugation
//! (`zeta -> zeta^{-1}`), Galois twists, and a Hensel-based reduction into
//! `Z/p^M` along a chosen root of the cyclotomic polynomial (needed when
//! p-adic control data is compared against characteristic-zero eigenvalues).

use crate::ring::{self, Scalar, ZpM};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

/// Coefficients of the T-th cyclotomic polynomial, monic, ascending degree.
///
/// Computed by iterated exact division of `x^T - 1` by the `Phi_d` for
/// proper divisors `d | T`; results are memoized process-wide.
pub fn cyclotomic_poly(t: u64) -> Vec<BigInt> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<BigInt>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&t) {
        return p.clone();
    }
    // x^T - 1
    let mut num = vec![BigInt::zero(); t as usize + 1];
    num[0] = -BigInt::one();
    num[t as usize] = BigInt::one();
    for d in 1..t {
        if t % d == 0 {
            let phi_d = cyclotomic_poly(d);
            num = poly_div_exact(&num, &phi_d);
        }
    }
    cache.lock().unwrap().insert(t, num.clone());
    num
}

/// Exact division of integer polynomials (divisor monic).
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().map(|c| c.is_one()).unwrap_or(false));
    let mut rem: Vec<BigInt> = num.to_vec();
    let dn = den.len() - 1;
    let qn = rem.len() - 1 - dn;
    let mut quot = vec![BigInt::zero(); qn + 1];
    for k in (0..=qn).rev() {
        let c = rem[k + dn].clone();
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let t = &c * d;
            rem[k + i] -= t;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "non-exact polynomial division");
    quot
}

/// Element of `Q(zeta_T)`.
#[derive(Clone)]
pub struct Cyclotomic {
    order: u64,
    /// Power-basis coordinates, length `phi(order)`; invariant: reduced.
    coeffs: Vec<BigRational>,
}

impl Cyclotomic {
    pub fn from_rat(x: BigRational) -> Self {
        Cyclotomic { order: 1, coeffs: vec![x] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(ring::rat_int(n))
    }

    /// `zeta_T^k`.
    pub fn zeta(t: u64, k: u64) -> Self {
        assert!(t >= 1);
        let mut raw = vec![BigRational::zero(); (k % t) as usize + 1];
        *raw.last_mut().unwrap() = BigRational::one();
        Self::reduce(t, raw)
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    fn reduce(order: u64, mut raw: Vec<BigRational>) -> Self {
        let phi = cyclotomic_poly(order);
        let d = phi.len() - 1;
        // reduce mod the monic Phi_order
        while raw.len() > d {
            let lead = raw.pop().unwrap();
            if lead.is_zero() {
                continue;
            }
            let k = raw.len() - d;
            for (i, c) in phi.iter().take(d).enumerate() {
                let t = &lead * BigRational::from(c.clone());
                raw[k + i] -= t;
            }
        }
        raw.resize(d, BigRational::zero());
        Cyclotomic { order, coeffs: raw }
    }

    /// Re-express in `Q(zeta_t2)`, `order | t2`.
    pub fn promote(&self, t2: u64) -> Self {
        if self.order == t2 {
            return self.clone();
        }
        assert!(t2 % self.order == 0, "promotion requires divisibility");
        let e = t2 / self.order;
        let mut raw = vec![BigRational::zero(); (self.coeffs.len() - 1) * e as usize + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            raw[i * e as usize] = c.clone();
        }
        Self::reduce(t2, raw)
    }

    fn common(a: &Self, b: &Self) -> (Self, Self) {
        if a.order == b.order {
            (a.clone(), b.clone())
        } else {
            let l = num_integer::lcm(a.order, b.order);
            (a.promote(l), b.promote(l))
        }
    }

    /// Galois twist `zeta -> zeta^k`, `gcd(k, order) = 1`.
    pub fn galois(&self, k: u64) -> Self {
        assert_eq!(num_integer::gcd(k, self.order), 1);
        let mut raw = vec![BigRational::zero(); self.order as usize];
        if self.order == 1 {
            return self.clone();
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = (i as u64 * k) % self.order;
            raw[j as usize] += c;
        }
        Self::reduce(self.order, raw)
    }

    /// Complex conjugation `zeta -> zeta^{-1}`.
    pub fn conj(&self) -> Self {
        if self.order <= 2 {
            return self.clone();
        }
        self.galois(self.order - 1)
    }

    /// Rational value if the element lies in `Q`.
    pub fn as_rat(&self) -> Option<BigRational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rat().is_some()
    }

    /// Reduce into `Z/p^M` along the smallest root of `Phi_order` mod p,
    /// Hensel-lifted.  `None` when no root exists (the character order does
    /// not divide `p - 1`) or a denominator is divisible by p.
    pub fn to_zpm(&self, p: u64, m: u32) -> Option<ZpM> {
        let root = cyclotomic_root_mod(self.order, p, m)?;
        let mut acc = ZpM::new(0, p, m);
        let mut pw = ZpM::new(1, p, m);
        for c in &self.coeffs {
            acc = acc + ZpM::from_rat(c, p, m)? * pw;
            pw = pw * root;
        }
        Some(acc)
    }

    /// Conservative upper bound for `max_sigma |sigma(x)|` over all complex
    /// embeddings: evaluates at every primitive root of unity in f64 and adds
    /// a coarse safety margin.  Used only as a validation gate.
    pub fn abs_bound(&self) -> f64 {
        let t = self.order;
        let mut best = 0.0f64;
        for k in 1..=t {
            if num_integer::gcd(k, t) != 1 {
                continue;
            }
            let ang = 2.0 * std::f64::consts::PI * k as f64 / t as f64;
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (i, c) in self.coeffs.iter().enumerate() {
                let cv = c.to_f64().unwrap_or(f64::NAN);
                re += cv * (ang * i as f64).cos();
                im += cv * (ang * i as f64).sin();
            }
            best = best.max((re * re + im * im).sqrt());
        }
        best + 1e-6 * (1.0 + best)
    }
}

/// Smallest root of `Phi_T` mod p, lifted to mod `p^M`.
fn cyclotomic_root_mod(t: u64, p: u64, m: u32) -> Option<ZpM> {
    if t == 1 {
        return Some(ZpM::new(1, p, m));
    }
    if p == t || t % p == 0 {
        return None;
    }
    let phi = cyclotomic_poly(t);
    let eval = |x: ZpM| -> ZpM {
        let mut acc = ZpM::new(0, x.prime(), x.precision());
        let mut pw = ZpM::new(1, x.prime(), x.precision());
        for c in &phi {
            acc = acc + ZpM::from_big(c, x.prime(), x.precision()) * pw;
            pw = pw * x;
        }
        acc
    };
    let deriv = |x: ZpM| -> ZpM {
        let mut acc = ZpM::new(0, x.prime(), x.precision());
        let mut pw = ZpM::new(1, x.prime(), x.precision());
        for (i, c) in phi.iter().enumerate().skip(1) {
            acc = acc + ZpM::new(i as i64, x.prime(), x.precision())
                * ZpM::from_big(c, x.prime(), x.precision())
                * pw;
            pw = pw * x;
        }
        acc
    };
    let mut r0 = None;
    for x in 0..p {
        if eval(ZpM::new(x as i64, p, 1)).is_zero() {
            r0 = Some(x);
            break;
        }
    }
    let r0 = r0?;
    // Hensel: Phi separable mod p (p coprime to T), so the derivative is a unit.
    let mut x = ZpM::new(r0 as i64, p, m);
    for _ in 0..m {
        let f = eval(x);
        let df = deriv(x);
        x = x - f * df.try_inv().expect("separable root");
    }
    debug_assert!(eval(x).is_zero());
    Some(x)
}

impl PartialEq for Cyclotomic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = Cyclotomic::common(self, other);
        a.coeffs == b.coeffs
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{r}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "{}", if c.is_negative() { "-" } else { "+" })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            let a = c.abs();
            if i == 0 {
                write!(f, "{a}")?;
            } else {
                if !a.is_one() {
                    write!(f, "{a}*")?;
                }
                write!(f, "z{}^{}", self.order, i)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Self) -> Self {
        let (mut a, b) = Cyclotomic::common(&self, &rhs);
        for (x, y) in a.coeffs.iter_mut().zip(b.coeffs.iter()) {
            *x += y;
        }
        a
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(mut self) -> Self {
        for c in self.coeffs.iter_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = Cyclotomic::common(&self, &rhs);
        let mut raw = vec![BigRational::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[i + j] += x * y;
            }
        }
        Cyclotomic::reduce(a.order, raw)
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::from_rat(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::from_rat(BigRational::one())
    }
}

impl Scalar for Cyclotomic {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if let Some(r) = self.as_rat() {
            return Some(Cyclotomic::from_rat(r.recip()));
        }
        // Extended Euclid in Q[x] against the irreducible Phi_order.
        let phi: Vec<BigRational> = cyclotomic_poly(self.order)
            .into_iter()
            .map(BigRational::from)
            .collect();
        let (g, _, v) = poly_ext_gcd(&phi, &self.coeffs);
        assert_eq!(g.len(), 1, "cyclotomic polynomial must be coprime to a nonzero element");
        let ginv = g[0].recip();
        let coeffs = v.into_iter().map(|c| c * &ginv).collect();
        Some(Cyclotomic::reduce(self.order, coeffs))
    }
}

/// Extended gcd of rational polynomials: returns `(g, u, v)` with
/// `u*a + v*b = g`, `g` the (nonzero) gcd with no normalization applied.
fn poly_ext_gcd(
    a: &[BigRational],
    b: &[BigRational],
) -> (Vec<BigRational>, Vec<BigRational>, Vec<BigRational>) {
    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.len() > 1 && p.last().unwrap().is_zero() {
            p.pop();
        }
        p
    }
    fn sub_scaled(a: &mut Vec<BigRational>, b: &[BigRational], c: &BigRational, shift: usize) {
        if a.len() < b.len() + shift {
            a.resize(b.len() + shift, BigRational::zero());
        }
        for (i, x) in b.iter().enumerate() {
            let t = x * c;
            a[i + shift] -= t;
        }
    }
    let mut r0 = trim(a.to_vec());
    let mut r1 = trim(b.to_vec());
    let mut u0 = vec![BigRational::one()];
    let mut u1 = vec![BigRational::zero()];
    let mut v0 = vec![BigRational::zero()];
    let mut v1 = vec![BigRational::one()];
    while !(r1.len() == 1 && r1[0].is_zero()) {
        // Divide r0 by r1.
        let mut rem = r0.clone();
        let mut qu: Vec<BigRational> = vec![BigRational::zero(); r0.len().saturating_sub(r1.len()) + 1];
        while rem.len() >= r1.len() && !(rem.len() == 1 && rem[0].is_zero()) {
            let c = rem.last().unwrap() / r1.last().unwrap();
            let shift = rem.len() - r1.len();
            qu[shift] = c.clone();
            sub_scaled(&mut rem, &r1, &c, shift);
            rem = trim(rem);
            if rem.len() < r1.len() {
                break;
            }
        }
        // (r0, r1) = (r1, rem); cofactors follow.
        let mut nu = u0.clone();
        let mut nv = v0.clone();
        for (s, q) in qu.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            sub_scaled(&mut nu, &u1, q, s);
            sub_scaled(&mut nv, &v1, q, s);
        }
        r0 = std::mem::replace(&mut r1, rem);
        u0 = std::mem::replace(&mut u1, trim(nu));
        v0 = std::mem::replace(&mut v1, trim(nv));
    }
    (r0, u0, v0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::rat_int;

    #[test]
    fn cyclotomic_polys() {
        let p = |t: u64| -> Vec<i64> {
            cyclotomic_poly(t).iter().map(|c| c.to_i64().unwrap()).collect()
        };
        assert_eq!(p(1), vec![-1, 1]);
        assert_eq!(p(2), vec![1, 1]);
        assert_eq!(p(4), vec![1, 0, 1]);
        assert_eq!(p(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(p(6), vec![1, -1, 1]);
        assert_eq!(p(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn zeta_relations() {
        let z = Cyclotomic::zeta(5, 1);
        let mut pow = Cyclotomic::one();
        let mut sum = Cyclotomic::zero();
        for _ in 0..5 {
            sum = sum + pow.clone();
            pow = pow * z.clone();
        }
        assert!(sum.is_zero(), "1 + z + ... + z^4 = 0");
        assert_eq!(pow, Cyclotomic::one(), "z^5 = 1");
    }

    #[test]
    fn inversion_and_conjugation() {
        let z = Cyclotomic::zeta(7, 3);
        let zi = z.try_inv().unwrap();
        assert_eq!(z.clone() * zi.clone(), Cyclotomic::one());
        assert_eq!(zi, z.conj(), "for a root of unity the inverse is the conjugate");
        let x = Cyclotomic::zeta(7, 1) + Cyclotomic::from_int(2);
        let n = x.clone() * x.conj();
        // norm-like quantity is fixed by conjugation
        assert_eq!(n.conj(), n);
    }

    #[test]
    fn cross_order_mixing() {
        // z_2 * z_3 = z_6^5 (since -1 = z_6^3 and z_3 = z_6^2)
        let a = Cyclotomic::zeta(2, 1) * Cyclotomic::zeta(3, 1);
        assert_eq!(a, Cyclotomic::zeta(6, 5));
        // sqrt(5) in Q(zeta_5): (2*(z + z^4) + 1)^2 = 5
        let s = Cyclotomic::from_int(2) * (Cyclotomic::zeta(5, 1) + Cyclotomic::zeta(5, 4))
            + Cyclotomic::one();
        assert_eq!(s.clone() * s, Cyclotomic::from_rat(rat_int(5)));
    }

    #[test]
    fn reduction_to_zpm() {
        // order 4 divides 5 - 1, so i reduces mod 5^3; smallest root of x^2+1 mod 5 is 2.
        let i = Cyclotomic::zeta(4, 1);
        let r = i.to_zpm(5, 3).unwrap();
        assert_eq!((r * r).value(), 125 - 1);
        // order 4 does not divide 7 - 1
        assert!(i.to_zpm(7, 3).is_none());
    }

    #[test]
    fn abs_bound_sane() {
        let z = Cyclotomic::zeta(12, 1) + Cyclotomic::from_int(1);
        let b = z.abs_bound();
        assert!(b >= 1.93 && b <= 1.94, "|1 + zeta_12| = 2cos(pi/12) = 1.9318..., got {b}");
    }
}
