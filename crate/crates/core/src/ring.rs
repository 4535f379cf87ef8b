//! Scalar traits and basic exact arithmetic.
//!
//! The whole library is generic over a commutative coefficient scalar
//! implementing [`Scalar`]: exact rationals (`BigRational`), cyclotomic
//! field elements ([`crate::cyclo::Cyclotomic`]) and truncated p-adics
//! ([`ZpM`]).  The trait is deliberately small — ring operations come from
//! `num_traits::{Zero, One}` plus the std ops, and the only extra method is
//! partial inversion, which is what elimination-style linear algebra needs.
//!
//! The module also collects the elementary integer arithmetic used across
//! the crate: deterministic primality for `u64`, factorization, Legendre
//! symbols, CRT, and modular arithmetic helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Commutative ring scalar with partial inversion.
///
/// `try_inv` returns `Some` exactly on units.  For the field scalars
/// (`BigRational`, `Cyclotomic`) that means every nonzero element.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Add<Output = Self>
    + Mul<Output = Self>
{
    fn try_inv(&self) -> Option<Self>;

    fn is_unit(&self) -> bool {
        self.try_inv().is_some()
    }
}

impl Scalar for BigRational {
    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

/// Truncated p-adic integer: an element of `Z/p^M`.
///
/// The modulus travels with the element.  `Zero::zero()` and `One::one()`
/// produce modulus-free literals that adopt the modulus of the first
/// element they are combined with; mixing two distinct explicit moduli is a
/// bug and panics.
#[derive(Clone, Copy)]
pub struct ZpM {
    v: u64,
    /// p^M; 0 encodes a modulus-free literal.
    pm: u64,
    p: u64,
    m: u32,
}

impl PartialEq for ZpM {
    /// Equality follows the coercion rule for ops: a modulus-free literal
    /// equals a reduced element when its reduction does.
    fn eq(&self, other: &ZpM) -> bool {
        let a = self.promote(other);
        let b = other.promote(&a);
        if a.pm != 0 && b.pm != 0 {
            assert_eq!(a.pm, b.pm, "mixed moduli");
        }
        a.v == b.v
    }
}

impl Eq for ZpM {}

impl fmt::Debug for ZpM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pm == 0 {
            write!(f, "{}?", self.v)
        } else {
            write!(f, "{} (mod {}^{})", self.v, self.p, self.m)
        }
    }
}

impl fmt::Display for ZpM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl ZpM {
    pub fn new(v: i64, p: u64, m: u32) -> Self {
        let pm = checked_pow(p, m);
        let mut r = v % pm as i64;
        if r < 0 {
            r += pm as i64;
        }
        ZpM { v: r as u64, pm, p, m }
    }

    pub fn from_big(v: &BigInt, p: u64, m: u32) -> Self {
        let pm = checked_pow(p, m);
        let r = v.mod_floor_u64(pm);
        ZpM { v: r, pm, p, m }
    }

    /// Reduce a rational with p-unit denominator.
    pub fn from_rat(v: &BigRational, p: u64, m: u32) -> Option<Self> {
        let num = Self::from_big(v.numer(), p, m);
        let den = Self::from_big(v.denom(), p, m);
        Some(num * den.try_inv()?)
    }

    pub fn value(&self) -> u64 {
        self.v
    }

    /// Representative in `(-p^M/2, p^M/2]`, handy for display of small data.
    pub fn centered(&self) -> i64 {
        if self.pm != 0 && self.v > self.pm / 2 {
            self.v as i64 - self.pm as i64
        } else {
            self.v as i64
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u64 {
        self.pm
    }

    /// p-adic valuation of the representative, capped at `M`.
    pub fn valuation(&self) -> u32 {
        if self.v == 0 {
            return self.m;
        }
        let mut v = self.v;
        let mut val = 0;
        while v % self.p == 0 {
            v /= self.p;
            val += 1;
        }
        val
    }

    /// Exact division by `p^k`. `None` if the representative is not divisible.
    /// The result keeps the same modulus (so precision silently drops by `k`
    /// in the p-adic sense; callers track guard digits).
    pub fn div_exact_p(&self, k: u32) -> Option<Self> {
        let pk = checked_pow(self.p, k);
        if self.v % pk != 0 {
            return None;
        }
        Some(ZpM { v: self.v / pk, ..*self })
    }

    /// Truncate to a coarser modulus `p^m2`, `m2 <= M`.
    pub fn truncate(&self, m2: u32) -> Self {
        assert!(m2 <= self.m);
        let pm = checked_pow(self.p, m2);
        ZpM { v: self.v % pm, pm, p: self.p, m: m2 }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = *self;
        let mut acc = ZpM { v: 1, ..*self };
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Teichmueller lift of the residue of `self`: the unique `(p-1)`-th root
    /// of unity congruent to it mod p.  Requires `self` to be a unit.
    pub fn teichmueller(&self) -> Self {
        assert!(self.pm != 0 && self.v % self.p != 0, "teichmueller of a non-unit");
        // Iterate x -> x^p; converges quadratically to the Teichmueller lift.
        let mut x = *self;
        for _ in 0..self.m + 1 {
            x = x.pow(self.p);
        }
        x
    }

    fn promote(self, other: &ZpM) -> ZpM {
        if self.pm == 0 && other.pm != 0 {
            ZpM { v: self.v % other.pm, pm: other.pm, p: other.p, m: other.m }
        } else {
            self
        }
    }
}

fn checked_pow(p: u64, m: u32) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc.checked_mul(p).expect("p^M overflows u64");
    }
    acc
}

impl Add for ZpM {
    type Output = ZpM;
    fn add(self, rhs: ZpM) -> ZpM {
        let a = self.promote(&rhs);
        let b = rhs.promote(&a);
        if a.pm == 0 {
            return ZpM { v: a.v + b.v, ..a };
        }
        assert_eq!(a.pm, b.pm, "mixed moduli");
        ZpM { v: ((a.v as u128 + b.v as u128) % a.pm as u128) as u64, ..a }
    }
}

impl Sub for ZpM {
    type Output = ZpM;
    fn sub(self, rhs: ZpM) -> ZpM {
        self + (-rhs)
    }
}

impl Neg for ZpM {
    type Output = ZpM;
    fn neg(self) -> ZpM {
        if self.pm == 0 {
            panic!("negation of a modulus-free literal; attach a modulus first");
        }
        ZpM { v: if self.v == 0 { 0 } else { self.pm - self.v }, ..self }
    }
}

impl Mul for ZpM {
    type Output = ZpM;
    fn mul(self, rhs: ZpM) -> ZpM {
        let a = self.promote(&rhs);
        let b = rhs.promote(&a);
        if a.pm == 0 {
            return ZpM { v: a.v * b.v, ..a };
        }
        assert_eq!(a.pm, b.pm, "mixed moduli");
        ZpM { v: ((a.v as u128 * b.v as u128) % a.pm as u128) as u64, ..a }
    }
}

impl Zero for ZpM {
    fn zero() -> Self {
        ZpM { v: 0, pm: 0, p: 0, m: 0 }
    }
    fn is_zero(&self) -> bool {
        self.v == 0
    }
}

impl One for ZpM {
    fn one() -> Self {
        ZpM { v: 1, pm: 0, p: 0, m: 0 }
    }
    fn is_one(&self) -> bool {
        self.v == 1
    }
}

impl Scalar for ZpM {
    fn try_inv(&self) -> Option<Self> {
        if self.pm == 0 {
            if self.v == 1 {
                return Some(*self);
            }
            panic!("inversion of a modulus-free literal");
        }
        if self.v == 0 || self.v % self.p == 0 {
            return None;
        }
        let inv = inv_mod(self.v, self.pm).expect("unit inverse");
        Some(ZpM { v: inv, ..*self })
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: u64) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: u64) -> u64 {
        let m_big = BigInt::from(m);
        let mut r = self % &m_big;
        if r.is_negative() {
            r += &m_big;
        }
        r.to_u64().expect("reduced residue fits u64")
    }
}

// ---------------------------------------------------------------------------
// Elementary integer arithmetic.
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin for u64 (fixed witness set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorization, adequate for desk-scale levels.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` mod `m` when `gcd(a, m) = 1`.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    let mut t = t0 % m as i128;
    if t < 0 {
        t += m as i128;
    }
    Some(t as u64)
}

/// Legendre symbol `(a | p)` for odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    assert!(p > 2 && is_prime(p));
    let mut r = a % p as i64;
    if r < 0 {
        r += p as i64;
    }
    if r == 0 {
        return 0;
    }
    let e = pow_mod(r as u64, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        -1
    }
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    assert!(n > 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

pub fn valuation_big(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let p_big = BigInt::from(p);
    let mut v = 0;
    let mut n = n.abs();
    while (&n % &p_big).is_zero() {
        n /= &p_big;
        v += 1;
    }
    v
}

/// p-adic valuation of a nonzero rational (can be negative).
pub fn valuation_rat(x: &BigRational, p: u64) -> i64 {
    assert!(!x.is_zero());
    valuation_big(x.numer(), p) as i64 - valuation_big(x.denom(), p) as i64
}

/// CRT for pairwise-coprime moduli: returns x mod prod with x = r_i mod m_i.
pub fn crt(parts: &[(u64, u64)]) -> (u64, u64) {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, mi) in parts {
        // solve x + m*t = r (mod mi)
        let t = mul_mod(
            ((r as i128 - x as i128).rem_euclid(mi as i128)) as u64,
            inv_mod(m % mi, mi).expect("coprime moduli"),
            mi,
        );
        x += m * t;
        m *= mi;
        x %= m;
    }
    (x, m)
}

/// Euler phi.
pub fn euler_phi(n: u64) -> u64 {
    factor(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Smallest prime not dividing `n` (used to pick neighbor primes).
pub fn smallest_prime_coprime_to(n: u64, skip: &[u64]) -> u64 {
    let mut q = 2;
    loop {
        if is_prime(q) && n % q != 0 && !skip.contains(&q) {
            return q;
        }
        q += 1;
    }
}

/// Rational helpers: build a `BigRational` from an `i64` pair.
pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_and_factorization() {
        assert!(is_prime(2));
        assert!(is_prime(11));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1));
        assert!(!is_prime(121));
        assert_eq!(factor(121), vec![(11, 2)]);
        assert_eq!(factor(363), vec![(3, 1), (11, 2)]);
    }

    #[test]
    fn legendre_values() {
        // squares mod 11 are {1,3,4,5,9}
        let squares = [1, 3, 4, 5, 9];
        for a in 1..11 {
            let expect = if squares.contains(&a) { 1 } else { -1 };
            assert_eq!(legendre(a, 11), expect, "({a}|11)");
        }
        assert_eq!(legendre(-1, 11), -1);
        assert_eq!(legendre(2, 7), 1);
    }

    #[test]
    fn crt_basic() {
        let (x, m) = crt(&[(2, 3), (3, 5), (2, 7)]);
        assert_eq!(m, 105);
        assert_eq!(x, 23);
    }

    #[test]
    fn zpm_arithmetic() {
        let a = ZpM::new(7, 3, 4); // mod 81
        let b = ZpM::new(80, 3, 4);
        assert_eq!((a + b).value(), 6);
        assert_eq!((a * b).value(), (7 * 80) % 81);
        assert_eq!(a.try_inv().map(|x| (x * a).value()), Some(1));
        assert_eq!(ZpM::new(3, 3, 4).try_inv(), None);
        assert_eq!(ZpM::new(27, 3, 4).valuation(), 3);
        // wildcard literals promote
        let z: ZpM = num_traits::Zero::zero();
        assert_eq!((z + a).value(), 7);
    }

    #[test]
    fn teichmueller_is_root_of_unity() {
        let x = ZpM::new(2, 5, 6).teichmueller();
        assert_eq!(x.pow(4).value(), 1);
        assert_eq!(x.value() % 5, 2);
    }

    #[test]
    fn zpm_from_rational() {
        let x = ZpM::from_rat(&rat(1, 2), 3, 3).unwrap(); // 1/2 = 14 mod 27
        assert_eq!(x.value(), 14);
        assert!(ZpM::from_rat(&rat(1, 3), 3, 3).is_none());
    }
}
