//! Rational quaternion algebras.
//!
//! `B = (a, b | Q)` has basis `1, i, j, k` with `i^2 = a`, `j^2 = b`,
//! `k = ij = -ji`, hence `k^2 = -ab`, `ik = aj`, `ki = -aj`, `jk = -bi`,
//! `kj = bi`.  Reduced trace and norm of `x0 + x1 i + x2 j + x3 k` are
//! `trd = 2 x0` and `nrd = x0^2 - a x1^2 - b x2^2 + ab x3^2`; conjugation is
//! `x -> trd(x) - x` and `nrd(x) = x xbar` is multiplicative.
//!
//! For a prime `l` the definite algebra ramified exactly at `{l, oo}` is
//! produced by [`QuatAlgebra::ramified_at`]:
//!
//! * `l = 2`: `(-1, -1)`;
//! * `l = 3 mod 4`: `(-1, -l)`;
//! * `l = 5 mod 8`: `(-2, -l)`;
//! * `l = 1 mod 8`: `(-q, -l)` with `q` the least prime `q = 3 mod 4`
//!   that is a quadratic non-residue mod `l`.
//!
//! The construction re-certifies itself by computing the full set of
//! ramified places from Hilbert symbols; the symbols themselves are checked
//! against the product formula in the tests.

use crate::ring::{self, legendre, valuation_big};
use crate::Rat;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Quaternion element in coordinates `(x0, x1, x2, x3)` for `1, i, j, k`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Quat {
    pub c: [Rat; 4],
}

impl fmt::Debug for Quat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}*i + {}*j + {}*k)", self.c[0], self.c[1], self.c[2], self.c[3])
    }
}

impl Quat {
    pub fn new(c: [Rat; 4]) -> Self {
        Quat { c }
    }

    pub fn from_ints(x0: i64, x1: i64, x2: i64, x3: i64) -> Self {
        Quat {
            c: [
                ring::rat_int(x0),
                ring::rat_int(x1),
                ring::rat_int(x2),
                ring::rat_int(x3),
            ],
        }
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0, 0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0, 0, 0)
    }

    pub fn basis_i() -> Self {
        Self::from_ints(0, 1, 0, 0)
    }

    pub fn basis_j() -> Self {
        Self::from_ints(0, 0, 1, 0)
    }

    pub fn basis_k() -> Self {
        Self::from_ints(0, 0, 0, 1)
    }

    pub fn scale(&self, t: &Rat) -> Self {
        Quat {
            c: [
                &self.c[0] * t,
                &self.c[1] * t,
                &self.c[2] * t,
                &self.c[3] * t,
            ],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl Add for &Quat {
    type Output = Quat;
    fn add(self, rhs: &Quat) -> Quat {
        Quat {
            c: [
                &self.c[0] + &rhs.c[0],
                &self.c[1] + &rhs.c[1],
                &self.c[2] + &rhs.c[2],
                &self.c[3] + &rhs.c[3],
            ],
        }
    }
}

impl Sub for &Quat {
    type Output = Quat;
    fn sub(self, rhs: &Quat) -> Quat {
        Quat {
            c: [
                &self.c[0] - &rhs.c[0],
                &self.c[1] - &rhs.c[1],
                &self.c[2] - &rhs.c[2],
                &self.c[3] - &rhs.c[3],
            ],
        }
    }
}

impl Neg for &Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat {
            c: [
                -self.c[0].clone(),
                -self.c[1].clone(),
                -self.c[2].clone(),
                -self.c[3].clone(),
            ],
        }
    }
}

/// The algebra `(a, b | Q)` together with its arithmetic on elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatAlgebra {
    pub a: BigInt,
    pub b: BigInt,
}

impl QuatAlgebra {
    pub fn new(a: i64, b: i64) -> Self {
        QuatAlgebra { a: BigInt::from(a), b: BigInt::from(b) }
    }

    /// The definite algebra ramified exactly at `{l, oo}`, certified by an
    /// explicit ramification computation.
    pub fn ramified_at(l: u64) -> Self {
        assert!(ring::is_prime(l), "{l} is not prime");
        let alg = if l == 2 {
            Self::new(-1, -1)
        } else if l % 4 == 3 {
            QuatAlgebra { a: BigInt::from(-1), b: -BigInt::from(l) }
        } else if l % 8 == 5 {
            QuatAlgebra { a: BigInt::from(-2), b: -BigInt::from(l) }
        } else {
            let mut q = 3u64;
            loop {
                if ring::is_prime(q) && q % 4 == 3 && legendre(q as i64, l) == -1 {
                    break;
                }
                q += 1;
            }
            QuatAlgebra { a: -BigInt::from(q), b: -BigInt::from(l) }
        };
        let (fin, inf) = alg.ramified_places();
        assert!(inf && fin == vec![l], "ramification certificate failed for l = {l}: {fin:?}");
        alg
    }

    /// Quaternion product.
    pub fn mul(&self, u: &Quat, v: &Quat) -> Quat {
        let a = Rat::from(self.a.clone());
        let b = Rat::from(self.b.clone());
        let ab = &a * &b;
        let [x1, y1, z1, w1] = &u.c;
        let [x2, y2, z2, w2] = &v.c;
        Quat {
            c: [
                x1 * x2 + &a * (y1 * y2) + &b * (z1 * z2) - &ab * (w1 * w2),
                x1 * y2 + y1 * x2 - &b * (z1 * w2) + &b * (w1 * z2),
                x1 * z2 + z1 * x2 + &a * (y1 * w2) - &a * (w1 * y2),
                x1 * w2 + w1 * x2 + y1 * z2 - z1 * y2,
            ],
        }
    }

    pub fn trd(&self, u: &Quat) -> Rat {
        &u.c[0] + &u.c[0]
    }

    pub fn conj(&self, u: &Quat) -> Quat {
        Quat {
            c: [
                u.c[0].clone(),
                -u.c[1].clone(),
                -u.c[2].clone(),
                -u.c[3].clone(),
            ],
        }
    }

    pub fn nrd(&self, u: &Quat) -> Rat {
        let a = Rat::from(self.a.clone());
        let b = Rat::from(self.b.clone());
        let [x, y, z, w] = &u.c;
        x * x - &a * (y * y) - &b * (z * z) + &a * &b * (w * w)
    }

    pub fn inv(&self, u: &Quat) -> Option<Quat> {
        let n = self.nrd(u);
        if n.is_zero() {
            return None;
        }
        Some(self.conj(u).scale(&n.recip()))
    }

    /// Finite ramified primes (sorted) and whether `oo` is ramified.
    pub fn ramified_places(&self) -> (Vec<u64>, bool) {
        let inf = self.a.is_negative() && self.b.is_negative();
        let mut fin = Vec::new();
        let prod = BigInt::from(2) * &self.a * &self.b;
        let bound = prod.abs();
        let mut p = 2u64;
        while BigInt::from(p) <= bound {
            if ring::is_prime(p) && (&bound % BigInt::from(p)).is_zero() {
                if hilbert_symbol(&self.a, &self.b, p) == -1 {
                    fin.push(p);
                }
            }
            p += 1;
        }
        (fin, inf)
    }

    /// Reduced discriminant: product of the finite ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.ramified_places().0.iter().product()
    }
}

/// Hilbert symbol `(a, b)_p` for a finite prime `p` (including 2).
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, p: u64) -> i32 {
    assert!(ring::is_prime(p));
    assert!(!a.is_zero() && !b.is_zero());
    let alpha = valuation_big(a, p);
    let beta = valuation_big(b, p);
    let p_big = BigInt::from(p);
    let u = a / p_big.pow(alpha);
    let v = b / p_big.pow(beta);
    if p == 2 {
        let eps = |x: &BigInt| -> u32 {
            // (x - 1)/2 mod 2 for odd x
            let r = ((x - 1u32) / 2u32) % 2u32;
            if r.is_zero() { 0 } else { 1 }
        };
        let omega = |x: &BigInt| -> u32 {
            // (x^2 - 1)/8 mod 2 for odd x
            let r = ((x * x - 1u32) / 8u32) % 2u32;
            if r.is_zero() { 0 } else { 1 }
        };
        let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let leg = |x: &BigInt| -> i32 {
        let r = x % BigInt::from(p);
        legendre(r.to_i64().expect("residue fits"), p)
    };
    let mut s = 1i32;
    if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= leg(&u);
    }
    if alpha % 2 == 1 {
        s *= leg(&v);
    }
    s
}

/// Hilbert symbol at the real place.
pub fn hilbert_symbol_inf(a: &BigInt, b: &BigInt) -> i32 {
    if a.is_negative() && b.is_negative() {
        -1
    } else {
        1
    }
}
