//! Classical trace-formula and point-count oracles.
//!
//! Everything here is independent of the quaternionic machinery and serves as
//! ground truth for eigenvalue data.  Two engines:
//!
//! * the Eichler--Selberg trace formula for `Tr T_n` on `S_k(Gamma_0(N))`
//!   with trivial character, `gcd(n, N) = 1`, even weight, and `N` having at
//!   most square prime factors.  The elliptic term runs over `t^2 < 4n` and
//!   weights each quadratic order `O` of discriminant `(t^2 - 4n)/f^2` by its
//!   weighted class number `h_w` times a product of local embedding numbers
//!   of `O` into Eichler orders of level `p^{v_p(N)}`.  The embedding numbers
//!   are the orbit counts of geodesic segments on the Bruhat--Tits tree at
//!   distance profiles determined by the conductor of `O`; the table below
//!   covers levels `p` and `p^2`.
//!
//! * brute-force point counts on explicit elliptic curves over prime fields,
//!   extended to `a_n` by the Hecke recursions.
//!
//! Calibration: level 1 traces vanish in weights 2..10 and reproduce the
//! discriminant form in weight 12; level 11 weight 2 traces equal point
//! counts on `y^2 + y = x^3 - x^2 - 10x - 20` for every admissible `n`.

use num_integer::{Integer, Roots};
use num_traits::{One, Zero};

use crate::ring;
use crate::{CoreError, Int, Rat, Result};

/// Weighted class number of primitive reduced binary quadratic forms of
/// discriminant `-m` (`m > 0`, `m ≡ 0, 3 mod 4`): forms `(a, b, c)` with
/// `-a < b <= a <= c` and `b >= 0` when `a = c`, weight 1/3 for `(1,1,1)`,
/// 1/2 for `(1,0,1)`, 1 otherwise.
pub fn class_number_weighted(m: u64) -> Rat {
    assert!(m > 0 && (m % 4 == 0 || m % 4 == 3), "not a negative discriminant");
    let mut acc = Rat::zero();
    let mut b = (m % 2) as i64;
    while (b * b) as u64 <= m / 3 {
        let four_ac = (b * b) as u64 + m;
        if four_ac % 4 == 0 {
            let ac = four_ac / 4;
            let amax = ac.sqrt();
            for a in 1..=amax {
                if ac % a != 0 {
                    continue;
                }
                let c = ac / a;
                let bu = b as u64;
                if bu > a {
                    continue;
                }
                if a.gcd(&bu).gcd(&c) != 1 {
                    continue;
                }
                // count (a, b, c) and, when distinct and reduced, (a, -b, c)
                let weight = if a == c && b == 0 {
                    ring::rat(1, 2)
                } else if a == c && bu == a {
                    ring::rat(1, 3)
                } else if b == 0 || bu == a || a == c {
                    Rat::one()
                } else {
                    ring::rat_int(2)
                };
                acc += weight;
            }
        }
        b += 2;
    }
    acc
}

/// Hurwitz class number `H(m)`: the sum of `class_number_weighted` over the
/// orders of discriminant `-m/f^2`, with `H(0) = -1/12` and `H(m) = 0` for
/// `m ≡ 1, 2 mod 4`.
pub fn hurwitz(m: u64) -> Rat {
    if m == 0 {
        return ring::rat(-1, 12);
    }
    if m % 4 == 1 || m % 4 == 2 {
        return Rat::zero();
    }
    let mut acc = Rat::zero();
    for f in 1..=m.sqrt() {
        if m % (f * f) == 0 {
            let d = m / (f * f);
            if d % 4 == 0 || d % 4 == 3 {
                acc += class_number_weighted(d);
            }
        }
    }
    acc
}

/// The weight kernel `P_k(t, n) = (r^{k-1} - rbar^{k-1})/(r - rbar)` for the
/// roots of `X^2 - tX + n`, via the three-term recursion.
pub fn weight_kernel(t: i64, n: i64, k: u32) -> i128 {
    assert!(k >= 2);
    let (mut prev, mut cur): (i128, i128) = (1, t as i128);
    if k == 2 {
        return prev;
    }
    for _ in 0..(k - 3) {
        let next = t as i128 * cur - n as i128 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Number of optimal embeddings of the local quadratic order into an Eichler
/// order of level `p^nu` (`nu <= 2`), up to unit conjugation: the orbit count
/// of non-backtracking length-`nu` segments on the tree whose maximal
/// distance to the fixed locus of the torus equals the order's conductor
/// exponent.  `vd = v_p(disc)` of the order, `d0` its prime-to-`p` part.
fn local_embedding_number(p: u64, nu: u32, vd: u32, d0: i64) -> i64 {
    let pi = p as i64;
    if vd % 2 == 1 {
        // ramified field; conductor exponent (vd - 1)/2
        let r = (vd - 1) / 2;
        return match (nu, r) {
            (1, 0) => 1,
            (1, _) => 2,
            (2, 0) => 0,
            (2, _) => pi + 1,
            _ => unreachable!("level exponent out of range"),
        };
    }
    let r = vd / 2;
    let split = ring::legendre(d0.rem_euclid(p as i64), p) == 1;
    if split {
        match (nu, r) {
            (1, _) => 2,
            (2, 0) => 2,
            (2, 1) => pi + 2,
            (2, _) => pi + 1,
            _ => unreachable!("level exponent out of range"),
        }
    } else {
        match (nu, r) {
            (1, 0) => 0,
            (1, _) => 2,
            (2, 0) => 0,
            (2, 1) => pi,
            (2, _) => pi + 1,
            _ => unreachable!("level exponent out of range"),
        }
    }
}

fn index_psi(nn: u64) -> u64 {
    let mut acc = nn;
    for (p, _) in ring::factor(nn) {
        acc = acc / p * (p + 1);
    }
    acc
}

fn sigma1(n: u64) -> u64 {
    (1..=n).filter(|d| n % d == 0).sum()
}

/// `Tr T_n` on `S_k(Gamma_0(N))` with trivial character; requires even
/// `k >= 2`, `gcd(n, N) = 1`, and `v_p(N) <= 2` at every prime.
pub fn trace_tn(nn: u64, k: u32, n: u64) -> Result<Int> {
    if k < 2 || k % 2 != 0 {
        return Err(CoreError::Data(format!("weight {k} is not an even weight >= 2")));
    }
    if n == 0 || nn == 0 || n.gcd(&nn) != 1 {
        return Err(CoreError::Data(format!("n = {n} must be coprime to the level {nn}")));
    }
    let fac = ring::factor(nn);
    if fac.iter().any(|&(_, e)| e > 2) {
        return Err(CoreError::Data(format!("level {nn} has a cube factor")));
    }

    // identity contribution (n a perfect square)
    let root = n.sqrt();
    let mut total = if root * root == n {
        let scale = Int::from(root).pow(k - 2);
        ring::rat(((k - 1) * index_psi(nn) as u32) as i64, 12) * Rat::from(scale)
    } else {
        Rat::zero()
    };

    // elliptic contribution
    let tmax = (4 * n).sqrt() as i64;
    for t in -tmax..=tmax {
        let d = 4 * n as i64 - t * t; // = -disc > 0
        if d <= 0 {
            continue;
        }
        let pk = weight_kernel(t, n as i64, k);
        let du = d as u64;
        let mut local = Rat::zero();
        for f in 1..=du.sqrt() {
            if du % (f * f) != 0 {
                continue;
            }
            let df = du / (f * f);
            if df % 4 == 1 || df % 4 == 2 {
                continue;
            }
            let mut emb = 1i64;
            for &(p, e) in &fac {
                let vd = ring::valuation(df, p);
                let d0 = -((df / p.pow(vd)) as i64);
                emb *= local_embedding_number(p, e, vd, d0);
            }
            if emb != 0 {
                local += class_number_weighted(df) * ring::rat_int(emb);
            }
        }
        total -= ring::rat(1, 2) * Rat::from(Int::from(pk)) * local;
    }

    // hyperbolic contribution
    for d in 1..=n {
        if n % d != 0 {
            continue;
        }
        let dp = n / d;
        let mut weight = 0u64;
        for c in 1..=nn {
            if nn % c != 0 {
                continue;
            }
            let g = c.gcd(&(nn / c));
            if (d as i64 - dp as i64).rem_euclid(g as i64) == 0 {
                weight += ring::euler_phi(g);
            }
        }
        let m = Int::from(d.min(dp)).pow(k - 1);
        total -= ring::rat(1, 2) * Rat::from(m * Int::from(weight));
    }

    // weight-two correction from the Eisenstein part
    if k == 2 {
        total += Rat::from(Int::from(sigma1(n)));
    }

    if !total.denom().is_one() {
        return Err(CoreError::Hypothesis(format!(
            "trace formula returned a non-integer at N = {nn}, k = {k}, n = {n}"
        )));
    }
    Ok(total.to_integer())
}

/// An elliptic curve `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` over the
/// rationals with integer coefficients `[a1, a2, a3, a4, a6]`.
#[derive(Clone, Copy, Debug)]
pub struct EllipticCurve {
    pub a: [i64; 5],
}

/// `X_0(11)`: `y^2 + y = x^3 - x^2 - 10x - 20`, conductor 11.
pub const CURVE_11A: EllipticCurve = EllipticCurve { a: [0, -1, 1, -10, -20] };

/// The curve `y^2 + y = x^3 - x^2 - 7x + 10` of conductor 121 with complex
/// multiplication by `Q(sqrt(-11))`.
pub const CURVE_121B: EllipticCurve = EllipticCurve { a: [0, -1, 1, -7, 10] };

impl EllipticCurve {
    /// Discriminant of the Weierstrass model.
    pub fn discriminant(&self) -> Int {
        let [a1, a2, a3, a4, a6] = self.a.map(Int::from);
        let b2 = &a1 * &a1 + Int::from(4) * &a2;
        let b4 = Int::from(2) * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + Int::from(4) * &a6;
        let b8 = &a1 * &a1 * &a6 + Int::from(4) * &a2 * &a6 - &a1 * &a3 * &a4
            + &a2 * &a3 * &a3
            - &a4 * &a4;
        -(&b2 * &b2 * &b8) - Int::from(8) * (&b4 * &b4 * &b4) - Int::from(27) * (&b6 * &b6)
            + Int::from(9) * &b2 * &b4 * &b6
    }

    fn count_smooth(&self, p: u64) -> u64 {
        let pi = p as i64;
        let [a1, a2, a3, a4, a6] = self.a.map(|v| v.rem_euclid(pi));
        let mut count = 1; // point at infinity
        for x in 0..pi {
            for y in 0..pi {
                let lhs = (y * y + a1 * x * y + a3 * y).rem_euclid(pi);
                let rhs = (((x + a2) * x + a4) * x + a6).rem_euclid(pi);
                if lhs != rhs {
                    continue;
                }
                // partial derivatives; singular points are excluded
                let fy = (2 * y + a1 * x + a3).rem_euclid(pi);
                let fx = (a1 * y - (3 * x * x + 2 * a2 * x + a4)).rem_euclid(pi);
                if fy != 0 || fx != 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// The coefficient `a_p`: `p + 1 - #E(F_p)` at good primes, and
    /// `p - #E^{sm}(F_p)` (so `1`, `-1`, or `0`) at bad ones.
    pub fn ap(&self, p: u64) -> i64 {
        assert!(ring::is_prime(p));
        let cnt = self.count_smooth(p) as i64;
        if (self.discriminant() % Int::from(p)).is_zero() {
            p as i64 - cnt
        } else {
            p as i64 + 1 - cnt
        }
    }

    /// The coefficient `a_n` by multiplicativity and the weight-2 recursion
    /// `a_{p^{e+1}} = a_p a_{p^e} - p a_{p^{e-1}}` at good primes
    /// (`a_{p^e} = a_p^e` at bad ones).
    pub fn an(&self, n: u64) -> i64 {
        assert!(n > 0);
        let disc = self.discriminant();
        let mut acc = 1i64;
        for (p, e) in ring::factor(n) {
            let ap = self.ap(p);
            let val = if (disc.clone() % Int::from(p)).is_zero() {
                ap.pow(e)
            } else {
                let (mut prev, mut cur) = (1i64, ap);
                for _ in 1..e {
                    let next = ap * cur - p as i64 * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            };
            acc *= val;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hurwitz_small_values() {
        let expect = [
            (0u64, ring::rat(-1, 12)),
            (3, ring::rat(1, 3)),
            (4, ring::rat(1, 2)),
            (7, ring::rat_int(1)),
            (8, ring::rat_int(1)),
            (11, ring::rat_int(1)),
            (12, ring::rat(4, 3)),
            (15, ring::rat_int(2)),
            (16, ring::rat(3, 2)),
            (19, ring::rat_int(1)),
            (20, ring::rat_int(2)),
            (23, ring::rat_int(3)),
            (24, ring::rat_int(2)),
        ];
        for (m, h) in expect {
            assert_eq!(hurwitz(m), h, "H({m})");
        }
        assert!(hurwitz(5).is_zero());
        assert!(hurwitz(13).is_zero());
    }

    #[test]
    fn level_one_traces_vanish_below_weight_twelve() {
        for k in [2u32, 4, 6, 8, 10, 14] {
            for n in (1..=60).chain([100, 144, 210, 361]) {
                assert!(
                    trace_tn(1, k, n).unwrap().is_zero(),
                    "nonzero trace at k = {k}, n = {n}"
                );
            }
        }
    }

    #[test]
    fn weight_twelve_matches_the_discriminant_form() {
        // tau(p) for p <= 19, extended by the Hecke recursions
        let tau_p: [(u64, i64); 8] = [
            (2, -24),
            (3, 252),
            (5, 4830),
            (7, -16744),
            (11, 534612),
            (13, -577738),
            (17, -6905934),
            (19, 10661420),
        ];
        let tau = |n: u64| -> Int {
            let mut acc = Int::one();
            for (p, e) in ring::factor(n) {
                let ap = Int::from(tau_p.iter().find(|&&(q, _)| q == p).unwrap().1);
                let (mut prev, mut cur) = (Int::one(), ap.clone());
                for _ in 1..e {
                    let next = &ap * &cur - Int::from(p).pow(11) * &prev;
                    prev = cur;
                    cur = next;
                }
                acc *= cur;
            }
            acc
        };
        for n in 1..=361u64 {
            if ring::factor(n).iter().all(|&(p, _)| p <= 19) {
                assert_eq!(trace_tn(1, 12, n).unwrap(), tau(n), "tau({n})");
            }
        }
    }

    #[test]
    fn point_counts_on_the_level_eleven_curve() {
        let expect = [(2, -2), (3, -1), (5, 1), (7, -2), (11, 1), (13, 4), (17, -2), (19, 0)];
        for (p, ap) in expect {
            assert_eq!(CURVE_11A.ap(p), ap, "a_{p}");
        }
    }

    #[test]
    fn level_eleven_traces_equal_point_counts() {
        for n in 1..=361u64 {
            if n % 11 == 0 {
                continue;
            }
            assert_eq!(
                trace_tn(11, 2, n).unwrap(),
                Int::from(CURVE_11A.an(n)),
                "trace vs point count at n = {n}"
            );
        }
    }

    #[test]
    fn level_121_dimension_and_inert_prime_identities() {
        // Tr T_1 = dim S_2(Gamma_0(121)) = 6
        assert_eq!(trace_tn(121, 2, 1).unwrap(), Int::from(6));
        // with the four newforms arranged by the twisting action, the trace
        // at an inert prime collapses: Tr T_q = a_q(11a) + a_q(cm)
        for q in [2u64, 7, 13, 17, 19] {
            assert_eq!(
                trace_tn(121, 2, q).unwrap(),
                Int::from(CURVE_11A.ap(q) + CURVE_121B.ap(q)),
                "inert-prime trace identity at q = {q}"
            );
        }
    }
}
