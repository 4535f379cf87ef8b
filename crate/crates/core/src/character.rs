//! Dirichlet characters with exact cyclotomic values, and their lifts to the
//! unit groups of special orders.
//!
//! A character chi mod M (M odd) is stored through its exponents on fixed
//! generators of the cyclic factors (Z/q^e)^x, so all values are exact roots
//! of unity in Z[zeta_T].  The modulus is required to be odd throughout: the
//! local analysis below breaks down at q = 2 and such inputs are rejected at
//! construction time.
//!
//! A special order R of level M = aux * l^m admits a character lift
//! chi~ : R_q^x -> C^x for each prime q | M, glued from local recipes that
//! depend on how q meets the conductor C of chi:
//!
//! * q | M, q coprime to C: the lift is trivial;
//! * q | aux and q | C (a split, Eichler prime): through the local splitting
//!   R_q = upper triangular matrices mod q^e, set chi~(alpha) = chi_q(d) for
//!   d the lower-right entry, which requires v_q(aux) >= v_q(C);
//! * q = l with chi_l odd of conductor exactly l: R_l = O_L + P^(m-1) for a
//!   quadratic extension L of Q_l, and chi~ factors through the residue field
//!   of L.  When L/Q_l is unramified the residue field is F_{l^2} and chi_l
//!   is first extended from F_l^x to F_{l^2}^x; the extension with the
//!   smallest exponent on a fixed generator is chosen.  When L/Q_l is
//!   ramified the residue field is F_l and chi_l applies directly;
//! * q = l with chi_l even: chi~(alpha) = psi(nrd(alpha)) where psi is the
//!   fixed square root of chi_l with the same conductor;
//! * q = l with chi_l odd of conductor l^e, e > 1: factor chi_l = eps * phi
//!   with eps odd of conductor l (the exponent-1 character on the fixed
//!   generator) and phi even, and multiply the two lifts.
//!
//! The l-adic cases require m >= 2 v_l(C) - 1 when L/Q_l is unramified
//! (m odd) and m >= 2 v_l(C) when it is ramified (m even).  Every lift
//! restricts to chi on scalars: chi~(z u) = chi(z) chi~(u) for z in Z_q^x.
//!
//! Adelization is normalized so that the Hecke character attached to psi is
//! trivial on the rational diagonal, on positive reals, and on units
//! congruent to 1 mod M, and takes the value psi(q)^{-1} on a uniformizer at
//! q coprime to M.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::lattice::QuatLattice;
use crate::linalg::{zpm_solve, Mat};
use crate::order::{radical_power, SpecialOrder};
use crate::quat::{Quat, QuatAlgebra};
use crate::ring::{self, ZpM};
use crate::splitting::LocalSplitting;
use crate::{CoreError, Cyc, Rat, Result};

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut b = (b % m) as u128;
    let m = m as u128;
    let mut acc: u128 = 1 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
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
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Smallest primitive root mod q^e for an odd prime q (for e >= 2 the
/// smallest root mod q is bumped by q when it degenerates mod q^2).
fn primitive_root(q: u64, e: u32) -> u64 {
    let phi = q - 1;
    let fac = ring::factor(phi);
    let mut g = 2u64;
    loop {
        if fac.iter().all(|&(r, _)| pow_mod(g, phi / r, q) != 1) {
            break;
        }
        g += 1;
    }
    if e == 1 {
        g
    } else if pow_mod(g, q - 1, q * q) == 1 {
        g + q
    } else {
        g
    }
}

/// One cyclic factor of (Z/M)^x at an odd prime power q^e, with the exponent
/// of the character on the fixed generator.
#[derive(Clone, Debug, PartialEq, Eq)]
struct LocalComp {
    q: u64,
    e: u32,
    /// q^e.
    pp: u64,
    /// Fixed generator of (Z/q^e)^x.
    g: u64,
    /// phi(q^e).
    phi: u64,
    /// The character maps g to zeta_phi^exp.
    exp: u64,
}

impl LocalComp {
    fn trivial(q: u64, e: u32) -> Self {
        let pp = q.pow(e);
        LocalComp { q, e, pp, g: primitive_root(q, e), phi: ring::euler_phi(pp), exp: 0 }
    }

    fn dlog(&self, x: u64) -> Option<u64> {
        let x = x % self.pp;
        let mut acc = 1u64;
        for d in 0..self.phi {
            if acc == x {
                return Some(d);
            }
            acc = (acc as u128 * self.g as u128 % self.pp as u128) as u64;
        }
        None
    }

    /// Multiplicative order of the component.
    fn order(&self) -> u64 {
        self.phi / self.phi.gcd(&self.exp)
    }

    /// Conductor q^c: c = v_q(order) + 1 for a nontrivial component.
    fn conductor(&self) -> u64 {
        if self.exp == 0 {
            1
        } else {
            self.q.pow(ring::valuation(self.order(), self.q) + 1)
        }
    }

    /// The same character viewed mod q^e2 (e2 >= conductor exponent).
    fn with_modulus(&self, e2: u32) -> Self {
        let mut out = LocalComp::trivial(self.q, e2);
        if self.exp == 0 {
            return out;
        }
        // evaluate on the new generator: chi(g2) = zeta_phi^(exp * dlog(g2))
        let k = self.exp * self.dlog(out.g % self.pp).expect("generator is a unit") % self.phi;
        if e2 >= self.e {
            out.exp = k * (out.phi / self.phi);
        } else {
            let quot = self.phi / out.phi;
            assert_eq!(k % quot, 0, "component does not factor through q^{e2}");
            out.exp = k / quot;
        }
        out
    }
}

/// A Dirichlet character of odd modulus with values in a cyclotomic field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    comps: Vec<LocalComp>,
}

impl DirichletCharacter {
    fn check_modulus(modulus: u64) -> Result<Vec<(u64, u32)>> {
        if modulus == 0 || modulus % 2 == 0 {
            return Err(CoreError::Hypothesis(format!(
                "character modulus must be odd and positive, got {modulus}"
            )));
        }
        Ok(ring::factor(modulus))
    }

    /// The trivial character mod `modulus`.
    pub fn trivial(modulus: u64) -> Result<Self> {
        let fac = Self::check_modulus(modulus)?;
        let comps = fac.iter().map(|&(q, e)| LocalComp::trivial(q, e)).collect();
        Ok(DirichletCharacter { modulus, comps })
    }

    /// Build from exponents on the fixed generators, one per prime factor of
    /// the modulus in increasing order.
    pub fn from_exponents(modulus: u64, exps: &[u64]) -> Result<Self> {
        let fac = Self::check_modulus(modulus)?;
        if fac.len() != exps.len() {
            return Err(CoreError::Data(format!(
                "expected {} exponents for modulus {modulus}, got {}",
                fac.len(),
                exps.len()
            )));
        }
        let comps = fac
            .iter()
            .zip(exps)
            .map(|(&(q, e), &x)| {
                let mut c = LocalComp::trivial(q, e);
                c.exp = x % c.phi;
                c
            })
            .collect();
        Ok(DirichletCharacter { modulus, comps })
    }

    /// All phi(modulus) characters mod `modulus`, in lexicographic exponent
    /// order (the trivial character first).
    pub fn all_characters(modulus: u64) -> Result<Vec<Self>> {
        let base = Self::trivial(modulus)?;
        let mut out = vec![base.clone()];
        let radix: Vec<u64> = base.comps.iter().map(|c| c.phi).collect();
        let mut exps = vec![0u64; radix.len()];
        loop {
            let mut i = match radix.len() {
                0 => return Ok(out),
                n => n - 1,
            };
            loop {
                exps[i] += 1;
                if exps[i] < radix[i] {
                    break;
                }
                exps[i] = 0;
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
            }
            let mut chi = base.clone();
            for (c, &x) in chi.comps.iter_mut().zip(&exps) {
                c.exp = x;
            }
            out.push(chi);
        }
    }

    /// The quadratic character mod an odd prime q (the Legendre symbol).
    pub fn quadratic(q: u64) -> Result<Self> {
        if !ring::is_prime(q) || q == 2 {
            return Err(CoreError::Hypothesis(format!("{q} is not an odd prime")));
        }
        Self::from_exponents(q, &[(q - 1) / 2])
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Order of the character in the dual group.
    pub fn order(&self) -> u64 {
        self.comps.iter().map(|c| c.order()).fold(1, |a, b| a.lcm(&b))
    }

    /// Conductor: the product of the component conductors.
    pub fn conductor(&self) -> u64 {
        self.comps.iter().map(|c| c.conductor()).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.comps.iter().all(|c| c.exp == 0)
    }

    /// chi(-1) = +1.
    pub fn is_even(&self) -> bool {
        // -1 has discrete log phi/2 in each component
        self.comps.iter().map(|c| c.exp).sum::<u64>() % 2 == 0
    }

    pub fn is_odd(&self) -> bool {
        !self.is_even()
    }

    /// Order of the cyclotomic field holding all values (an lcm of group
    /// orders, so a multiple of the character order).
    pub fn value_order(&self) -> u64 {
        self.comps.iter().map(|c| c.phi).fold(1, |a, b| a.lcm(&b))
    }

    /// Evaluate at an integer; non-units map to zero.
    pub fn eval_big(&self, x: &BigInt) -> Cyc {
        let t = self.value_order();
        let m = BigInt::from(self.modulus);
        let r = x.mod_floor(&m);
        let r: u64 = r.try_into().expect("reduced residue fits in u64");
        if r.gcd(&self.modulus) != 1 {
            return Cyc::from_int(0);
        }
        let mut acc = Cyc::zeta(t, 0);
        for c in &self.comps {
            let d = c.dlog(r % c.pp).expect("unit has a discrete log");
            let k = (c.exp as u128 * d as u128 % c.phi as u128) as u64;
            acc = acc * Cyc::zeta(t, k * (t / c.phi));
        }
        acc
    }

    pub fn eval_int(&self, x: i64) -> Cyc {
        self.eval_big(&BigInt::from(x))
    }

    /// Evaluate at a rational that is a unit at every prime of the modulus.
    pub fn eval_rat(&self, x: &Rat) -> Result<Cyc> {
        let m = BigInt::from(self.modulus);
        let d = x.denom().mod_floor(&m);
        let d: u64 = d.try_into().expect("reduced residue fits in u64");
        let di = inv_mod(d, self.modulus).ok_or_else(|| {
            CoreError::Data(format!("denominator of {x} is not a unit mod {}", self.modulus))
        })?;
        let n = x.numer().mod_floor(&m);
        let n: u64 = n.try_into().expect("reduced residue fits in u64");
        if n.gcd(&self.modulus) != 1 {
            return Err(CoreError::Data(format!(
                "{x} is not a unit at the modulus {}",
                self.modulus
            )));
        }
        Ok(self.eval_big(&BigInt::from(
            (n as u128 * di as u128 % self.modulus as u128) as u64,
        )))
    }

    /// Product character, on the lcm of the two moduli.
    pub fn mul(&self, other: &Self) -> Self {
        let m = self.modulus.lcm(&other.modulus);
        let a = self.extend(m).expect("lcm is a multiple");
        let b = other.extend(m).expect("lcm is a multiple");
        let comps = a
            .comps
            .iter()
            .zip(&b.comps)
            .map(|(x, y)| {
                let mut c = x.clone();
                c.exp = (x.exp + y.exp) % c.phi;
                c
            })
            .collect();
        DirichletCharacter { modulus: m, comps }
    }

    /// Inverse (complex conjugate) character.
    pub fn inv(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| {
                let mut x = c.clone();
                x.exp = if c.exp == 0 { 0 } else { c.phi - c.exp };
                x
            })
            .collect();
        DirichletCharacter { modulus: self.modulus, comps }
    }

    /// The same character viewed mod a multiple of the modulus.
    pub fn extend(&self, modulus: u64) -> Result<Self> {
        if modulus % self.modulus != 0 {
            return Err(CoreError::Data(format!(
                "{modulus} is not a multiple of the modulus {}",
                self.modulus
            )));
        }
        let fac = Self::check_modulus(modulus)?;
        let comps = fac
            .iter()
            .map(|&(q, e)| match self.comps.iter().find(|c| c.q == q) {
                Some(c) => c.with_modulus(e),
                None => LocalComp::trivial(q, e),
            })
            .collect();
        Ok(DirichletCharacter { modulus, comps })
    }

    /// The primitive character mod the conductor inducing this one.
    pub fn primitive(&self) -> Self {
        let comps: Vec<LocalComp> = self
            .comps
            .iter()
            .filter(|c| c.exp != 0)
            .map(|c| c.with_modulus(ring::valuation(c.conductor(), c.q)))
            .collect();
        let modulus = comps.iter().map(|c| c.pp).product::<u64>().max(1);
        DirichletCharacter { modulus, comps }
    }

    /// Split into characters of prime-power modulus (one per factor).
    pub fn decompose(&self) -> Vec<Self> {
        self.comps
            .iter()
            .map(|c| DirichletCharacter { modulus: c.pp, comps: vec![c.clone()] })
            .collect()
    }
}

/// The square root psi of an even character chi of odd prime-power modulus
/// with psi^2 = chi and cond(psi) = cond(chi); among the two candidates the
/// smaller exponent on the fixed generator is chosen.
pub fn sqrt_even_character(chi: &DirichletCharacter) -> Result<DirichletCharacter> {
    if chi.comps.len() > 1 {
        return Err(CoreError::Hypothesis(format!(
            "square roots are taken at prime-power modulus, got {}",
            chi.modulus
        )));
    }
    if !chi.is_even() {
        return Err(CoreError::Hypothesis(
            "an odd character has no even square root".into(),
        ));
    }
    if chi.comps.is_empty() {
        return Ok(chi.clone());
    }
    let c = &chi.comps[0];
    // chi even at odd prime power means exp is even
    let mut cands = [c.exp / 2, c.exp / 2 + c.phi / 2];
    cands.sort_unstable();
    for b in cands {
        let mut comp = c.clone();
        comp.exp = b;
        if comp.conductor() == c.conductor() {
            return Ok(DirichletCharacter { modulus: chi.modulus, comps: vec![comp] });
        }
    }
    unreachable!("one of the two half-exponents preserves the conductor")
}

/// The finite-order Hecke character attached to a Dirichlet character psi:
/// trivial on the rational diagonal, positive reals, and units congruent to
/// 1 mod the modulus.
#[derive(Clone, Debug)]
pub struct AdelicCharacter {
    pub psi: DirichletCharacter,
}

impl AdelicCharacter {
    pub fn new(psi: DirichletCharacter) -> Self {
        AdelicCharacter { psi }
    }

    /// Value on the uniformizer idele at q (q coprime to the modulus):
    /// psi(q)^{-1}.
    pub fn at_uniformizer(&self, q: u64) -> Result<Cyc> {
        if q.gcd(&self.psi.modulus()) != 1 {
            return Err(CoreError::Data(format!(
                "uniformizer at {q} meets the modulus {}",
                self.psi.modulus()
            )));
        }
        let qi = inv_mod(q, self.psi.modulus()).expect("coprime residue");
        Ok(self.psi.eval_int(qi as i64))
    }

    /// Value on a diagonal unit idele with residue u at the modulus: psi(u).
    pub fn at_unit(&self, u: i64) -> Result<Cyc> {
        let v = self.psi.eval_int(u);
        if v == Cyc::from_int(0) {
            return Err(CoreError::Data(format!(
                "{u} is not a unit mod {}",
                self.psi.modulus()
            )));
        }
        Ok(v)
    }

    /// Value on a finite idele given by uniformizer exponents and a unit
    /// residue at the modulus.
    pub fn eval_finite(&self, places: &[(u64, i64)], unit: i64) -> Result<Cyc> {
        // psi takes values in mu_t, so exponents reduce mod t
        let t = self.psi.value_order();
        let mut acc = self.at_unit(unit)?;
        for &(q, v) in places {
            let z = self.at_uniformizer(q)?;
            for _ in 0..v.rem_euclid(t as i64) {
                acc = acc * z.clone();
            }
        }
        Ok(acc)
    }
}

/// Lift of an odd conductor-l character through the residue field of the
/// local quadratic extension L at the ramified prime.
#[derive(Clone, Debug)]
pub struct ResidueLift {
    ell: u64,
    /// Even l-exponent: L/Q_l ramified, residue field F_l.
    ramified: bool,
    /// Coordinate frame for the solve.
    maximal: QuatLattice,
    /// Columns [1 | s | basis of P^max(1, m-1)] mod l in the maximal frame.
    cols: Mat<ZpM>,
    /// s^2 mod l, a non-residue (unramified case).
    u_sq: u64,
    /// Generator of F_{l^2}^x in coordinates (x, y) w.r.t. 1, s.
    gen2: (u64, u64),
    /// The extension theta sends gen2 to zeta_{l^2-1}^theta_exp.
    theta_exp: u64,
    /// l^2 - 1 (unramified) or l - 1 (ramified).
    zeta_order: u64,
    /// chi mod l, applied directly in the ramified case.
    chi_res: DirichletCharacter,
}

fn f2_mul(ell: u64, u: u64, a: (u64, u64), b: (u64, u64)) -> (u64, u64) {
    let l = ell as u128;
    let x = (a.0 as u128 * b.0 as u128 + u as u128 * a.1 as u128 % l * b.1 as u128) % l;
    let y = (a.0 as u128 * b.1 as u128 + a.1 as u128 * b.0 as u128) % l;
    (x as u64, y as u64)
}

fn f2_order(ell: u64, u: u64, a: (u64, u64)) -> u64 {
    let mut acc = a;
    let mut n = 1;
    while acc != (1, 0) {
        acc = f2_mul(ell, u, acc, a);
        n += 1;
    }
    n
}

fn f2_dlog(ell: u64, u: u64, g: (u64, u64), x: (u64, u64)) -> Option<u64> {
    let mut acc = (1u64, 0u64);
    for d in 0..ell * ell - 1 {
        if acc == x {
            return Some(d);
        }
        acc = f2_mul(ell, u, acc, g);
    }
    None
}

impl ResidueLift {
    fn new(order: &SpecialOrder, chi_ell: &DirichletCharacter) -> Result<Self> {
        let ell = order.ell;
        assert_eq!(chi_ell.modulus(), ell, "residue lift needs conductor exactly l");
        assert!(chi_ell.is_odd(), "residue lift applies to odd characters");
        let ramified = order.m % 2 == 0;
        let s = match &order.s_elem {
            Some(s) => s.clone(),
            // maximal order: search a small trace-zero s with s^2 a non-residue
            None => find_inert_s(order)?,
        };
        let k = order.m.max(2) - 1;
        let rad = radical_power(&order.maximal, &order.p_ideal, ell, k);
        let mut col_list: Vec<Vec<ZpM>> = Vec::new();
        let frame = &order.maximal;
        let push = |x: &Quat, col_list: &mut Vec<Vec<ZpM>>| {
            let co = frame.coords_of(x).expect("generator lies in the maximal order");
            col_list.push(
                co.iter()
                    .map(|c| ZpM::new(c.mod_floor(&BigInt::from(ell)).try_into().unwrap(), ell, 1))
                    .collect(),
            );
        };
        push(&Quat::one(), &mut col_list);
        push(&s, &mut col_list);
        for b in rad.basis() {
            push(&b, &mut col_list);
        }
        let cols = Mat::from_cols(col_list);
        let s2 = -order.alg.nrd(&s);
        assert!(s2.is_integer(), "trace-zero s squares to an integer");
        let mut u_sq = 0;
        let mut gen2 = (0, 0);
        let mut theta_exp = 0;
        let zeta_order;
        if ramified {
            assert_eq!(ring::valuation_rat(&order.alg.nrd(&s), ell), 1);
            zeta_order = ell - 1;
        } else {
            u_sq = {
                let r = s2.numer().mod_floor(&BigInt::from(ell));
                let r: u64 = r.try_into().unwrap();
                r
            };
            assert_eq!(ring::legendre(u_sq as i64, ell), -1, "s generates the inert extension");
            zeta_order = ell * ell - 1;
            // smallest generator of F_{l^2}^x in lexicographic (x, y) order
            'outer: for x in 0..ell {
                for y in 0..ell {
                    if (x, y) == (0, 0) {
                        continue;
                    }
                    if f2_order(ell, u_sq, (x, y)) == zeta_order {
                        gen2 = (x, y);
                        break 'outer;
                    }
                }
            }
            assert_ne!(gen2, (0, 0), "F_{{l^2}}^x is cyclic");
            // theta restricted to F_l^x must equal chi: the norm-one index is
            // l + 1, and gen2^(l+1) generates F_l^x
            let mut g1 = gen2;
            for _ in 0..ell {
                g1 = f2_mul(ell, u_sq, g1, gen2);
            }
            assert_eq!(g1.1, 0, "gen2^(l+1) is rational");
            let comp = &chi_ell.comps[0];
            let d = comp.dlog(g1.0).expect("unit");
            theta_exp = (comp.exp as u128 * d as u128 % (ell - 1) as u128) as u64;
            // certify the restriction on every scalar
            for z in 1..ell {
                let d2 = f2_dlog(ell, u_sq, gen2, (z, 0)).unwrap();
                let theta_z = Cyc::zeta(zeta_order, theta_exp * d2 % zeta_order);
                assert_eq!(theta_z, chi_ell.eval_int(z as i64), "theta restricts to chi");
            }
        }
        Ok(ResidueLift {
            ell,
            ramified,
            maximal: order.maximal.clone(),
            cols,
            u_sq,
            gen2,
            theta_exp,
            zeta_order,
            chi_res: chi_ell.clone(),
        })
    }

    /// Coordinates (x, y) of b mod the radical part: b = x + y s + (P-part).
    fn residue_coords(&self, b: &Quat) -> Result<(u64, u64)> {
        let ell = self.ell;
        let mut den = BigInt::one();
        for c in &b.c {
            den = den.lcm(c.denom());
        }
        if (&den % BigInt::from(ell)).is_zero() {
            return Err(CoreError::Data(format!("element is not integral at l = {ell}")));
        }
        let db = b.scale(&Rat::from(den.clone()));
        let co = self
            .maximal
            .coords_of(&db)
            .ok_or_else(|| CoreError::Data("element is not integral at l".into()))?;
        let di = inv_mod(
            den.mod_floor(&BigInt::from(ell)).try_into().unwrap(),
            ell,
        )
        .expect("denominator is a unit mod l");
        let rhs: Vec<ZpM> = co
            .iter()
            .map(|c| {
                let r: u64 = c.mod_floor(&BigInt::from(ell)).try_into().unwrap();
                ZpM::new((r as u128 * di as u128 % ell as u128) as i64, ell, 1)
            })
            .collect();
        let t = zpm_solve(&self.cols, &rhs)
            .ok_or_else(|| CoreError::Data("element does not lie in the local order at l".into()))?;
        Ok((t[0].value(), t[1].value()))
    }

    fn eval(&self, b: &Quat) -> Result<Cyc> {
        let (x, y) = self.residue_coords(b)?;
        if self.ramified {
            if x == 0 {
                return Err(CoreError::Data("element is not a unit at l".into()));
            }
            Ok(self.chi_res.eval_int(x as i64))
        } else {
            let d = f2_dlog(self.ell, self.u_sq, self.gen2, (x, y)).ok_or_else(|| {
                CoreError::Data("element reduces to zero in the residue field".into())
            })?;
            Ok(Cyc::zeta(self.zeta_order, self.theta_exp * d % self.zeta_order))
        }
    }
}

/// Search a trace-zero element of the maximal order whose square is a
/// non-residue mod l (used when the order carries no distinguished s).
fn find_inert_s(order: &SpecialOrder) -> Result<Quat> {
    for n in 1..32i64 {
        for c1 in -n..=n {
            for c2 in -n..=n {
                for c3 in -n..=n {
                    if c1.abs().max(c2.abs()).max(c3.abs()) != n {
                        continue;
                    }
                    let s = Quat::new([
                        Rat::zero(),
                        ring::rat_int(c1),
                        ring::rat_int(c2),
                        ring::rat_int(c3),
                    ]);
                    if !order.maximal.contains(&s) {
                        continue;
                    }
                    let nr = order.alg.nrd(&s);
                    if ring::valuation_rat(&nr, order.ell) != 0 {
                        continue;
                    }
                    let m = (-nr.numer()).mod_floor(&BigInt::from(order.ell));
                    let m: u64 = m.try_into().unwrap();
                    if ring::legendre(m as i64, order.ell) == -1 {
                        return Ok(s);
                    }
                }
            }
        }
    }
    Err(CoreError::Hypothesis(
        "no inert trace-zero element found in the maximal order".into(),
    ))
}

/// One local piece of a lifted character, tagged by the recipe used.
#[derive(Clone, Debug)]
pub enum LocalLift {
    /// Level prime away from the conductor.
    Trivial { q: u64 },
    /// Split level prime inside the conductor: lower-right entry of the
    /// local splitting.
    Eichler { q: u64, chi_q: DirichletCharacter, sp: LocalSplitting, prec: u32 },
    /// Odd conductor-l character through the residue field.
    Residue { lift: ResidueLift },
    /// Even character through the reduced norm.
    Norm { q: u64, psi: DirichletCharacter },
    /// Odd character of conductor l^e, e > 1: residue times norm lift.
    Composite { lift: ResidueLift, psi: DirichletCharacter },
}

impl LocalLift {
    pub fn prime(&self) -> u64 {
        match self {
            LocalLift::Trivial { q } | LocalLift::Eichler { q, .. } | LocalLift::Norm { q, .. } => {
                *q
            }
            LocalLift::Residue { lift } | LocalLift::Composite { lift, .. } => lift.ell,
        }
    }

    /// Short case tag for reports.
    pub fn case_label(&self) -> &'static str {
        match self {
            LocalLift::Trivial { .. } => "1",
            LocalLift::Eichler { .. } => "2",
            LocalLift::Residue { .. } => "3i",
            LocalLift::Norm { .. } => "3ii",
            LocalLift::Composite { .. } => "3iii",
        }
    }

    /// Evaluate this single local component at a quaternion that is a unit at
    /// the component's prime.
    pub fn eval(&self, alg: &QuatAlgebra, b: &Quat) -> Result<Cyc> {
        let nrd = alg.nrd(b);
        let unit_at = |q: u64| -> Result<()> {
            if ring::valuation_rat(&nrd, q) != 0 {
                return Err(CoreError::Data(format!("element is not a unit at q = {q}")));
            }
            Ok(())
        };
        match self {
            LocalLift::Trivial { .. } => Ok(Cyc::from_int(1)),
            LocalLift::Eichler { q, chi_q, sp, prec } => {
                unit_at(*q)?;
                let img = sp
                    .try_image(b)
                    .ok_or_else(|| CoreError::Data(format!("element is not integral at q = {q}")))?
                    .truncate(*prec);
                Ok(chi_q.eval_int(img.0[3].value() as i64))
            }
            LocalLift::Residue { lift } => {
                unit_at(lift.ell)?;
                lift.eval(b)
            }
            LocalLift::Norm { q, psi } => {
                unit_at(*q)?;
                psi.eval_rat(&nrd)
            }
            LocalLift::Composite { lift, psi } => {
                unit_at(lift.ell)?;
                Ok(lift.eval(b)? * psi.eval_rat(&nrd)?)
            }
        }
    }
}

/// A character of the unit groups R_q^x of a special order, glued from local
/// lifts of a Dirichlet character.
#[derive(Clone, Debug)]
pub struct LiftedCharacter {
    pub chi: DirichletCharacter,
    alg: crate::quat::QuatAlgebra,
    locals: Vec<LocalLift>,
}

/// Lift chi to the unit groups of the special order, checking the level and
/// conductor constraints prime by prime.
pub fn lift_character(order: &SpecialOrder, chi: &DirichletCharacter) -> Result<LiftedCharacter> {
    let prim = chi.primitive();
    let ell = order.ell;
    let m = order.m;
    let mut locals: Vec<LocalLift> = Vec::new();
    let mut covered: Vec<u64> = Vec::new();
    for comp in &prim.comps {
        let q = comp.q;
        covered.push(q);
        if q == ell {
            let nu = comp.e;
            let need = if m % 2 == 1 { 2 * nu - 1 } else { 2 * nu };
            if m < need {
                return Err(CoreError::Hypothesis(format!(
                    "character of conductor {}^{} at the ramified prime needs l-exponent >= {}, the order has m = {}",
                    q, nu, need, m
                )));
            }
            let comp_char = DirichletCharacter { modulus: comp.pp, comps: vec![comp.clone()] };
            if comp_char.is_even() {
                let psi = sqrt_even_character(&comp_char)?;
                locals.push(LocalLift::Norm { q, psi });
            } else if nu == 1 {
                locals.push(LocalLift::Residue { lift: ResidueLift::new(order, &comp_char)? });
            } else {
                let eps = DirichletCharacter::from_exponents(ell, &[1])?;
                let phi_char = comp_char.mul(&eps.inv()).primitive();
                assert!(phi_char.is_even(), "chi/eps is even");
                let psi = if phi_char.is_trivial() {
                    DirichletCharacter::trivial(ell)?
                } else {
                    sqrt_even_character(&phi_char)?
                };
                locals.push(LocalLift::Composite { lift: ResidueLift::new(order, &eps)?, psi });
            }
        } else {
            let e_aux = ring::valuation(order.aux, q);
            if e_aux == 0 {
                return Err(CoreError::Hypothesis(format!(
                    "conductor prime {q} does not divide the level"
                )));
            }
            if e_aux < comp.e {
                return Err(CoreError::Hypothesis(format!(
                    "character conductor {}^{} at q = {} exceeds the level exponent {}",
                    q, comp.e, q, e_aux
                )));
            }
            let sp = crate::ideal::transport_splitting(order, q)?;
            if sp.target_prec < comp.e {
                return Err(CoreError::Precision(format!(
                    "splitting precision {} at q = {} is below the conductor exponent {}",
                    sp.target_prec, q, comp.e
                )));
            }
            let chi_q = DirichletCharacter { modulus: comp.pp, comps: vec![comp.clone()] };
            locals.push(LocalLift::Eichler { q, chi_q, sp, prec: comp.e });
        }
    }
    let mut level_primes: Vec<u64> = ring::factor(order.aux).iter().map(|&(q, _)| q).collect();
    level_primes.push(ell);
    for q in level_primes {
        if !covered.contains(&q) {
            locals.push(LocalLift::Trivial { q });
        }
    }
    locals.sort_by_key(|l| l.prime());
    Ok(LiftedCharacter { chi: chi.clone(), alg: order.alg.clone(), locals })
}

impl LiftedCharacter {
    pub fn locals(&self) -> &[LocalLift] {
        &self.locals
    }

    pub fn is_trivial(&self) -> bool {
        self.locals.iter().all(|l| matches!(l, LocalLift::Trivial { .. }))
    }

    /// Order of a cyclotomic field containing all values.
    pub fn value_order(&self) -> u64 {
        self.locals
            .iter()
            .map(|l| match l {
                LocalLift::Trivial { .. } => 1,
                LocalLift::Eichler { chi_q, .. } => chi_q.value_order(),
                LocalLift::Residue { lift } => lift.zeta_order,
                LocalLift::Norm { psi, .. } => psi.value_order(),
                LocalLift::Composite { lift, psi } => lift.zeta_order.lcm(&psi.value_order()),
            })
            .fold(1, |a, b| a.lcm(&b))
    }

    /// Evaluate at a quaternion that is a local unit at every level prime in
    /// the conductor.
    pub fn eval(&self, b: &Quat) -> Result<Cyc> {
        let mut acc = Cyc::from_int(1);
        for l in &self.locals {
            acc = acc * l.eval(&self.alg, b)?;
        }
        Ok(acc)
    }

    /// Evaluate the product of all local components away from the prime `t`.
    pub fn eval_away(&self, t: u64, b: &Quat) -> Result<Cyc> {
        let mut acc = Cyc::from_int(1);
        for l in &self.locals {
            if l.prime() != t {
                acc = acc * l.eval(&self.alg, b)?;
            }
        }
        Ok(acc)
    }

    /// The local component at prime `t`, if the conductor touches `t`.
    pub fn local_at(&self, t: u64) -> Option<&LocalLift> {
        self.locals.iter().find(|l| l.prime() == t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::LClass;
    use proptest::prelude::*;

    #[test]
    fn quadratic_matches_legendre() {
        let chi = DirichletCharacter::quadratic(11).unwrap();
        for x in 1..11i64 {
            let want = ring::legendre(x, 11);
            let got = chi.eval_int(x);
            assert_eq!(got, Cyc::from_int(want as i64));
        }
        assert!(chi.is_odd()); // 11 = 3 mod 4
        assert!(DirichletCharacter::quadratic(13).unwrap().is_even());
        assert_eq!(chi.conductor(), 11);
        assert_eq!(chi.order(), 2);
    }

    #[test]
    fn decompose_and_conductor() {
        let triv = DirichletCharacter::trivial(15).unwrap();
        let parts = triv.decompose();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].modulus(), 3);
        assert_eq!(parts[1].modulus(), 5);
        assert!(parts.iter().all(|c| c.is_trivial() && c.conductor() == 1));

        // character mod 33 supported only at 11
        let chi = DirichletCharacter::from_exponents(33, &[0, 3]).unwrap();
        assert_eq!(chi.conductor(), 11);
        let prim = chi.primitive();
        assert_eq!(prim.modulus(), 11);
        for x in 1..33i64 {
            if x % 3 == 0 || x % 11 == 0 {
                assert_eq!(chi.eval_int(x), Cyc::from_int(0));
                continue;
            }
            assert_eq!(chi.eval_int(x), prim.eval_int(x % 11));
            let product: Cyc = chi
                .decompose()
                .into_iter()
                .map(|c| c.eval_int(x))
                .fold(Cyc::from_int(1), |a, b| a * b);
            assert_eq!(chi.eval_int(x), product);
        }
    }

    #[test]
    fn character_group_structure() {
        let all = DirichletCharacter::all_characters(11).unwrap();
        assert_eq!(all.len(), 10);
        assert!(all[0].is_trivial());
        assert_eq!(all.iter().filter(|c| c.is_even()).count(), 5);
        for chi in &all {
            assert_eq!(chi.value_order() % chi.order(), 0);
            // multiplicativity on the whole group
            for x in 1..11i64 {
                for y in 1..11i64 {
                    assert_eq!(
                        chi.eval_int(x * y),
                        chi.eval_int(x) * chi.eval_int(y)
                    );
                }
            }
        }
        // mod 121 the group has order 110
        let all = DirichletCharacter::all_characters(121).unwrap();
        assert_eq!(all.len(), 110);
        let orders: std::collections::BTreeSet<u64> = all.iter().map(|c| c.order()).collect();
        assert!(orders.contains(&11) && orders.contains(&110));
    }

    #[test]
    fn sqrt_even_is_deterministic_and_conductor_preserving() {
        for exp in [2u64, 4, 6, 8] {
            let chi = DirichletCharacter::from_exponents(11, &[exp]).unwrap();
            assert!(chi.is_even());
            let psi = sqrt_even_character(&chi).unwrap();
            assert_eq!(psi.mul(&psi), chi);
            assert_eq!(psi.conductor(), chi.conductor());
            assert_eq!(psi, sqrt_even_character(&chi).unwrap());
        }
        // trivial root of the trivial character
        let triv = DirichletCharacter::trivial(11).unwrap();
        assert!(sqrt_even_character(&triv).unwrap().is_trivial());
        // an order-55 character mod 121 is even with conductor 121
        let chi = DirichletCharacter::from_exponents(121, &[2]).unwrap();
        assert_eq!(chi.order(), 55);
        assert!(chi.is_even());
        let psi = sqrt_even_character(&chi).unwrap();
        assert_eq!(psi.mul(&psi), chi);
        assert_eq!(psi.conductor(), 121);
    }

    #[test]
    fn adelic_normalization() {
        let psi = DirichletCharacter::from_exponents(11, &[1]).unwrap();
        let h = AdelicCharacter::new(psi.clone());
        for q in [2u64, 3, 5, 7, 13] {
            let w = h.at_uniformizer(q).unwrap();
            assert_eq!(w * psi.eval_int(q as i64), Cyc::from_int(1));
        }
        assert!(h.at_uniformizer(11).is_err());
        // a principal idele evaluates trivially: v_q(x) exponents plus the
        // unit residue of x at the modulus cancel
        let x = 7i64; // x = 7: uniformizer exponent 1 at 7, unit residue 7
        let val = h.eval_finite(&[(7, 1)], x).unwrap();
        assert_eq!(val, Cyc::from_int(1));
    }

    fn random_local_units(order: &SpecialOrder, q: u64, n: usize, seed: u64) -> Vec<Quat> {
        // deterministic LCG over small coordinates in the order basis
        let basis = order.lattice.basis();
        let mut state = seed;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) % 7) as i64 - 3
        };
        let mut out = Vec::new();
        while out.len() < n {
            let mut x = Quat::zero();
            for b in &basis {
                let c = next();
                x = &x + &b.scale(&ring::rat_int(c));
            }
            if ring::valuation_rat(&order.alg.nrd(&x), q) == 0 {
                out.push(x);
            }
        }
        out
    }

    #[test]
    fn trivial_character_lifts_trivially() {
        let order = SpecialOrder::build(11, 1, 2, LClass::Ramified).unwrap();
        let chi = DirichletCharacter::trivial(1).unwrap();
        let lift = lift_character(&order, &chi).unwrap();
        assert!(lift.is_trivial());
        for u in random_local_units(&order, 11, 5, 7) {
            assert_eq!(lift.eval(&u).unwrap(), Cyc::from_int(1));
        }
    }

    #[test]
    fn residue_lift_unramified_is_multiplicative() {
        // maximal order at l = 11: residue field F_121
        let order = SpecialOrder::build(11, 1, 1, LClass::Unramified).unwrap();
        let chi = DirichletCharacter::from_exponents(11, &[1]).unwrap();
        assert!(chi.is_odd());
        let lift = lift_character(&order, &chi).unwrap();
        assert_eq!(lift.locals().len(), 1);
        assert_eq!(lift.locals()[0].case_label(), "3i");
        let us = random_local_units(&order, 11, 8, 11);
        for a in &us {
            for b in &us {
                let ab = order.alg.mul(a, b);
                assert_eq!(
                    lift.eval(&ab).unwrap(),
                    lift.eval(a).unwrap() * lift.eval(b).unwrap()
                );
            }
            // scalar compatibility: chi~(z a) = chi(z) chi~(a)
            for z in [2i64, 3, 7] {
                let za = a.scale(&ring::rat_int(z));
                assert_eq!(
                    lift.eval(&za).unwrap(),
                    chi.eval_int(z) * lift.eval(a).unwrap()
                );
            }
            // values land in mu_120
            assert_eq!(lift.value_order(), 120);
        }
    }

    #[test]
    fn residue_lift_ramified_and_norm_lift() {
        let order = SpecialOrder::build(11, 1, 2, LClass::Ramified).unwrap();
        // odd character: residue-field case through F_11
        let chi = DirichletCharacter::from_exponents(11, &[3]).unwrap();
        assert!(chi.is_odd());
        let lift = lift_character(&order, &chi).unwrap();
        assert_eq!(lift.locals()[0].case_label(), "3i");
        let us = random_local_units(&order, 11, 6, 3);
        for a in &us {
            for b in &us {
                let ab = order.alg.mul(a, b);
                assert_eq!(
                    lift.eval(&ab).unwrap(),
                    lift.eval(a).unwrap() * lift.eval(b).unwrap()
                );
            }
            for z in [2i64, 5] {
                let za = a.scale(&ring::rat_int(z));
                assert_eq!(
                    lift.eval(&za).unwrap(),
                    chi.eval_int(z) * lift.eval(a).unwrap()
                );
            }
        }
        // even character: norm case
        let chi = DirichletCharacter::from_exponents(11, &[2]).unwrap();
        assert!(chi.is_even());
        let lift = lift_character(&order, &chi).unwrap();
        assert_eq!(lift.locals()[0].case_label(), "3ii");
        for a in &us {
            for z in [2i64, 3] {
                let za = a.scale(&ring::rat_int(z));
                assert_eq!(
                    lift.eval(&za).unwrap(),
                    chi.eval_int(z) * lift.eval(a).unwrap()
                );
            }
        }
    }

    #[test]
    fn eichler_lift_and_assumption_failures() {
        let order = SpecialOrder::build(11, 3, 1, LClass::Unramified).unwrap();
        let chi = DirichletCharacter::quadratic(3).unwrap();
        let lift = lift_character(&order, &chi).unwrap();
        let tags: Vec<&str> = lift.locals().iter().map(|l| l.case_label()).collect();
        assert_eq!(tags, vec!["2", "1"]); // q = 3 Eichler, l = 11 trivial
        let us = random_local_units(&order, 3, 6, 19);
        for a in &us {
            if ring::valuation_rat(&order.alg.nrd(a), 3) != 0 {
                continue;
            }
            for b in &us {
                let ab = order.alg.mul(a, b);
                assert_eq!(
                    lift.eval(&ab).unwrap(),
                    lift.eval(a).unwrap() * lift.eval(b).unwrap()
                );
            }
            for z in [2i64, 5] {
                let za = a.scale(&ring::rat_int(z));
                assert_eq!(
                    lift.eval(&za).unwrap(),
                    chi.eval_int(z) * lift.eval(a).unwrap()
                );
            }
        }
        // conductor exceeding the aux exponent names the prime
        let bad = DirichletCharacter::from_exponents(9, &[1]).unwrap();
        let err = lift_character(&order, &bad).unwrap_err();
        assert!(format!("{err}").contains("q = 3"));
        // conductor prime away from the level
        let bad = DirichletCharacter::quadratic(5).unwrap();
        let err = lift_character(&order, &bad).unwrap_err();
        assert!(format!("{err}").contains('5'));
        // l-exponent too small for a ramified-class order
        let order2 = SpecialOrder::build(11, 1, 2, LClass::Ramified).unwrap();
        let bad = DirichletCharacter::from_exponents(121, &[1]).unwrap();
        let err = lift_character(&order2, &bad).unwrap_err();
        assert!(format!("{err}").contains("m = 2"));
    }

    #[test]
    fn composite_lift_on_a_deep_order() {
        // m = 4 carries conductor 121 characters of odd parity
        let order = SpecialOrder::build(11, 1, 4, LClass::Ramified).unwrap();
        let chi = DirichletCharacter::from_exponents(121, &[1]).unwrap();
        assert!(chi.is_odd());
        assert_eq!(chi.conductor(), 121);
        let lift = lift_character(&order, &chi).unwrap();
        assert_eq!(lift.locals()[0].case_label(), "3iii");
        let us = random_local_units(&order, 11, 5, 23);
        for a in &us {
            for b in &us {
                let ab = order.alg.mul(a, b);
                assert_eq!(
                    lift.eval(&ab).unwrap(),
                    lift.eval(a).unwrap() * lift.eval(b).unwrap()
                );
            }
            for z in [2i64, 7] {
                let za = a.scale(&ring::rat_int(z));
                assert_eq!(
                    lift.eval(&za).unwrap(),
                    chi.eval_int(z) * lift.eval(a).unwrap()
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn characters_are_multiplicative(
            mi in 0usize..5,
            exps in proptest::collection::vec(0u64..64, 2),
            x in 1i64..300,
            y in 1i64..300,
        ) {
            let modulus = [9u64, 11, 15, 33, 121][mi];
            let fac = ring::factor(modulus);
            let chi = DirichletCharacter::from_exponents(
                modulus,
                &exps[..fac.len()],
            ).unwrap();
            prop_assert_eq!(chi.eval_int(1), Cyc::from_int(1));
            prop_assert_eq!(
                chi.eval_int(x * y),
                chi.eval_int(x) * chi.eval_int(y)
            );
            let ci = chi.inv();
            if chi.eval_int(x) != Cyc::from_int(0) {
                prop_assert_eq!(chi.eval_int(x) * ci.eval_int(x), Cyc::from_int(1));
            }
        }
    }
}
