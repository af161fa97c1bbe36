//! Exact sparse multivariate polynomials over arbitrary-precision integers,
//! specialized to the eight symbols `y1..y4, z1..z4`.
//!
//! The purpose of this module is to prove, with zero numerical error, the
//! algebraic identities behind the covering analysis: the action-norm
//! expansion identity of the planar derivative, its blockwise analogue, and
//! the split norm identity of the shared-norm map. Each identity is stated
//! with denominators cleared so that both sides are integer polynomials,
//! and verified by exact cancellation of the difference.
//!
//! No general computer-algebra features (gcd, factorization) are provided;
//! the ring operations and a deterministic textual dump are all the
//! verification layer needs.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// The fixed variable set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Y1,
    Y2,
    Y3,
    Y4,
    Z1,
    Z2,
    Z3,
    Z4,
}

pub const VARS: [Var; 8] = [
    Var::Y1,
    Var::Y2,
    Var::Y3,
    Var::Y4,
    Var::Z1,
    Var::Z2,
    Var::Z3,
    Var::Z4,
];

const VAR_NAMES: [&str; 8] = ["y1", "y2", "y3", "y4", "z1", "z2", "z3", "z4"];

impl Var {
    fn idx(self) -> usize {
        match self {
            Var::Y1 => 0,
            Var::Y2 => 1,
            Var::Y3 => 2,
            Var::Y4 => 3,
            Var::Z1 => 4,
            Var::Z2 => 5,
            Var::Z3 => 6,
            Var::Z4 => 7,
        }
    }

    pub fn name(self) -> &'static str {
        VAR_NAMES[self.idx()]
    }
}

/// Per-variable exponent cap; products beyond it are refused rather than
/// wrapped.
pub const MAX_EXPONENT: u8 = 64;

/// Exponent vector over the fixed variable set, ordered graded
/// lexicographically (total degree first, then lexicographic on the
/// exponents).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Monomial {
    exps: [u8; 8],
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial { exps: [0; 8] }
    }

    pub fn var(v: Var) -> Monomial {
        let mut exps = [0; 8];
        exps[v.idx()] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[u8; 8] {
        &self.exps
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut exps = [0u8; 8];
        for i in 0..8 {
            let e = self.exps[i] as u32 + other.exps[i] as u32;
            if e > MAX_EXPONENT as u32 {
                return Err(Error::ExponentOverflow {
                    var: VAR_NAMES[i],
                    exponent: e,
                    max: MAX_EXPONENT as u32,
                });
            }
            exps[i] = e as u8;
        }
        Ok(Monomial { exps })
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in canonical form: no stored zero coefficients, terms
/// held in a sorted map so iteration order (and the textual dump) is
/// deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(c: i64) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::one(), BigInt::from(c));
        p
    }

    pub fn var(v: Var) -> Poly {
        let mut p = Poly::zero();
        p.add_term(Monomial::var(v), BigInt::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (*m, k * c)).collect(),
        }
    }

    /// Exact product; fails if any exponent would exceed [`MAX_EXPONENT`].
    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.checked_mul(m2)?, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Exact power by binary exponentiation; same overflow guard as
    /// [`Poly::checked_mul`].
    pub fn checked_pow(&self, mut n: u32) -> Result<Poly> {
        let mut result = Poly::constant(1);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Panicking power for expression building with statically small
    /// degrees.
    pub fn pow(&self, n: u32) -> Poly {
        self.checked_pow(n).expect("exponent overflow")
    }

    /// Set the given variables to zero: drop every term with a positive
    /// exponent in any of them.
    pub fn substitute_zero(&self, vars: &[Var]) -> Poly {
        let mut out = Poly::zero();
        'terms: for (m, c) in &self.terms {
            for v in vars {
                if m.exps[v.idx()] > 0 {
                    continue 'terms;
                }
            }
            out.add_term(*m, c.clone());
        }
        out
    }

    /// Floating-point evaluation at a full assignment, in variable order
    /// `y1..y4, z1..z4`. Used to sanity-check the identities numerically
    /// before the exact cancellation is trusted.
    pub fn eval(&self, vals: &[f64; 8]) -> f64 {
        let mut total = 0.0;
        for (m, c) in &self.terms {
            let mut t = bigint_to_f64(c);
            for i in 0..8 {
                if m.exps[i] > 0 {
                    t *= vals[i].powi(m.exps[i] as i32);
                }
            }
            total += t;
        }
        total
    }
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    // Identity coefficients are small; fall back to string parsing for
    // anything that does not fit an i128.
    match i128::try_from(c.clone()) {
        Ok(v) => v as f64,
        Err(_) => c.to_string().parse().unwrap_or(f64::NAN),
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        Poly::add(self, rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        Poly::sub(self, rhs)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("exponent overflow")
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.negate()
    }
}

impl fmt::Display for Poly {
    /// One term per line, leading term first (descending graded-lex), in
    /// the fixed format `coeff*y1^a*...*z4^h` with zero exponents omitted.
    /// Byte-stable across runs, suitable for golden files.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return writeln!(f, "0");
        }
        for (m, c) in self.terms.iter().rev() {
            write!(f, "{}", c)?;
            for i in 0..8 {
                if m.exps[i] > 0 {
                    write!(f, "*{}^{}", VAR_NAMES[i], m.exps[i])?;
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// The verified identities
// ---------------------------------------------------------------------------

fn sq(p: &Poly) -> Poly {
    p * p
}

/// Numerators of the planar coderivative action with the common denominator
/// `(z1² + z2²)^{3/2}` cleared:
///
/// ```text
/// X1 = y1·(z1² + 3·z2²)·z1 + 2·y2·z2³
/// X2 = −y1·(3·z1² + z2²)·z2 + 2·y2·z1³
/// ```
pub fn planar_action_numerators() -> (Poly, Poly) {
    let y1 = Poly::var(Var::Y1);
    let y2 = Poly::var(Var::Y2);
    let z1 = Poly::var(Var::Z1);
    let z2 = Poly::var(Var::Z2);
    let z1sq = sq(&z1);
    let z2sq = sq(&z2);
    let three = Poly::constant(3);
    let two = Poly::constant(2);

    let x1 = &(&(&y1 * &(&z1sq + &(&three * &z2sq))) * &z1) + &(&(&two * &y2) * &z2.pow(3));
    let x2 = &(&(&(-&y1) * &(&(&three * &z1sq) + &z2sq)) * &z2) + &(&(&two * &y2) * &z1.pow(3));
    (x1, x2)
}

fn block_action_numerators(
    y_a: Var,
    y_b: Var,
    z_a: Var,
    z_b: Var,
) -> (Poly, Poly) {
    let ya = Poly::var(y_a);
    let yb = Poly::var(y_b);
    let za = Poly::var(z_a);
    let zb = Poly::var(z_b);
    let zasq = sq(&za);
    let zbsq = sq(&zb);
    let three = Poly::constant(3);
    let two = Poly::constant(2);
    let x1 = &(&(&ya * &(&zasq + &(&three * &zbsq))) * &za) + &(&(&two * &yb) * &zb.pow(3));
    let x2 = &(&(&(-&ya) * &(&(&three * &zasq) + &zbsq)) * &zb) + &(&(&two * &yb) * &za.pow(3));
    (x1, x2)
}

fn block_sum_sq(z_a: Var, z_b: Var) -> Poly {
    let za = Poly::var(z_a);
    let zb = Poly::var(z_b);
    &sq(&za) + &sq(&zb)
}

/// The correction bracket `2·ya·za·zb − yb·(za² − zb²)` of one block.
fn block_correction(y_a: Var, y_b: Var, z_a: Var, z_b: Var) -> Poly {
    let ya = Poly::var(y_a);
    let yb = Poly::var(y_b);
    let za = Poly::var(z_a);
    let zb = Poly::var(z_b);
    let two = Poly::constant(2);
    &(&(&(&two * &ya) * &za) * &zb) - &(&yb * &(&sq(&za) - &sq(&zb)))
}

/// Both sides of the planar expansion identity with denominators cleared
/// (multiplied through by `(z1² + z2²)³`, absorbing the factor 1/4 of the
/// squared correction so all coefficients are integers):
///
/// ```text
/// X1² + X2²  =  (y1² + y2²)·S³ + 3·S·(2·y1·z1·z2 − y2·(z1² − z2²))²,
/// ```
///
/// where `S = z1² + z2²`.
pub fn planar_expansion_sides() -> (Poly, Poly) {
    let (x1, x2) = planar_action_numerators();
    let lhs = &sq(&x1) + &sq(&x2);
    let y_norm = &sq(&Poly::var(Var::Y1)) + &sq(&Poly::var(Var::Y2));
    let s = block_sum_sq(Var::Z1, Var::Z2);
    let corr = block_correction(Var::Y1, Var::Y2, Var::Z1, Var::Z2);
    let rhs = &(&y_norm * &s.pow(3)) + &(&(&Poly::constant(3) * &s) * &sq(&corr));
    (lhs, rhs)
}

/// Exact check of the planar expansion identity.
pub fn verify_planar_expansion_identity() -> bool {
    let (lhs, rhs) = planar_expansion_sides();
    lhs.sub(&rhs).is_zero()
}

/// Both sides of the blockwise expansion identity over all eight variables,
/// cleared blockwise (multiplied through by `S1³·S2³`):
///
/// ```text
/// (X1² + X2²)·S2³ + (X3² + X4²)·S1³
///   = ‖y‖²·S1³·S2³ + 3·S1·S2³·C1² + 3·S1³·S2·C2²,
/// ```
///
/// with `Ci` the block correction brackets.
pub fn blockwise_expansion_sides() -> (Poly, Poly) {
    let (x1, x2) = planar_action_numerators();
    let (x3, x4) = block_action_numerators(Var::Y3, Var::Y4, Var::Z3, Var::Z4);
    let s1 = block_sum_sq(Var::Z1, Var::Z2);
    let s2 = block_sum_sq(Var::Z3, Var::Z4);
    let lhs = &(&(&sq(&x1) + &sq(&x2)) * &s2.pow(3)) + &(&(&sq(&x3) + &sq(&x4)) * &s1.pow(3));

    let y_norm = VARS[..4]
        .iter()
        .map(|v| sq(&Poly::var(*v)))
        .fold(Poly::zero(), |acc, p| acc.add(&p));
    let c1 = block_correction(Var::Y1, Var::Y2, Var::Z1, Var::Z2);
    let c2 = block_correction(Var::Y3, Var::Y4, Var::Z3, Var::Z4);
    let three = Poly::constant(3);
    let rhs = &(&(&y_norm * &s1.pow(3)) * &s2.pow(3))
        + &(&(&(&(&three * &s1) * &s2.pow(3)) * &sq(&c1))
            + &(&(&(&three * &s1.pow(3)) * &s2) * &sq(&c2)));
    (lhs, rhs)
}

/// Exact check of the blockwise expansion identity.
pub fn verify_blockwise_expansion_identity() -> bool {
    let (lhs, rhs) = blockwise_expansion_sides();
    lhs.sub(&rhs).is_zero()
}

/// Both sides of the split norm identity of the shared-norm map, before
/// dividing by ‖x‖² (the map's input coordinates are represented by the
/// z-symbols):
///
/// ```text
/// (z1² − z2²)² + (2·z1·z2)² + (z3² − z4²)² + (2·z3·z4)²
///   = (z1² + z2²)² + (z3² + z4²)².
/// ```
pub fn block_norm_sides() -> (Poly, Poly) {
    let lhs = [
        (Var::Z1, Var::Z2),
        (Var::Z3, Var::Z4),
    ]
    .iter()
    .map(|(a, b)| {
        let pa = Poly::var(*a);
        let pb = Poly::var(*b);
        let diff = &sq(&pa) - &sq(&pb);
        let cross = &(&Poly::constant(2) * &pa) * &pb;
        &sq(&diff) + &sq(&cross)
    })
    .fold(Poly::zero(), |acc, p| acc.add(&p));
    let rhs = &sq(&block_sum_sq(Var::Z1, Var::Z2)) + &sq(&block_sum_sq(Var::Z3, Var::Z4));
    (lhs, rhs)
}

/// Exact check of the split norm identity.
pub fn verify_block_norm_identity() -> bool {
    let (lhs, rhs) = block_norm_sides();
    lhs.sub(&rhs).is_zero()
}
