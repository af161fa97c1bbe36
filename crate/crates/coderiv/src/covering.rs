//! Covering-constant estimation.
//!
//! The covering constant at a base point is the sup over ball radii η of
//! the infimum of ‖coderivative action‖ over points of the ball and unit
//! dual vectors. For the planar map the inner infimum is identically 1 at
//! every nonzero point (the derivative's singular values are {1, 2}
//! everywhere), so the estimate is 1 at every center — including the
//! origin, where the empty coderivative set simply contributes nothing.
//! The blockwise map behaves the same way once dual vectors are restricted
//! to the admissible subspace at degenerate points. For the shared-norm
//! map the infimum genuinely varies with the point and the estimator
//! reports the spectral value at the ladder bottom.
//!
//! Two strategies are provided: SPECTRAL reads the smallest singular value
//! of the derivative (restricted to the admissible subspace where needed);
//! DEFINITIONAL minimizes the sampled action norm over unit dual vectors
//! and over-estimates the infimum by a gap that shrinks with the sample
//! count.

use crate::analytic;
use crate::error::{Error, Result};
use crate::mappings::{self, MapId};
use crate::matrix::{Mat2, Mat4};
use crate::point::{Point2, Point4};
use crate::sampling;

/// Estimation strategy for the inner infimum over unit dual vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Smallest singular value of the derivative matrix.
    Spectral,
    /// Minimum of the action norm over sampled unit dual vectors.
    Definitional,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Spectral => write!(f, "spectral"),
            Method::Definitional => write!(f, "definitional"),
        }
    }
}

/// Constraint on the dual vectors entering the infimum at a given point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YConstraint {
    /// All unit dual vectors.
    FullSphere,
    /// Dual vectors whose block `zero_block` vanishes: the admissible
    /// subspace at a degenerate point of the blockwise map.
    AdmissibleSubspace { zero_block: usize },
    /// The locus `y1·z1·z2 = y2·(z1² − z2²)/2` (blockwise for the
    /// four-dimensional maps) on which the action norm equals ‖y‖ exactly.
    EqualityLocus,
}

/// Structured output of the covering estimator.
#[derive(Debug, Clone)]
pub struct CoveringEstimate {
    pub map: MapId,
    pub center: Vec<f64>,
    /// Image of the center under the map.
    pub image: Vec<f64>,
    /// Ball radii, strictly decreasing.
    pub etas: Vec<f64>,
    /// Sampled infimum per radius, aligned with `etas`. Enforced
    /// non-increasing in the radius: samples of the smaller balls also lie
    /// in the larger ones and are folded into their infima.
    pub inf_per_eta: Vec<f64>,
    /// The reported estimate: the maximum of `inf_per_eta`, attained at
    /// the ladder bottom.
    pub estimate: f64,
    pub method: Method,
    pub z_samples_per_eta: usize,
    pub y_samples_per_z: usize,
    /// Sampled points whose coderivative set admits no unit dual vector
    /// (the origin for all three maps, by exclusion or by scope).
    pub skipped_points: usize,
}

/// Smallest singular value of a 2×2 derivative matrix (closed form).
pub fn sigma_min2(m: &Mat2) -> f64 {
    m.sigma_min()
}

/// Smallest singular value of a 4×4 derivative matrix (Jacobi iteration on
/// the Gram matrix).
pub fn sigma_min4(m: &Mat4) -> f64 {
    m.sigma_min()
}

/// The unit dual vector on the equality locus at `z ≠ 0`: the image
/// direction `f(z)/‖z‖`. On it the coderivative action has norm exactly
/// ‖y‖, which realizes the inner infimum.
pub fn equality_locus_y(z: Point2) -> Result<Point2> {
    if z.is_origin() {
        return Err(Error::domain("the equality locus is undefined at the origin"));
    }
    Ok(mappings::eval_f(z).scale(1.0 / z.norm()))
}

/// Blockwise equality-locus dual vector for the blockwise map: each nonzero
/// block contributes its planar locus direction, weighted to unit norm; a
/// zero block gets a zero dual block.
pub fn equality_locus_y_g(z: Point4) -> Result<Point4> {
    let (b1, b2) = (z.block1(), z.block2());
    match (b1.is_origin(), b2.is_origin()) {
        (true, true) => Err(Error::domain("the equality locus is undefined at the origin")),
        (false, true) => Ok(Point4::from_blocks(equality_locus_y(b1)?, Point2::ORIGIN)),
        (true, false) => Ok(Point4::from_blocks(Point2::ORIGIN, equality_locus_y(b2)?)),
        (false, false) => {
            let w = std::f64::consts::FRAC_1_SQRT_2;
            Ok(Point4::from_blocks(
                equality_locus_y(b1)?.scale(w),
                equality_locus_y(b2)?.scale(w),
            ))
        }
    }
}

/// The dual-vector constraint in force at `z`, or `None` when the point
/// contributes nothing to the infimum (empty coderivative set for every
/// unit dual vector, or outside the analyzed region).
pub fn admissible_constraint(map: MapId, z: &[f64]) -> Option<YConstraint> {
    match map {
        MapId::F2 => {
            let z = Point2::new(z[0], z[1]);
            if z.is_origin() {
                None
            } else {
                Some(YConstraint::FullSphere)
            }
        }
        MapId::G4 => {
            let z = Point4::new(z[0], z[1], z[2], z[3]);
            match (z.block1().is_origin(), z.block2().is_origin()) {
                (true, true) => None,
                (true, false) => Some(YConstraint::AdmissibleSubspace { zero_block: 0 }),
                (false, true) => Some(YConstraint::AdmissibleSubspace { zero_block: 1 }),
                (false, false) => Some(YConstraint::FullSphere),
            }
        }
        MapId::H4 => {
            let z = Point4::new(z[0], z[1], z[2], z[3]);
            if z.is_origin() {
                None
            } else {
                Some(YConstraint::FullSphere)
            }
        }
    }
}

fn validate_etas(etas: &[f64]) -> Result<()> {
    if etas.is_empty() {
        return Err(Error::config("empty eta ladder"));
    }
    if etas.iter().any(|e| *e <= 0.0 || !e.is_finite()) {
        return Err(Error::config("etas must be positive and finite"));
    }
    for w in etas.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::config("etas must be strictly decreasing"));
        }
    }
    Ok(())
}

/// Default eta ladder 1e−1 … 1e−6.
pub fn default_etas() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

/// Infimum of the action norm over admissible unit dual vectors at one
/// point, or `None` when the point contributes nothing.
fn point_infimum(
    map: MapId,
    z: &[f64],
    method: Method,
    y_samples: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Option<f64> {
    let constraint = admissible_constraint(map, z)?;
    match map {
        MapId::F2 => {
            let jac = analytic::jacobian_f(Point2::new(z[0], z[1])).ok()?;
            Some(match method {
                Method::Spectral => jac.sigma_min(),
                Method::Definitional => min_action_2(&jac, y_samples, rng),
            })
        }
        MapId::G4 => match constraint {
            YConstraint::FullSphere => {
                let jac =
                    analytic::jacobian_g(Point4::new(z[0], z[1], z[2], z[3])).ok()?;
                Some(match method {
                    Method::Spectral => jac.sigma_min(),
                    Method::Definitional => min_action_4(&jac, y_samples, rng),
                })
            }
            YConstraint::AdmissibleSubspace { zero_block } => {
                // Only the surviving block acts; on the admissible subspace
                // the infimum is the surviving block's smallest singular
                // value.
                let p = Point4::new(z[0], z[1], z[2], z[3]);
                let surviving = if zero_block == 0 { p.block2() } else { p.block1() };
                let jac = analytic::jacobian_f(surviving).ok()?;
                Some(match method {
                    Method::Spectral => jac.sigma_min(),
                    Method::Definitional => min_action_2(&jac, y_samples, rng),
                })
            }
            YConstraint::EqualityLocus => unreachable!("not an admissibility constraint"),
        },
        MapId::H4 => {
            let jac = analytic::jacobian_h(Point4::new(z[0], z[1], z[2], z[3])).ok()?;
            Some(match method {
                Method::Spectral => jac.sigma_min(),
                Method::Definitional => min_action_4(&jac, y_samples, rng),
            })
        }
    }
}

/// Inner infimum of the action norm at a single point under an explicit
/// dual-vector constraint. The full sphere and the admissible subspace are
/// resolved spectrally; the equality locus is evaluated at its witness
/// direction, where the action norm is exactly one for the planar and
/// blockwise maps.
pub fn constrained_infimum(map: MapId, z: &[f64], constraint: YConstraint) -> Result<f64> {
    if z.len() != map.dim() {
        return Err(Error::config("point arity does not match the map"));
    }
    match (map, constraint) {
        (MapId::F2, YConstraint::FullSphere) => {
            Ok(analytic::jacobian_f(Point2::new(z[0], z[1]))?.sigma_min())
        }
        (MapId::F2, YConstraint::EqualityLocus) => {
            let p = Point2::new(z[0], z[1]);
            let y = equality_locus_y(p)?;
            Ok(analytic::jacobian_f(p)?.apply(y).norm())
        }
        (MapId::G4, YConstraint::FullSphere) => Ok(analytic::jacobian_g(Point4::new(
            z[0], z[1], z[2], z[3],
        ))?
        .sigma_min()),
        (MapId::G4, YConstraint::AdmissibleSubspace { zero_block }) => {
            let p = Point4::new(z[0], z[1], z[2], z[3]);
            let surviving = if zero_block == 0 { p.block2() } else { p.block1() };
            Ok(analytic::jacobian_f(surviving)?.sigma_min())
        }
        (MapId::G4, YConstraint::EqualityLocus) => {
            let p = Point4::new(z[0], z[1], z[2], z[3]);
            let y = equality_locus_y_g(p)?;
            match coderiv_action_g(p, y) {
                Some(x) => Ok(x.norm()),
                None => Err(Error::domain("empty coderivative set at this point")),
            }
        }
        (MapId::H4, YConstraint::FullSphere) => Ok(analytic::jacobian_h(Point4::new(
            z[0], z[1], z[2], z[3],
        ))?
        .sigma_min()),
        _ => Err(Error::config("constraint does not apply to this map")),
    }
}

fn coderiv_action_g(z: Point4, y: Point4) -> Option<Point4> {
    analytic::coderivative_g(z, y).unique()
}

fn min_action_2(jac: &Mat2, samples: usize, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let mut best = f64::INFINITY;
    for d in sampling::unit_circle(samples, rng) {
        let x = jac.apply(Point2::new(d[0], d[1]));
        best = best.min(x.norm_sq());
    }
    best.sqrt()
}

fn min_action_4(jac: &Mat4, samples: usize, rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let d = sampling::unit_sphere::<4>(rng);
        let x = jac.apply(Point4::from_coords(d));
        best = best.min(x.norm_sq());
    }
    best.sqrt()
}

/// Sup-inf covering estimate at `center` for the selected map.
///
/// For each eta the sampled point set is the center itself, the axis
/// boundary points `center ± eta·e_i` (so degenerate strata with zero
/// coordinates are always probed), and `z_samples` uniform ball points.
/// Points with an empty admissible dual set are excluded from the infimum.
pub fn covering_estimate(
    map: MapId,
    center: &[f64],
    etas: &[f64],
    y_samples: usize,
    z_samples: usize,
    method: Method,
    seed: u64,
) -> Result<CoveringEstimate> {
    validate_etas(etas)?;
    if center.len() != map.dim() {
        return Err(Error::config(format!(
            "expected {} coordinates for map {}, got {}",
            map.dim(),
            map,
            center.len()
        )));
    }
    if y_samples < 32 || z_samples < 32 {
        return Err(Error::config("sample counts must be at least 32"));
    }
    if center.iter().any(|c| !c.is_finite()) {
        return Err(Error::config("non-finite center coordinate"));
    }

    let dim = map.dim();
    let mut inf_per_eta = Vec::with_capacity(etas.len());
    let mut skipped = 0usize;

    for (ei, &eta) in etas.iter().enumerate() {
        let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(z_samples + 2 * dim + 1);
        candidates.push(center.to_vec());
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut p = center.to_vec();
                p[i] += sign * eta;
                candidates.push(p);
            }
        }
        let mut zrng = sampling::stream(seed, &[0x20, ei as u64]);
        for _ in 0..z_samples {
            let p = match dim {
                2 => sampling::ball_point([center[0], center[1]], eta, &mut zrng).to_vec(),
                _ => sampling::ball_point(
                    [center[0], center[1], center[2], center[3]],
                    eta,
                    &mut zrng,
                )
                .to_vec(),
            };
            candidates.push(p);
        }

        let mut inf = f64::INFINITY;
        for (zi, z) in candidates.iter().enumerate() {
            let mut yrng = sampling::stream(seed, &[0x21, ei as u64, zi as u64]);
            match point_infimum(map, z, method, y_samples, &mut yrng) {
                Some(v) => inf = inf.min(v),
                None => skipped += 1,
            }
        }
        inf_per_eta.push(inf);
    }

    // Ball inclusion: every sample of a smaller ball lies in the larger
    // ones, so fold the small-ball infima into the large-ball entries.
    for i in (0..inf_per_eta.len().saturating_sub(1)).rev() {
        inf_per_eta[i] = inf_per_eta[i].min(inf_per_eta[i + 1]);
    }

    let estimate = inf_per_eta.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
    let image = map.eval_slice(center);
    Ok(CoveringEstimate {
        map,
        center: center.to_vec(),
        image,
        etas: etas.to_vec(),
        inf_per_eta,
        estimate,
        method,
        z_samples_per_eta: z_samples,
        y_samples_per_z: if method == Method::Definitional {
            y_samples
        } else {
            0
        },
        skipped_points: skipped,
    })
}

/// Closed-form upper bound for the covering constant of the shared-norm
/// map at special centers:
///
/// * one full block zero: the constant is 0;
/// * a single zero coordinate `i`: `2·|partner|³/‖z‖³` where `partner` is
///   the other coordinate of the same block (absolute values taken since
///   the constant is nonnegative; the tightest applicable bound is
///   returned when several coordinates vanish);
/// * all four coordinates of equal magnitude: `1/√2`;
/// * otherwise no closed form applies (`None`).
pub fn h_covering_bound(zbar: Point4) -> Result<Option<f64>> {
    if zbar.is_origin() {
        return Err(Error::domain("bounds are stated only away from the origin"));
    }
    if zbar.block1().is_origin() || zbar.block2().is_origin() {
        return Ok(Some(0.0));
    }
    let c = zbar.coords();
    let n3 = {
        let n = zbar.norm();
        n * n * n
    };
    let partner = [1usize, 0, 3, 2];
    let mut bounds: Vec<f64> = Vec::new();
    for i in 0..4 {
        if c[i] == 0.0 {
            let p = c[partner[i]].abs();
            bounds.push(2.0 * p * p * p / n3);
        }
    }
    if let Some(best) = bounds.iter().cloned().reduce(f64::min) {
        return Ok(Some(best));
    }
    let a = c[0].abs();
    if c.iter().all(|v| v.abs() == a) {
        return Ok(Some(std::f64::consts::FRAC_1_SQRT_2));
    }
    Ok(None)
}
