//! Definition-level numerical machinery.
//!
//! Everything here works straight from the defining limits, independent of
//! the closed forms in [`crate::analytic`]: central-difference Jacobians,
//! the coderivative limit quotient, sampled upper estimates of its limsup,
//! residual probes along direction schedules, and the ray probes that
//! reproduce the origin non-differentiability arguments.
//!
//! They serve two roles: as oracles certifying the analytic layer, and as
//! violation detectors (a candidate adjoint image that fails the limsup
//! inequality is caught by sampling).

use crate::error::{Error, Result};
use crate::mappings::{self, MapId};
use crate::matrix::{Mat2, Mat4};
use crate::point::{Point2, Point4};
use crate::sampling;

fn eval2(x: [f64; 2]) -> [f64; 2] {
    mappings::eval_f(Point2::from_coords(x)).coords()
}

fn eval4(map: MapId, x: [f64; 4]) -> [f64; 4] {
    match map {
        MapId::G4 => mappings::eval_g(Point4::from_coords(x)).coords(),
        MapId::H4 => mappings::eval_h(Point4::from_coords(x)).coords(),
        MapId::F2 => unreachable!("planar map on 4-d input"),
    }
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot<const N: usize>(a: &[f64; N], b: &[f64; N]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// ---------------------------------------------------------------------------
// Finite-difference Jacobians
// ---------------------------------------------------------------------------

fn fd_jacobian_arrays<const N: usize>(
    map: impl Fn([f64; N]) -> [f64; N],
    z: [f64; N],
    step: f64,
) -> Result<[[f64; N]; N]> {
    if step <= 0.0 || !step.is_finite() {
        return Err(Error::config("finite-difference step must be positive"));
    }
    if norm(&z) <= 10.0 * step {
        return Err(Error::domain(
            "point too close to the origin for the requested step",
        ));
    }
    let mut jac = [[0.0; N]; N];
    for i in 0..N {
        let mut hi = z;
        let mut lo = z;
        hi[i] += step;
        lo[i] -= step;
        let fhi = map(hi);
        let flo = map(lo);
        for j in 0..N {
            // row i: partials with respect to coordinate i
            jac[i][j] = (fhi[j] - flo[j]) / (2.0 * step);
        }
    }
    Ok(jac)
}

/// Central-difference Jacobian of the planar map (gradient-per-row layout).
pub fn fd_jacobian_f(z: Point2, step: f64) -> Result<Mat2> {
    Ok(Mat2::new(fd_jacobian_arrays(eval2, z.coords(), step)?))
}

/// Central-difference Jacobian of the blockwise map.
pub fn fd_jacobian_g(z: Point4, step: f64) -> Result<Mat4> {
    Ok(Mat4::new(fd_jacobian_arrays(
        |x| eval4(MapId::G4, x),
        z.coords(),
        step,
    )?))
}

/// Central-difference Jacobian of the shared-norm map.
pub fn fd_jacobian_h(z: Point4, step: f64) -> Result<Mat4> {
    Ok(Mat4::new(fd_jacobian_arrays(
        |x| eval4(MapId::H4, x),
        z.coords(),
        step,
    )?))
}

// ---------------------------------------------------------------------------
// Coderivative quotient and limsup estimation
// ---------------------------------------------------------------------------

fn quotient_arrays<const N: usize>(
    map: &impl Fn([f64; N]) -> [f64; N],
    z: [f64; N],
    x: [f64; N],
    y: [f64; N],
    u: [f64; N],
) -> Result<f64> {
    if u == z {
        return Err(Error::domain("the quotient is undefined at u = z"));
    }
    let fu = map(u);
    let fz = map(z);
    let mut du = [0.0; N];
    let mut df = [0.0; N];
    for i in 0..N {
        du[i] = u[i] - z[i];
        df[i] = fu[i] - fz[i];
    }
    Ok((dot(&x, &du) - dot(&y, &df)) / (norm(&du) + norm(&df)))
}

fn check_arity(map: MapId, slices: &[&[f64]]) -> Result<()> {
    for s in slices {
        if s.len() != map.dim() {
            return Err(Error::config(format!(
                "expected {} coordinates for map {}, got {}",
                map.dim(),
                map,
                s.len()
            )));
        }
    }
    Ok(())
}

/// The defining quotient of the coderivative at `(z, y)` evaluated at a
/// probe point `u`:
///
/// ```text
/// (⟨x, u−z⟩ − ⟨y, m(u)−m(z)⟩) / (‖u−z‖ + ‖m(u)−m(z)‖).
/// ```
///
/// `x` belongs to the coderivative set exactly when the limsup of this
/// quotient as `u → z` is ≤ 0.
pub fn coderiv_quotient(map: MapId, z: &[f64], x: &[f64], y: &[f64], u: &[f64]) -> Result<f64> {
    check_arity(map, &[z, x, y, u])?;
    match map {
        MapId::F2 => quotient_arrays(
            &eval2,
            [z[0], z[1]],
            [x[0], x[1]],
            [y[0], y[1]],
            [u[0], u[1]],
        ),
        _ => quotient_arrays(
            &|v| eval4(map, v),
            [z[0], z[1], z[2], z[3]],
            [x[0], x[1], x[2], x[3]],
            [y[0], y[1], y[2], y[3]],
            [u[0], u[1], u[2], u[3]],
        ),
    }
}

fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::config("empty radius ladder"));
    }
    for w in radii.windows(2) {
        if w[1] >= w[0] {
            return Err(Error::config("radii must be strictly decreasing"));
        }
    }
    if radii.iter().any(|r| *r <= 0.0 || !r.is_finite()) {
        return Err(Error::config("radii must be positive and finite"));
    }
    Ok(())
}

/// Geometric default ladder 1e−1, 1e−2, …, 1e−6: spans the regime where the
/// first-order terms of the probes dominate without hitting cancellation.
pub fn default_radii() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

fn limsup_profile_arrays<const N: usize>(
    map: &impl Fn([f64; N]) -> [f64; N],
    z: [f64; N],
    x: [f64; N],
    y: [f64; N],
    radii: &[f64],
    dirs_per_radius: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    validate_radii(radii)?;
    if dirs_per_radius < 8 {
        return Err(Error::config("need at least 8 directions per radius"));
    }
    let mut profile = Vec::with_capacity(radii.len());
    for (ri, &r) in radii.iter().enumerate() {
        let mut rng = sampling::stream(seed, &[0x11, ri as u64]);
        let mut sup = f64::NEG_INFINITY;
        for d in sampling::unit_dirs::<N>(dirs_per_radius, &mut rng) {
            let mut u = z;
            for (ui, di) in u.iter_mut().zip(d) {
                *ui += r * di;
            }
            sup = sup.max(quotient_arrays(map, z, x, y, u)?);
        }
        profile.push(sup);
    }
    Ok(profile)
}

/// Per-radius maxima of the coderivative quotient over sampled sphere
/// directions around `z`. The coarse rungs are diagnostics; the limit
/// estimate reads off the finest rungs.
pub fn limsup_profile(
    map: MapId,
    z: &[f64],
    x: &[f64],
    y: &[f64],
    radii: &[f64],
    dirs_per_radius: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    check_arity(map, &[z, x, y])?;
    match map {
        MapId::F2 => limsup_profile_arrays(
            &eval2,
            [z[0], z[1]],
            [x[0], x[1]],
            [y[0], y[1]],
            radii,
            dirs_per_radius,
            seed,
        ),
        _ => limsup_profile_arrays(
            &|v| eval4(map, v),
            [z[0], z[1], z[2], z[3]],
            [x[0], x[1], x[2], x[3]],
            [y[0], y[1], y[2], y[3]],
            radii,
            dirs_per_radius,
            seed,
        ),
    }
}

/// Empirical upper estimate of the limsup: the sampled maximum over the two
/// finest radii of the ladder. (The coarse spheres carry O(r) terms that
/// would mask the limit.)
pub fn limsup_estimate(
    map: MapId,
    z: &[f64],
    x: &[f64],
    y: &[f64],
    radii: &[f64],
    dirs_per_radius: usize,
    seed: u64,
) -> Result<f64> {
    let profile = limsup_profile(map, z, x, y, radii, dirs_per_radius, seed)?;
    let tail = &profile[profile.len().saturating_sub(2)..];
    Ok(tail.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v)))
}

/// Membership verdict for `x ∈ D*m(z)(y)`: passes when the sampled maxima
/// at the two finest radii stay below `tol`.
#[allow(clippy::too_many_arguments)]
pub fn membership_passes(
    map: MapId,
    z: &[f64],
    x: &[f64],
    y: &[f64],
    radii: &[f64],
    dirs_per_radius: usize,
    seed: u64,
    tol: f64,
) -> Result<bool> {
    let profile = limsup_profile(map, z, x, y, radii, dirs_per_radius, seed)?;
    let tail = &profile[profile.len().saturating_sub(2)..];
    Ok(tail.iter().all(|v| *v <= tol))
}

// ---------------------------------------------------------------------------
// Direction schedules and residual probes
// ---------------------------------------------------------------------------

/// How probe points approach the base point along a schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum Parametrization<const N: usize> {
    /// `u(r) = z + r·direction`.
    Radial,
    /// `u(r) = z + r·direction + r²·deviation`: a curved approach used to
    /// probe direction-dependent behavior beyond straight rays.
    CustomCurve { deviation: [f64; N] },
}

/// A probe schedule: one approach direction and a decreasing radius ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionSchedule<const N: usize> {
    direction: [f64; N],
    radii: Vec<f64>,
    parametrization: Parametrization<N>,
}

pub type DirectionSchedule2 = DirectionSchedule<2>;
pub type DirectionSchedule4 = DirectionSchedule<4>;

impl<const N: usize> DirectionSchedule<N> {
    /// Radial schedule. The direction must be unit within 1e−12 and the
    /// radii strictly decreasing and positive.
    pub fn radial(direction: [f64; N], radii: Vec<f64>) -> Result<Self> {
        Self::with_parametrization(direction, radii, Parametrization::Radial)
    }

    pub fn with_parametrization(
        direction: [f64; N],
        radii: Vec<f64>,
        parametrization: Parametrization<N>,
    ) -> Result<Self> {
        validate_radii(&radii)?;
        if (norm(&direction) - 1.0).abs() > 1e-12 {
            return Err(Error::config("schedule direction must be a unit vector"));
        }
        Ok(DirectionSchedule {
            direction,
            radii,
            parametrization,
        })
    }

    pub fn direction(&self) -> [f64; N] {
        self.direction
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    fn point_at(&self, z: [f64; N], r: f64) -> [f64; N] {
        let mut u = z;
        for i in 0..N {
            u[i] += r * self.direction[i];
            if let Parametrization::CustomCurve { deviation } = &self.parametrization {
                u[i] += r * r * deviation[i];
            }
        }
        u
    }
}

/// Values of a probe along a schedule, with a two-point extrapolation of
/// the limit and a convergence flag.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    /// One value per schedule radius, coarsest first.
    pub values: Vec<f64>,
    /// Two-point (Richardson) extrapolation from the finest radii.
    pub extrapolated_limit: f64,
    /// Whether the two finest values agree to 1e−4 relative to the
    /// sequence's own scale (1e−8 absolute near zero); this covers both
    /// stationary probes and probes decaying linearly to zero down a
    /// ratio-ten ladder.
    pub converged: bool,
}

fn finish_report(values: Vec<f64>) -> ProbeReport {
    let n = values.len();
    let (limit, converged) = if n >= 2 {
        let (v1, v2) = (values[n - 2], values[n - 1]);
        let diff = (v1 - v2).abs();
        let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let converged = diff < 1e-4 * scale.max(1e-30) || diff < 1e-8;
        // assumes value(r) = L + c·r down the ratio-ten ladder; exact for
        // constant sequences
        (v2 + (v2 - v1) * 1.0 / 9.0, converged)
    } else {
        (values[0], false)
    };
    ProbeReport {
        values,
        extrapolated_limit: limit,
        converged,
    }
}

fn residual_probe_arrays<const N: usize>(
    map: &impl Fn([f64; N]) -> [f64; N],
    z: [f64; N],
    candidate: &[[f64; N]; N],
    schedule: &DirectionSchedule<N>,
) -> ProbeReport {
    let fz = map(z);
    let values = schedule
        .radii
        .iter()
        .map(|&r| {
            let u = schedule.point_at(z, r);
            let fu = map(u);
            let mut res = [0.0; N];
            let mut du = [0.0; N];
            for i in 0..N {
                du[i] = u[i] - z[i];
            }
            // first-order model: row vector (u−z) times the candidate
            for (j, r) in res.iter_mut().enumerate() {
                let lin: f64 = (0..N).map(|i| du[i] * candidate[i][j]).sum();
                *r = fu[j] - fz[j] - lin;
            }
            norm(&res) / norm(&du)
        })
        .collect();
    finish_report(values)
}

/// First-order residual `‖m(u) − m(z) − (u−z)·candidate‖ / ‖u−z‖` along a
/// schedule. A nonzero extrapolated limit certifies that `candidate` is not
/// the derivative of the planar map at `z` along that approach.
pub fn frechet_residual_probe_f(
    z: Point2,
    candidate: &Mat2,
    schedule: &DirectionSchedule2,
) -> ProbeReport {
    residual_probe_arrays(&eval2, z.coords(), candidate.entries(), schedule)
}

/// As [`frechet_residual_probe_f`], for the blockwise map.
pub fn frechet_residual_probe_g(
    z: Point4,
    candidate: &Mat4,
    schedule: &DirectionSchedule4,
) -> ProbeReport {
    residual_probe_arrays(
        &|v| eval4(MapId::G4, v),
        z.coords(),
        candidate.entries(),
        schedule,
    )
}

/// As [`frechet_residual_probe_f`], for the shared-norm map.
pub fn frechet_residual_probe_h(
    z: Point4,
    candidate: &Mat4,
    schedule: &DirectionSchedule4,
) -> ProbeReport {
    residual_probe_arrays(
        &|v| eval4(MapId::H4, v),
        z.coords(),
        candidate.entries(),
        schedule,
    )
}

/// The refutation schedule for a derivative candidate of the planar map at
/// the origin, together with the norm of the residual limit it produces.
///
/// With `a = candidate[0][0]`, `b = candidate[0][1]`: for `a ≠ 0` the
/// approach `u = (−a·t, 0)` yields the residual limit `(1 + |a|, ±b)`; for
/// `a = 0` the approach `u1 ↓ 0` yields `(1, ±b)`. Either way the norm is
/// at least one, so no matrix can be the derivative there.
pub fn origin_refutation_schedule_f(
    candidate: &Mat2,
    radii: Vec<f64>,
) -> Result<(DirectionSchedule2, f64)> {
    let a = candidate.entry(0, 0);
    let b = candidate.entry(0, 1);
    let (dir, predicted) = if a != 0.0 {
        ([-a.signum(), 0.0], (1.0 + a.abs()).hypot(b))
    } else {
        ([1.0, 0.0], 1.0_f64.hypot(b))
    };
    Ok((DirectionSchedule::radial(dir, radii)?, predicted))
}

/// The analogous refutation schedule for the blockwise map at a point with
/// a zero block: the probe moves inside the zero block only.
pub fn origin_refutation_schedule_g(
    z: Point4,
    candidate: &Mat4,
    radii: Vec<f64>,
) -> Result<(DirectionSchedule4, f64)> {
    let (probe_axis, row) = if z.block1().is_origin() {
        (0, 0)
    } else if z.block2().is_origin() {
        (2, 2)
    } else {
        return Err(Error::domain(
            "refutation schedule requires a zero block",
        ));
    };
    let a = candidate.entry(row, probe_axis);
    let mut dir = [0.0; 4];
    let mut tail_sq = 0.0;
    for j in 0..4 {
        if j != probe_axis {
            tail_sq += candidate.entry(row, j) * candidate.entry(row, j);
        }
    }
    let predicted = if a != 0.0 {
        dir[probe_axis] = -a.signum();
        ((1.0 + a.abs()) * (1.0 + a.abs()) + tail_sq).sqrt()
    } else {
        dir[probe_axis] = 1.0;
        (1.0 + tail_sq).sqrt()
    };
    Ok((DirectionSchedule::radial(dir, radii)?, predicted))
}

// ---------------------------------------------------------------------------
// Directional slopes of the planar map
// ---------------------------------------------------------------------------

/// Difference quotients of the planar map along the second coordinate:
/// `( (f1(z1, z2+s) − f1(z))/s , (f2(z1, z2+s) − f2(z))/s )`.
pub fn second_coordinate_slopes(z: Point2, s: f64) -> Result<(f64, f64)> {
    if z.is_origin() {
        return Err(Error::domain("slopes are undefined at the origin"));
    }
    if s == 0.0 || !s.is_finite() {
        return Err(Error::config("slope step must be nonzero and finite"));
    }
    let shifted = Point2::new(z.c1(), z.c2() + s);
    if shifted.is_origin() {
        return Err(Error::domain("shifted point coincides with the origin"));
    }
    let fz = mappings::eval_f(z);
    let fs = mappings::eval_f(shifted);
    Ok(((fs.c1() - fz.c1()) / s, (fs.c2() - fz.c2()) / s))
}

/// Closed-form limits of [`second_coordinate_slopes`] as `s ↓ 0`:
///
/// ```text
/// A = −(z1² − z2²)·z2/D − 2·z2/√S,
/// B = −2·z1·z2²/D + 2·z1/√S,       S = z1² + z2², D = S·√S,
/// ```
///
/// which together form the gradient row of the map with respect to the
/// second coordinate.
pub fn second_coordinate_slope_limits(z: Point2) -> Result<(f64, f64)> {
    if z.is_origin() {
        return Err(Error::domain("slopes are undefined at the origin"));
    }
    let (z1, z2) = (z.c1(), z.c2());
    let s = z1 * z1 + z2 * z2;
    let d = s * s.sqrt();
    let a = -(z1 * z1 - z2 * z2) * z2 / d - 2.0 * z2 / s.sqrt();
    let b = -2.0 * z1 * z2 * z2 / d + 2.0 * z1 / s.sqrt();
    Ok((a, b))
}

// ---------------------------------------------------------------------------
// Origin rejection probes for the planar map
// ---------------------------------------------------------------------------

/// The six directional rejection cases at the origin. Each case carries a
/// strict inequality on `(x, y)`; when it holds, the quotient along the
/// case's ray has a strictly positive limit, so `x` cannot belong to the
/// coderivative set at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OriginCase {
    /// `x1 > y1`, approach along `(+1, 0)`.
    PosAxis,
    /// `−x1 > y1`, approach along `(−1, 0)`.
    NegAxis,
    /// `x1 + x2 > √2·y2`, approach along `(1, 1)/√2`.
    DiagPos,
    /// `−x1 − x2 > √2·y2`, approach along `(−1, −1)/√2`.
    DiagNeg,
    /// `−x1 + x2 > −√2·y2`, approach along `(−1, 1)/√2`.
    AntiDiagUpper,
    /// `x1 − x2 > −√2·y2`, approach along `(1, −1)/√2`.
    AntiDiagLower,
}

/// A single ray probe at the origin: approach direction plus the closed-form
/// quotient limit along it.
#[derive(Debug, Clone, PartialEq)]
pub struct OriginRayProbe {
    pub label: &'static str,
    pub direction: [f64; 2],
    pub predicted_limit: f64,
}

/// Along the ray `u = r·d` from the origin the quotient is constant in `r`
/// by homogeneity, equal to `(⟨x, d⟩ − ⟨y, f(d)⟩)/2`.
pub fn origin_ray_limit(x: Point2, y: Point2, dir: [f64; 2]) -> f64 {
    let d = Point2::from_coords(dir);
    let fd = mappings::eval_f(d);
    0.5 * (x.dot(&d) - y.dot(&fd))
}

impl OriginCase {
    pub const ALL: [OriginCase; 6] = [
        OriginCase::PosAxis,
        OriginCase::NegAxis,
        OriginCase::DiagPos,
        OriginCase::DiagNeg,
        OriginCase::AntiDiagUpper,
        OriginCase::AntiDiagLower,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            OriginCase::PosAxis => "pos-axis",
            OriginCase::NegAxis => "neg-axis",
            OriginCase::DiagPos => "diag-pos",
            OriginCase::DiagNeg => "diag-neg",
            OriginCase::AntiDiagUpper => "antidiag-upper",
            OriginCase::AntiDiagLower => "antidiag-lower",
        }
    }

    /// The case's strict rejection inequality on `(x, y)`.
    pub fn condition_strict(&self, x: Point2, y: Point2) -> bool {
        let s2 = std::f64::consts::SQRT_2;
        match self {
            OriginCase::PosAxis => x.c1() > y.c1(),
            OriginCase::NegAxis => -x.c1() > y.c1(),
            OriginCase::DiagPos => x.c1() + x.c2() > s2 * y.c2(),
            OriginCase::DiagNeg => -x.c1() - x.c2() > s2 * y.c2(),
            OriginCase::AntiDiagUpper => -x.c1() + x.c2() > -s2 * y.c2(),
            OriginCase::AntiDiagLower => x.c1() - x.c2() > -s2 * y.c2(),
        }
    }

    fn primary_direction(&self) -> [f64; 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            OriginCase::PosAxis => [1.0, 0.0],
            OriginCase::NegAxis => [-1.0, 0.0],
            OriginCase::DiagPos => [h, h],
            OriginCase::DiagNeg => [-h, -h],
            OriginCase::AntiDiagUpper => [-h, h],
            OriginCase::AntiDiagLower => [h, -h],
        }
    }

    /// The case's closed-form quotient limit along its primary ray.
    pub fn predicted_limit(&self, x: Point2, y: Point2) -> f64 {
        origin_ray_limit(x, y, self.primary_direction())
    }

    /// Ray probes for this case. The two diagonal-sign cases carry an
    /// alternate mirrored schedule alongside the primary one (the source
    /// derivations are ambiguous about the intended sign pattern, so both
    /// are evaluated and reported).
    pub fn probes(&self, x: Point2, y: Point2) -> Vec<OriginRayProbe> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = vec![OriginRayProbe {
            label: self.label(),
            direction: self.primary_direction(),
            predicted_limit: self.predicted_limit(x, y),
        }];
        let alternate = match self {
            OriginCase::DiagNeg => Some(("diag-neg-alt", [-h, h])),
            OriginCase::AntiDiagUpper => Some(("antidiag-upper-alt", [h, h])),
            _ => None,
        };
        if let Some((label, dir)) = alternate {
            out.push(OriginRayProbe {
                label,
                direction: dir,
                predicted_limit: origin_ray_limit(x, y, dir),
            });
        }
        out
    }
}

/// A rejection certificate for `x ∈ D*f(0)(y)`: a ray along which the
/// quotient limit is strictly positive.
///
/// For any `y ≠ 0` a certificate exists for every candidate `x`: one of the
/// six case inequalities is strict, or (for `x = 0`, `y = (y1, 0)` with
/// `y1 > 0`) the vertical ray `u = (0, −r)` yields the limit `y1/2`.
pub fn origin_rejection_certificate(x: Point2, y: Point2) -> Option<OriginRayProbe> {
    for case in OriginCase::ALL {
        if case.condition_strict(x, y) {
            return Some(OriginRayProbe {
                label: case.label(),
                direction: case.primary_direction(),
                predicted_limit: case.predicted_limit(x, y),
            });
        }
    }
    // All six hold non-strictly, which forces x = 0 and y = (y1, 0) with
    // y1 ≥ 0; positive y1 is rejected by the vertical probe.
    let vertical = OriginRayProbe {
        label: "vertical",
        direction: [0.0, -1.0],
        predicted_limit: origin_ray_limit(x, y, [0.0, -1.0]),
    };
    if x.is_origin() && vertical.predicted_limit > 0.0 {
        return Some(vertical);
    }
    None
}

/// Measure the quotient along an origin ray probe over a radius ladder.
pub fn measure_origin_ray(
    x: Point2,
    y: Point2,
    probe: &OriginRayProbe,
    radii: &[f64],
) -> Result<ProbeReport> {
    validate_radii(radii)?;
    let values = radii
        .iter()
        .map(|&r| {
            let u = [r * probe.direction[0], r * probe.direction[1]];
            quotient_arrays(&eval2, [0.0, 0.0], x.coords(), y.coords(), u)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(finish_report(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn fd_jacobian_reference_points() {
        let m = fd_jacobian_f(Point2::new(1.0, 0.0), 1e-5).unwrap();
        let expect = Mat2::new([[1.0, 0.0], [0.0, 2.0]]);
        assert!(m.sub(&expect).max_abs_entry() < 1e-9);

        let m = fd_jacobian_f(Point2::new(1.0, 1.0), 1e-5).unwrap();
        let s2 = std::f64::consts::SQRT_2;
        let expect = Mat2::new([[s2, 1.0 / s2], [-s2, 1.0 / s2]]);
        assert!(m.sub(&expect).max_abs_entry() < 1e-8);

        let m = fd_jacobian_h(Point4::new(1.0, 0.0, 0.0, 0.0), 1e-5).unwrap();
        let expect = analytic::jacobian_h(Point4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert!(m.sub(&expect).max_abs_entry() < 1e-8);
    }

    #[test]
    fn fd_jacobian_rejects_points_near_origin() {
        assert!(fd_jacobian_f(Point2::new(1e-5, 0.0), 1e-5).is_err());
    }

    #[test]
    fn quotient_trivial_and_reference_cases() {
        // Zero pairings vanish identically.
        let q = coderiv_quotient(
            MapId::F2,
            &[1.0, 2.0],
            &[0.0, 0.0],
            &[0.0, 0.0],
            &[1.5, 2.5],
        )
        .unwrap();
        assert_eq!(q, 0.0);

        // Vertical approach at the origin: quotient → y1/2.
        for t in [1e-2, 1e-4, 1e-6] {
            let q = coderiv_quotient(MapId::F2, &[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], &[0.0, t])
                .unwrap();
            assert_abs_diff_eq!(q, 0.5, epsilon = 1e-12);
        }

        // At a smooth point with x the adjoint image, the quotient is o(1).
        let z = Point2::new(1.0, 0.0);
        for t in [1e-2, 1e-4, 1e-6] {
            let q = coderiv_quotient(MapId::F2, &[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0], &[1.0 + t, 0.0])
                .unwrap();
            assert!(q.abs() <= 1e-12, "quotient {q} not first-order small");
        }
        let _ = z;

        assert!(coderiv_quotient(MapId::F2, &[1.0, 0.0], &[0.0; 2], &[0.0; 2], &[1.0, 0.0]).is_err());
        assert!(coderiv_quotient(MapId::F2, &[1.0], &[0.0; 2], &[0.0; 2], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn limsup_accepts_the_adjoint_image_and_flags_violations() {
        let radii = vec![1e-2, 1e-3, 1e-4, 1e-5];
        let z = [1.0, 0.0];
        let y = [0.0, 1.0];
        // x = adjoint image (0, 2)
        let est = limsup_estimate(MapId::F2, &z, &[0.0, 2.0], &y, &radii, 256, 7).unwrap();
        assert!(est <= 1e-3, "estimate {est}");
        assert!(membership_passes(MapId::F2, &z, &[0.0, 2.0], &y, &radii, 256, 7, 1e-3).unwrap());

        // perturbed x violates the limsup inequality
        let est = limsup_estimate(MapId::F2, &z, &[0.0, 2.5], &y, &radii, 256, 7).unwrap();
        assert!(est >= 0.05, "estimate {est}");

        // at the origin with y = (1, 0) the estimate approaches 1/2
        let est = limsup_estimate(MapId::F2, &[0.0, 0.0], &[0.0, 0.0], &[1.0, 0.0], &radii, 256, 7)
            .unwrap();
        assert_abs_diff_eq!(est, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn limsup_accepts_blockwise_and_shared_norm_images() {
        let radii = vec![1e-3, 1e-4, 1e-5];
        let z = Point4::new(1.0, -0.5, 0.3, 2.0);
        let y = Point4::new(0.4, 0.7, -0.2, 0.1);

        let x = analytic::jacobian_g(z).unwrap().apply(y);
        let est = limsup_estimate(
            MapId::G4,
            &z.coords(),
            &x.coords(),
            &y.coords(),
            &radii,
            128,
            5,
        )
        .unwrap();
        assert!(est <= 1e-3, "estimate {est}");

        let x = analytic::jacobian_h(z).unwrap().apply(y);
        let est = limsup_estimate(
            MapId::H4,
            &z.coords(),
            &x.coords(),
            &y.coords(),
            &radii,
            128,
            5,
        )
        .unwrap();
        assert!(est <= 1e-3, "estimate {est}");

        // a perturbed candidate violates the inequality
        let bad = x + Point4::new(0.3, 0.0, 0.0, 0.0);
        let est = limsup_estimate(
            MapId::H4,
            &z.coords(),
            &bad.coords(),
            &y.coords(),
            &radii,
            128,
            5,
        )
        .unwrap();
        assert!(est >= 0.01, "estimate {est}");
    }

    #[test]
    fn limsup_validates_config() {
        let z = [1.0, 0.0];
        assert!(limsup_estimate(MapId::F2, &z, &z, &z, &[1e-3, 1e-2], 256, 0).is_err());
        assert!(limsup_estimate(MapId::F2, &z, &z, &z, &[1e-2, 1e-3], 4, 0).is_err());
    }

    #[test]
    fn residual_probe_accepts_the_true_derivative() {
        let z = Point2::new(1.0, 0.0);
        let jac = analytic::jacobian_f(z).unwrap();
        for dir in [[0.0, 1.0], [1.0, 0.0], [-0.6, 0.8]] {
            let sched = DirectionSchedule::radial(dir, default_radii()).unwrap();
            let report = frechet_residual_probe_f(z, &jac, &sched);
            assert!(report.extrapolated_limit.abs() < 1e-6);
            assert!(report.converged);
        }
    }

    #[test]
    fn residual_probe_refutes_origin_candidates() {
        for (a, b) in [(0.7, -0.3), (-1.2, 0.5), (0.0, 0.9), (0.0, 0.0)] {
            let candidate = Mat2::new([[a, b], [0.4, -0.8]]);
            let (sched, predicted) =
                origin_refutation_schedule_f(&candidate, default_radii()).unwrap();
            let report = frechet_residual_probe_f(Point2::ORIGIN, &candidate, &sched);
            assert_abs_diff_eq!(report.extrapolated_limit, predicted, epsilon = 1e-9);
            assert!(report.extrapolated_limit >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn residual_probe_refutes_blockwise_candidates_at_degenerate_points() {
        let z = Point4::new(0.0, 0.0, 1.0, 1.0);
        let mut rng = crate::sampling::stream(99, &[4]);
        for _ in 0..10 {
            let mut e = [[0.0; 4]; 4];
            for row in e.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(-2.0..2.0);
                }
            }
            let candidate = Mat4::new(e);
            let (sched, predicted) =
                origin_refutation_schedule_g(z, &candidate, default_radii()).unwrap();
            let report = frechet_residual_probe_g(z, &candidate, &sched);
            assert_abs_diff_eq!(report.extrapolated_limit, predicted, epsilon = 1e-6);
            assert!(report.extrapolated_limit >= 1.0 - 1e-6);
        }
        // nondegenerate points are not eligible
        assert!(origin_refutation_schedule_g(
            Point4::new(1.0, 0.0, 0.0, 1.0),
            &Mat4::identity(),
            default_radii()
        )
        .is_err());
    }

    #[test]
    fn curved_schedules_change_the_approach() {
        let sched = DirectionSchedule::with_parametrization(
            [1.0, 0.0],
            vec![1e-1, 1e-2],
            Parametrization::CustomCurve {
                deviation: [0.0, 1.0],
            },
        )
        .unwrap();
        let u = sched.point_at([0.0, 0.0], 0.1);
        assert_abs_diff_eq!(u[0], 0.1, epsilon = 0.0);
        assert_abs_diff_eq!(u[1], 0.01, epsilon = 1e-15);
    }

    #[test]
    fn schedule_validation() {
        assert!(DirectionSchedule::<2>::radial([2.0, 0.0], vec![0.1]).is_err());
        assert!(DirectionSchedule::<2>::radial([1.0, 0.0], vec![0.1, 0.1]).is_err());
        assert!(DirectionSchedule::<2>::radial([1.0, 0.0], vec![]).is_err());
    }

    #[test]
    fn slope_reference_values() {
        // closed-form limits at the two axis points
        let (a, b) = second_coordinate_slope_limits(Point2::new(1.0, 0.0)).unwrap();
        assert_eq!((a, b), (0.0, 2.0));
        let (a, b) = second_coordinate_slope_limits(Point2::new(0.0, 1.0)).unwrap();
        assert_abs_diff_eq!(a, -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b, 0.0, epsilon = 1e-15);

        assert!(second_coordinate_slopes(Point2::ORIGIN, 0.1).is_err());
        assert!(second_coordinate_slopes(Point2::new(0.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn origin_case_table_matches_the_ray_limits() {
        let x = Point2::new(0.4, -1.1);
        let y = Point2::new(0.2, 0.9);
        let s2 = std::f64::consts::SQRT_2;
        let by_hand = [
            (OriginCase::PosAxis, (x.c1() - y.c1()) / 2.0),
            (OriginCase::NegAxis, (-x.c1() - y.c1()) / 2.0),
            (OriginCase::DiagPos, (x.c1() + x.c2() - s2 * y.c2()) / (2.0 * s2)),
            (OriginCase::DiagNeg, (-x.c1() - x.c2() - s2 * y.c2()) / (2.0 * s2)),
            (
                OriginCase::AntiDiagUpper,
                (-x.c1() + x.c2() + s2 * y.c2()) / (2.0 * s2),
            ),
            (
                OriginCase::AntiDiagLower,
                (x.c1() - x.c2() + s2 * y.c2()) / (2.0 * s2),
            ),
        ];
        for (case, expected) in by_hand {
            assert_abs_diff_eq!(case.predicted_limit(x, y), expected, epsilon = 1e-15);
            // condition is strict exactly when the limit is positive
            assert_eq!(case.condition_strict(x, y), case.predicted_limit(x, y) > 0.0);
        }
    }

    #[test]
    fn ambiguous_cases_report_both_schedules() {
        let x = Point2::new(0.3, 0.1);
        let y = Point2::new(0.0, -0.4);
        assert_eq!(OriginCase::AntiDiagUpper.probes(x, y).len(), 2);
        assert_eq!(OriginCase::DiagNeg.probes(x, y).len(), 2);
        assert_eq!(OriginCase::PosAxis.probes(x, y).len(), 1);
        for probe in OriginCase::AntiDiagUpper.probes(x, y) {
            let report = measure_origin_ray(x, y, &probe, &default_radii()).unwrap();
            assert_abs_diff_eq!(
                report.extrapolated_limit,
                probe.predicted_limit,
                epsilon = 1e-12
            );
        }
    }

    proptest! {
        // For every nonzero dual vector some ray rejects every candidate:
        // the certificate exists and its measured limit matches prediction.
        #[test]
        fn rejection_certificates_exist(ya in -3.0..3.0_f64, yb in -3.0..3.0_f64,
                                        xa in -3.0..3.0_f64, xb in -3.0..3.0_f64,
                                        x_is_zero in proptest::bool::ANY) {
            let y = Point2::new(ya, yb);
            prop_assume!(y.norm() > 1e-9);
            let x = if x_is_zero { Point2::ORIGIN } else { Point2::new(xa, xb) };
            let cert = origin_rejection_certificate(x, y);
            // for x = 0 the certificate always exists; for random x it can
            // only be missing if all six inequalities hold, which forces x=0
            if let Some(ref probe) = cert {
                prop_assert!(probe.predicted_limit > 0.0);
                let report = measure_origin_ray(x, y, probe, &default_radii()).unwrap();
                prop_assert!((report.extrapolated_limit - probe.predicted_limit).abs() <= 1e-10);
            } else {
                prop_assert!(!x.is_origin());
            }
            if x.is_origin() {
                prop_assert!(cert.is_some());
            }
        }

        // Difference quotients converge to the closed-form limits, which in
        // turn equal the second gradient row of the derivative matrix. The
        // quotient error at step s is (s/2)·|∂²f| ≤ 1.5·s/‖z‖ (the second
        // derivatives are (−1)-homogeneous with max 3 on the unit circle).
        #[test]
        fn slopes_agree_with_the_derivative_row(za in -5.0..5.0_f64, zb in -5.0..5.0_f64) {
            let z = Point2::new(za, zb);
            prop_assume!(z.norm() > 0.1);
            let (a_lim, b_lim) = second_coordinate_slope_limits(z).unwrap();
            let (a_est, b_est) = second_coordinate_slopes(z, 1e-6).unwrap();
            let tol = 1.6e-6 / z.norm() + 1e-9;
            prop_assert!((a_est - a_lim).abs() <= tol);
            prop_assert!((b_est - b_lim).abs() <= tol);
            if z.norm() >= 2.0 {
                prop_assert!((a_est - a_lim).abs() <= 1e-6);
                prop_assert!((b_est - b_lim).abs() <= 1e-6);
            }
            let jac = analytic::jacobian_f(z).unwrap();
            prop_assert!((a_lim - jac.entry(1, 0)).abs() <= 1e-12 * (1.0 + a_lim.abs()));
            prop_assert!((b_lim - jac.entry(1, 1)).abs() <= 1e-12 * (1.0 + b_lim.abs()));
        }

        #[test]
        fn fd_agrees_with_analytic_everywhere(za in -5.0..5.0_f64, zb in -5.0..5.0_f64) {
            let z = Point2::new(za, zb);
            prop_assume!(z.norm() > 0.1);
            let fd = fd_jacobian_f(z, 1e-5).unwrap();
            let an = analytic::jacobian_f(z).unwrap();
            prop_assert!(fd.sub(&an).max_abs_entry() <= 1e-6);
        }
    }
}
