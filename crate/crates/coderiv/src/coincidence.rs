//! Parameterized coincidence equations for the planar map.
//!
//! Given a perturbation `h(x, s)` with Lipschitz modulus `β < 1` in `x` and
//! a parameter curve `ω(s)`, the equation
//!
//! ```text
//! f(σ(s)) = h(σ(s), s) + ω(s)
//! ```
//!
//! admits, near a parameter where the data is consistent with an anchor
//! `x̄`, a solution branch satisfying the distance bound
//!
//! ```text
//! ‖σ(s) − x̄‖ ≤ ‖h(x̄, s) + ω(s) − f(x̄)‖ / (α − β)
//! ```
//!
//! for every `α` strictly between `β` and the covering constant 1 of the
//! planar map. The existence theory gives no algorithm; the solver uses
//! damped Newton from the anchor, which is effective because the planar
//! derivative has singular values {1, 2} everywhere away from the origin.
//! Non-convergence is reported as "parameter outside the guaranteed
//! neighborhood", never as a soundness failure.
//!
//! The planar map is two-to-one (`f(−x) = f(x)`), so solutions are only
//! locally unique; the solver follows the branch inside the anchor's
//! Newton basin. Continuity of `s ↦ h(x̄, s)` and of `ω` is the scenario
//! author's responsibility — the built-in curves are smooth.

use crate::analytic;
use crate::covering::{self, Method};
use crate::error::{Error, Result};
use crate::mappings::{self, MapId};
use crate::matrix::Mat2;
use crate::point::Point2;
use crate::sampling;
use rand::Rng;

/// The perturbation family `h(·, s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Perturbation {
    /// `h ≡ 0`.
    Zero,
    /// `h(x, s) = c·x`.
    Scale(f64),
    /// `h(x, s) = c·s·x`.
    ScaleByParam(f64),
    /// `h(x, s) = c·(sin x1, cos x2)`.
    SinCos(f64),
    /// `h(x, s) = (M + s·Ms)·x + v + s·vs`.
    Affine {
        m: Mat2,
        m_s: Mat2,
        v: Point2,
        v_s: Point2,
    },
}

impl Perturbation {
    pub fn eval(&self, x: Point2, s: f64) -> Point2 {
        match self {
            Perturbation::Zero => Point2::ORIGIN,
            Perturbation::Scale(c) => x.scale(*c),
            Perturbation::ScaleByParam(c) => x.scale(c * s),
            Perturbation::SinCos(c) => Point2::new(c * x.c1().sin(), c * x.c2().cos()),
            Perturbation::Affine { m, m_s, v, v_s } => {
                let mut out = m.apply(x) + m_s.apply(x).scale(s);
                out = out + *v + v_s.scale(s);
                out
            }
        }
    }
}

/// The parameter curve `ω(s)`.
#[derive(Debug, Clone, PartialEq)]
pub enum OmegaCurve {
    /// `ω(s) = (cos s, sin s)`.
    Rotation,
    /// Constant curve.
    Const(Point2),
    /// `ω(s) = f(x̄) − h(x̄, s)`: keeps the anchor an exact solution for
    /// every parameter.
    Anchor,
}

/// A fully specified coincidence problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Anchor point, never the origin.
    pub xbar: Point2,
    /// `f(x̄)`, fixed at construction.
    pub ybar: Point2,
    pub perturbation: Perturbation,
    pub omega: OmegaCurve,
    /// Declared Lipschitz modulus of `h(·, s)`, in `[0, 1)`.
    pub beta: f64,
    /// Rate parameter, in `(beta, 1)`.
    pub alpha: f64,
    /// Parameter range used for modulus estimation.
    pub s_range: (f64, f64),
}

impl Scenario {
    pub fn new(
        xbar: Point2,
        perturbation: Perturbation,
        omega: OmegaCurve,
        beta: f64,
        alpha: f64,
    ) -> Result<Scenario> {
        if xbar.is_origin() {
            return Err(Error::config("the anchor must not be the origin"));
        }
        if !(0.0..1.0).contains(&beta) || !(beta < alpha && alpha < 1.0) {
            return Err(Error::config(
                "moduli must satisfy 0 <= beta < alpha < 1",
            ));
        }
        Ok(Scenario {
            xbar,
            ybar: mappings::eval_f(xbar),
            perturbation,
            omega,
            beta,
            alpha,
            s_range: (0.0, 1.0),
        })
    }

    pub fn with_s_range(mut self, lo: f64, hi: f64) -> Result<Scenario> {
        if lo >= hi || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::config("invalid parameter range"));
        }
        self.s_range = (lo, hi);
        Ok(self)
    }

    pub fn perturb_at(&self, x: Point2, s: f64) -> Point2 {
        self.perturbation.eval(x, s)
    }

    pub fn omega_at(&self, s: f64) -> Point2 {
        match &self.omega {
            OmegaCurve::Rotation => Point2::new(s.cos(), s.sin()),
            OmegaCurve::Const(v) => *v,
            OmegaCurve::Anchor => self.ybar - self.perturb_at(self.xbar, s),
        }
    }

    /// `h(x̄, s) + ω(s)`: the (single-valued) target the anchor is measured
    /// against.
    pub fn target_at(&self, s: f64) -> Point2 {
        self.perturb_at(self.xbar, s) + self.omega_at(s)
    }

    /// Consistency checks tying the scenario to the covering analysis:
    /// the covering estimate of the planar map at the anchor must be 1
    /// (which is what makes any `alpha < 1` admissible), and the sampled
    /// Lipschitz modulus must not exceed the declared one by more than 5%.
    pub fn validate(&self, seed: u64) -> Result<()> {
        let est = covering::covering_estimate(
            MapId::F2,
            &self.xbar.coords(),
            &[1e-1, 1e-2, 1e-3, 1e-4],
            64,
            64,
            Method::Spectral,
            seed,
        )?;
        if (est.estimate - 1.0).abs() > 1e-6 {
            return Err(Error::config(format!(
                "covering estimate at the anchor is {} instead of 1",
                est.estimate
            )));
        }
        lipschitz_estimate(self, 0.5, 200, seed)?;
        Ok(())
    }

    /// Parse the flat key–value scenario format:
    ///
    /// ```text
    /// xbar    = 1.0, 0.0
    /// perturb = zero                # zero | scale <c> | scale-s <c> | sincos <c> | affine
    /// omega   = rotation            # rotation | const <v1>, <v2> | anchor
    /// beta    = 0.0
    /// alpha   = 0.9
    /// srange  = 0.0, 1.0            # optional
    /// # with `perturb = affine`, optional coefficient rows:
    /// # perturb.m  = m11, m12, m21, m22
    /// # perturb.ms = ...
    /// # perturb.v  = v1, v2
    /// # perturb.vs = v1, v2
    /// ```
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut fields = std::collections::BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }

        let take = |fields: &mut std::collections::BTreeMap<String, String>, key: &str| {
            fields
                .remove(key)
                .ok_or_else(|| Error::config(format!("missing field `{key}`")))
        };

        let xbar = parse_point2(&take(&mut fields, "xbar")?)?;
        let perturb_text = take(&mut fields, "perturb")?;
        let perturbation = parse_perturbation(&perturb_text, &mut fields)?;
        let omega = parse_omega(&take(&mut fields, "omega")?)?;
        let beta = parse_float(&take(&mut fields, "beta")?)?;
        let alpha = parse_float(&take(&mut fields, "alpha")?)?;
        let srange = fields.remove("srange");

        if let Some(key) = fields.keys().next() {
            return Err(Error::config(format!("unknown field `{key}`")));
        }

        let mut scenario = Scenario::new(xbar, perturbation, omega, beta, alpha)?;
        if let Some(sr) = srange {
            let vals = parse_floats(&sr, 2)?;
            scenario = scenario.with_s_range(vals[0], vals[1])?;
        }
        Ok(scenario)
    }
}

fn parse_float(s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid number `{s}`")))?;
    if !v.is_finite() {
        return Err(Error::config(format!("non-finite number `{s}`")));
    }
    Ok(v)
}

fn parse_floats(s: &str, count: usize) -> Result<Vec<f64>> {
    let vals = s
        .split(',')
        .map(parse_float)
        .collect::<Result<Vec<f64>>>()?;
    if vals.len() != count {
        return Err(Error::config(format!(
            "expected {count} comma-separated numbers, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

fn parse_point2(s: &str) -> Result<Point2> {
    let v = parse_floats(s, 2)?;
    Ok(Point2::new(v[0], v[1]))
}

fn parse_mat2(s: &str) -> Result<Mat2> {
    let v = parse_floats(s, 4)?;
    Ok(Mat2::new([[v[0], v[1]], [v[2], v[3]]]))
}

fn parse_perturbation(
    text: &str,
    fields: &mut std::collections::BTreeMap<String, String>,
) -> Result<Perturbation> {
    let mut tokens = text.split_whitespace();
    let kind = tokens.next().unwrap_or("");
    let arg = tokens.next();
    if tokens.next().is_some() {
        return Err(Error::config(format!("too many tokens in `perturb = {text}`")));
    }
    let scalar = |arg: Option<&str>| -> Result<f64> {
        parse_float(arg.ok_or_else(|| Error::config("perturbation kind needs a coefficient"))?)
    };
    match kind {
        "zero" => Ok(Perturbation::Zero),
        "scale" => Ok(Perturbation::Scale(scalar(arg)?)),
        "scale-s" => Ok(Perturbation::ScaleByParam(scalar(arg)?)),
        "sincos" => Ok(Perturbation::SinCos(scalar(arg)?)),
        "affine" => {
            let m = match fields.remove("perturb.m") {
                Some(v) => parse_mat2(&v)?,
                None => Mat2::zero(),
            };
            let m_s = match fields.remove("perturb.ms") {
                Some(v) => parse_mat2(&v)?,
                None => Mat2::zero(),
            };
            let v = match fields.remove("perturb.v") {
                Some(v) => parse_point2(&v)?,
                None => Point2::ORIGIN,
            };
            let v_s = match fields.remove("perturb.vs") {
                Some(v) => parse_point2(&v)?,
                None => Point2::ORIGIN,
            };
            Ok(Perturbation::Affine { m, m_s, v, v_s })
        }
        other => Err(Error::config(format!("unknown perturbation kind `{other}`"))),
    }
}

fn parse_omega(text: &str) -> Result<OmegaCurve> {
    let (kind, rest) = match text.split_once(char::is_whitespace) {
        Some((k, r)) => (k, r.trim()),
        None => (text.trim(), ""),
    };
    match kind {
        "rotation" => Ok(OmegaCurve::Rotation),
        "anchor" => Ok(OmegaCurve::Anchor),
        "const" => Ok(OmegaCurve::Const(parse_point2(rest)?)),
        other => Err(Error::config(format!("unknown omega kind `{other}`"))),
    }
}

/// One solved parameter value.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub s: f64,
    /// The computed solution σ(s).
    pub sigma: Point2,
    /// `‖f(σ) − h(σ, s) − ω(s)‖`.
    pub residual: f64,
    /// `‖σ − x̄‖`.
    pub distance: f64,
    /// `‖h(x̄, s) + ω(s) − f(x̄)‖ / (α − β)`.
    pub bound: f64,
    pub bound_satisfied: bool,
    pub iterations: usize,
}

/// One sweep entry: a report, or the non-fatal failure that replaced it.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub s: f64,
    pub outcome: Result<SolveReport>,
}

const RESIDUAL_TARGET: f64 = 1e-10;
const MAX_ITERATIONS: usize = 200;
const ORIGIN_GUARD: f64 = 1e-8;
const BOUND_SLACK: f64 = 1e-12;

/// Empirical Lipschitz modulus of `x ↦ h(x, s)` over sampled pairs in the
/// ball around the anchor, maximized over sampled parameters (range
/// endpoints included). Errors when the estimate exceeds the declared
/// modulus by more than 5%.
pub fn lipschitz_estimate(
    scenario: &Scenario,
    neighborhood_radius: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if samples < 100 {
        return Err(Error::config("need at least 100 sample pairs"));
    }
    if neighborhood_radius <= 0.0 || !neighborhood_radius.is_finite() {
        return Err(Error::config("neighborhood radius must be positive"));
    }
    let mut rng = sampling::stream(seed, &[0x40]);
    let (lo, hi) = scenario.s_range;
    let center = scenario.xbar.coords();
    let mut estimate: f64 = 0.0;
    for k in 0..samples {
        let s = match k % 8 {
            0 => lo,
            1 => hi,
            _ => rng.gen_range(lo..=hi),
        };
        let a = sampling::ball_point(center, neighborhood_radius, &mut rng);
        let b = sampling::ball_point(center, neighborhood_radius, &mut rng);
        let pa = Point2::from_coords(a);
        let pb = Point2::from_coords(b);
        let dx = (pa - pb).norm();
        if dx < 1e-12 {
            continue;
        }
        let dh = (scenario.perturb_at(pa, s) - scenario.perturb_at(pb, s)).norm();
        estimate = estimate.max(dh / dx);
    }
    if estimate > scenario.beta * 1.05 + 1e-12 {
        return Err(Error::config(format!(
            "sampled Lipschitz modulus {estimate} exceeds the declared beta {} by more than 5%",
            scenario.beta
        )));
    }
    Ok(estimate)
}

/// Distance from the anchor image to the target: `‖ȳ − (h(x̄, s) + ω(s))‖`.
pub fn dist_to_target(scenario: &Scenario, s: f64) -> f64 {
    (scenario.ybar - scenario.target_at(s)).norm()
}

fn residual(scenario: &Scenario, s: f64, x: Point2) -> Point2 {
    mappings::eval_f(x) - scenario.perturb_at(x, s) - scenario.omega_at(s)
}

/// Standard-layout Jacobian of the residual: the planar derivative
/// (transposed into rows-are-components form) minus a central-difference
/// Jacobian of the perturbation.
fn residual_jacobian(scenario: &Scenario, s: f64, x: Point2) -> Result<Mat2> {
    let jf = analytic::jacobian_f(x)?.transpose();
    let step = 1e-6;
    let mut e = [[0.0; 2]; 2];
    for j in 0..2 {
        let mut hi = x.coords();
        let mut lo = x.coords();
        hi[j] += step;
        lo[j] -= step;
        let dh = (scenario.perturb_at(Point2::from_coords(hi), s)
            - scenario.perturb_at(Point2::from_coords(lo), s))
        .scale(1.0 / (2.0 * step));
        e[0][j] = dh.c1();
        e[1][j] = dh.c2();
    }
    Ok(jf.sub(&Mat2::new(e)))
}

fn build_report(scenario: &Scenario, s: f64, x: Point2, rn: f64, iterations: usize) -> SolveReport {
    let distance = (x - scenario.xbar).norm();
    let bound = dist_to_target(scenario, s) / (scenario.alpha - scenario.beta);
    SolveReport {
        s,
        sigma: x,
        residual: rn,
        distance,
        bound,
        bound_satisfied: distance <= bound + BOUND_SLACK,
        iterations,
    }
}

/// Damped Newton iteration on `f(x) − h(x, s) − ω(s)` from an explicit
/// starting point. Steps are halved when they fail to decrease the
/// residual or land within `1e−8` of the origin, where the planar map is
/// not differentiable.
pub fn solve_with_start(scenario: &Scenario, s: f64, start: Point2) -> Result<SolveReport> {
    let mut x = start;
    let mut trace = Vec::new();
    for iter in 0..MAX_ITERATIONS {
        let r = residual(scenario, s, x);
        let rn = r.norm();
        trace.push(rn);
        if rn <= RESIDUAL_TARGET {
            return Ok(build_report(scenario, s, x, rn, iter));
        }
        let step = residual_jacobian(scenario, s, x)
            .ok()
            .and_then(|j| j.solve(r));
        let d = match step {
            Some(d) => d,
            None => {
                return Err(Error::NoConvergence {
                    iterations: iter,
                    residual: rn,
                    trace,
                })
            }
        };
        let mut lambda = 1.0;
        let mut advanced = false;
        while lambda >= 1e-12 {
            let cand = x - d.scale(lambda);
            if cand.norm() < ORIGIN_GUARD
                || residual(scenario, s, cand).norm() >= rn
            {
                lambda *= 0.5;
                continue;
            }
            x = cand;
            advanced = true;
            break;
        }
        if !advanced {
            return Err(Error::NoConvergence {
                iterations: iter,
                residual: rn,
                trace,
            });
        }
    }
    let rn = residual(scenario, s, x).norm();
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: rn,
        trace,
    })
}

/// Solve at one parameter value, starting from the anchor.
pub fn solve_parametric(scenario: &Scenario, s: f64) -> Result<SolveReport> {
    solve_with_start(scenario, s, scenario.xbar)
}

/// Recheck a report's distance bound against the scenario: recomputes the
/// bound from scratch, cross-checks the stored one, and applies the
/// inequality `distance ≤ bound` with a 1e−12 slack.
pub fn verify_bound(report: &SolveReport, scenario: &Scenario) -> bool {
    let bound = dist_to_target(scenario, report.s) / (scenario.alpha - scenario.beta);
    let cross_checked = (report.bound - bound).abs() <= 1e-9 * bound.max(1.0);
    cross_checked && report.distance <= bound + BOUND_SLACK
}

/// Solve over a parameter grid with warm starts from the previous solution.
/// Failures are recorded per entry and do not abort the sweep.
pub fn sweep(scenario: &Scenario, s_grid: &[f64]) -> Vec<SweepRecord> {
    let mut start = scenario.xbar;
    let mut records = Vec::with_capacity(s_grid.len());
    for &s in s_grid {
        let outcome = solve_with_start(scenario, s, start);
        if let Ok(report) = &outcome {
            start = report.sigma;
        }
        records.push(SweepRecord { s, outcome });
    }
    records
}

/// Built-in scenario: rotate the target image along the unit circle,
/// `ω(s) = (cos s, sin s)` with no perturbation. The exact solution branch
/// through the anchor `(1, 0)` is `σ(s) = (cos(s/2), sin(s/2))`.
pub fn rotation_scenario() -> Scenario {
    Scenario::new(
        Point2::new(1.0, 0.0),
        Perturbation::Zero,
        OmegaCurve::Rotation,
        0.0,
        0.9,
    )
    .expect("valid built-in")
}

/// Built-in scenario: parameter-scaled linear pull `h(x, s) = 0.2·s·x`
/// with the anchor-preserving curve, modulus 0.2 over the unit parameter
/// range. The anchor solves the equation exactly for every parameter.
pub fn scaled_pull_scenario() -> Scenario {
    Scenario::new(
        Point2::new(1.0, 0.0),
        Perturbation::ScaleByParam(0.2),
        OmegaCurve::Anchor,
        0.2,
        0.9,
    )
    .expect("valid built-in")
}
