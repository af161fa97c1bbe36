//! The three concrete mappings under study.
//!
//! `f` on the plane sends a point with polar coordinates (r, t) to
//! (r, 2t): it doubles the angle while preserving the norm. Written out,
//!
//! ```text
//! f(x1, x2) = ((x1² − x2²)/‖x‖, 2·x1·x2/‖x‖),   f(0) = 0.
//! ```
//!
//! `g` applies the same formula blockwise to (x1, x2) and (x3, x4), each
//! block normalized by its own block norm (a zero block maps to zero).
//! `h` uses the f-numerators on both blocks but divides everything by the
//! full four-dimensional norm, so it is norm-decreasing rather than
//! norm-preserving unless one block vanishes.
//!
//! All three are total: the origin case is handled by exact zero tests and
//! every finite input yields a finite output.

use crate::point::{Point2, Point4};

/// Selects one of the three mappings; used by the numerical oracles and the
/// command-line front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapId {
    /// The angle-doubling map on the plane.
    F2,
    /// The blockwise extension on four-dimensional space.
    G4,
    /// The shared-norm variant on four-dimensional space.
    H4,
}

impl MapId {
    /// Dimension of the mapping's domain (and codomain).
    pub fn dim(&self) -> usize {
        match self {
            MapId::F2 => 2,
            MapId::G4 | MapId::H4 => 4,
        }
    }

    /// Evaluate on a coordinate slice. Panics if `x.len() != self.dim()`.
    pub fn eval_slice(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MapId::F2 => eval_f(Point2::new(x[0], x[1])).coords().to_vec(),
            MapId::G4 => eval_g(Point4::new(x[0], x[1], x[2], x[3]))
                .coords()
                .to_vec(),
            MapId::H4 => eval_h(Point4::new(x[0], x[1], x[2], x[3]))
                .coords()
                .to_vec(),
        }
    }
}

impl std::fmt::Display for MapId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MapId::F2 => write!(f, "f"),
            MapId::G4 => write!(f, "g"),
            MapId::H4 => write!(f, "h"),
        }
    }
}

// The formulas are 1-homogeneous, so inputs near the overflow/underflow
// thresholds can be rescaled to magnitude ~1 without changing the result.
const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_BELOW: f64 = 1e-150;

fn rescale_factor(max_abs: f64) -> Option<f64> {
    if max_abs > RESCALE_ABOVE || (max_abs > 0.0 && max_abs < RESCALE_BELOW) {
        Some(max_abs)
    } else {
        None
    }
}

/// The planar angle-doubling map.
pub fn eval_f(p: Point2) -> Point2 {
    if p.is_origin() {
        return Point2::ORIGIN;
    }
    let m = p.c1().abs().max(p.c2().abs());
    if let Some(s) = rescale_factor(m) {
        return eval_f(p.scale(1.0 / s)).scale(s);
    }
    let (x1, x2) = (p.c1(), p.c2());
    let r = (x1 * x1 + x2 * x2).sqrt();
    Point2::new((x1 * x1 - x2 * x2) / r, 2.0 * x1 * x2 / r)
}

/// The blockwise extension: the f-formula on each coordinate pair, with a
/// zero block mapped to zero.
pub fn eval_g(p: Point4) -> Point4 {
    Point4::from_blocks(eval_f(p.block1()), eval_f(p.block2()))
}

/// The shared-norm variant: f-numerators on both blocks, divided by the
/// full norm of the input.
pub fn eval_h(p: Point4) -> Point4 {
    if p.is_origin() {
        return Point4::ORIGIN;
    }
    let c = p.coords();
    let m = c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    if let Some(s) = rescale_factor(m) {
        return eval_h(p.scale(1.0 / s)).scale(s);
    }
    let [x1, x2, x3, x4] = c;
    let r = p.norm();
    Point4::new(
        (x1 * x1 - x2 * x2) / r,
        2.0 * x1 * x2 / r,
        (x3 * x3 - x4 * x4) / r,
        2.0 * x3 * x4 / r,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn f_fixed_point_on_axis() {
        assert_eq!(eval_f(Point2::new(1.0, 0.0)), Point2::new(1.0, 0.0));
    }

    #[test]
    fn f_origin_maps_to_origin() {
        assert_eq!(eval_f(Point2::ORIGIN), Point2::ORIGIN);
    }

    #[test]
    fn f_direct_evaluation() {
        // (3,4): ((9−16)/5, 24/5); the image norm must equal 5.
        let y = eval_f(Point2::new(3.0, 4.0));
        assert_abs_diff_eq!(y.c1(), -1.4, epsilon = 1e-14);
        assert_abs_diff_eq!(y.c2(), 4.8, epsilon = 1e-14);
        assert_abs_diff_eq!(y.norm(), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn g_pure_coordinate_blocks() {
        let y = eval_g(Point4::new(1.0, 0.0, 0.0, 1.0));
        assert_eq!(y, Point4::new(1.0, 0.0, -1.0, 0.0));
    }

    #[test]
    fn g_origin_and_zero_block() {
        assert_eq!(eval_g(Point4::ORIGIN), Point4::ORIGIN);
        let y = eval_g(Point4::new(3.0, 4.0, 0.0, 0.0));
        assert_abs_diff_eq!(y.coords()[0], -1.4, epsilon = 1e-14);
        assert_abs_diff_eq!(y.coords()[1], 4.8, epsilon = 1e-14);
        assert_eq!(y.coords()[2], 0.0);
        assert_eq!(y.coords()[3], 0.0);
    }

    #[test]
    fn h_examples() {
        assert_eq!(
            eval_h(Point4::new(1.0, 0.0, 0.0, 0.0)),
            Point4::new(1.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(eval_h(Point4::ORIGIN), Point4::ORIGIN);
        let y = eval_h(Point4::new(1.0, 0.0, 1.0, 0.0));
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert_abs_diff_eq!(y.coords()[0], inv_sqrt2, epsilon = 1e-15);
        assert_abs_diff_eq!(y.coords()[2], inv_sqrt2, epsilon = 1e-15);
        assert_eq!(y.coords()[1], 0.0);
        assert_eq!(y.coords()[3], 0.0);
    }

    #[test]
    fn f_total_at_extreme_magnitudes() {
        for &s in &[1e-300, 1e-200, 1e200, 1e300] {
            let y = eval_f(Point2::new(3.0 * s, 4.0 * s));
            assert!(y.coords().iter().all(|v| v.is_finite()));
            assert_abs_diff_eq!(y.norm() / (5.0 * s), 1.0, epsilon = 1e-12);
        }
        // the plain norm of the output underflows here; check components
        let y = eval_h(Point4::new(1e-300, 0.0, 1e-300, 0.0));
        assert!(y.coords().iter().all(|v| v.is_finite()));
        assert!(y.coords()[0] > 0.0 && y.coords()[2] > 0.0);
    }

    fn coord() -> impl Strategy<Value = f64> {
        // Moderate magnitudes keep the norms themselves representable.
        prop_oneof![-1e150..1e150_f64, -10.0..10.0_f64, -1e-140..1e-140_f64]
    }

    proptest! {
        #[test]
        fn f_preserves_norm(a in coord(), b in coord()) {
            let p = Point2::new(a, b);
            let tol = 4.0 * f64::EPSILON * p.norm();
            prop_assert!((eval_f(p).norm() - p.norm()).abs() <= tol);
        }

        #[test]
        fn g_preserves_norm(a in coord(), b in coord(), c in coord(), d in coord()) {
            let p = Point4::new(a, b, c, d);
            let tol = 4.0 * f64::EPSILON * p.norm();
            prop_assert!((eval_g(p).norm() - p.norm()).abs() <= tol);
        }

        #[test]
        fn f_doubles_the_angle(r in 1e-6..100.0_f64, t in -3.1..3.1_f64) {
            let p = Point2::new(r * t.cos(), r * t.sin());
            let y = eval_f(p);
            prop_assert!((y.c1() - r * (2.0 * t).cos()).abs() <= 1e-12);
            prop_assert!((y.c2() - r * (2.0 * t).sin()).abs() <= 1e-12);
        }

        #[test]
        fn h_norm_identity(a in -20.0..20.0_f64, b in -20.0..20.0_f64,
                           c in -20.0..20.0_f64, d in -20.0..20.0_f64) {
            let p = Point4::new(a, b, c, d);
            prop_assume!(!p.is_origin());
            let lhs = eval_h(p).norm_sq() * p.norm_sq();
            let s1 = a * a + b * b;
            let s2 = c * c + d * d;
            let rhs = s1 * s1 + s2 * s2;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1.0));
            // norm-decreasing, with equality exactly when one block is zero
            prop_assert!(eval_h(p).norm() <= p.norm() * (1.0 + 1e-12));
            if s1 == 0.0 || s2 == 0.0 {
                prop_assert!((eval_h(p).norm() - p.norm()).abs() <= 1e-12 * p.norm());
            }
        }

        #[test]
        fn f_vanishes_continuously_at_origin(scale in 1e-160..1e-3_f64, t in -3.1..3.1_f64) {
            let p = Point2::new(scale * t.cos(), scale * t.sin());
            prop_assert!(eval_f(p).norm() <= scale * (1.0 + 1e-12));
        }
    }
}
