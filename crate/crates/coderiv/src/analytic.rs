//! Closed-form Fréchet derivatives and the full coderivative case analysis
//! for the three mappings.
//!
//! Away from the origin the planar map is smooth and its derivative matrix
//! has singular values exactly {1, 2} at every point; the coderivative is
//! the singleton adjoint action. At the origin the map is neither Fréchet
//! nor Mordukhovich differentiable: the coderivative set is empty for every
//! nonzero dual vector and degenerates to {0} at the zero dual vector.
//!
//! The blockwise extension `g` inherits this structure per block. At a
//! point with exactly one zero block the coderivative is nonempty only for
//! dual vectors whose matching block vanishes ("admissible" dual vectors);
//! on that subspace it acts through the surviving block's adjoint.
//!
//! Matrices follow the gradient-per-row layout of [`crate::matrix`]: entry
//! `(i, j)` is ∂(component j)/∂(coordinate i), and `apply(y)` is the
//! coderivative action on a dual vector `y`.

use crate::error::{Error, Result};
use crate::matrix::{Mat2, Mat4};
use crate::point::{Point2, Point4};

/// Outcome of a coderivative query: the set value at one `(z, y)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoderivResult<P> {
    /// The singleton adjoint image at a point of differentiability (or, for
    /// the blockwise map, on the admissible dual subspace).
    Unique(P),
    /// The set {0}: only the zero vector satisfies the defining limit
    /// inequality. Occurs at the origin with a zero dual vector.
    SingletonTheta,
    /// The empty set.
    Empty,
}

impl<P> CoderivResult<P> {
    pub fn is_empty(&self) -> bool {
        matches!(self, CoderivResult::Empty)
    }

    pub fn unique(self) -> Option<P> {
        match self {
            CoderivResult::Unique(p) => Some(p),
            _ => None,
        }
    }
}

/// Derivative matrix of the planar map at `z ≠ 0`.
///
/// With `S = z1² + z2²` and `D = S·√S` the entries are
///
/// ```text
/// [ (z1² + 3·z2²)·z1 / D     2·z2³ / D ]
/// [ −(3·z1² + z2²)·z2 / D    2·z1³ / D ]
/// ```
///
/// Row `i` holds the partials with respect to coordinate `i`.
pub fn jacobian_f(z: Point2) -> Result<Mat2> {
    if z.is_origin() {
        return Err(Error::domain(
            "the planar map is not Fréchet differentiable at the origin",
        ));
    }
    let (z1, z2) = (z.c1(), z.c2());
    let s = z1 * z1 + z2 * z2;
    // s·sqrt(s) rather than powf(1.5): keeps the entries aligned with the
    // factored closed forms.
    let d = s * s.sqrt();
    Ok(Mat2::new([
        [(z1 * z1 + 3.0 * z2 * z2) * z1 / d, 2.0 * z2 * z2 * z2 / d],
        [-(3.0 * z1 * z1 + z2 * z2) * z2 / d, 2.0 * z1 * z1 * z1 / d],
    ]))
}

/// Coderivative matrix of the planar map at `z ≠ 0`: the transpose of
/// [`jacobian_f`]. Acting on a dual vector means multiplying the row vector
/// `y` from the left, i.e. `tr_apply`.
pub fn coderivative_matrix_f(z: Point2) -> Result<Mat2> {
    Ok(jacobian_f(z)?.transpose())
}

/// The coderivative set of the planar map at `(z, y)`.
pub fn coderivative_f(z: Point2, y: Point2) -> CoderivResult<Point2> {
    if !z.is_origin() {
        let jac = jacobian_f(z).expect("nonzero point");
        return CoderivResult::Unique(jac.apply(y));
    }
    // At the origin the six directional conditions force x = y = 0, and the
    // pair (0, 0) makes the defining quotient vanish identically.
    if y.is_origin() {
        CoderivResult::SingletonTheta
    } else {
        CoderivResult::Empty
    }
}

/// Derivative matrix of the blockwise map at a point with both blocks
/// nonzero: block-diagonal with two planar-map blocks.
pub fn jacobian_g(z: Point4) -> Result<Mat4> {
    let b1 = z.block1();
    let b2 = z.block2();
    if b1.is_origin() || b2.is_origin() {
        return Err(Error::domain(
            "the blockwise map is not Fréchet differentiable where a block vanishes",
        ));
    }
    Ok(Mat4::block_diag(
        &jacobian_f(b1).expect("nonzero block"),
        &jacobian_f(b2).expect("nonzero block"),
    ))
}

/// Coderivative matrix of the blockwise map (transpose of [`jacobian_g`]).
pub fn coderivative_matrix_g(z: Point4) -> Result<Mat4> {
    Ok(jacobian_g(z)?.transpose())
}

/// Full coderivative case analysis for the blockwise map.
///
/// * Both blocks nonzero: the singleton adjoint action.
/// * Exactly one zero block: nonempty only when the dual vector's block
///   over the zero block vanishes; the surviving block acts alone.
/// * Both blocks zero: `{0}` at `y = 0`, empty otherwise.
pub fn coderivative_g(z: Point4, y: Point4) -> CoderivResult<Point4> {
    let (zb1, zb2) = (z.block1(), z.block2());
    let (yb1, yb2) = (y.block1(), y.block2());
    match (zb1.is_origin(), zb2.is_origin()) {
        (false, false) => {
            let jac = jacobian_g(z).expect("nondegenerate point");
            CoderivResult::Unique(jac.apply(y))
        }
        (true, false) => {
            if yb1.is_origin() {
                let jac = jacobian_f(zb2).expect("nonzero block");
                CoderivResult::Unique(Point4::from_blocks(Point2::ORIGIN, jac.apply(yb2)))
            } else {
                CoderivResult::Empty
            }
        }
        (false, true) => {
            if yb2.is_origin() {
                let jac = jacobian_f(zb1).expect("nonzero block");
                CoderivResult::Unique(Point4::from_blocks(jac.apply(yb1), Point2::ORIGIN))
            } else {
                CoderivResult::Empty
            }
        }
        (true, true) => {
            if y.is_origin() {
                CoderivResult::SingletonTheta
            } else {
                CoderivResult::Empty
            }
        }
    }
}

/// Derivative matrix of the shared-norm map at `z ≠ 0`, common denominator
/// `‖z‖³`.
///
/// The second and fourth columns are the gradients of `2·z1·z2/‖z‖` and
/// `2·z3·z4/‖z‖`; because the denominator couples the blocks these are
/// `2·z2·(‖z‖² − z1²)`-type expressions, which collapse to the planar
/// `2·z2³` form only when the other block vanishes. Every entry is
/// certified against central finite differences.
pub fn jacobian_h(z: Point4) -> Result<Mat4> {
    if z.is_origin() {
        return Err(Error::domain(
            "the shared-norm map is not Fréchet differentiable at the origin",
        ));
    }
    let [z1, z2, z3, z4] = z.coords();
    let n2 = z.norm_sq();
    let d = n2 * n2.sqrt();
    let (q1, q2, q3, q4) = (z1 * z1, z2 * z2, z3 * z3, z4 * z4);
    let e = [
        [
            (q1 + 3.0 * q2 + 2.0 * q3 + 2.0 * q4) * z1 / d,
            2.0 * z2 * (n2 - q1) / d,
            -(q3 - q4) * z1 / d,
            -2.0 * z3 * z4 * z1 / d,
        ],
        [
            -(3.0 * q1 + q2 + 2.0 * q3 + 2.0 * q4) * z2 / d,
            2.0 * z1 * (n2 - q2) / d,
            -(q3 - q4) * z2 / d,
            -2.0 * z3 * z4 * z2 / d,
        ],
        [
            -(q1 - q2) * z3 / d,
            -2.0 * z1 * z2 * z3 / d,
            (2.0 * q1 + 2.0 * q2 + q3 + 3.0 * q4) * z3 / d,
            2.0 * z4 * (n2 - q3) / d,
        ],
        [
            -(q1 - q2) * z4 / d,
            -2.0 * z1 * z2 * z4 / d,
            -(2.0 * q1 + 2.0 * q2 + 3.0 * q3 + q4) * z4 / d,
            2.0 * z3 * (n2 - q4) / d,
        ],
    ];
    Ok(Mat4::new(e))
}

/// Coderivative matrix of the shared-norm map (transpose of [`jacobian_h`]).
pub fn coderivative_matrix_h(z: Point4) -> Result<Mat4> {
    Ok(jacobian_h(z)?.transpose())
}

/// Right-hand side of the planar expansion identity:
///
/// ```text
/// ‖D*f(z) y‖² = y1² + y2² + 12·(y1·z1·z2/S − y2·(z1² − z2²)/(2S))²,
/// ```
///
/// with `S = z1² + z2²`. The correction term vanishes exactly on the
/// equality locus `y1·z1·z2 = y2·(z1² − z2²)/2`.
pub fn norm_identity_rhs_f(z: Point2, y: Point2) -> Result<f64> {
    if z.is_origin() {
        return Err(Error::domain("expansion identity requires z != 0"));
    }
    let s = z.norm_sq();
    let corr = y.c1() * z.c1() * z.c2() / s - y.c2() * (z.c1() * z.c1() - z.c2() * z.c2()) / (2.0 * s);
    Ok(y.norm_sq() + 12.0 * corr * corr)
}

/// Blockwise expansion identity for the blockwise map: `‖y‖²` plus one
/// correction term per nonzero block. A zero block requires the matching
/// dual block to vanish.
pub fn norm_identity_rhs_g(z: Point4, y: Point4) -> Result<f64> {
    let (zb1, zb2) = (z.block1(), z.block2());
    let (yb1, yb2) = (y.block1(), y.block2());
    if zb1.is_origin() && zb2.is_origin() {
        return Err(Error::domain("expansion identity requires z != 0"));
    }
    let mut total = y.norm_sq();
    for (zb, yb) in [(zb1, yb1), (zb2, yb2)] {
        if zb.is_origin() {
            if !yb.is_origin() {
                return Err(Error::domain(
                    "a zero block admits only dual vectors with a zero matching block",
                ));
            }
            continue;
        }
        total += norm_identity_rhs_f(zb, yb)? - yb.norm_sq();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn assert_mat2_eq(m: &Mat2, expected: [[f64; 2]; 2], tol: f64) {
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(m.entry(i, j), expected[i][j], epsilon = tol);
            }
        }
    }

    fn assert_mat4_eq(m: &Mat4, expected: [[f64; 4]; 4], tol: f64) {
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(m.entry(i, j), expected[i][j], epsilon = tol);
            }
        }
    }

    #[test]
    fn jacobian_f_reference_points() {
        let m = jacobian_f(Point2::new(1.0, 0.0)).unwrap();
        assert_mat2_eq(&m, [[1.0, 0.0], [0.0, 2.0]], 0.0);

        let m = jacobian_f(Point2::new(0.0, 1.0)).unwrap();
        assert_mat2_eq(&m, [[0.0, 2.0], [-1.0, 0.0]], 0.0);

        let m = jacobian_f(Point2::new(1.0, 1.0)).unwrap();
        assert_mat2_eq(
            &m,
            [[SQRT2, 1.0 / SQRT2], [-SQRT2, 1.0 / SQRT2]],
            1e-15,
        );
    }

    #[test]
    fn jacobian_f_matches_finite_differences() {
        for z in [
            Point2::new(1.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 1.0),
            Point2::new(-0.3, 2.7),
        ] {
            let analytic = jacobian_f(z).unwrap();
            let fd = oracles::fd_jacobian_f(z, 1e-5).unwrap();
            assert!(analytic.sub(&fd).max_abs_entry() < 1e-8);
        }
    }

    #[test]
    fn jacobian_f_rejects_origin() {
        assert!(matches!(
            jacobian_f(Point2::ORIGIN),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn coderivative_matrix_is_the_transpose() {
        let m = coderivative_matrix_f(Point2::new(1.0, 0.0)).unwrap();
        assert_mat2_eq(&m, [[1.0, 0.0], [0.0, 2.0]], 0.0);
        let m = coderivative_matrix_f(Point2::new(0.0, 1.0)).unwrap();
        assert_mat2_eq(&m, [[0.0, -1.0], [2.0, 0.0]], 0.0);
    }

    #[test]
    fn coderivative_f_cases() {
        // Origin, nonzero dual vector: empty set.
        assert!(coderivative_f(Point2::ORIGIN, Point2::new(0.3, -0.7)).is_empty());
        // Origin, zero dual vector: the singleton {0}.
        assert_eq!(
            coderivative_f(Point2::ORIGIN, Point2::ORIGIN),
            CoderivResult::SingletonTheta
        );
        // Smooth point: adjoint action.
        let x = coderivative_f(Point2::new(1.0, 0.0), Point2::new(0.0, 1.0))
            .unique()
            .unwrap();
        assert_eq!(x, Point2::new(0.0, 2.0));
    }

    #[test]
    fn jacobian_g_reference_and_errors() {
        let m = jacobian_g(Point4::new(1.0, 0.0, 0.0, 1.0)).unwrap();
        assert_mat4_eq(
            &m,
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 2.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 2.0],
                [0.0, 0.0, -1.0, 0.0],
            ],
            0.0,
        );
        assert!(jacobian_g(Point4::new(1.0, 0.0, 0.0, 0.0)).is_err());
        assert!(jacobian_g(Point4::ORIGIN).is_err());
    }

    #[test]
    fn jacobian_g_off_block_entries_are_exact_zeros() {
        let m = jacobian_g(Point4::new(0.3, -1.2, 2.0, 0.7)).unwrap();
        for i in 0..2 {
            for j in 2..4 {
                assert_eq!(m.entry(i, j), 0.0);
                assert_eq!(m.entry(j, i), 0.0);
            }
        }
    }

    #[test]
    fn coderivative_g_cases() {
        // One zero block, dual vector alive over it: empty.
        let r = coderivative_g(
            Point4::new(0.0, 0.0, 1.0, 0.0),
            Point4::new(0.5, 0.0, 0.0, 0.0),
        );
        assert!(r.is_empty());

        // One zero block, admissible dual vector: surviving-block action.
        let x = coderivative_g(
            Point4::new(0.0, 0.0, 1.0, 0.0),
            Point4::new(0.0, 0.0, 0.0, 1.0),
        )
        .unique()
        .unwrap();
        assert_eq!(x, Point4::new(0.0, 0.0, 0.0, 2.0));

        assert_eq!(
            coderivative_g(Point4::ORIGIN, Point4::ORIGIN),
            CoderivResult::SingletonTheta
        );
        assert!(coderivative_g(Point4::ORIGIN, Point4::new(0.0, 0.0, 1.0, 0.0)).is_empty());
    }

    #[test]
    fn jacobian_h_axis_point() {
        // Frozen from the central-difference oracle: with only the first
        // coordinate nonzero, rows three and four vanish entirely (the
        // second-block components are quadratically flat there).
        let m = jacobian_h(Point4::new(1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_mat4_eq(
            &m,
            [
                [1.0, 0.0, 0.0, 0.0],
                [0.0, 2.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
                [0.0, 0.0, 0.0, 0.0],
            ],
            0.0,
        );
        let fd = oracles::fd_jacobian_h(Point4::new(1.0, 0.0, 0.0, 0.0), 1e-5).unwrap();
        assert!(m.sub(&fd).max_abs_entry() < 1e-8);
    }

    #[test]
    fn jacobian_h_all_ones() {
        // ‖z‖³ = 8 at (1,1,1,1); frozen from the finite-difference oracle.
        let m = jacobian_h(Point4::new(1.0, 1.0, 1.0, 1.0)).unwrap();
        let expected = [
            [1.0, 0.75, 0.0, -0.25],
            [-1.0, 0.75, 0.0, -0.25],
            [0.0, -0.25, 1.0, 0.75],
            [0.0, -0.25, -1.0, 0.75],
        ];
        assert_mat4_eq(&m, expected, 1e-15);
        let fd = oracles::fd_jacobian_h(Point4::new(1.0, 1.0, 1.0, 1.0), 1e-5).unwrap();
        assert!(m.sub(&fd).max_abs_entry() < 1e-6);
    }

    #[test]
    fn jacobian_h_rejects_origin() {
        assert!(jacobian_h(Point4::ORIGIN).is_err());
    }

    #[test]
    fn coderivative_matrices_are_transposes_for_all_maps() {
        let z4 = Point4::new(0.4, -1.3, 2.2, 0.9);
        let g = jacobian_g(z4).unwrap();
        let gt = coderivative_matrix_g(z4).unwrap();
        let h = jacobian_h(z4).unwrap();
        let ht = coderivative_matrix_h(z4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(gt.entry(i, j), g.entry(j, i));
                assert_eq!(ht.entry(i, j), h.entry(j, i));
            }
        }
        assert!(coderivative_matrix_h(Point4::ORIGIN).is_err());
    }

    #[test]
    fn norm_identity_reference_values() {
        let z = Point2::new(1.0, 0.0);
        assert_abs_diff_eq!(
            norm_identity_rhs_f(z, Point2::new(0.0, 1.0)).unwrap(),
            4.0,
            epsilon = 0.0
        );
        assert_abs_diff_eq!(
            norm_identity_rhs_f(z, Point2::new(1.0, 0.0)).unwrap(),
            1.0,
            epsilon = 0.0
        );
        assert_eq!(norm_identity_rhs_f(z, Point2::ORIGIN).unwrap(), 0.0);
        assert!(norm_identity_rhs_f(Point2::ORIGIN, z).is_err());
    }

    #[test]
    fn norm_identity_rhs_g_reference_values() {
        let v = norm_identity_rhs_g(
            Point4::new(1.0, 0.0, 1.0, 0.0),
            Point4::new(0.0, 1.0, 0.0, 1.0),
        )
        .unwrap();
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-14);

        let v = norm_identity_rhs_g(
            Point4::new(0.0, 0.0, 1.0, 0.0),
            Point4::new(0.0, 0.0, 1.0, 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 0.0);

        assert_eq!(
            norm_identity_rhs_g(Point4::new(1.0, 2.0, 3.0, 4.0), Point4::ORIGIN).unwrap(),
            0.0
        );
        // Zero block with a live dual block: precondition failure.
        assert!(norm_identity_rhs_g(
            Point4::new(0.0, 0.0, 1.0, 0.0),
            Point4::new(1.0, 0.0, 0.0, 0.0)
        )
        .is_err());
    }

    fn nonzero_point2() -> impl Strategy<Value = Point2> {
        (-10.0..10.0_f64, -10.0..10.0_f64)
            .prop_map(|(a, b)| Point2::new(a, b))
            .prop_filter("nonzero", |p| p.norm() > 1e-3)
    }

    proptest! {
        #[test]
        fn expansion_identity_holds(z in nonzero_point2(),
                                    ya in -5.0..5.0_f64, yb in -5.0..5.0_f64) {
            let y = Point2::new(ya, yb);
            let x = jacobian_f(z).unwrap().apply(y);
            let rhs = norm_identity_rhs_f(z, y).unwrap();
            prop_assert!((x.norm_sq() - rhs).abs() <= 1e-10 * rhs.max(1e-30));
        }

        #[test]
        fn coderivative_action_expands(z in nonzero_point2(),
                                       ya in -5.0..5.0_f64, yb in -5.0..5.0_f64) {
            let y = Point2::new(ya, yb);
            let x = jacobian_f(z).unwrap().apply(y);
            prop_assert!(x.norm_sq() >= y.norm_sq() * (1.0 - 1e-12));
        }

        #[test]
        fn equality_on_the_locus(z in nonzero_point2(), t in -4.0..4.0_f64) {
            // The locus direction is the image direction f(z)/‖z‖.
            let y = crate::mappings::eval_f(z).scale(t / z.norm());
            let x = jacobian_f(z).unwrap().apply(y);
            prop_assert!((x.norm() - y.norm()).abs() <= 1e-10 * y.norm().max(1e-30));
        }

        #[test]
        fn planar_singular_values_are_one_and_two(z in nonzero_point2()) {
            let sv = jacobian_f(z).unwrap().singular_values();
            prop_assert!((sv[0] - 2.0).abs() <= 1e-9);
            prop_assert!((sv[1] - 1.0).abs() <= 1e-9);
        }

        #[test]
        fn blockwise_expansion_identity(z1 in nonzero_point2(), z2 in nonzero_point2(),
                                        y1 in -3.0..3.0_f64, y2 in -3.0..3.0_f64,
                                        y3 in -3.0..3.0_f64, y4 in -3.0..3.0_f64) {
            let z = Point4::from_blocks(z1, z2);
            let y = Point4::new(y1, y2, y3, y4);
            let x = jacobian_g(z).unwrap().apply(y);
            let rhs = norm_identity_rhs_g(z, y).unwrap();
            prop_assert!((x.norm_sq() - rhs).abs() <= 1e-10 * rhs.max(1e-30));
        }
    }
}
