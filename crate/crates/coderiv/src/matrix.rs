//! Small dense matrices for the derivative calculus.
//!
//! Jacobians in this crate are stored gradient-per-row: entry `(i, j)` holds
//! the partial derivative of output component `j` with respect to input
//! coordinate `i`. With that layout
//!
//! * [`Mat2::apply`] (`M·v`) realizes the adjoint (coderivative) action on a
//!   dual vector, and
//! * [`Mat2::tr_apply`] (`Mᵀ·v`) realizes the primal directional derivative
//!   of the mapping.
//!
//! Singular values are computed by a closed form in the 2×2 case and by a
//! cyclic Jacobi eigensolver on `MᵀM` in the 4×4 case; both are accurate to
//! around 1e−14 relative for well-scaled inputs, comfortably inside the
//! 1e−12 contract the covering estimator relies on.

use crate::point::{Point2, Point4};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    e: [[f64; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat4 {
    e: [[f64; 4]; 4],
}

impl Mat2 {
    pub fn new(e: [[f64; 2]; 2]) -> Mat2 {
        assert!(
            e.iter().flatten().all(|v| v.is_finite()),
            "non-finite matrix entry"
        );
        Mat2 { e }
    }

    pub fn zero() -> Mat2 {
        Mat2 { e: [[0.0; 2]; 2] }
    }

    pub fn identity() -> Mat2 {
        Mat2::new([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn entries(&self) -> &[[f64; 2]; 2] {
        &self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    pub fn transpose(&self) -> Mat2 {
        Mat2::new([[self.e[0][0], self.e[1][0]], [self.e[0][1], self.e[1][1]]])
    }

    /// `M·v`.
    pub fn apply(&self, v: Point2) -> Point2 {
        Point2::new(
            self.e[0][0] * v.c1() + self.e[0][1] * v.c2(),
            self.e[1][0] * v.c1() + self.e[1][1] * v.c2(),
        )
    }

    /// `Mᵀ·v`.
    pub fn tr_apply(&self, v: Point2) -> Point2 {
        self.transpose().apply(v)
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        let mut e = self.e;
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] -= other.e[i][j];
            }
        }
        Mat2::new(e)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.e.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn det(&self) -> f64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    /// Singular values in descending order, by the stable closed form.
    pub fn singular_values(&self) -> [f64; 2] {
        let [[a, b], [c, d]] = self.e;
        let e = 0.5 * (a + d);
        let f = 0.5 * (a - d);
        let g = 0.5 * (c + b);
        let h = 0.5 * (c - b);
        let q = e.hypot(h);
        let r = f.hypot(g);
        [q + r, (q - r).abs()]
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values()[1]
    }

    /// Solve `M·x = rhs` by Cramer's rule. `None` when the determinant is
    /// negligible relative to the entries.
    pub fn solve(&self, rhs: Point2) -> Option<Point2> {
        let det = self.det();
        let scale = self.max_abs_entry();
        if det.abs() <= 1e-14 * scale * scale {
            return None;
        }
        let x1 = (rhs.c1() * self.e[1][1] - self.e[0][1] * rhs.c2()) / det;
        let x2 = (self.e[0][0] * rhs.c2() - rhs.c1() * self.e[1][0]) / det;
        Some(Point2::new(x1, x2))
    }
}

impl Mat4 {
    pub fn new(e: [[f64; 4]; 4]) -> Mat4 {
        assert!(
            e.iter().flatten().all(|v| v.is_finite()),
            "non-finite matrix entry"
        );
        Mat4 { e }
    }

    pub fn zero() -> Mat4 {
        Mat4 { e: [[0.0; 4]; 4] }
    }

    pub fn identity() -> Mat4 {
        let mut e = [[0.0; 4]; 4];
        for (i, row) in e.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Mat4 { e }
    }

    /// Block-diagonal assembly from two 2×2 blocks; off-block entries are
    /// exactly zero.
    pub fn block_diag(b1: &Mat2, b2: &Mat2) -> Mat4 {
        let mut e = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                e[i][j] = b1.entry(i, j);
                e[i + 2][j + 2] = b2.entry(i, j);
            }
        }
        Mat4 { e }
    }

    pub fn entries(&self) -> &[[f64; 4]; 4] {
        &self.e
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    pub fn transpose(&self) -> Mat4 {
        let mut e = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] = self.e[j][i];
            }
        }
        Mat4 { e }
    }

    /// `M·v`.
    pub fn apply(&self, v: Point4) -> Point4 {
        let x = v.coords();
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = (0..4).map(|j| self.e[i][j] * x[j]).sum();
        }
        Point4::from_coords(out)
    }

    /// `Mᵀ·v`.
    pub fn tr_apply(&self, v: Point4) -> Point4 {
        self.transpose().apply(v)
    }

    pub fn sub(&self, other: &Mat4) -> Mat4 {
        let mut e = self.e;
        for i in 0..4 {
            for j in 0..4 {
                e[i][j] -= other.e[i][j];
            }
        }
        Mat4::new(e)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.e.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    /// Singular values in descending order via eigenvalues of `MᵀM`.
    pub fn singular_values(&self) -> [f64; 4] {
        let mut gram = [[0.0; 4]; 4];
        for j in 0..4 {
            for k in j..4 {
                let dot: f64 = (0..4).map(|i| self.e[i][j] * self.e[i][k]).sum();
                gram[j][k] = dot;
                gram[k][j] = dot;
            }
        }
        let mut eig = sym_eigenvalues_4(gram);
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut sv = [0.0; 4];
        for (s, l) in sv.iter_mut().zip(eig) {
            *s = l.max(0.0).sqrt();
        }
        sv
    }

    pub fn sigma_min(&self) -> f64 {
        self.singular_values()[3]
    }
}

/// Eigenvalues of a symmetric 4×4 matrix by cyclic Jacobi rotations.
///
/// Sweeps annihilate each off-diagonal pair in turn; the off-diagonal norm
/// is reduced quadratically and 4–6 sweeps reach machine precision.
fn sym_eigenvalues_4(mut a: [[f64; 4]; 4]) -> [f64; 4] {
    let n = 4;
    for _sweep in 0..30 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum();
        if off <= 1e-300 {
            break;
        }
        let scale = (0..n).map(|i| a[i][i].abs()).fold(0.0_f64, f64::max);
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    [a[0][0], a[1][1], a[2][2], a[3][3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn svd2_diagonal() {
        let m = Mat2::new([[1.0, 0.0], [0.0, 2.0]]);
        assert_eq!(m.singular_values(), [2.0, 1.0]);
        assert_eq!(m.sigma_min(), 1.0);
    }

    #[test]
    fn svd4_identity() {
        assert_abs_diff_eq!(Mat4::identity().sigma_min(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn svd4_known_spectrum() {
        // diag(3, -1, 0.5, 2) has singular values {3, 2, 1, 0.5}.
        let mut e = [[0.0; 4]; 4];
        e[0][0] = 3.0;
        e[1][1] = -1.0;
        e[2][2] = 0.5;
        e[3][3] = 2.0;
        let sv = Mat4::new(e).singular_values();
        let expected = [3.0, 2.0, 1.0, 0.5];
        for (s, x) in sv.iter().zip(expected) {
            assert_abs_diff_eq!(*s, x, epsilon = 1e-13);
        }
    }

    #[test]
    fn apply_and_tr_apply() {
        let m = Mat2::new([[1.0, 2.0], [3.0, 4.0]]);
        let v = Point2::new(1.0, -1.0);
        assert_eq!(m.apply(v), Point2::new(-1.0, -1.0));
        assert_eq!(m.tr_apply(v), Point2::new(-2.0, -2.0));
    }

    #[test]
    fn solve_2x2() {
        let m = Mat2::new([[2.0, 1.0], [1.0, 3.0]]);
        let rhs = Point2::new(5.0, 10.0);
        let x = m.solve(rhs).unwrap();
        assert_abs_diff_eq!((m.apply(x) - rhs).norm(), 0.0, epsilon = 1e-12);
        assert!(Mat2::new([[1.0, 2.0], [2.0, 4.0]]).solve(rhs).is_none());
    }

    proptest! {
        // σ_min is the actual minimum of ‖M·y‖ over unit y: no sampled
        // direction beats it, and some direction comes close.
        #[test]
        fn sigma_min_is_min_of_action_4(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut e = [[0.0; 4]; 4];
            for row in e.iter_mut() {
                for v in row.iter_mut() {
                    *v = rng.gen_range(-2.0..2.0);
                }
            }
            let m = Mat4::new(e);
            let smin = m.sigma_min();
            let mut best = f64::INFINITY;
            for _ in 0..2000 {
                let mut y = [0.0; 4];
                for v in y.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let n = (y.iter().map(|v| v * v).sum::<f64>()).sqrt();
                prop_assume!(n > 1e-8);
                let p = Point4::from_coords(y).scale(1.0 / n);
                best = best.min(m.apply(p).norm());
            }
            prop_assert!(best >= smin - 1e-9);
            prop_assert!(best <= smin + 0.8); // sampling overshoot is bounded
        }
    }
}
