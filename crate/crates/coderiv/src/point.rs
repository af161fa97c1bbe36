//! Plain Euclidean vectors in dimensions two and four.
//!
//! Constructors reject non-finite coordinates; the rest of the crate can
//! then assume every point it touches is finite. The origin test used by
//! the mapping case splits is exact equality with zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    c1: f64,
    c2: f64,
}

/// A vector in four-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point4 {
    c1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { c1: 0.0, c2: 0.0 };

    /// Panics on NaN or infinite coordinates.
    pub fn new(c1: f64, c2: f64) -> Point2 {
        assert!(c1.is_finite() && c2.is_finite(), "non-finite coordinate");
        Point2 { c1, c2 }
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn coords(&self) -> [f64; 2] {
        [self.c1, self.c2]
    }

    pub fn from_coords(c: [f64; 2]) -> Point2 {
        Point2::new(c[0], c[1])
    }

    pub fn dot(&self, other: &Point2) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.c1.hypot(self.c2)
    }

    /// Exact zero test: both coordinates equal to 0.0.
    pub fn is_origin(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0
    }

    pub fn scale(&self, t: f64) -> Point2 {
        Point2::new(self.c1 * t, self.c2 * t)
    }

    /// Unit vector in the same direction. Panics at the origin.
    pub fn normalized(&self) -> Point2 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the origin");
        self.scale(1.0 / n)
    }
}

impl Point4 {
    pub const ORIGIN: Point4 = Point4 {
        c1: 0.0,
        c2: 0.0,
        c3: 0.0,
        c4: 0.0,
    };

    /// Panics on NaN or infinite coordinates.
    pub fn new(c1: f64, c2: f64, c3: f64, c4: f64) -> Point4 {
        assert!(
            c1.is_finite() && c2.is_finite() && c3.is_finite() && c4.is_finite(),
            "non-finite coordinate"
        );
        Point4 { c1, c2, c3, c4 }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.c1, self.c2, self.c3, self.c4]
    }

    pub fn from_coords(c: [f64; 4]) -> Point4 {
        Point4::new(c[0], c[1], c[2], c[3])
    }

    /// First coordinate pair.
    pub fn block1(&self) -> Point2 {
        Point2::new(self.c1, self.c2)
    }

    /// Second coordinate pair.
    pub fn block2(&self) -> Point2 {
        Point2::new(self.c3, self.c4)
    }

    pub fn from_blocks(b1: Point2, b2: Point2) -> Point4 {
        Point4::new(b1.c1, b1.c2, b2.c1, b2.c2)
    }

    pub fn dot(&self, other: &Point4) -> f64 {
        self.c1 * other.c1 + self.c2 * other.c2 + self.c3 * other.c3 + self.c4 * other.c4
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_origin(&self) -> bool {
        self.c1 == 0.0 && self.c2 == 0.0 && self.c3 == 0.0 && self.c4 == 0.0
    }

    pub fn scale(&self, t: f64) -> Point4 {
        Point4::new(self.c1 * t, self.c2 * t, self.c3 * t, self.c4 * t)
    }

    pub fn normalized(&self) -> Point4 {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the origin");
        self.scale(1.0 / n)
    }
}

macro_rules! impl_vector_ops {
    ($ty:ident, $($field:ident),+) => {
        impl Add for $ty {
            type Output = $ty;
            fn add(self, rhs: $ty) -> $ty {
                $ty::new($(self.$field + rhs.$field),+)
            }
        }

        impl Sub for $ty {
            type Output = $ty;
            fn sub(self, rhs: $ty) -> $ty {
                $ty::new($(self.$field - rhs.$field),+)
            }
        }

        impl Neg for $ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                $ty::new($(-self.$field),+)
            }
        }

        impl Mul<f64> for $ty {
            type Output = $ty;
            fn mul(self, t: f64) -> $ty {
                self.scale(t)
            }
        }
    };
}

impl_vector_ops!(Point2, c1, c2);
impl_vector_ops!(Point4, c1, c2, c3, c4);

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.c1, self.c2)
    }
}

impl fmt::Display for Point4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.c1, self.c2, self.c3, self.c4)
    }
}
