//! Fixed-size 2×2 real matrix kernels and angle helpers.
//!
//! Everything in the two-user channel model lives in the real composite
//! representation of a complex scalar, so a closed-form 2×2 type is all the
//! linear algebra the crate needs.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute symmetry / PSD tolerance for O(1) matrices.
pub const SYM_TOL: f64 = 1e-12;

/// Row-major 2×2 real matrix `[[a, b], [c, d]]`.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{:e}, {:e}], [{:e}, {:e}]]", self.a, self.b, self.c, self.d)
    }
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2::new(1.0, 0.0, 0.0, 1.0);
    pub const ZERO: Mat2 = Mat2::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn diag(x: f64, y: f64) -> Self {
        Self::new(x, 0.0, 0.0, y)
    }

    pub const fn symmetric(a: f64, b: f64, d: f64) -> Self {
        Self::new(a, b, b, d)
    }

    /// Outer product `u vᵀ`.
    pub fn outer(u: [f64; 2], v: [f64; 2]) -> Self {
        Self::new(u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1])
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a, self.c, self.b, self.d)
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(k * self.a, k * self.b, k * self.c, k * self.d)
    }

    pub fn max_abs(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    pub fn is_finite(&self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite()
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// `self · m · selfᵀ`, the congruence used for rotated interference.
    pub fn congruence(&self, m: &Mat2) -> Mat2 {
        *self * *m * self.transpose()
    }

    /// Largest absolute deviation between two matrices.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        Mat2::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// A plane angle in radians.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub fn radians(self) -> f64 {
        self.0
    }

    /// Representative in (−π, π].
    pub fn normalized(self) -> Angle {
        Angle(wrap_pi(self.0))
    }

    /// Representative in [0, 2π).
    pub fn normalized_2pi(self) -> Angle {
        Angle(wrap_2pi(self.0))
    }

    /// Representative in [0, π): rank-one quantities depend on Δτ modulo π.
    pub fn normalized_half_turn(self) -> Angle {
        let mut x = self.0.rem_euclid(PI);
        if x >= PI {
            x = 0.0;
        }
        Angle(x)
    }

    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    pub fn sin(self) -> f64 {
        self.0.sin()
    }
}

impl From<f64> for Angle {
    fn from(x: f64) -> Self {
        Angle(x)
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, o: Angle) -> Angle {
        Angle(self.0 + o.0)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, o: Angle) -> Angle {
        Angle(self.0 - o.0)
    }
}

/// Maps any real to (−π, π].
pub fn wrap_pi(x: f64) -> f64 {
    let y = wrap_2pi(x + PI) - PI;
    // wrap_2pi returns [0, 2π), so y ∈ [−π, π); fold −π onto π.
    if y <= -PI {
        y + TAU
    } else {
        y
    }
}

/// Maps any real to [0, 2π).
pub fn wrap_2pi(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// `[[cos φ, −sin φ], [sin φ, cos φ]]`.
pub fn rotation_matrix(phi: Angle) -> Mat2 {
    let (s, c) = phi.0.sin_cos();
    Mat2::new(c, -s, s, c)
}

pub fn det2(m: &Mat2) -> f64 {
    m.a * m.d - m.b * m.c
}

pub fn inv2(m: &Mat2) -> Result<Mat2> {
    let det = det2(m);
    let scale = m.max_abs();
    if !(det.abs() > 1e-14 * scale * scale) {
        return Err(Error::SingularMatrix { det });
    }
    Ok(Mat2::new(m.d / det, -m.b / det, -m.c / det, m.a / det))
}

pub fn is_symmetric(m: &Mat2, tol: f64) -> bool {
    (m.b - m.c).abs() <= tol * m.max_abs().max(1.0)
}

/// Eigenvalues of a symmetric matrix, largest first.
pub fn eig_sym2(m: &Mat2) -> Result<(f64, f64)> {
    if !is_symmetric(m, SYM_TOL) {
        return Err(Error::NotSymmetric { mismatch: (m.b - m.c).abs() });
    }
    let off = 0.5 * (m.b + m.c);
    let mean = 0.5 * (m.a + m.d);
    let radius = (0.5 * (m.a - m.d)).hypot(off);
    Ok((mean + radius, mean - radius))
}
