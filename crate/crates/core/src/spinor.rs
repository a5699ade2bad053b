//! Complex 2-vector / 2x2-matrix algebra for spin-1/2 lattice fields.
//!
//! A [`Spinor`] holds the two internal-state amplitudes at one lattice site.
//! [`Mat2`] covers the operators acting on it: the Pauli matrices, the
//! spin-rotation hop `R = exp(-i sigma_y alpha)` and its integer powers.
//! Everything here is a total function over value types.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Two complex amplitudes (pseudo-spin-up, pseudo-spin-down) at one site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub up: C64,
    pub down: C64,
}

impl Spinor {
    pub const ZERO: Spinor = Spinor {
        up: C64::new(0.0, 0.0),
        down: C64::new(0.0, 0.0),
    };

    pub fn new(up: C64, down: C64) -> Self {
        Spinor { up, down }
    }

    /// `sigma_y` eigenstate `u_+ = (1, i)^T` (eigenvalue +1).
    pub fn u_plus() -> Self {
        Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0))
    }

    /// `sigma_y` eigenstate `u_- = (1, -i)^T` (eigenvalue -1).
    pub fn u_minus() -> Self {
        Spinor::new(C64::new(1.0, 0.0), C64::new(0.0, -1.0))
    }

    /// Inner product `self^dag other`.
    pub fn dot(&self, other: &Spinor) -> C64 {
        self.up.conj() * other.up + self.down.conj() * other.down
    }

    /// `psi^dag psi`.
    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn conj(&self) -> Spinor {
        Spinor::new(self.up.conj(), self.down.conj())
    }

    pub fn scale(&self, s: C64) -> Spinor {
        Spinor::new(self.up * s, self.down * s)
    }

    pub fn is_finite(&self) -> bool {
        self.up.re.is_finite()
            && self.up.im.is_finite()
            && self.down.re.is_finite()
            && self.down.im.is_finite()
    }
}

impl Add for Spinor {
    type Output = Spinor;
    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.up + rhs.up, self.down + rhs.down)
    }
}

impl Sub for Spinor {
    type Output = Spinor;
    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.up - rhs.up, self.down - rhs.down)
    }
}

impl Neg for Spinor {
    type Output = Spinor;
    fn neg(self) -> Spinor {
        Spinor::new(-self.up, -self.down)
    }
}

impl Mul<Spinor> for C64 {
    type Output = Spinor;
    fn mul(self, rhs: Spinor) -> Spinor {
        rhs.scale(self)
    }
}

impl Mul<Spinor> for f64 {
    type Output = Spinor;
    fn mul(self, rhs: Spinor) -> Spinor {
        rhs.scale(C64::new(self, 0.0))
    }
}

/// Complex 2x2 matrix, row-major entries `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Self {
        Mat2::from_real(1.0, 0.0, 0.0, 1.0)
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(
            C64::new(a, 0.0),
            C64::new(b, 0.0),
            C64::new(c, 0.0),
            C64::new(d, 0.0),
        )
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Mat2 {
        Mat2::new(
            self.a.conj(),
            self.c.conj(),
            self.b.conj(),
            self.d.conj(),
        )
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        Mat2::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// Column `k` (0 or 1) as a spinor.
    pub fn column(&self, k: usize) -> Spinor {
        match k {
            0 => Spinor::new(self.a, self.c),
            _ => Spinor::new(self.b, self.d),
        }
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        let d = [
            (self.a - other.a).norm(),
            (self.b - other.b).norm(),
            (self.c - other.c).norm(),
            (self.d - other.d).norm(),
        ];
        d.into_iter().fold(0.0, f64::max)
    }
}

impl Mul<Spinor> for Mat2 {
    type Output = Spinor;
    fn mul(self, v: Spinor) -> Spinor {
        Spinor::new(self.a * v.up + self.b * v.down, self.c * v.up + self.d * v.down)
    }
}

impl Mul<Mat2> for Mat2 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        Mat2::new(
            self.a * m.a + self.b * m.c,
            self.a * m.b + self.b * m.d,
            self.c * m.a + self.d * m.c,
            self.c * m.b + self.d * m.d,
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, m: Mat2) -> Mat2 {
        Mat2::new(self.a + m.a, self.b + m.b, self.c + m.c, self.d + m.d)
    }
}

/// Real 3-vector of spin expectation values `psi^dag sigma psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinVector {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Self {
        SpinVector { sx, sy, sz }
    }

    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    pub fn scale(&self, s: f64) -> SpinVector {
        SpinVector::new(self.sx * s, self.sy * s, self.sz * s)
    }

    pub fn max_abs_diff(&self, other: &SpinVector) -> f64 {
        (self.sx - other.sx)
            .abs()
            .max((self.sy - other.sy).abs())
            .max((self.sz - other.sz).abs())
    }

    /// Rotation about the y-axis by `angle`, the vector image of one lattice hop.
    pub fn rotated_about_y(&self, angle: f64) -> SpinVector {
        let (s, c) = angle.sin_cos();
        SpinVector::new(
            self.sx * c + self.sz * s,
            self.sy,
            self.sz * c - self.sx * s,
        )
    }
}

/// Pauli matrix axis tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl std::str::FromStr for Axis {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(crate::Error::validation(format!(
                "invalid Pauli axis '{other}' (expected x, y, or z)"
            ))),
        }
    }
}

/// Standard Pauli matrix for the given axis.
pub fn pauli(axis: Axis) -> Mat2 {
    match axis {
        Axis::X => Mat2::from_real(0.0, 1.0, 1.0, 0.0),
        Axis::Y => Mat2::new(
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ),
        Axis::Z => Mat2::from_real(1.0, 0.0, 0.0, -1.0),
    }
}

/// `R^n = exp(-i sigma_y n alpha)`, the spin rotation carried by `n` lattice hops.
///
/// Evaluated in closed form as `[[cos(n alpha), -sin(n alpha)], [sin(n alpha), cos(n alpha)]]`
/// rather than by repeated multiplication, so large `|n|` accumulates no error.
pub fn rotation_matrix(alpha: f64, n: i64) -> Mat2 {
    let (s, c) = (n as f64 * alpha).sin_cos();
    Mat2::from_real(c, -s, s, c)
}

/// Spin expectation vector `(psi^dag sigma_x psi, psi^dag sigma_y psi, psi^dag sigma_z psi)`.
pub fn spin_expectation(psi: &Spinor) -> SpinVector {
    let cross = psi.up.conj() * psi.down;
    SpinVector::new(
        2.0 * cross.re,
        2.0 * cross.im,
        psi.up.norm_sqr() - psi.down.norm_sqr(),
    )
}
