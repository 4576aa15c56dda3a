//! Numeric traits the rest of the crate is generic over.
//!
//! Geometry is written against [`Real`] (implemented for `f32` and `f64`),
//! and every exactly computable probability is written against
//! [`Probability`] (implemented for `f64` and [`BigRational`]).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Floating point scalar used for vectors, rotations and angles.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Sum + Send + Sync + 'static
{
    /// Absolute tolerance for angle comparisons modulo 2π.
    fn angle_tol() -> Self;

    /// Tolerance for orthogonality / norm checks.
    fn geom_tol() -> Self;

    /// Lossy conversion from `f64`.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("real scalar converts to f64")
    }
}

impl Real for f64 {
    fn angle_tol() -> Self {
        1e-9
    }
    fn geom_tol() -> Self {
        1e-9
    }
}

impl Real for f32 {
    fn angle_tol() -> Self {
        1e-5
    }
    fn geom_tol() -> Self {
        1e-5
    }
}

/// A probability value: either an exact rational or a float.
///
/// Enumeration routines are generic over this trait so the same code path
/// yields exact rationals for the certified figures and floats for quick
/// sweeps.
pub trait Probability:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Sum
    + Send
    + Sync
{
    /// `num / den`, exactly where the type allows it.
    fn ratio(num: u128, den: u128) -> Self;

    fn abs_diff(&self, other: &Self) -> Self;

    fn to_f64(&self) -> f64;

    /// Canonical text form; exact types render as `p/q`.
    fn render(&self) -> String;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Probability for f64 {
    fn ratio(num: u128, den: u128) -> Self {
        num as f64 / den as f64
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn render(&self) -> String {
        fmt_sig(*self)
    }
}

impl Probability for BigRational {
    fn ratio(num: u128, den: u128) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Formats `x` with 15 significant digits in plain decimal notation
/// (scientific notation outside `1e-4..1e15`).
pub fn fmt_sig(x: f64) -> String {
    const SIG: i32 = 15;
    if x == 0.0 {
        return format!("{:.*}", (SIG - 1) as usize, 0.0);
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..15).contains(&mag) {
        return format!("{:.*e}", (SIG - 1) as usize, x);
    }
    let decimals = (SIG - 1 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

/// Round-trip text form of an `f64` (17 significant digits).
pub fn fmt_exact(x: f64) -> String {
    format!("{:.16e}", x)
}
