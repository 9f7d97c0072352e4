//! Scalar abstraction over the numeric types the engine runs on.
//!
//! Most of the analytic machinery is written once, generically, and is
//! instantiated either with `f64` (fast paths, tolerances down to ~1e-12)
//! or with [`Big`], an MPFR-backed float whose working precision is chosen
//! at runtime. `Big` is not `Copy`, so the standard `num_traits::Float`
//! bound does not apply; the trait below carries exactly the surface the
//! crate needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

pub trait Scalar:
    Clone
    + PartialOrd
    + PartialEq
    + std::fmt::Debug
    + std::fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Construct from an `f64`. For `Big` the conversion is exact and the
    /// result carries `prec` bits; `f64` ignores `prec`.
    fn of(x: f64, prec: u32) -> Self;
    fn from_i64(x: i64, prec: u32) -> Self;
    fn pi(prec: u32) -> Self;
    fn prec(&self) -> u32;
    fn to_f64(&self) -> f64;
    fn is_finite_s(&self) -> bool;
    fn abs_s(&self) -> Self;
    fn sqrt_s(&self) -> Self;
    fn exp_s(&self) -> Self;
    fn ln_s(&self) -> Self;
    fn sin_s(&self) -> Self;
    fn cos_s(&self) -> Self;
    fn tan_s(&self) -> Self;
    fn sinh_s(&self) -> Self;
    fn cosh_s(&self) -> Self;
    fn tanh_s(&self) -> Self;
    fn atan_s(&self) -> Self;
    /// `atan2(self, x)` with `self` as the ordinate.
    fn atan2_s(&self, x: &Self) -> Self;
    fn powi_s(&self, n: i32) -> Self;

    fn zero(prec: u32) -> Self {
        Self::of(0.0, prec)
    }
    fn one(prec: u32) -> Self {
        Self::of(1.0, prec)
    }
    fn recip_s(&self) -> Self {
        Self::one(self.prec()) / self.clone()
    }
    fn is_sign_negative_s(&self) -> bool {
        *self < Self::zero(self.prec())
    }
    /// coth(x) - 1/x, evaluated stably near the origin.
    fn coth_m1x(&self) -> Self {
        let p = self.prec();
        if self.abs_s().to_f64() < 1e-2 {
            // x/3 - x^3/45 + 2x^5/945 - x^7/4725; remainder O(x^9) is below
            // working precision only for f64; for Big fall back further down.
            if p <= 53 || self.abs_s().to_f64() < 1e-40 {
                let x = self.clone();
                let x2 = x.clone() * x.clone();
                let t1 = x.clone() / Self::of(3.0, p);
                let t2 = x.clone() * x2.clone() / Self::of(45.0, p);
                let t3 = x.clone() * x2.clone() * x2.clone() * Self::of(2.0, p)
                    / Self::of(945.0, p);
                return t1 - t2 + t3;
            }
        }
        // coth x - 1/x in full precision; Big has enough guard digits for
        // the cancellation as long as |x| is not absurdly small.
        self.tanh_s().recip_s() - self.recip_s()
    }
}

impl Scalar for f64 {
    fn of(x: f64, _prec: u32) -> Self {
        x
    }
    fn from_i64(x: i64, _prec: u32) -> Self {
        x as f64
    }
    fn pi(_prec: u32) -> Self {
        std::f64::consts::PI
    }
    fn prec(&self) -> u32 {
        53
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn is_finite_s(&self) -> bool {
        self.is_finite()
    }
    fn abs_s(&self) -> Self {
        self.abs()
    }
    fn sqrt_s(&self) -> Self {
        self.sqrt()
    }
    fn exp_s(&self) -> Self {
        self.exp()
    }
    fn ln_s(&self) -> Self {
        self.ln()
    }
    fn sin_s(&self) -> Self {
        self.sin()
    }
    fn cos_s(&self) -> Self {
        self.cos()
    }
    fn tan_s(&self) -> Self {
        self.tan()
    }
    fn sinh_s(&self) -> Self {
        self.sinh()
    }
    fn cosh_s(&self) -> Self {
        self.cosh()
    }
    fn tanh_s(&self) -> Self {
        self.tanh()
    }
    fn atan_s(&self) -> Self {
        self.atan()
    }
    fn atan2_s(&self, x: &Self) -> Self {
        self.atan2(*x)
    }
    fn powi_s(&self, n: i32) -> Self {
        self.powi(n)
    }
}

/// Arbitrary-precision real. Wraps `rug::Float`; binary operations always
/// produce a result at the larger of the two operand precisions.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct Big(pub Float);

impl Big {
    pub fn new(prec: u32, x: f64) -> Self {
        Big(Float::with_val(prec, x))
    }
    pub fn raw(&self) -> &Float {
        &self.0
    }
    /// Round (or pad) to a new working precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        Big(Float::with_val(prec, &self.0))
    }
    /// Decimal-string rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        format!("{:.*e}", digits.saturating_sub(1), self.0)
    }
}

impl std::fmt::Display for Big {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let digits = (self.0.prec() as f64 * std::f64::consts::LN_2 / std::f64::consts::LN_10)
            .floor() as usize;
        write!(f, "{}", self.to_decimal(digits.max(17)))
    }
}

macro_rules! big_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Big {
            type Output = Big;
            fn $method(self, rhs: Big) -> Big {
                let p = self.0.prec().max(rhs.0.prec());
                Big(Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
    };
}

big_binop!(Add, add, +);
big_binop!(Sub, sub, -);
big_binop!(Mul, mul, *);
big_binop!(Div, div, /);

impl Neg for Big {
    type Output = Big;
    fn neg(self) -> Big {
        Big(-self.0)
    }
}

impl Scalar for Big {
    fn of(x: f64, prec: u32) -> Self {
        Big(Float::with_val(prec, x))
    }
    fn from_i64(x: i64, prec: u32) -> Self {
        Big(Float::with_val(prec, x))
    }
    fn pi(prec: u32) -> Self {
        Big(Float::with_val(prec, Constant::Pi))
    }
    fn prec(&self) -> u32 {
        self.0.prec()
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn is_finite_s(&self) -> bool {
        self.0.is_finite()
    }
    fn abs_s(&self) -> Self {
        Big(self.0.clone().abs())
    }
    fn sqrt_s(&self) -> Self {
        Big(self.0.clone().sqrt())
    }
    fn exp_s(&self) -> Self {
        Big(self.0.clone().exp())
    }
    fn ln_s(&self) -> Self {
        Big(self.0.clone().ln())
    }
    fn sin_s(&self) -> Self {
        Big(self.0.clone().sin())
    }
    fn cos_s(&self) -> Self {
        Big(self.0.clone().cos())
    }
    fn tan_s(&self) -> Self {
        Big(self.0.clone().tan())
    }
    fn sinh_s(&self) -> Self {
        Big(self.0.clone().sinh())
    }
    fn cosh_s(&self) -> Self {
        Big(self.0.clone().cosh())
    }
    fn tanh_s(&self) -> Self {
        Big(self.0.clone().tanh())
    }
    fn atan_s(&self) -> Self {
        Big(self.0.clone().atan())
    }
    fn atan2_s(&self, x: &Self) -> Self {
        Big(self.0.clone().atan2(&x.0))
    }
    fn powi_s(&self, n: i32) -> Self {
        Big(Float::with_val(self.0.prec(), (&self.0).pow(n)))
    }
}

/// Number of decimal digits on which `a` and `b` agree (relative scale).
/// Returns a large number when both are equal or both are zero.
pub fn agreed_digits(a: &Big, b: &Big) -> f64 {
    let p = a.prec().max(b.prec());
    let diff = Big(Float::with_val(p, &a.0 - &b.0)).abs_s();
    if diff.0.is_zero() {
        return 1.0e9;
    }
    let scale = a.abs_s().0.max(&b.abs_s().0);
    if scale.is_zero() {
        return 1.0e9;
    }
    let rel = diff.0 / scale;
    let l = -rel.log10().to_f64();
    if l.is_nan() {
        0.0
    } else {
        l
    }
}
