//! Arbitrary-precision real scalar.
//!
//! `Real` wraps an MPFR float and carries its precision (in bits) with the
//! value. Arithmetic between two `Real`s rounds into a result whose precision
//! is the maximum of the two operand precisions, so precision propagates
//! through whole computations without any global state.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::ops::{CompleteRound, Pow};
use rug::Float;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision real number tagged with its precision in bits.
#[derive(Clone, PartialEq)]
pub struct Real(Float);

impl Real {
    /// Minimum precision accepted; MPFR itself requires at least 2 bits.
    pub const MIN_PREC: u32 = 8;

    pub fn new(prec: u32) -> Self {
        Real(Float::new(prec.max(Self::MIN_PREC)))
    }

    pub fn from_f64(prec: u32, v: f64) -> Self {
        Real(Float::with_val(prec.max(Self::MIN_PREC), v))
    }

    pub fn from_u32(prec: u32, v: u32) -> Self {
        Real(Float::with_val(prec.max(Self::MIN_PREC), v))
    }

    pub fn from_i64(prec: u32, v: i64) -> Self {
        Real(Float::with_val(prec.max(Self::MIN_PREC), v))
    }

    pub fn from_str_prec(prec: u32, s: &str) -> Result<Self, rug::float::ParseFloatError> {
        let p = Float::parse(s)?;
        Ok(Real(Float::with_val(prec.max(Self::MIN_PREC), p)))
    }

    pub fn pi(prec: u32) -> Self {
        Real(Float::with_val(
            prec.max(Self::MIN_PREC),
            rug::float::Constant::Pi,
        ))
    }

    pub fn zero(prec: u32) -> Self {
        Self::new(prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_u32(prec, 1)
    }

    /// Precision of this value in bits.
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Round (or pad) the value to a new precision.
    pub fn with_prec(&self, prec: u32) -> Self {
        let mut f = self.0.clone();
        f.set_prec(prec.max(Self::MIN_PREC));
        Real(f)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    /// Exponent such that |self| ~ 2^(exp-1); None for zero.
    pub fn exp2_estimate(&self) -> Option<i64> {
        self.0.get_exp().map(|e| e as i64)
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs_ref().complete(self.prec()))
    }

    pub fn neg_ref(&self) -> Self {
        Real((-&self.0).complete(self.prec()))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt_ref().complete(self.prec()))
    }

    pub fn exp(&self) -> Self {
        Real(self.0.exp_ref().complete(self.prec()))
    }

    /// exp(self) - 1, accurate for small arguments.
    pub fn exp_m1(&self) -> Self {
        Real(self.0.exp_m1_ref().complete(self.prec()))
    }

    pub fn ln(&self) -> Self {
        Real(self.0.ln_ref().complete(self.prec()))
    }

    /// ln(1 + self), accurate for small arguments.
    pub fn ln_1p(&self) -> Self {
        Real(self.0.ln_1p_ref().complete(self.prec()))
    }

    pub fn cos(&self) -> Self {
        Real(self.0.cos_ref().complete(self.prec()))
    }

    pub fn sin(&self) -> Self {
        Real(self.0.sin_ref().complete(self.prec()))
    }

    pub fn powi(&self, e: i32) -> Self {
        Real((&self.0).pow(e).complete(self.prec()))
    }

    pub fn recip(&self) -> Self {
        Real(self.0.recip_ref().complete(self.prec()))
    }

    pub fn square(&self) -> Self {
        Real(self.0.square_ref().complete(self.prec()))
    }

    pub fn min_ref(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn max_ref(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// Number of reliable decimal digits at this precision.
    pub fn digits(&self) -> u32 {
        decimal_digits(self.prec())
    }

    /// Decimal string with `sig` significant digits.
    pub fn to_decimal(&self, sig: u32) -> String {
        let sig = sig.max(2) as usize;
        self.0.to_string_radix(10, Some(sig))
    }

    /// Full-precision decimal string (enough digits to round-trip).
    pub fn to_decimal_full(&self) -> String {
        self.to_decimal(decimal_digits(self.prec()) + 2)
    }

    /// Access the underlying MPFR float.
    pub(crate) fn as_float(&self) -> &Float {
        &self.0
    }

    pub(crate) fn from_float(f: Float) -> Self {
        Real(f)
    }
}

/// ⌊precision · 0.301⌋: decimal digits representable at `prec` bits.
pub fn decimal_digits(prec: u32) -> u32 {
    (f64::from(prec) * 0.301).floor() as u32
}

fn join(a: u32, b: u32) -> u32 {
    a.max(b)
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = join(self.prec(), rhs.prec());
                Real(Float::with_val(p, (&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.neg_ref()
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.neg_ref()
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real[{}b]({})", self.prec(), self.to_decimal(20))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

#[derive(Serialize, Deserialize)]
struct RealRepr {
    prec_bits: u32,
    value: String,
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RealRepr {
            prec_bits: self.prec(),
            value: self.to_decimal_full(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = RealRepr::deserialize(deserializer)?;
        Real::from_str_prec(repr.prec_bits, &repr.value)
            .map_err(|e| D::Error::custom(format!("bad decimal literal: {e}")))
    }
}

/// Round to nearest when converting to f64 grids for diagnostics only.
impl From<&Real> for f64 {
    fn from(r: &Real) -> f64 {
        r.to_f64()
    }
}

/// Complex scalar as a pair of `Real`s sharing one precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexVal {
    pub re: Real,
    pub im: Real,
}

impl ComplexVal {
    pub fn new(re: Real, im: Real) -> Self {
        ComplexVal { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let prec = re.prec();
        ComplexVal {
            re,
            im: Real::zero(prec),
        }
    }

    pub fn abs(&self) -> Real {
        (&self.re.square() + &self.im.square()).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_takes_max_precision() {
        let a = Real::from_f64(128, 1.5);
        let b = Real::from_f64(512, 2.25);
        assert_eq!((&a + &b).prec(), 512);
        assert_eq!((&a * &b).prec(), 512);
        assert_eq!((&b - &a).prec(), 512);
        assert_eq!((&a / &b).prec(), 512);
    }

    #[test]
    fn decimal_round_trip_error_bound() {
        // Round-trip through d = ⌊prec·0.301⌋ digits must reproduce the value
        // to relative error ≤ 10^(2−d).
        for prec in [64u32, 256, 1024, 9000] {
            let x = Real::from_u32(prec, 2).sqrt();
            let d = decimal_digits(prec);
            let s = x.to_decimal(d);
            let y = Real::from_str_prec(prec, &s).unwrap();
            let rel = ((&x - &y).abs() / x.abs()).to_f64();
            let bound = 10f64.powi(2 - d.min(300) as i32);
            // Beyond ~300 digits the f64 bound underflows; the error must
            // simply vanish at f64 scale there.
            if d <= 300 {
                assert!(rel <= bound, "prec={prec} rel={rel:e} bound={bound:e}");
            } else {
                assert_eq!(rel, 0.0, "prec={prec} rel={rel:e}");
            }
        }
    }

    #[test]
    fn serde_embeds_precision_tag() {
        let x = Real::from_f64(9000, 1.2345e-10);
        let json = serde_json::to_string(&x).unwrap();
        assert!(json.contains("\"prec_bits\":9000"));
        let back: Real = serde_json::from_str(&json).unwrap();
        assert_eq!(back.prec(), 9000);
        let rel = ((&x - &back).abs() / x.abs()).to_f64();
        assert!(rel < 1e-300);
    }

    #[test]
    fn exp_ln_inverse() {
        let x = Real::from_f64(256, 0.37);
        let y = x.exp().ln();
        assert!((&x - &y).abs().to_f64() < 1e-70);
    }
}
