//! Serialization helpers shared by report types.
//!
//! High-precision values are written as exact decimal or fraction strings,
//! never as binary floats.

use num_rational::BigRational;
use serde::Serializer;

/// Serializes a rational as the string `"num/den"` (or `"num"` for integers).
pub fn ser_rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    if v.denom() == &1.into() {
        s.serialize_str(&v.numer().to_string())
    } else {
        s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
    }
}

/// Formats `e^ln_value` in scientific notation without overflow or underflow.
pub fn exp_to_sci(ln_value: f64, digits: usize) -> String {
    if ln_value == f64::NEG_INFINITY {
        return "0".into();
    }
    let log10 = ln_value / std::f64::consts::LN_10;
    let exponent = log10.floor();
    let mantissa = 10f64.powf(log10 - exponent);
    format!("{mantissa:.digits$}e{}", exponent as i64)
}
