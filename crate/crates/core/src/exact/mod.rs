//! Exact real arithmetic for the strict inequalities used throughout.
//!
//! Values live in real quadratic fields ([`QuadSurd`]); bounds are products
//! of rational powers ([`Monomial`]). Every strict comparison first runs a
//! double-precision interval filter and falls back to exact arithmetic only
//! when the filter cannot separate the two sides.

mod monomial;
mod parse;
mod real;
mod surd;

pub use monomial::{abs_lt, filter_lt, max_root_degree, set_precision_bits, Decision, Monomial};
pub use parse::{format_rational, parse_rational, rational_from_f64};
pub use real::{Real, FLOAT_TOLERANCE};
pub use surd::QuadSurd;

pub use num_bigint::BigInt;
pub use num_rational::BigRational as Rational;
