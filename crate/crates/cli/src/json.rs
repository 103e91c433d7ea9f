//! JSON field helpers: exact integers as JSON numbers of any size, rationals
//! as `"num/den"` strings.

use std::str::FromStr;

use cubic5::BigUint;
use cubic5::rat::fmt_num_den;

/// An exact count as a JSON number (arbitrary precision, never rounded).
pub fn big_json_number(v: &BigUint) -> serde_json::Number {
    serde_json::Number::from_str(&v.to_string()).expect("decimal digits parse as a JSON number")
}

/// A rational as the canonical `"num/den"` string.
pub fn rational_string(q: &cubic5::BigRational) -> String {
    fmt_num_den(q)
}
