//! Exact counting of integer solutions of the additive system attached to a
//! binary cubic's jet surface.
//!
//! For a form `phi` with integer coefficients, the lattice map
//! `(x, y) -> (x, y, phi_t(x,y), phi_s(x,y), phi(x,y))` turns the
//! five-equation system
//!
//! ```text
//! sum x_i = sum x_{r+i},  sum y_i = sum y_{r+i},
//! sum phi_t(x_i, y_i) = sum phi_t(x_{r+i}, y_{r+i}),   (same for phi_s, phi)
//! ```
//!
//! over `0 <= x_i, y_i <= N` into an additive-energy computation: if `R_r(v)`
//! counts the `r`-tuples of grid points whose lattice images sum to `v`, the
//! number of solutions is exactly `sum_v R_r(v)^2`. The [`RepTable`] type
//! holds `R_r` as a sparse exact-count map; `R_r` is built by iterated sparse
//! convolution with the one-fold base table.
//!
//! Counting is exact end to end: counts are 64-bit with checked promotion to
//! big integers, coordinates are checked against precomputed bounds, and the
//! final energies are arbitrary-precision. The work is sharded by a stable
//! key hash, so results are identical for any thread count (and for the
//! sequential fallback built without the `parallel` feature).

mod count;
mod io;
mod table;

pub use count::{
    BRUTE_FORCE_BUDGET, CountOptions, VariantCrossCheck, brute_force_count, cross_check_variants,
    rep_table_s, rep_table_s_prime, solution_count, solution_count_seq,
};
pub use io::{REPT_VERSION, ReptFile, read_rept, rept_bytes, write_rept};
pub use table::{RepTable, SHARD_COUNT};

use std::fmt;
use std::str::FromStr;

use crate::Error;

/// Which lattice embedding backs the system: the jet surface `S` (dimension
/// 5) or its second-derivative variant `S'` (dimension 6). For non-degenerate
/// forms the two systems have the same number of integer solutions.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Variant {
    S,
    SPrime,
}

impl Variant {
    pub fn dim(self) -> usize {
        match self {
            Variant::S => 5,
            Variant::SPrime => 6,
        }
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "s" | "S" => Ok(Variant::S),
            "sprime" | "SPrime" | "s'" => Ok(Variant::SPrime),
            other => Err(Error::Invalid(format!(
                "unknown variant {other:?}: expected \"s\" or \"sprime\""
            ))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::S => "s",
            Variant::SPrime => "sprime",
        })
    }
}
