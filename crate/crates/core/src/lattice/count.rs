//! Solution counting: convolution path, brute-force oracle, cross-checks.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::table::{BigAccum, BuildKeyHasher, RepTable, check_range};
use super::Variant;
use crate::cubic::{CountingForm, CubicForm};
use crate::{Error, Result};

/// Tuple budget for the brute-force oracle: `(N+1)^(2r)` must stay below it.
pub const BRUTE_FORCE_BUDGET: u64 = 10_000_000;

/// Execution options for the counting pipeline.
#[derive(Clone, Debug)]
pub struct CountOptions {
    /// Thread count for the convolution. `None` uses the ambient rayon pool;
    /// ignored by builds without the `parallel` feature.
    pub threads: Option<usize>,
    /// Cap on the estimated footprint of the final table. The estimate is a
    /// pre-flight upper bound, so runs fail before allocating, not mid-way.
    pub mem_cap_bytes: u64,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self {
            threads: None,
            mem_cap_bytes: 8 << 30,
        }
    }
}

/// Exact number of integer solutions of the additive system: the `2r`-point
/// system over `[0, N]^2` whose left and right lattice sums agree.
///
/// Built as `sum_v R_r(v)^2` where `R_r` is the `r`-fold convolution of the
/// base table. Works for degenerate forms too (callers that care should flag
/// them); results are identical for every thread count.
pub fn solution_count(
    phi: &CubicForm,
    r: u32,
    n: u32,
    variant: Variant,
    opts: &CountOptions,
) -> Result<BigUint> {
    let form = phi.counting()?;
    check_range(n)?;
    if r == 0 {
        return Err(Error::Invalid("fold count r must be at least 1".into()));
    }
    preflight(&form, r, n, variant, opts.mem_cap_bytes)?;
    match variant {
        Variant::S => Ok(with_pool(opts.threads, || {
            Ok(fold_count(RepTable::<5>::base_s(&form, n)?, r)?.sum_of_squares())
        })?),
        Variant::SPrime => Ok(with_pool(opts.threads, || {
            Ok(fold_count(RepTable::<6>::base_s_prime(&form, n)?, r)?.sum_of_squares())
        })?),
    }
}

/// Builds the full `r`-fold table of the `S` embedding (budget-checked).
pub fn rep_table_s(phi: &CubicForm, r: u32, n: u32, opts: &CountOptions) -> Result<RepTable<5>> {
    let form = phi.counting()?;
    check_range(n)?;
    if r == 0 {
        return Err(Error::Invalid("fold count r must be at least 1".into()));
    }
    preflight(&form, r, n, Variant::S, opts.mem_cap_bytes)?;
    with_pool(opts.threads, || {
        fold_count(RepTable::<5>::base_s(&form, n)?, r)
    })
}

/// Builds the full `r`-fold table of the `S'` embedding (budget-checked).
pub fn rep_table_s_prime(
    phi: &CubicForm,
    r: u32,
    n: u32,
    opts: &CountOptions,
) -> Result<RepTable<6>> {
    let form = phi.counting()?;
    check_range(n)?;
    if r == 0 {
        return Err(Error::Invalid("fold count r must be at least 1".into()));
    }
    preflight(&form, r, n, Variant::SPrime, opts.mem_cap_bytes)?;
    with_pool(opts.threads, || {
        fold_count(RepTable::<6>::base_s_prime(&form, n)?, r)
    })
}

/// Sequential counting path: never touches a thread pool, regardless of
/// features. The benchmark suite compares this against [`solution_count`].
pub fn solution_count_seq(
    phi: &CubicForm,
    r: u32,
    n: u32,
    variant: Variant,
    opts: &CountOptions,
) -> Result<BigUint> {
    #[cfg(feature = "parallel")]
    {
        let mut o = opts.clone();
        o.threads = Some(1);
        return solution_count(phi, r, n, variant, &o);
    }
    #[cfg(not(feature = "parallel"))]
    solution_count(phi, r, n, variant, opts)
}

fn fold_count<const D: usize>(base: RepTable<D>, r: u32) -> Result<RepTable<D>> {
    let mut table = base;
    if r > 1 {
        let unit = table.clone();
        for _ in 1..r {
            table = table.convolve(&unit)?;
        }
    }
    Ok(table)
}

#[cfg(feature = "parallel")]
fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => f(),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Invalid(format!("cannot build thread pool: {e}")))?
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_pool<T>(_threads: Option<usize>, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f()
}

/// Pre-flight estimate of the final table cardinality: the minimum of the
/// multiset bound `C(M + r - 1, r)` (distinct sums of `r`-multisets from the
/// `M = (N+1)^2` base keys) and the product of the per-coordinate ranges.
fn cardinality_bound(form: &CountingForm, r: u32, n: u32, variant: Variant) -> BigUint {
    let m = BigUint::from(u64::from(n) + 1).pow(2);
    let mut by_mass = BigUint::one();
    for i in 0..u64::from(r) {
        by_mass = by_mass * (&m + BigUint::from(i));
        by_mass = by_mass.div_exact(&BigUint::from(i + 1));
    }
    let width = |lo: i64, hi: i64| (i128::from(hi) - i128::from(lo)) as u128;
    let widths: Vec<u128> = match variant {
        Variant::S => form.bounds_s(n).iter().map(|&(lo, hi)| width(lo, hi)).collect(),
        Variant::SPrime => form
            .bounds_s_prime(n)
            .iter()
            .map(|&(lo, hi)| width(lo, hi))
            .collect(),
    };
    let mut by_range = BigUint::one();
    for w in widths {
        by_range *= BigUint::from(w) * BigUint::from(r) + BigUint::one();
    }
    by_mass.min(by_range)
}

fn preflight(form: &CountingForm, r: u32, n: u32, variant: Variant, cap: u64) -> Result<()> {
    let card = cardinality_bound(form, r, n, variant);
    // key + count + control byte, doubled for hash-table load factor and
    // growth slack
    let per_entry = 2 * (8 * variant.dim() as u64 + 9);
    let estimated = card * BigUint::from(per_entry);
    if estimated > BigUint::from(cap) {
        return Err(Error::MemoryBudget {
            estimated_bytes: estimated,
            cap_bytes: cap,
        });
    }
    Ok(())
}

trait DivExact {
    fn div_exact(self, d: &BigUint) -> BigUint;
}

impl DivExact for BigUint {
    fn div_exact(self, d: &BigUint) -> BigUint {
        let (q, rem) = self.div_rem(d);
        debug_assert!(rem.is_zero());
        q
    }
}

/// Independent oracle: enumerates every left-half tuple of `r` grid points,
/// groups the tuples by their lattice sum in a hash map, and returns the sum
/// of squared group sizes. No convolution algebra is involved, so agreement
/// with [`solution_count`] checks the entire convolution path.
pub fn brute_force_count(phi: &CubicForm, r: u32, n: u32) -> Result<BigUint> {
    let form = phi.counting()?;
    check_range(n)?;
    if r == 0 {
        return Err(Error::Invalid("fold count r must be at least 1".into()));
    }
    let side = u64::from(n) + 1;
    let tuples = BigUint::from(side * side).pow(r);
    if tuples > BigUint::from(BRUTE_FORCE_BUDGET) {
        return Err(Error::EnumerationBudget {
            tuples,
            budget: BRUTE_FORCE_BUDGET,
        });
    }

    let mut points: Vec<[i64; 5]> = Vec::with_capacity((side * side) as usize);
    for x in 0..=i64::from(n) {
        for y in 0..=i64::from(n) {
            points.push(form.embed_s(x, y));
        }
    }

    let mut groups: HashMap<[i64; 5], u64, BuildKeyHasher> = HashMap::default();
    let r = r as usize;
    let mut odometer = vec![0usize; r];
    loop {
        let mut sum = [0i64; 5];
        for &i in &odometer {
            for (acc, v) in sum.iter_mut().zip(points[i].iter()) {
                *acc += v;
            }
        }
        *groups.entry(sum).or_insert(0) += 1;

        // advance the odometer
        let mut pos = 0;
        loop {
            if pos == r {
                let mut acc = BigAccum::default();
                for c in groups.values() {
                    let c = u128::from(*c);
                    acc.add_u128(c * c);
                }
                return Ok(acc.finish());
            }
            odometer[pos] += 1;
            if odometer[pos] < points.len() {
                break;
            }
            odometer[pos] = 0;
            pos += 1;
        }
    }
}

/// Result of counting the same system through both surface variants.
#[derive(Clone, Debug)]
pub struct VariantCrossCheck {
    pub j_s: BigUint,
    pub j_s_prime: BigUint,
    pub equal: bool,
}

/// Counts through the `S` and `S'` embeddings and reports both values.
///
/// For non-degenerate forms the second-derivative coordinates span the same
/// linear space as `(x, y)`, so the two systems must agree exactly; a
/// degenerate form can make them differ.
pub fn cross_check_variants(
    phi: &CubicForm,
    r: u32,
    n: u32,
    opts: &CountOptions,
) -> Result<VariantCrossCheck> {
    let j_s = solution_count(phi, r, n, Variant::S, opts)?;
    let j_s_prime = solution_count(phi, r, n, Variant::SPrime, opts)?;
    let equal = j_s == j_s_prime;
    Ok(VariantCrossCheck {
        j_s,
        j_s_prime,
        equal,
    })
}
