//! Exact rational exponent calculus for the decoupling iteration.
//!
//! Everything here is a closed-form rational computation at a Lebesgue index
//! `p`: the three interpolation exponents, the weight sequences driving the
//! iteration, the two geometric series they generate, and the final
//! decoupling exponent
//!
//! ```text
//! exponent(p) = lambda0(p) / ((1/2) sum_j b_j tau_j(p)),
//! ```
//!
//! which at `p = 9` evaluates to exactly `7/9 = 2 (1/2 - 1/9)`. The quotient
//! is a rational function regular at 9, so exact evaluation at 9 (plus
//! continuity probes at nearby rationals) realizes the limit. No floating
//! point anywhere; identities are checked by exact equality.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rat::{fmt_num_den, int, rat};
use crate::{Error, Result};

/// The three interpolation exponents at index `p`, each in the open unit
/// interval and each satisfying its defining identity exactly:
///
/// ```text
/// 1/(2p/5) = alpha1/(4p/5) + (1 - alpha1)/2
/// 1/(4p/5) = alpha2/p     + (1 - alpha2)/6
/// 1/6      = (1 - beta2)/2 + beta2/(4p/5)
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolationParams {
    pub p: BigRational,
    pub alpha1: BigRational,
    pub alpha2: BigRational,
    pub beta2: BigRational,
}

/// Solves `lhs = alpha * u + (1 - alpha) * v` for `alpha`.
fn interpolation_coefficient(
    lhs: &BigRational,
    u: &BigRational,
    v: &BigRational,
    name: &str,
) -> Result<BigRational> {
    let denom = u - v;
    if denom.is_zero() {
        return Err(Error::Domain(format!(
            "{name}: defining identity has no solution (interpolation endpoints coincide)"
        )));
    }
    Ok((lhs - v) / denom)
}

fn require_open_unit(value: &BigRational, name: &str) -> Result<()> {
    if value <= &BigRational::zero() || value >= &BigRational::one() {
        return Err(Error::Domain(format!(
            "{name} = {} lies outside the open interval (0, 1)",
            fmt_num_den(value)
        )));
    }
    Ok(())
}

/// Solves the three defining identities at `p`, exactly.
///
/// Requires `p > 5` (so the Lebesgue exponents `2p/5`, `4p/5` exceed 2) and
/// all three solutions in `(0, 1)`; the error names the first violated
/// constraint. All three land in range precisely when `p > 15/2`.
pub fn interpolation_params(p: &BigRational) -> Result<InterpolationParams> {
    if *p <= int(5) {
        return Err(Error::Domain(format!(
            "p = {} must exceed 5",
            fmt_num_den(p)
        )));
    }
    let half = rat(1, 2);
    let sixth = rat(1, 6);
    let inv_2p5 = rat(5, 2) / p; // 1 / (2p/5)
    let inv_4p5 = rat(5, 4) / p; // 1 / (4p/5)
    let inv_p = BigRational::one() / p;

    let alpha1 = interpolation_coefficient(&inv_2p5, &inv_4p5, &half, "alpha1")?;
    require_open_unit(&alpha1, "alpha1")?;
    let alpha2 = interpolation_coefficient(&inv_4p5, &inv_p, &sixth, "alpha2")?;
    require_open_unit(&alpha2, "alpha2")?;
    let beta2 = interpolation_coefficient(&sixth, &inv_4p5, &half, "beta2")?;
    require_open_unit(&beta2, "beta2")?;

    let params = InterpolationParams {
        p: p.clone(),
        alpha1,
        alpha2,
        beta2,
    };
    debug_assert!(params.identities_hold());
    Ok(params)
}

impl InterpolationParams {
    /// Re-substitutes the solved values into the three defining identities.
    pub fn identities_hold(&self) -> bool {
        let half = rat(1, 2);
        let sixth = rat(1, 6);
        let inv_2p5 = rat(5, 2) / &self.p;
        let inv_4p5 = rat(5, 4) / &self.p;
        let inv_p = BigRational::one() / &self.p;
        let one = BigRational::one();
        inv_2p5 == &self.alpha1 * &inv_4p5 + (&one - &self.alpha1) * &half
            && inv_4p5 == &self.alpha2 * &inv_p + (&one - &self.alpha2) * &sixth
            && sixth == (&one - &self.beta2) * &half + &self.beta2 * &inv_4p5
    }

    /// Common ratio `(1 - alpha2) beta2` of the weight sequences.
    pub fn contraction_ratio(&self) -> BigRational {
        (BigRational::one() - &self.alpha2) * &self.beta2
    }

    /// Ratio of the series `sum b_j w_j` and `sum b_j tau_j`:
    /// `(3/2) (1 - alpha2) beta2`. The series converge iff this is < 1.
    pub fn effective_ratio(&self) -> BigRational {
        rat(3, 2) * self.contraction_ratio()
    }
}

/// The exact weight sequences of an `r`-step iteration.
///
/// `gamma` has entries `0..=r`, `b` and `tau` have entries `0..=r`, and `w`
/// has entries `0..r`. The Hoelder exponents partition one:
/// `gamma_0 + sum_{i=1}^r gamma_i + sum_{i=0}^r tau_i = 1`, exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationWeights {
    pub r: usize,
    pub gamma: Vec<BigRational>,
    pub b: Vec<BigRational>,
    pub tau: Vec<BigRational>,
    pub w: Vec<BigRational>,
}

/// Builds the weight sequences at `p` for `r >= 1` iteration steps:
///
/// ```text
/// b_i = 2 (3/2)^i
/// gamma_0 = 1 - alpha1,   gamma_i = alpha1 (1-alpha2)(1-beta2) q^(i-1)
/// tau_i = alpha1 alpha2 q^i  (i < r),   tau_r = alpha1 q^r
/// w_i = ((1-alpha2) / (2 alpha2)) tau_i
/// ```
///
/// with `q = (1-alpha2) beta2`.
pub fn iteration_weights(params: &InterpolationParams, r: usize) -> Result<IterationWeights> {
    if r == 0 {
        return Err(Error::Invalid("iteration depth r must be at least 1".into()));
    }
    let one = BigRational::one();
    let q = params.contraction_ratio();
    let a1 = &params.alpha1;
    let a2 = &params.alpha2;
    let b2 = &params.beta2;

    let mut b = Vec::with_capacity(r + 1);
    let mut cur = int(2);
    for _ in 0..=r {
        b.push(cur.clone());
        cur *= rat(3, 2);
    }

    let mut gamma = Vec::with_capacity(r + 1);
    gamma.push(&one - a1);
    let lead = a1 * (&one - a2) * (&one - b2);
    let mut qpow = BigRational::one(); // q^(i-1) at i = 1
    for _ in 1..=r {
        gamma.push(&lead * &qpow);
        qpow *= &q;
    }

    let mut tau = Vec::with_capacity(r + 1);
    let mut qpow = BigRational::one();
    for _ in 0..r {
        tau.push(a1 * a2 * &qpow);
        qpow *= &q;
    }
    tau.push(a1 * &qpow); // tau_r = alpha1 q^r

    let w_factor = (&one - a2) / (int(2) * a2);
    let w: Vec<BigRational> = tau[..r].iter().map(|t| &w_factor * t).collect();

    let weights = IterationWeights { r, gamma, b, tau, w };
    debug_assert!(weights.partition_sum().is_one());
    Ok(weights)
}

impl IterationWeights {
    /// `gamma_0 + sum gamma_i + sum tau_i`; equals 1 exactly for every
    /// valid parameter set (telescoping of `(1-alpha2)(1-beta2) + alpha2
    /// = 1 - (1-alpha2) beta2`).
    pub fn partition_sum(&self) -> BigRational {
        self.gamma.iter().sum::<BigRational>() + self.tau.iter().sum::<BigRational>()
    }
}

/// The two series of the iteration, `sum_j b_j w_j` and `sum_j b_j tau_j`
/// (taken over the infinite weight sequences `tau_j = alpha1 alpha2 q^j`,
/// `w_j = ((1-alpha2)/(2 alpha2)) tau_j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSums {
    pub sum_bw: BigRational,
    pub sum_btau: BigRational,
}

fn series_denominator(p: &BigRational) -> BigRational {
    int(15) - int(10) * p + p * p
}

/// Closed forms of the two series:
///
/// ```text
/// sum b_j w_j   = 3 (p - 5)        / (2 (15 - 10 p + p^2))
/// sum b_j tau_j = (75 - 25 p + 2 p^2) / (15 - 10 p + p^2)
/// ```
///
/// Fails with a pole error when the shared denominator vanishes (impossible
/// at rational `p`: the roots are `5 +- sqrt(10)`) and a divergence error
/// when the effective ratio `(3/2)(1-alpha2) beta2` reaches 1 — which
/// happens exactly when the denominator crosses zero, so rational `p` just
/// below `5 + sqrt(10)` reports divergence.
pub fn series_closed_forms(params: &InterpolationParams) -> Result<SeriesSums> {
    let q = params.contraction_ratio();
    if q <= BigRational::zero() || q >= BigRational::one() {
        return Err(Error::Domain(format!(
            "contraction ratio q = {} lies outside (0, 1)",
            fmt_num_den(&q)
        )));
    }
    let denom = series_denominator(&params.p);
    if denom.is_zero() {
        return Err(Error::Pole {
            p: fmt_num_den(&params.p),
        });
    }
    let eff = params.effective_ratio();
    if eff >= BigRational::one() {
        return Err(Error::Divergence {
            p: fmt_num_den(&params.p),
            ratio: fmt_num_den(&eff),
        });
    }
    let p = &params.p;
    let sum_bw = int(3) * (p - int(5)) / (int(2) * &denom);
    let sum_btau = (int(75) - int(25) * p + int(2) * p * p) / &denom;
    Ok(SeriesSums { sum_bw, sum_btau })
}

/// Partial sums `sum_{j=0}^{depth}` of both series, term by term.
pub fn series_partial_sums(params: &InterpolationParams, depth: usize) -> SeriesSums {
    let one = BigRational::one();
    let q = params.contraction_ratio();
    let tau0 = &params.alpha1 * &params.alpha2;
    let w_factor = (&one - &params.alpha2) / (int(2) * &params.alpha2);
    let mut sum_bw = BigRational::zero();
    let mut sum_btau = BigRational::zero();
    let mut b = int(2);
    let mut tau = tau0;
    for _ in 0..=depth {
        let bt = &b * &tau;
        sum_btau += &bt;
        sum_bw += &w_factor * &bt;
        b *= rat(3, 2);
        tau *= &q;
    }
    SeriesSums { sum_bw, sum_btau }
}

/// Exact geometric bounds on the tails `sum_{j > depth}` of both series:
/// the terms are geometric with ratio `(3/2) q`, so the tails equal
/// `first_omitted_term / (1 - (3/2) q)`.
pub fn series_tail_bounds(params: &InterpolationParams, depth: usize) -> Result<SeriesSums> {
    let eff = params.effective_ratio();
    if eff >= BigRational::one() {
        return Err(Error::Divergence {
            p: fmt_num_den(&params.p),
            ratio: fmt_num_den(&eff),
        });
    }
    let one = BigRational::one();
    let gap = &one - &eff;
    let eff_next = eff.pow((depth + 1) as i32);
    // b_j tau_j = 2 alpha1 alpha2 eff^j ; b_j w_j = alpha1 (1 - alpha2) eff^j
    let btau_tail = int(2) * &params.alpha1 * &params.alpha2 * &eff_next / &gap;
    let bw_tail = &params.alpha1 * (&one - &params.alpha2) * &eff_next / &gap;
    Ok(SeriesSums {
        sum_bw: bw_tail,
        sum_btau: btau_tail,
    })
}

/// Per-unit-scale exponent loss of the iteration:
/// `2 (1/2 - 5/(2p)) + (1/2 - 1/6) sum_j b_j w_j`.
pub fn scale_loss_exponent(params: &InterpolationParams) -> Result<BigRational> {
    let sums = series_closed_forms(params)?;
    let first = int(2) * (rat(1, 2) - rat(5, 2) / &params.p);
    Ok(first + (rat(1, 2) - rat(1, 6)) * sums.sum_bw)
}

/// The decoupling exponent `lambda0(p) / ((1/2) sum_j b_j tau_j)`.
///
/// At `p = 9` this is exactly `7/9`, i.e. `2 (1/2 - 1/9)`.
pub fn decoupling_exponent(params: &InterpolationParams) -> Result<BigRational> {
    let sums = series_closed_forms(params)?;
    if sums.sum_btau.is_zero() {
        return Err(Error::Domain(
            "sum_j b_j tau_j vanishes; exponent undefined".into(),
        ));
    }
    let loss = scale_loss_exponent(params)?;
    Ok(loss / (rat(1, 2) * sums.sum_btau))
}

/// The exponent pair of the solution-count bound `N^(2r) + N^(4r-9)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DioExponents {
    pub e_low: i64,
    pub e_high: i64,
    pub e_max: i64,
    /// True for `r >= 5`, where `4r - 9` dominates; the crossover sits at
    /// `r = 9/2`.
    pub supercritical: bool,
}

pub fn diophantine_exponents(r: u32) -> DioExponents {
    let r = i64::from(r);
    let e_low = 2 * r;
    let e_high = 4 * r - 9;
    DioExponents {
        e_low,
        e_high,
        e_max: e_low.max(e_high),
        supercritical: e_high > e_low,
    }
}

/// Pointwise evaluation of every domain constraint at `p`.
///
/// The admissible set is derived, not assumed: all interpolation exponents
/// in `(0, 1)` forces `p > 15/2`, and convergence of the series forces
/// `15 - 10p + p^2 > 0`; together these say `p > 5 + sqrt(10)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainCheck {
    pub p_exceeds_5: bool,
    pub alpha1_in_range: bool,
    pub alpha2_in_range: bool,
    pub beta2_in_range: bool,
    pub denominator_nonzero: bool,
    pub series_converge: bool,
    pub admissible: bool,
    /// Decimal approximation of the lower endpoint `5 + sqrt(10)`.
    pub lower_endpoint: String,
}

pub fn domain_check(p: &BigRational) -> DomainCheck {
    let in_unit = |q: &BigRational| q > &BigRational::zero() && q < &BigRational::one();
    let p_exceeds_5 = *p > int(5);
    let params = interpolation_params(p).ok();
    let solved = |f: fn(&InterpolationParams) -> &BigRational| {
        params.as_ref().map(|pr| in_unit(f(pr))).unwrap_or(false)
    };
    let alpha1_in_range = solved(|pr| &pr.alpha1);
    let alpha2_in_range = solved(|pr| &pr.alpha2);
    let beta2_in_range = solved(|pr| &pr.beta2);
    let denominator_nonzero = !series_denominator(p).is_zero();
    let series_converge = params
        .as_ref()
        .map(|pr| pr.effective_ratio() < BigRational::one())
        .unwrap_or(false);
    DomainCheck {
        p_exceeds_5,
        alpha1_in_range,
        alpha2_in_range,
        beta2_in_range,
        denominator_nonzero,
        series_converge,
        admissible: p_exceeds_5
            && alpha1_in_range
            && alpha2_in_range
            && beta2_in_range
            && denominator_nonzero
            && series_converge,
        lower_endpoint: lower_endpoint_decimal(),
    }
}

/// `5 + sqrt(10)` to six decimals, from an exact integer square root.
fn lower_endpoint_decimal() -> String {
    let scale: BigInt = BigInt::from(10).pow(12);
    let root = (BigInt::from(10) * &scale * &scale).sqrt(); // sqrt(10) * 10^12
    let five = BigInt::from(5) * &scale;
    let total = five + root; // (5 + sqrt(10)) * 10^12, floored
    let digits = total.to_string();
    let (int_part, frac) = digits.split_at(digits.len() - 12);
    format!("{int_part}.{}", &frac[..6])
}
