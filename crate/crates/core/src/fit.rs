//! Ordinary least squares on `(ln N, ln J)` pairs.
//!
//! This is the one module that uses floating point: counts stay exact all
//! the way here, and only the regression itself is approximate. The fitted
//! slope estimates the growth exponent of `J(N)`.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::{Error, Result};

/// Least-squares fit of `ln J` against `ln N`.
#[derive(Clone, Debug)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_abs_residual: f64,
    pub points: Vec<(u32, BigUint)>,
}

impl FitResult {
    /// Residuals `ln J_i - (intercept + slope ln N_i)` in point order.
    pub fn residuals(&self) -> Vec<f64> {
        self.points
            .iter()
            .map(|(n, j)| {
                ln_biguint(j) - (self.intercept + self.slope * f64::from(*n).ln())
            })
            .collect()
    }
}

/// Natural log of a big integer, stable for any magnitude: uses the top 53
/// bits as mantissa and adds the remaining bit count times `ln 2`.
pub fn ln_biguint(n: &BigUint) -> f64 {
    debug_assert!(!n.is_zero());
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("small BigUint converts").ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_f64().expect("53-bit mantissa converts");
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Fits `ln J = intercept + slope * ln N` by ordinary least squares.
///
/// Requires at least three points, strictly increasing `N >= 1`, and all
/// `J > 0`; a constant-`N` design matrix is impossible under these
/// preconditions.
pub fn fit_growth(points: &[(u32, BigUint)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Invalid(format!(
            "growth fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    for window in points.windows(2) {
        if window[1].0 <= window[0].0 {
            return Err(Error::Invalid(
                "growth fit needs strictly increasing N".into(),
            ));
        }
    }
    if points[0].0 == 0 {
        return Err(Error::Invalid("growth fit needs N >= 1".into()));
    }
    if points.iter().any(|(_, j)| j.is_zero()) {
        return Err(Error::Invalid("growth fit needs J > 0".into()));
    }

    let xs: Vec<f64> = points.iter().map(|(n, _)| f64::from(*n).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, j)| ln_biguint(j)).collect();
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_abs_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).abs())
        .fold(0.0, f64::max);

    Ok(FitResult {
        slope,
        intercept,
        max_abs_residual,
        points: points.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn exact_power_law() {
        let points: Vec<(u32, BigUint)> = [2u32, 4, 8, 16]
            .iter()
            .map(|&n| (n, big(u64::from(n).pow(3))))
            .collect();
        let fit = fit_growth(&points).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-10);
        assert!(fit.max_abs_residual < 1e-12);
    }

    #[test]
    fn squared_grid_size_slope_near_two() {
        let points: Vec<(u32, BigUint)> = [64u32, 128, 256]
            .iter()
            .map(|&n| (n, big((u64::from(n) + 1).pow(2))))
            .collect();
        let fit = fit_growth(&points).unwrap();
        assert!(
            fit.slope >= 1.98 && fit.slope <= 2.02,
            "slope {}",
            fit.slope
        );
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let points: Vec<(u32, BigUint)> =
            [3u32, 9, 27].iter().map(|&n| (n, big(42))).collect();
        let fit = fit_growth(&points).unwrap();
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn residuals_are_orthogonal_to_the_design() {
        let points = vec![
            (5u32, big(17)),
            (11, big(900)),
            (23, big(8_000)),
            (47, big(1_000_000)),
        ];
        let fit = fit_growth(&points).unwrap();
        let res = fit.residuals();
        let sum: f64 = res.iter().sum();
        let weighted: f64 = res
            .iter()
            .zip(points.iter())
            .map(|(r, (n, _))| r * f64::from(*n).ln())
            .sum();
        assert!(sum.abs() < 1e-9, "sum {sum}");
        assert!(weighted.abs() < 1e-9, "weighted {weighted}");
        assert!(fit.max_abs_residual > 0.0);
    }

    #[test]
    fn input_validation() {
        assert!(fit_growth(&[(1, big(1)), (2, big(2))]).is_err());
        assert!(fit_growth(&[(1, big(1)), (1, big(2)), (3, big(2))]).is_err());
        assert!(fit_growth(&[(0, big(1)), (1, big(2)), (3, big(2))]).is_err());
        assert!(fit_growth(&[(1, big(1)), (2, BigUint::zero()), (3, big(2))]).is_err());
    }

    #[test]
    fn ln_of_huge_values() {
        let n = BigUint::from(3u32).pow(400);
        let expect = 400.0 * 3f64.ln();
        assert!((ln_biguint(&n) - expect).abs() < 1e-9);
        assert!((ln_biguint(&big(1)) - 0.0).abs() < 1e-300);
    }
}
