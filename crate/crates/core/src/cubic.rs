//! Binary cubic forms: exact coefficient algebra and lattice embeddings.
//!
//! A form `phi(t, s) = a t^3 + b t^2 s + c t s^2 + d s^3` is non-degenerate
//! when it is not a perfect cube of a linear form, equivalently when the 2x3
//! matrix
//!
//! ```text
//! [ 3a  2b   c ]
//! [  b  2c  3d ]
//! ```
//!
//! has rank two. Degenerate forms are accepted everywhere (they are the
//! falsification inputs for the transversality checks); operations that
//! assume non-degeneracy say so.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::poly::{Poly2, Poly4};
use crate::rat::{fmt_compact, int, parse_rational};
use crate::{Error, Result, linalg};

/// Exact rational coefficients of a binary cubic form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CubicForm {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl CubicForm {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        Self { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::new(int(a), int(b), int(c), int(d))
    }

    /// `phi` as a sparse polynomial in `(t, s)`.
    pub fn as_poly(&self) -> Poly2 {
        let mut p = Poly2::zero();
        for (coeff, exps) in [
            (&self.a, [3u16, 0u16]),
            (&self.b, [2, 1]),
            (&self.c, [1, 2]),
            (&self.d, [0, 3]),
        ] {
            p = &p + &Poly2::monomial(exps, coeff.clone());
        }
        p
    }

    /// Exact rank of the non-degeneracy matrix `[[3a, 2b, c], [b, 2c, 3d]]`.
    ///
    /// The form is non-degenerate iff this is 2; rank < 2 happens exactly for
    /// perfect cubes of linear forms (and the zero form, rank 0).
    pub fn nondegeneracy_rank(&self) -> usize {
        let three = int(3);
        let two = int(2);
        let m = vec![
            vec![&three * &self.a, &two * &self.b, self.c.clone()],
            vec![self.b.clone(), &two * &self.c, &three * &self.d],
        ];
        linalg::rank(&m)
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.nondegeneracy_rank() == 2
    }

    /// First partials `(phi_t, phi_s)`, exactly.
    pub fn partials(&self) -> (Poly2, Poly2) {
        let p = self.as_poly();
        (p.partial(0), p.partial(1))
    }

    /// Second partials `(phi_tt, phi_ts, phi_ss)`, exactly.
    pub fn second_partials(&self) -> (Poly2, Poly2, Poly2) {
        let (pt, ps) = self.partials();
        (pt.partial(0), pt.partial(1), ps.partial(1))
    }

    pub fn eval(&self, t: &BigRational, s: &BigRational) -> BigRational {
        self.as_poly().eval(&[t.clone(), s.clone()])
    }

    /// Validates the form for counting: integer coefficients within the
    /// coefficient bound.
    pub fn counting(&self) -> Result<CountingForm> {
        let as_i64 = |q: &BigRational| -> Result<i64> {
            if !q.denom().is_one() {
                return Err(Error::NonIntegerCoefficient(fmt_compact(q)));
            }
            let v = q.numer().to_i64().ok_or_else(|| Error::CoefficientRange {
                value: fmt_compact(q),
                limit: CountingForm::MAX_COEFF,
            })?;
            Ok(v)
        };
        CountingForm::new(as_i64(&self.a)?, as_i64(&self.b)?, as_i64(&self.c)?, as_i64(&self.d)?)
    }
}

impl FromStr for CubicForm {
    type Err = Error;

    /// Parses the `"a,b,c,d"` form syntax (integers or rationals).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::ParseForm(s.to_string()));
        }
        let mut vals = parts
            .iter()
            .map(|p| parse_rational(p).map_err(|_| Error::ParseForm(s.to_string())));
        Ok(Self::new(
            vals.next().unwrap()?,
            vals.next().unwrap()?,
            vals.next().unwrap()?,
            vals.next().unwrap()?,
        ))
    }
}

impl fmt::Display for CubicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{}",
            fmt_compact(&self.a),
            fmt_compact(&self.b),
            fmt_compact(&self.c),
            fmt_compact(&self.d)
        )
    }
}

/// A cubic form with machine-integer coefficients, validated for counting.
///
/// The coefficient bound together with [`MAX_RANGE`](Self::MAX_RANGE) keeps
/// every lattice coordinate within `4e15`, far inside the signed 64-bit
/// range, so the embeddings below cannot overflow for in-range arguments.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CountingForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl CountingForm {
    /// Largest admissible |coefficient|.
    pub const MAX_COEFF: i64 = 1_000;
    /// Largest admissible range bound `N` (and |x|, |y| argument).
    pub const MAX_RANGE: u32 = 10_000;

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        for v in [a, b, c, d] {
            if v.abs() > Self::MAX_COEFF {
                return Err(Error::CoefficientRange {
                    value: v.to_string(),
                    limit: Self::MAX_COEFF,
                });
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn as_cubic(&self) -> CubicForm {
        CubicForm::from_ints(self.a, self.b, self.c, self.d)
    }

    fn raw(&self, x: i64, y: i64) -> [i128; 6] {
        let (a, b, c, d) = (
            i128::from(self.a),
            i128::from(self.b),
            i128::from(self.c),
            i128::from(self.d),
        );
        let (x, y) = (i128::from(x), i128::from(y));
        let phi_tt = 6 * a * x + 2 * b * y;
        let phi_ts = 2 * b * x + 2 * c * y;
        let phi_ss = 2 * c * x + 6 * d * y;
        let phi_t = 3 * a * x * x + 2 * b * x * y + c * y * y;
        let phi_s = b * x * x + 2 * c * x * y + 3 * d * y * y;
        let phi = a * x * x * x + b * x * x * y + c * x * y * y + d * y * y * y;
        [phi_tt, phi_ts, phi_ss, phi_t, phi_s, phi]
    }

    /// Lattice embedding of the surface: `(x, y, phi_t, phi_s, phi)`.
    ///
    /// Panics if a coordinate leaves the 64-bit range, which cannot happen
    /// for `|x|, |y| <= MAX_RANGE` thanks to the coefficient bound.
    pub fn embed_s(&self, x: i64, y: i64) -> [i64; 5] {
        let [_, _, _, phi_t, phi_s, phi] = self.raw(x, y);
        [
            x,
            y,
            narrow(phi_t),
            narrow(phi_s),
            narrow(phi),
        ]
    }

    /// Lattice embedding of the second-derivative surface variant:
    /// `(phi_tt, phi_ts, phi_ss, phi_t, phi_s, phi)`.
    pub fn embed_s_prime(&self, x: i64, y: i64) -> [i64; 6] {
        let v = self.raw(x, y);
        [
            narrow(v[0]),
            narrow(v[1]),
            narrow(v[2]),
            narrow(v[3]),
            narrow(v[4]),
            narrow(v[5]),
        ]
    }

    /// Inclusive per-coordinate bounds of [`embed_s`](Self::embed_s) over the
    /// grid `[0, n]^2`, by interval arithmetic on each monomial.
    pub fn bounds_s(&self, n: u32) -> [(i64, i64); 5] {
        let g = self.monomial_bounds(n);
        [
            (0, i64::from(n)),
            (0, i64::from(n)),
            g[3],
            g[4],
            g[5],
        ]
    }

    /// Same for [`embed_s_prime`](Self::embed_s_prime).
    pub fn bounds_s_prime(&self, n: u32) -> [(i64, i64); 6] {
        let g = self.monomial_bounds(n);
        [g[0], g[1], g[2], g[3], g[4], g[5]]
    }

    fn monomial_bounds(&self, n: u32) -> [(i64, i64); 6] {
        let n = i128::from(n);
        // every monomial x^i y^j has range [0, n^(i+j)] on [0, n]^2
        let pow = [1i128, n, n * n, n * n * n];
        let term = |coef: i64, deg: usize| -> (i128, i128) {
            let v = i128::from(coef) * pow[deg];
            if v >= 0 { (0, v) } else { (v, 0) }
        };
        let sum = |parts: &[(i128, i128)]| -> (i64, i64) {
            let lo: i128 = parts.iter().map(|p| p.0).sum();
            let hi: i128 = parts.iter().map(|p| p.1).sum();
            (narrow(lo), narrow(hi))
        };
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        [
            sum(&[term(6 * a, 1), term(2 * b, 1)]),
            sum(&[term(2 * b, 1), term(2 * c, 1)]),
            sum(&[term(2 * c, 1), term(6 * d, 1)]),
            sum(&[term(3 * a, 2), term(2 * b, 2), term(c, 2)]),
            sum(&[term(b, 2), term(2 * c, 2), term(3 * d, 2)]),
            sum(&[term(a, 3), term(b, 3), term(c, 3), term(d, 3)]),
        ]
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("lattice coordinate exceeds the signed 64-bit range")
}

/// The three graded pieces of `phi(t + dt, s + ds) - phi(t, s)`, split by
/// total degree in `(dt, ds)`.
///
/// For every cubic the pieces satisfy, as exact polynomial identities:
/// `linear = phi_t(t,s) dt + phi_s(t,s) ds`,
/// `bilinear = t phi_t(dt,ds) + s phi_s(dt,ds)`, and
/// `remainder = phi(dt, ds)`, a degree-3 homogeneous polynomial in
/// `(dt, ds)` with no `(t, s)` dependence. This grading is what makes the
/// surface translation-dilation invariant.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TaylorParts {
    pub linear: Poly4,
    pub bilinear: Poly4,
    pub remainder: Poly4,
}

/// Variables of [`Poly4`] in embedding order.
pub const TAYLOR_VARS: [&str; 4] = ["t", "s", "dt", "ds"];

/// Splits `phi(t + dt, s + ds) - phi(t, s)` into its graded pieces.
pub fn taylor_decomposition(phi: &CubicForm) -> TaylorParts {
    let p = phi.as_poly();
    let shifted = p.subst(&[
        &Poly4::var(0) + &Poly4::var(2),
        &Poly4::var(1) + &Poly4::var(3),
    ]);
    let diff = &shifted - &p.map_vars::<4>([0, 1]);
    let mut graded = diff.grade_by(&[2, 3]);
    TaylorParts {
        linear: graded.remove(&1).unwrap_or_default(),
        bilinear: graded.remove(&2).unwrap_or_default(),
        remainder: graded.remove(&3).unwrap_or_default(),
    }
}

impl TaylorParts {
    /// Expected pieces built independently from the partials.
    pub fn expected(phi: &CubicForm) -> TaylorParts {
        let (pt, ps) = phi.partials();
        let in_ts = |q: &Poly2| q.map_vars::<4>([0, 1]);
        let in_d = |q: &Poly2| q.map_vars::<4>([2, 3]);
        TaylorParts {
            linear: &(&in_ts(&pt) * &Poly4::var(2)) + &(&in_ts(&ps) * &Poly4::var(3)),
            bilinear: &(&Poly4::var(0) * &in_d(&pt)) + &(&Poly4::var(1) * &in_d(&ps)),
            remainder: in_d(&phi.as_poly()),
        }
    }

    /// Checks the three graded identities coefficient-wise.
    pub fn holds_for(&self, phi: &CubicForm) -> bool {
        *self == Self::expected(phi)
    }

    /// Reassembles the full difference `phi(t+dt, s+ds) - phi(t, s)`.
    pub fn total(&self) -> Poly4 {
        &(&self.linear + &self.bilinear) + &self.remainder
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;
    use num_traits::Zero;

    fn form(a: i64, b: i64, c: i64, d: i64) -> CubicForm {
        CubicForm::from_ints(a, b, c, d)
    }

    #[test]
    fn nondegeneracy_rank_examples() {
        assert_eq!(form(1, 0, 0, 1).nondegeneracy_rank(), 2);
        assert_eq!(form(1, 3, 3, 1).nondegeneracy_rank(), 1); // (t+s)^3
        assert_eq!(form(0, 0, 0, 0).nondegeneracy_rank(), 0);
        assert_eq!(form(1, 0, 0, 0).nondegeneracy_rank(), 1); // t^3
    }

    #[test]
    fn degenerate_iff_minors_vanish() {
        // rank < 2 implies all 2x2 minors of the non-degeneracy matrix vanish
        let minors = |f: &CubicForm| {
            let (a, b, c, d) = (&f.a, &f.b, &f.c, &f.d);
            [
                &(&int(6) * &(a * c)) - &(&int(2) * &(b * b)),
                &(&int(9) * &(a * d)) - &(b * c),
                &(&int(6) * &(b * d)) - &(&int(2) * &(c * c)),
            ]
        };
        // perfect cubes (mu t + nu s)^3 are exactly the degenerate forms
        for (mu, nu) in [(1i64, 2i64), (-3, 1), (2, 0), (0, 5), (1, 1)] {
            let cube = form(
                mu * mu * mu,
                3 * mu * mu * nu,
                3 * mu * nu * nu,
                nu * nu * nu,
            );
            assert!(cube.nondegeneracy_rank() < 2, "({mu} t + {nu} s)^3");
            assert!(minors(&cube).iter().all(|m| m.is_zero()));
        }
        assert!(minors(&form(1, 0, 0, 1)).iter().any(|m| !m.is_zero()));
    }

    #[test]
    fn homogeneity_sampled() {
        let phi = form(2, -1, 3, 5);
        let p = phi.as_poly();
        for (l, t, s) in [(rat(2, 3), rat(1, 7), rat(5, 2)), (int(-4), int(3), rat(1, 3))] {
            let lhs = p.eval(&[&l * &t, &l * &s]);
            let rhs = &(&(&l * &l) * &l) * &p.eval(&[t, s]);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn partials_examples() {
        let t2 = |c: i64| Poly2::monomial([2, 0], int(c));
        let s2 = |c: i64| Poly2::monomial([0, 2], int(c));
        let ts = |c: i64| Poly2::monomial([1, 1], int(c));

        let (pt, ps) = form(1, 0, 0, 1).partials();
        assert_eq!(pt, t2(3));
        assert_eq!(ps, s2(3));

        let (pt, ps) = form(0, 1, 0, 0).partials(); // t^2 s
        assert_eq!(pt, ts(2));
        assert_eq!(ps, t2(1));

        let (pt, ps) = form(1, 3, 3, 1).partials(); // (t+s)^3
        let sq3 = (&Poly2::var(0) + &Poly2::var(1)).pow(2).scale(&int(3));
        assert_eq!(pt, sq3);
        assert_eq!(ps, sq3);
    }

    #[test]
    fn embeddings_examples() {
        let f = form(1, 0, 0, 1).counting().unwrap();
        assert_eq!(f.embed_s(1, 2), [1, 2, 3, 12, 9]);
        assert_eq!(f.embed_s(0, 0), [0, 0, 0, 0, 0]);
        assert_eq!(f.embed_s_prime(1, 2), [6, 0, 12, 3, 12, 9]);
        assert_eq!(f.embed_s_prime(0, 0), [0; 6]);

        let g = form(0, 1, 0, 0).counting().unwrap(); // t^2 s
        assert_eq!(g.embed_s(2, 1), [2, 1, 4, 4, 4]);
        assert_eq!(g.embed_s_prime(2, 1), [2, 4, 0, 4, 4, 4]);
    }

    #[test]
    fn embeddings_injective_small_grid() {
        use std::collections::HashSet;
        for f in [form(1, 0, 0, 1), form(0, 1, 1, 0), form(1, 2, -1, 3)] {
            assert!(f.is_nondegenerate());
            let cf = f.counting().unwrap();
            let n = 20i64;
            let mut seen_s = HashSet::new();
            let mut seen_sp = HashSet::new();
            for x in 0..=n {
                for y in 0..=n {
                    assert!(seen_s.insert(cf.embed_s(x, y)));
                    assert!(seen_sp.insert(cf.embed_s_prime(x, y)));
                }
            }
        }
    }

    #[test]
    fn counting_bounds_enforced() {
        assert!(form(1001, 0, 0, 0).counting().is_err());
        let half = CubicForm::new(rat(1, 2), int(0), int(0), int(0));
        assert!(matches!(
            half.counting(),
            Err(Error::NonIntegerCoefficient(_))
        ));
        let g = form(1000, -1000, 1000, -1000).counting().unwrap();
        // extreme admissible inputs stay within i64
        g.embed_s(10_000, 10_000);
        g.embed_s_prime(10_000, 10_000);
    }

    #[test]
    fn interval_bounds_contain_values() {
        let f = form(3, -2, 0, -1).counting().unwrap();
        let n = 9u32;
        let b5 = f.bounds_s(n);
        let b6 = f.bounds_s_prime(n);
        for x in 0..=i64::from(n) {
            for y in 0..=i64::from(n) {
                for (v, (lo, hi)) in f.embed_s(x, y).iter().zip(b5.iter()) {
                    assert!(lo <= v && v <= hi);
                }
                for (v, (lo, hi)) in f.embed_s_prime(x, y).iter().zip(b6.iter()) {
                    assert!(lo <= v && v <= hi);
                }
            }
        }
    }

    #[test]
    fn form_parse_display_roundtrip() {
        let f: CubicForm = "1,0,0,1".parse().unwrap();
        assert_eq!(f, form(1, 0, 0, 1));
        assert_eq!(f.to_string(), "1,0,0,1");
        let g: CubicForm = "1/2,-3,2/4,0".parse().unwrap();
        assert_eq!(g.to_string(), "1/2,-3,1/2,0");
        assert!("1,2,3".parse::<CubicForm>().is_err());
        assert!("1,2,3,x".parse::<CubicForm>().is_err());
    }

    #[test]
    fn taylor_examples() {
        // phi = t^2 s: remainder = dt^2 ds, bilinear = t*(2 dt ds) + s*dt^2
        let parts = taylor_decomposition(&form(0, 1, 0, 0));
        let dt = Poly4::var(2);
        let ds = Poly4::var(3);
        assert_eq!(parts.remainder, &dt.pow(2) * &ds);
        let expect_bilinear = &(&Poly4::var(0) * &(&dt * &ds).scale(&int(2)))
            + &(&Poly4::var(1) * &dt.pow(2));
        assert_eq!(parts.bilinear, expect_bilinear);

        // phi = t^3 + s^3: linear part = 3 t^2 dt + 3 s^2 ds
        let parts = taylor_decomposition(&form(1, 0, 0, 1));
        let expect_linear = &(&Poly4::var(0).pow(2).scale(&int(3)) * &dt)
            + &(&Poly4::var(1).pow(2).scale(&int(3)) * &ds);
        assert_eq!(parts.linear, expect_linear);
    }

    #[test]
    fn taylor_grading_is_a_partition() {
        let phi = CubicForm::new(rat(2, 3), int(-1), rat(5, 7), int(4));
        let parts = taylor_decomposition(&phi);
        assert!(parts.holds_for(&phi));
        // the three pieces reassemble the full shifted difference
        let p = phi.as_poly();
        let shifted = p.subst(&[
            &Poly4::var(0) + &Poly4::var(2),
            &Poly4::var(1) + &Poly4::var(3),
        ]);
        assert_eq!(parts.total(), &shifted - &p.map_vars::<4>([0, 1]));
        // remainder is homogeneous of degree 3 in (dt, ds) with no (t, s) part
        assert!(parts.remainder.terms().all(|(e, _)| {
            e[0] == 0 && e[1] == 0 && u32::from(e[2]) + u32::from(e[3]) == 3
        }));
    }
}
