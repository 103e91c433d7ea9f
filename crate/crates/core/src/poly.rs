//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms live in a `BTreeMap` keyed by the exponent vector, so polynomials
//! have a canonical form (no stored zero coefficients, deterministic term
//! order) and `==` is exact coefficient-wise equality. The arity is a const
//! generic: the cubic-form algebra uses [`Poly2`] over `(t, s)` and the shift
//! decomposition uses [`Poly4`] over `(t, s, dt, ds)`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Sparse polynomial in `V` variables over the rationals.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Poly<const V: usize> {
    terms: BTreeMap<[u16; V], BigRational>,
}

/// Bivariate polynomial, variables `(t, s)`.
pub type Poly2 = Poly<2>;
/// Four-variable polynomial, variables `(t, s, dt, ds)`.
pub type Poly4 = Poly<4>;

impl<const V: usize> Poly<V> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term([0; V], c);
        p
    }

    /// The monomial `x_i`.
    pub fn var(i: usize) -> Self {
        assert!(i < V);
        let mut exps = [0u16; V];
        exps[i] = 1;
        Self::monomial(exps, BigRational::one())
    }

    pub fn monomial(exps: [u16; V], coeff: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(exps, coeff);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms in canonical (exponent-lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16; V], &BigRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u16; V]) -> BigRational {
        self.terms.get(exps).cloned().unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, exps: [u16; V], coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, q)| (*e, q * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut acc = Self::constant(BigRational::one());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[BigRational; V]) -> BigRational {
        let mut acc = BigRational::zero();
        for (exps, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (e, x) in exps.iter().zip(point.iter()) {
                for _ in 0..*e {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> Self {
        assert!(i < V);
        let mut out = Self::zero();
        for (exps, coeff) in &self.terms {
            if exps[i] == 0 {
                continue;
            }
            let mut e = *exps;
            e[i] -= 1;
            out.add_term(e, coeff * BigRational::from_integer(exps[i].into()));
        }
        out
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| u32::from(x)).sum())
            .max()
    }

    /// True iff every term has total degree exactly `deg` in all variables.
    pub fn is_homogeneous(&self, deg: u32) -> bool {
        self.terms
            .keys()
            .all(|e| e.iter().map(|&x| u32::from(x)).sum::<u32>() == deg)
    }

    /// Splits the polynomial by total degree in the selected variables.
    ///
    /// Returns a map `degree -> polynomial` whose values sum to `self`.
    pub fn grade_by(&self, vars: &[usize]) -> BTreeMap<u32, Self> {
        let mut out: BTreeMap<u32, Self> = BTreeMap::new();
        for (exps, coeff) in &self.terms {
            let g: u32 = vars.iter().map(|&i| u32::from(exps[i])).sum();
            out.entry(g).or_default().add_term(*exps, coeff.clone());
        }
        out
    }

    /// Re-indexes variables into a (possibly wider) polynomial: variable `i`
    /// of `self` becomes variable `map[i]` of the result.
    pub fn map_vars<const W: usize>(&self, map: [usize; V]) -> Poly<W> {
        assert!(map.iter().all(|&j| j < W));
        let mut out = Poly::<W>::zero();
        for (exps, coeff) in &self.terms {
            let mut e = [0u16; W];
            for (i, &j) in map.iter().enumerate() {
                e[j] += exps[i];
            }
            out.add_term(e, coeff.clone());
        }
        out
    }

    /// Substitutes each variable by a polynomial in `W` variables.
    pub fn subst<const W: usize>(&self, images: &[Poly<W>; V]) -> Poly<W> {
        let mut out = Poly::<W>::zero();
        for (exps, coeff) in &self.terms {
            let mut term = Poly::<W>::constant(coeff.clone());
            for (img, &e) in images.iter().zip(exps.iter()) {
                if e > 0 {
                    term = &term * &img.pow(u32::from(e));
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Renders the polynomial with the given variable names, canonical term
    /// order, e.g. `"3*t^2 + 2*t*s - 1/2"`. The zero polynomial prints `"0"`.
    pub fn render(&self, names: &[&str; V]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (exps, coeff) in &self.terms {
            let mut parts: Vec<String> = Vec::new();
            let is_const = exps.iter().all(|&e| e == 0);
            if !coeff.is_one() || is_const {
                parts.push(crate::rat::fmt_compact(coeff));
            }
            for (name, &e) in names.iter().zip(exps.iter()) {
                match e {
                    0 => {}
                    1 => parts.push((*name).to_string()),
                    _ => parts.push(format!("{name}^{e}")),
                }
            }
            let term = parts.join("*");
            if out.is_empty() {
                out = term;
            } else if let Some(rest) = term.strip_prefix('-') {
                out = format!("{out} - {rest}");
            } else {
                out = format!("{out} + {term}");
            }
        }
        out
    }
}

impl<const V: usize> Add for &Poly<V> {
    type Output = Poly<V>;
    fn add(self, rhs: Self) -> Poly<V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<const V: usize> Sub for &Poly<V> {
    type Output = Poly<V>;
    fn sub(self, rhs: Self) -> Poly<V> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<const V: usize> Neg for &Poly<V> {
    type Output = Poly<V>;
    fn neg(self) -> Poly<V> {
        Poly {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
        }
    }
}

impl<const V: usize> Mul for &Poly<V> {
    type Output = Poly<V>;
    fn mul(self, rhs: Self) -> Poly<V> {
        let mut out = Poly::<V>::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let mut e = *ea;
                for (x, y) in e.iter_mut().zip(eb.iter()) {
                    *x += *y;
                }
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}
