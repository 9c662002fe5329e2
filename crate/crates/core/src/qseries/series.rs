use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::cutoff::Cutoff;
use super::monomial::{Monomial, Var};
use super::QSeriesError;
use crate::rational::{self, Rational};

/// Truncated multivariate Laurent series with exact rational coefficients.
///
/// Invariants: every stored monomial lies inside `cutoff`, and no stored
/// coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    cutoff: Cutoff,
    terms: BTreeMap<Monomial, Rational>,
}

impl Series {
    pub fn zero(cutoff: Cutoff) -> Self {
        Series {
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(cutoff: Cutoff) -> Self {
        let m = Monomial::one(cutoff.t_slots());
        Self::monomial(cutoff, m, Rational::one())
    }

    pub fn constant(cutoff: Cutoff, c: Rational) -> Self {
        let m = Monomial::one(cutoff.t_slots());
        Self::monomial(cutoff, m, c)
    }

    /// `c · m`, or zero if `m` is outside the box.
    pub fn monomial(cutoff: Cutoff, m: Monomial, c: Rational) -> Self {
        let mut s = Self::zero(cutoff);
        s.add_term(m, c);
        s
    }

    /// Builds a series from terms; repeated monomials are summed and terms
    /// outside the box are dropped.
    pub fn from_terms(cutoff: Cutoff, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut s = Self::zero(cutoff);
        for (m, c) in terms {
            s.add_term(m, c);
        }
        s
    }

    /// Univariate `Σ coeffs[i] q^{q_min + i}`.
    pub fn from_q_coeffs(cutoff: Cutoff, q_min: i64, coeffs: &[Rational]) -> Self {
        let slots = cutoff.t_slots();
        Self::from_terms(
            cutoff,
            coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::q(q_min + i as i64, slots), c.clone())),
        )
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Rational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Rational> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · m` in place, ignoring monomials outside the box.
    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() || !self.cutoff.contains(&m) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// Coefficient of `m`; distinguishes "truncated away" from zero.
    pub fn coefficient(&self, m: &Monomial) -> Result<Rational, QSeriesError> {
        if !self.cutoff.contains(m) {
            return Err(QSeriesError::OutOfCutoff {
                monomial: m.to_string(),
            });
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(Rational::zero))
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.cutoff.t_slots()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Same terms viewed in a smaller (or equal) box.
    pub fn restrict(&self, cutoff: &Cutoff) -> Series {
        let cutoff = self.cutoff.intersect(cutoff);
        Series::from_terms(
            cutoff,
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())),
        )
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(self.cutoff.clone());
        }
        Series {
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// Multiplies by a single monomial term `c · m`.
    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Series {
        Series::from_terms(
            self.cutoff.clone(),
            self.terms.iter().map(|(k, a)| (k.mul(m), a * c)),
        )
    }

    pub fn add(&self, other: &Series) -> Series {
        let mut out = Series::zero(self.cutoff.intersect(&other.cutoff));
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Series) -> Series {
        let mut out = Series::zero(self.cutoff.intersect(&other.cutoff));
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone());
        }
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> Series {
        Series {
            cutoff: self.cutoff.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    /// Cauchy product inside the intersected box.
    pub fn mul(&self, other: &Series) -> Series {
        let cutoff = self.cutoff.intersect(&other.cutoff);
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            if !ma.t.iter().zip(&cutoff.t_max).all(|(e, mx)| e <= mx) {
                continue;
            }
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                if cutoff.contains(&m) {
                    *acc.entry(m).or_insert_with(Rational::zero) += ca * cb;
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Series { cutoff, terms: acc }
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut result = Series::one(self.cutoff.clone());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Replaces `var` by `var^k`.
    ///
    /// Negative lower bounds of a Laurent variable scale by `k` so that
    /// e.g. `u^{-2}` maps to `u^{-6}`; upper bounds are kept. Terms that land
    /// outside the resulting box are dropped.
    pub fn substitute_scale(&self, var: Var, k: u32) -> Series {
        assert!(k >= 1, "substitute_scale needs k >= 1");
        let mut cutoff = self.cutoff.clone();
        let k64 = k as i64;
        if let Some((lo, hi)) = cutoff.bounds_mut(var) {
            if *lo < 0 {
                *lo *= k64;
            }
            if *hi < 0 {
                *hi *= k64;
            }
        }
        Series::from_terms(
            cutoff,
            self.terms.iter().map(|(m, c)| {
                let mut m = m.clone();
                match var {
                    Var::Q => m.q *= k64,
                    Var::U => m.u *= k64,
                    Var::YHalf => m.y2 *= k64,
                    Var::T(i) => m.t[i] *= k,
                }
                (m, c.clone())
            }),
        )
    }

    /// Replaces `var` by `c·var`: the coefficient of a monomial with
    /// `var`-exponent `e` is multiplied by `c^e`.
    pub fn rescale_variable(&self, var: Var, c: &Rational) -> Result<Series, QSeriesError> {
        if c.is_zero() {
            return Err(QSeriesError::ZeroScale);
        }
        Ok(Series {
            cutoff: self.cutoff.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (m.clone(), a * rational::pow(c, m.exponent(var))))
                .collect(),
        })
    }

    /// Checks exact equality of all coefficients inside the common box.
    pub fn agrees_with(&self, other: &Series) -> bool {
        self.sub(other).is_zero()
    }
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs)
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series::neg(self)
    }
}
