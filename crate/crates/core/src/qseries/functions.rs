use num_traits::{One, Zero};
use rayon::prelude::*;

use super::cutoff::Cutoff;
use super::monomial::{Monomial, Var};
use super::series::Series;
use super::QSeriesError;
use crate::rational::{self, Rational};

fn power_cap(cutoff: &Cutoff) -> u64 {
    4 * cutoff.diameter() + 8
}

/// Multiplicative inverse.
///
/// The support of `a` must have a componentwise-minimal monomial `m`
/// (with no curve-class part) carrying a nonzero coefficient; then
/// `a = c·m·(1 + h)` with `h` strictly above `m` and the inverse is the
/// Neumann series of `1 + h` times `m^{-1}/c`. Leading Laurent exponents
/// negate and the upper bounds shift down by twice the leading exponent.
pub fn inverse(a: &Series) -> Result<Series, QSeriesError> {
    let cutoff = a.cutoff();
    let slots = cutoff.t_slots();
    let mut iter = a.terms().keys();
    let first = iter.next().ok_or(QSeriesError::ZeroLeadingTerm)?;
    let mut lead = Monomial {
        q: cutoff.graded_q(first),
        t: first.t.clone(),
        u: cutoff.graded_u(first),
        y2: first.y2,
    };
    for m in a.terms().keys() {
        lead.q = lead.q.min(cutoff.graded_q(m));
        lead.u = lead.u.min(cutoff.graded_u(m));
        lead.y2 = lead.y2.min(m.y2);
        for (l, e) in lead.t.iter_mut().zip(&m.t) {
            *l = (*l).min(*e);
        }
    }
    if lead.t.iter().any(|&e| e != 0) {
        return Err(QSeriesError::ZeroLeadingTerm);
    }
    let lead_coeff = a.terms().get(&lead).ok_or(QSeriesError::ZeroLeadingTerm)?.clone();
    let inv_coeff = lead_coeff.recip();

    let rel_cutoff = Cutoff {
        q_min: 0,
        q_max: cutoff.q_max - lead.q,
        t_max: cutoff.t_max.clone(),
        u_min: 0,
        u_max: cutoff.u_max - lead.u,
        y2_min: 0,
        y2_max: cutoff.y2_max - lead.y2,
        q_slope: cutoff.q_slope,
        u_slope: cutoff.u_slope,
    };
    // -h where a / (c m) = 1 + h
    let minus_h = Series::from_terms(
        rel_cutoff.clone(),
        a.terms()
            .iter()
            .filter(|(m, _)| **m != lead)
            .map(|(m, c)| (m.div(&lead).expect("lead has no t part"), -(c * &inv_coeff))),
    );
    let mut sum = Series::one(rel_cutoff.clone());
    let mut power = Series::one(rel_cutoff.clone());
    let cap = power_cap(&rel_cutoff);
    let mut k = 0;
    loop {
        power = power.mul(&minus_h);
        if power.is_zero() {
            break;
        }
        k += 1;
        if k > cap {
            return Err(QSeriesError::NotNilpotent);
        }
        sum = sum.add(&power);
    }

    let out_cutoff = Cutoff {
        q_min: cutoff.q_min - 2 * lead.q,
        q_max: cutoff.q_max - 2 * lead.q,
        u_min: cutoff.u_min - 2 * lead.u,
        u_max: cutoff.u_max - 2 * lead.u,
        y2_min: cutoff.y2_min - 2 * lead.y2,
        y2_max: cutoff.y2_max - 2 * lead.y2,
        ..cutoff.clone()
    };
    let lead_inv = Monomial {
        q: -lead.q,
        t: vec![0; slots],
        u: -lead.u,
        y2: -lead.y2,
    };
    Ok(Series::from_terms(
        out_cutoff,
        sum.into_terms()
            .into_iter()
            .map(|(m, c)| (m.mul(&lead_inv), c * &inv_coeff)),
    ))
}

fn require_zero_constant(a: &Series) -> Result<(), QSeriesError> {
    if a.constant_term().is_zero() {
        Ok(())
    } else {
        Err(QSeriesError::NonzeroConstantTerm)
    }
}

/// `Σ_{k≥0} a^k / k!`, truncated to the box of `a`.
pub fn exp(a: &Series) -> Result<Series, QSeriesError> {
    require_zero_constant(a)?;
    let cap = power_cap(a.cutoff());
    let mut sum = Series::one(a.cutoff().clone());
    let mut term = sum.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        term = term.mul(a).scale(&Rational::new(1.into(), k.into()));
        if term.is_zero() {
            return Ok(sum);
        }
        if k > cap {
            return Err(QSeriesError::NotNilpotent);
        }
        sum = sum.add(&term);
    }
}

/// `log(1 + a) = Σ_{k≥1} (-1)^{k-1} a^k / k`, truncated to the box of `a`.
pub fn log1p(a: &Series) -> Result<Series, QSeriesError> {
    require_zero_constant(a)?;
    let cap = power_cap(a.cutoff());
    let mut sum = Series::zero(a.cutoff().clone());
    let mut power = a.clone();
    let mut k: u64 = 1;
    while !power.is_zero() {
        if k > cap {
            return Err(QSeriesError::NotNilpotent);
        }
        let sign: i64 = if k % 2 == 1 { 1 } else { -1 };
        sum = sum.add(&power.scale(&Rational::new(sign.into(), k.into())));
        power = power.mul(a);
        k += 1;
    }
    Ok(sum)
}

/// `log(a)` for a series with constant term 1.
pub fn log(a: &Series) -> Result<Series, QSeriesError> {
    if !a.constant_term().is_one() {
        return Err(QSeriesError::NonzeroConstantTerm);
    }
    log1p(&a.sub(&Series::one(a.cutoff().clone())))
}

/// `(1 + c·x)^e` for a single monomial `x`, expanded with generalized
/// binomial coefficients; negative `e` needs no series inversion.
pub fn factor_power(cutoff: &Cutoff, x: &Monomial, c: &Rational, e: i64) -> Result<Series, QSeriesError> {
    if e == 0 || c.is_zero() {
        return Ok(Series::one(cutoff.clone()));
    }
    if x.is_one() {
        let base = Rational::one() + c;
        if base.is_zero() && e < 0 {
            return Err(QSeriesError::ZeroLeadingTerm);
        }
        return Ok(Series::constant(cutoff.clone(), rational::pow(&base, e)));
    }
    // x^j can only be in the box while |j·d| <= max(|lo|, |hi|) for every
    // graded coordinate d of x.
    let reach = |d: i64, lo: i64, hi: i64| -> Option<u64> {
        (d != 0).then(|| (lo.abs().max(hi.abs()) / d.abs()) as u64)
    };
    let mut j_max = u64::MAX;
    let coords = [
        (cutoff.graded_q(x), cutoff.q_min, cutoff.q_max),
        (cutoff.graded_u(x), cutoff.u_min, cutoff.u_max),
        (x.y2, cutoff.y2_min, cutoff.y2_max),
    ];
    for (d, lo, hi) in coords {
        if let Some(r) = reach(d, lo, hi) {
            j_max = j_max.min(r);
        }
    }
    for (&d, &mx) in x.t.iter().zip(&cutoff.t_max) {
        if d != 0 {
            j_max = j_max.min((mx / d) as u64);
        }
    }
    if e > 0 {
        j_max = j_max.min(e as u64);
    }
    let mut out = Series::zero(cutoff.clone());
    let mut c_pow = Rational::one();
    for j in 0..=j_max {
        let m = x.pow(j as u32);
        out.add_term(m, rational::binomial(e, j) * &c_pow);
        c_pow *= c;
    }
    Ok(out)
}

/// Product of series in a balanced reduction tree. Exact arithmetic makes
/// the result independent of the reduction order.
pub fn product(cutoff: &Cutoff, factors: Vec<Series>) -> Series {
    factors
        .into_par_iter()
        .reduce(|| Series::one(cutoff.clone()), |a, b| a.mul(&b))
}

/// `Π_{n=1}^{n_max} (1 − sign·var^n)^{exponent(n)}`.
pub fn product_power(
    cutoff: &Cutoff,
    var: Var,
    sign: i64,
    n_max: u32,
    exponent: impl Fn(u32) -> i64,
) -> Result<Series, QSeriesError> {
    let slots = cutoff.t_slots();
    let c = rational::int(-sign);
    let mut factors = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        let e = exponent(n);
        if e == 0 {
            continue;
        }
        let mut x = Monomial::one(slots);
        match var {
            Var::Q => x.q = n as i64,
            Var::U => x.u = n as i64,
            Var::YHalf => x.y2 = n as i64,
            Var::T(i) => x.t[i] = n,
        }
        factors.push(factor_power(cutoff, &x, &c, e)?);
    }
    Ok(product(cutoff, factors))
}

mod dense {
    use super::Rational;
    use num_traits::Zero;

    pub fn mul(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, x) in a.iter().enumerate().take(len) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(len - i) {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn inverse(a: &[Rational], len: usize) -> Vec<Rational> {
        let a0 = a[0].recip();
        let mut out: Vec<Rational> = Vec::with_capacity(len);
        for n in 0..len {
            if n == 0 {
                out.push(a0.clone());
                continue;
            }
            let mut s = Rational::zero();
            for i in 1..=n.min(a.len() - 1) {
                s += &a[i] * &out[n - i];
            }
            out.push(-(s * &a0));
        }
        out
    }

    pub fn pow(a: &[Rational], e: i64, len: usize) -> Vec<Rational> {
        let base = if e < 0 { inverse(a, len) } else { a[..len.min(a.len())].to_vec() };
        let mut acc = vec![Rational::zero(); len];
        acc[0] = Rational::from_integer(1.into());
        for _ in 0..e.unsigned_abs() {
            acc = mul(&acc, &base, len);
        }
        acc
    }
}

/// `(2 sin(k u / 2))^{2g-2}` as an exact Laurent series in `u`, placed in
/// `cutoff` (only the `u` bounds of the box matter; the series has no other
/// variables). Leading term `k^{2g-2} u^{2g-2}`.
pub fn sin_halfangle_power(k: u32, g: u32, cutoff: &Cutoff) -> Series {
    let lead = 2 * g as i64 - 2;
    let slots = cutoff.t_slots();
    if cutoff.u_max < lead {
        return Series::zero(cutoff.clone());
    }
    let len = (cutoff.u_max - lead) as usize + 1;
    // 2 sin(x/2) = x · Σ_j (-1)^j x^{2j} / (4^j (2j+1)!), with x = k u.
    let k_sq = rational::int(k as i64 * k as i64);
    let mut s = vec![Rational::zero(); len];
    let mut fact = Rational::one();
    let mut k_pow = Rational::one();
    let mut four_pow = Rational::one();
    for j in 0..len.div_ceil(2) {
        if j > 0 {
            let n = 2 * j as i64;
            fact *= rational::int(n * (n + 1));
            k_pow *= &k_sq;
            four_pow *= rational::int(4);
        }
        let sign = if j % 2 == 0 { 1 } else { -1 };
        s[2 * j] = rational::int(sign) * &k_pow / (&four_pow * &fact);
    }
    let p = dense::pow(&s, lead, len);
    let scale = rational::pow(&rational::int(k as i64), lead);
    Series::from_terms(
        cutoff.clone(),
        p.into_iter()
            .enumerate()
            .map(|(i, c)| (Monomial::u(lead + i as i64, slots), c * &scale)),
    )
}
