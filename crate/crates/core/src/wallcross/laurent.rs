use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::{check_slots, content, qt, CountingTable, GvTable, WallcrossError};
use crate::qseries::{self, Cutoff, Series};
use crate::rational::{self, Rational};

/// Laurent polynomial in `q`: exponent → coefficient, zeros never stored.
pub type LaurentPoly = BTreeMap<i64, Rational>;

fn add_into(p: &mut LaurentPoly, e: i64, c: Rational) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(e).or_insert_with(Rational::zero);
    *entry += c;
    if entry.is_zero() {
        p.remove(&e);
    }
}

/// `f_g(q) = q^{1−g} (1+q)^{2g−2}` for `g ≥ 1`.
pub fn f_g(g: u32) -> LaurentPoly {
    f_g_at(g, 1)
}

/// `f_g(−(−q)^a)`. With `x = −(−q)^a`, `x^e = q^{ae}` for odd `a` and
/// `(−1)^e q^{ae}` for even `a`.
pub fn f_g_at(g: u32, a: u32) -> LaurentPoly {
    assert!(g >= 1, "f_g is a Laurent polynomial only for g >= 1");
    assert!(a >= 1);
    let top = 2 * g as i64 - 2;
    let mut out = LaurentPoly::new();
    for k in 0..=top {
        let e = k + 1 - g as i64;
        let mut c = rational::binomial(top, k as u64);
        if a.is_multiple_of(2) && e.rem_euclid(2) == 1 {
            c = -c;
        }
        add_into(&mut out, a as i64 * e, c);
    }
    out
}

fn contributions(bps: &GvTable, beta: &[u32]) -> LaurentPoly {
    let mut out = LaurentPoly::new();
    let d = content(beta);
    for a in (1..=d).filter(|a| d.is_multiple_of(*a)) {
        let sub: Vec<u32> = beta.iter().map(|b| b / a).collect();
        for ((g, b), &n) in bps.range((1, sub.clone())..) {
            if *g == 0 || *b != sub || n == 0 {
                continue;
            }
            let w = rational::ratio(n, a as i64);
            for (e, c) in f_g_at(*g, a) {
                add_into(&mut out, e, c * &w);
            }
        }
    }
    out
}

/// `L_β(q) = Σ_{g≥1} Σ_{a | β} (n_g^{β/a}/a) f_g(−(−q)^a)` for every
/// nonzero `β ≤ beta_max`.
pub fn l_polynomials(bps: &GvTable, beta_max: &[u32]) -> BTreeMap<Vec<u32>, LaurentPoly> {
    let mut out = BTreeMap::new();
    for beta in super::curve_classes(beta_max) {
        let p = contributions(bps, &beta);
        if !p.is_empty() {
            out.insert(beta, p);
        }
    }
    out
}

/// The limit-stable table `Σ L_{n,β} q^n t^β = exp(Σ_β L_β(q) t^β)` in
/// `cutoff`. Only the `L` part of the returned table is populated.
pub fn l_from_bps(bps: &GvTable, cutoff: &Cutoff) -> Result<CountingTable, WallcrossError> {
    for (_, beta) in bps.keys() {
        check_slots(cutoff, beta)?;
    }
    let mut log = Series::zero(cutoff.clone());
    for (beta, p) in l_polynomials(bps, &cutoff.t_max) {
        for (e, c) in p {
            let m = qt(e, &beta);
            if cutoff.graded_q(&m) < cutoff.q_min {
                return Err(WallcrossError::CutoffExceeded(format!(
                    "L term q^{} t^{:?} lies below the box; raise q_slope",
                    e, beta
                )));
            }
            log.add_term(m, c);
        }
    }
    let series = qseries::exp(&log)?;
    let l = series
        .into_terms()
        .into_iter()
        .map(|(m, c)| ((m.q, m.t), c))
        .collect();
    CountingTable::new(cutoff.clone(), BTreeMap::new(), l, true)
}

/// Inverts [`l_polynomials`]: recovers `n_g^β` (`g ≥ 1`) by recursion over
/// divisors of `β` and a triangular solve in the `f_g` basis, whose lowest
/// term is `q^{1−g}` with coefficient 1.
pub fn bps_from_l(
    l: &BTreeMap<Vec<u32>, LaurentPoly>,
) -> Result<BTreeMap<(u32, Vec<u32>), Rational>, WallcrossError> {
    // every divisor class must be solved first, even when absent from `l`
    let mut classes = BTreeSet::new();
    for beta in l.keys() {
        let d = content(beta);
        for a in (1..=d).filter(|a| d.is_multiple_of(*a)) {
            classes.insert(beta.iter().map(|b| b / a).collect::<Vec<u32>>());
        }
    }
    let mut classes: Vec<Vec<u32>> = classes.into_iter().collect();
    classes.sort_by_key(|b| (b.iter().sum::<u32>(), b.clone()));

    let mut found: BTreeMap<(u32, Vec<u32>), Rational> = BTreeMap::new();
    for beta in classes {
        if beta.iter().all(|&b| b == 0) {
            continue;
        }
        let mut residual = l.get(&beta).cloned().unwrap_or_default();
        let d = content(&beta);
        for a in (2..=d).filter(|a| d.is_multiple_of(*a)) {
            let sub: Vec<u32> = beta.iter().map(|b| b / a).collect();
            for ((g, b), n) in found.iter() {
                if *b != sub {
                    continue;
                }
                let w = n / rational::int(a as i64);
                for (e, c) in f_g_at(*g, a) {
                    add_into(&mut residual, e, -(c * &w));
                }
            }
        }
        while let Some((&low, c)) = residual.iter().next() {
            if low > 0 {
                return Err(WallcrossError::NotInSpan { beta, degree: low });
            }
            let g = (1 - low) as u32;
            let n = c.clone();
            for (e, fc) in f_g(g) {
                add_into(&mut residual, e, -(fc * &n));
            }
            found.insert((g, beta.clone()), n);
        }
    }
    Ok(found)
}
