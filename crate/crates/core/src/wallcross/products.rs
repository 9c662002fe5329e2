use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{check_slots, content, curve_classes, l_from_bps, qt, sign, Charge, CountingTable, GvTable, WallcrossError};
use crate::qseries::{self, Cutoff, Series};
use crate::rational::{self, Rational};

/// `(1 − (−q)^e t^β)^{exponent}` in `cutoff`. Fails when the base has
/// negative graded `q` degree: the box grading is too weak for it.
fn bps_factor(cutoff: &Cutoff, e: i64, beta: &[u32], exponent: i64) -> Result<Series, WallcrossError> {
    let x = qt(e, beta);
    if cutoff.graded_q(&x) < 0 {
        return Err(WallcrossError::CutoffExceeded(format!(
            "q^{} t^{:?} has negative graded degree; raise q_slope",
            e, beta
        )));
    }
    Ok(qseries::factor_power(cutoff, &x, &rational::int(-sign(e)), exponent)?)
}

/// The BPS product
/// `Π_β Π_{j≥1} (1−(−q)^j t^β)^{j n_0^β} · Π_{g≥1} Π_{k=0}^{2g−2} (1−(−q)^{g−1−k} t^β)^{(−1)^{k+g} n_g^β C(2g−2,k)}`.
pub fn bps_product(bps: &GvTable, cutoff: &Cutoff) -> Result<Series, WallcrossError> {
    let mut jobs: Vec<(i64, Vec<u32>, i64)> = Vec::new();
    for ((g, beta), &n) in bps {
        check_slots(cutoff, beta)?;
        if n == 0 || beta.iter().all(|&b| b == 0) || !cutoff.contains_t(beta) {
            continue;
        }
        let g = *g as i64;
        if g == 0 {
            let deg = qt(0, beta);
            let j_max = cutoff.q_max - cutoff.graded_q(&deg);
            for j in 1..=j_max {
                jobs.push((j, beta.clone(), j * n));
            }
        } else {
            let top = 2 * g - 2;
            for k in 0..=top {
                let c = rational::binomial(top, k as u64);
                let c = rational::as_integer(&c).and_then(|c| i64::try_from(c).ok()).expect("small binomial");
                jobs.push((g - 1 - k, beta.clone(), sign(k + g) * n * c));
            }
        }
    }
    let factors: Result<Vec<Series>, WallcrossError> = jobs
        .par_iter()
        .map(|(e, beta, exponent)| bps_factor(cutoff, *e, beta, *exponent))
        .collect();
    Ok(qseries::product(cutoff, factors?))
}

/// `Π_{n>0, β>0} exp((−1)^{n−1} n N_{n,β} q^n t^β) · Σ L_{n,β} q^n t^β`.
pub fn pt_wallcross_rhs(table: &CountingTable, cutoff: &Cutoff) -> Result<Series, WallcrossError> {
    if !table.cutoff().covers(cutoff) {
        return Err(WallcrossError::CutoffExceeded(
            "counting table box does not cover the requested box".into(),
        ));
    }
    let terms: Vec<(&Charge, &Rational)> = table
        .n_entries()
        .iter()
        .filter(|((n, beta), _)| *n > 0 && beta.iter().any(|&b| b > 0))
        .collect();
    let mut factors: Vec<Series> = terms
        .par_iter()
        .map(|((n, beta), c)| {
            let a = rational::int(sign(n - 1) * n) * *c;
            qseries::exp(&Series::monomial(cutoff.clone(), qt(*n, beta), a))
        })
        .collect::<Result<_, _>>()?;
    factors.push(table.l_series(cutoff));
    Ok(qseries::product(cutoff, factors))
}

/// `N_{n,β} = Σ_{k | (n,β)} n_0^{β/k} / k²` for every `n > 0`, `β > 0` with
/// `q^n t^β` in `cutoff`.
pub fn n_table_from_genus0(bps: &GvTable, cutoff: &Cutoff) -> BTreeMap<Charge, Rational> {
    let mut out = BTreeMap::new();
    for beta in curve_classes(&cutoff.t_max) {
        let n_hi = cutoff.q_max - cutoff.graded_q(&qt(0, &beta));
        for n in 1..=n_hi {
            if !cutoff.contains(&qt(n, &beta)) {
                continue;
            }
            let d = num_integer::gcd(n as u32, content(&beta));
            let mut total = Rational::from_integer(0.into());
            for k in (1..=d).filter(|k| d.is_multiple_of(*k)) {
                let sub: Vec<u32> = beta.iter().map(|b| b / k).collect();
                if let Some(&n0) = bps.get(&(0, sub)) {
                    total += rational::ratio(n0, (k * k) as i64);
                }
            }
            if total != Rational::from_integer(0.into()) {
                out.insert((n, beta.clone()), total);
            }
        }
    }
    out
}

/// Counting table whose `N` part comes from the genus-0 multiple cover
/// formula and whose `L` part is `exp(Σ_β L_β(q) t^β)`.
pub fn pipeline_table(bps: &GvTable, cutoff: &Cutoff) -> Result<CountingTable, WallcrossError> {
    let l = l_from_bps(bps, cutoff)?;
    CountingTable::new(
        cutoff.clone(),
        n_table_from_genus0(bps, cutoff),
        l.l_entries().clone(),
        true,
    )
}
