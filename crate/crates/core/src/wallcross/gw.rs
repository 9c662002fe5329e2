use num_traits::One;

use super::{check_slots, GvTable, WallcrossError};
use crate::qseries::{self, Cutoff, Monomial, Series, Var};
use crate::rational::{self, Rational};

/// `F = Σ_{g,β,k} (n_g^β/k) (2 sin(ku/2))^{2g−2} t^{kβ}`, Laurent in `u`.
///
/// The leading `u` power of every summand must lie in the box; otherwise
/// the truncation would silently drop known terms.
pub fn gv_resummation(bps: &GvTable, cutoff: &Cutoff) -> Result<Series, WallcrossError> {
    let slots = cutoff.t_slots();
    let mut out = Series::zero(cutoff.clone());
    for ((g, beta), &n) in bps {
        check_slots(cutoff, beta)?;
        if n == 0 || beta.iter().all(|&b| b == 0) {
            continue;
        }
        let mut k = 1u32;
        loop {
            let kb: Vec<u32> = beta.iter().map(|b| b * k).collect();
            if !cutoff.contains_t(&kb) {
                break;
            }
            let shift = cutoff.u_slope * kb.iter().map(|&x| x as i64).sum::<i64>();
            let lead = 2 * *g as i64 - 2;
            if lead + shift < cutoff.u_min {
                return Err(WallcrossError::CutoffExceeded(format!(
                    "u^{} t^{:?} lies below the box; raise u_slope or lower u_min",
                    lead, kb
                )));
            }
            // the u-series alone, in the box seen from t^{kβ}
            let window = Cutoff::u_only(cutoff.u_min - shift, cutoff.u_max - shift);
            let s = qseries::sin_halfangle_power(k, *g, &window);
            let w = rational::ratio(n, k as i64);
            for (m, c) in s.terms() {
                let mono = Monomial {
                    q: 0,
                    t: kb.clone(),
                    u: m.u,
                    y2: 0,
                };
                out.add_term(mono, c * &w);
            }
            debug_assert_eq!(out.cutoff().t_slots(), slots);
            k += 1;
        }
    }
    Ok(out)
}

/// `r · F(ru)`: the `u^{2g−2} t^β` coefficient scales by `r^{2g−1}`.
pub fn gerbe_rescale(f: &Series, r: u32) -> Result<Series, WallcrossError> {
    let r = rational::int(r as i64);
    Ok(f.rescale_variable(Var::U, &r)?.scale(&r))
}

/// `Z(ru)^r` for `Z` with constant term 1.
pub fn gerbe_partition_power(z: &Series, r: u32) -> Result<Series, WallcrossError> {
    if !z.constant_term().is_one() {
        return Err(WallcrossError::NotUnit);
    }
    let scaled = z.rescale_variable(Var::U, &Rational::from_integer((r as i64).into()))?;
    Ok(scaled.pow(r))
}
