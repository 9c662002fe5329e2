//! Generating-function identities between counting invariants: the
//! Behrend/reduced log relation, the PT wall-crossing product, the BPS
//! product, `f_g`-basis extraction, GV resummation and gerbe rescaling.
//!
//! `q` is a Laurent variable throughout. Series that carry `q^{1−g} t^β`
//! terms are computed in a box with `q_slope ≥ g_max − 1` so that
//! truncation stays honest (see [`Cutoff`]).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qseries::{Cutoff, Monomial, QSeriesError};

mod gw;
mod laurent;
mod products;
mod strat;
mod table;

pub use gw::{gerbe_partition_power, gerbe_rescale, gv_resummation};
pub use laurent::{bps_from_l, f_g, f_g_at, l_from_bps, l_polynomials, LaurentPoly};
pub use products::{bps_product, n_table_from_genus0, pipeline_table, pt_wallcross_rhs};
pub use strat::{behrend_to_reduced, stratification_oracle};
pub use table::{Charge, CountingTable};

/// `n_g^β` keyed by `(g, β)`.
pub type GvTable = BTreeMap<(u32, Vec<u32>), i64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WallcrossError {
    #[error("cutoff exceeded: {0}")]
    CutoffExceeded(String),
    #[error("L_β for β = {beta:?} is not in the span of f_g (residual lowest degree {degree})")]
    NotInSpan { beta: Vec<u32>, degree: i64 },
    #[error("curve class {0:?} does not match the number of t-slots")]
    SlotMismatch(Vec<u32>),
    #[error("invalid counting table: {0}")]
    InvalidTable(String),
    #[error("series must have constant term 1")]
    NotUnit,
    #[error("charge {0:?} has no positive degree; the log sum would not terminate")]
    InvalidCharge(Charge),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
}

/// Nonzero multidegrees `β` with `β ≤ t_max` componentwise, in graded order.
pub fn curve_classes(t_max: &[u32]) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut beta = vec![0u32; t_max.len()];
    'outer: loop {
        let mut i = 0;
        loop {
            if i == beta.len() {
                break 'outer;
            }
            if beta[i] < t_max[i] {
                beta[i] += 1;
                break;
            }
            beta[i] = 0;
            i += 1;
        }
        out.push(beta.clone());
    }
    out.sort_by_key(|b| (b.iter().sum::<u32>(), b.clone()));
    out
}

/// Largest `a` dividing every coordinate of `β`.
pub fn content(beta: &[u32]) -> u32 {
    beta.iter().fold(0, |g, &b| num_integer::gcd(g, b))
}

fn check_slots(cutoff: &Cutoff, beta: &[u32]) -> Result<(), WallcrossError> {
    if beta.len() != cutoff.t_slots() {
        return Err(WallcrossError::SlotMismatch(beta.to_vec()));
    }
    Ok(())
}

fn sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Graded box covering the window `q ∈ [·, q_hi]`, `|t| ≤ Σ t_max` for
/// tables of genus at most `g_max`. All series in the identities vanish
/// below graded degree 0, so the lower end of the window needs no storage.
pub fn pipeline_cutoff(g_max: u32, t_max: Vec<u32>, q_hi: i64) -> Cutoff {
    let slope = g_max.saturating_sub(1) as i64;
    let degree: i64 = t_max.iter().map(|&x| x as i64).sum();
    Cutoff::power_series(q_hi + slope * degree, t_max).with_q_slope(slope)
}

/// Random integer table with `|n_g^β| ≤ magnitude` for `g ≤ g_max` and
/// nonzero `β ≤ t_max`. About a third of the entries are zero.
pub fn synthetic_gv_table(seed: u64, g_max: u32, t_max: &[u32], magnitude: i64) -> GvTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GvTable::new();
    for beta in curve_classes(t_max) {
        for g in 0..=g_max {
            if rng.gen_range(0..3) == 0 {
                continue;
            }
            let n = rng.gen_range(-magnitude..=magnitude);
            if n != 0 {
                out.insert((g, beta.clone()), n);
            }
        }
    }
    out
}

pub(crate) fn qt(q: i64, beta: &[u32]) -> Monomial {
    Monomial::qt(q, beta)
}
