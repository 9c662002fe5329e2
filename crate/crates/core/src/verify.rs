//! Seeded end-to-end identity checks shared by the CLI and the test suites.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::invariants::{self, Convention, HilbSeries, InvariantsError};
use crate::mukai::{self, Isometry, MukaiVector, NSLattice};
use crate::qseries::{self, Cutoff, Series};
use crate::rational::{self, Rational};
use crate::report::{compare, monomial_json, IdentityReport};
use crate::stability::{self, StabilityError, StabilityParam};
use crate::wallcross::{self, Charge, GvTable, WallcrossError};

fn random_rational(rng: &mut impl Rng, num: i64, den: i64) -> Rational {
    rational::ratio(rng.gen_range(-num..=num), rng.gen_range(1..=den))
}

fn random_class(rng: &mut impl Rng, rho: usize, bound: i64) -> Vec<i64> {
    (0..rho).map(|_| rng.gen_range(-bound..=bound)).collect()
}

/// `pt_wallcross_rhs(pipeline_table(T)) = bps_product(T)`.
pub fn pt_bps(bps: &GvTable, cutoff: &Cutoff) -> Result<IdentityReport, WallcrossError> {
    let table = wallcross::pipeline_table(bps, cutoff)?;
    let lhs = wallcross::pt_wallcross_rhs(&table, cutoff)?;
    let rhs = wallcross::bps_product(bps, cutoff)?;
    Ok(compare("pt-bps", &lhs, &rhs))
}

/// Random table of `charges` distinct charges with small rational weights.
pub fn random_charge_table(seed: u64, charges: usize, cutoff: &Cutoff) -> BTreeMap<Charge, Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes = vec![vec![0; cutoff.t_slots()]];
    classes.extend(wallcross::curve_classes(&cutoff.t_max));
    let mut out = BTreeMap::new();
    let mut attempts = 0;
    while out.len() < charges && attempts < 1000 {
        attempts += 1;
        let beta = classes[rng.gen_range(0..classes.len())].clone();
        let base = cutoff.graded_q(&qseries::Monomial::qt(0, &beta));
        let lo = if beta.iter().all(|&b| b == 0) { 1 } else { 0 };
        let hi = cutoff.q_max - base;
        if hi < lo {
            continue;
        }
        let n = rng.gen_range(lo..=hi);
        let p = random_rational(&mut rng, 5, 3);
        if !p.is_zero() {
            out.insert((n, beta), p);
        }
    }
    out
}

/// `−log(1 + Z) = stratified sum` on a random table.
pub fn behrend_log(seed: u64, charges: usize, cutoff: &Cutoff) -> Result<IdentityReport, WallcrossError> {
    let table = random_charge_table(seed, charges, cutoff);
    let z = Series::from_terms(
        cutoff.clone(),
        table.iter().map(|((n, b), p)| (qseries::Monomial::qt(*n, b), p.clone())),
    );
    let lhs = wallcross::behrend_to_reduced(&z)?;
    let rhs = wallcross::stratification_oracle(&table, cutoff)?;
    Ok(compare("behrend-log", &lhs, &rhs))
}

/// Random ample class: retries until `ω² > 0`.
fn random_omega(rng: &mut impl Rng, lattice: &NSLattice) -> Vec<Rational> {
    loop {
        let w: Vec<Rational> = (0..lattice.rank()).map(|_| random_rational(rng, 6, 4)).collect();
        if lattice.dot(&w, &w).map(|x| x.is_positive()).unwrap_or(false) {
            return w;
        }
    }
}

/// Random stability parameter with rational `B`, ample `ω` and `k > 0`.
pub fn random_param(rng: &mut impl Rng, lattice: &NSLattice) -> StabilityParam {
    let b = (0..lattice.rank()).map(|_| random_rational(rng, 6, 5)).collect();
    let omega = random_omega(rng, lattice);
    let k = rational::ratio(rng.gen_range(1..=9), rng.gen_range(1..=4));
    StabilityParam::new(b, omega, k, rational::ratio(1, 2), lattice).expect("ample by construction")
}

/// Normalized reduced Hilbert polynomial equals `n − Re Z/Im Z` on
/// `count` random rank-zero vectors.
pub fn lemma46(seed: u64, count: usize, lattice: &NSLattice) -> Result<IdentityReport, StabilityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let p = random_param(&mut rng, lattice);
        let l = random_class(&mut rng, lattice.rank(), 5);
        let v = MukaiVector::integral(0, &l, rng.gen_range(-9..=9));
        if lattice.dot(&v.l, &p.omega)?.is_zero() {
            continue;
        }
        checked += 1;
        if !stability::lemma46_check(&v, &p, lattice)? {
            let h = stability::reduced_hilbert(&v, &p.b, &p.scaled_omega(), 1, lattice)?.monic();
            let z = stability::central_charge(&v, &p, lattice)?;
            return Ok(IdentityReport::failed(
                "lemma46",
                None,
                checked,
                json!({"v": v, "param": p}),
                serde_json::to_string(&h).unwrap_or_default(),
                format!("n - ({})/({})", rational::format(&z.re), rational::format(&z.im)),
            ));
        }
    }
    Ok(IdentityReport::passed("lemma46", None, checked))
}

/// Box for gerbe checks: `u`-graded so that `exp(F)` is honest.
pub fn gerbe_cutoff(u_max: i64, t_max: Vec<u32>) -> Cutoff {
    Cutoff::power_series(0, t_max).with_u(0, u_max).with_u_slope(2)
}

/// Coefficientwise `r^{2g−1}` scaling of `F = gv_resummation(T)` and
/// `Z(ru)^r = exp(r F(ru))` for `Z = exp(F)`.
pub fn gerbe(seed: u64, r: u32, g_max: u32, cutoff: &Cutoff) -> Result<IdentityReport, WallcrossError> {
    let bps = wallcross::synthetic_gv_table(seed, g_max, &cutoff.t_max, 4);
    let f = wallcross::gv_resummation(&bps, cutoff)?;
    let scaled = wallcross::gerbe_rescale(&f, r)?;
    let rr = rational::int(r as i64);
    for (i, (m, c)) in f.terms().iter().enumerate() {
        let expect = c * rational::pow(&rr, m.u + 1);
        let got = scaled.coefficient(m)?;
        if got != expect {
            return Ok(IdentityReport::failed(
                "gerbe-rescale",
                Some(cutoff.clone()),
                i + 1,
                monomial_json(m),
                rational::format(&got),
                rational::format(&expect),
            ));
        }
    }
    let z = qseries::exp(&f)?;
    let lhs = wallcross::gerbe_partition_power(&z, r)?;
    let rhs = qseries::exp(&scaled)?;
    let mut report = compare("gerbe-rescale", &lhs, &rhs);
    report.checked += f.len();
    Ok(report)
}

/// Random spherical class `(1, l, (l² + 2)/2)` on an even lattice.
pub fn random_spherical(rng: &mut impl Rng, lattice: &NSLattice, bound: i64) -> MukaiVector {
    let l = random_class(rng, lattice.rank(), bound);
    let ll = lattice.dot_int(&l, &l);
    MukaiVector::integral(1, &l, (ll + 2) / 2)
}

/// `J(g v) = J(v)` for `count` random spherical reflections `g`.
pub fn isometry(
    seed: u64,
    count: usize,
    lattice: &NSLattice,
    hilb: &HilbSeries,
    convention: Convention,
) -> Result<IdentityReport, InvariantsError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    while checked < count {
        let delta = random_spherical(&mut rng, lattice, 2);
        let g = Isometry::reflection(&delta, lattice)?;
        let l = random_class(&mut rng, lattice.rank(), 3);
        let v = MukaiVector::integral(rng.gen_range(-3..=3), &l, rng.gen_range(-4..=4));
        if v.is_zero() {
            continue;
        }
        let vv = mukai::pairing(&v, &v, lattice)?;
        let e = convention.exponent(&rational::as_integer(&vv).expect("integral"))?;
        if e > hilb.n_max() as i64 {
            continue;
        }
        checked += 1;
        let gv = g.apply(&v, lattice)?;
        let a = invariants::multiple_cover_j(&v, lattice, hilb, convention)?;
        let b = invariants::multiple_cover_j(&gv, lattice, hilb, convention)?;
        if a != b {
            return Ok(IdentityReport::failed(
                "isometry",
                None,
                checked,
                json!({"v": v, "gv": gv, "delta": delta}),
                rational::format(&a),
                rational::format(&b),
            ));
        }
    }
    Ok(IdentityReport::passed("isometry", None, checked))
}
