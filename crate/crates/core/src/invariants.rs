//! Hilbert-scheme Euler characteristics, KKV extraction of `n_{g,h}`, and
//! the rank-zero multiple cover formulas.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::mukai::{self, Isometry, MukaiError, MukaiVector, NSLattice};
use crate::qseries::{self, Cutoff, Monomial, QSeriesError, Series, Var};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantsError {
    #[error("q^{h} coefficient of the KKV product is not a polynomial in z^2")]
    NonzeroResidual { h: u32 },
    #[error("self-intersection {0} is odd")]
    OddSelfIntersection(i64),
    #[error("needs χ(Hilb^{requested}) but the series stops at {available}")]
    CutoffExceeded { requested: i64, available: usize },
    #[error("⟨w,w⟩ = {0} is odd; the half convention needs an even pairing")]
    OddPairing(String),
    #[error("vector is zero")]
    ZeroVector,
    #[error("curve class must be nonzero with nonnegative coordinates")]
    InvalidCurveClass,
    #[error(transparent)]
    Mukai(#[from] MukaiError),
    #[error(transparent)]
    QSeries(#[from] QSeriesError),
}

/// Serde helpers writing integers as JSON numbers when they fit in `i64`
/// and as decimal strings otherwise.
pub mod bigint_json {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Int(i64),
        Str(String),
    }

    fn to_wire<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match n.to_i64() {
            Some(i) => s.serialize_i64(i),
            None => s.serialize_str(&n.to_string()),
        }
    }

    fn from_wire<E: serde::de::Error>(w: Wire) -> Result<BigInt, E> {
        match w {
            Wire::Int(i) => Ok(BigInt::from(i)),
            Wire::Str(t) => t.parse().map_err(E::custom),
        }
    }

    pub struct One<'a>(pub &'a BigInt);

    impl Serialize for One<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            to_wire(self.0, s)
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(One))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            Vec::<Wire>::deserialize(d)?.into_iter().map(from_wire).collect()
        }
    }

    pub mod vec2 {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|row| row.iter().map(One).collect::<Vec<_>>()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigInt>>, D::Error> {
            Vec::<Vec<Wire>>::deserialize(d)?
                .into_iter()
                .map(|row| row.into_iter().map(from_wire).collect())
                .collect()
        }
    }
}

/// `χ(Hilb^n(S))` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HilbSeries {
    #[serde(with = "bigint_json::vec")]
    coefficients: Vec<BigInt>,
}

impl HilbSeries {
    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn n_max(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// `χ(Hilb^m)`, zero for `m < 0`.
    pub fn chi(&self, m: i64) -> Result<BigInt, InvariantsError> {
        if m < 0 {
            return Ok(BigInt::zero());
        }
        self.coefficients
            .get(m as usize)
            .cloned()
            .ok_or(InvariantsError::CutoffExceeded {
                requested: m,
                available: self.n_max(),
            })
    }
}

/// Coefficients of `Π_{n≥1} (1 − q^n)^{−24}` through `q^N`.
pub fn hilb_euler_series(n_max: u32) -> HilbSeries {
    let cutoff = Cutoff::q_only(0, n_max as i64);
    let series = qseries::product_power(&cutoff, Var::Q, 1, n_max, |_| -24)
        .expect("unit leading term");
    let coefficients = (0..=n_max as i64)
        .map(|n| {
            let c = series.coefficient(&Monomial::q(n, 0)).expect("inside box");
            rational::as_integer(&c).expect("integral product")
        })
        .collect();
    HilbSeries { coefficients }
}

/// Coefficients of `z^{2g} = (y − 2 + y^{−1})^g`, listed from `y^g` down to
/// `y^{−g}`.
pub fn z_power_coefficients(g: u32) -> Vec<BigInt> {
    let n = 2 * g as u64;
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut c = BigInt::one();
    for j in 0..=n {
        out.push(if j % 2 == 0 { c.clone() } else { -c.clone() });
        c = c * BigInt::from(n - j) / BigInt::from(j + 1);
    }
    out
}

/// Table of `n_{g,h}` for `0 ≤ g ≤ g_max`, `0 ≤ h ≤ h_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BPSTable {
    g_max: u32,
    h_max: u32,
    /// `rows[g][h]`
    rows: Vec<Vec<BigInt>>,
}

#[derive(Serialize, Deserialize)]
struct BPSTableJson {
    g_max: u32,
    h_max: u32,
    #[serde(with = "bigint_json::vec2")]
    rows: Vec<Vec<BigInt>>,
}

impl Serialize for BPSTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BPSTableJson {
            g_max: self.g_max,
            h_max: self.h_max,
            rows: self.rows.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BPSTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let j = BPSTableJson::deserialize(d)?;
        let shape_ok = j.rows.len() == j.g_max as usize + 1
            && j.rows.iter().all(|r| r.len() == j.h_max as usize + 1);
        if !shape_ok {
            return Err(D::Error::custom("rows must be (g_max+1) × (h_max+1)"));
        }
        for (g, row) in j.rows.iter().enumerate() {
            for (h, x) in row.iter().enumerate() {
                if g > h && !x.is_zero() {
                    return Err(D::Error::custom(format!("n_{{{},{}}} must vanish for g > h", g, h)));
                }
            }
        }
        Ok(BPSTable {
            g_max: j.g_max,
            h_max: j.h_max,
            rows: j.rows,
        })
    }
}

impl BPSTable {
    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    pub fn h_max(&self) -> u32 {
        self.h_max
    }

    pub fn rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    /// `n_{g,h}`; zero for `h < 0` and outside the table.
    pub fn get(&self, g: u32, h: i64) -> BigInt {
        if h < 0 || h > self.h_max as i64 || g > self.g_max {
            return BigInt::zero();
        }
        self.rows[g as usize][h as usize].clone()
    }

    /// `n_g^β` for a class with `β² = 2h − 2`.
    pub fn gv(&self, g: u32, beta_selfint: i64) -> Result<BigInt, InvariantsError> {
        if beta_selfint % 2 != 0 {
            return Err(InvariantsError::OddSelfIntersection(beta_selfint));
        }
        let h = beta_selfint / 2 + 1;
        if h > self.h_max as i64 {
            return Err(InvariantsError::CutoffExceeded {
                requested: h,
                available: self.h_max as usize,
            });
        }
        Ok(self.get(g, h))
    }

    /// CSV with one row per `h` and one column per `g`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("h");
        for g in 0..=self.g_max {
            let _ = write!(out, ",g{}", g);
        }
        out.push('\n');
        for h in 0..=self.h_max {
            let _ = write!(out, "{}", h);
            for g in 0..=self.g_max {
                let _ = write!(out, ",{}", self.rows[g as usize][h as usize]);
            }
            out.push('\n');
        }
        out
    }
}

/// The KKV product `Π 1/((1−q^n)^{20}(1−yq^n)^2(1−y^{−1}q^n)^2)` through
/// `q^{h_max}`. The `y` window `[−h_max, h_max]` never truncates a term.
pub fn kkv_product(h_max: u32) -> Series {
    let h = h_max as i64;
    let cutoff = Cutoff::q_only(0, h).with_y2(-2 * h, 2 * h);
    let mut factors = Vec::new();
    for n in 1..=h {
        let qn = Monomial::q(n, 0);
        let minus_one = rational::int(-1);
        factors.push(qseries::factor_power(&cutoff, &qn, &minus_one, -20));
        for y2 in [2, -2] {
            let x = Monomial { y2, ..qn.clone() };
            factors.push(qseries::factor_power(&cutoff, &x, &minus_one, -2));
        }
    }
    let factors: Result<Vec<_>, _> = factors.into_iter().collect();
    qseries::product(&cutoff, factors.expect("monomial factors expand"))
}

/// Extracts `n_{g,h}` from the KKV product by a triangular change of basis
/// from `y^j` to `z^{2g}`, solved from the top `y`-degree down.
pub fn kkv_solve(g_max: u32, h_max: u32) -> Result<BPSTable, InvariantsError> {
    let product = kkv_product(h_max);
    let mut rows = vec![vec![BigInt::zero(); h_max as usize + 1]; g_max as usize + 1];
    for h in 0..=h_max {
        // residual[j + h] = coefficient of y^j
        let width = 2 * h as usize + 1;
        let mut residual = vec![BigInt::zero(); width];
        for (m, c) in product.terms().iter().filter(|(m, _)| m.q == h as i64) {
            if m.y2 % 2 != 0 {
                return Err(InvariantsError::NonzeroResidual { h });
            }
            let j = m.y2 / 2;
            let idx = (j + h as i64) as usize;
            residual[idx] = rational::as_integer(c).ok_or(InvariantsError::NonzeroResidual { h })?;
        }
        for g in (0..=h).rev() {
            let top = (g + h) as usize;
            let a = residual[top].clone();
            if a.is_zero() {
                continue;
            }
            for (j, z) in z_power_coefficients(g).into_iter().enumerate() {
                residual[top - j] -= &a * z;
            }
            if g <= g_max {
                rows[g as usize][h as usize] = if g % 2 == 0 { a } else { -a };
            }
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return Err(InvariantsError::NonzeroResidual { h });
        }
    }
    Ok(BPSTable { g_max, h_max, rows })
}

/// `n_0^β = χ(Hilb^h)` with `β² = 2h − 2`; zero when `h < 0`.
pub fn genus0_gv(beta_selfint: i64, hilb: &HilbSeries) -> Result<BigInt, InvariantsError> {
    if beta_selfint % 2 != 0 {
        return Err(InvariantsError::OddSelfIntersection(beta_selfint));
    }
    hilb.chi(beta_selfint / 2 + 1)
}

fn divisors(n: &BigInt) -> Vec<u64> {
    let n = n.abs().to_u64().expect("divisor search on a machine-size gcd");
    (1..=n).filter(|k| n.is_multiple_of(*k)).collect()
}

/// `Σ_{k | gcd(n, β)} k^{−2} n_0^{β/k}`.
pub fn multiple_cover_n(
    n: i64,
    beta: &[i64],
    lattice: &NSLattice,
    hilb: &HilbSeries,
) -> Result<Rational, InvariantsError> {
    if beta.len() != lattice.rank() {
        return Err(MukaiError::DimensionMismatch {
            expected: lattice.rank(),
            found: beta.len(),
        }
        .into());
    }
    if beta.iter().any(|&b| b < 0) || beta.iter().all(|&b| b == 0) {
        return Err(InvariantsError::InvalidCurveClass);
    }
    let gcd = beta.iter().fold(BigInt::from(n), |acc, &b| acc.gcd(&BigInt::from(b)));
    let mut total = Rational::zero();
    for k in divisors(&gcd) {
        let b: Vec<i64> = beta.iter().map(|&x| x / k as i64).collect();
        let n0 = genus0_gv(lattice.dot_int(&b, &b), hilb)?;
        total += Rational::new(n0, BigInt::from(k * k));
    }
    Ok(total)
}

/// Exponent convention for `χ(Hilb^{e(w)})` in the `J(v)` formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `e(w) = ⟨w,w⟩/2 + 1`, consistent with `β² = 2h − 2`.
    #[default]
    Half,
    /// `e(w) = ⟨w,w⟩ + 1`.
    Literal,
}

impl Convention {
    pub fn exponent(self, pairing: &BigInt) -> Result<i64, InvariantsError> {
        let p = pairing
            .to_i64()
            .ok_or_else(|| InvariantsError::OddPairing(pairing.to_string()))?;
        match self {
            Convention::Half if p % 2 != 0 => Err(InvariantsError::OddPairing(p.to_string())),
            Convention::Half => Ok(p / 2 + 1),
            Convention::Literal => Ok(p + 1),
        }
    }
}

/// `J(v) = Σ_{k | v} k^{−2} χ(Hilb^{e(v/k)})`.
pub fn multiple_cover_j(
    v: &MukaiVector,
    lattice: &NSLattice,
    hilb: &HilbSeries,
    convention: Convention,
) -> Result<Rational, InvariantsError> {
    if v.l.len() != lattice.rank() {
        return Err(MukaiError::DimensionMismatch {
            expected: lattice.rank(),
            found: v.l.len(),
        }
        .into());
    }
    let gcd = v.divisibility()?;
    if gcd.is_zero() {
        return Err(InvariantsError::ZeroVector);
    }
    let mut total = Rational::zero();
    for k in divisors(&gcd) {
        let w = v.scale(&Rational::new(BigInt::one(), BigInt::from(k)));
        let p = mukai::pairing(&w, &w, lattice)?;
        let p = rational::as_integer(&p).expect("integral vector on an integral lattice");
        let e = convention.exponent(&p)?;
        total += Rational::new(hilb.chi(e)?, BigInt::from(k * k));
    }
    Ok(total)
}

/// Whether `J(gv) = J(v)`.
pub fn isometry_invariance_check(
    g: &Isometry,
    v: &MukaiVector,
    lattice: &NSLattice,
    hilb: &HilbSeries,
    convention: Convention,
) -> Result<bool, InvariantsError> {
    let gv = g.apply(v, lattice)?;
    Ok(multiple_cover_j(v, lattice, hilb, convention)? == multiple_cover_j(&gv, lattice, hilb, convention)?)
}

/// `n_g^β` for every nonzero `β ≤ beta_max` (componentwise) on `lattice`,
/// read from a KKV table through `β² = 2h − 2`. Classes with `h < 0` are
/// omitted.
pub fn gv_from_kkv(
    table: &BPSTable,
    lattice: &NSLattice,
    beta_max: &[u32],
) -> Result<BTreeMap<(u32, Vec<u32>), i64>, InvariantsError> {
    let mut out = BTreeMap::new();
    let mut beta = vec![0u32; beta_max.len()];
    loop {
        // odometer
        let mut i = 0;
        loop {
            if i == beta.len() {
                return Ok(out);
            }
            if beta[i] < beta_max[i] {
                beta[i] += 1;
                break;
            }
            beta[i] = 0;
            i += 1;
        }
        let b: Vec<i64> = beta.iter().map(|&x| x as i64).collect();
        let selfint = lattice.dot_int(&b, &b);
        for g in 0..=table.g_max() {
            let n = table.gv(g, selfint)?;
            if !n.is_zero() {
                let n = n.to_i64().ok_or(InvariantsError::CutoffExceeded {
                    requested: selfint / 2 + 1,
                    available: table.h_max() as usize,
                })?;
                out.insert((g, beta.clone()), n);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn hilb_small_values() {
        let h = hilb_euler_series(3);
        assert_eq!(h.coefficients(), big(&[1, 24, 324, 3200]).as_slice());
        assert_eq!(hilb_euler_series(0).coefficients(), big(&[1]).as_slice());
        assert_eq!(h.chi(-1).unwrap(), BigInt::zero());
        assert!(matches!(h.chi(4), Err(InvariantsError::CutoffExceeded { .. })));
        assert_eq!(serde_json::to_string(&h).unwrap(), "[1,24,324,3200]");
    }

    #[test]
    fn z_powers() {
        assert_eq!(z_power_coefficients(0), big(&[1]));
        assert_eq!(z_power_coefficients(1), big(&[1, -2, 1]));
        assert_eq!(z_power_coefficients(2), big(&[1, -4, 6, -4, 1]));
    }

    #[test]
    fn kkv_low_order() {
        let t = kkv_solve(1, 1).unwrap();
        assert_eq!(t.rows(), &[big(&[1, 24]), big(&[0, -2])]);
        let t0 = kkv_solve(2, 0).unwrap();
        assert_eq!(t0.get(0, 0), BigInt::one());
        assert_eq!(t0.get(1, 0), BigInt::zero());
        assert_eq!(
            serde_json::to_string(&t).unwrap(),
            r#"{"g_max":1,"h_max":1,"rows":[[1,24],[0,-2]]}"#
        );
        assert_eq!(t.to_csv(), "h,g0,g1\n0,1,0\n1,24,-2\n");
    }

    #[test]
    fn bps_table_json_rejects_bad_shape() {
        assert!(serde_json::from_str::<BPSTable>(r#"{"g_max":1,"h_max":1,"rows":[[1,24]]}"#).is_err());
        assert!(serde_json::from_str::<BPSTable>(r#"{"g_max":1,"h_max":1,"rows":[[1,24],[5,-2]]}"#).is_err());
        let t: BPSTable = serde_json::from_str(r#"{"g_max":1,"h_max":1,"rows":[[1,24],[0,-2]]}"#).unwrap();
        assert_eq!(t.get(1, 1), BigInt::from(-2));
    }

    #[test]
    fn genus0_examples() {
        let h = hilb_euler_series(4);
        assert_eq!(genus0_gv(-2, &h).unwrap(), BigInt::one());
        assert_eq!(genus0_gv(0, &h).unwrap(), BigInt::from(24));
        assert_eq!(genus0_gv(2, &h).unwrap(), BigInt::from(324));
        assert_eq!(genus0_gv(-4, &h).unwrap(), BigInt::zero());
        assert_eq!(genus0_gv(1, &h), Err(InvariantsError::OddSelfIntersection(1)));
        assert!(matches!(genus0_gv(10, &h), Err(InvariantsError::CutoffExceeded { .. })));
    }

    #[test]
    fn multiple_cover_n_examples() {
        let h = hilb_euler_series(6);
        // hyperbolic plane: e1² = 0
        let l = NSLattice::k3(vec![vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(multiple_cover_n(1, &[1, 0], &l, &h).unwrap(), int(24));
        assert_eq!(
            multiple_cover_n(2, &[2, 0], &l, &h).unwrap(),
            int(24) + Rational::new(24.into(), 4.into())
        );
        assert_eq!(
            multiple_cover_n(3, &[2, 0], &l, &h).unwrap(),
            int(24),
            "gcd(3, 2) = 1"
        );
        assert_eq!(
            multiple_cover_n(1, &[0, 0], &l, &h),
            Err(InvariantsError::InvalidCurveClass)
        );
    }

    #[test]
    fn multiple_cover_j_examples() {
        let h = hilb_euler_series(6);
        let l = NSLattice::k3(vec![vec![0, 1], vec![1, 0]]).unwrap();
        let v = MukaiVector::integral(0, &[1, 0], 3);
        assert_eq!(multiple_cover_j(&v, &l, &h, Convention::Half).unwrap(), int(24));
        let v2 = MukaiVector::integral(0, &[2, 0], 2);
        assert_eq!(multiple_cover_j(&v2, &l, &h, Convention::Half).unwrap(), int(30));
        let o = MukaiVector::integral(1, &[0, 0], 1);
        assert_eq!(multiple_cover_j(&o, &l, &h, Convention::Half).unwrap(), int(1));
        // literal: ⟨O,O⟩ + 1 = −1 → empty
        assert_eq!(multiple_cover_j(&o, &l, &h, Convention::Literal).unwrap(), int(0));
        assert_eq!(
            multiple_cover_j(&MukaiVector::zero(2), &l, &h, Convention::Half),
            Err(InvariantsError::ZeroVector)
        );
        let frac = MukaiVector::new(int(0), vec![Rational::new(1.into(), 2.into()), int(0)], int(0));
        assert_eq!(
            multiple_cover_j(&frac, &l, &h, Convention::Half),
            Err(InvariantsError::Mukai(MukaiError::NonIntegralVector))
        );
    }

    #[test]
    fn odd_pairing_needs_literal_convention() {
        let h = hilb_euler_series(6);
        let odd = NSLattice::new(vec![vec![1]]).unwrap();
        let v = MukaiVector::integral(0, &[1], 0);
        assert!(matches!(
            multiple_cover_j(&v, &odd, &h, Convention::Half),
            Err(InvariantsError::OddPairing(_))
        ));
        assert_eq!(multiple_cover_j(&v, &odd, &h, Convention::Literal).unwrap(), int(324));
    }

    #[test]
    fn isometry_examples() {
        let h = hilb_euler_series(8);
        let l = NSLattice::rank_one(2);
        let v = MukaiVector::integral(1, &[1], -1);
        for g in [Isometry::identity(&l), Isometry::negation(&l)] {
            assert!(isometry_invariance_check(&g, &v, &l, &h, Convention::Half).unwrap());
        }
        let refl = Isometry::reflection(&MukaiVector::integral(1, &[0], 1), &l).unwrap();
        assert!(isometry_invariance_check(&refl, &v, &l, &h, Convention::Half).unwrap());
    }

    #[test]
    fn gv_from_kkv_on_rank_one() {
        let t = kkv_solve(1, 5).unwrap();
        let l = NSLattice::rank_one(2);
        let gv = gv_from_kkv(&t, &l, &[2]).unwrap();
        // β = h_gen: β² = 2, h = 2; β = 2h_gen: β² = 8, h = 5
        assert_eq!(gv[&(0, vec![1])], 324);
        assert_eq!(gv[&(0, vec![2])], t.get(0, 5).to_i64().unwrap());
        assert_eq!(gv[&(1, vec![1])], t.get(1, 2).to_i64().unwrap());
    }
}
