use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{check_slots, qt, Charge, WallcrossError};
use crate::qseries::{self, Cutoff, Monomial, Series};
use crate::rational::Rational;

/// `Z^red = −log(1 + Z^χ)`.
pub fn behrend_to_reduced(z_chi: &Series) -> Result<Series, WallcrossError> {
    Ok(qseries::log1p(z_chi)?.neg())
}

struct Walk<'a> {
    cutoff: &'a Cutoff,
    charges: Vec<(Monomial, Rational)>,
    out: BTreeMap<Monomial, Rational>,
}

impl Walk<'_> {
    /// Every graded coordinate is nonnegative, so once a partial sum leaves
    /// the box through an upper bound no extension can come back.
    fn beyond(&self, m: &Monomial) -> bool {
        self.cutoff.graded_q(m) > self.cutoff.q_max || !self.cutoff.contains_t(&m.t)
    }

    /// Chooses `k_i` for charges `i..`; `weight` is `Π P^{k_j}/k_j!` so far.
    fn visit(&mut self, i: usize, m: Monomial, k: u64, weight: Rational) {
        if i == self.charges.len() {
            if k == 0 || !self.cutoff.contains(&m) {
                return;
            }
            // (−1)^k/k · k!/Π k_j! · Π P^{k_j}
            let mut fact = BigInt::one();
            for j in 2..k {
                fact *= j;
            }
            let sign = if k.is_multiple_of(2) { 1 } else { -1 };
            let c = weight * Rational::from_integer(fact * sign);
            let e = self.out.entry(m).or_insert_with(Rational::zero);
            *e += c;
            return;
        }
        let (step, p) = self.charges[i].clone();
        let mut m = m;
        let mut w = weight;
        let mut ki: u64 = 0;
        loop {
            self.visit(i + 1, m.clone(), k + ki, w.clone());
            ki += 1;
            m = m.mul(&step);
            if self.beyond(&m) {
                break;
            }
            w = w * &p / Rational::from_integer(ki.into());
        }
    }
}

/// `Σ_{k≥1} ((−1)^k/k) Σ_{k_1+…+k_l=k} C(k; k_1,…,k_l) Π P_{α_i}^{k_i} q^{Σ k_i α_i}`,
/// enumerated charge by charge. Independent of [`qseries::log1p`].
pub fn stratification_oracle(
    table: &BTreeMap<Charge, Rational>,
    cutoff: &Cutoff,
) -> Result<Series, WallcrossError> {
    let mut charges = Vec::new();
    for ((n, beta), p) in table {
        check_slots(cutoff, beta)?;
        if p.is_zero() {
            continue;
        }
        let m = qt(*n, beta);
        let gq = cutoff.graded_q(&m);
        if gq < 0 || (gq == 0 && m.t_degree() == 0) {
            return Err(WallcrossError::InvalidCharge((*n, beta.clone())));
        }
        charges.push((m, p.clone()));
    }
    let mut walk = Walk {
        cutoff,
        charges,
        out: BTreeMap::new(),
    };
    walk.visit(0, Monomial::one(cutoff.t_slots()), 0, Rational::one());
    Ok(Series::from_terms(cutoff.clone(), walk.out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn c() -> Cutoff {
        Cutoff::power_series(6, vec![6])
    }

    #[test]
    fn empty_table_is_zero() {
        assert!(stratification_oracle(&BTreeMap::new(), &c()).unwrap().is_zero());
        assert!(behrend_to_reduced(&Series::zero(c())).unwrap().is_zero());
    }

    #[test]
    fn single_charge_geometric_log() {
        let mut t = BTreeMap::new();
        t.insert((1, vec![1]), int(1));
        let s = stratification_oracle(&t, &c()).unwrap();
        for k in 1..=6 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(s.coefficient(&qt(k, &[k as u32])).unwrap(), ratio(sign, k));
        }
        assert_eq!(s.len(), 6);
    }

    #[test]
    fn behrend_single_stratum() {
        let z = Series::monomial(c(), qt(1, &[1]), int(5));
        let r = behrend_to_reduced(&z).unwrap();
        assert_eq!(r.coefficient(&qt(1, &[1])).unwrap(), int(-5));
        assert_eq!(r.coefficient(&qt(2, &[2])).unwrap(), ratio(25, 2));
    }

    #[test]
    fn two_charges_agree_with_log() {
        let mut t = BTreeMap::new();
        t.insert((1, vec![0]), ratio(2, 3));
        t.insert((2, vec![1]), int(-4));
        let z = Series::from_terms(c(), t.iter().map(|((n, b), p)| (qt(*n, b), p.clone())));
        assert_eq!(
            stratification_oracle(&t, &c()).unwrap(),
            behrend_to_reduced(&z).unwrap()
        );
    }

    #[test]
    fn rejects_degree_zero_charge() {
        let mut t = BTreeMap::new();
        t.insert((0, vec![0]), int(1));
        assert!(matches!(
            stratification_oracle(&t, &c()),
            Err(WallcrossError::InvalidCharge(_))
        ));
    }
}
