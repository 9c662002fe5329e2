//! Central charges, slopes and reduced (twisted) Hilbert polynomials, all
//! in exact rational arithmetic.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::mukai::{MukaiError, MukaiVector, NSLattice};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StabilityError {
    #[error("ω² = {0} is not positive")]
    NotAmple(String),
    #[error("scale k must be positive")]
    NonPositiveScale,
    #[error("θ must lie in (0, 1)")]
    ThetaOutOfRange,
    #[error("class is neither rank zero nor of pure rank")]
    MixedClass,
    #[error("rank is zero")]
    ZeroRank,
    #[error("rank-zero class with l·ω = 0")]
    DegenerateClass,
    #[error("gerbe order must be positive")]
    ZeroGerbeOrder,
    #[error(transparent)]
    Mukai(#[from] MukaiError),
}

/// `φ_k = B + i k ω` together with the weak-stability angle `θ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityParam {
    #[serde(with = "rational::serde_vec")]
    pub b: Vec<Rational>,
    #[serde(with = "rational::serde_vec")]
    pub omega: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub k: Rational,
    #[serde(with = "rational::serde_str")]
    pub theta: Rational,
}

impl StabilityParam {
    pub fn new(
        b: Vec<Rational>,
        omega: Vec<Rational>,
        k: Rational,
        theta: Rational,
        lattice: &NSLattice,
    ) -> Result<Self, StabilityError> {
        let p = StabilityParam { b, omega, k, theta };
        p.validate(lattice)?;
        Ok(p)
    }

    pub fn validate(&self, lattice: &NSLattice) -> Result<(), StabilityError> {
        lattice.dot(&self.b, &self.b)?;
        let ww = lattice.dot(&self.omega, &self.omega)?;
        if !ww.is_positive() {
            return Err(StabilityError::NotAmple(rational::format(&ww)));
        }
        if !self.k.is_positive() {
            return Err(StabilityError::NonPositiveScale);
        }
        if !self.theta.is_positive() || self.theta >= Rational::one() {
            return Err(StabilityError::ThetaOutOfRange);
        }
        Ok(())
    }

    /// Same parameter with `k` replaced.
    pub fn with_k(&self, k: Rational) -> Self {
        StabilityParam { k, ..self.clone() }
    }

    /// `k ω`.
    pub fn scaled_omega(&self) -> Vec<Rational> {
        self.omega.iter().map(|w| w * &self.k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactComplex {
    #[serde(with = "rational::serde_str")]
    pub re: Rational,
    #[serde(with = "rational::serde_str")]
    pub im: Rational,
}

impl ExactComplex {
    pub fn new(re: Rational, im: Rational) -> Self {
        ExactComplex { re, im }
    }

    pub fn conj(&self) -> Self {
        ExactComplex::new(self.re.clone(), -self.im.clone())
    }

    pub fn mul(&self, o: &ExactComplex) -> Self {
        ExactComplex::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }
}

/// `Z_{φ_k}(v)`. For `rk ≠ 0`:
/// `Re = ((l² − 2 rk s) + rk² ω² − (l − rk B)²)/(2 rk)`, `Im = ω·l − rk ω·B`;
/// for `rk = 0`: `(−s + l·B) + (l·ω) i`. Here `ω` stands for `k ω`.
pub fn central_charge(
    v: &MukaiVector,
    p: &StabilityParam,
    lattice: &NSLattice,
) -> Result<ExactComplex, StabilityError> {
    let w = p.scaled_omega();
    let lw = lattice.dot(&v.l, &w)?;
    let lb = lattice.dot(&v.l, &p.b)?;
    if v.rk.is_zero() {
        return Ok(ExactComplex::new(lb - &v.s, lw));
    }
    let r = &v.rk;
    let ll = lattice.dot(&v.l, &v.l)?;
    let ww = lattice.dot(&w, &w)?;
    let shifted: Vec<Rational> = v.l.iter().zip(&p.b).map(|(l, b)| l - r * b).collect();
    let ss = lattice.dot(&shifted, &shifted)?;
    let two = rational::int(2);
    let re = (ll - &two * r * &v.s + r * r * ww - ss) / (two * r);
    let im = lw - r * lattice.dot(&w, &p.b)?;
    Ok(ExactComplex::new(re, im))
}

/// Value of the weak-stability charge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeakCharge {
    /// `n − (ω·β) i`.
    Exact(ExactComplex),
    /// `magnitude · e^{π i phase}`, kept symbolic.
    Polar {
        #[serde(with = "rational::serde_str")]
        magnitude: Rational,
        #[serde(with = "rational::serde_str")]
        phase: Rational,
    },
}

/// `Z_{ω,θ}` on a class `(n, β, rk)` that is pure in the filtration.
pub fn weak_charge(
    n: &Rational,
    beta: &[Rational],
    rk: &Rational,
    p: &StabilityParam,
    lattice: &NSLattice,
) -> Result<WeakCharge, StabilityError> {
    let torsion_part = !n.is_zero() || beta.iter().any(|b| !b.is_zero());
    if rk.is_zero() {
        let wb = lattice.dot(&p.omega, beta)?;
        return Ok(WeakCharge::Exact(ExactComplex::new(n.clone(), -wb)));
    }
    if torsion_part {
        return Err(StabilityError::MixedClass);
    }
    Ok(WeakCharge::Polar {
        magnitude: rk.clone(),
        phase: p.theta.clone(),
    })
}

/// `μ = (c₁·ω)/(r · rk)`, the gerbe integral being `1/r` times the one on `S`.
pub fn slope(
    rk: &Rational,
    c1: &[Rational],
    omega: &[Rational],
    r: u32,
    lattice: &NSLattice,
) -> Result<Rational, StabilityError> {
    if rk.is_zero() {
        return Err(StabilityError::ZeroRank);
    }
    if r == 0 {
        return Err(StabilityError::ZeroGerbeOrder);
    }
    Ok(lattice.dot(c1, omega)? / (rational::int(r as i64) * rk))
}

/// Polynomial in one variable, coefficients lowest degree first, trailing
/// zeros trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    #[serde(with = "rational::serde_vec")]
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Divided by its leading coefficient.
    pub fn monic(&self) -> Polynomial {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lead) => self.scale(&lead.recip()),
        }
    }
}

/// Reduced twisted Hilbert polynomial, including the gerbe prefactor `r`.
///
/// `rk > 0`: `r[n² + 2ω·(l − rk β)/(rk ω²) n − (l² − 2 rk s − (l − rk β)²)/(rk² ω²)]`.
/// `rk = 0`: `r[n + (s − β·l)/(l·ω)]`.
pub fn reduced_hilbert(
    v: &MukaiVector,
    beta: &[Rational],
    omega: &[Rational],
    r: u32,
    lattice: &NSLattice,
) -> Result<Polynomial, StabilityError> {
    if r == 0 {
        return Err(StabilityError::ZeroGerbeOrder);
    }
    let r = rational::int(r as i64);
    let lb = lattice.dot(&v.l, beta)?;
    let lw = lattice.dot(&v.l, omega)?;
    if v.rk.is_zero() {
        if lw.is_zero() {
            return Err(StabilityError::DegenerateClass);
        }
        let p = Polynomial::new(vec![(&v.s - lb) / lw, Rational::one()]);
        return Ok(p.scale(&r));
    }
    let rk = &v.rk;
    let ww = lattice.dot(omega, omega)?;
    let shifted: Vec<Rational> = v.l.iter().zip(beta).map(|(l, b)| l - rk * b).collect();
    let ll = lattice.dot(&v.l, &v.l)?;
    let ss = lattice.dot(&shifted, &shifted)?;
    let linear = rational::int(2) * lattice.dot(omega, &shifted)? / (rk * &ww);
    let constant = -(ll - rational::int(2) * rk * &v.s - ss) / (rk * rk * &ww);
    Ok(Polynomial::new(vec![constant, linear, Rational::one()]).scale(&r))
}

/// Whether the normalized reduced Hilbert polynomial of a rank-zero `v`
/// (twisted by `B`, polarized by `kω`) equals `n − Re Z/Im Z`.
pub fn lemma46_check(
    v: &MukaiVector,
    p: &StabilityParam,
    lattice: &NSLattice,
) -> Result<bool, StabilityError> {
    if !v.rk.is_zero() {
        return Err(StabilityError::MixedClass);
    }
    let hilbert = reduced_hilbert(v, &p.b, &p.scaled_omega(), 1, lattice)?.monic();
    let z = central_charge(v, p, lattice)?;
    if z.im.is_zero() {
        return Err(StabilityError::DegenerateClass);
    }
    let from_z = Polynomial::new(vec![-(z.re / z.im), Rational::one()]);
    Ok(hilbert == from_z)
}

/// `Im(Z(v′) · conj Z(v))`, zero exactly when the two charges are aligned.
pub fn alignment(
    v: &MukaiVector,
    v2: &MukaiVector,
    p: &StabilityParam,
    lattice: &NSLattice,
) -> Result<Rational, StabilityError> {
    let z = central_charge(v, p, lattice)?;
    let z2 = central_charge(v2, p, lattice)?;
    Ok(z2.mul(&z.conj()).im)
}

/// `r (β_deg · m + n_const)`.
pub fn geometric_hilbert_1dim(beta_deg: &Rational, n_const: &Rational, r: u32) -> Polynomial {
    let r = rational::int(r as i64);
    Polynomial::new(vec![n_const * &r, beta_deg * &r])
}

/// `Z_{φ_k}(v)` at each sampled `k`.
pub fn phase_trend(
    v: &MukaiVector,
    p: &StabilityParam,
    k_samples: &[Rational],
    lattice: &NSLattice,
) -> Result<Vec<(Rational, ExactComplex)>, StabilityError> {
    k_samples
        .iter()
        .map(|k| {
            if !k.is_positive() {
                return Err(StabilityError::NonPositiveScale);
            }
            Ok((k.clone(), central_charge(v, &p.with_k(k.clone()), lattice)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mukai::{exp_pairing, MukaiVector};
    use crate::rational::{int, ratio};

    fn lat() -> NSLattice {
        NSLattice::rank_one(2)
    }

    fn param(b: Rational, w: Rational, k: Rational) -> StabilityParam {
        StabilityParam::new(vec![b], vec![w], k, ratio(1, 2), &lat()).unwrap()
    }

    #[test]
    fn param_validation() {
        let l = lat();
        assert!(matches!(
            StabilityParam::new(vec![int(0)], vec![int(0)], int(1), ratio(1, 2), &l),
            Err(StabilityError::NotAmple(_))
        ));
        assert!(StabilityParam::new(vec![int(0)], vec![int(1)], int(0), ratio(1, 2), &l).is_err());
        assert!(StabilityParam::new(vec![int(0)], vec![int(1)], int(1), int(1), &l).is_err());
    }

    #[test]
    fn central_charge_examples() {
        let l = NSLattice::rank_one(1);
        let p = StabilityParam::new(vec![int(0)], vec![int(1)], int(1), ratio(1, 2), &l).unwrap();
        let v = MukaiVector::integral(0, &[1], 0);
        assert_eq!(central_charge(&v, &p, &l).unwrap(), ExactComplex::new(int(0), int(1)));

        let p = param(int(0), int(1), int(1));
        let o = MukaiVector::integral(1, &[0], 1);
        // ((−2) + ω²)/2 with ω² = 2
        assert_eq!(central_charge(&o, &p, &lat()).unwrap(), ExactComplex::new(int(0), int(0)));
        let p3 = param(int(0), int(3), int(1));
        assert_eq!(
            central_charge(&o, &p3, &lat()).unwrap().re,
            (int(-2) + int(18)) / int(2)
        );

        let pt = MukaiVector::integral(0, &[0], 1);
        let p = param(ratio(2, 7), ratio(5, 3), ratio(3, 2));
        assert_eq!(central_charge(&pt, &p, &lat()).unwrap(), ExactComplex::new(int(-1), int(0)));
    }

    #[test]
    fn central_charge_is_the_exponential_pairing() {
        let p = param(ratio(1, 3), ratio(5, 4), ratio(2, 3));
        let w = p.scaled_omega();
        for v in [
            MukaiVector::integral(2, &[3], -1),
            MukaiVector::integral(-1, &[1], 4),
            MukaiVector::integral(0, &[2], 5),
        ] {
            let z = central_charge(&v, &p, &lat()).unwrap();
            let (re, im) = exp_pairing(&v, &p.b, &w, &lat()).unwrap();
            assert_eq!((z.re, z.im), (re, im));
        }
    }

    #[test]
    fn weak_charge_examples() {
        let l = NSLattice::rank_one(1);
        let p = StabilityParam::new(vec![int(0)], vec![int(2)], int(1), ratio(1, 2), &l).unwrap();
        assert_eq!(
            weak_charge(&int(3), &[int(1)], &int(0), &p, &l).unwrap(),
            WeakCharge::Exact(ExactComplex::new(int(3), int(-2)))
        );
        assert_eq!(
            weak_charge(&int(0), &[int(0)], &int(2), &p, &l).unwrap(),
            WeakCharge::Polar {
                magnitude: int(2),
                phase: ratio(1, 2)
            }
        );
        assert_eq!(
            weak_charge(&int(1), &[int(1)], &int(1), &p, &l),
            Err(StabilityError::MixedClass)
        );
    }

    #[test]
    fn slope_examples() {
        let l = NSLattice::rank_one(1);
        assert_eq!(slope(&int(3), &[int(0)], &[int(1)], 1, &l).unwrap(), int(0));
        assert_eq!(slope(&int(2), &[int(4)], &[int(1)], 1, &l).unwrap(), int(2));
        assert_eq!(slope(&int(4), &[int(8)], &[int(1)], 1, &l).unwrap(), int(2));
        assert_eq!(slope(&int(2), &[int(4)], &[int(1)], 2, &l).unwrap(), int(1));
        assert_eq!(slope(&int(0), &[int(4)], &[int(1)], 1, &l), Err(StabilityError::ZeroRank));
    }

    #[test]
    fn reduced_hilbert_examples() {
        let l = NSLattice::rank_one(1);
        let v = MukaiVector::integral(0, &[1], 0);
        assert_eq!(
            reduced_hilbert(&v, &[int(0)], &[int(1)], 1, &l).unwrap().coeffs(),
            &[int(0), int(1)]
        );
        let o = MukaiVector::integral(1, &[0], 0);
        assert_eq!(
            reduced_hilbert(&o, &[int(0)], &[int(1)], 1, &l).unwrap().coeffs(),
            &[int(0), int(0), int(1)]
        );
        let w = MukaiVector::integral(2, &[3], 1);
        let beta = [ratio(1, 2)];
        let base = reduced_hilbert(&w, &beta, &[int(2)], 1, &l).unwrap();
        assert_eq!(reduced_hilbert(&w, &beta, &[int(2)], 3, &l).unwrap(), base.scale(&int(3)));
        assert_eq!(
            reduced_hilbert(&w.scale(&int(5)), &beta, &[int(2)], 1, &l).unwrap(),
            base
        );
        let pt = MukaiVector::integral(0, &[0], 1);
        assert_eq!(
            reduced_hilbert(&pt, &[int(0)], &[int(1)], 1, &l),
            Err(StabilityError::DegenerateClass)
        );
    }

    #[test]
    fn lemma46_examples() {
        let v = MukaiVector::integral(0, &[1], 0);
        assert!(lemma46_check(&v, &param(int(0), int(1), int(1)), &lat()).unwrap());
        let v = MukaiVector::integral(0, &[3], -7);
        assert!(lemma46_check(&v, &param(ratio(-2, 5), ratio(7, 3), ratio(4, 9)), &lat()).unwrap());
    }

    #[test]
    fn geometric_hilbert_examples() {
        assert_eq!(geometric_hilbert_1dim(&int(1), &int(0), 2).coeffs(), &[int(0), int(2)]);
        assert_eq!(geometric_hilbert_1dim(&int(0), &int(5), 3).coeffs(), &[int(15)]);
        assert_eq!(geometric_hilbert_1dim(&int(2), &int(5), 1).coeffs(), &[int(5), int(2)]);
    }

    #[test]
    fn phase_trend_examples() {
        let p = param(int(0), int(1), int(1));
        let o = MukaiVector::integral(1, &[0], 0);
        let ks = [int(1), int(2), int(3)];
        let trend = phase_trend(&o, &p, &ks, &lat()).unwrap();
        for (k, z) in &trend {
            // Re = k² ω²/2 with ω² = 2
            assert_eq!(z.re, k * k);
            assert_eq!(z.im, int(0));
        }
        let v = MukaiVector::integral(0, &[2], 3);
        let trend = phase_trend(&v, &p, &ks, &lat()).unwrap();
        assert!(trend.iter().all(|(_, z)| z.re == trend[0].1.re));
        assert_eq!(phase_trend(&v, &p, &[int(5)], &lat()).unwrap().len(), 1);
    }

    #[test]
    fn polynomial_json() {
        let p = Polynomial::new(vec![ratio(1, 2), int(0), int(3), int(0)]);
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"["1/2","0","3"]"#);
        assert_eq!(p.degree(), Some(2));
        assert_eq!(p.eval(&int(2)), ratio(25, 2));
    }
}
