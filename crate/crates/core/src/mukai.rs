//! Néron–Severi lattices, (twisted) Mukai vectors and the Mukai pairing.
//!
//! A Mukai vector is a triple `(rk, l, s)` with `l ∈ NS(S) ⊗ ℚ`. The pairing
//! is `⟨(r,l,s),(r',l',s')⟩ = l·l' − r s' − r' s`. Twisted vectors are
//! genuinely rational; integrality is a predicate, not a type invariant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MukaiError {
    #[error("dimension mismatch: lattice rank {expected}, vector has {found} components")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("K3 lattice must be even: diagonal entry {0} is odd")]
    OddDiagonal(i64),
    #[error("class has rank {0}, expected a unit class of rank 1")]
    NonUnitClass(String),
    #[error("matrix is not a lattice isometry: {0}")]
    NotAnIsometry(String),
    #[error("vector is not integral")]
    NonIntegralVector,
    #[error("divisor must be positive")]
    ZeroDivisor,
}

/// Rank-ρ integral lattice given by a symmetric Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct NSLattice {
    gram: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    rank: usize,
    gram: Vec<Vec<i64>>,
}

impl TryFrom<LatticeJson> for NSLattice {
    type Error = MukaiError;
    fn try_from(j: LatticeJson) -> Result<Self, MukaiError> {
        if j.gram.len() != j.rank {
            return Err(MukaiError::DimensionMismatch {
                expected: j.rank,
                found: j.gram.len(),
            });
        }
        NSLattice::new(j.gram)
    }
}

impl From<NSLattice> for LatticeJson {
    fn from(l: NSLattice) -> Self {
        LatticeJson {
            rank: l.rank(),
            gram: l.gram,
        }
    }
}

impl NSLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self, MukaiError> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|row| row.len() != n) {
            return Err(MukaiError::NotSymmetric);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(MukaiError::NotSymmetric);
                }
            }
        }
        Ok(NSLattice { gram })
    }

    /// A Néron–Severi lattice of a K3 surface: symmetric and even.
    pub fn k3(gram: Vec<Vec<i64>>) -> Result<Self, MukaiError> {
        let l = Self::new(gram)?;
        if let Some(d) = (0..l.rank()).map(|i| l.gram[i][i]).find(|d| d % 2 != 0) {
            return Err(MukaiError::OddDiagonal(d));
        }
        Ok(l)
    }

    /// Rank-one lattice `⟨h⟩` with `h² = d`.
    pub fn rank_one(d: i64) -> Self {
        NSLattice { gram: vec![vec![d]] }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram[i][i] % 2 == 0)
    }

    fn check(&self, v: &[Rational]) -> Result<(), MukaiError> {
        if v.len() != self.rank() {
            return Err(MukaiError::DimensionMismatch {
                expected: self.rank(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Intersection form on `NS ⊗ ℚ`.
    pub fn dot(&self, x: &[Rational], y: &[Rational]) -> Result<Rational, MukaiError> {
        self.check(x)?;
        self.check(y)?;
        let mut acc = Rational::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                let g = self.gram[i][j];
                if g != 0 {
                    acc += xi * yj * rational::int(g);
                }
            }
        }
        Ok(acc)
    }

    /// Intersection form on integral classes.
    pub fn dot_int(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut acc = 0;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                acc += xi * yj * self.gram[i][j];
            }
        }
        acc
    }
}

/// `(rk, l, s) ∈ ℚ ⊕ (NS ⊗ ℚ) ⊕ ℚ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MukaiVector {
    #[serde(with = "rational::serde_str")]
    pub rk: Rational,
    #[serde(with = "rational::serde_vec")]
    pub l: Vec<Rational>,
    #[serde(with = "rational::serde_str")]
    pub s: Rational,
}

impl MukaiVector {
    pub fn new(rk: Rational, l: Vec<Rational>, s: Rational) -> Self {
        MukaiVector { rk, l, s }
    }

    pub fn integral(rk: i64, l: &[i64], s: i64) -> Self {
        MukaiVector {
            rk: rational::int(rk),
            l: l.iter().map(|&x| rational::int(x)).collect(),
            s: rational::int(s),
        }
    }

    pub fn zero(rho: usize) -> Self {
        Self::integral(0, &vec![0; rho], 0)
    }

    /// The unit class `(1, 0, 0)`.
    pub fn unit(rho: usize) -> Self {
        Self::integral(1, &vec![0; rho], 0)
    }

    /// `√td_S = (1, 0, 1)`.
    pub fn sqrt_td(rho: usize) -> Self {
        Self::integral(1, &vec![0; rho], 1)
    }

    /// `td_S = (1, 0, 2)`.
    pub fn td(rho: usize) -> Self {
        Self::integral(1, &vec![0; rho], 2)
    }

    pub fn is_zero(&self) -> bool {
        self.rk.is_zero() && self.s.is_zero() && self.l.iter().all(Zero::is_zero)
    }

    pub fn components(&self) -> impl Iterator<Item = &Rational> {
        std::iter::once(&self.rk).chain(self.l.iter()).chain(std::iter::once(&self.s))
    }

    pub fn is_integral(&self) -> bool {
        self.components().all(|c| c.is_integer())
    }

    /// Integer coordinates `(rk, l_1, …, l_ρ, s)` if integral.
    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.components().map(rational::as_integer).collect()
    }

    pub fn scale(&self, c: &Rational) -> MukaiVector {
        MukaiVector {
            rk: &self.rk * c,
            l: self.l.iter().map(|x| x * c).collect(),
            s: &self.s * c,
        }
    }

    pub fn add(&self, other: &MukaiVector) -> MukaiVector {
        MukaiVector {
            rk: &self.rk + &other.rk,
            l: self.l.iter().zip(&other.l).map(|(a, b)| a + b).collect(),
            s: &self.s + &other.s,
        }
    }

    /// `gcd` of all integer components (0 for the zero vector).
    pub fn divisibility(&self) -> Result<BigInt, MukaiError> {
        let ints = self.to_integers().ok_or(MukaiError::NonIntegralVector)?;
        Ok(rational::gcd_all(&ints))
    }
}

/// `⟨v, w⟩ = l·l' − rk·s' − rk'·s`.
pub fn pairing(v: &MukaiVector, w: &MukaiVector, lattice: &NSLattice) -> Result<Rational, MukaiError> {
    Ok(lattice.dot(&v.l, &w.l)? - &v.rk * &w.s - &w.rk * &v.s)
}

/// `e^D · v = (rk, l + rk·D, s + D·l + rk·D²/2)`.
pub fn divisor_twist(v: &MukaiVector, d: &[Rational], lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
    let dl = lattice.dot(d, &v.l)?;
    let dd = lattice.dot(d, d)?;
    Ok(MukaiVector {
        rk: v.rk.clone(),
        l: v.l.iter().zip(d).map(|(x, y)| x + &v.rk * y).collect(),
        s: &v.s + dl + &v.rk * dd / rational::int(2),
    })
}

/// Outcome of [`integrality_check`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Integrality {
    pub integral: bool,
    /// `e^{ξ/r}·v`.
    pub twisted: MukaiVector,
    /// `D mod r` for the divisor part `D` of the twisted vector, when integral.
    pub residue: Option<Vec<i64>>,
}

/// Checks whether `e^{ξ/r}·v` is integral and reports its divisor class
/// modulo `r`.
pub fn integrality_check(
    v: &MukaiVector,
    xi: &[i64],
    r: u32,
    lattice: &NSLattice,
) -> Result<Integrality, MukaiError> {
    if r == 0 {
        return Err(MukaiError::ZeroDivisor);
    }
    let d: Vec<Rational> = xi.iter().map(|&x| rational::ratio(x, r as i64)).collect();
    let twisted = divisor_twist(v, &d, lattice)?;
    let integral = twisted.is_integral();
    let residue = integral.then(|| {
        let modulus = BigInt::from(r);
        twisted
            .l
            .iter()
            .map(|x| {
                let m = x.numer().mod_floor(&modulus);
                i64::try_from(m).expect("residue below r")
            })
            .collect()
    });
    Ok(Integrality {
        integral,
        twisted,
        residue,
    })
}

/// Cohomology-ring product `(r,l,s)·(r',l',s') = (rr', r l' + r' l, r s' + r' s + l·l')`.
pub fn ring_mul(v: &MukaiVector, w: &MukaiVector, lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
    let ll = lattice.dot(&v.l, &w.l)?;
    Ok(MukaiVector {
        rk: &v.rk * &w.rk,
        l: v.l
            .iter()
            .zip(&w.l)
            .map(|(a, b)| &v.rk * b + &w.rk * a)
            .collect(),
        s: &v.rk * &w.s + &w.rk * &v.s + ll,
    })
}

fn require_unit(c: &MukaiVector) -> Result<(), MukaiError> {
    if c.rk.is_one() {
        Ok(())
    } else {
        Err(MukaiError::NonUnitClass(rational::format(&c.rk)))
    }
}

/// Square root of a unit class: `√(1, a, b) = (1, a/2, b/2 − a·a/8)`.
pub fn sqrt_unit_class(c: &MukaiVector, lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
    require_unit(c)?;
    let aa = lattice.dot(&c.l, &c.l)?;
    let half = rational::ratio(1, 2);
    Ok(MukaiVector {
        rk: Rational::one(),
        l: c.l.iter().map(|x| x * &half).collect(),
        s: &c.s * &half - aa / rational::int(8),
    })
}

/// Inverse of a unit class: `(1, a, b)^{-1} = (1, −a, a·a − b)`.
pub fn unit_inverse(c: &MukaiVector, lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
    require_unit(c)?;
    let aa = lattice.dot(&c.l, &c.l)?;
    Ok(MukaiVector {
        rk: Rational::one(),
        l: c.l.iter().map(|x| -x.clone()).collect(),
        s: aa - &c.s,
    })
}

/// `v · √td_S / √ch`, where `ch` is the (unit) Chern character of
/// `Rp_*(G ⊗ G^∨)` supplied by the caller.
pub fn td_correction(v: &MukaiVector, ch_gg: &MukaiVector, lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
    let rho = lattice.rank();
    let root = sqrt_unit_class(ch_gg, lattice)?;
    let corr = ring_mul(&MukaiVector::sqrt_td(rho), &unit_inverse(&root, lattice)?, lattice)?;
    ring_mul(v, &corr, lattice)
}

/// `k | v`: `k` divides every component of the integral vector `v`.
pub fn divides(k: u64, v: &MukaiVector) -> Result<bool, MukaiError> {
    if k == 0 {
        return Err(MukaiError::ZeroDivisor);
    }
    let ints = v.to_integers().ok_or(MukaiError::NonIntegralVector)?;
    let k = BigInt::from(k);
    Ok(ints.iter().all(|x| x.is_multiple_of(&k)))
}

/// Integer matrix acting on `(rk, l, s)` coordinates and preserving the
/// Mukai pairing. Only the lattice condition is checked; the Hodge
/// condition involves transcendental data not modelled here.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isometry {
    pub matrix: Vec<Vec<i64>>,
}

/// Gram matrix of the Mukai pairing in `(rk, l, s)` coordinates.
pub fn mukai_gram(lattice: &NSLattice) -> Vec<Vec<i64>> {
    let rho = lattice.rank();
    let n = rho + 2;
    let mut q = vec![vec![0; n]; n];
    q[0][n - 1] = -1;
    q[n - 1][0] = -1;
    for i in 0..rho {
        for j in 0..rho {
            q[i + 1][j + 1] = lattice.gram()[i][j];
        }
    }
    q
}

fn determinant(m: &[Vec<i64>]) -> BigInt {
    // Bareiss fraction-free elimination.
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

impl Isometry {
    pub fn new(matrix: Vec<Vec<i64>>, lattice: &NSLattice) -> Result<Self, MukaiError> {
        let g = Isometry { matrix };
        g.validate(lattice)?;
        Ok(g)
    }

    pub fn identity(lattice: &NSLattice) -> Self {
        let n = lattice.rank() + 2;
        Isometry {
            matrix: (0..n)
                .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
                .collect(),
        }
    }

    pub fn negation(lattice: &NSLattice) -> Self {
        let mut g = Self::identity(lattice);
        for row in g.matrix.iter_mut() {
            for x in row.iter_mut() {
                *x = -*x;
            }
        }
        g
    }

    /// Reflection `x ↦ x − (2⟨x,δ⟩/⟨δ,δ⟩) δ`. For a spherical class
    /// (`δ² = −2`) this is `x ↦ x + ⟨x,δ⟩ δ`.
    pub fn reflection(delta: &MukaiVector, lattice: &NSLattice) -> Result<Self, MukaiError> {
        let d = delta.to_integers().ok_or(MukaiError::NonIntegralVector)?;
        let dd = pairing(delta, delta, lattice)?;
        if dd.is_zero() {
            return Err(MukaiError::NotAnIsometry("isotropic reflection vector".into()));
        }
        let n = lattice.rank() + 2;
        let q = mukai_gram(lattice);
        let mut matrix = vec![vec![0i64; n]; n];
        for j in 0..n {
            // ⟨e_j, δ⟩ = Σ_i Q[j][i] δ_i
            let xd: BigInt = (0..n).map(|i| BigInt::from(q[j][i]) * &d[i]).sum();
            let c = Rational::from_integer(BigInt::from(2) * xd) / &dd;
            if !c.is_integer() {
                return Err(MukaiError::NotAnIsometry(
                    "reflection is not integral on the lattice".into(),
                ));
            }
            for i in 0..n {
                let entry = BigInt::from(i64::from(i == j)) - c.numer() * &d[i];
                matrix[i][j] = i64::try_from(entry)
                    .map_err(|_| MukaiError::NotAnIsometry("entry overflow".into()))?;
            }
        }
        Isometry::new(matrix, lattice)
    }

    /// Checks `gᵀ Q g = Q` and `det g = ±1`.
    pub fn validate(&self, lattice: &NSLattice) -> Result<(), MukaiError> {
        let n = lattice.rank() + 2;
        if self.matrix.len() != n || self.matrix.iter().any(|r| r.len() != n) {
            return Err(MukaiError::DimensionMismatch {
                expected: n,
                found: self.matrix.len(),
            });
        }
        let q = mukai_gram(lattice);
        let g = &self.matrix;
        for a in 0..n {
            for b in 0..n {
                let mut acc: i128 = 0;
                for i in 0..n {
                    for j in 0..n {
                        acc += g[i][a] as i128 * q[i][j] as i128 * g[j][b] as i128;
                    }
                }
                if acc != q[a][b] as i128 {
                    return Err(MukaiError::NotAnIsometry(format!(
                        "(gᵀQg)[{}][{}] = {} but Q[{}][{}] = {}",
                        a, b, acc, a, b, q[a][b]
                    )));
                }
            }
        }
        let det = determinant(g);
        if det.abs() != BigInt::one() {
            return Err(MukaiError::NotAnIsometry(format!("determinant {}", det)));
        }
        Ok(())
    }

    pub fn apply(&self, v: &MukaiVector, lattice: &NSLattice) -> Result<MukaiVector, MukaiError> {
        self.validate(lattice)?;
        let x: Vec<&Rational> = v.components().collect();
        if x.len() != self.matrix.len() {
            return Err(MukaiError::DimensionMismatch {
                expected: self.matrix.len(),
                found: x.len(),
            });
        }
        let mut out: Vec<Rational> = self
            .matrix
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&x)
                    .map(|(&g, c)| *c * rational::int(g))
                    .sum()
            })
            .collect();
        let s = out.pop().expect("n >= 3");
        let rk = out.remove(0);
        Ok(MukaiVector { rk, l: out, s })
    }
}

/// `⟨e^{B+iω}, v⟩` as exact `(Re, Im)`.
pub fn exp_pairing(
    v: &MukaiVector,
    b: &[Rational],
    omega: &[Rational],
    lattice: &NSLattice,
) -> Result<(Rational, Rational), MukaiError> {
    let bl = lattice.dot(b, &v.l)?;
    let wl = lattice.dot(omega, &v.l)?;
    let bb = lattice.dot(b, b)?;
    let ww = lattice.dot(omega, omega)?;
    let bw = lattice.dot(b, omega)?;
    let re = bl - &v.s - &v.rk * (bb - ww) / rational::int(2);
    let im = wl - &v.rk * bw;
    Ok((re, im))
}

/// Symmetric integer search box `|rk| ≤ rk`, `|l_i| ≤ l`, `|s| ≤ s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBox {
    pub rk: i64,
    pub l: i64,
    pub s: i64,
}

/// All integral `v` in `bounds` with `⟨v,v⟩ ≥ −2` and
/// `|⟨e^{B+iω}, v⟩| ≤ m`, compared via squared modulus.
pub fn enumerate_bounded(
    lattice: &NSLattice,
    b: &[Rational],
    omega: &[Rational],
    m: &Rational,
    bounds: SearchBox,
) -> Result<Vec<MukaiVector>, MukaiError> {
    lattice.check(b)?;
    lattice.check(omega)?;
    let rho = lattice.rank();
    let m_sq = m * m;
    let minus_two = rational::int(-2);
    let mut out = Vec::new();
    let mut l = vec![-bounds.l; rho];
    loop {
        for rk in -bounds.rk..=bounds.rk {
            for s in -bounds.s..=bounds.s {
                let v = MukaiVector::integral(rk, &l, s);
                if pairing(&v, &v, lattice)? < minus_two {
                    continue;
                }
                let (re, im) = exp_pairing(&v, b, omega, lattice)?;
                if &re * &re + &im * &im <= m_sq {
                    out.push(v);
                }
            }
        }
        // odometer over the l-coordinates
        let mut i = 0;
        loop {
            if i == rho {
                return Ok(out);
            }
            if l[i] < bounds.l {
                l[i] += 1;
                break;
            }
            l[i] = -bounds.l;
            i += 1;
        }
    }
}
