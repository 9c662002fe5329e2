use std::fmt;

/// Formal variable selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    Q,
    /// Curve-class generator `t_i`.
    T(usize),
    U,
    /// The half-power `y^{1/2}`.
    YHalf,
}

/// `q^q · t^t · u^u · y^{y2/2}`.
///
/// Ordered graded-lexicographically by `(q, t, u, y2)`, which is also the
/// iteration order of a [`Series`](super::Series).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub q: i64,
    pub t: Vec<u32>,
    pub u: i64,
    pub y2: i64,
}

impl Monomial {
    pub fn one(t_slots: usize) -> Self {
        Monomial {
            q: 0,
            t: vec![0; t_slots],
            u: 0,
            y2: 0,
        }
    }

    pub fn q(e: i64, t_slots: usize) -> Self {
        Monomial {
            q: e,
            ..Self::one(t_slots)
        }
    }

    pub fn u(e: i64, t_slots: usize) -> Self {
        Monomial {
            u: e,
            ..Self::one(t_slots)
        }
    }

    pub fn qt(q: i64, t: &[u32]) -> Self {
        Monomial {
            q,
            t: t.to_vec(),
            u: 0,
            y2: 0,
        }
    }

    pub fn ut(u: i64, t: &[u32]) -> Self {
        Monomial {
            q: 0,
            t: t.to_vec(),
            u,
            y2: 0,
        }
    }

    pub fn is_one(&self) -> bool {
        self.q == 0 && self.u == 0 && self.y2 == 0 && self.t.iter().all(|&e| e == 0)
    }

    /// Total curve degree `|t|`.
    pub fn t_degree(&self) -> i64 {
        self.t.iter().map(|&e| e as i64).sum()
    }

    pub fn exponent(&self, var: Var) -> i64 {
        match var {
            Var::Q => self.q,
            Var::T(i) => self.t[i] as i64,
            Var::U => self.u,
            Var::YHalf => self.y2,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.t.len(), other.t.len());
        Monomial {
            q: self.q + other.q,
            t: self.t.iter().zip(&other.t).map(|(a, b)| a + b).collect(),
            u: self.u + other.u,
            y2: self.y2 + other.y2,
        }
    }

    pub fn pow(&self, k: u32) -> Monomial {
        let k64 = k as i64;
        Monomial {
            q: self.q * k64,
            t: self.t.iter().map(|&e| e * k).collect(),
            u: self.u * k64,
            y2: self.y2 * k64,
        }
    }

    /// `self / other`, or `None` if some `t` exponent would become negative.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut t = Vec::with_capacity(self.t.len());
        for (a, b) in self.t.iter().zip(&other.t) {
            t.push(a.checked_sub(*b)?);
        }
        Some(Monomial {
            q: self.q - other.q,
            t,
            u: self.u - other.u,
            y2: self.y2 - other.y2,
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut parts = Vec::new();
        if self.q != 0 {
            parts.push(format!("q^{}", self.q));
        }
        for (i, &e) in self.t.iter().enumerate() {
            if e != 0 {
                parts.push(format!("t{}^{}", i, e));
            }
        }
        if self.u != 0 {
            parts.push(format!("u^{}", self.u));
        }
        if self.y2 != 0 {
            parts.push(format!("y^({}/2)", self.y2));
        }
        f.write_str(&parts.join("*"))
    }
}
