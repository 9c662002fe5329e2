use serde::{Deserialize, Serialize};

use super::monomial::{Monomial, Var};

/// Truncation box of a [`Series`](super::Series).
///
/// The `q` and `u` bounds apply to the *graded* exponents
/// `q + q_slope·|t|` and `u + u_slope·|t|`, where `|t|` is the total curve
/// degree. With both slopes zero this is a plain per-variable box. A positive
/// slope makes the box honest for series such as `q^{-1} t` or `u^{-2} t`
/// whose Laurent tail grows with the curve degree: in graded coordinates
/// every exponent is non-negative and truncation is compatible with
/// multiplication.
///
/// Every coefficient of a series inside its box is exact; monomials outside
/// are unknown.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoff {
    pub q_min: i64,
    pub q_max: i64,
    pub t_max: Vec<u32>,
    pub u_min: i64,
    pub u_max: i64,
    pub y2_min: i64,
    pub y2_max: i64,
    #[serde(default)]
    pub q_slope: i64,
    #[serde(default)]
    pub u_slope: i64,
}

impl Cutoff {
    /// Power series in `q` and the curve variables: `q ∈ [0, q_max]`,
    /// `u = y = 0`.
    pub fn power_series(q_max: i64, t_max: Vec<u32>) -> Self {
        Cutoff {
            q_min: 0,
            q_max,
            t_max,
            u_min: 0,
            u_max: 0,
            y2_min: 0,
            y2_max: 0,
            q_slope: 0,
            u_slope: 0,
        }
    }

    /// Univariate `q`-box with no curve slots.
    pub fn q_only(q_min: i64, q_max: i64) -> Self {
        Cutoff {
            q_min,
            ..Self::power_series(q_max, Vec::new())
        }
    }

    /// Univariate `u`-box with no curve slots.
    pub fn u_only(u_min: i64, u_max: i64) -> Self {
        Cutoff {
            q_max: 0,
            u_min,
            u_max,
            ..Self::power_series(0, Vec::new())
        }
    }

    pub fn with_q(mut self, min: i64, max: i64) -> Self {
        self.q_min = min;
        self.q_max = max;
        self
    }

    pub fn with_u(mut self, min: i64, max: i64) -> Self {
        self.u_min = min;
        self.u_max = max;
        self
    }

    pub fn with_y2(mut self, min: i64, max: i64) -> Self {
        self.y2_min = min;
        self.y2_max = max;
        self
    }

    pub fn with_q_slope(mut self, slope: i64) -> Self {
        self.q_slope = slope;
        self
    }

    pub fn with_u_slope(mut self, slope: i64) -> Self {
        self.u_slope = slope;
        self
    }

    pub fn t_slots(&self) -> usize {
        self.t_max.len()
    }

    /// Graded `q` exponent of `m` in this box.
    pub fn graded_q(&self, m: &Monomial) -> i64 {
        m.q + self.q_slope * m.t_degree()
    }

    /// Graded `u` exponent of `m` in this box.
    pub fn graded_u(&self, m: &Monomial) -> i64 {
        m.u + self.u_slope * m.t_degree()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        if m.t.len() != self.t_max.len() || m.t.iter().zip(&self.t_max).any(|(e, mx)| e > mx) {
            return false;
        }
        let q = self.graded_q(m);
        let u = self.graded_u(m);
        (self.q_min..=self.q_max).contains(&q)
            && (self.u_min..=self.u_max).contains(&u)
            && (self.y2_min..=self.y2_max).contains(&m.y2)
    }

    /// Whether the multidegree `beta` is within the per-slot `t` bounds.
    pub fn contains_t(&self, beta: &[u32]) -> bool {
        beta.len() == self.t_max.len() && beta.iter().zip(&self.t_max).all(|(b, m)| b <= m)
    }

    /// Whether `other` lies inside `self` (same grading required).
    pub fn covers(&self, other: &Cutoff) -> bool {
        self.q_slope == other.q_slope
            && self.u_slope == other.u_slope
            && self.t_max.len() == other.t_max.len()
            && self.t_max.iter().zip(&other.t_max).all(|(a, b)| a >= b)
            && self.q_min <= other.q_min
            && self.q_max >= other.q_max
            && self.u_min <= other.u_min
            && self.u_max >= other.u_max
            && self.y2_min <= other.y2_min
            && self.y2_max >= other.y2_max
    }

    /// Componentwise intersection: min of upper bounds, max of lower bounds.
    ///
    /// Panics if the two boxes have different curve-slot counts or
    /// gradings; such series live in different rings.
    pub fn intersect(&self, other: &Cutoff) -> Cutoff {
        self.assert_compatible(other);
        Cutoff {
            q_min: self.q_min.max(other.q_min),
            q_max: self.q_max.min(other.q_max),
            t_max: self
                .t_max
                .iter()
                .zip(&other.t_max)
                .map(|(a, b)| *a.min(b))
                .collect(),
            u_min: self.u_min.max(other.u_min),
            u_max: self.u_max.min(other.u_max),
            y2_min: self.y2_min.max(other.y2_min),
            y2_max: self.y2_max.min(other.y2_max),
            q_slope: self.q_slope,
            u_slope: self.u_slope,
        }
    }

    pub(crate) fn assert_compatible(&self, other: &Cutoff) {
        assert_eq!(
            self.t_max.len(),
            other.t_max.len(),
            "series have different numbers of curve slots"
        );
        assert!(
            self.q_slope == other.q_slope && self.u_slope == other.u_slope,
            "series have different gradings (q_slope {} vs {}, u_slope {} vs {})",
            self.q_slope,
            other.q_slope,
            self.u_slope,
            other.u_slope
        );
    }

    /// Sum of the box side lengths; bounds how many steps a nonzero
    /// monomial direction can stay inside the box.
    pub(crate) fn diameter(&self) -> u64 {
        let span = |lo: i64, hi: i64| (hi - lo).max(0) as u64;
        span(self.q_min, self.q_max)
            + span(self.u_min, self.u_max)
            + span(self.y2_min, self.y2_max)
            + self.t_max.iter().map(|&e| e as u64).sum::<u64>()
    }

    pub(crate) fn bounds_mut(&mut self, var: Var) -> Option<(&mut i64, &mut i64)> {
        match var {
            Var::Q => Some((&mut self.q_min, &mut self.q_max)),
            Var::U => Some((&mut self.u_min, &mut self.u_max)),
            Var::YHalf => Some((&mut self.y2_min, &mut self.y2_max)),
            Var::T(_) => None,
        }
    }
}
