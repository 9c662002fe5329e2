//! Machine-readable results of identity checks.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::qseries::{Cutoff, Monomial, Series};
use crate::rational::{self, Rational};

/// Outcome of one identity check.
///
/// For series identities `verified_box` is the box in which every
/// coefficient was compared and `first_mismatch` is a monomial. For
/// randomized checks `verified_box` is absent and `first_mismatch`
/// describes the failing case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub pass: bool,
    pub verified_box: Option<Cutoff>,
    /// Coefficients or random cases compared.
    pub checked: usize,
    pub first_mismatch: Option<Value>,
    pub lhs: Option<String>,
    pub rhs: Option<String>,
}

impl IdentityReport {
    pub fn passed(identity: &str, verified_box: Option<Cutoff>, checked: usize) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            pass: true,
            verified_box,
            checked,
            first_mismatch: None,
            lhs: None,
            rhs: None,
        }
    }

    pub fn failed(
        identity: &str,
        verified_box: Option<Cutoff>,
        checked: usize,
        at: Value,
        lhs: String,
        rhs: String,
    ) -> Self {
        IdentityReport {
            identity: identity.to_string(),
            pass: false,
            verified_box,
            checked,
            first_mismatch: Some(at),
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    }
}

pub fn monomial_json(m: &Monomial) -> Value {
    json!({"q": m.q, "t": m.t, "u": m.u, "y2": m.y2})
}

/// Compares two series coefficientwise inside the intersection of their
/// boxes, in monomial order.
pub fn compare(identity: &str, lhs: &Series, rhs: &Series) -> IdentityReport {
    let verified = lhs.cutoff().intersect(rhs.cutoff());
    let a = lhs.restrict(&verified);
    let b = rhs.restrict(&verified);
    let support: BTreeSet<&Monomial> = a.terms().keys().chain(b.terms().keys()).collect();
    let zero = Rational::from_integer(0.into());
    for (i, m) in support.iter().enumerate() {
        let x = a.terms().get(*m).unwrap_or(&zero);
        let y = b.terms().get(*m).unwrap_or(&zero);
        if x != y {
            return IdentityReport::failed(
                identity,
                Some(verified),
                i + 1,
                monomial_json(m),
                rational::format(x),
                rational::format(y),
            );
        }
    }
    IdentityReport::passed(identity, Some(verified), support.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn compare_reports_first_mismatch() {
        let c = Cutoff::q_only(0, 4);
        let a = Series::from_q_coeffs(c.clone(), 0, &[int(1), int(2), int(3)]);
        let b = Series::from_q_coeffs(Cutoff::q_only(0, 3), 0, &[int(1), int(2), int(5)]);
        let r = compare("demo", &a, &b);
        assert!(!r.pass);
        assert_eq!(r.verified_box, Some(Cutoff::q_only(0, 3)));
        assert_eq!(r.first_mismatch, Some(json!({"q": 2, "t": [], "u": 0, "y2": 0})));
        assert_eq!((r.lhs.as_deref(), r.rhs.as_deref()), (Some("3"), Some("5")));
        let ok = compare("demo", &a, &a);
        assert!(ok.pass && ok.first_mismatch.is_none());
        let s = serde_json::to_value(&ok).unwrap();
        assert_eq!(s["first_mismatch"], Value::Null);
    }
}
