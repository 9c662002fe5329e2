use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{qt, WallcrossError};
use crate::qseries::{Cutoff, Series};
use crate::rational::{self, Rational};

/// `(n, β)`, standing for the monomial `q^n t^β`.
pub type Charge = (i64, Vec<u32>);

/// Tables `N_{n,β}` and `L_{n,β}`, exact for every charge whose monomial
/// lies in `cutoff`.
///
/// The `L` table always has `L_{0,0} = 1` and no other `β = 0` entry. When
/// flagged as limit-stable data it satisfies `L_{n,β} = L_{−n,β}` wherever
/// both charges lie in the box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountingTable {
    cutoff: Cutoff,
    n: BTreeMap<Charge, Rational>,
    l: BTreeMap<Charge, Rational>,
    limit_stable: bool,
}

impl CountingTable {
    pub fn new(
        cutoff: Cutoff,
        mut n: BTreeMap<Charge, Rational>,
        mut l: BTreeMap<Charge, Rational>,
        limit_stable: bool,
    ) -> Result<Self, WallcrossError> {
        let slots = cutoff.t_slots();
        let zero_beta = vec![0u32; slots];
        for (table, name) in [(&n, "N"), (&l, "L")] {
            for (n_, beta) in table.keys() {
                if beta.len() != slots {
                    return Err(WallcrossError::SlotMismatch(beta.clone()));
                }
                if !cutoff.contains(&qt(*n_, beta)) {
                    return Err(WallcrossError::InvalidTable(format!(
                        "{} entry ({}, {:?}) lies outside the cutoff",
                        name, n_, beta
                    )));
                }
            }
        }
        n.retain(|_, c| !c.is_zero());
        l.retain(|_, c| !c.is_zero());
        let unit = (0, zero_beta.clone());
        match l.get(&unit) {
            None => {
                l.insert(unit, Rational::one());
            }
            Some(c) if c.is_one() => {}
            Some(c) => {
                return Err(WallcrossError::InvalidTable(format!(
                    "L_{{0,0}} must be 1, got {}",
                    rational::format(c)
                )))
            }
        }
        if let Some(((n_, _), _)) = l.iter().find(|((n_, b), _)| *b == zero_beta && *n_ != 0) {
            return Err(WallcrossError::InvalidTable(format!(
                "L has a β = 0 entry at n = {}",
                n_
            )));
        }
        let table = CountingTable {
            cutoff,
            n,
            l,
            limit_stable,
        };
        if limit_stable {
            table.check_symmetry()?;
        }
        Ok(table)
    }

    fn check_symmetry(&self) -> Result<(), WallcrossError> {
        for (n, beta) in self.l.keys() {
            if !self.cutoff.contains(&qt(-n, beta)) {
                continue;
            }
            if self.l_coeff(*n, beta) != self.l_coeff(-n, beta) {
                return Err(WallcrossError::InvalidTable(format!(
                    "L_{{{},{:?}}} ≠ L_{{{},{:?}}}",
                    n, beta, -n, beta
                )));
            }
        }
        Ok(())
    }

    pub fn cutoff(&self) -> &Cutoff {
        &self.cutoff
    }

    pub fn n_entries(&self) -> &BTreeMap<Charge, Rational> {
        &self.n
    }

    pub fn l_entries(&self) -> &BTreeMap<Charge, Rational> {
        &self.l
    }

    pub fn is_limit_stable(&self) -> bool {
        self.limit_stable
    }

    pub fn n_coeff(&self, n: i64, beta: &[u32]) -> Rational {
        self.n.get(&(n, beta.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn l_coeff(&self, n: i64, beta: &[u32]) -> Rational {
        self.l.get(&(n, beta.to_vec())).cloned().unwrap_or_else(Rational::zero)
    }

    /// `Σ L_{n,β} q^n t^β` in `cutoff`.
    pub fn l_series(&self, cutoff: &Cutoff) -> Series {
        Series::from_terms(
            cutoff.clone(),
            self.l.iter().map(|((n, b), c)| (qt(*n, b), c.clone())),
        )
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    n: i64,
    beta: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    cutoff: Cutoff,
    #[serde(default)]
    limit_stable: bool,
    #[serde(rename = "N", default)]
    n: Vec<EntryJson>,
    #[serde(rename = "L", default)]
    l: Vec<EntryJson>,
}

fn to_entries(m: &BTreeMap<Charge, Rational>) -> Vec<EntryJson> {
    m.iter()
        .map(|((n, beta), c)| EntryJson {
            n: *n,
            beta: beta.clone(),
            c: c.clone(),
        })
        .collect()
}

fn from_entries(v: Vec<EntryJson>) -> BTreeMap<Charge, Rational> {
    let mut out = BTreeMap::new();
    for e in v {
        *out.entry((e.n, e.beta)).or_insert_with(Rational::zero) += e.c;
    }
    out
}

impl Serialize for CountingTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableJson {
            cutoff: self.cutoff.clone(),
            limit_stable: self.limit_stable,
            n: to_entries(&self.n),
            l: to_entries(&self.l),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CountingTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = TableJson::deserialize(d)?;
        CountingTable::new(j.cutoff, from_entries(j.n), from_entries(j.l), j.limit_stable)
            .map_err(serde::de::Error::custom)
    }
}
