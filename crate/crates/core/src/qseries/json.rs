use serde::{Deserialize, Serialize};

use super::cutoff::Cutoff;
use super::monomial::Monomial;
use super::series::Series;
use crate::rational::{self, Rational};

#[derive(Serialize, Deserialize)]
struct TermJson {
    q: i64,
    t: Vec<u32>,
    u: i64,
    y2: i64,
    #[serde(with = "rational::serde_str")]
    c: Rational,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    cutoff: Cutoff,
    terms: Vec<TermJson>,
}

impl Serialize for Series {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SeriesJson {
            cutoff: self.cutoff().clone(),
            terms: self
                .terms()
                .iter()
                .map(|(m, c)| TermJson {
                    q: m.q,
                    t: m.t.clone(),
                    u: m.u,
                    y2: m.y2,
                    c: c.clone(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Series {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        let slots = raw.cutoff.t_slots();
        let mut terms = Vec::with_capacity(raw.terms.len());
        for t in raw.terms {
            let m = Monomial {
                q: t.q,
                t: t.t,
                u: t.u,
                y2: t.y2,
            };
            if m.t.len() != slots || !raw.cutoff.contains(&m) {
                return Err(serde::de::Error::custom(format!(
                    "term {} lies outside the declared cutoff",
                    m
                )));
            }
            terms.push((m, t.c));
        }
        Ok(Series::from_terms(raw.cutoff, terms))
    }
}
