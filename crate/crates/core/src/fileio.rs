//! JSON file formats for relations, channels, attributes and
//! distributions.
//!
//! All files are UTF-8 JSON with unknown keys rejected. Exact values
//! travel as strings (`"p/q"`, `"log2(p/q)"`), never as floats, so a
//! parse-and-reformat round trip is lossless.

use std::collections::BTreeMap;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stochastic::{RationalDist, StochasticChannel};
use crate::uv::{AttributeMap, Channel, Relation, Symbol};
use crate::value::{parse_rational, rational_string, LeakageValue};

/// `{"variables": [...], "alphabets": {...}, "tuples": [[...], ...]}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationFile {
    pub variables: Vec<String>,
    pub alphabets: BTreeMap<String, Vec<String>>,
    pub tuples: Vec<Vec<String>>,
}

impl RelationFile {
    pub fn from_relation(rel: &Relation) -> Self {
        RelationFile {
            variables: rel.variables().to_vec(),
            alphabets: rel
                .variables()
                .iter()
                .map(|v| {
                    let alpha = rel.alphabet(v).expect("declared variable");
                    (v.clone(), alpha.iter().map(|s| s.to_string()).collect())
                })
                .collect(),
            tuples: rel
                .tuples()
                .iter()
                .map(|t| t.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }

    pub fn into_relation(self) -> Result<Relation> {
        let alphabets = self
            .alphabets
            .into_iter()
            .map(|(v, syms)| {
                let set = syms.into_iter().map(Symbol::new).collect::<Result<_>>()?;
                Ok((v, set))
            })
            .collect::<Result<_>>()?;
        let tuples = self
            .tuples
            .into_iter()
            .map(|t| t.into_iter().map(Symbol::new).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Relation::new(self.variables, alphabets, tuples)
    }
}

pub fn relation_from_json(text: &str) -> Result<Relation> {
    let file: RelationFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("relation file: {e}")))?;
    file.into_relation()
}

pub fn relation_to_json(rel: &Relation) -> String {
    serde_json::to_string_pretty(&RelationFile::from_relation(rel)).expect("serializable")
}

/// `{"from": "X", "to": "Y", "map": {"x1": ["y1"], ...}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<String, Vec<String>>,
}

impl ChannelFile {
    pub fn from_channel(ch: &Channel) -> Self {
        ChannelFile {
            from: ch.source_var().to_string(),
            to: ch.target_var().to_string(),
            map: ch
                .map()
                .iter()
                .map(|(x, ys)| (x.to_string(), ys.iter().map(|y| y.to_string()).collect()))
                .collect(),
        }
    }

    pub fn into_channel(self) -> Result<Channel> {
        let map = self
            .map
            .into_iter()
            .map(|(x, ys)| {
                let image = ys.into_iter().map(Symbol::new).collect::<Result<_>>()?;
                Ok((Symbol::new(x)?, image))
            })
            .collect::<Result<_>>()?;
        Channel::new(self.from, self.to, map)
    }
}

pub fn channel_from_json(text: &str) -> Result<Channel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("channel file: {e}")))?;
    file.into_channel()
}

pub fn channel_to_json(ch: &Channel) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_channel(ch)).expect("serializable")
}

/// `{"weights": {"x1|y1": "1/3", ...}}` — tuple keys join the symbols of
/// one relation tuple with `|`, in the relation's variable order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub weights: BTreeMap<String, String>,
}

impl DistributionFile {
    pub fn from_dist(dist: &RationalDist) -> Result<Self> {
        let weights = dist
            .weights()
            .iter()
            .map(|(t, w)| Ok((join_tuple(t)?, rational_string(w))))
            .collect::<Result<_>>()?;
        Ok(DistributionFile { weights })
    }

    pub fn into_dist(self, rel: &Relation) -> Result<RationalDist> {
        let arity = rel.variables().len();
        let mut weights = BTreeMap::new();
        for (key, text) in self.weights {
            let parts: Vec<&str> = key.split('|').collect();
            if parts.len() != arity {
                return Err(Error::input(format!(
                    "weight key {key:?} has {} coordinates, the relation has {arity}",
                    parts.len()
                )));
            }
            let tuple = parts
                .into_iter()
                .map(Symbol::new)
                .collect::<Result<Vec<_>>>()?;
            let w = parse_rational(text.trim())?;
            if weights.insert(tuple, w).is_some() {
                return Err(Error::input(format!("duplicate weight key {key:?}")));
            }
        }
        RationalDist::new(rel.clone(), weights)
    }
}

fn join_tuple(t: &[Symbol]) -> Result<String> {
    if let Some(bad) = t.iter().find(|s| s.as_str().contains('|')) {
        return Err(Error::input(format!(
            "symbol {bad} contains '|' and cannot be used in a weight key"
        )));
    }
    Ok(t.iter().map(|s| s.as_str()).collect::<Vec<_>>().join("|"))
}

pub fn distribution_from_json(rel: &Relation, text: &str) -> Result<RationalDist> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("distribution file: {e}")))?;
    file.into_dist(rel)
}

pub fn distribution_to_json(dist: &RationalDist) -> Result<String> {
    Ok(serde_json::to_string_pretty(&DistributionFile::from_dist(dist)?).expect("serializable"))
}

/// `{"from": "X", "to": "Y", "rows": {"x1": {"y1": "1/2", ...}, ...}}`
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticChannelFile {
    pub from: String,
    pub to: String,
    pub rows: BTreeMap<String, BTreeMap<String, String>>,
}

impl StochasticChannelFile {
    pub fn from_channel(ch: &StochasticChannel) -> Self {
        StochasticChannelFile {
            from: ch.source_var().to_string(),
            to: ch.target_var().to_string(),
            rows: ch
                .rows()
                .iter()
                .map(|(x, row)| {
                    (
                        x.to_string(),
                        row.iter()
                            .map(|(y, p)| (y.to_string(), rational_string(p)))
                            .collect(),
                    )
                })
                .collect(),
        }
    }

    pub fn into_channel(self) -> Result<StochasticChannel> {
        let rows = self
            .rows
            .into_iter()
            .map(|(x, row)| {
                let parsed: BTreeMap<Symbol, BigRational> = row
                    .into_iter()
                    .map(|(y, p)| Ok((Symbol::new(y)?, parse_rational(&p)?)))
                    .collect::<Result<_>>()?;
                Ok((Symbol::new(x)?, parsed))
            })
            .collect::<Result<_>>()?;
        StochasticChannel::new(self.from, self.to, rows)
    }
}

pub fn stochastic_channel_from_json(text: &str) -> Result<StochasticChannel> {
    let file: StochasticChannelFile = serde_json::from_str(text)
        .map_err(|e| Error::input(format!("stochastic channel file: {e}")))?;
    file.into_channel()
}

pub fn stochastic_channel_to_json(ch: &StochasticChannel) -> String {
    serde_json::to_string_pretty(&StochasticChannelFile::from_channel(ch)).expect("serializable")
}

/// `{"domain": [...], "map": {...}, "achieved_leakage": "log2(p/q)"}` —
/// the output of the worst-attribute construction; `achieved_leakage` is
/// informative and optional on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttributeFile {
    pub domain: Vec<String>,
    pub map: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub achieved_leakage: Option<LeakageValue>,
}

impl AttributeFile {
    pub fn from_attribute(g: &AttributeMap, achieved: Option<LeakageValue>) -> Self {
        AttributeFile {
            domain: g.domain().iter().map(|s| s.to_string()).collect(),
            map: g
                .entries()
                .iter()
                .map(|(x, u)| (x.to_string(), u.to_string()))
                .collect(),
            achieved_leakage: achieved,
        }
    }

    pub fn into_attribute(self) -> Result<(AttributeMap, Option<LeakageValue>)> {
        let map: BTreeMap<Symbol, Symbol> = self
            .map
            .into_iter()
            .map(|(x, u)| Ok((Symbol::new(x)?, Symbol::new(u)?)))
            .collect::<Result<_>>()?;
        let g = AttributeMap::new(map)?;
        let declared: std::collections::BTreeSet<Symbol> = self
            .domain
            .into_iter()
            .map(Symbol::new)
            .collect::<Result<_>>()?;
        if declared != g.domain() {
            return Err(Error::input("attribute domain does not match the map keys"));
        }
        Ok((g, self.achieved_leakage))
    }
}

pub fn attribute_from_json(text: &str) -> Result<(AttributeMap, Option<LeakageValue>)> {
    let file: AttributeFile =
        serde_json::from_str(text).map_err(|e| Error::input(format!("attribute file: {e}")))?;
    file.into_attribute()
}

pub fn attribute_to_json(g: &AttributeMap, achieved: Option<LeakageValue>) -> String {
    serde_json::to_string_pretty(&AttributeFile::from_attribute(g, achieved)).expect("serializable")
}
