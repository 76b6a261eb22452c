//! Profile files, model files and the poll-record CSV.
//!
//! Profile format: a header line `m n`, then `n` lines each holding a
//! comma-separated permutation of `0..m`. Anything after `#` is a comment;
//! blank lines are skipped.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::experiment::PollRecord;
use crate::models::{MallowsParams, PlackettLuceParams, PreferenceModel};
use crate::order::LinearOrder;

pub const RECORDS_HEADER: [&str; 6] = ["user", "poll", "strategy", "time", "dkt", "moves"];

pub fn load_profile(path: impl AsRef<Path>) -> Result<Vec<LinearOrder>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_profile(&text, &path.display().to_string())
}

/// Parses profile text; `source` names the input in error messages.
pub fn parse_profile(text: &str, source: &str) -> Result<Vec<LinearOrder>> {
    let parse_err = |line: usize, msg: String| Error::Parse { path: source.to_string(), line, msg };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing `m n` header".into()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    let [m, n] = dims.as_slice() else {
        return Err(parse_err(hline, format!("expected header `m n`, found `{header}`")));
    };
    let m: usize = m.parse().map_err(|_| parse_err(hline, format!("bad alternative count `{m}`")))?;
    let n: usize = n.parse().map_err(|_| parse_err(hline, format!("bad order count `{n}`")))?;

    let mut profile = Vec::with_capacity(n);
    for (lineno, line) in lines {
        let ids = line
            .split(',')
            .map(|x| x.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(lineno, format!("malformed order `{line}`: {e}")))?;
        if ids.len() != m {
            return Err(parse_err(lineno, format!("expected {m} alternatives, found {}", ids.len())));
        }
        let mut seen = vec![false; m];
        for &a in &ids {
            if a >= m {
                return Err(Error::Validation(format!("{source}: line {lineno}: alternative {a} out of range 0..{m}")));
            }
            if std::mem::replace(&mut seen[a], true) {
                return Err(Error::Validation(format!("{source}: line {lineno}: duplicate alternative {a}")));
            }
        }
        profile.push(LinearOrder::new(ids)?);
    }
    if profile.len() != n {
        return Err(Error::Validation(format!("{source}: header declares {n} orders, found {}", profile.len())));
    }
    Ok(profile)
}

pub fn format_profile(profile: &[LinearOrder]) -> String {
    let m = profile.first().map_or(0, |o| o.len());
    let mut out = format!("{m} {}\n", profile.len());
    for o in profile {
        let _ = writeln!(out, "{o}");
    }
    out
}

pub fn write_profile(path: impl AsRef<Path>, profile: &[LinearOrder]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_profile(profile)).map_err(|e| Error::io(path, e))
}

pub fn records_to_csv(records: &[PollRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Validation(format!("csv encoding failed: {e}"));
    w.write_record(RECORDS_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.user.to_string(),
            r.poll.to_string(),
            r.strategy.to_string(),
            r.time.to_string(),
            r.dkt.to_string(),
            r.moves.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Validation(format!("csv encoding failed: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_records(path: impl AsRef<Path>, records: &[PollRecord]) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, records_to_csv(records)?).map_err(|e| Error::io(path, e))
}

/// On-disk description of a [`PreferenceModel`].
///
/// ```toml
/// kind = "plackett-luce"
/// [[components]]
/// weight = 1.0
/// theta = [0.5, 0.3, 0.2]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    PlackettLuce { components: Vec<PlComponent> },
    Mallows { components: Vec<MallowsComponent> },
    Uniform { profile: Vec<Vec<usize>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlComponent {
    #[serde(default = "one")]
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    /// Natural-log weights, for magnitudes that overflow `f64`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MallowsComponent {
    #[serde(default = "one")]
    pub weight: f64,
    pub reference: Vec<usize>,
    pub phi: f64,
}

fn one() -> f64 {
    1.0
}

impl ModelSpec {
    pub fn build(&self) -> Result<PreferenceModel> {
        match self {
            ModelSpec::PlackettLuce { components } => {
                let params = components
                    .iter()
                    .enumerate()
                    .map(|(i, c)| match (&c.theta, &c.log_theta) {
                        (Some(t), None) => PlackettLuceParams::new(t.clone()),
                        (None, Some(l)) => PlackettLuceParams::from_log_theta(l.clone()),
                        _ => Err(Error::Config {
                            field: format!("components[{i}]"),
                            msg: "give exactly one of `theta` or `log_theta`".into(),
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                PreferenceModel::mixture_pl(components.iter().map(|c| c.weight).collect(), params)
            }
            ModelSpec::Mallows { components } => {
                let params = components
                    .iter()
                    .map(|c| MallowsParams::new(LinearOrder::new(c.reference.clone())?, c.phi))
                    .collect::<Result<Vec<_>>>()?;
                PreferenceModel::mixture_mallows(components.iter().map(|c| c.weight).collect(), params)
            }
            ModelSpec::Uniform { profile } => {
                PreferenceModel::uniform(profile.iter().map(|o| LinearOrder::new(o.clone())).collect::<Result<_>>()?)
            }
        }
    }

    /// Describes `model`; Plackett-Luce weights are written as log-weights.
    pub fn from_model(model: &PreferenceModel) -> Self {
        match model {
            PreferenceModel::MixturePl(mix) => ModelSpec::PlackettLuce {
                components: mix
                    .iter()
                    .map(|(g, c)| PlComponent { weight: g, theta: None, log_theta: Some(c.log_theta().to_vec()) })
                    .collect(),
            },
            PreferenceModel::MixtureMallows(mix) => ModelSpec::Mallows {
                components: mix
                    .iter()
                    .map(|(g, c)| MallowsComponent {
                        weight: g,
                        reference: c.reference().as_slice().to_vec(),
                        phi: c.phi(),
                    })
                    .collect(),
            },
            PreferenceModel::Uniform(p) => {
                ModelSpec::Uniform { profile: p.orders().iter().map(|o| o.as_slice().to_vec()).collect() }
            }
        }
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Validation(format!("cannot encode model: {e}")))
    }

    pub fn from_toml(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config { field: source.to_string(), msg: e.to_string() })
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<PreferenceModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ModelSpec::from_toml(&text, &path.display().to_string())?.build()
}
