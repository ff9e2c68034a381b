//! JSON file formats. Vertex labels are 1-based on disk and every float is
//! written with 17 significant digits, so a write/read cycle is lossless.
//!
//! ```text
//! instance      {"K": int, "n": int, "edges": [{"u","v","d"} | {"u","v","dl","du"}]}
//! realization   {"K": int, "n": int, "x": [[number, ...], ...]}
//! solution set  {"solutions": [realization, ...],
//!                "tree_stats": {"level_counts": [int, ...], "pruned": int}}
//! matrix        {"n": int, "m": [[number, ...], ...]}
//! distance list {"K": int, "n": int, "distances": [number, ...]}
//! ```

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use crate::bp::SolutionSet;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::model::{DgpInstance, Edge, Realization, Weight};
use crate::udgp::DistanceList;

/// `%.17g`-style rendering that always keeps a fraction or exponent marker.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return "null".to_string();
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{:.16e}", v);
    let (mant, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..17).contains(&exp) {
        let (int_part, frac_part) = if exp >= 0 {
            let cut = exp as usize + 1;
            (digits[..cut].to_string(), digits[cut..].to_string())
        } else {
            ("0".to_string(), "0".repeat((-exp - 1) as usize) + &digits)
        };
        let frac = frac_part.trim_end_matches('0');
        out.push_str(&int_part);
        out.push('.');
        out.push_str(if frac.is_empty() { "0" } else { frac });
    } else {
        let frac = digits[1..].trim_end_matches('0');
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(if frac.is_empty() { "0" } else { frac });
        out.push('e');
        out.push_str(&exp.to_string());
    }
    out
}

struct G17Formatter;

impl Formatter for G17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    fn write_null<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        CompactFormatter.write_null(writer)
    }
}

/// Serializes any value as compact JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, G17Formatter);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeJson {
    Exact {
        u: usize,
        v: usize,
        d: f64,
    },
    Interval {
        u: usize,
        v: usize,
        dl: f64,
        du: f64,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceJson {
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct RealizationJson {
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    x: Vec<Vec<f64>>,
}

impl From<&Realization> for RealizationJson {
    fn from(r: &Realization) -> Self {
        RealizationJson {
            k: r.k(),
            n: r.n(),
            x: r.to_rows(),
        }
    }
}

impl TryFrom<RealizationJson> for Realization {
    type Error = Error;
    fn try_from(j: RealizationJson) -> Result<Self> {
        if j.x.len() != j.n {
            return Err(Error::Parse(format!(
                "\"n\" is {} but \"x\" has {} rows",
                j.n,
                j.x.len()
            )));
        }
        Realization::new(j.k, j.x)
    }
}

fn label(i: usize, n: usize) -> Result<usize> {
    if i == 0 || i > n {
        return Err(Error::Invariant(format!("vertex label {i} outside 1..{n}")));
    }
    Ok(i - 1)
}

pub fn load_instance(text: &str) -> Result<DgpInstance> {
    let j: InstanceJson = serde_json::from_str(text)?;
    let mut edges = Vec::with_capacity(j.edges.len());
    for e in j.edges {
        edges.push(match e {
            EdgeJson::Exact { u, v, d } => Edge::exact(label(u, j.n)?, label(v, j.n)?, d),
            EdgeJson::Interval { u, v, dl, du } => {
                Edge::interval(label(u, j.n)?, label(v, j.n)?, dl, du)
            }
        });
    }
    DgpInstance::new(j.n, j.k, edges)
}

pub fn instance_to_json(inst: &DgpInstance) -> String {
    let edges = inst
        .edges()
        .iter()
        .map(|e| match e.weight {
            Weight::Exact(d) => EdgeJson::Exact {
                u: e.u + 1,
                v: e.v + 1,
                d,
            },
            Weight::Interval { lo, hi } => EdgeJson::Interval {
                u: e.u + 1,
                v: e.v + 1,
                dl: lo,
                du: hi,
            },
        })
        .collect();
    to_json(&InstanceJson {
        k: inst.k(),
        n: inst.n(),
        edges,
    })
}

pub fn load_realization(text: &str) -> Result<Realization> {
    let j: RealizationJson = serde_json::from_str(text)?;
    j.try_into()
}

pub fn realization_to_json(x: &Realization) -> String {
    to_json(&RealizationJson::from(x))
}

#[derive(Serialize, Deserialize)]
struct TreeStatsJson {
    level_counts: Vec<u64>,
    pruned: u64,
}

#[derive(Serialize, Deserialize)]
struct SolutionSetJson {
    solutions: Vec<RealizationJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    tree_stats: Option<TreeStatsJson>,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    truncated: bool,
}

/// Solution-set JSON; `tree_stats` is emitted only when `with_stats` is set.
pub fn solution_set_to_json(set: &SolutionSet, with_stats: bool) -> String {
    to_json(&SolutionSetJson {
        solutions: set.solutions.iter().map(RealizationJson::from).collect(),
        tree_stats: with_stats.then(|| TreeStatsJson {
            level_counts: set.level_counts.clone(),
            pruned: set.pruned_count,
        }),
        truncated: set.truncated,
    })
}

/// `(level_counts, pruned)` of a solution-set file.
pub type TreeStats = (Vec<u64>, u64);

/// Reads back the solutions (and statistics, when present) of a solution-set file.
pub fn load_solution_set(text: &str) -> Result<(Vec<Realization>, Option<TreeStats>)> {
    let j: SolutionSetJson = serde_json::from_str(text)?;
    let sols = j
        .solutions
        .into_iter()
        .map(Realization::try_from)
        .collect::<Result<_>>()?;
    Ok((sols, j.tree_stats.map(|t| (t.level_counts, t.pruned))))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    #[serde(default)]
    n: Option<usize>,
    m: Vec<Vec<f64>>,
}

/// Matrix JSON. `"n"` is optional on input; when present it must match the row count.
pub fn load_matrix(text: &str) -> Result<Matrix> {
    let j: MatrixJson = serde_json::from_str(text)?;
    if let Some(n) = j.n {
        if n != j.m.len() {
            return Err(Error::Parse(format!(
                "\"n\" is {} but \"m\" has {} rows",
                n,
                j.m.len()
            )));
        }
    }
    Matrix::from_rows(j.m)
}

pub fn matrix_to_json(m: &Matrix) -> String {
    to_json(&MatrixJson {
        n: Some(m.rows()),
        m: m.to_rows(),
    })
}

#[derive(Serialize, Deserialize)]
struct DistanceListJson {
    #[serde(rename = "K")]
    k: usize,
    n: usize,
    distances: Vec<f64>,
}

pub fn load_distance_list(text: &str) -> Result<DistanceList> {
    let j: DistanceListJson = serde_json::from_str(text)?;
    DistanceList::new(j.k, j.n, j.distances)
}

pub fn distance_list_to_json(list: &DistanceList) -> String {
    to_json(&DistanceListJson {
        k: list.k(),
        n: list.n(),
        distances: list.values().to_vec(),
    })
}
