//! The JSON map document and point encoding.
//!
//! ```json
//! { "branches": [{"attach": "0", "length": "1"}],
//!   "tr": [{"branch": 0, "upto": "0"}],
//!   "line": [["0", {"R": "1/3"}], ["1", {"R": "4/3"}]],
//!   "branch_maps": [[["0", {"R": "1/3"}], ["1", {"R": "4/3"}]]] }
//! ```
//!
//! Points are `{"R": "x"}` or `{"B": [branch, "t", copy]}`; rationals are
//! strings.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pl_map::{ControlPoint, MapSpec};
use crate::rational::{fmt_rational, parse_rational};
use crate::space::{BranchShape, Point};

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    #[serde(default)]
    branches: Vec<BranchDoc>,
    #[serde(default)]
    tr: Vec<TrDoc>,
    line: Vec<(String, PointDoc)>,
    #[serde(default)]
    branch_maps: Vec<Vec<(String, PointDoc)>>,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct BranchDoc {
    attach: String,
    length: String,
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct TrDoc {
    branch: usize,
    upto: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub enum PointDoc {
    R(String),
    B(usize, String, i64),
}

impl PointDoc {
    pub fn to_point(&self) -> Result<Point> {
        Ok(match self {
            PointDoc::R(x) => Point::Line(parse_rational(x)?),
            PointDoc::B(i, t, m) => Point::Branch { branch: *i, t: parse_rational(t)?, copy: *m },
        })
    }
}

pub fn parse_map(text: &str) -> Result<MapSpec> {
    let doc: MapDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let cps = |v: &[(String, PointDoc)]| -> Result<Vec<ControlPoint>> {
        v.iter().map(|(at, p)| Ok(ControlPoint { at: parse_rational(at)?, value: p.to_point()? })).collect()
    };
    Ok(MapSpec {
        branches: doc
            .branches
            .iter()
            .map(|b| Ok(BranchShape { attach: parse_rational(&b.attach)?, length: parse_rational(&b.length)? }))
            .collect::<Result<_>>()?,
        tr: doc.tr.iter().map(|t| Ok((t.branch, parse_rational(&t.upto)?))).collect::<Result<_>>()?,
        line: cps(&doc.line)?,
        branch_maps: doc.branch_maps.iter().map(|b| cps(b)).collect::<Result<_>>()?,
    })
}

pub fn read_map(path: impl AsRef<std::path::Path>) -> Result<MapSpec> {
    parse_map(&std::fs::read_to_string(path)?)
}

/// Parses a point given either as JSON (`{"R":"1/2"}`) or in the short forms
/// `R:1/2` and `B:0,1/3,0`.
pub fn parse_point(text: &str) -> Result<Point> {
    let text = text.trim();
    if text.starts_with('{') {
        let doc: PointDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        return doc.to_point();
    }
    if let Some(x) = text.strip_prefix("R:") {
        return Ok(Point::Line(parse_rational(x)?));
    }
    if let Some(rest) = text.strip_prefix("B:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() == 3 {
            let i = parts[0].trim().parse().map_err(|_| Error::Schema(format!("bad branch index in {text:?}")))?;
            let m = parts[2].trim().parse().map_err(|_| Error::Schema(format!("bad copy in {text:?}")))?;
            return Ok(Point::Branch { branch: i, t: parse_rational(parts[1])?, copy: m });
        }
    }
    Err(Error::Schema(format!("cannot parse point {text:?}")))
}

pub fn point_json(p: &Point) -> Value {
    match p {
        Point::Line(x) => json!({ "R": fmt_rational(x) }),
        Point::Branch { branch, t, copy } => json!({ "B": [branch, fmt_rational(t), copy] }),
    }
}
