//! Line-delimited JSON records for traced runs.

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::graph::Edge;
use crate::scalar::Scalar;
use crate::shadow::TraceEvent;
use crate::verifier::AllocationCheck;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: u64,
    pub v: u64,
    pub w: f64,
}

impl<T: Scalar> From<&Edge<T>> for EdgeRecord {
    fn from(e: &Edge<T>) -> Self {
        EdgeRecord {
            u: e.u().0,
            v: e.v().0,
            w: e.weight().to_f64_lossy(),
        }
    }
}

fn records<T: Scalar>(edges: &[Edge<T>]) -> Vec<EdgeRecord> {
    edges.iter().map(EdgeRecord::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub edges: Vec<EdgeRecord>,
    pub r: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    #[serde(rename = "A")]
    pub chosen: Vec<EdgeRecord>,
    pub removed: Vec<EdgeRecord>,
    pub r: f64,
    pub inserted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifierRecord {
    pub feasible: bool,
    /// Allocation value per covered vertex, as exact `p/q` strings.
    pub witness: Option<BTreeMap<u64, String>>,
}

impl<T: Scalar> From<&AllocationCheck<T>> for VerifierRecord {
    fn from(check: &AllocationCheck<T>) -> Self {
        VerifierRecord {
            feasible: check.feasible,
            witness: check
                .witness
                .as_ref()
                .map(|w| w.iter().map(|(v, f)| (v.0, f.to_string())).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub index: usize,
    pub input: EdgeRecord,
    /// Role name (`y1y2`, `g1y1`, ...) to edge; absent roles map to `null`.
    #[serde(rename = "S")]
    pub neighborhood: BTreeMap<String, Option<EdgeRecord>>,
    pub candidates: Vec<CandidateRecord>,
    pub decision: DecisionRecord,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verifier: Option<VerifierRecord>,
}

impl TraceRecord {
    pub fn from_event<T: Scalar>(event: &TraceEvent<T>, check: Option<&AllocationCheck<T>>) -> Self {
        TraceRecord {
            index: event.index,
            input: EdgeRecord::from(&event.input),
            neighborhood: event
                .neighborhood
                .roles()
                .iter()
                .map(|(role, e)| (role.name().to_string(), e.as_ref().map(EdgeRecord::from)))
                .collect(),
            candidates: event
                .candidates
                .iter()
                .map(|c| CandidateRecord {
                    edges: records(&c.edges),
                    r: c.gain.to_f64_lossy(),
                })
                .collect(),
            decision: DecisionRecord {
                chosen: records(&event.decision.chosen),
                removed: records(&event.decision.removed),
                r: event.decision.gain.to_f64_lossy(),
                inserted: event.decision.inserted,
            },
            verifier: check.map(VerifierRecord::from),
        }
    }
}

/// Writes one JSON object per line.
pub fn write_trace(out: &mut impl Write, records: &[TraceRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut *out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace(text: &str) -> Result<Vec<TraceRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
