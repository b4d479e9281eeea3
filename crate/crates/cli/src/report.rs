//! JSON report layout. Every rational is written as a `"n/d"` string.

use pi1_haar::{rational_string, Arrow, HaarSystemQ, MultiGraph, Rational, Report, Section};
use serde::Serialize;

/// How many violation messages are echoed per check.
const ECHOED_VIOLATIONS: usize = 3;

#[derive(Serialize, Debug, Default)]
pub struct RunReport {
    pub command: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureSummary>,
    pub checks: Vec<CheckLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub section: Vec<SectionLine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group_case: Option<GroupCaseSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorSummary>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self { command, passed: true, ..Self::default() }
    }

    pub fn push_checks<'a>(&mut self, reports: impl IntoIterator<Item = &'a Report>) {
        for r in reports {
            self.passed &= r.is_clean();
            self.checks.push(CheckLine::from(r));
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is serializable");
        text.push('\n');
        text
    }
}

#[derive(Serialize, Debug)]
pub struct ConfigSummary {
    pub base: usize,
    pub radius: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mutate: Option<String>,
}

#[derive(Serialize, Debug)]
pub struct GraphSummary {
    pub vertices: usize,
    pub edges: usize,
    pub pi1_rank: usize,
    pub spanning_tree: Vec<String>,
}

impl GraphSummary {
    pub fn new(g: &MultiGraph, tree_edges: &[pi1_haar::EdgeId]) -> Self {
        Self {
            vertices: g.vertex_count(),
            edges: g.edge_count(),
            pi1_rank: pi1_haar::graphspace::pi1_rank(g),
            spanning_tree: tree_edges.iter().map(ToString::to_string).collect(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct MeasureSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<Vec<String>>,
    pub nu: Vec<String>,
}

#[derive(Serialize, Debug)]
pub struct CheckLine {
    pub name: String,
    pub violations: usize,
    pub samples: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub first_violations: Vec<String>,
}

impl From<&Report> for CheckLine {
    fn from(r: &Report) -> Self {
        Self {
            name: r.name.clone(),
            violations: r.violations.len(),
            samples: r.samples,
            first_violations: r.violations.iter().take(ECHOED_VIOLATIONS).cloned().collect(),
        }
    }
}

#[derive(Serialize, Debug)]
pub struct WeightLine {
    pub vertex: usize,
    pub arrow: String,
    pub weight: String,
}

#[derive(Serialize, Debug)]
pub struct SystemSummary {
    pub provenance: String,
    pub radius: usize,
    pub ball_weights: Vec<WeightLine>,
}

impl SystemSummary {
    /// Weights of `h` on the ball, grouped by the vertex `w` with `ξ ∈ G^w`.
    pub fn new(h: &HaarSystemQ, ball: &[Arrow], radius: usize) -> Self {
        let mut ball: Vec<&Arrow> = ball.iter().collect();
        ball.sort_by(|a, b| (a.range(), *a).cmp(&(b.range(), *b)));
        let ball_weights = ball
            .into_iter()
            .map(|a| WeightLine { vertex: a.range().0, arrow: a.to_string(), weight: rational_string(&h.weight(a)) })
            .collect();
        Self { provenance: h.provenance().to_string(), radius, ball_weights }
    }
}

#[derive(Serialize, Debug)]
pub struct SectionLine {
    pub vertex: usize,
    pub arrow: String,
}

pub fn section_lines(sec: &Section) -> Vec<SectionLine> {
    sec.arrows().iter().enumerate().map(|(u, c)| SectionLine { vertex: u, arrow: c.to_string() }).collect()
}

#[derive(Serialize, Debug)]
pub struct GroupCaseSummary {
    pub n: usize,
    pub passed: bool,
}

#[derive(Serialize, Debug)]
pub struct ErrorSummary {
    pub kind: String,
    pub message: String,
}

pub fn rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(rational_string).collect()
}
