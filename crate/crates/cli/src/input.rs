//! Graph and measure files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use pi1_haar::convalg::TrivializationWeights;
use pi1_haar::graphspace::validate_graph;
use pi1_haar::{parse_rational, BaseMeasureQ, MultiGraph, Rational, TrivializationWeightsQ, VertexId};
use serde::Deserialize;

use crate::CliError;

/// Reads a graph in the `{"vertices": N, "edges": [{"id", "src", "dst"}]}`
/// form. Parse failures are usage errors, structural ones are domain errors.
pub fn read_graph(path: &Path) -> Result<MultiGraph, CliError> {
    let text = read(path)?;
    let graph: MultiGraph = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    validate_graph(&graph)?;
    Ok(graph)
}

pub(crate) fn read_unvalidated_graph(path: &Path) -> Result<MultiGraph, CliError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| parse_error(path, e))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureFile {
    base_point: Option<usize>,
    sigma: Option<BTreeMap<String, String>>,
    nu: Option<BTreeMap<String, String>>,
}

/// Weights read from a measure file: either the square roots `σ` or `ν`
/// itself. Vertices missing from the file get weight zero.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureInput {
    Sigma(Vec<Rational>),
    Nu(Vec<Rational>),
}

impl MeasureInput {
    pub fn uniform(vertices: usize) -> Self {
        MeasureInput::Nu(BaseMeasureQ::uniform(vertices).weights().to_vec())
    }

    /// `ν`, which must be strictly positive.
    pub fn base_measure(&self) -> Result<BaseMeasureQ, CliError> {
        Ok(self.weights()?.base_measure())
    }

    pub fn weights(&self) -> Result<TrivializationWeightsQ, CliError> {
        let weights = match self {
            MeasureInput::Sigma(s) => TrivializationWeights::sigma(s.clone())?,
            MeasureInput::Nu(n) => TrivializationWeights::nu(&BaseMeasureQ::new(n.clone())?)?,
        };
        Ok(weights)
    }
}

/// The measure file and its optional base point.
pub fn read_measure(path: &Path, vertices: usize) -> Result<(MeasureInput, Option<VertexId>), CliError> {
    let text = read(path)?;
    let file: MeasureFile = serde_json::from_str(&text).map_err(|e| parse_error(path, e))?;
    let (table, is_sigma) = match (file.sigma, file.nu) {
        (Some(s), None) => (s, true),
        (None, Some(n)) => (n, false),
        _ => {
            return Err(CliError::Parse {
                path: path.to_owned(),
                message: "exactly one of \"sigma\" and \"nu\" is required".into(),
            })
        }
    };
    let mut weights = vec![Rational::from_integer(0.into()); vertices];
    for (key, value) in table {
        let vertex = key
            .parse::<usize>()
            .ok()
            .filter(|&v| v < vertices)
            .ok_or_else(|| CliError::Parse { path: path.to_owned(), message: format!("no vertex {key:?}") })?;
        weights[vertex] = parse_rational(&value)
            .ok_or_else(|| CliError::Parse { path: path.to_owned(), message: format!("bad rational {value:?}") })?;
    }
    let input = if is_sigma { MeasureInput::Sigma(weights) } else { MeasureInput::Nu(weights) };
    Ok((input, file.base_point.map(VertexId)))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn parse_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse { path: path.to_owned(), message: e.to_string() }
}
