use crate::graphspace::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(VertexId),
    #[error("edge {edge} references vertex {vertex}, but the graph has {vertices} vertices")]
    DanglingEdge { edge: EdgeId, vertex: usize, vertices: usize },
    #[error("edge ids must be dense and ascending: position {position} holds id {id}")]
    BadEdgeId { position: usize, id: usize },
    #[error("base point {0} is not a vertex of the graph")]
    BadBasePoint(VertexId),
    #[error("path segments do not concatenate at step {step}")]
    NonConcatenable { step: usize },
    #[error("arrows are not composable: source {source_vertex} does not match range {range_vertex}")]
    NotComposable { source_vertex: usize, range_vertex: usize },
    #[error("group action is not compatible: {0}")]
    IncompatibleAction(String),
    #[error("bibundle is invalid: {0}")]
    BibundleInvalid(String),
    #[error("function is not supported in the ambient set of the measure: {0}")]
    AmbientMismatch(String),
    #[error("measure is not fully supported: {0}")]
    NotFullySupported(String),
    #[error("map is not invertible: {0}")]
    NotInvertible(String),
    #[error("translator has range {got}, expected {expected}")]
    BadTranslator { got: VertexId, expected: VertexId },
    #[error("not a cutoff function: {0}")]
    NotCutoff(String),
    #[error("transversal measure is not deck-invariant: {0}")]
    NotInvariant(String),
    #[error("haar system has provenance {0}, a base measure is required")]
    ProvenanceMismatch(String),
    #[error("invalid section: {0}")]
    BadSection(String),
}

impl Error {
    /// Variant name, used as a stable tag in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyGraph => "EmptyGraph",
            Error::Disconnected(_) => "Disconnected",
            Error::DanglingEdge { .. } => "DanglingEdge",
            Error::BadEdgeId { .. } => "BadEdgeId",
            Error::BadBasePoint(_) => "BadBasePoint",
            Error::NonConcatenable { .. } => "NonConcatenable",
            Error::NotComposable { .. } => "NotComposable",
            Error::IncompatibleAction(_) => "IncompatibleAction",
            Error::BibundleInvalid(_) => "BibundleInvalid",
            Error::AmbientMismatch(_) => "AmbientMismatch",
            Error::NotFullySupported(_) => "NotFullySupported",
            Error::NotInvertible(_) => "NotInvertible",
            Error::BadTranslator { .. } => "BadTranslator",
            Error::NotCutoff(_) => "NotCutoff",
            Error::NotInvariant(_) => "NotInvariant",
            Error::ProvenanceMismatch(_) => "ProvenanceMismatch",
            Error::BadSection(_) => "BadSection",
        }
    }
}
