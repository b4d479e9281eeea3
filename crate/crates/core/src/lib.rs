//! Haar systems on the fundamental groupoid of a finite connected multigraph.
//!
//! A finite graph `X` is a space for which every covering-space hypothesis
//! holds and whose fundamental group is free, so the fundamental groupoid
//! `Π₁(X)` is a discrete groupoid of reduced edge-words. This crate builds
//! the measure families, Haar systems, quotient-groupoid reconstruction and
//! convolution `*`-algebra of `Π₁(X)` over an exact scalar field.
//!
//! All numeric code is generic over [`Scalar`]; the aliases at the crate root
//! fix the scalar to arbitrary-precision rationals, which is what the
//! verification routines are meant to run with.

pub mod convalg;
pub mod cover;
pub mod edgepath;
mod error;
pub mod gpdcore;
pub mod graphspace;
pub mod haar;
pub mod measures;
pub mod sampling;
mod scalar;

pub use error::{Error, Result};
pub use scalar::{parse_rational, rational_string, Scalar};

pub use cover::{DeckAction, Section, Transversal};
pub use edgepath::{Arrow, OrientedEdge};
pub use gpdcore::{GroupoidView, Report};
pub use graphspace::{EdgeId, MultiGraph, SpanningTree, VertexId};

/// Exact rational numbers with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;
/// Gaussian rationals `a + b i` with `a, b` rational.
pub type Gaussian = num_complex::Complex<Rational>;

pub type BaseMeasureQ = measures::BaseMeasure<Rational>;
pub type DiscreteMeasureQ<K> = measures::DiscreteMeasure<K, Rational>;
pub type FinSuppFnQ<K> = measures::FinSuppFn<K, Rational>;
pub type MeasureFamilyQ = measures::MeasureFamily<Rational>;
pub type CutoffFnQ = measures::CutoffFn<Rational>;
pub type HaarSystemQ = haar::HaarSystem<Arrow, Rational>;
pub type AlgebraElementQ = convalg::AlgebraElement<Rational>;
pub type MatGroupElementQ = convalg::MatGroupElement<Rational>;
pub type TrivializationWeightsQ = convalg::TrivializationWeights<Rational>;
