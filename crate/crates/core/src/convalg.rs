//! The convolution `*`-algebra of finitely supported functions on `Π₁(X)`
//! and its trivialization onto matrices over the group algebra of `π₁(X, x)`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::edgepath::{self, compose, Arrow};
use crate::gpdcore::Report;
use crate::graphspace::{MultiGraph, VertexId};
use crate::haar::{HaarSystem, Provenance};
use crate::measures::{BaseMeasure, FinSuppFn};
use crate::{sampling, Error, Result, Scalar, Section};

pub type AlgebraElement<T> = FinSuppFn<Arrow, T>;

/// `(f∗g)(γ) = Σ_{η ∈ G^{r(γ)}} f(η) g(η⁻¹γ) ν(s(η))`, computed as a sum
/// over `supp f × supp g`.
pub fn convolve<T: Scalar>(
    f: &AlgebraElement<T>,
    g: &AlgebraElement<T>,
    h: &HaarSystem<Arrow, T>,
) -> Result<AlgebraElement<T>> {
    let nu = match (h.provenance(), h.base_measure()) {
        (Provenance::FromBaseMeasure, Some(nu)) => nu,
        (p, _) => return Err(Error::ProvenanceMismatch(p.to_string())),
    };
    Ok(convolve_with(f, g, nu))
}

fn convolve_with<T: Scalar>(f: &AlgebraElement<T>, g: &AlgebraElement<T>, nu: &BaseMeasure<T>) -> AlgebraElement<T> {
    let mut by_range: BTreeMap<VertexId, Vec<(&Arrow, &Complex<T>)>> = BTreeMap::new();
    for (xi, v) in g.iter() {
        by_range.entry(xi.range()).or_default().push((xi, v));
    }
    let mut out = FinSuppFn::zero();
    for (eta, fv) in f.iter() {
        let scale = fv.clone() * nu.get(eta.source()).clone();
        for &(xi, gv) in by_range.get(&eta.source()).into_iter().flatten() {
            out.add(compose(eta, xi).expect("s(η) = r(ξ)"), scale.clone() * gv.clone());
        }
    }
    out
}

/// `f*(γ) = conj f(γ⁻¹)`.
pub fn involution<T: Scalar>(f: &AlgebraElement<T>) -> AlgebraElement<T> {
    FinSuppFn::from_pairs(f.iter().map(|(g, v)| (g.inverse(), v.conj())))
}

/// `Σ_u ν(u)⁻¹ δ_{1_u}` over the given vertices; a unit for elements
/// supported on arrows with range and source among them.
pub fn local_unit<T: Scalar>(nu: &BaseMeasure<T>, vertices: impl IntoIterator<Item = VertexId>) -> AlgebraElement<T> {
    FinSuppFn::from_real(vertices.into_iter().map(|u| (Arrow::unit(u), T::one() / nu.get(u).clone())))
}

/// Dense square matrix with entries in `Complex<T>`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix<T> {
    n: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> SquareMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, entries: vec![Complex::zero(); n * n] }
    }

    pub fn unit(n: usize, row: usize, col: usize) -> Self {
        let mut m = Self::zeros(n);
        m.entries[row * n + col] = Complex::one();
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &Complex<T> {
        &self.entries[row * self.n + col]
    }

    pub fn add_at(&mut self, row: usize, col: usize, v: Complex<T>) {
        let cell = &mut self.entries[row * self.n + col];
        *cell = cell.clone() + v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn conjugate_transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.entries[(k % n) * n + k / n].conj()).collect();
        Self { n, entries }
    }
}

impl<T: Scalar> Add for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn add(self, rhs: Self) -> SquareMatrix<T> {
        let entries = self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() + b.clone()).collect();
        SquareMatrix { n: self.n, entries }
    }
}

impl<T: Scalar> Mul for &SquareMatrix<T> {
    type Output = SquareMatrix<T>;
    fn mul(self, rhs: Self) -> SquareMatrix<T> {
        let n = self.n;
        let mut out = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] =
                        out.entries[i * n + j].clone() + a.clone() * rhs.entries[k * n + j].clone();
                }
            }
        }
        out
    }
}

/// A finitely supported function from `π₁(X, x)` (loops at `x`) to `n × n`
/// matrices; zero matrices are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct MatGroupElement<T> {
    dim: usize,
    terms: BTreeMap<Arrow, SquareMatrix<T>>,
}

impl<T: Scalar> MatGroupElement<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, rho: &Arrow) -> Option<&SquareMatrix<T>> {
        self.terms.get(rho)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arrow, &SquareMatrix<T>)> {
        self.terms.iter()
    }

    pub fn add_entry(&mut self, rho: Arrow, row: usize, col: usize, v: Complex<T>) {
        let m = self.terms.entry(rho.clone()).or_insert_with(|| SquareMatrix::zeros(self.dim));
        m.add_at(row, col, v);
        if m.is_zero() {
            self.terms.remove(&rho);
        }
    }

    fn add_matrix(&mut self, rho: Arrow, m: SquareMatrix<T>) {
        let sum = match self.terms.remove(&rho) {
            Some(old) => &old + &m,
            None => m,
        };
        if !sum.is_zero() {
            self.terms.insert(rho, sum);
        }
    }

    /// Group-algebra convolution with matrix multiplication:
    /// `(A⋆B)(ρ) = Σ_{ρ₁ρ₂ = ρ} A(ρ₁) B(ρ₂)`.
    pub fn star(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (r1, a) in &self.terms {
            for (r2, b) in &other.terms {
                out.add_matrix(compose(r1, r2).expect("loops at the base point"), a * b);
            }
        }
        out
    }

    /// `A†(ρ) = A(ρ⁻¹)^*` (conjugate transpose).
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for (rho, m) in &self.terms {
            out.add_matrix(rho.inverse(), m.conjugate_transpose());
        }
        out
    }
}

/// Factors `left(u)·right(v)` applied to the `(u, v)` entry by the
/// trivialization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrivializationWeights<T> {
    /// `ν = σ²`; entries scale by `σ(u)σ(v)` and the map is `*`-preserving.
    Sigma(Vec<T>),
    /// `ν` given directly; entries scale by `ν(v)` and only
    /// multiplicativity holds.
    Nu(Vec<T>),
}

impl<T: Scalar> TrivializationWeights<T> {
    pub fn sigma(sigma: Vec<T>) -> Result<Self> {
        if let Some(u) = sigma.iter().position(|s| !s.is_positive_value()) {
            return Err(Error::NotFullySupported(format!("σ at vertex {u} is not positive")));
        }
        Ok(Self::Sigma(sigma))
    }

    pub fn nu(nu: &BaseMeasure<T>) -> Result<Self> {
        nu.require_full_support()?;
        Ok(Self::Nu(nu.weights().to_vec()))
    }

    /// The vertex measure the convolution uses.
    pub fn base_measure(&self) -> BaseMeasure<T> {
        let weights = match self {
            Self::Sigma(s) => s.iter().map(|x| x.clone() * x.clone()).collect(),
            Self::Nu(nu) => nu.clone(),
        };
        BaseMeasure::new(weights).expect("positive weights")
    }

    pub fn is_star_preserving(&self) -> bool {
        matches!(self, Self::Sigma(_))
    }

    fn factor(&self, u: VertexId, v: VertexId) -> T {
        match self {
            Self::Sigma(s) => s[u.0].clone() * s[v.0].clone(),
            Self::Nu(nu) => nu[v.0].clone(),
        }
    }

    fn len(&self) -> usize {
        match self {
            Self::Sigma(w) | Self::Nu(w) => w.len(),
        }
    }
}

/// `Φ(f)(ρ)_{u,v} = f(c_u⁻¹ ρ c_v)·w(u, v)`: each `γ` lands at
/// `ρ = c_{r(γ)} γ c_{s(γ)}⁻¹` in entry `(r(γ), s(γ))`.
pub fn trivialize<T: Scalar>(
    f: &AlgebraElement<T>,
    sec: &Section,
    weights: &TrivializationWeights<T>,
) -> MatGroupElement<T> {
    let mut out = MatGroupElement::zero(sec.len());
    for (gamma, v) in f.iter() {
        let (u, w) = (gamma.range(), gamma.source());
        let rho = compose(&compose(sec.arrow(u), gamma).expect("c_u γ"), &sec.arrow(w).inverse()).expect("c_u γ c_v⁻¹");
        out.add_entry(rho, u.0, w.0, v.clone() * weights.factor(u, w));
    }
    out
}

/// `Φ⁻¹`: the `(u, v)` entry at `ρ` goes to `γ = c_u⁻¹ ρ c_v`.
pub fn untrivialize<T: Scalar>(
    m: &MatGroupElement<T>,
    sec: &Section,
    weights: &TrivializationWeights<T>,
) -> AlgebraElement<T> {
    let mut out = FinSuppFn::zero();
    for (rho, mat) in m.iter() {
        for u in 0..mat.dim() {
            for v in 0..mat.dim() {
                let entry = mat.get(u, v);
                if entry.is_zero() {
                    continue;
                }
                let (u, v) = (VertexId(u), VertexId(v));
                let gamma = compose(&compose(&sec.arrow(u).inverse(), rho).expect("c_u⁻¹ ρ"), sec.arrow(v))
                    .expect("c_u⁻¹ ρ c_v");
                out.add(gamma, entry.clone() / weights.factor(u, v));
            }
        }
    }
    out
}

/// Checks, on seeded random elements supported in the ball of `radius`:
/// `Φ(f∗g) = Φ(f)⋆Φ(g)`, `Φ(f*) = Φ(f)†` (σ-weights only), `Φ⁻¹Φ = id`,
/// linearity, and associativity of `∗` on `triples` triples.
pub fn verify_algebra_iso<T: Scalar, R: Rng + ?Sized>(
    graph: &MultiGraph,
    sec: &Section,
    weights: &TrivializationWeights<T>,
    pairs: usize,
    triples: usize,
    radius: usize,
    rng: &mut R,
) -> Result<Vec<Report>> {
    if weights.len() != graph.vertex_count() || sec.len() != graph.vertex_count() {
        return Err(Error::AmbientMismatch("weights and section must cover every vertex".into()));
    }
    let nu = weights.base_measure();
    let ball = edgepath::enumerate_ball(graph, radius);
    let phi = |f: &AlgebraElement<T>| trivialize(f, sec, weights);

    let mut multiplicative = Report::new("algebra_multiplicative");
    let mut involutive = Report::new("algebra_involutive");
    let mut bijective = Report::new("algebra_bijective");
    let mut linear = Report::new("algebra_linear");
    for _ in 0..pairs {
        let f = sampling::function(rng, &ball, 4);
        let g = sampling::function(rng, &ball, 4);
        let fg = convolve_with(&f, &g, &nu);
        multiplicative.check(phi(&fg) == phi(&f).star(&phi(&g)), || "Φ(f∗g) ≠ Φ(f)⋆Φ(g)".into());
        if weights.is_star_preserving() {
            involutive.check(phi(&involution(&f)) == phi(&f).adjoint(), || "Φ(f*) ≠ Φ(f)†".into());
        }
        bijective.check(untrivialize(&phi(&f), sec, weights) == f, || "Φ⁻¹Φ(f) ≠ f".into());
        let c = sampling::gaussian(rng);
        let combo = f.plus(&g.scaled(&c));
        let mut expected = phi(&f);
        for (rho, m) in phi(&g).iter() {
            for u in 0..m.dim() {
                for v in 0..m.dim() {
                    expected.add_entry(rho.clone(), u, v, m.get(u, v).clone() * c.clone());
                }
            }
        }
        linear.check(phi(&combo) == expected, || "Φ is not linear".into());
    }

    let mut associative = Report::new("algebra_associative");
    for _ in 0..triples {
        let f = sampling::function(rng, &ball, 3);
        let g = sampling::function(rng, &ball, 3);
        let h = sampling::function(rng, &ball, 3);
        let left = convolve_with(&convolve_with(&f, &g, &nu), &h, &nu);
        let right = convolve_with(&f, &convolve_with(&g, &h, &nu), &nu);
        associative.check(left == right, || "(f∗g)∗h ≠ f∗(g∗h)".into());
    }

    let mut reports = vec![multiplicative];
    if weights.is_star_preserving() {
        reports.push(involutive);
    }
    reports.extend([bijective, linear, associative]);
    Ok(reports)
}

/// Uniformly picks `k` distinct arrows of the ball; used to build
/// structured samples.
pub fn sample_arrows<R: Rng + ?Sized>(graph: &MultiGraph, radius: usize, k: usize, rng: &mut R) -> Vec<Arrow> {
    let ball = edgepath::enumerate_ball(graph, radius);
    ball.choose_multiple(rng, k).cloned().collect()
}
