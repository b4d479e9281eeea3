//! Haar systems on `Π₁(X)` and on transformation groupoids.
//!
//! Three independent constructions are provided for `Π₁(X)`:
//! from a measure `ν` on the vertices (double sum over base and fiber),
//! from a deck-invariant measure `λ` on a transversal (translation by a
//! section), and the closed form `γ ↦ ν(s(γ))` used as an oracle.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cover::{DeckAction, Section, Transversal};
use crate::edgepath::{self, compose, Arrow, OrientedEdge};
use crate::gpdcore::{
    transformation_groupoid, FundamentalGroupoid, GroupAction, GroupoidView, Report, TransformationArrow,
    TransformationGroupoid,
};
use crate::graphspace::{EdgeId, MultiGraph, VertexId};
use crate::measures::{translate_measure, Ambient, BaseMeasure, DiscreteMeasure, FinSuppFn};
use crate::{sampling, Error, Result, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    FromBaseMeasure,
    FromTransversal,
    Transformation,
    DirectOracle,
    Pushforward,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::FromBaseMeasure => "from_base_measure",
            Provenance::FromTransversal => "from_transversal",
            Provenance::Transformation => "transformation",
            Provenance::DirectOracle => "direct_oracle",
            Provenance::Pushforward => "pushforward",
        })
    }
}

/// A family `{λ^w}` of measures, `λ^w` living on `r⁻¹(w)`. Since the fibers
/// `r⁻¹(w)` are disjoint, the family is stored as one weight function on
/// arrows.
pub struct HaarSystem<A, T> {
    provenance: Provenance,
    weight: Arc<dyn Fn(&A) -> T + Send + Sync>,
    base: Option<BaseMeasure<T>>,
}

impl<A, T: Clone> Clone for HaarSystem<A, T> {
    fn clone(&self) -> Self {
        Self { provenance: self.provenance, weight: Arc::clone(&self.weight), base: self.base.clone() }
    }
}

impl<A, T: fmt::Debug> fmt::Debug for HaarSystem<A, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HaarSystem").field("provenance", &self.provenance).field("base", &self.base).finish()
    }
}

impl<A: PartialEq + Send + Sync + 'static, T: Scalar> HaarSystem<A, T> {
    pub fn new(provenance: Provenance, weight: impl Fn(&A) -> T + Send + Sync + 'static) -> Self {
        Self { provenance, weight: Arc::new(weight), base: None }
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `λ^{r(a)}({a})`.
    pub fn weight(&self, a: &A) -> T {
        (self.weight)(a)
    }

    /// The vertex measure this system was built from, if any.
    pub fn base_measure(&self) -> Option<&BaseMeasure<T>> {
        self.base.as_ref()
    }

    pub fn scaled(&self, c: T) -> Self {
        let inner = Arc::clone(&self.weight);
        let base = self.base.as_ref().map(|b| b.scaled(&c));
        Self { provenance: self.provenance, weight: Arc::new(move |a| inner(a) * c.clone()), base }
    }

    /// Replaces one weight. Mutation hook for testing the verifiers.
    pub fn with_override(&self, at: A, value: T) -> Self {
        let inner = Arc::clone(&self.weight);
        Self {
            provenance: self.provenance,
            weight: Arc::new(move |a| if *a == at { value.clone() } else { inner(a) }),
            base: self.base.clone(),
        }
    }

    fn with_base(mut self, base: BaseMeasure<T>) -> Self {
        self.base = Some(base);
        self
    }
}

impl<T: Scalar> HaarSystem<Arrow, T> {
    /// `λ^w` as a measure on `G^w`.
    pub fn member(&self, w: VertexId) -> DiscreteMeasure<Arrow, T> {
        let weight = Arc::clone(&self.weight);
        DiscreteMeasure::new(Ambient::Transversal(w), move |a: &Arrow| weight(a))
    }

    /// `∫ f dλ^w`.
    pub fn integrate(&self, w: VertexId, f: &FinSuppFn<Arrow, T>) -> Result<Complex<T>> {
        self.member(w).integrate(f)
    }
}

/// `λ^w(f) = Σ_u ν(u) Σ_{γ ∈ G^x_u} f(η⁻¹γ)` with `η = c_w`.
pub fn haar_from_base_measure<T: Scalar>(
    nu: &BaseMeasure<T>,
    t: &Transversal<'_>,
    sec: &Section,
) -> Result<HaarSystem<Arrow, T>> {
    nu.require_full_support()?;
    check_section(t, sec)?;
    let weights = nu.weights().to_vec();
    let etas = sec.arrows().to_vec();
    let n = weights.len();
    let system = HaarSystem::new(Provenance::FromBaseMeasure, move |xi: &Arrow| {
        // the only γ ∈ G^x with η⁻¹γ = ξ is ηξ; collect its term in the sum over u
        let gamma = compose(&etas[xi.range().0], xi).expect("η ∈ G^x_{r(ξ)}");
        (0..n).filter(|&u| gamma.source() == VertexId(u)).fold(T::zero(), |acc, u| acc + weights[u].clone())
    });
    Ok(system.with_base(nu.clone()))
}

/// The same double sum evaluated against a function on `G^w`, summing over
/// vertices `u` and then over the finite set `η · supp f ∩ G^x_u`.
pub fn integrate_via_base_measure<T: Scalar>(
    nu: &BaseMeasure<T>,
    sec: &Section,
    w: VertexId,
    f: &FinSuppFn<Arrow, T>,
) -> Result<Complex<T>> {
    let eta = sec.arrow(w);
    let translated = f.try_push_keys(|xi| {
        if xi.range() != w {
            return Err(Error::AmbientMismatch(format!("{xi} is not in G^{w}")));
        }
        compose(eta, xi)
    })?;
    let mut total = Complex::zero();
    for (u, nu_u) in nu.weights().iter().enumerate() {
        let inner = translated
            .iter()
            .filter(|(gamma, _)| gamma.source() == VertexId(u))
            .fold(Complex::zero(), |acc, (_, v)| acc + v.clone());
        total = total + inner * nu_u.clone();
    }
    Ok(total)
}

fn check_section(t: &Transversal<'_>, sec: &Section) -> Result<()> {
    if sec.base() != t.base() || sec.len() != t.graph().vertex_count() {
        return Err(Error::BadSection(format!("section does not cover G^{}", t.base())));
    }
    Ok(())
}

/// `λ^w = ℓ_{c_w⁻¹} λ`. `λ` must be positive and invariant under the deck
/// generators on the ball of `radius`.
pub fn haar_from_transversal<T: Scalar>(
    lam: &DiscreteMeasure<Arrow, T>,
    t: &Transversal<'_>,
    sec: &Section,
    radius: usize,
) -> Result<HaarSystem<Arrow, T>> {
    check_section(t, sec)?;
    if lam.ambient() != Ambient::Transversal(t.base()) {
        return Err(Error::AmbientMismatch(format!("{:?} is not G^{}", lam.ambient(), t.base())));
    }
    let deck = DeckAction::new(t, &t.tree())?;
    let ball = t.ball(radius);
    for y in &ball {
        if !lam.weight(y).is_positive_value() {
            return Err(Error::NotFullySupported(format!("weight at {y} is not positive")));
        }
        for rho in deck.symmetric_generators() {
            let moved = deck.act(&rho, y)?;
            if lam.weight(&moved) != lam.weight(y) {
                return Err(Error::NotInvariant(format!("λ({moved}) ≠ λ({y})")));
            }
        }
    }
    let members = sec.arrows().iter().map(|c| translate_measure(c, lam)).collect::<Result<Vec<_>>>()?;
    Ok(HaarSystem::new(Provenance::FromTransversal, move |xi: &Arrow| members[xi.range().0].weight(xi)))
}

/// `γ ↦ ν(s(γ))`. `ν` should be positive.
pub fn direct_weight_oracle<T: Scalar>(nu: &BaseMeasure<T>) -> HaarSystem<Arrow, T> {
    let weights = nu.weights().to_vec();
    HaarSystem::new(Provenance::DirectOracle, move |g: &Arrow| weights[g.source().0].clone()).with_base(nu.clone())
}

/// `λ^x`, a deck-invariant fully supported measure on `G^x`.
pub fn transversal_from_haar<T: Scalar>(h: &HaarSystem<Arrow, T>, x: VertexId) -> DiscreteMeasure<Arrow, T> {
    h.member(x)
}

/// `δ_s × counting` on the arrows `(s, g)` over each point.
pub fn transformation_haar<T: Scalar>(_tg: &TransformationGroupoid) -> HaarSystem<TransformationArrow, T> {
    HaarSystem::new(Provenance::Transformation, |_: &TransformationArrow| T::one())
}

/// `δ_x × ν` on the pair groupoid: the arrow `(x, y)` weighs `ν(y)`.
pub fn pair_haar<T: Scalar>(nu: &BaseMeasure<T>) -> HaarSystem<(usize, usize), T> {
    let weights = nu.weights().to_vec();
    HaarSystem::new(Provenance::Transformation, move |a: &(usize, usize)| weights[a.1].clone())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HaarVerification {
    pub support: Report,
    pub invariance: Report,
}

impl HaarVerification {
    pub fn is_clean(&self) -> bool {
        self.support.is_clean() && self.invariance.is_clean()
    }
}

/// Full support on the ball, and `λ^{s(ξ)}(f∘ℓ_ξ) = λ^{r(ξ)}(f)`.
///
/// Invariance is checked pointwise for every `ξ` of size at most one against
/// every ball arrow, then on `trials` random pairs `(ξ, f)` drawn from the ball.
pub fn verify_haar<G, T, R>(
    g: &G,
    h: &HaarSystem<G::Arrow, T>,
    radius: usize,
    trials: usize,
    rng: &mut R,
) -> HaarVerification
where
    G: GroupoidView,
    G::Arrow: Send + Sync + 'static,
    T: Scalar,
    R: Rng + ?Sized,
{
    let mut support = Report::new("haar_support");
    let mut invariance = Report::new("haar_invariance");
    let ball = g.ball(radius);
    for a in &ball {
        support.check(h.weight(a).is_positive_value(), || format!("weight of {a:?} is not positive"));
    }

    // f∘ℓ_ξ (γ) = f(ξγ): the value at δ moves to ξ⁻¹δ
    let compare = |xi: &G::Arrow, f: &FinSuppFn<G::Arrow, T>, invariance: &mut Report| {
        let xi_inv = g.inverse(xi);
        let mut lhs: Complex<T> = Complex::zero();
        let mut rhs: Complex<T> = Complex::zero();
        for (delta, v) in f.iter() {
            match g.compose(&xi_inv, delta) {
                Some(moved) => lhs = lhs + v.clone() * h.weight(&moved),
                None => {
                    invariance.fail(format!("{delta:?} is not in the fiber over r({xi:?})"));
                    return;
                }
            }
            rhs = rhs + v.clone() * h.weight(delta);
        }
        invariance.check(lhs == rhs, || format!("translation by {xi:?} changes the integral"));
    };

    for xi in g.ball(1) {
        let r = g.range(&xi);
        for delta in ball.iter().filter(|d| g.range(d) == r) {
            compare(&xi, &FinSuppFn::indicator([delta.clone()]), &mut invariance);
        }
    }
    for _ in 0..trials {
        let Some(xi) = ball.choose(rng) else { break };
        let r = g.range(xi);
        let candidates: Vec<_> = ball.iter().filter(|d| g.range(d) == r).cloned().collect();
        let f = sampling::function(rng, &candidates, 4);
        compare(xi, &f, &mut invariance);
    }
    HaarVerification { support, invariance }
}

/// Systems induced by two sections agree on every ball arrow.
pub fn verify_section_independence<T: Scalar>(
    nu: &BaseMeasure<T>,
    t: &Transversal<'_>,
    first: &Section,
    second: &Section,
    radius: usize,
) -> Result<Report> {
    let a = haar_from_base_measure(nu, t, first)?;
    let b = haar_from_base_measure(nu, t, second)?;
    let mut report = Report::new("section_independence");
    for gamma in edgepath::enumerate_ball(t.graph(), radius) {
        report.check(a.weight(&gamma) == b.weight(&gamma), || format!("systems differ at {gamma}"));
    }
    Ok(report)
}

/// Net number of forward steps of an arrow in the standard cycle.
fn winding(gamma: &Arrow) -> i64 {
    gamma.word().iter().map(|s| if s.forward { 1 } else { -1 }).sum()
}

/// The isomorphism `Π₁(C_n) ≅ (ℤ/n) ⋊ ℤ` for the standard cycle, sending `γ`
/// to `(r(γ), −winding(γ))`.
#[derive(Clone, Debug)]
pub struct CycleIsomorphism {
    graph: MultiGraph,
    groupoid: TransformationGroupoid,
}

impl CycleIsomorphism {
    pub fn new(n: usize) -> Self {
        let groupoid = transformation_groupoid(GroupAction::rotation(n)).expect("rotation is an action");
        Self { graph: MultiGraph::cycle(n), groupoid }
    }

    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn groupoid(&self) -> &TransformationGroupoid {
        &self.groupoid
    }

    pub fn forward(&self, gamma: &Arrow) -> TransformationArrow {
        let z = self.groupoid.action().group();
        TransformationArrow { point: gamma.range().0, element: z.power(0, -winding(gamma)) }
    }

    pub fn backward(&self, a: &TransformationArrow) -> Arrow {
        let n = self.graph.vertex_count() as i64;
        let k = self.groupoid.action().group().exponent_sum(&a.element);
        let start = (a.point as i64 + k).rem_euclid(n);
        // the arrow runs from x + k to x, i.e. -k steps forward
        let steps: Vec<OrientedEdge> = (0..k.unsigned_abs())
            .map(|i| {
                let i = i as i64;
                if k < 0 {
                    let at = (start + i).rem_euclid(n);
                    OrientedEdge { edge: EdgeId(at as usize), forward: true }
                } else {
                    let at = (start - i).rem_euclid(n);
                    OrientedEdge { edge: EdgeId((at - 1).rem_euclid(n) as usize), forward: false }
                }
            })
            .collect();
        Arrow::from_traversal(&self.graph, VertexId(start as usize), &steps).expect("steps follow the cycle")
    }
}

#[derive(Clone, Debug, Default)]
pub struct GroupCaseVerification {
    pub n: usize,
    pub reports: Vec<Report>,
}

impl GroupCaseVerification {
    pub fn is_clean(&self) -> bool {
        self.reports.iter().all(Report::is_clean)
    }
}

/// Transports the Haar system of `Π₁(C_n)` built from `ν` along the
/// isomorphism with `(ℤ/n) ⋊ ℤ` and compares it with `ν(s(a))` times the
/// transformation Haar system (for uniform `ν`: `1/n` times).
pub fn verify_group_case<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    nu: &BaseMeasure<T>,
    radius: usize,
    trials: usize,
    rng: &mut R,
) -> Result<GroupCaseVerification> {
    if n == 0 || nu.len() != n {
        return Err(Error::AmbientMismatch(format!("need a measure on {n} vertices")));
    }
    let iso = CycleIsomorphism::new(n);
    let pi1 = FundamentalGroupoid::new(iso.graph());
    let tg = iso.groupoid();
    let pi1_ball = pi1.ball(radius);
    let tg_ball = tg.ball(radius);

    let mut bijection = Report::new("group_case_bijection");
    let mut images: Vec<TransformationArrow> = pi1_ball.iter().map(|g| iso.forward(g)).collect();
    for (gamma, image) in pi1_ball.iter().zip(&images) {
        bijection.check(iso.backward(image) == *gamma, || format!("{gamma} does not round-trip"));
        bijection.check(tg.range(image) == gamma.range().0 && tg.source(image) == gamma.source().0, || {
            format!("endpoints of {gamma} are not preserved")
        });
    }
    images.sort();
    bijection.check(images == tg_ball, || "image of the ball is not the transformation ball".into());

    let mut composition = Report::new("group_case_composition");
    for gamma in &pi1_ball {
        for eta in pi1_ball.iter().filter(|e| e.range() == gamma.source()) {
            let product = compose(gamma, eta)?;
            let expected = tg.compose(&iso.forward(gamma), &iso.forward(eta));
            composition.check(expected == Some(iso.forward(&product)), || {
                format!("image of {gamma}·{eta} is not the product of images")
            });
        }
    }

    let t = Transversal::new(iso.graph(), VertexId(0))?;
    let sec = crate::cover::section(&t, &t.tree())?;
    let h = haar_from_base_measure(nu, &t, &sec)?;
    let pushed = {
        let (h, iso) = (h.clone(), iso.clone());
        HaarSystem::new(Provenance::Pushforward, move |a: &TransformationArrow| h.weight(&iso.backward(a)))
    };
    let reference = transformation_haar::<T>(tg);
    let mut pushforward = Report::new("group_case_pushforward");
    for a in &tg_ball {
        let expected = nu.get(VertexId(tg.source(a))).clone() * reference.weight(a);
        pushforward.check(pushed.weight(a) == expected, || format!("pushforward weight differs at {a:?}"));
    }

    let pi1_check = verify_haar(&pi1, &h, radius, trials, rng);
    let tg_check = verify_haar(tg, &reference, radius, trials, rng);
    let mut reports = vec![bijection, composition, pushforward];
    for (prefix, v) in [("group_case_pi1", pi1_check), ("group_case_transformation", tg_check)] {
        let HaarVerification { mut support, mut invariance } = v;
        support.name = format!("{prefix}_support");
        invariance.name = format!("{prefix}_invariance");
        reports.push(support);
        reports.push(invariance);
    }
    Ok(GroupCaseVerification { n, reports })
}
