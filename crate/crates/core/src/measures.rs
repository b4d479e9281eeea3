//! Measures on discrete sets and families of measures along the covering map.
//!
//! Fibers of the covering map are infinite, so a measure is a weight
//! function rather than a table. It is only ever paired with finitely
//! supported functions, which turns every integral into a finite sum.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::cover::{DeckAction, Section, Transversal};
use crate::edgepath::{compose, Arrow};
use crate::gpdcore::Report;
use crate::graphspace::VertexId;
use crate::{Error, Result, Scalar};

/// The set a measure lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// The `n` vertices of the graph.
    Vertices(usize),
    /// Arrows with range `x`.
    Transversal(VertexId),
    /// All arrows of a groupoid.
    Arrows,
}

pub trait AmbientPoint {
    fn lies_in(&self, ambient: &Ambient) -> bool;
}

impl AmbientPoint for VertexId {
    fn lies_in(&self, ambient: &Ambient) -> bool {
        matches!(ambient, Ambient::Vertices(n) if self.0 < *n)
    }
}

impl AmbientPoint for Arrow {
    fn lies_in(&self, ambient: &Ambient) -> bool {
        match ambient {
            Ambient::Transversal(x) => self.range() == *x,
            Ambient::Arrows => true,
            Ambient::Vertices(_) => false,
        }
    }
}

impl AmbientPoint for crate::gpdcore::TransformationArrow {
    fn lies_in(&self, ambient: &Ambient) -> bool {
        matches!(ambient, Ambient::Arrows)
    }
}

/// A finitely supported function with values in `Complex<T>`. Zero values
/// are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct FinSuppFn<K: Ord, T> {
    values: BTreeMap<K, Complex<T>>,
}

impl<K: Ord + Clone, T: Scalar> Default for FinSuppFn<K, T> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<K: Ord + Clone, T: Scalar> FinSuppFn<K, T> {
    pub fn zero() -> Self {
        Self { values: BTreeMap::new() }
    }

    pub fn indicator<I: IntoIterator<Item = K>>(keys: I) -> Self {
        let mut f = Self::zero();
        for k in keys {
            f.set(k, Complex::one());
        }
        f
    }

    pub fn from_pairs<I: IntoIterator<Item = (K, Complex<T>)>>(pairs: I) -> Self {
        let mut f = Self::zero();
        for (k, v) in pairs {
            f.add(k, v);
        }
        f
    }

    pub fn from_real<I: IntoIterator<Item = (K, T)>>(pairs: I) -> Self {
        Self::from_pairs(pairs.into_iter().map(|(k, v)| (k, Complex::new(v, T::zero()))))
    }

    pub fn get(&self, k: &K) -> Complex<T> {
        self.values.get(k).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn set(&mut self, k: K, v: Complex<T>) {
        if v.is_zero() {
            self.values.remove(&k);
        } else {
            self.values.insert(k, v);
        }
    }

    pub fn add(&mut self, k: K, v: Complex<T>) {
        let sum = self.get(&k) + v;
        self.set(k, sum);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Complex<T>)> {
        self.values.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &K> {
        self.values.keys()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: &Complex<T>) -> Self {
        Self::from_pairs(self.values.iter().map(|(k, v)| (k.clone(), v.clone() * c.clone())))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.values {
            out.add(k.clone(), v.clone());
        }
        out
    }

    /// `f ∘ φ⁻¹` for an injective `φ`: the value at `k` moves to `φ(k)`.
    pub fn push_keys<K2: Ord + Clone>(&self, mut phi: impl FnMut(&K) -> K2) -> FinSuppFn<K2, T> {
        FinSuppFn::from_pairs(self.values.iter().map(|(k, v)| (phi(k), v.clone())))
    }

    pub fn try_push_keys<K2: Ord + Clone>(&self, mut phi: impl FnMut(&K) -> Result<K2>) -> Result<FinSuppFn<K2, T>> {
        let pairs = self.values.iter().map(|(k, v)| Ok((phi(k)?, v.clone()))).collect::<Result<Vec<_>>>()?;
        Ok(FinSuppFn::from_pairs(pairs))
    }
}

/// Nonnegative weights on a discrete set.
pub struct DiscreteMeasure<K, T> {
    ambient: Ambient,
    weight: Arc<dyn Fn(&K) -> T + Send + Sync>,
}

impl<K, T> Clone for DiscreteMeasure<K, T> {
    fn clone(&self) -> Self {
        Self { ambient: self.ambient, weight: Arc::clone(&self.weight) }
    }
}

impl<K, T> fmt::Debug for DiscreteMeasure<K, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteMeasure").field("ambient", &self.ambient).finish_non_exhaustive()
    }
}

impl<K: AmbientPoint + Ord + Clone + PartialEq + fmt::Debug + 'static, T: Scalar> DiscreteMeasure<K, T> {
    pub fn new(ambient: Ambient, weight: impl Fn(&K) -> T + Send + Sync + 'static) -> Self {
        Self { ambient, weight: Arc::new(weight) }
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Weight of a point; points outside the ambient set weigh zero.
    pub fn weight(&self, k: &K) -> T {
        if k.lies_in(&self.ambient) {
            (self.weight)(k)
        } else {
            T::zero()
        }
    }

    /// `∫ f dm = Σ f(k)·m(k)` over the support of `f`.
    pub fn integrate(&self, f: &FinSuppFn<K, T>) -> Result<Complex<T>> {
        let mut total = Complex::zero();
        for (k, v) in f.iter() {
            if !k.lies_in(&self.ambient) {
                return Err(Error::AmbientMismatch(format!("{k:?} is not in {:?}", self.ambient)));
            }
            total = total + v.clone() * (self.weight)(k);
        }
        Ok(total)
    }

    pub fn scaled(&self, c: T) -> Self {
        let inner = Arc::clone(&self.weight);
        Self { ambient: self.ambient, weight: Arc::new(move |k| inner(k) * c.clone()) }
    }

    /// Same measure with the weight at `at` replaced. Used by mutation tests.
    pub fn with_override(&self, at: K, value: T) -> Self
    where
        K: Send + Sync,
    {
        let inner = Arc::clone(&self.weight);
        Self { ambient: self.ambient, weight: Arc::new(move |k| if *k == at { value.clone() } else { inner(k) }) }
    }

    /// `φ*m` with weight `m(φ(k))`; see [`pullback`].
    fn pulled_back(&self, domain: Ambient, phi: Arc<dyn Fn(&K) -> K + Send + Sync>) -> Self {
        let inner = Arc::clone(&self.weight);
        Self { ambient: domain, weight: Arc::new(move |k| inner(&phi(k))) }
    }
}

pub fn integrate<K, T>(m: &DiscreteMeasure<K, T>, f: &FinSuppFn<K, T>) -> Result<Complex<T>>
where
    K: AmbientPoint + Ord + Clone + PartialEq + fmt::Debug + 'static,
    T: Scalar,
{
    m.integrate(f)
}

/// A measure `ν` on the vertex set, stored as a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMeasure<T> {
    weights: Vec<T>,
}

impl<T: Scalar> BaseMeasure<T> {
    /// Rejects negative weights; zero weights are allowed (but not fully supported).
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if let Some(u) = weights.iter().position(|w| w.is_negative_value()) {
            return Err(Error::NotFullySupported(format!("weight at vertex {u} is negative")));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self { weights: vec![T::ratio(1, n as i64); n] }
    }

    pub fn get(&self, u: VertexId) -> &T {
        &self.weights[u.0]
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_fully_supported(&self) -> bool {
        self.weights.iter().all(T::is_positive_value)
    }

    pub fn require_full_support(&self) -> Result<()> {
        match self.weights.iter().position(|w| !w.is_positive_value()) {
            Some(u) => Err(Error::NotFullySupported(format!("weight at vertex {u} is not positive"))),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, c: &T) -> Self {
        Self { weights: self.weights.iter().map(|w| w.clone() * c.clone()).collect() }
    }

    pub fn as_measure(&self) -> DiscreteMeasure<VertexId, T> {
        let weights = self.weights.clone();
        DiscreteMeasure::new(Ambient::Vertices(weights.len()), move |u: &VertexId| weights[u.0].clone())
    }
}

type MemberFn<T> = Arc<dyn Fn(VertexId, &Arrow) -> T + Send + Sync>;

/// A family `{μ_u}` along the covering map `s|_{G^x}`: `μ_u` lives on the
/// fiber over `u`.
pub struct MeasureFamily<T> {
    base: VertexId,
    vertices: usize,
    member: MemberFn<T>,
}

impl<T> Clone for MeasureFamily<T> {
    fn clone(&self) -> Self {
        Self { base: self.base, vertices: self.vertices, member: Arc::clone(&self.member) }
    }
}

impl<T> fmt::Debug for MeasureFamily<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasureFamily").field("base", &self.base).field("vertices", &self.vertices).finish()
    }
}

impl<T: Scalar> MeasureFamily<T> {
    /// `member(u, γ)` is only consulted for `s(γ) = u`.
    pub fn new(
        base: VertexId,
        vertices: usize,
        member: impl Fn(VertexId, &Arrow) -> T + Send + Sync + 'static,
    ) -> Self {
        Self { base, vertices, member: Arc::new(member) }
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    /// Weight of `γ` under `μ_{s(γ)}`.
    pub fn fiber_weight(&self, gamma: &Arrow) -> T {
        (self.member)(gamma.source(), gamma)
    }

    /// `μ_u` as a measure on `G^x`, zero off the fiber over `u`.
    pub fn member(&self, u: VertexId) -> DiscreteMeasure<Arrow, T> {
        let member = Arc::clone(&self.member);
        DiscreteMeasure::new(
            Ambient::Transversal(self.base),
            move |g: &Arrow| {
                if g.source() == u {
                    member(u, g)
                } else {
                    T::zero()
                }
            },
        )
    }

    /// `u ↦ ∫ f dμ_u`; finitely supported because `f` is.
    pub fn apply(&self, f: &FinSuppFn<Arrow, T>) -> Result<FinSuppFn<VertexId, T>> {
        let mut out = FinSuppFn::zero();
        for (g, v) in f.iter() {
            if g.range() != self.base {
                return Err(Error::AmbientMismatch(format!("{g} is not in G^{}", self.base)));
            }
            out.add(g.source(), v.clone() * self.fiber_weight(g));
        }
        Ok(out)
    }

    /// Same family with the weight at one arrow replaced. Mutation hook.
    pub fn with_override(&self, at: Arrow, value: T) -> Self {
        let inner = Arc::clone(&self.member);
        Self {
            base: self.base,
            vertices: self.vertices,
            member: Arc::new(move |u, g| if *g == at { value.clone() } else { inner(u, g) }),
        }
    }
}

/// `μ_u` = counting measure on the fiber `G^x_u`.
pub fn counting_family<T: Scalar>(t: &Transversal<'_>) -> MeasureFamily<T> {
    MeasureFamily::new(t.base(), t.graph().vertex_count(), |_, _| T::one())
}

/// `λ = ν ∘ μ`: `λ(f) = Σ_u ν(u) ∫ f dμ_u`, i.e. weight `ν(s(γ))·μ_{s(γ)}(γ)`.
pub fn compose_family<T: Scalar>(nu: &BaseMeasure<T>, mu: &MeasureFamily<T>) -> Result<DiscreteMeasure<Arrow, T>> {
    nu.require_full_support()?;
    if nu.len() != mu.vertices() {
        return Err(Error::AmbientMismatch(format!(
            "base measure has {} vertices, family has {}",
            nu.len(),
            mu.vertices()
        )));
    }
    let weights = nu.weights().to_vec();
    let mu = mu.clone();
    Ok(DiscreteMeasure::new(Ambient::Transversal(mu.base()), move |g: &Arrow| {
        weights[g.source().0].clone() * mu.fiber_weight(g)
    }))
}

/// A bijection between arrow sets, given by both directions.
#[derive(Clone)]
pub struct ArrowBijection {
    pub domain: Ambient,
    pub codomain: Ambient,
    forward: Arc<dyn Fn(&Arrow) -> Arrow + Send + Sync>,
    backward: Arc<dyn Fn(&Arrow) -> Arrow + Send + Sync>,
}

impl ArrowBijection {
    pub fn new(
        domain: Ambient,
        codomain: Ambient,
        forward: impl Fn(&Arrow) -> Arrow + Send + Sync + 'static,
        backward: impl Fn(&Arrow) -> Arrow + Send + Sync + 'static,
    ) -> Self {
        Self { domain, codomain, forward: Arc::new(forward), backward: Arc::new(backward) }
    }

    pub fn identity(ambient: Ambient) -> Self {
        Self::new(ambient, ambient, Arrow::clone, Arrow::clone)
    }

    /// Left multiplication `y ↦ ρy` by a loop `ρ` at `x`, on `G^x`.
    pub fn deck(x: VertexId, rho: &Arrow) -> Self {
        let (fwd, bwd) = (rho.clone(), rho.inverse());
        Self::new(
            Ambient::Transversal(x),
            Ambient::Transversal(x),
            move |y| compose(&fwd, y).expect("deck translation on G^x"),
            move |y| compose(&bwd, y).expect("deck translation on G^x"),
        )
    }

    pub fn apply(&self, a: &Arrow) -> Arrow {
        (self.forward)(a)
    }

    pub fn apply_inverse(&self, a: &Arrow) -> Arrow {
        (self.backward)(a)
    }
}

/// `φ*m` with `∫ f d(φ*m) = ∫ f∘φ⁻¹ dm`, i.e. weight `m(φ(γ))`.
/// Invertibility is checked on `checked_on` (points of the domain).
pub fn pullback<T: Scalar>(
    phi: &ArrowBijection,
    m: &DiscreteMeasure<Arrow, T>,
    checked_on: &[Arrow],
) -> Result<DiscreteMeasure<Arrow, T>> {
    if phi.codomain != m.ambient() {
        return Err(Error::AmbientMismatch(format!("{:?} vs {:?}", phi.codomain, m.ambient())));
    }
    for a in checked_on.iter().filter(|a| a.lies_in(&phi.domain)) {
        let image = phi.apply(a);
        if !image.lies_in(&phi.codomain) || phi.apply_inverse(&image) != *a {
            return Err(Error::NotInvertible(format!("fails at {a}")));
        }
    }
    Ok(m.pulled_back(phi.domain, Arc::clone(&phi.forward)))
}

/// `ℓ_{η⁻¹}λ` on `G^{s(η)}`: `∫ f d(ℓ_{η⁻¹}λ) = ∫ f(η⁻¹γ) dλ(γ)`, so the
/// weight of `δ` is `λ(ηδ)`.
pub fn translate_measure<T: Scalar>(eta: &Arrow, lam: &DiscreteMeasure<Arrow, T>) -> Result<DiscreteMeasure<Arrow, T>> {
    let Ambient::Transversal(x) = lam.ambient() else {
        return Err(Error::AmbientMismatch("translation needs a measure on a transversal".into()));
    };
    if eta.range() != x {
        return Err(Error::BadTranslator { got: eta.range(), expected: x });
    }
    let eta = eta.clone();
    let lam = lam.clone();
    Ok(DiscreteMeasure::new(Ambient::Transversal(eta.source()), move |delta: &Arrow| {
        lam.weight(&compose(&eta, delta).expect("δ ∈ G^{s(η)}"))
    }))
}

/// Sum along deck orbits: `[y] ↦ Σ_ρ f(ρ⁻¹y)`. The orbit of `y` is the
/// fiber over `s(y)`, so this is the fiberwise sum of `f`.
pub fn averaging_family<T: Scalar>(deck: &DeckAction, f: &FinSuppFn<Arrow, T>) -> Result<FinSuppFn<VertexId, T>> {
    let mut out = FinSuppFn::zero();
    for (z, v) in f.iter() {
        if z.range() != deck.base() {
            return Err(Error::AmbientMismatch(format!("{z} is not in G^{}", deck.base())));
        }
        out.add(z.source(), v.clone());
    }
    Ok(out)
}

/// A preimage of `F` under the counting family: `F(u)` placed on `c_u`.
pub fn mu_surjectivity_witness<T: Scalar>(big_f: &FinSuppFn<VertexId, T>, sec: &Section) -> FinSuppFn<Arrow, T> {
    big_f.push_keys(|u| sec.arrow(*u).clone())
}

/// A nonnegative, finitely supported function on `G^x` that is positive
/// somewhere on every fiber.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutoffFn<T> {
    base: VertexId,
    vertices: usize,
    values: BTreeMap<Arrow, T>,
}

impl<T: Scalar> CutoffFn<T> {
    pub fn new(base: VertexId, vertices: usize, values: BTreeMap<Arrow, T>) -> Result<Self> {
        for (a, v) in &values {
            if a.range() != base {
                return Err(Error::NotCutoff(format!("{a} is not in G^{base}")));
            }
            if a.source().0 >= vertices {
                return Err(Error::NotCutoff(format!("{a} leaves the vertex set")));
            }
            if v.is_negative_value() {
                return Err(Error::NotCutoff(format!("negative value at {a}")));
            }
        }
        let values: BTreeMap<Arrow, T> = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let e = Self { base, vertices, values };
        if let Some(u) = e.fiber_sums().iter().position(|s| s.is_zero()) {
            return Err(Error::NotCutoff(format!("identically zero on the fiber over {u}")));
        }
        Ok(e)
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn get(&self, a: &Arrow) -> T {
        self.values.get(a).cloned().unwrap_or_else(T::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arrow, &T)> {
        self.values.iter()
    }

    pub fn fiber_sums(&self) -> Vec<T> {
        let mut sums = vec![T::zero(); self.vertices];
        for (a, v) in &self.values {
            sums[a.source().0] = sums[a.source().0].clone() + v.clone();
        }
        sums
    }

    pub fn is_normalized(&self) -> bool {
        self.fiber_sums().iter().all(T::is_one)
    }
}

/// The indicator of the section arrows.
pub fn cutoff<T: Scalar>(sec: &Section) -> CutoffFn<T> {
    let values = sec.arrows().iter().map(|c| (c.clone(), T::one())).collect();
    CutoffFn::new(sec.base(), sec.len(), values).expect("one section arrow per fiber")
}

/// `h(γ) = e(γ) / Σ_{fiber of s(γ)} e`; fiber sums of `h` are 1.
pub fn normalize_cutoff<T: Scalar>(e: &CutoffFn<T>) -> Result<CutoffFn<T>> {
    let sums = e.fiber_sums();
    if let Some(u) = sums.iter().position(|s| s.is_zero()) {
        return Err(Error::NotCutoff(format!("identically zero on the fiber over {u}")));
    }
    let values = e.values.iter().map(|(a, v)| (a.clone(), v.clone() / sums[a.source().0].clone())).collect();
    CutoffFn::new(e.base, e.vertices, values)
}

/// `ν(u) = Σ_{s(γ)=u} h(γ)·λ(γ)`, the unique `ν` with `λ = ν∘μ` when `λ` is
/// deck-invariant.
pub fn recover_base_measure<T: Scalar>(lam: &DiscreteMeasure<Arrow, T>, h: &CutoffFn<T>) -> Result<BaseMeasure<T>> {
    if !h.is_normalized() {
        return Err(Error::NotCutoff("fiber sums are not all 1".into()));
    }
    if lam.ambient() != Ambient::Transversal(h.base) {
        return Err(Error::AmbientMismatch(format!("{:?} vs G^{}", lam.ambient(), h.base)));
    }
    let mut nu = vec![T::zero(); h.vertices];
    for (a, v) in &h.values {
        nu[a.source().0] = nu[a.source().0].clone() + v.clone() * lam.weight(a);
    }
    BaseMeasure::new(nu)
}

/// Checks `∫ f dμ_{ρ·u} = ∫ f(ρ⁻¹γ) dμ_u(γ)` for every `ρ` in `group`, every
/// sample `f` and every vertex `u`. The deck action covers the identity on
/// vertices, so `ρ·u = u`.
pub fn check_equivariance<T: Scalar>(
    family: &MeasureFamily<T>,
    group: &[Arrow],
    act: impl Fn(&Arrow, &Arrow) -> Result<Arrow>,
    samples: &[FinSuppFn<Arrow, T>],
) -> Report {
    let mut report = Report::new("family_equivariance");
    for rho in group {
        for f in samples {
            // f∘ℓ_{ρ⁻¹} has support ρ·supp f
            let moved = match f.try_push_keys(|g| act(rho, g)) {
                Ok(m) => m,
                Err(e) => {
                    report.fail(format!("action of {rho} failed: {e}"));
                    continue;
                }
            };
            match (family.apply(f), family.apply(&moved)) {
                (Ok(lhs), Ok(rhs)) => {
                    report.check(lhs == rhs, || format!("family is not equivariant under {rho}"));
                }
                (Err(e), _) | (_, Err(e)) => report.fail(e.to_string()),
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::{section, transversal};
    use crate::graphspace::{EdgeId, MultiGraph};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn re(x: Rational) -> Complex<Rational> {
        Complex::new(x, Rational::zero())
    }

    #[test]
    fn integrate_examples() {
        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        let counting = compose_family(&BaseMeasure::new(vec![q(1, 1)]).unwrap(), &counting_family(&t)).unwrap();
        assert!(counting.integrate(&FinSuppFn::zero()).unwrap().is_zero());
        let a = Arrow::segment(&r1, EdgeId(0), true);
        assert_eq!(integrate(&counting, &FinSuppFn::indicator([a])).unwrap(), re(q(1, 1)));

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let nu = BaseMeasure::new(vec![q(1, 2), q(1, 2)]).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();
        let f = FinSuppFn::indicator([Arrow::unit(VertexId(0))]);
        assert_eq!(lam.integrate(&f).unwrap(), re(q(1, 2)));
        let wrong = FinSuppFn::indicator([Arrow::unit(VertexId(1))]);
        assert!(matches!(lam.integrate(&wrong), Err(Error::AmbientMismatch(_))));
    }

    #[test]
    fn counting_family_examples() {
        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let mu = counting_family::<Rational>(&t);
        let out = mu.apply(&FinSuppFn::indicator([sec.arrow(VertexId(1)).clone()])).unwrap();
        assert_eq!(out.get(&VertexId(1)), re(q(1, 1)));
        assert!(out.get(&VertexId(0)).is_zero());

        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        let ball = FinSuppFn::indicator(t.ball(2));
        assert_eq!(counting_family::<Rational>(&t).apply(&ball).unwrap().get(&VertexId(0)), re(q(5, 1)));

        // one sheet: the value is f at the single preimage
        let c3 = MultiGraph::cycle(3);
        let t = transversal(&c3, VertexId(0)).unwrap();
        let sheet = t.ball(2).into_iter().filter(|a| a.len() == 1).collect::<Vec<_>>();
        let f = FinSuppFn::from_real(sheet.iter().cloned().zip([q(3, 1), q(-2, 7)]));
        let out = counting_family::<Rational>(&t).apply(&f).unwrap();
        for a in &sheet {
            assert_eq!(out.get(&a.source()), f.get(a));
        }
    }

    #[test]
    fn compose_family_examples() {
        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let nu = BaseMeasure::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();
        let two_over_q = FinSuppFn::indicator(t.fiber(VertexId(1), 1));
        assert_eq!(two_over_q.len(), 2);
        assert_eq!(lam.integrate(&two_over_q).unwrap(), re(q(4, 3)));

        let zero = BaseMeasure::new(vec![q(0, 1), q(1, 1)]).unwrap();
        assert!(matches!(compose_family(&zero, &counting_family(&t)), Err(Error::NotFullySupported(_))));
    }

    #[test]
    fn pullback_examples() {
        let d2 = MultiGraph::dipole(2);
        let x = VertexId(0);
        let t = transversal(&d2, x).unwrap();
        let ball = t.ball(3);
        let nu = BaseMeasure::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();

        let same = pullback(&ArrowBijection::identity(Ambient::Transversal(x)), &lam, &ball).unwrap();
        let gen = crate::cover::pi1_generators(&t, &t.tree()).unwrap().remove(0);
        let counting = compose_family(&BaseMeasure::new(vec![q(1, 1); 2]).unwrap(), &counting_family(&t)).unwrap();
        let deck_pulled = pullback(&ArrowBijection::deck(x, &gen), &counting, &ball).unwrap();
        for a in &ball {
            assert_eq!(same.weight(a), lam.weight(a));
            assert_eq!(deck_pulled.weight(a), Rational::one());
        }

        // pullback along left translation by η agrees with translate_measure
        let eta = Arrow::segment(&d2, EdgeId(1), false); // q -> p
        let ell = {
            let (e, ei) = (eta.clone(), eta.inverse());
            ArrowBijection::new(
                Ambient::Transversal(VertexId(1)),
                Ambient::Transversal(x),
                move |d| compose(&e, d).unwrap(),
                move |g| compose(&ei, g).unwrap(),
            )
        };
        let over_q = transversal(&d2, VertexId(1)).unwrap().ball(2);
        let pulled = pullback(&ell, &lam, &over_q).unwrap();
        let translated = translate_measure(&eta, &lam).unwrap();
        for d in &over_q {
            assert_eq!(pulled.weight(d), translated.weight(d));
        }

        let broken = ArrowBijection::new(Ambient::Transversal(x), Ambient::Transversal(x), Arrow::clone, |_| {
            Arrow::unit(VertexId(0))
        });
        assert!(matches!(pullback(&broken, &lam, &ball), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn translate_examples() {
        let d2 = MultiGraph::dipole(2);
        let x = VertexId(0);
        let t = transversal(&d2, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let nu = BaseMeasure::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();
        let same = translate_measure(&Arrow::unit(x), &lam).unwrap();
        let moved = translate_measure(sec.arrow(VertexId(1)), &lam).unwrap();
        assert_eq!(moved.ambient(), Ambient::Transversal(VertexId(1)));
        for d in transversal(&d2, VertexId(1)).unwrap().ball(3) {
            assert_eq!(moved.weight(&d), nu.get(d.source()).clone());
        }
        for a in t.ball(3) {
            assert_eq!(same.weight(&a), lam.weight(&a));
        }
        assert_eq!(
            translate_measure(&sec.arrow(VertexId(1)).inverse(), &lam).unwrap_err(),
            Error::BadTranslator { got: VertexId(1), expected: x }
        );

        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, x).unwrap();
        let counting = compose_family(&BaseMeasure::new(vec![q(1, 1)]).unwrap(), &counting_family(&t)).unwrap();
        let shifted = translate_measure(&Arrow::segment(&r1, EdgeId(0), true), &counting).unwrap();
        assert!(t.ball(3).iter().all(|a| shifted.weight(a).is_one()));
    }

    #[test]
    fn averaging_examples() {
        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        let deck = DeckAction::new(&t, &t.tree()).unwrap();
        let a = Arrow::segment(&r1, EdgeId(0), true);
        let avg = averaging_family::<Rational>(&deck, &FinSuppFn::indicator([a])).unwrap();
        assert_eq!(avg.get(&VertexId(0)), re(q(1, 1)));

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let deck = DeckAction::new(&t, &t.tree()).unwrap();
        let f = FinSuppFn::indicator(sec.arrows().iter().cloned());
        let avg = averaging_family::<Rational>(&deck, &f).unwrap();
        assert_eq!((avg.get(&VertexId(0)), avg.get(&VertexId(1))), (re(q(1, 1)), re(q(1, 1))));

        let g = FinSuppFn::from_real(t.ball(2).into_iter().enumerate().map(|(i, a)| (a, q(i as i64 + 1, 3))));
        for rho in deck.symmetric_generators() {
            // (f∘ℓ_ρ)(y) = f(ρy): support moves by ρ⁻¹
            let shifted = g.push_keys(|y| compose(&rho.inverse(), y).unwrap());
            assert_eq!(averaging_family(&deck, &shifted).unwrap(), averaging_family(&deck, &g).unwrap());
        }
    }

    #[test]
    fn surjectivity_witness_examples() {
        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        assert!(mu_surjectivity_witness::<Rational>(&FinSuppFn::zero(), &sec).is_empty());
        let w = mu_surjectivity_witness::<Rational>(&FinSuppFn::indicator([VertexId(0)]), &sec);
        assert_eq!(w, FinSuppFn::indicator([Arrow::unit(VertexId(0))]));

        let c3 = MultiGraph::cycle(3);
        let t = transversal(&c3, VertexId(1)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let big_f = FinSuppFn::from_pairs([
            (VertexId(0), Complex::new(q(2, 5), q(-1, 1))),
            (VertexId(2), Complex::new(q(7, 1), q(0, 1))),
        ]);
        let g = mu_surjectivity_witness(&big_f, &sec);
        assert_eq!(counting_family(&t).apply(&g).unwrap(), big_f);
    }

    #[test]
    fn cutoff_examples() {
        let d2 = MultiGraph::dipole(2);
        let x = VertexId(0);
        let t = transversal(&d2, x).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let e = cutoff::<Rational>(&sec);
        let h = normalize_cutoff(&e).unwrap();
        assert_eq!(h, e);
        assert_eq!(h.fiber_sums(), vec![q(1, 1), q(1, 1)]);

        let over_q = t.fiber(VertexId(1), 1);
        let values: BTreeMap<_, _> =
            [(Arrow::unit(x), q(2, 1)), (over_q[0].clone(), q(1, 1)), (over_q[1].clone(), q(3, 1))].into();
        let h = normalize_cutoff(&CutoffFn::new(x, 2, values).unwrap()).unwrap();
        assert_eq!((h.get(&over_q[0]), h.get(&over_q[1])), (q(1, 4), q(3, 4)));
        assert_eq!(h.get(&Arrow::unit(x)), q(1, 1));

        let missing: BTreeMap<_, _> = [(Arrow::unit(x), q(1, 1))].into();
        assert!(matches!(CutoffFn::new(x, 2, missing), Err(Error::NotCutoff(_))));
    }

    #[test]
    fn recovery_examples() {
        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let counting = compose_family(&BaseMeasure::new(vec![q(1, 1)]).unwrap(), &counting_family(&t)).unwrap();
        assert_eq!(recover_base_measure(&counting, &cutoff(&sec)).unwrap().weights(), &[q(1, 1)]);

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let nu = BaseMeasure::new(vec![q(1, 3), q(2, 3)]).unwrap();
        let lam = compose_family(&nu, &counting_family(&t)).unwrap();
        assert_eq!(recover_base_measure(&lam, &cutoff(&sec)).unwrap(), nu);

        // a normalized cutoff spread over two sheets recovers the same ν
        let over_q = t.fiber(VertexId(1), 3);
        let values: BTreeMap<_, _> =
            [(Arrow::unit(VertexId(0)), q(1, 1)), (over_q[0].clone(), q(5, 1)), (over_q[3].clone(), q(2, 1))].into();
        let h = normalize_cutoff(&CutoffFn::new(VertexId(0), 2, values.clone()).unwrap()).unwrap();
        assert_eq!(recover_base_measure(&lam, &h).unwrap(), nu);
        let unnormalized = CutoffFn::new(VertexId(0), 2, values).unwrap();
        assert!(matches!(recover_base_measure(&lam, &unnormalized), Err(Error::NotCutoff(_))));
    }

    #[test]
    fn equivariance_examples() {
        let g = MultiGraph::new(2, &[(0, 1), (1, 0), (1, 1)]).unwrap();
        let x = VertexId(1);
        let t = transversal(&g, x).unwrap();
        let deck = DeckAction::new(&t, &t.tree()).unwrap();
        let ball = t.ball(2);
        let samples: Vec<FinSuppFn<Arrow, Rational>> = ball.iter().map(|a| FinSuppFn::indicator([a.clone()])).collect();
        let group = deck.symmetric_generators();
        let act = |r: &Arrow, y: &Arrow| deck.act(r, y);

        let mu = counting_family::<Rational>(&t);
        let report = check_equivariance(&mu, &group, act, &samples);
        assert!(report.is_clean());
        assert_eq!(report.samples, group.len() * samples.len());

        let perturbed = mu.with_override(ball[1].clone(), q(2, 1));
        assert!(!check_equivariance(&perturbed, &group, act, &samples).is_clean());

        let trivial = |_: &Arrow, y: &Arrow| Ok(y.clone());
        assert!(check_equivariance(&perturbed, &group, trivial, &samples).is_clean());
    }

    #[test]
    fn pushforward_of_functions_to_vertices_is_finite() {
        let c3 = MultiGraph::cycle(3);
        let t = transversal(&c3, VertexId(0)).unwrap();
        let f = FinSuppFn::<Arrow, Rational>::indicator(t.ball(4));
        let out = counting_family(&t).apply(&f).unwrap();
        assert!(out.len() <= 3);
    }
}
