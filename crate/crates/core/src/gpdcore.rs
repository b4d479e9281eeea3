//! The groupoid contract, an axiom checker for finite windows, and the
//! auxiliary groupoids: `Π₁(X)`, pair groupoids, transformation groupoids of
//! free-group actions, and the quotient groupoid of the bibundle `G^x`.

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::cover::{Section, Transversal};
use crate::edgepath::{self, compose, compose_unreduced, Arrow};
use crate::graphspace::{MultiGraph, VertexId};
use crate::{Error, Result};

/// Outcome of one named check: how many cases were examined and which failed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub name: String,
    pub samples: usize,
    pub violations: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), ..Self::default() }
    }

    /// Counts one sample; records `msg()` when `ok` is false.
    pub fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.samples += 1;
        if !ok {
            self.violations.push(msg());
        }
    }

    pub fn fail(&mut self, msg: impl Into<String>) {
        self.samples += 1;
        self.violations.push(msg.into());
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn absorb(&mut self, other: Report) {
        self.samples += other.samples;
        self.violations.extend(other.violations);
    }
}

/// A groupoid whose arrows can be enumerated in balls of growing size.
pub trait GroupoidView {
    type Arrow: Clone + Eq + Ord + Debug;
    type Unit: Clone + Eq + Ord + Debug;

    fn range(&self, a: &Self::Arrow) -> Self::Unit;
    fn source(&self, a: &Self::Arrow) -> Self::Unit;
    fn identity(&self, u: &Self::Unit) -> Self::Arrow;
    /// `a b` (b first); `None` unless `s(a) = r(b)`.
    fn compose(&self, a: &Self::Arrow, b: &Self::Arrow) -> Option<Self::Arrow>;
    fn inverse(&self, a: &Self::Arrow) -> Self::Arrow;
    fn ball(&self, size: usize) -> Vec<Self::Arrow>;
}

fn by_range<G: GroupoidView>(g: &G, arrows: &[G::Arrow]) -> BTreeMap<G::Unit, Vec<G::Arrow>> {
    let mut map: BTreeMap<G::Unit, Vec<G::Arrow>> = BTreeMap::new();
    for a in arrows {
        map.entry(g.range(a)).or_default().push(a.clone());
    }
    map
}

/// Unit, inverse, endpoint and associativity laws over the ball of `size`.
pub fn check_axioms<G: GroupoidView>(g: &G, size: usize) -> Report {
    let mut report = Report::new("groupoid_axioms");
    let ball = g.ball(size);
    let index = by_range(g, &ball);
    let empty = Vec::new();
    let composable = |a: &G::Arrow| index.get(&g.source(a)).unwrap_or(&empty);

    for a in &ball {
        let (r, s) = (g.range(a), g.source(a));
        let left = g.compose(&g.identity(&r), a);
        report.check(left.as_ref() == Some(a), || format!("left unit law fails for {a:?}"));
        let right = g.compose(a, &g.identity(&s));
        report.check(right.as_ref() == Some(a), || format!("right unit law fails for {a:?}"));
        let inv = g.inverse(a);
        report.check(g.compose(a, &inv) == Some(g.identity(&r)), || format!("a a⁻¹ is not r(a) for {a:?}"));
        report.check(g.compose(&inv, a) == Some(g.identity(&s)), || format!("a⁻¹ a is not s(a) for {a:?}"));
        report.check(g.inverse(&inv) == *a, || format!("inverse is not involutive at {a:?}"));
    }
    for a in &ball {
        for b in composable(a) {
            let Some(ab) = g.compose(a, b) else {
                report.fail(format!("{a:?} and {b:?} should compose"));
                continue;
            };
            report.check(g.range(&ab) == g.range(a) && g.source(&ab) == g.source(b), || {
                format!("endpoints of {a:?}·{b:?} are wrong")
            });
            for c in composable(b) {
                let left = g.compose(&ab, c);
                let right = g.compose(b, c).and_then(|bc| g.compose(a, &bc));
                report
                    .check(left.is_some() && left == right, || format!("associativity fails for {a:?}, {b:?}, {c:?}"));
            }
        }
    }
    report
}

/// `Π₁(X)` of a graph. With `reduce_words` off, composition concatenates
/// without cancelling; that variant is only a mutation-testing hook.
#[derive(Clone, Copy, Debug)]
pub struct FundamentalGroupoid<'g> {
    graph: &'g MultiGraph,
    reduce_words: bool,
}

impl<'g> FundamentalGroupoid<'g> {
    pub fn new(graph: &'g MultiGraph) -> Self {
        Self { graph, reduce_words: true }
    }

    pub fn without_reduction(graph: &'g MultiGraph) -> Self {
        Self { graph, reduce_words: false }
    }

    pub fn graph(&self) -> &'g MultiGraph {
        self.graph
    }
}

impl GroupoidView for FundamentalGroupoid<'_> {
    type Arrow = Arrow;
    type Unit = VertexId;

    fn range(&self, a: &Arrow) -> VertexId {
        a.range()
    }
    fn source(&self, a: &Arrow) -> VertexId {
        a.source()
    }
    fn identity(&self, u: &VertexId) -> Arrow {
        Arrow::unit(*u)
    }
    fn compose(&self, a: &Arrow, b: &Arrow) -> Option<Arrow> {
        if self.reduce_words {
            compose(a, b).ok()
        } else {
            compose_unreduced(a, b).ok()
        }
    }
    fn inverse(&self, a: &Arrow) -> Arrow {
        a.inverse()
    }
    fn ball(&self, size: usize) -> Vec<Arrow> {
        edgepath::enumerate_ball(self.graph, size)
    }
}

/// The groupoid `V × V` of the trivial equivalence relation on `{0, …, n-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairGroupoid {
    points: usize,
}

pub fn pair_groupoid(points: usize) -> Result<PairGroupoid> {
    if points == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(PairGroupoid { points })
}

impl PairGroupoid {
    pub fn points(&self) -> usize {
        self.points
    }
}

impl GroupoidView for PairGroupoid {
    type Arrow = (usize, usize);
    type Unit = usize;

    fn range(&self, a: &(usize, usize)) -> usize {
        a.0
    }
    fn source(&self, a: &(usize, usize)) -> usize {
        a.1
    }
    fn identity(&self, u: &usize) -> (usize, usize) {
        (*u, *u)
    }
    fn compose(&self, a: &(usize, usize), b: &(usize, usize)) -> Option<(usize, usize)> {
        (a.1 == b.0).then_some((a.0, b.1))
    }
    fn inverse(&self, a: &(usize, usize)) -> (usize, usize) {
        (a.1, a.0)
    }
    /// All `n²` arrows regardless of `size`.
    fn ball(&self, _size: usize) -> Vec<(usize, usize)> {
        (0..self.points).flat_map(|x| (0..self.points).map(move |y| (x, y))).collect()
    }
}

/// The free group on `rank` generators, realised as `π₁` of the rose with
/// `rank` loops: elements are reduced loops, the product is composition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeGroup {
    rose: MultiGraph,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Self {
        Self { rose: MultiGraph::rose(rank) }
    }

    pub fn rank(&self) -> usize {
        self.rose.edge_count()
    }

    pub fn identity(&self) -> Arrow {
        Arrow::unit(VertexId(0))
    }

    pub fn generator(&self, i: usize) -> Arrow {
        Arrow::segment(&self.rose, crate::EdgeId(i), true)
    }

    /// `g^k` for the `i`-th generator; negative `k` allowed.
    pub fn power(&self, i: usize, k: i64) -> Arrow {
        let step = if k >= 0 { self.generator(i) } else { self.generator(i).inverse() };
        (0..k.unsigned_abs()).fold(self.identity(), |acc, _| compose(&acc, &step).expect("loops compose"))
    }

    pub fn mul(&self, g: &Arrow, t: &Arrow) -> Arrow {
        compose(g, t).expect("elements of a free group are loops at one vertex")
    }

    pub fn inv(&self, g: &Arrow) -> Arrow {
        g.inverse()
    }

    /// Elements of word length at most `radius`.
    pub fn ball(&self, radius: usize) -> Vec<Arrow> {
        edgepath::enumerate_ball(&self.rose, radius)
    }

    /// Sum of exponents of generator 0; a homomorphism onto `ℤ` when `rank = 1`.
    pub fn exponent_sum(&self, g: &Arrow) -> i64 {
        g.word().iter().map(|s| if s.forward { 1 } else { -1 }).sum()
    }
}

/// A right action of a free group on `{0, …, n-1}`, given by one permutation
/// per generator: `s · gᵢ = perms[i][s]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    group: FreeGroup,
    points: usize,
    perms: Vec<Vec<usize>>,
    inverse_perms: Vec<Vec<usize>>,
}

impl GroupAction {
    pub fn new(points: usize, perms: Vec<Vec<usize>>) -> Result<Self> {
        let mut inverse_perms = Vec::with_capacity(perms.len());
        for (i, p) in perms.iter().enumerate() {
            if p.len() != points {
                return Err(Error::IncompatibleAction(format!("generator {i} acts on {} points", p.len())));
            }
            let mut inv = vec![usize::MAX; points];
            for (s, &t) in p.iter().enumerate() {
                if t >= points || inv[t] != usize::MAX {
                    return Err(Error::IncompatibleAction(format!("generator {i} is not a bijection")));
                }
                inv[t] = s;
            }
            inverse_perms.push(inv);
        }
        Ok(Self { group: FreeGroup::new(perms.len()), points, perms, inverse_perms })
    }

    /// `ℤ` acting on `ℤ/n` by `s · k = s + k`.
    pub fn rotation(n: usize) -> Self {
        Self::new(n, vec![(0..n).map(|s| (s + 1) % n).collect()]).expect("rotation is a bijection")
    }

    pub fn group(&self) -> &FreeGroup {
        &self.group
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// `s · g`, applying the leftmost letter of `g` first.
    pub fn act(&self, s: usize, g: &Arrow) -> usize {
        g.word().iter().fold(s, |at, letter| {
            let table = if letter.forward { &self.perms } else { &self.inverse_perms };
            table[letter.edge.0][at]
        })
    }
}

/// An arrow `(s, g)` of `S ⋊ F` from `s · g` to `s`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransformationArrow {
    pub point: usize,
    pub element: Arrow,
}

#[derive(Clone, Debug)]
pub struct TransformationGroupoid {
    action: GroupAction,
}

/// Checks that the identity fixes every point and that `(s·g)·t = s·(gt)`
/// on all words of length at most two.
pub fn transformation_groupoid(action: GroupAction) -> Result<TransformationGroupoid> {
    let group = action.group();
    let words = group.ball(2);
    for s in 0..action.points() {
        if action.act(s, &group.identity()) != s {
            return Err(Error::IncompatibleAction(format!("identity moves {s}")));
        }
        for g in &words {
            for t in &words {
                if action.act(action.act(s, g), t) != action.act(s, &group.mul(g, t)) {
                    return Err(Error::IncompatibleAction(format!("({s}·{g})·{t} ≠ {s}·({g}{t})")));
                }
            }
        }
    }
    Ok(TransformationGroupoid { action })
}

impl TransformationGroupoid {
    pub fn action(&self) -> &GroupAction {
        &self.action
    }

    pub fn arrow(&self, point: usize, element: Arrow) -> TransformationArrow {
        TransformationArrow { point, element }
    }
}

impl GroupoidView for TransformationGroupoid {
    type Arrow = TransformationArrow;
    type Unit = usize;

    fn range(&self, a: &TransformationArrow) -> usize {
        a.point
    }
    fn source(&self, a: &TransformationArrow) -> usize {
        self.action.act(a.point, &a.element)
    }
    fn identity(&self, u: &usize) -> TransformationArrow {
        TransformationArrow { point: *u, element: self.action.group().identity() }
    }
    fn compose(&self, a: &TransformationArrow, b: &TransformationArrow) -> Option<TransformationArrow> {
        (self.source(a) == b.point)
            .then(|| TransformationArrow { point: a.point, element: self.action.group().mul(&a.element, &b.element) })
    }
    fn inverse(&self, a: &TransformationArrow) -> TransformationArrow {
        TransformationArrow { point: self.source(a), element: a.element.inverse() }
    }
    fn ball(&self, size: usize) -> Vec<TransformationArrow> {
        let elements = self.action.group().ball(size);
        let mut all: Vec<_> = (0..self.action.points())
            .flat_map(|s| elements.iter().map(move |g| TransformationArrow { point: s, element: g.clone() }))
            .collect();
        all.sort();
        all
    }
}

/// The transversal `G^x` of `Π₁(X)` as a `G^x_x`-`Π₁(X)` bispace: the
/// isotropy group acts by left multiplication (deck transformations), `Π₁(X)`
/// by right multiplication. The section fixes canonical orbit representatives.
#[derive(Clone, Debug)]
pub struct EquivalenceBibundle<'g> {
    transversal: Transversal<'g>,
    section: Section,
}

impl<'g> EquivalenceBibundle<'g> {
    pub fn new(transversal: Transversal<'g>, section: Section) -> Result<Self> {
        let x = transversal.base();
        if section.base() != x || section.len() != transversal.graph().vertex_count() {
            return Err(Error::BibundleInvalid(format!("section does not match base point {x}")));
        }
        if !section.arrow(x).is_unit() {
            return Err(Error::BibundleInvalid("section arrow at the base point must be the unit".into()));
        }
        Ok(Self { transversal, section })
    }

    pub fn transversal(&self) -> &Transversal<'g> {
        &self.transversal
    }

    pub fn section(&self) -> &Section {
        &self.section
    }

    pub fn base(&self) -> VertexId {
        self.transversal.base()
    }

    /// `(y, γ) ↦ (y, yγ)` for `y ∈ G^x` and `s(y) = r(γ)`.
    pub fn kinetics(&self, y: &Arrow, gamma: &Arrow) -> Result<(Arrow, Arrow)> {
        self.require_transversal(y)?;
        Ok((y.clone(), compose(y, gamma)?))
    }

    /// `(y, z) ↦ (y, y⁻¹z)` for `y, z ∈ G^x`.
    pub fn kinetics_inverse(&self, y: &Arrow, z: &Arrow) -> Result<(Arrow, Arrow)> {
        self.require_transversal(y)?;
        self.require_transversal(z)?;
        Ok((y.clone(), compose(&y.inverse(), z)?))
    }

    /// Projection `(y, γ) ↦ γ`.
    pub fn project(&self, _y: &Arrow, gamma: &Arrow) -> Arrow {
        gamma.clone()
    }

    /// `q(y, z) = y⁻¹z`.
    pub fn quotient_map(&self, y: &Arrow, z: &Arrow) -> Result<Arrow> {
        self.kinetics_inverse(y, z).map(|(_, g)| g)
    }

    /// Representative of the orbit of `(y, z)` whose first entry is `c_{s(y)}`.
    pub fn canonical(&self, y: &Arrow, z: &Arrow) -> Result<QuotientArrow> {
        self.require_transversal(y)?;
        self.require_transversal(z)?;
        let c = self.section.arrow(y.source());
        let xi = compose(c, &y.inverse())?;
        Ok(QuotientArrow { first: c.clone(), second: compose(&xi, z)? })
    }

    fn require_transversal(&self, y: &Arrow) -> Result<()> {
        if self.transversal.contains(y) {
            Ok(())
        } else {
            Err(Error::NotComposable { source_vertex: self.base().0, range_vertex: y.range().0 })
        }
    }
}

/// An orbit class `[(c_u, z)]` in `G^x_x \ (G^x × G^x)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuotientArrow {
    pub first: Arrow,
    pub second: Arrow,
}

/// `G^x_x \ (G^x × G^x)` with the pair-groupoid structure pushed down.
#[derive(Clone, Debug)]
pub struct QuotientGroupoid<'g> {
    bibundle: EquivalenceBibundle<'g>,
}

pub fn quotient_groupoid(b: EquivalenceBibundle<'_>) -> QuotientGroupoid<'_> {
    QuotientGroupoid { bibundle: b }
}

impl<'g> QuotientGroupoid<'g> {
    pub fn bibundle(&self) -> &EquivalenceBibundle<'g> {
        &self.bibundle
    }

    /// The induced map to `Π₁(X)`: `[(y, z)] ↦ y⁻¹z`.
    pub fn to_arrow(&self, a: &QuotientArrow) -> Arrow {
        self.bibundle.quotient_map(&a.first, &a.second).expect("canonical representatives lie in G^x")
    }

    /// Inverse of [`Self::to_arrow`]: `γ ↦ [(c_{r(γ)}, c_{r(γ)} γ)]`.
    pub fn from_arrow(&self, gamma: &Arrow) -> QuotientArrow {
        let c = self.bibundle.section.arrow(gamma.range()).clone();
        let second = compose(&c, gamma).expect("c_{r(γ)} and γ compose");
        QuotientArrow { first: c, second }
    }
}

impl GroupoidView for QuotientGroupoid<'_> {
    type Arrow = QuotientArrow;
    type Unit = VertexId;

    fn range(&self, a: &QuotientArrow) -> VertexId {
        a.first.source()
    }
    fn source(&self, a: &QuotientArrow) -> VertexId {
        a.second.source()
    }
    fn identity(&self, u: &VertexId) -> QuotientArrow {
        let c = self.bibundle.section.arrow(*u).clone();
        QuotientArrow { first: c.clone(), second: c }
    }
    /// `[(c_u, A)][(c_v, B)] = [(c_u, A c_v⁻¹ B)]` when `s(A) = v`.
    fn compose(&self, a: &QuotientArrow, b: &QuotientArrow) -> Option<QuotientArrow> {
        if self.source(a) != self.range(b) {
            return None;
        }
        let shift = compose(&a.second, &b.first.inverse()).ok()?;
        Some(QuotientArrow { first: a.first.clone(), second: compose(&shift, &b.second).ok()? })
    }
    fn inverse(&self, a: &QuotientArrow) -> QuotientArrow {
        self.bibundle.canonical(&a.second, &a.first).expect("canonical representatives lie in G^x")
    }
    /// Classes `[(c_u, z)]` with `z` in the transversal ball of radius `size`.
    fn ball(&self, size: usize) -> Vec<QuotientArrow> {
        let zs = self.bibundle.transversal.ball(size);
        let sec = &self.bibundle.section;
        let mut all: Vec<_> = sec
            .arrows()
            .iter()
            .flat_map(|c| zs.iter().map(move |z| QuotientArrow { first: c.clone(), second: z.clone() }))
            .collect();
        all.sort();
        all
    }
}

/// `q ∘ k = p` on every composable `(y, γ)` with `y ∈ G^x` and `γ` in the
/// balls of `radius`.
pub fn check_commuting_diagram(b: &EquivalenceBibundle<'_>, radius: usize) -> Report {
    let mut report = Report::new("commuting_diagram");
    let ys = b.transversal().ball(radius);
    let gammas = edgepath::enumerate_ball(b.transversal().graph(), radius);
    for y in &ys {
        for gamma in gammas.iter().filter(|g| g.range() == y.source()) {
            let ok = b
                .kinetics(y, gamma)
                .and_then(|(y1, z)| b.quotient_map(&y1, &z))
                .is_ok_and(|image| image == b.project(y, gamma));
            report.check(ok, || format!("q(k({y}, {gamma})) ≠ {gamma}"));
        }
    }
    report
}

/// `k ∘ k⁻¹ = id` on `G^x × G^x` and `k⁻¹ ∘ k = id` on `G^x ⋊ G`, over balls.
pub fn check_kinetics_inverse(b: &EquivalenceBibundle<'_>, radius: usize) -> Report {
    let mut report = Report::new("kinetics_inverse");
    let ys = b.transversal().ball(radius);
    for y in &ys {
        for z in &ys {
            let ok = b
                .kinetics_inverse(y, z)
                .and_then(|(y1, g)| b.kinetics(&y1, &g))
                .is_ok_and(|pair| pair == (y.clone(), z.clone()));
            report.check(ok, || format!("k(k⁻¹({y}, {z})) ≠ ({y}, {z})"));
        }
    }
    let gammas = edgepath::enumerate_ball(b.transversal().graph(), radius);
    for y in &ys {
        for gamma in gammas.iter().filter(|g| g.range() == y.source()) {
            let ok = b
                .kinetics(y, gamma)
                .and_then(|(y1, z)| b.kinetics_inverse(&y1, &z))
                .is_ok_and(|pair| pair == (y.clone(), gamma.clone()));
            report.check(ok, || format!("k⁻¹(k({y}, {gamma})) ≠ ({y}, {gamma})"));
        }
    }
    report
}

/// The quotient groupoid is arrow-bijective with `Π₁(X)` on the ball of
/// `radius`, respecting range, source and composition.
pub fn check_quotient_bijection(b: &EquivalenceBibundle<'_>, radius: usize) -> Report {
    let mut report = Report::new("quotient_bijection");
    let quotient = quotient_groupoid(b.clone());
    let pi1 = edgepath::enumerate_ball(b.transversal().graph(), radius);
    for gamma in &pi1 {
        let class = quotient.from_arrow(gamma);
        report.check(quotient.to_arrow(&class) == *gamma, || format!("{gamma} does not round-trip"));
        report.check(quotient.range(&class) == gamma.range() && quotient.source(&class) == gamma.source(), || {
            format!("endpoints of the class of {gamma} are wrong")
        });
    }
    let classes = quotient.ball(radius);
    let mut images: Vec<Arrow> = classes.iter().map(|c| quotient.to_arrow(c)).collect();
    for (class, image) in classes.iter().zip(&images) {
        report.check(quotient.from_arrow(image) == *class, || format!("class {class:?} does not round-trip"));
    }
    images.sort();
    let before = images.len();
    images.dedup();
    report.check(images.len() == before, || "two classes map to the same arrow".into());
    for gamma in &pi1 {
        for eta in pi1.iter().filter(|e| e.range() == gamma.source()) {
            let product = compose(gamma, eta).expect("composable by construction");
            let ok = quotient.compose(&quotient.from_arrow(gamma), &quotient.from_arrow(eta))
                == Some(quotient.from_arrow(&product));
            report.check(ok, || format!("composition of {gamma} and {eta} is not preserved"));
        }
    }
    report
}

/// `q(y, z) = q(y', z')` iff `(y', z') = (ξy, ξz)` for a loop `ξ` at `x`.
pub fn check_orbit_equality(b: &EquivalenceBibundle<'_>, radius: usize) -> Report {
    let mut report = Report::new("orbit_equality");
    let x = b.base();
    let ys = b.transversal().ball(radius);
    let loops: Vec<Arrow> = ys.iter().filter(|a| a.is_loop_at(x)).cloned().collect();
    let mut groups: BTreeMap<Arrow, Vec<(Arrow, Arrow)>> = BTreeMap::new();
    for y in &ys {
        for z in &ys {
            let Ok(image) = b.quotient_map(y, z) else {
                report.fail(format!("q({y}, {z}) undefined"));
                continue;
            };
            for xi in &loops {
                let moved = compose(xi, y).and_then(|y2| Ok((y2, compose(xi, z)?)));
                let ok = moved.and_then(|(y2, z2)| b.quotient_map(&y2, &z2)).is_ok_and(|m| m == image);
                report.check(ok, || format!("q changes under {xi} at ({y}, {z})"));
            }
            groups.entry(image).or_default().push((y.clone(), z.clone()));
        }
    }
    for members in groups.values() {
        let (y, z) = &members[0];
        for (y2, z2) in &members[1..] {
            let ok = compose(y2, &y.inverse())
                .is_ok_and(|xi| xi.is_loop_at(x) && compose(&xi, z).is_ok_and(|moved| moved == *z2));
            report.check(ok, || format!("({y2}, {z2}) and ({y}, {z}) share an image but not an orbit"));
        }
    }
    report
}
