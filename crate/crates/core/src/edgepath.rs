//! Arrows of `Π₁(X)` as reduced edge-words.
//!
//! Words are stored right to left: the first segment traversed is the last
//! entry of [`Arrow::word`], so `compose(γ, η)` is literally `γη` (η first).

use std::cmp::Ordering;
use std::fmt;

use crate::graphspace::{EdgeId, MultiGraph, VertexId};
use crate::{Error, Result};

/// An edge together with a direction of traversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OrientedEdge {
    pub edge: EdgeId,
    /// `true` traverses `src → dst`.
    pub forward: bool,
}

impl OrientedEdge {
    pub fn new(edge: usize, forward: bool) -> Self {
        Self { edge: EdgeId(edge), forward }
    }

    pub fn reversed(self) -> Self {
        Self { edge: self.edge, forward: !self.forward }
    }

    pub fn start(self, g: &MultiGraph) -> VertexId {
        let e = g.edge(self.edge);
        if self.forward {
            e.src
        } else {
            e.dst
        }
    }

    pub fn end(self, g: &MultiGraph) -> VertexId {
        self.reversed().start(g)
    }

    fn is_inverse_of(self, other: Self) -> bool {
        self.edge == other.edge && self.forward != other.forward
    }
}

// forward before backward
impl Ord for OrientedEdge {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.edge, !self.forward).cmp(&(other.edge, !other.forward))
    }
}

impl PartialOrd for OrientedEdge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OrientedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge, if self.forward { "" } else { "~" })
    }
}

/// An element of `Π₁(X)`: a reduced word from `source` to `range`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    source: VertexId,
    range: VertexId,
    word: Vec<OrientedEdge>,
}

impl Arrow {
    pub fn unit(v: VertexId) -> Self {
        Self { source: v, range: v, word: Vec::new() }
    }

    /// The single-segment arrow traversing `edge` in the given direction.
    pub fn segment(g: &MultiGraph, edge: EdgeId, forward: bool) -> Self {
        let seg = OrientedEdge { edge, forward };
        Self { source: seg.start(g), range: seg.end(g), word: vec![seg] }
    }

    /// Reduces a word given in traversal order (first segment first).
    pub fn from_traversal(g: &MultiGraph, start: VertexId, raw: &[OrientedEdge]) -> Result<Self> {
        reduce(g, raw, start)
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    /// Right-to-left: `word()[len-1]` is traversed first.
    pub fn word(&self) -> &[OrientedEdge] {
        &self.word
    }

    #[allow(clippy::len_without_is_empty)] // units have length zero; see is_unit
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_unit(&self) -> bool {
        self.word.is_empty()
    }

    pub fn is_loop_at(&self, x: VertexId) -> bool {
        self.source == x && self.range == x
    }

    /// Segments in the order they are traversed.
    pub fn traversal(&self) -> impl Iterator<Item = OrientedEdge> + '_ {
        self.word.iter().rev().copied()
    }

    pub fn inverse(&self) -> Self {
        inverse(self)
    }

    /// Whether no adjacent pair of segments cancels.
    pub fn is_reduced(&self) -> bool {
        self.word.windows(2).all(|w| !w[0].is_inverse_of(w[1]))
    }
}

impl Ord for Arrow {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
            .then_with(|| self.source.cmp(&other.source))
            .then_with(|| self.range.cmp(&other.range))
    }
}

impl PartialOrd for Arrow {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `"r<-s: e2.e1~"`, segments left to right in arrow order; units print `1`.
impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<-{}: ", self.range, self.source)?;
        if self.word.is_empty() {
            return write!(f, "1");
        }
        for (i, seg) in self.word.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{seg}")?;
        }
        Ok(())
    }
}

/// Free reduction of a concatenable word given in traversal order.
///
/// Uses a stack, so every cancellation order ends in the same normal form.
pub fn reduce(g: &MultiGraph, raw: &[OrientedEdge], start: VertexId) -> Result<Arrow> {
    let mut at = start;
    let mut stack: Vec<OrientedEdge> = Vec::with_capacity(raw.len());
    for (step, &seg) in raw.iter().enumerate() {
        if seg.edge.0 >= g.edge_count() || seg.start(g) != at {
            return Err(Error::NonConcatenable { step });
        }
        at = seg.end(g);
        match stack.last() {
            Some(&top) if top.is_inverse_of(seg) => {
                stack.pop();
            }
            _ => stack.push(seg),
        }
    }
    stack.reverse();
    Ok(Arrow { source: start, range: at, word: stack })
}

fn check_composable(gamma: &Arrow, eta: &Arrow) -> Result<()> {
    if gamma.source != eta.range {
        return Err(Error::NotComposable { source_vertex: gamma.source.0, range_vertex: eta.range.0 });
    }
    Ok(())
}

/// `γη`: first `eta`, then `gamma`. Requires `s(γ) = r(η)`.
pub fn compose(gamma: &Arrow, eta: &Arrow) -> Result<Arrow> {
    check_composable(gamma, eta)?;
    let mut word = gamma.word.clone();
    let mut k = 0;
    while let (Some(&last), Some(&next)) = (word.last(), eta.word.get(k)) {
        if !last.is_inverse_of(next) {
            break;
        }
        word.pop();
        k += 1;
    }
    word.extend_from_slice(&eta.word[k..]);
    Ok(Arrow { source: eta.source, range: gamma.range, word })
}

/// Concatenation without cancellation. The result is generally not a valid
/// (reduced) arrow; exists so verification code can be mutation-tested.
pub fn compose_unreduced(gamma: &Arrow, eta: &Arrow) -> Result<Arrow> {
    check_composable(gamma, eta)?;
    let mut word = gamma.word.clone();
    word.extend_from_slice(&eta.word);
    Ok(Arrow { source: eta.source, range: gamma.range, word })
}

pub fn inverse(gamma: &Arrow) -> Arrow {
    Arrow { source: gamma.range, range: gamma.source, word: gamma.word.iter().rev().map(|s| s.reversed()).collect() }
}

/// Oriented edges leaving each vertex, ascending; a loop contributes both orientations.
pub fn outgoing(g: &MultiGraph) -> Vec<Vec<OrientedEdge>> {
    let mut out = vec![Vec::new(); g.vertex_count()];
    for e in g.edges() {
        out[e.src.0].push(OrientedEdge { edge: e.id, forward: true });
        out[e.dst.0].push(OrientedEdge { edge: e.id, forward: false });
    }
    for list in &mut out {
        list.sort();
    }
    out
}

/// Reduced arrows starting at `start` of length at most `max_len`, unsorted.
pub fn enumerate_from(g: &MultiGraph, start: VertexId, max_len: usize) -> Vec<Arrow> {
    let out = outgoing(g);
    let mut result = vec![Arrow::unit(start)];
    // traversal-order words
    let mut frontier: Vec<(VertexId, Vec<OrientedEdge>)> = vec![(start, Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (at, path) in &frontier {
            for &seg in &out[at.0] {
                if path.last().is_some_and(|&last| last.is_inverse_of(seg)) {
                    continue;
                }
                let mut p = path.clone();
                p.push(seg);
                let end = seg.end(g);
                result.push(Arrow { source: start, range: end, word: p.iter().rev().copied().collect() });
                next.push((end, p));
            }
        }
        frontier = next;
    }
    result
}

/// Every reduced arrow of length at most `max_len`, sorted by length, then
/// word, then source.
pub fn enumerate_ball(g: &MultiGraph, max_len: usize) -> Vec<Arrow> {
    let mut all: Vec<Arrow> = g.vertices().flat_map(|v| enumerate_from(g, v, max_len)).collect();
    all.sort();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fwd(e: usize) -> OrientedEdge {
        OrientedEdge::new(e, true)
    }
    fn bwd(e: usize) -> OrientedEdge {
        OrientedEdge::new(e, false)
    }

    /// Oracle: repeatedly cancels the leftmost or rightmost adjacent inverse pair.
    fn reduce_by_scanning(raw: &[OrientedEdge], leftmost: bool) -> Vec<OrientedEdge> {
        let mut w = raw.to_vec();
        loop {
            let pairs: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&i| w[i].is_inverse_of(w[i + 1])).collect();
            let pick = if leftmost { pairs.first() } else { pairs.last() };
            match pick {
                Some(&i) => {
                    w.drain(i..i + 2);
                }
                None => return w,
            }
        }
    }

    #[test]
    fn reduce_examples() {
        let r1 = MultiGraph::rose(1);
        let v = VertexId(0);
        assert_eq!(reduce(&r1, &[fwd(0), bwd(0)], v).unwrap(), Arrow::unit(v));
        let d2 = MultiGraph::dipole(2);
        assert_eq!(reduce(&d2, &[bwd(0), fwd(0)], VertexId(1)).unwrap(), Arrow::unit(VertexId(1)));
        let r2 = MultiGraph::rose(2);
        let a = reduce(&r2, &[fwd(0), fwd(1), bwd(1)], v).unwrap();
        assert_eq!(a.word(), &[fwd(0)]);
        assert_eq!(reduce_by_scanning(&[fwd(0), fwd(1), bwd(1)], true), vec![fwd(0)]);
        assert_eq!(reduce_by_scanning(&[fwd(0), fwd(1), bwd(1)], false), vec![fwd(0)]);
    }

    #[test]
    fn reduce_rejects_broken_paths() {
        let d2 = MultiGraph::dipole(2);
        // e0 forward goes 0 -> 1; a second forward step would need to start at 0
        assert_eq!(reduce(&d2, &[fwd(0), fwd(1)], VertexId(0)), Err(Error::NonConcatenable { step: 1 }));
        assert_eq!(reduce(&d2, &[fwd(0)], VertexId(1)), Err(Error::NonConcatenable { step: 0 }));
    }

    #[test]
    fn compose_examples() {
        let r1 = MultiGraph::rose(1);
        let a = Arrow::segment(&r1, EdgeId(0), true);
        let a2 = compose(&a, &a).unwrap();
        assert_eq!(a2.word(), &[fwd(0), fwd(0)]);
        assert_eq!(compose(&a, &Arrow::unit(a.source())).unwrap(), a);

        let d2 = MultiGraph::dipole(2);
        let e0 = Arrow::segment(&d2, EdgeId(0), true); // p -> q
        let back = e0.inverse(); // q -> p
        let u = compose(&back, &e0).unwrap();
        assert_eq!(u, Arrow::unit(VertexId(0)));
        assert!(matches!(compose(&e0, &e0), Err(Error::NotComposable { .. })));
    }

    #[test]
    fn inverse_examples() {
        let v = VertexId(0);
        assert_eq!(Arrow::unit(v).inverse(), Arrow::unit(v));
        let r1 = MultiGraph::rose(1);
        let a = Arrow::segment(&r1, EdgeId(0), true);
        let a2 = compose(&a, &a).unwrap();
        assert_eq!(a2.inverse().word(), &[bwd(0), bwd(0)]);
        let d2 = MultiGraph::dipole(2);
        let e1 = Arrow::segment(&d2, EdgeId(1), true);
        let inv = e1.inverse();
        assert_eq!((inv.range(), inv.source()), (VertexId(0), VertexId(1)));
        assert_eq!(inv.word(), &[bwd(1)]);
    }

    #[test]
    fn ball_examples() {
        let r1 = MultiGraph::rose(1);
        let ball = enumerate_ball(&r1, 2);
        let words: Vec<Vec<OrientedEdge>> = ball.iter().map(|a| a.word().to_vec()).collect();
        assert_eq!(words, vec![vec![], vec![fwd(0)], vec![bwd(0)], vec![fwd(0), fwd(0)], vec![bwd(0), bwd(0)]]);
        let c3 = MultiGraph::cycle(3);
        let units = enumerate_ball(&c3, 0);
        assert_eq!(units.len(), 3);
        assert!(units.iter().all(Arrow::is_unit));
        assert_eq!(enumerate_ball(&MultiGraph::rose(2), 1).len(), 5);
    }

    #[test]
    fn ball_counts_match_reduced_word_counts() {
        // rose with k loops: 1 + 2k * sum_{i<L} (2k-1)^i
        for k in 1..=3usize {
            for l in 0..=4u32 {
                let expected: usize = 1 + (0..l).map(|i| 2 * k * (2 * k - 1).pow(i)).sum::<usize>();
                assert_eq!(enumerate_ball(&MultiGraph::rose(k), l as usize).len(), expected);
            }
        }
    }

    #[test]
    fn display_form() {
        let d2 = MultiGraph::dipole(2);
        let g = Arrow::from_traversal(&d2, VertexId(0), &[fwd(1), bwd(0)]).unwrap();
        assert_eq!(g.to_string(), "0<-0: e0~.e1");
        assert_eq!(Arrow::unit(VertexId(1)).to_string(), "1<-1: 1");
    }

    #[test]
    fn composition_laws_on_ball() {
        let g = MultiGraph::new(2, &[(0, 1), (1, 1), (1, 0)]).unwrap();
        let ball = enumerate_ball(&g, 2);
        for a in &ball {
            assert!(a.is_reduced());
            let inv = a.inverse();
            assert_eq!(compose(a, &inv).unwrap(), Arrow::unit(a.range()));
            assert_eq!(compose(&inv, a).unwrap(), Arrow::unit(a.source()));
            for b in ball.iter().filter(|b| b.range() == a.source()) {
                let ab = compose(a, b).unwrap();
                for c in ball.iter().filter(|c| c.range() == b.source()) {
                    let left = compose(&ab, c).unwrap();
                    let right = compose(a, &compose(b, c).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn random_walk(g: &MultiGraph, start: VertexId, choices: &[usize]) -> Vec<OrientedEdge> {
            let out = outgoing(g);
            let mut at = start;
            let mut w = Vec::new();
            for &c in choices {
                let seg = out[at.0][c % out[at.0].len()];
                w.push(seg);
                at = seg.end(g);
            }
            w
        }

        proptest! {
            #[test]
            fn normal_form_is_confluent(choices in prop::collection::vec(0usize..8, 0..=12), start in 0usize..3) {
                let g = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0), (1, 1), (0, 2)]).unwrap();
                let raw = random_walk(&g, VertexId(start), &choices);
                let arrow = reduce(&g, &raw, VertexId(start)).unwrap();
                let traversal: Vec<_> = arrow.traversal().collect();
                prop_assert_eq!(&traversal, &reduce_by_scanning(&raw, true));
                prop_assert_eq!(&traversal, &reduce_by_scanning(&raw, false));
                prop_assert!(arrow.is_reduced());
            }

            #[test]
            fn compose_matches_reducing_the_concatenation(
                c1 in prop::collection::vec(0usize..8, 0..=6),
                c2 in prop::collection::vec(0usize..8, 0..=6),
            ) {
                let g = MultiGraph::rose(2);
                let v = VertexId(0);
                let w1 = random_walk(&g, v, &c1);
                let w2 = random_walk(&g, v, &c2);
                let eta = reduce(&g, &w1, v).unwrap();
                let gamma = reduce(&g, &w2, v).unwrap();
                let mut both = w1.clone();
                both.extend_from_slice(&w2);
                prop_assert_eq!(compose(&gamma, &eta).unwrap(), reduce(&g, &both, v).unwrap());
            }
        }
    }
}
