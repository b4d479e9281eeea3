//! The transversal `G^x = r⁻¹(x)` of `Π₁(X)` as the universal cover of `X`.
//!
//! The covering map is the source map restricted to `G^x`. Fibers are
//! infinite as soon as `π₁` is nontrivial, so everything here works on balls
//! of an explicit word-length radius.

use crate::edgepath::{self, compose, Arrow, OrientedEdge};
use crate::graphspace::{pi1_rank, spanning_tree, MultiGraph, SpanningTree, VertexId};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct Transversal<'g> {
    graph: &'g MultiGraph,
    base: VertexId,
}

pub fn transversal(g: &MultiGraph, x: VertexId) -> Result<Transversal<'_>> {
    Transversal::new(g, x)
}

impl<'g> Transversal<'g> {
    pub fn new(graph: &'g MultiGraph, base: VertexId) -> Result<Self> {
        if !graph.contains(base) {
            return Err(Error::BadBasePoint(base));
        }
        Ok(Self { graph, base })
    }

    pub fn graph(&self) -> &'g MultiGraph {
        self.graph
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn contains(&self, a: &Arrow) -> bool {
        a.range() == self.base
    }

    /// The covering map `G^x → X`.
    pub fn covering_map(&self, a: &Arrow) -> VertexId {
        a.source()
    }

    /// Arrows with range `x` of length at most `radius`, in ball order.
    pub fn ball(&self, radius: usize) -> Vec<Arrow> {
        let mut arrows: Vec<Arrow> =
            edgepath::enumerate_from(self.graph, self.base, radius).iter().map(Arrow::inverse).collect();
        arrows.sort();
        arrows
    }

    /// `G^x_u` truncated to `radius`.
    pub fn fiber(&self, u: VertexId, radius: usize) -> Vec<Arrow> {
        self.ball(radius).into_iter().filter(|a| a.source() == u).collect()
    }

    /// The spanning tree rooted at the base point.
    pub fn tree(&self) -> SpanningTree {
        spanning_tree(self.graph, self.base)
    }
}

/// One arrow `c_u : u → x` for every vertex `u`, with `c_x` the unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    base: VertexId,
    arrows: Vec<Arrow>,
}

impl Section {
    /// Arbitrary choice of arrows; `arrows[u]` must go from `u` to `base`.
    /// `c_x` need not be the unit here, which is what section-independence
    /// checks rely on.
    pub fn from_arrows(base: VertexId, arrows: Vec<Arrow>) -> Result<Self> {
        for (u, c) in arrows.iter().enumerate() {
            if c.source() != VertexId(u) || c.range() != base {
                return Err(Error::BadSection(format!("arrow for vertex {u} is {c}")));
            }
        }
        if base.0 >= arrows.len() {
            return Err(Error::BadSection(format!("base {base} has no arrow")));
        }
        Ok(Self { base, arrows })
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn arrow(&self, u: VertexId) -> &Arrow {
        &self.arrows[u.0]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    /// Another section `u ↦ ρ_u c_u`, each `ρ_u` a loop at the base.
    pub fn retranslated(&self, loops: &[Arrow]) -> Result<Self> {
        let arrows = self
            .arrows
            .iter()
            .zip(loops)
            .map(|(c, rho)| {
                if !rho.is_loop_at(self.base) {
                    return Err(Error::BadSection(format!("{rho} is not a loop at {}", self.base)));
                }
                compose(rho, c)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_arrows(self.base, arrows)
    }
}

/// Tree geodesics `c_u` from each vertex to the root of `tree`.
pub fn section(t: &Transversal<'_>, tree: &SpanningTree) -> Result<Section> {
    if tree.root() != t.base() {
        return Err(Error::BadSection(format!("tree is rooted at {}, transversal at {}", tree.root(), t.base())));
    }
    let g = t.graph();
    let arrows = g
        .vertices()
        .map(|u| {
            let mut walk = Vec::with_capacity(tree.depth(u));
            let mut at = u;
            while let Some(link) = tree.parent(at) {
                // child -> parent
                walk.push(OrientedEdge { edge: link.edge, forward: !link.from_parent });
                at = link.parent;
            }
            Arrow::from_traversal(g, u, &walk)
        })
        .collect::<Result<Vec<_>>>()?;
    Section::from_arrows(t.base(), arrows)
}

/// Left multiplication of the isotropy group `π₁(X, x)` on `G^x`.
#[derive(Clone, Debug)]
pub struct DeckAction {
    base: VertexId,
    generators: Vec<Arrow>,
}

impl DeckAction {
    pub fn new(t: &Transversal<'_>, tree: &SpanningTree) -> Result<Self> {
        Ok(Self { base: t.base(), generators: pi1_generators(t, tree)? })
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn generators(&self) -> &[Arrow] {
        &self.generators
    }

    /// Generators followed by their inverses.
    pub fn symmetric_generators(&self) -> Vec<Arrow> {
        let mut all = self.generators.clone();
        all.extend(self.generators.iter().map(Arrow::inverse));
        all
    }

    pub fn act(&self, rho: &Arrow, y: &Arrow) -> Result<Arrow> {
        deck_act(self.base, rho, y)
    }
}

/// One loop `c_{dst(e)} · e · c_{src(e)}⁻¹` at `x` per non-tree edge `e`,
/// in ascending edge order.
pub fn pi1_generators(t: &Transversal<'_>, tree: &SpanningTree) -> Result<Vec<Arrow>> {
    let sec = section(t, tree)?;
    let g = t.graph();
    let generators: Vec<Arrow> = g
        .edges()
        .iter()
        .filter(|e| !tree.contains_edge(e.id))
        .map(|e| {
            let through = Arrow::segment(g, e.id, true);
            compose(sec.arrow(e.dst), &compose(&through, &sec.arrow(e.src).inverse())?)
        })
        .collect::<Result<_>>()?;
    debug_assert_eq!(generators.len(), pi1_rank(g));
    Ok(generators)
}

/// `ρ · y` for a loop `ρ` at `x` and `y ∈ G^x`.
pub fn deck_act(x: VertexId, rho: &Arrow, y: &Arrow) -> Result<Arrow> {
    if !rho.is_loop_at(x) {
        return Err(Error::NotComposable { source_vertex: rho.source().0, range_vertex: x.0 });
    }
    if y.range() != x {
        return Err(Error::NotComposable { source_vertex: x.0, range_vertex: y.range().0 });
    }
    compose(rho, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphspace::EdgeId;

    fn fwd(e: usize) -> OrientedEdge {
        OrientedEdge::new(e, true)
    }
    fn bwd(e: usize) -> OrientedEdge {
        OrientedEdge::new(e, false)
    }

    #[test]
    fn transversal_examples() {
        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        assert_eq!(t.fiber(VertexId(0), 2).len(), 5);

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let over_q = t.fiber(VertexId(1), 1);
        assert_eq!(over_q.len(), 2);
        assert!(over_q.iter().all(|a| a.len() == 1 && a.range() == VertexId(0)));
        assert_eq!(t.fiber(VertexId(0), 1), vec![Arrow::unit(VertexId(0))]);

        let tree = MultiGraph::path(4);
        let t = transversal(&tree, VertexId(1)).unwrap();
        for u in tree.vertices() {
            assert_eq!(t.fiber(u, 6).len(), 1);
        }
        assert_eq!(transversal(&tree, VertexId(4)).unwrap_err(), Error::BadBasePoint(VertexId(4)));
    }

    #[test]
    fn section_examples() {
        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        assert_eq!(sec.arrow(VertexId(0)), &Arrow::unit(VertexId(0)));
        assert_eq!(sec.arrow(VertexId(1)).word(), &[bwd(0)]);

        let c3 = MultiGraph::cycle(3);
        let t = transversal(&c3, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let c2 = sec.arrow(VertexId(2));
        assert_eq!(c2.traversal().collect::<Vec<_>>(), vec![bwd(1), bwd(0)]);
        assert_eq!((c2.source(), c2.range()), (VertexId(2), VertexId(0)));
    }

    #[test]
    fn generator_examples() {
        let r1 = MultiGraph::rose(1);
        let t = transversal(&r1, VertexId(0)).unwrap();
        assert_eq!(pi1_generators(&t, &t.tree()).unwrap(), vec![Arrow::segment(&r1, EdgeId(0), true)]);

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let gens = pi1_generators(&t, &t.tree()).unwrap();
        assert_eq!(gens.len(), 1);
        assert!(gens[0].is_loop_at(VertexId(0)));
        // traverse e1 then e0 backwards
        assert_eq!(gens[0].traversal().collect::<Vec<_>>(), vec![fwd(1), bwd(0)]);

        let c3 = MultiGraph::cycle(3);
        let t = transversal(&c3, VertexId(0)).unwrap();
        let gens = pi1_generators(&t, &t.tree()).unwrap();
        assert_eq!(gens.len(), 1);
        // traverse e2 backwards, then e1 and e0 backwards: c_1 e2... written as a cycle
        assert_eq!(gens[0].len(), 3);
        assert!(gens[0].is_loop_at(VertexId(0)));
    }

    #[test]
    fn deck_examples() {
        let r1 = MultiGraph::rose(1);
        let x = VertexId(0);
        let a = Arrow::segment(&r1, EdgeId(0), true);
        assert_eq!(deck_act(x, &Arrow::unit(x), &a).unwrap(), a);
        assert_eq!(deck_act(x, &a, &a).unwrap().word(), &[fwd(0), fwd(0)]);

        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, x).unwrap();
        let not_loop = Arrow::segment(&d2, EdgeId(0), false);
        assert!(deck_act(x, &not_loop, &Arrow::unit(x)).is_err());
        let deck = DeckAction::new(&t, &t.tree()).unwrap();
        let ball = t.ball(3);
        for rho in deck.symmetric_generators() {
            for y in &ball {
                assert_eq!(deck.act(&rho, y).unwrap().source(), y.source());
            }
        }
    }

    #[test]
    fn deck_action_is_free_and_transitive_on_fibers() {
        let g = MultiGraph::new(3, &[(0, 1), (1, 2), (2, 0), (1, 1), (0, 2)]).unwrap();
        for x in g.vertices() {
            let t = transversal(&g, x).unwrap();
            let ball = t.ball(3);
            for y in &ball {
                for z in &ball {
                    let rho = compose(y, &z.inverse());
                    if y.source() == z.source() {
                        let rho = rho.unwrap();
                        assert!(rho.is_loop_at(x));
                        assert_eq!(&deck_act(x, &rho, z).unwrap(), y);
                    } else {
                        assert!(rho.is_err());
                    }
                }
            }
        }
    }

    #[test]
    fn section_is_a_fundamental_domain() {
        let g = MultiGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 3), (2, 2)]).unwrap();
        let t = transversal(&g, VertexId(2)).unwrap();
        let tree = t.tree();
        let sec = section(&t, &tree).unwrap();
        let ball = t.ball(4);
        for u in g.vertices() {
            let tree_supported: Vec<_> = ball
                .iter()
                .filter(|a| a.source() == u && a.word().iter().all(|s| tree.contains_edge(s.edge)))
                .collect();
            assert_eq!(tree_supported, vec![sec.arrow(u)]);
        }
    }

    #[test]
    fn groupoid_is_transitive() {
        let g = MultiGraph::new(4, &[(0, 1), (2, 1), (3, 2), (3, 3)]).unwrap();
        let ball = edgepath::enumerate_ball(&g, 3);
        for u in g.vertices() {
            for w in g.vertices() {
                assert!(ball.iter().any(|a| a.source() == u && a.range() == w));
            }
        }
    }

    #[test]
    fn retranslated_sections_stay_valid() {
        let d2 = MultiGraph::dipole(2);
        let t = transversal(&d2, VertexId(0)).unwrap();
        let sec = section(&t, &t.tree()).unwrap();
        let gen = pi1_generators(&t, &t.tree()).unwrap().remove(0);
        let moved = sec.retranslated(&[Arrow::unit(VertexId(0)), gen.clone()]).unwrap();
        assert_eq!(moved.arrow(VertexId(1)), &compose(&gen, sec.arrow(VertexId(1))).unwrap());
        assert!(sec.retranslated(&[sec.arrow(VertexId(1)).clone(), gen]).is_err());
    }
}
