//! Complete EF[1,1] allocations for any number of agents with identical
//! additive valuations on a path: build an auxiliary graph whose edges
//! are a disjoint union of vertex-disjoint cliques (size <= n) and one
//! Hamiltonian cycle, n-color it (such graphs always are n-colorable),
//! and read the bundles off the color classes restricted to real items.
//!
//! Items are re-ranked by non-increasing value; blocks of n consecutive
//! ranks form the cliques, so every agent gets exactly one item per
//! block and an item-for-item comparison bounds the envy by one good
//! plus one chore. Path edges become cycle edges, except that a path
//! edge inside one block (a "special pair") would collide with a clique
//! edge, so it is spliced through a nine-vertex gadget that carries the
//! cycle between the two endpoints while staying simple.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::json;

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::value::Rat;

/// A vertex of the auxiliary graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HVertex {
    /// Original item, by item index.
    Item(usize),
    /// Zero-valued padding item (index within the dummy run).
    Dummy(usize),
    /// Gadget vertex: (gadget number, position 1..=9).
    Gadget(usize, usize),
}

/// The auxiliary graph: a set of vertex-disjoint cliques plus one
/// Hamiltonian cycle, edge-disjoint from the cliques.
#[derive(Debug, Clone)]
pub struct CliqueCycleGraph {
    pub vertices: Vec<HVertex>,
    /// Vertex-disjoint cliques, each of size at most n.
    pub cliques: Vec<Vec<usize>>,
    /// The Hamiltonian cycle, as normalized vertex pairs.
    pub cycle_edges: BTreeSet<(usize, usize)>,
}

impl CliqueCycleGraph {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    fn edge(a: usize, b: usize) -> (usize, usize) {
        (a.min(b), a.max(b))
    }

    /// All edges, cliques expanded, cycle included.
    pub fn all_edges(&self) -> BTreeSet<(usize, usize)> {
        let mut edges = self.cycle_edges.clone();
        for clique in &self.cliques {
            for (i, &a) in clique.iter().enumerate() {
                for &b in &clique[i + 1..] {
                    edges.insert(Self::edge(a, b));
                }
            }
        }
        edges
    }

    /// Structural audit: cliques pairwise vertex-disjoint and of size at
    /// most n, cycle edges disjoint from clique edges, and the cycle
    /// edges form a single Hamiltonian cycle over all vertices.
    pub fn validate(&self, n: usize) -> Result<()> {
        let v = self.num_vertices();
        let mut seen = vec![false; v];
        let mut clique_edges = BTreeSet::new();
        for clique in &self.cliques {
            if clique.len() > n {
                return Err(Error::Precondition(format!(
                    "clique of size {} exceeds {n}",
                    clique.len()
                )));
            }
            for (i, &a) in clique.iter().enumerate() {
                if a >= v || std::mem::replace(&mut seen[a], true) {
                    return Err(Error::Precondition(format!(
                        "vertex {a} appears in two cliques or is out of range"
                    )));
                }
                for &b in &clique[i + 1..] {
                    clique_edges.insert(Self::edge(a, b));
                }
            }
        }
        if let Some(e) = self.cycle_edges.intersection(&clique_edges).next() {
            return Err(Error::Precondition(format!("edge {e:?} is both clique and cycle")));
        }
        // degree two everywhere, and one closed walk covers everything
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); v];
        for &(a, b) in &self.cycle_edges {
            if a >= v || b >= v || a == b {
                return Err(Error::Precondition(format!("bad cycle edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if let Some(bad) = (0..v).find(|&x| adj[x].len() != 2) {
            return Err(Error::Precondition(format!(
                "vertex {bad} has cycle degree {}",
                adj[bad].len()
            )));
        }
        let mut visited = 1usize;
        let (mut prev, mut cur) = (0usize, adj[0][0]);
        while cur != 0 {
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = next;
            visited += 1;
            if visited > v {
                break;
            }
        }
        if visited != v {
            return Err(Error::Precondition(format!(
                "cycle edges split into more than one cycle ({visited} of {v} vertices)"
            )));
        }
        Ok(())
    }

    /// Cycle traversal order starting from vertex 0 (toward its
    /// smaller-numbered cycle neighbor).
    fn cycle_order(&self) -> Vec<usize> {
        let v = self.num_vertices();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); v];
        for &(a, b) in &self.cycle_edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for nbrs in adj.iter_mut() {
            nbrs.sort_unstable();
        }
        let mut order = vec![0usize];
        let (mut prev, mut cur) = (0usize, adj[0][0]);
        while cur != 0 {
            order.push(cur);
            let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
            prev = cur;
            cur = next;
        }
        order
    }

    /// JSON dump of the structure for inspection.
    pub fn to_debug_json(&self) -> serde_json::Value {
        let vertices: Vec<serde_json::Value> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(id, v)| match v {
                HVertex::Item(o) => json!({"id": id, "kind": "item", "item": o}),
                HVertex::Dummy(k) => json!({"id": id, "kind": "dummy", "ordinal": k}),
                HVertex::Gadget(g, p) => json!({"id": id, "kind": "gadget", "gadget": g, "position": p}),
            })
            .collect();
        json!({
            "vertices": vertices,
            "cliques": self.cliques,
            "cycle": self.cycle_edges.iter().map(|&(a, b)| vec![a, b]).collect::<Vec<_>>(),
        })
    }
}

/// The auxiliary graph plus the bookkeeping needed to extract and check
/// allocations.
#[derive(Debug, Clone)]
pub struct PathReduction {
    pub h: CliqueCycleGraph,
    pub num_agents: usize,
    pub num_real_items: usize,
    pub num_dummies: usize,
    /// Chain (path + dummy extension) in path order, as H vertex ids.
    pub chain: Vec<usize>,
    /// 1-based preference rank per chain vertex id (real items and
    /// dummies; gadget vertices have no rank).
    pub rank: BTreeMap<usize, usize>,
    /// Path-adjacent same-group pairs spliced through gadgets.
    pub special_pairs: Vec<(usize, usize)>,
    /// Whether the closing path-extreme pair needed a gadget too.
    pub closing_gadget: bool,
}

impl PathReduction {
    /// 0-based rank group of a chain vertex.
    pub fn group_of(&self, vertex: usize) -> usize {
        (self.rank[&vertex] - 1) / self.num_agents
    }

    pub fn num_groups(&self) -> usize {
        (self.num_real_items + self.num_dummies) / self.num_agents
    }
}

/// Builds the cycle-plus-cliques graph for a path instance with
/// identical additive valuations and n >= 3 agents. Up to n-1 zero-value
/// dummy items extend the path at its higher-indexed endpoint so the
/// item count is a multiple of n; ranks order items by non-increasing
/// value (ties by index, dummies after real items).
pub fn build_clique_cycle(instance: &Instance, n: usize) -> Result<PathReduction> {
    if n < 3 {
        return Err(Error::WrongSolver(
            "the cycle-plus-cliques construction needs n >= 3 agents (use the two-agent solvers)"
                .into(),
        ));
    }
    if !instance.valuations().is_identical() || !instance.valuations().is_additive() {
        return Err(Error::WrongSolver(
            "the construction needs identical additive valuations".into(),
        ));
    }
    let Some(mut path) = instance.graph().path_order() else {
        return Err(Error::WrongSolver("the conflict graph is not a path".into()));
    };
    // dummies extend the higher-indexed extreme
    if path.first() > path.last() {
        path.reverse();
    }
    let m = instance.num_items();
    let d = (n - m % n) % n;

    let mut values: Vec<Rat> = Vec::with_capacity(m + d);
    for o in 0..m {
        values.push(instance.value(0, &BTreeSet::from([o]))?);
    }
    values.extend(std::iter::repeat(Rat::from_integer(0.into())).take(d));

    // chain vertex ids: real item o <-> id o, dummy k <-> id m + k
    let mut vertices: Vec<HVertex> = (0..m).map(HVertex::Item).collect();
    vertices.extend((0..d).map(HVertex::Dummy));
    let chain: Vec<usize> = path.iter().copied().chain(m..m + d).collect();

    let mut by_pref: Vec<usize> = (0..m + d).collect();
    by_pref.sort_by(|&a, &b| values[b].cmp(&values[a]).then(a.cmp(&b)));
    let rank: BTreeMap<usize, usize> =
        by_pref.iter().enumerate().map(|(pos, &id)| (id, pos + 1)).collect();
    let group = |id: usize| (rank[&id] - 1) / n;

    // rank-block cliques
    let mut cliques: Vec<Vec<usize>> = Vec::new();
    for g in 0..(m + d) / n {
        cliques.push(by_pref[g * n..(g + 1) * n].to_vec());
    }

    let mut cycle_edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut special_pairs = Vec::new();
    let mut splice = |a: usize,
                      b: usize,
                      vertices: &mut Vec<HVertex>,
                      cliques: &mut Vec<Vec<usize>>,
                      cycle_edges: &mut BTreeSet<(usize, usize)>| {
        let gadget = special_pairs.len();
        let base = vertices.len();
        vertices.extend((1..=9).map(|p| HVertex::Gadget(gadget, p)));
        let gv = |p: usize| base + p - 1; // gadget position 1..=9
        cliques.push(vec![gv(1), gv(2), gv(3)]);
        cliques.push(vec![gv(4), gv(5), gv(6)]);
        cliques.push(vec![gv(7), gv(8), gv(9)]);
        // internal cycle path g1-g7-g4-g9-g6-g8-g3-g5-g2 plus connectors
        let internal = [(1, 7), (7, 4), (4, 9), (9, 6), (6, 8), (8, 3), (3, 5), (5, 2)];
        for (p, q) in internal {
            cycle_edges.insert(CliqueCycleGraph::edge(gv(p), gv(q)));
        }
        cycle_edges.insert(CliqueCycleGraph::edge(a, gv(1)));
        cycle_edges.insert(CliqueCycleGraph::edge(gv(2), b));
        special_pairs.push((a, b));
    };

    for w in chain.windows(2) {
        let (a, b) = (w[0], w[1]);
        if group(a) == group(b) {
            splice(a, b, &mut vertices, &mut cliques, &mut cycle_edges);
        } else {
            cycle_edges.insert(CliqueCycleGraph::edge(a, b));
        }
    }
    // close the Hamiltonian cycle between the chain extremes; a gadget is
    // needed exactly when a direct edge would collide with an existing one
    let (first, last) = (chain[0], *chain.last().unwrap());
    let closing_gadget = group(first) == group(last)
        || cycle_edges.contains(&CliqueCycleGraph::edge(first, last));
    if closing_gadget {
        splice(last, first, &mut vertices, &mut cliques, &mut cycle_edges);
    } else {
        cycle_edges.insert(CliqueCycleGraph::edge(last, first));
    }

    let h = CliqueCycleGraph { vertices, cliques, cycle_edges };
    h.validate(n)?;
    let red = PathReduction {
        h,
        num_agents: n,
        num_real_items: m,
        num_dummies: d,
        chain,
        rank,
        special_pairs,
        closing_gadget,
    };
    // the auxiliary graph must contain every conflict of the path
    for (a, b) in instance.graph().edges() {
        let all = red.h.all_edges();
        if !all.contains(&CliqueCycleGraph::edge(a, b)) && !red.special_pairs.contains(&(a, b))
            && !red.special_pairs.contains(&(b, a))
        {
            return Err(Error::Precondition(format!(
                "path edge ({a},{b}) is neither in the auxiliary graph nor spliced"
            )));
        }
    }
    Ok(red)
}

/// Proper n-coloring of a cycle-plus-cliques graph, by exhaustive
/// backtracking along the Hamiltonian cycle with the first full clique
/// pinned to colors 0..n-1 (any proper coloring can be relabeled to
/// match, so this only breaks color symmetry). Such graphs are always
/// n-colorable, so the search succeeds on every valid input.
pub fn color_clique_cycle(h: &CliqueCycleGraph, n: usize) -> Result<Vec<usize>> {
    h.validate(n)?;
    let v = h.num_vertices();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); v];
    for &(a, b) in &h.cycle_edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    // cliques are vertex-disjoint, so each vertex has at most one
    let mut clique_of = vec![usize::MAX; v];
    for (ci, clique) in h.cliques.iter().enumerate() {
        for (i, &a) in clique.iter().enumerate() {
            clique_of[a] = ci;
            for &b in &clique[i + 1..] {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
    }

    let full: u32 = if n >= 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut search = ColorSearch {
        n,
        adj: &adj,
        clique_of: &clique_of,
        cliques: &h.cliques,
        color: vec![usize::MAX; v],
        candidates: vec![full; v],
        trail: Vec::new(),
    };
    if let Some(pin) = h.cliques.iter().find(|c| c.len() == n) {
        for (c, &vertex) in pin.iter().enumerate() {
            if !search.place(vertex, c) {
                return Err(Error::Precondition(
                    "pinning the first clique already failed; input is not colorable".into(),
                ));
            }
        }
    }
    let order: Vec<usize> =
        h.cycle_order().into_iter().filter(|&x| search.color[x] == usize::MAX).collect();
    if !search.assign(&order, 0) {
        return Err(Error::Precondition(
            "no proper coloring found; the input is not a valid cycle-plus-cliques graph".into(),
        ));
    }
    Ok(search.color)
}

/// Backtracking state with forward checking: uncolored vertices keep a
/// candidate-color mask that shrinks as neighbors are colored, and a
/// pigeonhole check per clique fails early when the uncolored members
/// jointly have fewer candidate colors than members.
struct ColorSearch<'a> {
    n: usize,
    adj: &'a [Vec<usize>],
    clique_of: &'a [usize],
    cliques: &'a [Vec<usize>],
    color: Vec<usize>,
    candidates: Vec<u32>,
    trail: Vec<(usize, u32)>,
}

impl ColorSearch<'_> {
    /// Colors a vertex and propagates; returns false (with the trail
    /// still recording every change for the caller to unwind) on a
    /// wipe-out or a clique pigeonhole failure.
    fn place(&mut self, vertex: usize, c: usize) -> bool {
        self.color[vertex] = c;
        let bit = 1u32 << c;
        for &u in &self.adj[vertex] {
            if self.color[u] != usize::MAX || self.candidates[u] & bit == 0 {
                continue;
            }
            self.trail.push((u, self.candidates[u]));
            self.candidates[u] &= !bit;
            if self.candidates[u] == 0 {
                return false;
            }
            let ci = self.clique_of[u];
            if ci != usize::MAX && !self.clique_feasible(ci) {
                return false;
            }
        }
        true
    }

    fn clique_feasible(&self, ci: usize) -> bool {
        let mut union = 0u32;
        let mut uncolored = 0u32;
        for &x in &self.cliques[ci] {
            if self.color[x] == usize::MAX {
                union |= self.candidates[x];
                uncolored += 1;
            }
        }
        union.count_ones() >= uncolored
    }

    fn assign(&mut self, order: &[usize], pos: usize) -> bool {
        let Some(&vertex) = order.get(pos) else { return true };
        let mut cands = self.candidates[vertex];
        while cands != 0 {
            let c = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            let mark = self.trail.len();
            if self.place(vertex, c) && self.assign(order, pos + 1) {
                return true;
            }
            self.color[vertex] = usize::MAX;
            while self.trail.len() > mark {
                let (u, saved) = self.trail.pop().expect("trail underflow");
                self.candidates[u] = saved;
            }
        }
        false
    }
}

/// Checks that a coloring is proper on the auxiliary graph.
pub fn validate_coloring(h: &CliqueCycleGraph, n: usize, coloring: &[usize]) -> Result<()> {
    if coloring.len() != h.num_vertices() {
        return Err(Error::Precondition("coloring length mismatch".into()));
    }
    if coloring.iter().any(|&c| c >= n) {
        return Err(Error::Precondition("color out of range".into()));
    }
    for (a, b) in h.all_edges() {
        if coloring[a] == coloring[b] {
            return Err(Error::Precondition(format!(
                "edge ({a},{b}) is monochromatic in color {}",
                coloring[a]
            )));
        }
    }
    Ok(())
}

/// Extracts the allocation from a proper coloring: color class c, with
/// dummies and gadget vertices dropped, is agent c's bundle. The result
/// allocates every real item.
pub fn allocation_from_coloring(
    instance: &Instance,
    reduction: &PathReduction,
    coloring: &[usize],
) -> Result<Allocation> {
    validate_coloring(&reduction.h, reduction.num_agents, coloring)?;
    let mut bundles = vec![BTreeSet::new(); reduction.num_agents];
    for (vertex, kind) in reduction.h.vertices.iter().enumerate() {
        if let HVertex::Item(o) = kind {
            bundles[coloring[vertex]].insert(*o);
        }
    }
    let allocation = Allocation::new(bundles);
    if !crate::model::is_feasible(instance, &allocation)? {
        return Err(Error::Precondition(
            "extracted allocation is infeasible; the auxiliary graph lost a path edge".into(),
        ));
    }
    Ok(allocation)
}

/// End-to-end solver: build the auxiliary graph, color it, extract the
/// allocation. The result is complete (hence maximal) and EF[1,1]; for
/// monotone (one-signed) valuations it is EF1.
pub fn solve_path_ef11(instance: &Instance) -> Result<Allocation> {
    let n = instance.num_agents();
    let reduction = build_clique_cycle(instance, n)?;
    let coloring = color_clique_cycle(&reduction.h, n)?;
    allocation_from_coloring(instance, &reduction, &coloring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers;
    use crate::instances::{generate, GraphFamily, ValuationFamily};
    use crate::model::testutil::{ints, path_graph};
    use crate::model::ValuationProfile;
    use crate::value::rat;

    fn path_instance(values: &[i64], n: usize) -> Instance {
        Instance::new(
            path_graph(values.len()),
            ValuationProfile::additive_identical(n, ints(values)),
            None,
        )
        .unwrap()
    }

    /// Ten items whose path order scrambles the preference ranks exactly
    /// as in the figure-style example: path positions carry ranks
    /// 7, 10, 9, 6, 5, 2, 1, 8, 4, 3 and two dummies pad the far end.
    fn figure_instance() -> Instance {
        let ranks = [7, 10, 9, 6, 5, 2, 1, 8, 4, 3];
        let values: Vec<i64> = ranks.iter().map(|r| 20 - r).collect();
        path_instance(&values, 3)
    }

    #[test]
    fn figure_construction() {
        let inst = figure_instance();
        let red = build_clique_cycle(&inst, 3).unwrap();
        assert_eq!(red.num_dummies, 2);
        assert_eq!(red.num_real_items, 10);
        // dummies (ids 10, 11) rank last
        assert_eq!(red.rank[&10], 11);
        assert_eq!(red.rank[&11], 12);
        // special pairs: ranks (6,5) at positions (3,4), ranks (2,1) at
        // positions (5,6), and the two dummies
        let pairs: BTreeSet<(usize, usize)> = red.special_pairs.iter().copied().collect();
        assert_eq!(pairs, BTreeSet::from([(3, 4), (5, 6), (10, 11)]));
        assert!(!red.closing_gadget);
        // closing edge joins the path extremes: position 0 and dummy 11
        assert!(red.h.cycle_edges.contains(&(0, 11)));
        // four rank-block cliques plus three triples per gadget
        assert_eq!(red.h.cliques.len(), 4 + 3 * 3);
        assert_eq!(red.h.num_vertices(), 12 + 27);
        red.h.validate(3).unwrap();

        let coloring = color_clique_cycle(&red.h, 3).unwrap();
        validate_coloring(&red.h, 3, &coloring).unwrap();
        let alloc = allocation_from_coloring(&inst, &red, &coloring).unwrap();
        assert!(checkers::is_complete(&inst, &alloc).unwrap().holds());
        assert!(checkers::is_ef11(&inst, &alloc).unwrap().holds());
        // goods instance, so EF1 as well
        assert!(checkers::is_ef1(&inst, &alloc).unwrap().holds());
        assert_group_structure(&inst, &red, &coloring);
    }

    /// Every agent gets exactly one item per rank group, and any item of
    /// group t is worth at least any item of group t+1.
    fn assert_group_structure(inst: &Instance, red: &PathReduction, coloring: &[usize]) {
        let n = red.num_agents;
        let groups = red.num_groups();
        let mut per_group: Vec<Vec<usize>> = vec![Vec::new(); groups];
        let mut group_values: Vec<Vec<Rat>> = vec![Vec::new(); groups];
        for (vertex, kind) in red.h.vertices.iter().enumerate() {
            let value = match kind {
                HVertex::Item(o) => inst.value(0, &BTreeSet::from([*o])).unwrap(),
                HVertex::Dummy(_) => rat(0),
                HVertex::Gadget(..) => continue,
            };
            let g = red.group_of(vertex);
            per_group[g].push(coloring[vertex]);
            group_values[g].push(value);
        }
        for g in 0..groups {
            let mut colors = per_group[g].clone();
            colors.sort_unstable();
            assert_eq!(colors, (0..n).collect::<Vec<_>>(), "group {g} misses an agent");
        }
        for g in 0..groups.saturating_sub(1) {
            let min_here = group_values[g].iter().min().unwrap();
            let max_next = group_values[g + 1].iter().max().unwrap();
            assert!(min_here >= max_next, "group {g} dominance failed");
        }
    }

    #[test]
    fn single_group_path() {
        // m = n: every path edge is a special pair and so is the closing
        // pair; the auxiliary graph is one clique plus a fully spliced cycle
        let inst = path_instance(&[5, 3, 1], 3);
        let red = build_clique_cycle(&inst, 3).unwrap();
        assert_eq!(red.num_dummies, 0);
        assert_eq!(red.special_pairs.len(), 3);
        assert!(red.closing_gadget);
        red.h.validate(3).unwrap();
        let alloc = solve_path_ef11(&inst).unwrap();
        assert!(checkers::is_complete(&inst, &alloc).unwrap().holds());
        assert!(checkers::is_ef1(&inst, &alloc).unwrap().holds());
    }

    #[test]
    fn uniform_values_give_envy_free() {
        let inst = path_instance(&[1; 9], 3);
        let alloc = solve_path_ef11(&inst).unwrap();
        for bundle in alloc.bundles() {
            assert_eq!(bundle.len(), 3);
        }
        assert!(checkers::is_envy_free(&inst, &alloc).unwrap().holds());
        assert!(checkers::is_complete(&inst, &alloc).unwrap().holds());
    }

    #[test]
    fn mixed_sign_random_paths() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(88);
        for trial in 0..30 {
            let n = rng.gen_range(3..=5);
            let m = rng.gen_range(1..=16);
            let values: Vec<i64> = (0..m).map(|_| rng.gen_range(-9..=9)).collect();
            let inst = path_instance(&values, n);
            let red = build_clique_cycle(&inst, n).unwrap();
            red.h.validate(n).unwrap();
            let coloring = color_clique_cycle(&red.h, n).unwrap();
            let alloc = allocation_from_coloring(&inst, &red, &coloring).unwrap();
            assert!(
                checkers::is_complete(&inst, &alloc).unwrap().holds(),
                "trial {trial} incomplete"
            );
            assert!(
                checkers::is_maximal(&inst, &alloc).unwrap().holds(),
                "trial {trial} not maximal"
            );
            assert!(
                checkers::is_ef11(&inst, &alloc).unwrap().holds(),
                "trial {trial} not EF[1,1]: {values:?} n={n}"
            );
            assert_group_structure(&inst, &red, &coloring);
        }
    }

    #[test]
    fn one_signed_dummies_share_a_group() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let n = rng.gen_range(3..=5);
            let m = rng.gen_range(1..=14);
            let values: Vec<i64> = (0..m).map(|_| rng.gen_range(0..=9)).collect();
            let inst = path_instance(&values, n);
            let red = build_clique_cycle(&inst, n).unwrap();
            // non-negative values rank every dummy into the last group,
            // so the clique structure forces at most one dummy per agent
            let dummy_groups: BTreeSet<usize> = (0..red.num_dummies)
                .map(|k| red.group_of(red.num_real_items + k))
                .collect();
            assert!(dummy_groups.len() <= 1);
            let coloring = color_clique_cycle(&red.h, n).unwrap();
            let mut dummy_colors: Vec<usize> = red
                .h
                .vertices
                .iter()
                .enumerate()
                .filter(|(_, k)| matches!(k, HVertex::Dummy(_)))
                .map(|(v, _)| coloring[v])
                .collect();
            let before = dummy_colors.len();
            dummy_colors.sort_unstable();
            dummy_colors.dedup();
            assert_eq!(before, dummy_colors.len(), "an agent got two dummies");
        }
    }

    #[test]
    fn wrong_inputs_rejected() {
        let not_path = generate(&GraphFamily::Cycle(6), &ValuationFamily::Uniform, 3, 0)
            .unwrap()
            .instance;
        assert!(matches!(build_clique_cycle(&not_path, 3), Err(Error::WrongSolver(_))));
        let two_agents = path_instance(&[1, 2, 3], 3);
        assert!(matches!(build_clique_cycle(&two_agents, 2), Err(Error::WrongSolver(_))));
        let uniform = Instance::new(path_graph(4), ValuationProfile::uniform(3), None).unwrap();
        assert!(matches!(build_clique_cycle(&uniform, 3), Err(Error::WrongSolver(_))));
    }

    #[test]
    fn improper_coloring_rejected() {
        let inst = figure_instance();
        let red = build_clique_cycle(&inst, 3).unwrap();
        let bad = vec![0usize; red.h.num_vertices()];
        assert!(allocation_from_coloring(&inst, &red, &bad).is_err());
    }

    #[test]
    fn debug_json_shape() {
        let inst = figure_instance();
        let red = build_clique_cycle(&inst, 3).unwrap();
        let dump = red.h.to_debug_json();
        assert_eq!(dump["vertices"].as_array().unwrap().len(), red.h.num_vertices());
        assert_eq!(dump["cliques"].as_array().unwrap().len(), red.h.cliques.len());
    }
}
