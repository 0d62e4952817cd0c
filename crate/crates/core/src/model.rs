//! Domain types: conflict graphs, valuation profiles, instances,
//! allocations, and the goods/chores transforms.
//!
//! All types are immutable after construction; operations are pure.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::value::{isqrt, rat, Rat};

/// Tables are stored sparsely, but a table over many items is almost
/// certainly a mistake; reject beyond this many items.
pub const TABLE_ITEM_CAP: usize = 20;

// ---------------------------------------------------------------------------
// Conflict graph
// ---------------------------------------------------------------------------

/// Undirected simple graph over item indices `0..num_items`.
/// An edge marks a pair of items that cannot share a bundle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    num_items: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<bool>, // row-major num_items x num_items
}

impl ConflictGraph {
    /// Builds a graph, normalizing edge direction and rejecting
    /// self-loops, duplicates, and out-of-range endpoints.
    pub fn new(num_items: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut adj = vec![false; num_items * num_items];
        for (a, b) in edges {
            if a >= num_items || b >= num_items {
                return Err(Error::InvalidInstance(format!(
                    "edge ({a},{b}) out of range for {num_items} items"
                )));
            }
            if a == b {
                return Err(Error::InvalidInstance(format!("self-loop at item {a}")));
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) {
                return Err(Error::InvalidInstance(format!("duplicate edge ({a},{b})")));
            }
            adj[a * num_items + b] = true;
            adj[b * num_items + a] = true;
        }
        Ok(ConflictGraph { num_items, edges: set, adj })
    }

    pub fn edgeless(num_items: usize) -> Self {
        ConflictGraph::new(num_items, []).expect("edgeless graph is always valid")
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Normalized edge list (each pair with smaller index first).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn are_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.num_items + b]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_items).filter(move |&u| self.are_adjacent(v, u))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).count()
    }

    /// True iff no two items of `set` are adjacent.
    pub fn is_independent(&self, set: &BTreeSet<usize>) -> bool {
        let items: Vec<usize> = set.iter().copied().collect();
        for (i, &a) in items.iter().enumerate() {
            for &b in &items[i + 1..] {
                if self.are_adjacent(a, b) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff `item` conflicts with some member of `set`.
    pub fn conflicts_with(&self, item: usize, set: &BTreeSet<usize>) -> bool {
        set.iter().any(|&s| self.are_adjacent(item, s))
    }

    /// True iff `set` is a maximal independent set of the whole graph.
    pub fn is_maximal_independent(&self, set: &BTreeSet<usize>) -> bool {
        self.is_independent(set)
            && (0..self.num_items).all(|v| set.contains(&v) || self.conflicts_with(v, set))
    }

    /// Greedily extends `set` to a maximal independent set, trying items
    /// in increasing index order. `set` must be independent.
    pub fn greedy_maximalize(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        debug_assert!(self.is_independent(set));
        let mut out = set.clone();
        for v in 0..self.num_items {
            if !out.contains(&v) && !self.conflicts_with(v, &out) {
                out.insert(v);
            }
        }
        out
    }

    /// If the graph is a single path over all vertices, returns the vertex
    /// sequence from one endpoint to the other (an isolated vertex counts
    /// as a path of length one).
    pub fn path_order(&self) -> Option<Vec<usize>> {
        let m = self.num_items;
        if m == 0 {
            return None;
        }
        if m == 1 {
            return Some(vec![0]);
        }
        if self.edges.len() != m - 1 {
            return None;
        }
        let degs: Vec<usize> = (0..m).map(|v| self.degree(v)).collect();
        if degs.iter().any(|&d| d > 2) || degs.iter().filter(|&&d| d == 1).count() != 2 {
            return None;
        }
        let start = (0..m).find(|&v| degs[v] == 1)?;
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        while order.len() < m {
            let next = self.neighbors(cur).find(|&u| u != prev)?;
            order.push(next);
            prev = cur;
            cur = next;
        }
        // edge count + degree profile guarantee this is the whole graph
        Some(order)
    }

    /// True iff the graph is connected with exactly m-1 edges.
    pub fn is_tree(&self) -> bool {
        let m = self.num_items;
        if m == 0 || self.edges.len() != m - 1 {
            return false;
        }
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for u in self.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == m
    }

    /// Two-colors the graph if bipartite: returns (side0, side1), with each
    /// connected component colored by BFS from its smallest vertex (which
    /// lands on side0). Isolated vertices land on side0.
    pub fn bipartition(&self) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
        let m = self.num_items;
        let mut color = vec![usize::MAX; m];
        for s in 0..m {
            if color[s] != usize::MAX {
                continue;
            }
            color[s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for u in self.neighbors(v) {
                    if color[u] == usize::MAX {
                        color[u] = 1 - color[v];
                        queue.push_back(u);
                    } else if color[u] == color[v] {
                        return None;
                    }
                }
            }
        }
        let side0 = (0..m).filter(|&v| color[v] == 0).collect();
        let side1 = (0..m).filter(|&v| color[v] == 1).collect();
        Some((side0, side1))
    }
}

// ---------------------------------------------------------------------------
// Valuations
// ---------------------------------------------------------------------------

/// Declared monotonicity of a valuation profile. This is an attribute of
/// the data, spot-verifiable by sampling, never inferred exhaustively.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    None,
}

impl Monotonicity {
    pub fn flipped(self) -> Self {
        match self {
            Monotonicity::NonDecreasing => Monotonicity::NonIncreasing,
            Monotonicity::NonIncreasing => Monotonicity::NonDecreasing,
            Monotonicity::None => Monotonicity::None,
        }
    }

    pub fn is_monotone(self) -> bool {
        !matches!(self, Monotonicity::None)
    }
}

/// A named built-in set-valuation rule.
#[derive(Debug, Clone, PartialEq)]
pub enum NamedRule {
    /// The seven-item valuation of the `thm6_k33` counterexample:
    /// 0 on the empty set; 1 on the singletons {o1} and {o4}; 2 on every
    /// other singleton; 3 on {o2,o7}, {o3,o7}, {o5,o7}, {o6,o7}; 4 otherwise.
    Thm6K33,
    /// v(S) = floor(sqrt(sum of weights of S)): a concave, non-decreasing,
    /// integer-valued function of the weight sum. Non-additive.
    ConcaveRootSum { weights: Vec<i64> },
    /// Value of the base rule on the first `base_items` items plus
    /// `lambda` for each selected item in `x_start..x_start + x_len`
    /// (items outside both ranges are worth 0). Used by reductions that
    /// append blocks of extra goods to a rule-valued instance.
    Composite {
        base: Box<NamedRule>,
        base_items: usize,
        lambda: Rat,
        x_start: usize,
        x_len: usize,
    },
}

impl NamedRule {
    fn value(&self, set: &BTreeSet<usize>) -> Rat {
        match self {
            NamedRule::Thm6K33 => thm6_value(set),
            NamedRule::ConcaveRootSum { weights } => {
                let sum: i64 = set.iter().map(|&o| weights[o]).sum();
                rat(isqrt(sum))
            }
            NamedRule::Composite { base, base_items, lambda, x_start, x_len } => {
                let base_set: BTreeSet<usize> =
                    set.iter().copied().filter(|&o| o < *base_items).collect();
                let x_count =
                    set.iter().filter(|&&o| o >= *x_start && o < *x_start + *x_len).count();
                base.value(&base_set) + lambda.clone() * rat(x_count as i64)
            }
        }
    }

    fn validate(&self, num_items: usize) -> Result<()> {
        match self {
            NamedRule::Thm6K33 => {
                if num_items != 7 {
                    return Err(Error::InvalidInstance(format!(
                        "thm6_k33 rule needs exactly 7 items, got {num_items}"
                    )));
                }
            }
            NamedRule::ConcaveRootSum { weights } => {
                if weights.len() != num_items {
                    return Err(Error::InvalidInstance(
                        "concave rule weight count must equal item count".into(),
                    ));
                }
                if weights.iter().any(|&w| w < 0) {
                    return Err(Error::InvalidInstance("concave rule weights must be >= 0".into()));
                }
            }
            NamedRule::Composite { base, base_items, x_start, x_len, .. } => {
                base.validate(*base_items)?;
                if *x_start + *x_len > num_items || *base_items > num_items {
                    return Err(Error::InvalidInstance("composite rule ranges out of bounds".into()));
                }
            }
        }
        Ok(())
    }

    /// Stable text encoding used by the instance file format.
    pub fn encode(&self) -> String {
        match self {
            NamedRule::Thm6K33 => "thm6_k33".into(),
            NamedRule::ConcaveRootSum { weights } => {
                let ws: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
                format!("concave_root_sum:{}", ws.join(","))
            }
            NamedRule::Composite { base, base_items, lambda, x_start, x_len } => format!(
                "composite:{}:{}:{}:{}:{}",
                base.encode(),
                base_items,
                lambda,
                x_start,
                x_len
            ),
        }
    }

    pub fn decode(s: &str) -> Result<Self> {
        if s == "thm6_k33" {
            return Ok(NamedRule::Thm6K33);
        }
        if let Some(rest) = s.strip_prefix("concave_root_sum:") {
            let weights = rest
                .split(',')
                .map(|w| w.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad weight {w:?}"))))
                .collect::<Result<Vec<i64>>>()?;
            return Ok(NamedRule::ConcaveRootSum { weights });
        }
        if let Some(rest) = s.strip_prefix("composite:") {
            // base may not contain ':' (only simple rules are composed)
            let parts: Vec<&str> = rest.splitn(5, ':').collect();
            if parts.len() != 5 {
                return Err(Error::Parse(format!("bad composite rule {s:?}")));
            }
            let base = NamedRule::decode(parts[0])?;
            let base_items = parts[1].parse().map_err(|_| Error::Parse("bad composite m0".into()))?;
            let lambda = crate::value::parse_rat(parts[2])?;
            let x_start = parts[3].parse().map_err(|_| Error::Parse("bad composite x_start".into()))?;
            let x_len = parts[4].parse().map_err(|_| Error::Parse("bad composite x_len".into()))?;
            return Ok(NamedRule::Composite { base: Box::new(base), base_items, lambda, x_start, x_len });
        }
        Err(Error::Parse(format!("unknown rule {s:?}")))
    }
}

fn thm6_value(set: &BTreeSet<usize>) -> Rat {
    // Items 0-based: o1..o7 = 0..6.
    match set.len() {
        0 => rat(0),
        1 => {
            let o = *set.iter().next().unwrap();
            if o == 0 || o == 3 {
                rat(1)
            } else {
                rat(2)
            }
        }
        2 => {
            let v: Vec<usize> = set.iter().copied().collect();
            let pair = (v[0], v[1]);
            if pair == (1, 6) || pair == (2, 6) || pair == (4, 6) || pair == (5, 6) {
                rat(3)
            } else {
                rat(4)
            }
        }
        _ => rat(4),
    }
}

/// How bundle values are computed.
#[derive(Debug, Clone, PartialEq)]
pub enum ValuationKind {
    /// Per-agent item value vectors; one row if identical, else one per agent.
    Additive(Vec<Vec<Rat>>),
    /// v(S) = |S| for every agent.
    Uniform,
    /// Explicit sparse map from item sets to values, identical across
    /// agents, with an optional default for unlisted sets.
    Table { entries: BTreeMap<BTreeSet<usize>, Rat>, default: Option<Rat> },
    /// A named built-in rule, identical across agents.
    Rule(NamedRule),
}

/// A full valuation profile: kind, declared monotonicity, and an optional
/// pointwise negation (so that negating any profile stays representable
/// and negation is an exact involution).
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationProfile {
    num_agents: usize,
    kind: ValuationKind,
    identical: bool,
    monotonicity: Monotonicity,
    negated: bool,
}

impl ValuationProfile {
    pub fn additive_identical(num_agents: usize, values: Vec<Rat>) -> Self {
        let monotonicity = additive_monotonicity(&values);
        ValuationProfile {
            num_agents,
            kind: ValuationKind::Additive(vec![values]),
            identical: true,
            monotonicity,
            negated: false,
        }
    }

    pub fn additive_per_agent(rows: Vec<Vec<Rat>>) -> Self {
        let num_agents = rows.len();
        let identical = rows.windows(2).all(|w| w[0] == w[1]);
        let monos: Vec<Monotonicity> = rows.iter().map(|r| additive_monotonicity(r)).collect();
        let monotonicity = if monos.iter().all(|&m| m == Monotonicity::NonDecreasing) {
            Monotonicity::NonDecreasing
        } else if monos.iter().all(|&m| m == Monotonicity::NonIncreasing) {
            Monotonicity::NonIncreasing
        } else {
            Monotonicity::None
        };
        ValuationProfile { num_agents, kind: ValuationKind::Additive(rows), identical, monotonicity, negated: false }
    }

    pub fn uniform(num_agents: usize) -> Self {
        ValuationProfile {
            num_agents,
            kind: ValuationKind::Uniform,
            identical: true,
            monotonicity: Monotonicity::NonDecreasing,
            negated: false,
        }
    }

    pub fn table(
        num_agents: usize,
        entries: BTreeMap<BTreeSet<usize>, Rat>,
        default: Option<Rat>,
        monotonicity: Monotonicity,
    ) -> Self {
        ValuationProfile {
            num_agents,
            kind: ValuationKind::Table { entries, default },
            identical: true,
            monotonicity,
            negated: false,
        }
    }

    pub fn rule(num_agents: usize, rule: NamedRule, monotonicity: Monotonicity) -> Self {
        ValuationProfile {
            num_agents,
            kind: ValuationKind::Rule(rule),
            identical: true,
            monotonicity,
            negated: false,
        }
    }

    pub(crate) fn from_parts(
        num_agents: usize,
        kind: ValuationKind,
        identical: bool,
        monotonicity: Monotonicity,
        negated: bool,
    ) -> Self {
        ValuationProfile { num_agents, kind, identical, monotonicity, negated }
    }

    pub fn num_agents(&self) -> usize {
        self.num_agents
    }

    pub fn kind(&self) -> &ValuationKind {
        &self.kind
    }

    pub fn is_identical(&self) -> bool {
        self.identical
    }

    pub fn is_negated(&self) -> bool {
        self.negated
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn is_additive(&self) -> bool {
        matches!(self.kind, ValuationKind::Additive(_))
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, ValuationKind::Uniform) && !self.negated
    }

    fn validate(&self, num_items: usize) -> Result<()> {
        if self.num_agents == 0 {
            return Err(Error::InvalidInstance("need at least one agent".into()));
        }
        match &self.kind {
            ValuationKind::Additive(rows) => {
                let expect = if self.identical { 1 } else { self.num_agents };
                if rows.len() != expect && rows.len() != self.num_agents {
                    return Err(Error::InvalidInstance(format!(
                        "additive profile has {} rows for {} agents",
                        rows.len(),
                        self.num_agents
                    )));
                }
                if self.identical && rows.len() > 1 && rows.windows(2).any(|w| w[0] != w[1]) {
                    return Err(Error::InvalidInstance(
                        "profile declared identical but rows differ".into(),
                    ));
                }
                for row in rows {
                    if row.len() != num_items {
                        return Err(Error::InvalidInstance(format!(
                            "additive row has {} values for {} items",
                            row.len(),
                            num_items
                        )));
                    }
                }
            }
            ValuationKind::Uniform => {}
            ValuationKind::Table { entries, .. } => {
                if num_items > TABLE_ITEM_CAP {
                    return Err(Error::InvalidInstance(format!(
                        "table valuation over {num_items} items exceeds the cap of {TABLE_ITEM_CAP}"
                    )));
                }
                if let Some(e) = entries.get(&BTreeSet::new()) {
                    if !e.is_zero() {
                        return Err(Error::InvalidInstance("value of the empty set must be 0".into()));
                    }
                }
                for set in entries.keys() {
                    if set.iter().any(|&o| o >= num_items) {
                        return Err(Error::InvalidInstance("table entry indexes a missing item".into()));
                    }
                }
            }
            ValuationKind::Rule(rule) => rule.validate(num_items)?,
        }
        Ok(())
    }

    /// Exact value of `set` for `agent`. The empty set is always worth 0.
    pub fn value(&self, agent: usize, set: &BTreeSet<usize>) -> Result<Rat> {
        if agent >= self.num_agents {
            return Err(Error::MalformedAllocation(format!(
                "agent {agent} out of range for {} agents",
                self.num_agents
            )));
        }
        let raw = match &self.kind {
            ValuationKind::Additive(rows) => {
                let row = if rows.len() == 1 { &rows[0] } else { &rows[agent] };
                set.iter().map(|&o| row[o].clone()).fold(Rat::zero(), |a, b| a + b)
            }
            ValuationKind::Uniform => rat(set.len() as i64),
            ValuationKind::Table { entries, default } => {
                if set.is_empty() {
                    Rat::zero()
                } else {
                    match entries.get(set) {
                        Some(v) => v.clone(),
                        None => default.clone().ok_or_else(|| {
                            Error::IncompleteValuation(format!(
                                "no table entry and no default for {set:?}"
                            ))
                        })?,
                    }
                }
            }
            ValuationKind::Rule(rule) => rule.value(set),
        };
        Ok(if self.negated { -raw } else { raw })
    }

    /// The profile with every value negated. Exact involution.
    pub fn negated_profile(&self) -> ValuationProfile {
        let mut out = self.clone();
        out.monotonicity = self.monotonicity.flipped();
        match &mut out.kind {
            ValuationKind::Additive(rows) => {
                for row in rows.iter_mut() {
                    for v in row.iter_mut() {
                        *v = -v.clone();
                    }
                }
            }
            ValuationKind::Table { entries, default } => {
                for v in entries.values_mut() {
                    *v = -v.clone();
                }
                if let Some(d) = default {
                    *d = -d.clone();
                }
            }
            ValuationKind::Uniform | ValuationKind::Rule(_) => {
                out.negated = !out.negated;
            }
        }
        out
    }

    /// Single-agent view of agent 0's valuation, replicated identically
    /// over `num_agents` agents.
    fn first_agent_identical(&self, num_agents: usize) -> ValuationProfile {
        let kind = match &self.kind {
            ValuationKind::Additive(rows) => ValuationKind::Additive(vec![rows[0].clone()]),
            other => other.clone(),
        };
        ValuationProfile {
            num_agents,
            kind,
            identical: true,
            monotonicity: self.monotonicity,
            negated: self.negated,
        }
    }
}

fn additive_monotonicity(values: &[Rat]) -> Monotonicity {
    if values.iter().all(|v| *v >= Rat::zero()) {
        Monotonicity::NonDecreasing
    } else if values.iter().all(|v| *v <= Rat::zero()) {
        Monotonicity::NonIncreasing
    } else {
        Monotonicity::None
    }
}

// ---------------------------------------------------------------------------
// Instance and allocation
// ---------------------------------------------------------------------------

/// A fair-division instance: conflict graph plus valuation profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    graph: ConflictGraph,
    valuations: ValuationProfile,
    labels: Option<Vec<String>>,
}

impl Instance {
    pub fn new(
        graph: ConflictGraph,
        valuations: ValuationProfile,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        valuations.validate(graph.num_items())?;
        if let Some(ls) = &labels {
            if ls.len() != graph.num_items() {
                return Err(Error::InvalidInstance("label count must equal item count".into()));
            }
        }
        Ok(Instance { graph, valuations, labels })
    }

    pub fn graph(&self) -> &ConflictGraph {
        &self.graph
    }

    pub fn valuations(&self) -> &ValuationProfile {
        &self.valuations
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn num_items(&self) -> usize {
        self.graph.num_items()
    }

    pub fn num_agents(&self) -> usize {
        self.valuations.num_agents()
    }

    /// Default label "o{k+1}" when none was supplied.
    pub fn label(&self, item: usize) -> String {
        match &self.labels {
            Some(ls) => ls[item].clone(),
            None => format!("o{}", item + 1),
        }
    }

    /// Exact value of an item set for an agent (validates indices).
    pub fn value(&self, agent: usize, set: &BTreeSet<usize>) -> Result<Rat> {
        if let Some(&o) = set.iter().rev().next() {
            if o >= self.num_items() {
                return Err(Error::MalformedAllocation(format!(
                    "item {o} out of range for {} items",
                    self.num_items()
                )));
            }
        }
        self.valuations.value(agent, set)
    }

    /// Replaces the valuation profile, keeping graph and labels.
    pub fn with_valuations(&self, valuations: ValuationProfile) -> Result<Instance> {
        Instance::new(self.graph.clone(), valuations, self.labels.clone())
    }
}

/// An ordered family of pairwise-disjoint bundles, one per agent.
/// Items may remain unallocated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<BTreeSet<usize>>,
}

impl Allocation {
    pub fn new(bundles: Vec<BTreeSet<usize>>) -> Self {
        Allocation { bundles }
    }

    pub fn empty(num_agents: usize) -> Self {
        Allocation { bundles: vec![BTreeSet::new(); num_agents] }
    }

    pub fn num_agents(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundles(&self) -> &[BTreeSet<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, agent: usize) -> &BTreeSet<usize> {
        &self.bundles[agent]
    }

    pub fn allocated(&self) -> BTreeSet<usize> {
        self.bundles.iter().flatten().copied().collect()
    }

    /// Bundles in reverse agent order (the two-agent "cut-and-choose" swap).
    pub fn reversed(&self) -> Allocation {
        let mut b = self.bundles.clone();
        b.reverse();
        Allocation { bundles: b }
    }
}

/// Checks shape (bundle count, index range) and returns an error if the
/// allocation is malformed; then decides feasibility: disjoint bundles,
/// each an independent set of the conflict graph.
pub fn is_feasible(instance: &Instance, allocation: &Allocation) -> Result<bool> {
    if allocation.num_agents() != instance.num_agents() {
        return Err(Error::MalformedAllocation(format!(
            "{} bundles for {} agents",
            allocation.num_agents(),
            instance.num_agents()
        )));
    }
    for bundle in allocation.bundles() {
        if let Some(&o) = bundle.iter().rev().next() {
            if o >= instance.num_items() {
                return Err(Error::MalformedAllocation(format!(
                    "item {o} out of range for {} items",
                    instance.num_items()
                )));
            }
        }
    }
    let mut seen = BTreeSet::new();
    for bundle in allocation.bundles() {
        for &o in bundle {
            if !seen.insert(o) {
                return Ok(false); // overlapping bundles
            }
        }
        if !instance.graph().is_independent(bundle) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The same instance with every agent's valuation negated (goods become
/// chores and vice versa). The graph is unchanged.
pub fn negate_valuations(instance: &Instance) -> Instance {
    Instance {
        graph: instance.graph.clone(),
        valuations: instance.valuations.negated_profile(),
        labels: instance.labels.clone(),
    }
}

/// The identical two-agent reduction: both agents get v(S) = |v1(S)|,
/// declared non-decreasing. Requires a monotone profile; for goods this
/// is the identity on values, for chores it is pointwise negation.
pub fn absolute_valuation(instance: &Instance) -> Result<Instance> {
    if instance.num_agents() != 2 {
        return Err(Error::UnsupportedValuation(format!(
            "absolute-value reduction needs 2 agents, got {}",
            instance.num_agents()
        )));
    }
    let prof = instance.valuations();
    let abs = match prof.monotonicity() {
        Monotonicity::NonDecreasing => prof.first_agent_identical(2),
        Monotonicity::NonIncreasing => prof.first_agent_identical(2).negated_profile(),
        Monotonicity::None => {
            return Err(Error::UnsupportedValuation(
                "absolute-value reduction needs a monotone profile".into(),
            ))
        }
    };
    debug_assert_eq!(abs.monotonicity(), Monotonicity::NonDecreasing);
    instance.with_valuations(abs)
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    pub fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    pub fn alloc(bundles: &[&[usize]]) -> Allocation {
        Allocation::new(bundles.iter().map(|b| set(b)).collect())
    }

    pub fn path_graph(m: usize) -> ConflictGraph {
        ConflictGraph::new(m, (0..m.saturating_sub(1)).map(|i| (i, i + 1))).unwrap()
    }

    pub fn ints(vals: &[i64]) -> Vec<Rat> {
        vals.iter().map(|&v| rat(v)).collect()
    }

    /// Assigns each item to a random agent (or leaves it out), skipping
    /// assignments that would break independence.
    pub fn random_feasible(inst: &Instance, rng: &mut rand_chacha::ChaCha8Rng) -> Allocation {
        use rand::Rng;
        let mut bundles = vec![BTreeSet::new(); inst.num_agents()];
        for item in 0..inst.num_items() {
            let pick = rng.gen_range(0..=inst.num_agents());
            if pick < inst.num_agents() && !inst.graph().conflicts_with(item, &bundles[pick]) {
                bundles[pick].insert(item);
            }
        }
        Allocation::new(bundles)
    }
}
