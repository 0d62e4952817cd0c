//! Two-agent solvers built on the color-switching sequence construction:
//! the order-adjacent sequence builder, its EF1 scan, the identical
//! -monotone improvement loop, the cut-and-choose wrapper, the bipartite
//! and additive specializations, and the constrained round-robin /
//! envy-cycle baselines (which fail EF1 under conflicts).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use crate::checkers;
use crate::error::{Error, Result};
use crate::model::{absolute_valuation, Allocation, ConflictGraph, Instance, Monotonicity};
use crate::value::Rat;

/// Which construction produced a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SequenceOrigin {
    Alg1,
    ExchangePrefix,
    ExchangeSuffix,
}

/// An ordered list of two-agent allocations in which every element is
/// maximal and every consecutive pair is order-adjacent.
#[derive(Debug, Clone)]
pub struct AllocationSequence {
    pub allocations: Vec<Allocation>,
    pub origin: SequenceOrigin,
}

impl AllocationSequence {
    /// Runtime check of the two structural invariants.
    pub fn validate(&self, instance: &Instance) -> Result<()> {
        for (idx, alloc) in self.allocations.iter().enumerate() {
            if !checkers::is_maximal(instance, alloc)?.holds() {
                return Err(Error::Precondition(format!(
                    "sequence element {idx} is not maximal"
                )));
            }
        }
        for (idx, pair) in self.allocations.windows(2).enumerate() {
            if !checkers::is_order_adjacent(&pair[0], &pair[1])? {
                return Err(Error::Precondition(format!(
                    "sequence elements {idx},{} are not order-adjacent",
                    idx + 1
                )));
            }
        }
        Ok(())
    }
}

/// For every item outside the base set, its extreme conflicting partners
/// inside the base set (extreme with respect to the item order used).
#[derive(Debug, Clone)]
pub struct ConfBounds {
    /// item -> base-set neighbor of largest rank
    pub max_conf: BTreeMap<usize, usize>,
    /// item -> base-set neighbor of smallest rank
    pub min_conf: BTreeMap<usize, usize>,
}

/// The sequence construction output: m+1 allocations plus the sets that
/// pin its two ends, A_0 = (S, X_min_conf) and A_m = (X_max_conf, S).
#[derive(Debug, Clone)]
pub struct Alg1Sequence {
    pub sequence: AllocationSequence,
    pub base_set: BTreeSet<usize>,
    pub x_min_conf: BTreeSet<usize>,
    pub x_max_conf: BTreeSet<usize>,
    pub bounds: ConfBounds,
}

fn check_order(graph: &ConflictGraph, order: &[usize]) -> Result<Vec<usize>> {
    let m = graph.num_items();
    if order.len() != m {
        return Err(Error::Precondition(format!(
            "item order has {} entries for {m} items",
            order.len()
        )));
    }
    let mut rank = vec![usize::MAX; m];
    for (pos, &item) in order.iter().enumerate() {
        if item >= m || rank[item] != usize::MAX {
            return Err(Error::Precondition("item order is not a permutation".into()));
        }
        rank[item] = pos + 1; // ranks are 1-based
    }
    Ok(rank)
}

/// Builds the sequence of m+1 maximal, pairwise order-adjacent
/// allocations from a maximal independent set S, with items relabeled
/// 1..m by `order`.
///
/// Step 1 computes, for every item outside S, its S-neighbors of
/// extreme rank (non-empty by maximality of S). Step 2 greedily builds
/// X_max_conf over the outside items sorted by increasing max-conf rank
/// and X_min_conf over them sorted by decreasing min-conf rank (ties by
/// lowest rank). Step 3 assembles, for each threshold o, bundle one
/// from the S-items above o plus the X_max_conf items whose max-conf
/// rank is at most o, and bundle two symmetrically.
pub fn build_sequence(
    graph: &ConflictGraph,
    base_set: &BTreeSet<usize>,
    order: &[usize],
) -> Result<Alg1Sequence> {
    build_sequence_with_ties(graph, base_set, order, None)
}

/// [`build_sequence`] with an explicit scan order for breaking ties among
/// equal min-conf ranks in the X_min_conf greedy. The construction is
/// correct for any tie-break; the interval solver injects decreasing
/// start-time order here, which makes X_min_conf a maximum-size
/// independent set of the leftover intervals (the mirror image of the
/// earliest-finish greedy).
pub fn build_sequence_with_ties(
    graph: &ConflictGraph,
    base_set: &BTreeSet<usize>,
    order: &[usize],
    x_min_scan: Option<&[usize]>,
) -> Result<Alg1Sequence> {
    let m = graph.num_items();
    let rank = check_order(graph, order)?;
    let min_tie: Vec<usize> = match x_min_scan {
        Some(scan) => {
            let pos = check_order(graph, scan)?;
            (0..m).map(|o| pos[o]).collect()
        }
        None => (0..m).map(|o| rank[o]).collect(),
    };
    if !graph.is_maximal_independent(base_set) {
        return Err(Error::Precondition(
            "sequence construction needs a maximal independent set".into(),
        ));
    }

    let outside: Vec<usize> = (0..m).filter(|o| !base_set.contains(o)).collect();
    let mut max_conf = BTreeMap::new();
    let mut min_conf = BTreeMap::new();
    for &o in &outside {
        let mut in_s: Vec<usize> = graph.neighbors(o).filter(|u| base_set.contains(u)).collect();
        debug_assert!(!in_s.is_empty(), "maximality of S guarantees a conflict");
        in_s.sort_by_key(|&u| rank[u]);
        min_conf.insert(o, in_s[0]);
        max_conf.insert(o, *in_s.last().unwrap());
    }

    let greedy_pick = |sorted: &[usize]| -> BTreeSet<usize> {
        let mut picked = BTreeSet::new();
        for &o in sorted {
            if !graph.conflicts_with(o, &picked) {
                picked.insert(o);
            }
        }
        picked
    };
    let mut by_max = outside.clone();
    by_max.sort_by_key(|&o| (rank[max_conf[&o]], rank[o]));
    let x_max_conf = greedy_pick(&by_max);
    let mut by_min = outside.clone();
    by_min.sort_by_key(|&o| (std::cmp::Reverse(rank[min_conf[&o]]), min_tie[o]));
    let x_min_conf = greedy_pick(&by_min);

    let mut allocations = Vec::with_capacity(m + 1);
    for threshold in 0..=m {
        let first: BTreeSet<usize> = base_set
            .iter()
            .copied()
            .filter(|&s| rank[s] > threshold)
            .chain(x_max_conf.iter().copied().filter(|x| rank[max_conf[x]] <= threshold))
            .collect();
        let second: BTreeSet<usize> = base_set
            .iter()
            .copied()
            .filter(|&s| rank[s] <= threshold)
            .chain(x_min_conf.iter().copied().filter(|x| rank[min_conf[x]] > threshold))
            .collect();
        allocations.push(Allocation::new(vec![first, second]));
    }

    debug_assert_eq!(allocations[0].bundle(0), base_set);
    debug_assert_eq!(allocations[0].bundle(1), &x_min_conf);
    debug_assert_eq!(allocations[m].bundle(0), &x_max_conf);
    debug_assert_eq!(allocations[m].bundle(1), base_set);

    Ok(Alg1Sequence {
        sequence: AllocationSequence { allocations, origin: SequenceOrigin::Alg1 },
        base_set: base_set.clone(),
        x_min_conf,
        x_max_conf,
        bounds: ConfBounds { max_conf, min_conf },
    })
}

/// Result of scanning an Alg1 sequence under an identical valuation.
#[derive(Debug, Clone)]
pub enum SequenceScan {
    Ef1(Allocation),
    /// The base set was not rich enough; this independent set is
    /// strictly more valuable and restarts the improvement loop.
    Improving(BTreeSet<usize>),
}

/// Finds the first consecutive pair where the envy direction flips and
/// returns its EF1 member; at such a flip at least one member is EF1
/// because consecutive allocations are order-adjacent.
pub(crate) fn scan_sign_change(
    allocations: &[Allocation],
    instance: &Instance,
) -> Result<Allocation> {
    let value = |alloc: &Allocation, side: usize| instance.value(0, alloc.bundle(side));
    if allocations.len() == 1 {
        let only = &allocations[0];
        if checkers::is_ef1(instance, only)?.holds() {
            return Ok(only.clone());
        }
        return Err(Error::Precondition("single-element sequence is not EF1".into()));
    }
    for pair in allocations.windows(2) {
        let before_first = value(&pair[0], 0)?;
        let before_second = value(&pair[0], 1)?;
        let after_first = value(&pair[1], 0)?;
        let after_second = value(&pair[1], 1)?;
        if before_first >= before_second && after_second >= after_first {
            if checkers::is_ef1(instance, &pair[0])?.holds() {
                return Ok(pair[0].clone());
            }
            if checkers::is_ef1(instance, &pair[1])?.holds() {
                return Ok(pair[1].clone());
            }
            return Err(Error::Precondition(
                "neither member of the envy flip is EF1; the sequence is not order-adjacent"
                    .into(),
            ));
        }
    }
    Err(Error::Precondition("no envy flip found in the sequence".into()))
}

/// Lemma-7 scan: if v(S) is at least the value of both X sets, some
/// allocation of the sequence is EF1 and the first one at the envy flip
/// is returned; otherwise the more valuable X set is an improving set.
pub fn find_ef1_in_sequence(alg1: &Alg1Sequence, instance: &Instance) -> Result<SequenceScan> {
    if !instance.valuations().is_identical() {
        return Err(Error::Precondition("sequence scan needs an identical valuation".into()));
    }
    let v_s = instance.value(0, &alg1.base_set)?;
    let v_min = instance.value(0, &alg1.x_min_conf)?;
    let v_max = instance.value(0, &alg1.x_max_conf)?;
    if v_max > v_s || v_min > v_s {
        let improving = if v_max >= v_min { &alg1.x_max_conf } else { &alg1.x_min_conf };
        return Ok(SequenceScan::Improving(improving.clone()));
    }
    scan_sign_change(&alg1.sequence.allocations, instance).map(SequenceScan::Ef1)
}

/// Improvement-loop driver shared by the identical-monotone and additive
/// solvers: rebuild the sequence from the current base set, return the
/// EF1 allocation when the scan finds one, otherwise maximalize the
/// improving set and retry. The base-set value strictly increases, so
/// the loop terminates over the finite family of independent sets.
fn improvement_loop(
    identical: &Instance,
    mut base: BTreeSet<usize>,
    order: &[usize],
) -> Result<(Allocation, usize)> {
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let alg1 = build_sequence(identical.graph(), &base, order)?;
        match find_ef1_in_sequence(&alg1, identical)? {
            SequenceScan::Ef1(alloc) => return Ok((alloc, iterations)),
            SequenceScan::Improving(x) => {
                let next = identical.graph().greedy_maximalize(&x);
                if identical.value(0, &next)? <= identical.value(0, &base)? {
                    return Err(Error::Precondition(
                        "improving set did not increase the base-set value".into(),
                    ));
                }
                base = next;
            }
        }
    }
}

/// Maximal EF1 allocation for an identical monotone non-decreasing
/// valuation on any conflict graph, with iteration count (the number of
/// sequence constructions; pseudopolynomial for integral valuations).
pub fn solve_identical_monotone_with_stats(instance: &Instance) -> Result<(Allocation, usize)> {
    if !instance.valuations().is_identical() {
        return Err(Error::UnsupportedValuation("solver needs identical valuations".into()));
    }
    if instance.valuations().monotonicity() != Monotonicity::NonDecreasing {
        return Err(Error::UnsupportedValuation(
            "solver needs a non-decreasing valuation".into(),
        ));
    }
    let order: Vec<usize> = (0..instance.num_items()).collect();
    let start = instance.graph().greedy_maximalize(&BTreeSet::new());
    improvement_loop(instance, start, &order)
}

/// See [`solve_identical_monotone_with_stats`].
pub fn solve_identical_monotone(instance: &Instance) -> Result<Allocation> {
    solve_identical_monotone_with_stats(instance).map(|(a, _)| a)
}

/// Orients a solution of the identical |v1| reduction by cut-and-choose:
/// one of the two bundle orders is EF1 under the true profile.
fn orient(instance: &Instance, candidate: Allocation) -> Result<Allocation> {
    if checkers::is_ef1(instance, &candidate)?.holds() {
        return Ok(candidate);
    }
    let reversed = candidate.reversed();
    if checkers::is_ef1(instance, &reversed)?.holds() {
        return Ok(reversed);
    }
    Err(Error::Precondition(
        "neither orientation of the identical solution is EF1".into(),
    ))
}

/// Maximal EF1 allocation for two agents with monotone valuations on any
/// conflict graph (pseudopolynomial for integral valuations). Rejects
/// non-monotone profiles, where such an allocation can fail to exist.
pub fn solve_two_agents(instance: &Instance) -> Result<Allocation> {
    if instance.num_agents() != 2 {
        return Err(Error::WrongSolver(format!(
            "two-agent solver got {} agents",
            instance.num_agents()
        )));
    }
    let identical = absolute_valuation(instance)?;
    let (candidate, _) = solve_identical_monotone_with_stats(&identical)?;
    orient(instance, candidate)
}

/// Polynomial-time maximal EF1 allocation for two agents with monotone
/// valuations on a bipartite conflict graph: one sequence pass from the
/// richer side (isolated vertices counted on it) suffices.
pub fn solve_bipartite(instance: &Instance) -> Result<Allocation> {
    if instance.num_agents() != 2 {
        return Err(Error::WrongSolver(format!(
            "bipartite solver got {} agents",
            instance.num_agents()
        )));
    }
    let Some((side0, side1)) = instance.graph().bipartition() else {
        return Err(Error::WrongSolver("conflict graph is not bipartite".into()));
    };
    let identical = absolute_valuation(instance)?;
    let isolated: BTreeSet<usize> =
        (0..instance.num_items()).filter(|&v| instance.graph().degree(v) == 0).collect();
    let mut left: BTreeSet<usize> = side0.union(&isolated).copied().collect();
    let mut right: BTreeSet<usize> = side1.difference(&isolated).copied().collect();
    if identical.value(0, &left)? < identical.value(0, &right)? {
        let swapped_left: BTreeSet<usize> = right.union(&isolated).copied().collect();
        let swapped_right: BTreeSet<usize> = left.difference(&isolated).copied().collect();
        left = swapped_left;
        right = swapped_right;
    }
    debug_assert!(instance.graph().is_maximal_independent(&left));

    let order: Vec<usize> = (0..instance.num_items()).collect();
    let alg1 = build_sequence(instance.graph(), &left, &order)?;
    // every vertex outside the richer side lies on the other side, so by
    // monotonicity neither X set can be worth more; verify before scanning
    let v_left = identical.value(0, &left)?;
    if identical.value(0, &alg1.x_min_conf)? > v_left
        || identical.value(0, &alg1.x_max_conf)? > v_left
    {
        return Err(Error::Precondition(
            "bipartite premise failed: an X set outvalues the richer side".into(),
        ));
    }
    let _ = right;
    match find_ef1_in_sequence(&alg1, &identical)? {
        SequenceScan::Ef1(candidate) => orient(instance, candidate),
        SequenceScan::Improving(_) => unreachable!("premise checked above"),
    }
}

/// Polynomial-time maximal EF1 allocation for two agents with additive
/// monotone valuations on any conflict graph: start the improvement loop
/// from a maximal independent set containing the most valuable item, so
/// each improvement multiplies the base-set value by at least m/(m-1).
pub fn solve_additive(instance: &Instance) -> Result<Allocation> {
    solve_additive_with_stats(instance).map(|(a, _)| a)
}

pub fn solve_additive_with_stats(instance: &Instance) -> Result<(Allocation, usize)> {
    if instance.num_agents() != 2 {
        return Err(Error::WrongSolver(format!(
            "additive solver got {} agents",
            instance.num_agents()
        )));
    }
    if !instance.valuations().is_additive() {
        return Err(Error::WrongSolver("additive solver needs an additive profile".into()));
    }
    let identical = absolute_valuation(instance)?;
    let m = instance.num_items();
    let mut best_item = 0usize;
    let mut best_value: Option<Rat> = None;
    for o in 0..m {
        let v = identical.value(0, &BTreeSet::from([o]))?;
        if best_value.as_ref().map_or(true, |b| v > *b) {
            best_value = Some(v);
            best_item = o;
        }
    }
    let start = identical.graph().greedy_maximalize(&BTreeSet::from([best_item]));
    let order: Vec<usize> = (0..m).collect();
    let (candidate, iterations) = improvement_loop(&identical, start, &order)?;
    Ok((orient(instance, candidate)?, iterations))
}

fn additive_item_value(instance: &Instance, agent: usize, item: usize) -> Result<Rat> {
    instance.value(agent, &BTreeSet::from([item]))
}

/// Constrained round robin: agents take turns in the given order; on its
/// turn an agent picks its most valuable unallocated item of non-negative
/// value that keeps its bundle independent, and passes when it has no
/// such pick. Stops after a full round of passes. With `top_up`, a final
/// pass hands out remaining placeable items to make the result maximal.
/// Fails EF1 under conflicts even for identical additive valuations.
pub fn round_robin_constrained(
    instance: &Instance,
    agent_order: &[usize],
    top_up: bool,
) -> Result<Allocation> {
    if !instance.valuations().is_additive() {
        return Err(Error::WrongSolver("round robin needs an additive profile".into()));
    }
    let n = instance.num_agents();
    {
        let mut seen = vec![false; n];
        if agent_order.len() != n
            || agent_order.iter().any(|&a| a >= n || std::mem::replace(&mut seen[a], true))
        {
            return Err(Error::InvalidParams("agent order must be a permutation".into()));
        }
    }
    let m = instance.num_items();
    let mut bundles = vec![BTreeSet::new(); n];
    let mut unallocated: BTreeSet<usize> = (0..m).collect();
    let mut consecutive_passes = 0;
    let mut turn = 0usize;
    while consecutive_passes < n {
        let agent = agent_order[turn % n];
        turn += 1;
        let mut best: Option<(Rat, usize)> = None;
        for &item in &unallocated {
            if instance.graph().conflicts_with(item, &bundles[agent]) {
                continue;
            }
            let v = additive_item_value(instance, agent, item)?;
            if v < Rat::zero() {
                continue;
            }
            // strictly-greater keeps the lowest index among ties
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                best = Some((v, item));
            }
        }
        match best {
            Some((_, item)) => {
                unallocated.remove(&item);
                bundles[agent].insert(item);
                consecutive_passes = 0;
            }
            None => consecutive_passes += 1,
        }
    }
    if top_up {
        for &agent in agent_order.iter().cycle().take(n * m) {
            let pick = unallocated
                .iter()
                .copied()
                .find(|&item| !instance.graph().conflicts_with(item, &bundles[agent]));
            if let Some(item) = pick {
                unallocated.remove(&item);
                bundles[agent].insert(item);
            }
        }
    }
    Ok(Allocation::new(bundles))
}

/// Constrained envy-cycle elimination: a source of the envy graph picks
/// its favorite feasible item; envy cycles are resolved by rotating
/// bundles along the cycle. When no source can pick (its feasible pool
/// is empty) the turn falls to the lowest-indexed agent that can pick.
/// Fails EF1 under conflicts even for identical additive valuations.
pub fn envy_cycle_constrained(instance: &Instance) -> Result<Allocation> {
    if !instance.valuations().is_additive() {
        return Err(Error::WrongSolver("envy-cycle elimination needs an additive profile".into()));
    }
    let n = instance.num_agents();
    let m = instance.num_items();
    let identical = instance.valuations().is_identical();
    let mut bundles = vec![BTreeSet::new(); n];
    let mut unallocated: BTreeSet<usize> = (0..m).collect();
    loop {
        let candidates: Vec<Vec<usize>> = (0..n)
            .map(|a| {
                unallocated
                    .iter()
                    .copied()
                    .filter(|&item| !instance.graph().conflicts_with(item, &bundles[a]))
                    .collect()
            })
            .collect();
        let mut pickers: Vec<usize> = (0..n).filter(|&a| !candidates[a].is_empty()).collect();
        // drop negative-valued picks (goods semantics)
        pickers.retain(|&a| {
            candidates[a].iter().any(|&item| {
                additive_item_value(instance, a, item).map(|v| v >= Rat::zero()).unwrap_or(false)
            })
        });
        if pickers.is_empty() {
            break;
        }

        // envy graph: i -> j when i values j's bundle above its own
        let mut values = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                values[i][j] = instance.value(i, &bundles[j])?;
            }
        }
        let envies = |values: &Vec<Vec<Rat>>, i: usize, j: usize| values[i][i] < values[i][j];
        let mut envied = vec![false; n];
        for i in 0..n {
            for j in 0..n {
                if i != j && envies(&values, i, j) {
                    envied[j] = true;
                }
            }
        }
        if (0..n).all(|a| envied[a]) {
            // no source at all: rotate a cycle of envy edges
            if identical {
                return Err(Error::Precondition(
                    "envy cycle arose under identical valuations".into(),
                ));
            }
            rotate_envy_cycle(&mut bundles, &values, n)?;
            continue;
        }
        let turn = pickers
            .iter()
            .copied()
            .find(|&a| !envied[a])
            .unwrap_or_else(|| pickers[0]);
        let mut best: Option<(Rat, usize)> = None;
        for &item in &candidates[turn] {
            let v = additive_item_value(instance, turn, item)?;
            if v < Rat::zero() {
                continue;
            }
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
                best = Some((v, item));
            }
        }
        if let Some((_, item)) = best {
            unallocated.remove(&item);
            bundles[turn].insert(item);
        }
    }
    Ok(Allocation::new(bundles))
}

fn rotate_envy_cycle(
    bundles: &mut [BTreeSet<usize>],
    values: &[Vec<Rat>],
    n: usize,
) -> Result<()> {
    // every agent is envied, so following "some envied bundle" from any
    // start must close a cycle
    let next = |i: usize| (0..n).find(|&j| j != i && values[i][i] < values[i][j]);
    let mut seen = vec![usize::MAX; n];
    let mut path: Vec<usize> = Vec::new();
    let mut cur = 0usize;
    loop {
        if seen[cur] != usize::MAX {
            let start = seen[cur];
            let cycle = &path[start..];
            let saved: Vec<BTreeSet<usize>> = cycle.iter().map(|&a| bundles[a].clone()).collect();
            for (pos, &agent) in cycle.iter().enumerate() {
                // each agent takes the bundle of the agent it envies
                bundles[agent] = saved[(pos + 1) % cycle.len()].clone();
            }
            return Ok(());
        }
        seen[cur] = path.len();
        path.push(cur);
        cur = next(cur).ok_or_else(|| {
            Error::Precondition("agent without envy on a sourceless envy graph".into())
        })?;
    }
}
