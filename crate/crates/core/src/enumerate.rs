//! Pruned backtracking over feasible allocations, shared by the oracle
//! and the Pareto checker. Bundles are tracked as bitmasks; items are
//! assigned in index order to one of the agents or left unallocated,
//! and branches that would put conflicting items in one bundle are cut.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::model::{Allocation, Instance};
use crate::oracle::EnumerationBudget;

/// Search state handed to leaf callbacks.
pub(crate) struct EnumState {
    m: usize,
    n: usize,
    adj: Vec<u64>, // neighbor mask per item
    all: u64,
    bundles: Vec<u64>,
    blocked: Vec<u64>, // items adjacent to the bundle, per agent
    assigned: u64,
    nodes: u64,
    max_nodes: u64,
    symmetry: bool,
}

impl EnumState {
    /// Maximality of the current (complete-depth) assignment: every
    /// unallocated item conflicts with every bundle.
    pub fn is_maximal_state(&self) -> bool {
        let unallocated = self.all & !self.assigned;
        self.blocked.iter().all(|&b| unallocated & !b == 0)
    }

    pub fn is_complete_state(&self) -> bool {
        self.assigned == self.all
    }

    pub fn to_allocation(&self) -> Allocation {
        let bundles = self
            .bundles
            .iter()
            .map(|&mask| {
                (0..self.m)
                    .filter(|&o| mask & (1u64 << o) != 0)
                    .collect::<BTreeSet<usize>>()
            })
            .collect();
        Allocation::new(bundles)
    }
}

/// Whether a search ran to completion or was stopped by the callback.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Exhaustion {
    Exhausted,
    Stopped,
}

/// Visits every feasible allocation exactly once (each assignment of
/// items to agents-or-unallocated is one leaf). Returns whether the
/// search space was exhausted; running out of budget is an error.
///
/// With `symmetry`, an item may start a new (empty) bundle only in the
/// lowest-indexed empty agent slot, so each unordered bundle family is
/// visited once. Only valid for predicates invariant under permuting
/// agents (identical valuations).
pub(crate) fn for_each_feasible(
    instance: &Instance,
    budget: &EnumerationBudget,
    symmetry: bool,
    f: &mut dyn FnMut(&EnumState) -> ControlFlow<()>,
) -> Result<Exhaustion> {
    let m = instance.num_items();
    let n = instance.num_agents();
    if m > 64 {
        return Err(Error::OracleTooLarge(format!(
            "enumeration supports at most 64 items, got {m}"
        )));
    }
    let adj: Vec<u64> = (0..m)
        .map(|v| instance.graph().neighbors(v).fold(0u64, |acc, u| acc | (1u64 << u)))
        .collect();
    let all = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut state = EnumState {
        m,
        n,
        adj,
        all,
        bundles: vec![0; n],
        blocked: vec![0; n],
        assigned: 0,
        nodes: 0,
        max_nodes: budget.max_nodes,
        symmetry,
    };
    recurse(&mut state, 0, f)
}

fn recurse(
    state: &mut EnumState,
    item: usize,
    f: &mut dyn FnMut(&EnumState) -> ControlFlow<()>,
) -> Result<Exhaustion> {
    state.nodes += 1;
    if state.nodes > state.max_nodes {
        return Err(Error::BudgetExhausted(format!(
            "feasible-allocation search passed {} nodes",
            state.max_nodes
        )));
    }
    if item == state.m {
        return match f(state) {
            ControlFlow::Continue(()) => Ok(Exhaustion::Exhausted),
            ControlFlow::Break(()) => Ok(Exhaustion::Stopped),
        };
    }
    let bit = 1u64 << item;
    for agent in 0..state.n {
        if state.blocked[agent] & bit != 0 {
            continue;
        }
        if state.symmetry
            && state.bundles[agent] == 0
            && agent > 0
            && state.bundles[agent - 1] == 0
        {
            // later empty slots are mirror images of this branch
            break;
        }
        let saved_blocked = state.blocked[agent];
        state.bundles[agent] |= bit;
        state.blocked[agent] |= state.adj[item];
        state.assigned |= bit;
        let out = recurse(state, item + 1, f)?;
        state.bundles[agent] &= !bit;
        state.blocked[agent] = saved_blocked;
        state.assigned &= !bit;
        if out == Exhaustion::Stopped {
            return Ok(Exhaustion::Stopped);
        }
    }
    // leave the item unallocated
    recurse(state, item + 1, f)
}
