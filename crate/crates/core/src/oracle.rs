//! Brute-force enumeration oracles. These are the trust anchor for all
//! non-existence claims, so there are two independent enumerator
//! implementations: a plain product-space filter and the pruned
//! backtracker, with a differential test between them.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::checkers;
use crate::enumerate::{for_each_feasible, Exhaustion};
use crate::error::{Error, Result};
use crate::model::{is_feasible, Allocation, Instance};
use crate::value::{rat, Rat};

/// Caps the number of backtracking nodes a search may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_nodes: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget { max_nodes: 100_000_000 }
    }
}

impl EnumerationBudget {
    pub fn new(max_nodes: u64) -> Self {
        EnumerationBudget { max_nodes }
    }
}

/// Counters reported alongside oracle verdicts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Feasible allocations that reached the predicate check.
    pub candidates: u64,
    /// Allocations that satisfied all required predicates (0 or 1 here,
    /// since the search stops at the first witness).
    pub matched: u64,
}

/// Visits every maximal feasible allocation exactly once. The callback
/// may stop the stream early; returns whether the space was exhausted.
pub fn enumerate_maximal(
    instance: &Instance,
    budget: &EnumerationBudget,
    mut f: impl FnMut(&Allocation) -> ControlFlow<()>,
) -> Result<bool> {
    let out = for_each_feasible(instance, budget, false, &mut |st| {
        if st.is_maximal_state() {
            f(&st.to_allocation())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out == Exhaustion::Exhausted)
}

/// Collects every maximal feasible allocation.
pub fn collect_maximal(instance: &Instance, budget: &EnumerationBudget) -> Result<Vec<Allocation>> {
    let mut out = Vec::new();
    enumerate_maximal(instance, budget, |a| {
        out.push(a.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Independent reference enumerator: walks the full (n+1)^m product
/// space of item assignments and filters by feasibility and maximality.
/// Exists solely to cross-check the pruned backtracker.
pub fn enumerate_maximal_naive(
    instance: &Instance,
    budget: &EnumerationBudget,
) -> Result<Vec<Allocation>> {
    let m = instance.num_items() as u32;
    let n = instance.num_agents();
    let states = (n as u64 + 1).checked_pow(m).filter(|&s| s <= budget.max_nodes);
    let Some(states) = states else {
        return Err(Error::BudgetExhausted(format!(
            "product space ({} + 1)^{} exceeds the budget",
            n, m
        )));
    };
    let mut out = Vec::new();
    for code in 0..states {
        let mut c = code;
        let mut bundles = vec![BTreeSet::new(); n];
        for item in 0..instance.num_items() {
            let slot = (c % (n as u64 + 1)) as usize;
            c /= n as u64 + 1;
            if slot < n {
                bundles[slot].insert(item);
            }
        }
        let alloc = Allocation::new(bundles);
        if is_feasible(instance, &alloc)? && checkers::is_maximal(instance, &alloc)?.holds() {
            out.push(alloc);
        }
    }
    Ok(out)
}

/// A property an allocation must satisfy in [`exists_allocation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Requirement {
    Ef1,
    Efx,
    Ef11,
    Maximal,
    Complete,
}

impl Requirement {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ef1" => Ok(Requirement::Ef1),
            "efx" => Ok(Requirement::Efx),
            "ef11" => Ok(Requirement::Ef11),
            "maximal" => Ok(Requirement::Maximal),
            "complete" => Ok(Requirement::Complete),
            other => Err(Error::InvalidParams(format!("unknown requirement {other:?}"))),
        }
    }
}

/// Existence verdict from an exhaustive search.
#[derive(Debug, Clone, PartialEq)]
pub enum Existence {
    Witness(Allocation),
    /// The search was exhaustive and nothing satisfied the conjunction.
    CertifiedNone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExistsReport {
    pub outcome: Existence,
    pub stats: SearchStats,
}

/// Searches feasible allocations for one satisfying every requirement.
/// Stops at the first witness; a `CertifiedNone` means the enumeration
/// ran to exhaustion. Running out of budget is an error (inconclusive).
pub fn exists_allocation(
    instance: &Instance,
    requirements: &[Requirement],
    budget: &EnumerationBudget,
) -> Result<ExistsReport> {
    exists_allocation_opts(instance, requirements, budget, false)
}

/// [`exists_allocation`] with an optional agent-symmetry reduction: for
/// identical valuations every requested predicate is invariant under
/// permuting bundles, so each unordered bundle family is searched once.
/// Off by default; rejected for non-identical profiles.
pub fn exists_allocation_opts(
    instance: &Instance,
    requirements: &[Requirement],
    budget: &EnumerationBudget,
    symmetry_reduction: bool,
) -> Result<ExistsReport> {
    if symmetry_reduction && !instance.valuations().is_identical() {
        return Err(Error::InvalidParams(
            "symmetry reduction requires identical valuations".into(),
        ));
    }
    let mut stats = SearchStats::default();
    let mut witness: Option<Allocation> = None;
    let mut failure: Option<Error> = None;
    for_each_feasible(instance, budget, symmetry_reduction, &mut |st| {
        // cheap mask-level screens first
        if requirements.contains(&Requirement::Maximal) && !st.is_maximal_state() {
            return ControlFlow::Continue(());
        }
        if requirements.contains(&Requirement::Complete) && !st.is_complete_state() {
            return ControlFlow::Continue(());
        }
        stats.candidates += 1;
        let alloc = st.to_allocation();
        for req in requirements {
            let holds = match req {
                Requirement::Maximal | Requirement::Complete => Ok(true),
                Requirement::Ef1 => checkers::is_ef1(instance, &alloc).map(|v| v.holds()),
                Requirement::Efx => checkers::is_efx(instance, &alloc).map(|v| v.holds()),
                Requirement::Ef11 => checkers::is_ef11(instance, &alloc).map(|v| v.holds()),
            };
            match holds {
                Ok(true) => {}
                Ok(false) => return ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
        }
        stats.matched += 1;
        witness = Some(alloc);
        ControlFlow::Break(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let outcome = match witness {
        Some(a) => Existence::Witness(a),
        None => Existence::CertifiedNone,
    };
    Ok(ExistsReport { outcome, stats })
}

/// Value of a set after its most valuable item is removed (0 for the
/// empty set): the EF1 slack measure used by the hardness reduction.
pub fn value_after_best_removal(instance: &Instance, set: &BTreeSet<usize>) -> Result<Rat> {
    if set.is_empty() {
        return Ok(rat(0));
    }
    let mut best: Option<Rat> = None;
    for &o in set {
        let mut rest = set.clone();
        rest.remove(&o);
        let v = instance.value(0, &rest)?;
        best = Some(match best {
            None => v,
            Some(b) => b.min(v),
        });
    }
    Ok(best.expect("nonempty set"))
}

/// gamma = min over maximal allocations of max over ordered agent pairs
/// (i, i') of (v_after_best_removal(A_i) - v(A_i')), for an identical
/// valuation. Positive gamma certifies that no maximal allocation is
/// EF1-for-goods; the pair range includes i = i'.
pub fn compute_gamma(instance: &Instance, budget: &EnumerationBudget) -> Result<Rat> {
    if !instance.valuations().is_identical() {
        return Err(Error::Precondition("gamma needs an identical valuation".into()));
    }
    let mut gamma: Option<Rat> = None;
    let mut failure: Option<Error> = None;
    let exhausted = enumerate_maximal(instance, budget, |alloc| {
        let mut worst: Option<Rat> = None;
        for i in 0..instance.num_agents() {
            let reduced = match value_after_best_removal(instance, alloc.bundle(i)) {
                Ok(v) => v,
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            };
            for j in 0..instance.num_agents() {
                let other = match instance.value(0, alloc.bundle(j)) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        return ControlFlow::Break(());
                    }
                };
                let slack = reduced.clone() - other;
                worst = Some(match worst.take() {
                    None => slack,
                    Some(w) => w.max(slack),
                });
            }
        }
        let worst = worst.expect("at least one agent");
        gamma = Some(match gamma.take() {
            None => worst,
            Some(g) => g.min(worst),
        });
        ControlFlow::Continue(())
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    debug_assert!(exhausted);
    gamma.ok_or_else(|| Error::Precondition("instance has no maximal allocation".into()))
}
