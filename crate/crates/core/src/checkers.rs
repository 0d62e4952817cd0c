//! Exact predicates for the fairness and efficiency notions, plus
//! order-adjacency of two-agent allocation pairs.
//!
//! Every checker validates feasibility first and returns a minimal
//! witness when the property fails, so solver bugs and counterexample
//! scripts are debuggable.
//!
//! EF1 uses the mixed-items definition (remove at most one item from the
//! union of the two bundles) as the single source of truth; the
//! goods-only and chores-only restatements coincide with it on the
//! corresponding instances and are covered by tests, not separate code.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use crate::enumerate::{for_each_feasible, Exhaustion};
use crate::error::{Error, Result};
use crate::model::{is_feasible, Allocation, Instance};
use crate::oracle::EnumerationBudget;
use crate::value::Rat;

/// Outcome of a checker: either the property holds, or it fails with a
/// minimal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Holds,
    Fails(W),
}

impl<W> Verdict<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(w) => Some(w),
        }
    }
}

/// An ordered agent pair witnessing an envy-style violation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvyWitness {
    pub envious: usize,
    pub envied: usize,
}

/// An (agent, item) pair witnessing a maximality violation: the item is
/// unallocated and could feasibly join the agent's bundle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaximalityWitness {
    pub agent: usize,
    pub item: usize,
}

/// An unallocated item witnessing incompleteness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompletenessWitness {
    pub item: usize,
}

/// An allocation that Pareto-dominates the checked one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominationWitness {
    pub by: Allocation,
}

fn require_feasible(instance: &Instance, allocation: &Allocation) -> Result<()> {
    if !is_feasible(instance, allocation)? {
        return Err(Error::InfeasibleAllocation(
            "checker requires a feasible allocation".into(),
        ));
    }
    Ok(())
}

/// Envy-freeness: v_i(A_i) >= v_i(A_j) for every ordered pair.
pub fn is_envy_free(instance: &Instance, allocation: &Allocation) -> Result<Verdict<EnvyWitness>> {
    require_feasible(instance, allocation)?;
    let n = instance.num_agents();
    for i in 0..n {
        let own = instance.value(i, allocation.bundle(i))?;
        for j in 0..n {
            if i != j && own < instance.value(i, allocation.bundle(j))? {
                return Ok(Verdict::Fails(EnvyWitness { envious: i, envied: j }));
            }
        }
    }
    Ok(Verdict::Holds)
}

fn value_without(
    instance: &Instance,
    agent: usize,
    bundle: &BTreeSet<usize>,
    removed: usize,
) -> Result<Rat> {
    let mut rest = bundle.clone();
    rest.remove(&removed);
    instance.value(agent, &rest)
}

/// EF1 for the ordered pair (i, j): some S of size at most one, drawn
/// from the union of the two bundles and removed from both sides, kills
/// the envy. Tries S = {}, then singletons of A_j, then singletons of A_i.
fn ef1_pair(instance: &Instance, allocation: &Allocation, i: usize, j: usize) -> Result<bool> {
    let own = allocation.bundle(i);
    let other = allocation.bundle(j);
    let own_value = instance.value(i, own)?;
    let other_value = instance.value(i, other)?;
    if own_value >= other_value {
        return Ok(true);
    }
    for &o in other {
        if own_value >= value_without(instance, i, other, o)? {
            return Ok(true);
        }
    }
    // removing o from A_i: A_j does not contain o, so the right side is
    // v_i(A_j) unchanged
    for &o in own {
        if value_without(instance, i, own, o)? >= other_value {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Envy-freeness up to one item (mixed-items definition).
pub fn is_ef1(instance: &Instance, allocation: &Allocation) -> Result<Verdict<EnvyWitness>> {
    require_feasible(instance, allocation)?;
    let n = instance.num_agents();
    for i in 0..n {
        for j in 0..n {
            if i != j && !ef1_pair(instance, allocation, i, j)? {
                return Ok(Verdict::Fails(EnvyWitness { envious: i, envied: j }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// EFX for the ordered pair (i, j): (i) after removing any value-
/// decreasing item from A_j, i does not envy the rest; (ii) after
/// removing any value-increasing item from A_i, the rest still beats A_j.
fn efx_pair(instance: &Instance, allocation: &Allocation, i: usize, j: usize) -> Result<bool> {
    let own = allocation.bundle(i);
    let other = allocation.bundle(j);
    let own_value = instance.value(i, own)?;
    let other_value = instance.value(i, other)?;
    for &o in other {
        let reduced = value_without(instance, i, other, o)?;
        if reduced < other_value && own_value < reduced {
            return Ok(false);
        }
    }
    for &o in own {
        let boosted = value_without(instance, i, own, o)?;
        if boosted > own_value && boosted < other_value {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Envy-freeness up to any item (both removal conditions).
pub fn is_efx(instance: &Instance, allocation: &Allocation) -> Result<Verdict<EnvyWitness>> {
    require_feasible(instance, allocation)?;
    let n = instance.num_agents();
    for i in 0..n {
        for j in 0..n {
            if i != j && !efx_pair(instance, allocation, i, j)? {
                return Ok(Verdict::Fails(EnvyWitness { envious: i, envied: j }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// EF[1,1] for the ordered pair (i, j): removing at most one item from
/// the own bundle and at most one from the envied bundle kills the envy.
fn ef11_pair(instance: &Instance, allocation: &Allocation, i: usize, j: usize) -> Result<bool> {
    let own = allocation.bundle(i);
    let other = allocation.bundle(j);
    let mut own_options = vec![instance.value(i, own)?];
    for &o in own {
        own_options.push(value_without(instance, i, own, o)?);
    }
    let best_own = own_options.into_iter().max().expect("nonempty");
    let mut other_options = vec![instance.value(i, other)?];
    for &o in other {
        other_options.push(value_without(instance, i, other, o)?);
    }
    let least_other = other_options.into_iter().min().expect("nonempty");
    Ok(best_own >= least_other)
}

/// Envy-freeness up to one good and one chore.
pub fn is_ef11(instance: &Instance, allocation: &Allocation) -> Result<Verdict<EnvyWitness>> {
    require_feasible(instance, allocation)?;
    let n = instance.num_agents();
    for i in 0..n {
        for j in 0..n {
            if i != j && !ef11_pair(instance, allocation, i, j)? {
                return Ok(Verdict::Fails(EnvyWitness { envious: i, envied: j }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Maximality: every unallocated item conflicts with every agent's bundle.
pub fn is_maximal(instance: &Instance, allocation: &Allocation) -> Result<Verdict<MaximalityWitness>> {
    require_feasible(instance, allocation)?;
    let allocated = allocation.allocated();
    for item in 0..instance.num_items() {
        if allocated.contains(&item) {
            continue;
        }
        for (agent, bundle) in allocation.bundles().iter().enumerate() {
            if !instance.graph().conflicts_with(item, bundle) {
                return Ok(Verdict::Fails(MaximalityWitness { agent, item }));
            }
        }
    }
    Ok(Verdict::Holds)
}

/// Completeness: every item is allocated.
pub fn is_complete(
    instance: &Instance,
    allocation: &Allocation,
) -> Result<Verdict<CompletenessWitness>> {
    require_feasible(instance, allocation)?;
    let allocated = allocation.allocated();
    for item in 0..instance.num_items() {
        if !allocated.contains(&item) {
            return Ok(Verdict::Fails(CompletenessWitness { item }));
        }
    }
    Ok(Verdict::Holds)
}

/// The comparison set for Pareto optimality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoUniverse {
    Feasible,
    Maximal,
    Complete,
}

impl PoUniverse {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(PoUniverse::Feasible),
            "maximal" => Ok(PoUniverse::Maximal),
            "complete" => Ok(PoUniverse::Complete),
            other => Err(Error::InvalidParams(format!("unknown PO universe {other:?}"))),
        }
    }
}

/// Pareto optimality against every allocation in the chosen universe,
/// decided by exhaustive (pruned) enumeration. The checked allocation
/// itself need not belong to the universe.
pub fn is_pareto_optimal(
    instance: &Instance,
    allocation: &Allocation,
    universe: PoUniverse,
    budget: &EnumerationBudget,
) -> Result<Verdict<DominationWitness>> {
    require_feasible(instance, allocation)?;
    let n = instance.num_agents();
    let mut own_values = Vec::with_capacity(n);
    for i in 0..n {
        own_values.push(instance.value(i, allocation.bundle(i))?);
    }
    let mut dominating: Option<Allocation> = None;
    let mut failure: Option<Error> = None;
    let outcome = for_each_feasible(instance, budget, false, &mut |st| {
        let in_universe = match universe {
            PoUniverse::Feasible => true,
            PoUniverse::Maximal => st.is_maximal_state(),
            PoUniverse::Complete => st.is_complete_state(),
        };
        if !in_universe {
            return ControlFlow::Continue(());
        }
        let candidate = st.to_allocation();
        let mut strict = false;
        for i in 0..n {
            match instance.value(i, candidate.bundle(i)) {
                Ok(v) => {
                    if v < own_values[i] {
                        return ControlFlow::Continue(());
                    }
                    if v > own_values[i] {
                        strict = true;
                    }
                }
                Err(e) => {
                    failure = Some(e);
                    return ControlFlow::Break(());
                }
            }
        }
        if strict {
            dominating = Some(candidate);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(Error::BudgetExhausted(msg)) => return Err(Error::OracleTooLarge(msg)),
        Err(e) => return Err(e),
    };
    if let Some(e) = failure {
        return Err(e);
    }
    match dominating {
        Some(by) => Ok(Verdict::Fails(DominationWitness { by })),
        None => {
            debug_assert_eq!(outcome, Exhaustion::Exhausted);
            Ok(Verdict::Holds)
        }
    }
}

/// Order-adjacency of an ordered pair of two-agent allocations:
/// |A1 \ A'1| <= 1 and |A'2 \ A2| <= 1. Not symmetric.
pub fn is_order_adjacent(a: &Allocation, a_prime: &Allocation) -> Result<bool> {
    if a.num_agents() != 2 || a_prime.num_agents() != 2 {
        return Err(Error::InvalidParams("order-adjacency is defined for 2 bundles".into()));
    }
    let removed = a.bundle(0).difference(a_prime.bundle(0)).count();
    let added = a_prime.bundle(1).difference(a.bundle(1)).count();
    Ok(removed <= 1 && added <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::builtin;
    use crate::model::testutil::alloc;
    use crate::model::negate_valuations;

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    #[test]
    fn envy_free_examples() {
        let inst = builtin("ex1_path4").unwrap();
        let v = is_envy_free(&inst, &alloc(&[&[1, 3], &[0, 2]])).unwrap();
        assert_eq!(v.witness(), Some(&EnvyWitness { envious: 1, envied: 0 }));
        assert!(is_envy_free(&inst, &alloc(&[&[], &[]])).unwrap().holds());
        // identical valuations, equal-value bundles
        assert!(is_envy_free(&inst, &alloc(&[&[0], &[2]])).unwrap().holds());
    }

    #[test]
    fn ef1_examples() {
        let inst = builtin("ex1_path4").unwrap();
        assert!(is_ef1(&inst, &alloc(&[&[1, 3], &[0, 2]])).unwrap().holds());

        let prop3 = builtin("prop3_clique(2)").unwrap();
        let v = is_ef1(&prop3, &alloc(&[&[0], &[1]])).unwrap();
        assert_eq!(v.witness(), Some(&EnvyWitness { envious: 1, envied: 0 }));

        let rr = builtin("rr8_path").unwrap();
        let rr_out = alloc(&[&[0, 2, 4, 6], &[3, 1, 5, 7]]);
        assert!(!is_ef1(&rr, &rr_out).unwrap().holds());
    }

    #[test]
    fn efx_examples() {
        let inst = builtin("ex1_path4").unwrap();
        assert!(is_efx(&inst, &alloc(&[&[3], &[0, 2]])).unwrap().holds());
        let v = is_efx(&inst, &alloc(&[&[3, 1], &[0, 2]])).unwrap();
        assert!(!v.holds());
        // envy-free implies EFX on a goods instance
        let ef = alloc(&[&[0], &[2]]);
        assert!(is_envy_free(&inst, &ef).unwrap().holds());
        assert!(is_efx(&inst, &ef).unwrap().holds());
    }

    #[test]
    fn ef11_examples() {
        let prop3 = builtin("prop3_clique(2)").unwrap();
        assert!(is_ef11(&prop3, &alloc(&[&[0], &[1]])).unwrap().holds());

        let inst = builtin("ex1_path4").unwrap();
        let a = alloc(&[&[1, 3], &[0, 2]]);
        assert!(is_ef1(&inst, &a).unwrap().holds());
        assert!(is_ef11(&inst, &a).unwrap().holds()); // EF1 implies EF[1,1]
    }

    #[test]
    fn ef11_equals_ef1_on_goods() {
        use rand::SeedableRng;
        use crate::instances::{generate, GraphFamily, ValuationFamily};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let mut tried = 0;
        for seed in 0..80u64 {
            let gen = generate(
                &GraphFamily::Gnp { m: 7, p: 0.3 },
                &ValuationFamily::AdditiveInteger { lo: 0, hi: 9, identical: false },
                2,
                seed,
            )
            .unwrap();
            let inst = gen.instance;
            for _ in 0..8 {
                let a = random_feasible(&inst, &mut rng);
                tried += 1;
                assert_eq!(
                    is_ef1(&inst, &a).unwrap().holds(),
                    is_ef11(&inst, &a).unwrap().holds()
                );
            }
        }
        assert!(tried >= 500);
    }

    use crate::model::testutil::random_feasible;

    #[test]
    fn maximality_examples() {
        let inst = builtin("ex1_path4").unwrap();
        let v = is_maximal(&inst, &alloc(&[&[3], &[0, 2]])).unwrap();
        assert_eq!(v.witness(), Some(&MaximalityWitness { agent: 0, item: 1 }));
        assert!(is_maximal(&inst, &alloc(&[&[1, 3], &[0, 2]])).unwrap().holds());

        let ex3 = builtin("ex3_path5_chores").unwrap();
        assert!(is_maximal(&ex3, &alloc(&[&[0, 4], &[2]])).unwrap().holds());
    }

    #[test]
    fn completeness_examples() {
        let inst = builtin("ex1_path4").unwrap();
        assert!(is_complete(&inst, &alloc(&[&[1, 3], &[0, 2]])).unwrap().holds());
        let v = is_complete(&inst, &alloc(&[&[3], &[0, 2]])).unwrap();
        assert_eq!(v.witness(), Some(&CompletenessWitness { item: 1 }));
        assert!(!is_complete(&inst, &alloc(&[&[], &[]])).unwrap().holds());
    }

    #[test]
    fn pareto_examples() {
        let ex2 = builtin("ex2_cycle6").unwrap();
        let low_high = alloc(&[&[0, 2, 4], &[1, 3, 5]]);
        assert!(is_pareto_optimal(&ex2, &low_high, PoUniverse::Feasible, &budget())
            .unwrap()
            .holds());
        let tiny = alloc(&[&[0], &[1]]);
        let v = is_pareto_optimal(&ex2, &tiny, PoUniverse::Feasible, &budget()).unwrap();
        assert!(!v.holds());

        let ex3 = builtin("ex3_path5_chores").unwrap();
        let heavy = alloc(&[&[1], &[3]]);
        let v = is_pareto_optimal(&ex3, &heavy, PoUniverse::Maximal, &budget()).unwrap();
        let w = v.witness().expect("dominated");
        // the extreme-items allocation dominates it
        for i in 0..2 {
            assert!(ex3.value(i, w.by.bundle(i)).unwrap() >= ex3.value(i, heavy.bundle(i)).unwrap());
        }
    }

    #[test]
    fn order_adjacency_examples() {
        // one removal on side 1, one addition on side 2 (1-based items here)
        let a = alloc(&[&[1, 3], &[2]]);
        let b = alloc(&[&[3], &[2, 4]]);
        assert!(is_order_adjacent(&a, &b).unwrap());
        let a = alloc(&[&[1, 2], &[]]);
        let b = alloc(&[&[], &[]]);
        assert!(!is_order_adjacent(&a, &b).unwrap());
        assert!(is_order_adjacent(&alloc(&[&[], &[]]), &alloc(&[&[], &[]])).unwrap());
        assert!(is_order_adjacent(&alloc(&[&[], &[], &[]]), &alloc(&[&[], &[], &[]])).is_err());
    }

    // Prop 1: for identical valuations, EF1 and EFX verdicts are invariant
    // under pointwise negation of the valuation.
    #[test]
    fn goods_chores_equivalence() {
        use rand::SeedableRng;
        use crate::instances::{generate, GraphFamily, ValuationFamily};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let mut samples = 0;
        for seed in 100..180u64 {
            let gen = generate(
                &GraphFamily::Gnp { m: 6, p: 0.35 },
                &ValuationFamily::AdditiveInteger { lo: -5, hi: 9, identical: true },
                3,
                seed,
            )
            .unwrap();
            let inst = gen.instance;
            let neg = negate_valuations(&inst);
            for _ in 0..8 {
                let a = random_feasible(&inst, &mut rng);
                samples += 1;
                assert_eq!(is_ef1(&inst, &a).unwrap().holds(), is_ef1(&neg, &a).unwrap().holds());
                assert_eq!(is_efx(&inst, &a).unwrap().holds(), is_efx(&neg, &a).unwrap().holds());
            }
        }
        assert!(samples >= 500);
    }
}
