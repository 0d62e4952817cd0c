//! Built-in example instances, seeded random generators, and the
//! interval-spec conversion. File formats live in [`io`].

pub mod io;


use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{ConflictGraph, Instance, Monotonicity, NamedRule, ValuationProfile};
use crate::value::{rat, Rat};

// ---------------------------------------------------------------------------
// Built-in catalog
// ---------------------------------------------------------------------------

/// Catalog names, with parametrized entries shown with their parameter.
pub const CATALOG: [&str; 10] = [
    "ex1_path4",
    "ex2_cycle6",
    "ex3_path5_chores",
    "ex4_path4",
    "rr8_path",
    "ec5_path",
    "thm6_k33",
    "thm7_k3n(n)",
    "prop3_clique(n)",
    "nonmono_path2",
];

fn path(m: usize) -> ConflictGraph {
    ConflictGraph::new(m, (0..m - 1).map(|i| (i, i + 1))).unwrap()
}

fn labels(m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("o{k}")).collect()
}

fn ints(vals: &[i64]) -> Vec<Rat> {
    vals.iter().map(|&v| rat(v)).collect()
}

/// Returns the named built-in instance. Parametrized entries are written
/// `thm7_k3n(5)` / `prop3_clique(3)`.
pub fn builtin(name: &str) -> Result<Instance> {
    let identical_additive_path = |values: &[i64]| -> Result<Instance> {
        let m = values.len();
        Instance::new(
            path(m),
            ValuationProfile::additive_identical(2, ints(values)),
            Some(labels(m)),
        )
    };
    match name {
        "ex1_path4" => identical_additive_path(&[1, 1, 1, 4]),
        "ex4_path4" => identical_additive_path(&[1, 3, 1, 3]),
        "ex3_path5_chores" => identical_additive_path(&[-2, -10, -1, -10, -2]),
        "rr8_path" => identical_additive_path(&[10, 3, 8, 9, 7, 2, 1, 0]),
        "ec5_path" => identical_additive_path(&[4, 0, 2, 3, 2]),
        "nonmono_path2" => identical_additive_path(&[1, -1]),
        "ex2_cycle6" => {
            let g = ConflictGraph::new(6, (0..6).map(|i| (i, (i + 1) % 6)))?;
            Instance::new(
                g,
                ValuationProfile::additive_identical(2, ints(&[1, 2, 1, 2, 1, 2])),
                Some(labels(6)),
            )
        }
        "thm6_k33" => {
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for a in 0..3 {
                for b in 3..6 {
                    edges.push((a, b));
                }
            }
            edges.push((0, 6));
            edges.push((3, 6));
            let g = ConflictGraph::new(7, edges)?;
            Instance::new(
                g,
                ValuationProfile::rule(3, NamedRule::Thm6K33, Monotonicity::NonDecreasing),
                Some(labels(7)),
            )
        }
        other => {
            if let Some(n) = parse_param(other, "thm7_k3n") {
                return thm7_k3n(n);
            }
            if let Some(n) = parse_param(other, "prop3_clique") {
                return prop3_clique(n);
            }
            Err(Error::UnknownBuiltin(other.into()))
        }
    }
}

fn parse_param(name: &str, prefix: &str) -> Option<usize> {
    let rest = name.strip_prefix(prefix)?;
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    inner.trim().parse().ok()
}

/// m = n+2 goods on K_{3,n-1}: the left part is worth 2 per good, the
/// right part 3 per good; no maximal EF1 allocation exists for n >= 4.
pub fn thm7_k3n(n: usize) -> Result<Instance> {
    if n < 4 {
        return Err(Error::UnknownBuiltin(format!("thm7_k3n needs n >= 4, got {n}")));
    }
    let m = n + 2;
    let mut edges = Vec::new();
    for a in 0..3 {
        for b in 3..m {
            edges.push((a, b));
        }
    }
    let g = ConflictGraph::new(m, edges)?;
    let values: Vec<Rat> = (0..m).map(|o| if o < 3 { rat(2) } else { rat(3) }).collect();
    Instance::new(g, ValuationProfile::additive_identical(n, values), Some(labels(m)))
}

/// n items on a complete graph: n-1 goods worth +1 and one chore worth -1;
/// no maximal EF1 allocation exists for any n >= 2.
pub fn prop3_clique(n: usize) -> Result<Instance> {
    if n < 2 {
        return Err(Error::UnknownBuiltin(format!("prop3_clique needs n >= 2, got {n}")));
    }
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    let g = ConflictGraph::new(n, edges)?;
    let mut values = vec![rat(1); n];
    values[n - 1] = rat(-1);
    Instance::new(g, ValuationProfile::additive_identical(n, values), Some(labels(n)))
}

// ---------------------------------------------------------------------------
// Interval specifications
// ---------------------------------------------------------------------------

/// Half-open intervals (l, r] with per-item values. Two items conflict
/// iff their intervals intersect.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSpec {
    pub intervals: Vec<(Rat, Rat)>,
    pub values: Vec<Rat>,
}

impl IntervalSpec {
    /// Validates l < r per interval and pairwise-distinct endpoints.
    /// With `perturb`, duplicate endpoints are instead separated by a
    /// deterministic tie-break: each endpoint is offset by its occurrence
    /// rank times a delta smaller than any nonzero endpoint gap, which
    /// realizes the lexicographic order (value, occurrence) exactly.
    pub fn validated(mut self, perturb: bool) -> Result<IntervalSpec> {
        if self.intervals.len() != self.values.len() {
            return Err(Error::InvalidParams("interval and value counts differ".into()));
        }
        for (l, r) in &self.intervals {
            if l >= r {
                return Err(Error::InvalidParams(format!("interval ({l}, {r}] is empty")));
            }
        }
        let mut endpoints: Vec<Rat> = Vec::new();
        for (l, r) in &self.intervals {
            endpoints.push(l.clone());
            endpoints.push(r.clone());
        }
        let mut sorted = endpoints.clone();
        sorted.sort();
        let has_dup = sorted.windows(2).any(|w| w[0] == w[1]);
        if !has_dup {
            return Ok(self);
        }
        if !perturb {
            return Err(Error::InvalidParams(
                "duplicate interval endpoints (pass perturb to separate them)".into(),
            ));
        }
        let min_gap = sorted
            .windows(2)
            .filter(|w| w[0] != w[1])
            .map(|w| w[1].clone() - w[0].clone())
            .min()
            .unwrap_or_else(|| rat(1));
        let delta = min_gap / rat(2 * endpoints.len() as i64);
        let mut seen: std::collections::BTreeMap<Rat, i64> = Default::default();
        let mut bump = |v: &mut Rat| {
            let k = seen.entry(v.clone()).or_insert(0);
            *v += delta.clone() * rat(*k);
            *k += 1;
        };
        for i in 0..self.intervals.len() {
            let (mut l, mut r) = self.intervals[i].clone();
            bump(&mut l);
            bump(&mut r);
            self.intervals[i] = (l, r);
        }
        self.validated(false)
    }

    /// Item indices sorted by right endpoint (finish time).
    pub fn finish_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.intervals.len()).collect();
        order.sort_by(|&a, &b| self.intervals[a].1.cmp(&self.intervals[b].1));
        order
    }
}

/// Half-open intervals intersect iff each starts before the other ends.
pub fn intervals_intersect(a: &(Rat, Rat), b: &(Rat, Rat)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

/// Conflict graph of an interval spec: edge {i,j} iff the intervals of
/// i and j intersect.
pub fn interval_to_graph(spec: &IntervalSpec) -> Result<ConflictGraph> {
    let spec = spec.clone().validated(false)?;
    let m = spec.intervals.len();
    let mut edges = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            if intervals_intersect(&spec.intervals[i], &spec.intervals[j]) {
                edges.push((i, j));
            }
        }
    }
    ConflictGraph::new(m, edges)
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum GraphFamily {
    Path(usize),
    Cycle(usize),
    /// Random recursive tree: vertex i attaches to a uniform earlier vertex.
    Tree(usize),
    /// Random bipartite graph: each cross pair is an edge with probability p.
    Bipartite { left: usize, right: usize, p: f64 },
    Gnp { m: usize, p: f64 },
    /// Random interval graph from a random interval spec.
    Interval(usize),
}

#[derive(Debug, Clone)]
pub enum ValuationFamily {
    /// Integer item values drawn uniformly from lo..=hi; identical rows
    /// share one draw, otherwise each agent gets its own.
    AdditiveInteger { lo: i64, hi: i64, identical: bool },
    Uniform,
    /// Identical monotone non-additive profile v(S) = isqrt(sum of weights),
    /// with integer weights drawn from 0..=weight_hi.
    MonotoneConcave { weight_hi: i64 },
}

/// A generated instance, plus the interval spec when the graph family
/// was `Interval` (solvers need the representation, not just the graph).
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: Instance,
    pub interval_spec: Option<IntervalSpec>,
}

/// Deterministic instance generator: the same (family, valuations,
/// num_agents, seed) always yields the same instance.
pub fn generate(
    family: &GraphFamily,
    valuations: &ValuationFamily,
    num_agents: usize,
    seed: u64,
) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (graph, spec) = generate_graph(family, &mut rng)?;
    let m = graph.num_items();
    let profile = generate_valuations(valuations, num_agents, m, &mut rng)?;
    let instance = Instance::new(graph, profile, None)?;
    Ok(Generated { instance, interval_spec: spec })
}

fn generate_graph(
    family: &GraphFamily,
    rng: &mut ChaCha8Rng,
) -> Result<(ConflictGraph, Option<IntervalSpec>)> {
    let check_m = |m: usize| {
        if m == 0 {
            Err(Error::InvalidParams("need at least one item".into()))
        } else {
            Ok(())
        }
    };
    match *family {
        GraphFamily::Path(m) => {
            check_m(m)?;
            Ok((path(m), None))
        }
        GraphFamily::Cycle(m) => {
            if m < 3 {
                return Err(Error::InvalidParams("cycle needs m >= 3".into()));
            }
            Ok((ConflictGraph::new(m, (0..m).map(|i| (i, (i + 1) % m)))?, None))
        }
        GraphFamily::Tree(m) => {
            check_m(m)?;
            let mut edges = Vec::new();
            for i in 1..m {
                edges.push((rng.gen_range(0..i), i));
            }
            Ok((ConflictGraph::new(m, edges)?, None))
        }
        GraphFamily::Bipartite { left, right, p } => {
            check_m(left + right)?;
            check_p(p)?;
            let mut edges = Vec::new();
            for a in 0..left {
                for b in left..left + right {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            Ok((ConflictGraph::new(left + right, edges)?, None))
        }
        GraphFamily::Gnp { m, p } => {
            check_m(m)?;
            check_p(p)?;
            let mut edges = Vec::new();
            for a in 0..m {
                for b in a + 1..m {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            Ok((ConflictGraph::new(m, edges)?, None))
        }
        GraphFamily::Interval(m) => {
            check_m(m)?;
            // 2m distinct integer endpoints drawn from a 4m universe,
            // paired at random.
            let mut pool: Vec<i64> = (0..4 * m as i64).collect();
            pool.shuffle(rng);
            pool.truncate(2 * m);
            let mut intervals = Vec::with_capacity(m);
            for i in 0..m {
                let (a, b) = (pool[2 * i], pool[2 * i + 1]);
                intervals.push((rat(a.min(b)), rat(a.max(b))));
            }
            let spec = IntervalSpec { intervals, values: vec![rat(0); m] }.validated(false)?;
            let graph = interval_to_graph(&spec)?;
            Ok((graph, Some(spec)))
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParams(format!("probability {p} out of [0,1]")));
    }
    Ok(())
}

fn generate_valuations(
    family: &ValuationFamily,
    num_agents: usize,
    num_items: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ValuationProfile> {
    if num_agents == 0 {
        return Err(Error::InvalidParams("need at least one agent".into()));
    }
    match *family {
        ValuationFamily::AdditiveInteger { lo, hi, identical } => {
            if lo > hi {
                return Err(Error::InvalidParams(format!("empty value range {lo}..={hi}")));
            }
            let draw = |rng: &mut ChaCha8Rng| -> Vec<Rat> {
                (0..num_items).map(|_| rat(rng.gen_range(lo..=hi))).collect()
            };
            if identical {
                Ok(ValuationProfile::additive_identical(num_agents, draw(rng)))
            } else {
                let rows: Vec<Vec<Rat>> = (0..num_agents).map(|_| draw(rng)).collect();
                Ok(ValuationProfile::additive_per_agent(rows))
            }
        }
        ValuationFamily::Uniform => Ok(ValuationProfile::uniform(num_agents)),
        ValuationFamily::MonotoneConcave { weight_hi } => {
            if weight_hi < 0 {
                return Err(Error::InvalidParams("concave weight bound must be >= 0".into()));
            }
            let weights: Vec<i64> = (0..num_items).map(|_| rng.gen_range(0..=weight_hi)).collect();
            Ok(ValuationProfile::rule(
                num_agents,
                NamedRule::ConcaveRootSum { weights },
                Monotonicity::NonDecreasing,
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testutil::set;

    #[test]
    fn catalog_covers_examples() {
        let ex1 = builtin("ex1_path4").unwrap();
        assert_eq!(ex1.num_items(), 4);
        assert_eq!(ex1.value(0, &set(&[3])).unwrap(), rat(4));

        let thm7 = builtin("thm7_k3n(4)").unwrap();
        assert_eq!(thm7.num_items(), 6);
        assert_eq!(thm7.num_agents(), 4);
        // K_{3,3}: all 9 cross edges, nothing else
        assert_eq!(thm7.graph().num_edges(), 9);
        for a in 0..3 {
            for b in 3..6 {
                assert!(thm7.graph().are_adjacent(a, b));
            }
        }

        let prop3 = builtin("prop3_clique(3)").unwrap();
        assert_eq!(prop3.num_items(), 3);
        assert_eq!(prop3.value(0, &set(&[0])).unwrap(), rat(1));
        assert_eq!(prop3.value(0, &set(&[2])).unwrap(), rat(-1));
        assert_eq!(prop3.graph().num_edges(), 3);

        assert!(builtin("thm7_k3n(3)").is_err());
        assert!(builtin("prop3_clique(1)").is_err());
        assert!(builtin("no_such_instance").is_err());
    }

    #[test]
    fn all_builtins_validate() {
        let names = [
            "ex1_path4",
            "ex2_cycle6",
            "ex3_path5_chores",
            "ex4_path4",
            "rr8_path",
            "ec5_path",
            "thm6_k33",
            "thm7_k3n(4)",
            "thm7_k3n(5)",
            "prop3_clique(2)",
            "prop3_clique(4)",
            "nonmono_path2",
        ];
        for name in names {
            let inst = builtin(name).unwrap();
            assert!(inst.num_agents() >= 1);
            assert!(inst.num_items() >= 1);
        }
    }

    #[test]
    fn thm6_declared_monotonicity_sample_verified() {
        use rand::{Rng, SeedableRng};
        let inst = builtin("thm6_k33").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let t: std::collections::BTreeSet<usize> = (0..7).filter(|_| rng.gen_bool(0.5)).collect();
            let s: std::collections::BTreeSet<usize> =
                t.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            assert!(inst.value(0, &s).unwrap() <= inst.value(0, &t).unwrap(), "{s:?} vs {t:?}");
        }
    }

    #[test]
    fn interval_conversion_examples() {
        let two = IntervalSpec {
            intervals: vec![(rat(0), rat(1)), (rat(1), rat(2))],
            values: vec![rat(0); 2],
        };
        // duplicate endpoint 1 is rejected without perturbation
        assert!(interval_to_graph(&two).is_err());
        let fixed = two.validated(true).unwrap();
        let g = interval_to_graph(&fixed).unwrap();
        assert_eq!(g.num_edges(), 0); // touching half-open intervals are disjoint

        let overlapping = IntervalSpec {
            intervals: vec![(rat(0), rat(2)), (rat(1), rat(3))],
            values: vec![rat(0); 2],
        };
        assert_eq!(interval_to_graph(&overlapping).unwrap().num_edges(), 1);

        let three = IntervalSpec {
            intervals: vec![(rat(0), rat(5)), (rat(1), rat(2)), (rat(3), rat(4))],
            values: vec![rat(0); 3],
        };
        let g = interval_to_graph(&three).unwrap();
        let edges: Vec<(usize, usize)> = g.edges().collect();
        assert_eq!(edges, vec![(0, 1), (0, 2)]);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(
            &GraphFamily::Path(5),
            &ValuationFamily::AdditiveInteger { lo: 0, hi: 9, identical: false },
            2,
            1,
        )
        .unwrap();
        let b = generate(
            &GraphFamily::Path(5),
            &ValuationFamily::AdditiveInteger { lo: 0, hi: 9, identical: false },
            2,
            1,
        )
        .unwrap();
        assert_eq!(a.instance, b.instance);

        let g = generate(&GraphFamily::Gnp { m: 6, p: 0.0 }, &ValuationFamily::Uniform, 2, 3).unwrap();
        assert_eq!(g.instance.graph().num_edges(), 0);
    }

    #[test]
    fn generated_interval_graph_matches_spec() {
        for seed in 0..20 {
            let g = generate(
                &GraphFamily::Interval(8),
                &ValuationFamily::AdditiveInteger { lo: 0, hi: 9, identical: true },
                2,
                seed,
            )
            .unwrap();
            let spec = g.interval_spec.expect("interval family returns a spec");
            assert_eq!(&interval_to_graph(&spec).unwrap(), g.instance.graph());
        }
    }

    #[test]
    fn interval_greedy_coloring_matches_clique_number() {
        // first-fit in decreasing finish order (the mirror image of the
        // classical increasing-start sweep) colors an interval graph with
        // exactly clique-number colors; increasing finish order does not
        // have this guarantee
        for seed in 0..30 {
            let g = generate(&GraphFamily::Interval(10), &ValuationFamily::Uniform, 2, seed).unwrap();
            let spec = g.interval_spec.unwrap();
            let graph = g.instance.graph();
            let mut order = spec.finish_order();
            order.reverse();
            let mut colors = vec![usize::MAX; 10];
            let mut used = 0usize;
            for &i in &order {
                let mut c = 0;
                loop {
                    if (0..10).all(|j| colors[j] != c || !graph.are_adjacent(i, j)) {
                        colors[i] = c;
                        used = used.max(c + 1);
                        break;
                    }
                    c += 1;
                }
            }
            // clique number = max number of intervals covering any point;
            // for half-open intervals the max is attained at a right endpoint
            let mut clique = 0;
            for i in 0..10 {
                let p = &spec.intervals[i].1;
                let cover = (0..10)
                    .filter(|&j| spec.intervals[j].0 < *p && *p <= spec.intervals[j].1)
                    .count();
                clique = clique.max(cover);
            }
            assert_eq!(used, clique, "seed {seed}");
        }
    }
}
