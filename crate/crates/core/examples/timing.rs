use fairgraph::model::{ConflictGraph, Instance, ValuationProfile};
use fairgraph::path_ef11::*;
use fairgraph::value::rat;
use rand::{Rng, SeedableRng};
use std::time::{Duration, Instant};

fn main() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
    let mut worst = Duration::ZERO;
    for trial in 0..5000 {
        let n = rng.gen_range(3..=6usize);
        let m = rng.gen_range(1..=30usize);
        let values: Vec<_> = (0..m).map(|_| rat(rng.gen_range(-9..=9))).collect();
        let graph = ConflictGraph::new(m, (0..m.saturating_sub(1)).map(|i| (i, i + 1))).unwrap();
        let inst = Instance::new(graph, ValuationProfile::additive_identical(n, values), None).unwrap();
        let t0 = Instant::now();
        let red = build_clique_cycle(&inst, n).unwrap();
        let coloring = color_clique_cycle(&red.h, n).unwrap();
        let dt = t0.elapsed();
        if dt > Duration::from_millis(300) {
            println!("SLOW trial {trial} n={n} m={m} H={} took {dt:?}", red.h.num_vertices());
        }
        let _ = allocation_from_coloring(&inst, &red, &coloring).unwrap();
        if dt > worst { worst = dt; }
        if trial % 500 == 0 { eprintln!("... trial {trial}, worst so far {worst:?}"); }
    }
    println!("5000 trials ok; worst {worst:?}");
}
