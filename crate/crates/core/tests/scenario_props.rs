mod common;

use common::random_graph;
use flowdec_core::flowdec::Planner;
use flowdec_core::scenario::{
    expected_rewards, generate, propagate, simulate, ScenarioParams, Simulator,
};
use flowdec_core::WorkspaceGraph;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

/// Random graph where every vertex carries a self-loop.
fn lazy_graph(rng: &mut StdRng, n: usize) -> WorkspaceGraph {
    let base = random_graph(rng, n);
    let mut edges = base.edges().to_vec();
    for v in 0..n {
        if !base.has_edge(v, v) {
            edges.push((v, v));
        }
    }
    WorkspaceGraph::new(n, edges).unwrap()
}

fn params(seed: u64) -> ScenarioParams {
    ScenarioParams {
        rows: 3,
        cols: 3,
        horizon: 3,
        fleets: 2,
        fleet_size: 2,
        objects: 2,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn propagation_keeps_mass(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(1..=12);
        let g = lazy_graph(&mut rng, n);
        let mut row: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..3.0)).collect();
        let mass: f64 = row.iter().sum();
        for _ in 0..1000 {
            row = propagate(&row, &g).unwrap();
            prop_assert!(row.iter().all(|&x| x >= 0.0));
        }
        prop_assert!((row.iter().sum::<f64>() - mass).abs() < 1e-6);
    }

    #[test]
    fn generated_rewards_follow_the_draws(seed in any::<u64>()) {
        let p = params(seed);
        let inst = generate(&p).unwrap();
        prop_assert_eq!(&inst, &generate(&p).unwrap());
        let n = p.vertex_count();
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let objects: Vec<Vec<usize>> = (0..=p.fleets)
            .map(|_| (0..p.objects).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        for f in 0..p.fleets {
            let mut counts = vec![0; n];
            for _ in 0..p.fleet_size {
                counts[rng.gen_range(0..n)] += 1;
            }
            prop_assert_eq!(inst.initial_positions(f), &counts[..]);
        }
        for (t, positions) in objects.iter().enumerate() {
            let want = expected_rewards(inst.graph(), positions, p.horizon).unwrap();
            prop_assert_eq!(inst.rewards(t), &want);
            for step in 0..=p.horizon {
                let mass: f64 = inst.rewards(t).row(step).iter().sum();
                prop_assert!((mass - p.objects as f64).abs() < 1e-9);
            }
        }
    }
}

/// Replays the object walks with a fresh generator and recounts the
/// collected objects from the reported agent positions.
#[test]
fn simulation_matches_a_replay() {
    for seed in 0..20u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let g = lazy_graph(&mut rng, n);
        let fleets = rng.gen_range(1..=3);
        let per_type = 3;
        let objects: Vec<Vec<usize>> = (0..=fleets)
            .map(|_| (0..per_type).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        let agents: Vec<Vec<usize>> = (0..fleets)
            .map(|_| {
                let mut c = vec![0; n];
                c[rng.gen_range(0..n)] += 2;
                c
            })
            .collect();
        let mut sim = Simulator::from_state(
            g.clone(),
            2,
            objects.clone(),
            agents,
            seed,
            Planner::FlowDec,
        )
        .unwrap();
        let mut walker = Xoshiro256PlusPlus::seed_from_u64(seed);
        let mut positions = objects;
        for _ in 0..15 {
            let rec = sim.step().unwrap();
            for v in positions.iter_mut().flatten() {
                let out = g.out_edges(*v);
                *v = g.edge(out[walker.gen_range(0..out.len())]).1;
            }
            let state = sim.state();
            assert_eq!(state.objects, positions);
            let anyone = |v: usize| state.agents.iter().any(|c| c[v] > 0);
            let mut expected = positions[0].iter().filter(|&&v| anyone(v)).count();
            for f in 0..fleets {
                expected += positions[f + 1]
                    .iter()
                    .filter(|&&v| state.agents[f][v] > 0)
                    .count();
            }
            assert_eq!(rec.realized_reward, expected as f64, "seed {seed}");
            for c in &state.agents {
                assert_eq!(c.iter().sum::<usize>(), 2);
            }
        }
    }
}

#[test]
fn realized_reward_is_bounded_and_reproducible() {
    for seed in 0..6u64 {
        let p = params(seed);
        let cap = ((p.fleets + 1) * p.objects) as f64;
        for planner in [
            Planner::FlowDec,
            Planner::PrivateFirst,
            Planner::SharedFirst,
        ] {
            let a = simulate(&p, 12, planner).unwrap();
            let b = simulate(&p, 12, planner).unwrap();
            assert_eq!(a.records.len(), 12);
            for (x, y) in a.records.iter().zip(&b.records) {
                assert!(x.realized_reward <= cap);
                assert_eq!(
                    (x.planned_value, x.realized_reward),
                    (y.planned_value, y.realized_reward)
                );
            }
            assert_eq!(a.total_realized_reward, b.total_realized_reward);
        }
    }
}
