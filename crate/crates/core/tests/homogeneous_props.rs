mod common;

use common::{brute_force_homogeneous, random_graph, random_positions, random_table, TOL};
use flowdec_core::homogeneous::{build_network, solve_homogeneous, ArcRole};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Case {
    graph: flowdec_core::WorkspaceGraph,
    horizon: usize,
    start: Vec<usize>,
    pool: usize,
    rewards: flowdec_core::RewardTable,
}

fn random_case(seed: u64) -> Case {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.gen_range(1..=5);
    let graph = random_graph(&mut rng, n);
    let horizon = rng.gen_range(1..=3);
    let pool = rng.gen_range(1..=3);
    let start = random_positions(&mut rng, n, pool);
    let rewards = random_table(&mut rng, horizon, n);
    Case {
        graph,
        horizon,
        start,
        pool,
        rewards,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn matches_trajectory_enumeration(seed in any::<u64>()) {
        let c = random_case(seed);
        let sol = solve_homogeneous(&c.rewards, &c.start, &c.graph, c.horizon, c.pool).unwrap();
        let best = brute_force_homogeneous(&c.rewards, &c.start, &c.graph, c.horizon);
        prop_assert!((sol.value - best).abs() < TOL, "{} vs {best}", sol.value);
        prop_assert!((sol.value + sol.flow_cost).abs() < TOL);
    }

    #[test]
    fn plan_is_a_consistent_flow(seed in any::<u64>()) {
        let c = random_case(seed);
        let n = c.graph.vertex_count();
        let sol = solve_homogeneous(&c.rewards, &c.start, &c.graph, c.horizon, c.pool).unwrap();
        for step in 0..=c.horizon {
            let here = sol.positions(step, n, &c.start);
            prop_assert_eq!(here.iter().sum::<usize>(), c.pool);
            for v in 0..n {
                if sol.claims[step][v] {
                    prop_assert!(here[v] > 0);
                    prop_assert!(c.rewards.get(step, v) > 0.0);
                }
            }
            if step < c.horizon {
                let mut leaving = vec![0; n];
                for (&(tau, from, to), &k) in &sol.moves {
                    if tau == step {
                        prop_assert!(c.graph.has_edge(from, to));
                        leaving[from] += k;
                    }
                }
                prop_assert_eq!(leaving, here);
            }
        }
        let claimed: f64 = (0..=c.horizon)
            .flat_map(|s| (0..n).map(move |v| (s, v)))
            .filter(|&(s, v)| sol.claims[s][v])
            .map(|(s, v)| c.rewards.get(s, v))
            .sum();
        prop_assert!((claimed - sol.value).abs() < TOL);
    }

    #[test]
    fn network_size_follows_the_layout(seed in any::<u64>()) {
        let c = random_case(seed);
        let n = c.graph.vertex_count();
        let t = c.horizon;
        let built = build_network(&c.rewards, &c.start, &c.graph, t, c.pool).unwrap();
        let positive = c.rewards.rows().flatten().filter(|&&r| r > 0.0).count();
        let occupied = c.start.iter().filter(|&&k| k > 0).count();
        prop_assert_eq!(built.network.node_count, 2 * n * (t + 1) + 2);
        prop_assert_eq!(
            built.network.arcs.len(),
            occupied + n * (t + 1) + positive + t * c.graph.edge_count() + n
        );
        prop_assert_eq!(built.count_roles(|r| matches!(r, ArcRole::Collect { .. })), positive);
        for (arc, role) in built.network.arcs.iter().zip(&built.roles) {
            if let ArcRole::Collect { step, vertex } = *role {
                prop_assert_eq!(arc.from, built.entry_node(step, vertex));
                prop_assert_eq!(arc.to, built.exit_node(step, vertex));
                prop_assert_eq!(arc.cost, -c.rewards.get(step, vertex));
            }
        }
    }
}

#[test]
fn extra_agents_never_hurt() {
    for seed in 0..200u64 {
        let c = random_case(seed);
        let one = solve_homogeneous(&c.rewards, &c.start, &c.graph, c.horizon, c.pool).unwrap();
        let mut more = c.start.clone();
        let k = seed as usize % more.len();
        more[k] += 1;
        let two = solve_homogeneous(&c.rewards, &more, &c.graph, c.horizon, c.pool + 1).unwrap();
        assert!(two.value >= one.value - TOL, "seed {seed}");
    }
}
