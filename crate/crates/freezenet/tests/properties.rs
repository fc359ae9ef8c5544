//! Property checks over randomized instances: freezing along orbits,
//! run-length trace encoding, canonical serialization round trips,
//! schedule application, and decomposition shape.

mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use freezenet::core::{config_from_json, config_to_json, Network, State};
use freezenet::problems::apply_schedule;
use freezenet::traces::{enumerate_traces, RleTrace, Specification, TraceBounds, TraceSet};
use freezenet::treedecomp::{binarize_balance, heuristic_decomposition, validate_decomposition};

/// Binomial coefficient for small arguments.
fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn sampled_net(seed: u64, max_n: usize, q: usize) -> (ChaCha8Rng, Network) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=max_n);
    let g = common::random_connected_graph(&mut rng, n, 3);
    let net = common::random_freezing_net(&mut rng, &g, q);
    (rng, net)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn orbits_never_decrease(seed in any::<u64>(), q in 2usize..=4, t in 0u32..=8) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        let orbit = net.orbit(&c, t).unwrap();
        prop_assert_eq!(orbit.len(), t as usize + 1);
        prop_assert_eq!(&orbit[0], &c);
        for v in 0..net.n() {
            for s in 0..t as usize {
                prop_assert!(net.alphabet().leq(orbit[s][v], orbit[s + 1][v]));
            }
        }
    }

    #[test]
    fn orbit_columns_round_trip_through_rle(seed in any::<u64>(), q in 2usize..=3, t in 0u32..=8) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        let orbit = net.orbit(&c, t).unwrap();
        for v in 0..net.n() {
            let symbols: Vec<State> = orbit.iter().map(|row| row[v]).collect();
            let trace = RleTrace::from_symbols(&symbols, net.alphabet()).unwrap();
            prop_assert_eq!(trace.len(), t + 1);
            prop_assert_eq!(trace.first_state(), c[v]);
            prop_assert_eq!(trace.final_state(), orbit[t as usize][v]);
            prop_assert!(trace.runs().len() <= q);
            for (s, &sym) in symbols.iter().enumerate() {
                prop_assert_eq!(trace.state_at(s as u32), Some(sym));
            }
            prop_assert_eq!(trace.symbols(), symbols);
        }
    }

    #[test]
    fn network_json_survives_a_round_trip(seed in any::<u64>(), q in 2usize..=3) {
        let (mut rng, net) = sampled_net(seed, 5, q);
        let text = net.to_json().unwrap();
        let back = Network::from_json(&text).unwrap();
        prop_assert_eq!(back.n(), net.n());
        prop_assert_eq!(back.alphabet().names(), net.alphabet().names());
        prop_assert_eq!(back.to_json().unwrap(), text);
        for _ in 0..3 {
            let c = common::random_config(&mut rng, &net);
            prop_assert_eq!(
                back.step_deterministic(&c).unwrap(),
                net.step_deterministic(&c).unwrap()
            );
        }
    }

    #[test]
    fn spec_json_survives_a_round_trip(seed in any::<u64>(), q in 2usize..=3, t in 1u32..=4) {
        let (mut rng, net) = sampled_net(seed, 5, q);
        let spec = common::random_spec(&mut rng, &net, t, net.n());
        let text = spec.to_json(net.alphabet());
        let back = Specification::from_json(&text, net.alphabet()).unwrap();
        prop_assert_eq!(back.horizon(), spec.horizon());
        prop_assert_eq!(back.to_json(net.alphabet()), text);
    }

    #[test]
    fn config_json_survives_a_round_trip(seed in any::<u64>(), q in 2usize..=4) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        let text = config_to_json(&c, net.alphabet()).unwrap();
        prop_assert_eq!(config_from_json(&text, net.alphabet()).unwrap(), c);
    }

    #[test]
    fn schedules_only_raise_states(seed in any::<u64>(), q in 2usize..=3, steps in 0usize..=5) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        let schedule: Vec<Vec<usize>> = (0..steps)
            .map(|_| (0..net.n()).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        let end = apply_schedule(&net, &c, &schedule).unwrap();
        for v in 0..net.n() {
            prop_assert!(net.alphabet().leq(c[v], end[v]));
        }
    }

    #[test]
    fn saturated_schedules_match_synchronous_steps(
        seed in any::<u64>(),
        q in 2usize..=3,
        steps in 0usize..=4,
    ) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        let schedule = vec![(0..net.n()).collect::<Vec<usize>>(); steps];
        let by_schedule = apply_schedule(&net, &c, &schedule).unwrap();
        let orbit = net.orbit(&c, steps as u32).unwrap();
        prop_assert_eq!(by_schedule, orbit[steps].clone());
    }

    #[test]
    fn deterministic_successors_are_singletons(seed in any::<u64>(), q in 2usize..=3) {
        let (mut rng, net) = sampled_net(seed, 6, q);
        let c = common::random_config(&mut rng, &net);
        prop_assert!(net.is_deterministic());
        let succ = net.successors(&c, 16).unwrap();
        prop_assert_eq!(succ, vec![net.step_deterministic(&c).unwrap()]);
    }

    #[test]
    fn enumerated_traces_are_exactly_the_monotone_words(
        q in 2u64..=4,
        t in 0u32..=9,
        start in proptest::option::of(0u64..4),
        end in proptest::option::of(0u64..4),
    ) {
        let alphabet = common::linear_alphabet(q as usize);
        let bounds = TraceBounds {
            start: start.map(|s| (s % q) as State),
            end: end.map(|e| (e % q) as State),
        };
        let traces = enumerate_traces(&alphabet, t, bounds, 1 << 20).unwrap();
        for w in traces.windows(2) {
            prop_assert!(w[0].canonical_key() < w[1].canonical_key());
        }
        for trace in &traces {
            prop_assert_eq!(trace.len(), t + 1);
            let symbols = trace.symbols();
            for pair in symbols.windows(2) {
                prop_assert!(alphabet.leq(pair[0], pair[1]));
            }
            if let Some(s) = bounds.start {
                prop_assert_eq!(trace.first_state(), s);
            }
            if let Some(e) = bounds.end {
                prop_assert_eq!(trace.final_state(), e);
            }
        }
        // A monotone word is a multiset of rise times, so the counts have
        // closed forms to compare against.
        match (bounds.start, bounds.end) {
            (None, None) => {
                let expect = choose(u64::from(t) + q, q - 1);
                prop_assert_eq!(traces.len() as u64, expect);
            }
            (Some(s), Some(e)) => {
                let expect = if !alphabet.leq(s, e) {
                    0
                } else if e == s {
                    1
                } else {
                    let d = u64::from(e - s);
                    choose(u64::from(t) + d - 1, d)
                };
                prop_assert_eq!(traces.len() as u64, expect);
            }
            _ => {}
        }
        let set = TraceSet::new(traces.clone());
        for trace in &traces {
            prop_assert!(set.contains(trace));
        }
    }

    #[test]
    fn decompositions_stay_valid_after_balancing(
        seed in any::<u64>(),
        n in 1usize..=20,
        slack in 0usize..=3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_connected_graph(&mut rng, n, 3 + slack);
        let d = heuristic_decomposition(&g);
        let w = validate_decomposition(&g, &d).unwrap();
        prop_assert_eq!(w, d.width());
        let b = binarize_balance(&d).unwrap();
        validate_decomposition(&g, &b).unwrap();
        prop_assert!(b.is_binary().unwrap());
        prop_assert!(b.width() <= 3 * d.width() + 2);
    }
}
