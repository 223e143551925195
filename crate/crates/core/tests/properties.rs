mod common;

use gmms_core::fairness::confirm_violation;
use gmms_core::{
    build_envy_graph, check, efl_allocate, efl_allocate_traced, gmms_factor, is_ef1, is_efl, is_efx, is_envy_free,
    is_gmms, lex_dominates, lexmax_allocation, resolve_envy_cycles, Allocation, Distribution, GenSpec, Instance,
    Notion, TieBreakPolicy, Value,
};
use proptest::prelude::*;

fn half() -> Value {
    Value::from_ratio(1, 2)
}

fn rows(n: usize, m: usize, hi: u64) -> impl Strategy<Value = Vec<Vec<u64>>> {
    prop::collection::vec(prop::collection::vec(0..=hi, m), n)
}

fn sorted_values(inst: &Instance, a: &Allocation) -> Vec<Value> {
    let mut v: Vec<Value> = (0..inst.num_agents())
        .map(|i| common::v(inst, i, a.bundle(i).goods()))
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn efl_output_is_efl_and_half_gmms(n in 1usize..=5, m in 0usize..=9, seed in any::<u64>(), gauss in any::<bool>()) {
        let dist = if gauss { Distribution::Gaussian } else { Distribution::Uniform01 };
        let inst = gmms_core::generate(&GenSpec::new(n, m, dist, seed)).unwrap();
        let (a, trace) = efl_allocate_traced(&inst, &TieBreakPolicy::lowest_index()).unwrap();
        prop_assert!(a.is_complete(m));
        prop_assert_eq!(trace.len(), m);
        prop_assert!(common::efl(&inst, &a));
        prop_assert!(gmms_factor(&inst, &a).unwrap().at_least(&half()));
        prop_assert!(build_envy_graph(&inst, &a).unwrap().is_acyclic());
        for step in &trace {
            prop_assert!(step.rotations.len() <= n * n);
        }
    }

    #[test]
    fn binary_efl_is_gmms(r in (1usize..=4, 0usize..=8).prop_flat_map(|(n, m)| rows(n, m, 1))) {
        let inst = Instance::from_integers(&r).unwrap();
        let a = efl_allocate(&inst, &TieBreakPolicy::lowest_index()).unwrap();
        prop_assert!(is_gmms(&inst, &a).unwrap().holds);
        prop_assert!(common::gmms(&inst, &a));
    }

    #[test]
    fn lexmax_is_gmms_and_undominated(n in 1usize..=3, row in prop::collection::vec(0u64..8, 0..=6)) {
        let m = row.len();
        let inst = Instance::from_integers(&vec![row; n]).unwrap();
        let a = lexmax_allocation(&inst).unwrap();
        prop_assert!(is_gmms(&inst, &a).unwrap().holds);
        let best = sorted_values(&inst, &a);
        for other in common::all_allocations(n, m) {
            let vals = sorted_values(&inst, &other);
            // nothing is strictly better in leximin order
            prop_assert!(lex_dominates(&best, &vals).unwrap());
        }
    }

    #[test]
    fn implication_chain(r in (1usize..=3, 0usize..=6).prop_flat_map(|(n, m)| rows(n, m, 6)), owner_seed in any::<u64>()) {
        let inst = Instance::from_integers(&r).unwrap();
        let a = common::random_allocation(&mut common::rng(owner_seed), inst.num_agents(), inst.num_goods());
        let ef = is_envy_free(&inst, &a).unwrap().holds;
        let gmms = is_gmms(&inst, &a).unwrap().holds;
        let efx = is_efx(&inst, &a).unwrap().holds;
        let efl = is_efl(&inst, &a).unwrap().holds;
        let ef1 = is_ef1(&inst, &a).unwrap().holds;
        prop_assert!(!ef || gmms);
        prop_assert!(!gmms || efx);
        prop_assert!(!efx || efl);
        prop_assert!(!efl || ef1);
    }

    #[test]
    fn violations_are_confirmed(r in (1usize..=4, 0usize..=7).prop_flat_map(|(n, m)| rows(n, m, 9)), owner_seed in any::<u64>()) {
        let inst = Instance::from_integers(&r).unwrap();
        let n = inst.num_agents();
        let a = common::random_allocation(&mut common::rng(owner_seed), n, inst.num_goods());
        let mut notions = vec![Notion::Ef, Notion::Ef1, Notion::Efx, Notion::Efl, Notion::Mms, Notion::Gmms];
        if n >= 2 {
            notions.push(Notion::Pmms);
        }
        notions.extend((1..=n).map(Notion::Kwise));
        for notion in notions {
            let report = check(&inst, &a, notion).unwrap();
            prop_assert_eq!(report.holds, report.witness.is_none());
            if !report.holds {
                prop_assert!(confirm_violation(&inst, &a, &report).unwrap(), "{} witness not confirmed", notion);
            }
        }
    }

    #[test]
    fn cycle_resolution_keeps_values(seed in any::<u64>(), m in 3usize..=9) {
        // plant a 3-cycle 0 → 1 → 2 → 0 among four agents
        let mut rng = common::rng(seed);
        let mut inst = common::random_instance(&mut rng, 4, m, 9);
        let a = common::random_allocation(&mut rng, 4, m);
        let mut r: Vec<Vec<u64>> = (0..4)
            .map(|i| (0..m).map(|g| inst.value(i, g).numer().try_into().unwrap()).collect())
            .collect();
        for (i, j) in [(0usize, 1usize), (1, 2), (2, 0)] {
            for g in a.bundle(j).iter() {
                r[i][g] += 20;
            }
        }
        inst = Instance::from_integers(&r).unwrap();
        let out = resolve_envy_cycles(&inst, &a).unwrap();
        prop_assert!(build_envy_graph(&inst, &out).unwrap().is_acyclic());
        for i in 0..4 {
            prop_assert!(common::v(&inst, i, out.bundle(i).goods()) >= common::v(&inst, i, a.bundle(i).goods()));
        }
        let mut before: Vec<_> = a.bundles().to_vec();
        let mut after: Vec<_> = out.bundles().to_vec();
        before.sort();
        after.sort();
        prop_assert_eq!(before, after);
    }

    #[test]
    fn sop_rows_agree_on_ranking(n in 1usize..=5, m in 0usize..=11, seed in any::<u64>()) {
        let inst = gmms_core::generate(&GenSpec::new(n, m, Distribution::Gaussian, seed).with_sop(true)).unwrap();
        // one shared order: every row is non-increasing in the good index
        for i in 0..n {
            for g in 1..m {
                prop_assert!(inst.value(i, g - 1) >= inst.value(i, g));
            }
            prop_assert!(inst.valuations()[i].iter().all(|v| *v >= Value::zero()));
        }
    }
}

#[test]
fn efl_is_deterministic() {
    let inst = gmms_core::generate(&GenSpec::new(4, 10, Distribution::Uniform01, 77)).unwrap();
    let p = TieBreakPolicy::lowest_index();
    assert_eq!(efl_allocate(&inst, &p).unwrap(), efl_allocate(&inst, &p).unwrap());
}
