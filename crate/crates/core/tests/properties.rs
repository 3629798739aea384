//! Property tests for the core invariants.

use proptest::prelude::*;

use mopls::bench::aggregate::{aggregate, median};
use mopls::bench::{records_from_traces, Budget, PartialConfig, TrialStatus};
use mopls::domain::{dominates, non_dominated_sort, non_dominated_subset};
use mopls::domain::{DecisionVector, EvaluationArchive, MemoryAttributes, ObjectiveVector};
use mopls::engine::{generate_candidates, mutate, update_memory_archive, EngineParams, Mopls};
use mopls::hypervolume::{hv_contributions, hv_exact, hv_improvement_exact, ReferenceVector};
use mopls::parallel::Executor;
use mopls::problems;
use mopls::sampling::{latin_hypercube, RngStream};

fn objective_sets(k: usize, max: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(
        prop::collection::vec(prop_oneof![(0u8..6).prop_map(f64::from), 0.0..5.0f64], k),
        1..max,
    )
}

fn front_of(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    non_dominated_subset(points)
        .unwrap()
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn dominance_is_a_strict_order(a in prop::collection::vec(0u8..4, 3), b in prop::collection::vec(0u8..4, 3), c in prop::collection::vec(0u8..4, 3)) {
        let (a, b, c): (Vec<f64>, Vec<f64>, Vec<f64>) = (
            a.into_iter().map(f64::from).collect(),
            b.into_iter().map(f64::from).collect(),
            c.into_iter().map(f64::from).collect(),
        );
        prop_assert!(!dominates(&a, &a).unwrap());
        prop_assert!(!(dominates(&a, &b).unwrap() && dominates(&b, &a).unwrap()));
        if dominates(&a, &b).unwrap() && dominates(&b, &c).unwrap() {
            prop_assert!(dominates(&a, &c).unwrap());
        }
    }

    #[test]
    fn sort_partitions_into_layered_fronts(points in (2usize..=3).prop_flat_map(|k| objective_sets(k, 60))) {
        let fronts = non_dominated_sort(&points, None).unwrap();
        let mut seen: Vec<usize> = fronts.iter().flatten().copied().collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..points.len()).collect::<Vec<_>>());
        for (layer, front) in fronts.iter().enumerate() {
            for &i in front {
                for &j in front {
                    prop_assert!(!dominates(&points[i], &points[j]).unwrap());
                }
                if layer > 0 {
                    prop_assert!(fronts[layer - 1].iter().any(|&p| dominates(&points[p], &points[i]).unwrap()));
                }
            }
        }
    }

    #[test]
    fn sort_limit_is_a_prefix(points in objective_sets(2, 60), limit in 1usize..60) {
        let full = non_dominated_sort(&points, None).unwrap();
        let partial = non_dominated_sort(&points, Some(limit)).unwrap();
        prop_assert!(partial.len() <= full.len());
        prop_assert_eq!(&full[..partial.len()], &partial[..]);
        let covered: usize = partial.iter().map(Vec::len).sum();
        prop_assert!(covered >= limit.min(points.len()));
    }

    #[test]
    fn hypervolume_is_monotone(points in (2usize..=3).prop_flat_map(|k| objective_sets(k, 25)), extra in prop::collection::vec(0.0..6.0f64, 3)) {
        let k = points[0].len();
        let r = ReferenceVector::new(vec![6.0; k]);
        let base = hv_exact(&points, &r).unwrap();
        let mut more = points.clone();
        let y: Vec<f64> = extra[..k].to_vec();
        more.push(y.clone());
        let grown = hv_exact(&more, &r).unwrap();
        prop_assert!(grown >= base - 1e-9);
        let gain = hv_improvement_exact(&points, &y, &r).unwrap();
        prop_assert!((grown - base - gain).abs() <= 1e-9 * (1.0 + grown));
        // Dominated points never change the volume.
        prop_assert!((hv_exact(&front_of(&points), &r).unwrap() - base).abs() <= 1e-9 * (1.0 + base));
    }

    #[test]
    fn hypervolume_is_translation_invariant(points in (2usize..=3).prop_flat_map(|k| objective_sets(k, 25)), shift in -3.0..3.0f64) {
        let k = points[0].len();
        let r = ReferenceVector::new(vec![6.0; k]);
        let moved: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|v| v + shift).collect()).collect();
        let rm = ReferenceVector::new(vec![6.0 + shift; k]);
        let a = hv_exact(&points, &r).unwrap();
        let b = hv_exact(&moved, &rm).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
    }

    #[test]
    fn contributions_bounded_by_volume(points in (2usize..=3).prop_flat_map(|k| objective_sets(k, 25))) {
        let k = points[0].len();
        let r = ReferenceVector::new(vec![6.0; k]);
        let front = front_of(&points);
        let hv = hv_exact(&front, &r).unwrap();
        let hc = hv_contributions(&front, &r).unwrap();
        prop_assert!(hc.iter().all(|&c| c >= 0.0));
        prop_assert!(hc.iter().sum::<f64>() <= hv + 1e-9);
    }

    #[test]
    fn archive_pareto_set_tracks_brute_force(points in objective_sets(2, 40)) {
        let mut archive = EvaluationArchive::new(1, 2);
        for (i, y) in points.iter().enumerate() {
            let x = DecisionVector::new(vec![i as f64 / points.len() as f64]).unwrap();
            archive.push(x, ObjectiveVector::new(y.clone()).unwrap(), 0.2).unwrap();
            prop_assert!(archive.check_invariants().is_ok());
        }
    }

    #[test]
    fn latin_hypercube_is_stratified(n in 1usize..40, d in 1usize..8, seed in any::<u64>()) {
        let design = latin_hypercube(n, d, &mut RngStream::master(seed));
        prop_assert_eq!(design.len(), n);
        for j in 0..d {
            let mut strata: Vec<usize> = design.iter().map(|x| ((x[j] * n as f64) as usize).min(n - 1)).collect();
            strata.sort_unstable();
            prop_assert_eq!(strata, (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn perturbations_stay_in_the_cube(center in prop::collection::vec(0.0..=1.0f64, 1..6), radius in 1e-4..0.5f64, seed in any::<u64>()) {
        let mut rng = RngStream::master(seed);
        for c in generate_candidates(&center, radius, 20, &mut rng) {
            prop_assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        let m = mutate(&center, 0.1, &mut rng);
        prop_assert!(m.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn memory_update_keeps_bookkeeping(outcomes in prop::collection::vec(prop::bool::ANY, 1..30)) {
        let mut archive = EvaluationArchive::new(1, 2);
        archive.push_with_memory(
            DecisionVector::new(vec![0.5]).unwrap(),
            ObjectiveVector::new(vec![1.0, 1.0]).unwrap(),
            MemoryAttributes::fresh(0.2),
        ).unwrap();
        let params = EngineParams::new(1, 1000, 1).unwrap();
        let r = ReferenceVector::new(vec![10.0, 10.0]);
        for (step, improve) in outcomes.into_iter().enumerate() {
            let before = archive.pareto_objectives();
            let best = before.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
            let y = if improve { vec![best / 2.0, 9.0] } else { vec![9.0, 9.0] };
            let center = (0..archive.len()).find(|&i| !archive.is_tabu(i)).unwrap();
            update_memory_archive(
                &mut archive,
                &[center],
                vec![(DecisionVector::new(vec![step as f64 / 40.0]).unwrap(), ObjectiveVector::new(y).unwrap())],
                &before,
                &r,
                &params,
            ).unwrap();
            prop_assert!(archive.check_invariants().is_ok());
            for p in archive.points() {
                prop_assert!(p.memory.failure_count <= params.c_thresh + 1);
                prop_assert!(p.memory.tabu_count <= params.c_tenure);
                prop_assert!(p.memory.radius <= params.r_init);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn flags_override_file(file_pop in prop::option::of(1usize..9), flag_pop in prop::option::of(1usize..9), file_budget in prop::option::of(20usize..500), flag_iters in prop::option::of(1usize..50)) {
        let file = PartialConfig::from_toml(&format!(
            "problem = \"zdt1\"\ndim = 4\n{}{}",
            file_pop.map(|p| format!("pop = {p}\n")).unwrap_or_default(),
            file_budget.map(|b| format!("budget = {b}\n")).unwrap_or_default(),
        )).unwrap();
        let flags = PartialConfig { pop: flag_pop, wall_budget: flag_iters, ..Default::default() };
        let config = file.overlay(flags).resolve().unwrap();
        prop_assert_eq!(config.population, flag_pop.or(file_pop).unwrap_or(1));
        let expected = match (flag_iters, file_budget) {
            (Some(w), _) => Budget::Iterations(w),
            (None, Some(b)) => Budget::Evaluations(b),
            (None, None) => Budget::Evaluations(400),
        };
        prop_assert_eq!(config.budget, expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn runs_are_reproducible_and_consistent(seed in 0u64..1000, pop in 1usize..4) {
        let problem = problems::by_name("lzf1-d4").unwrap();
        let mut params = EngineParams::new(4, 30, pop).unwrap();
        params.n_cand_factor = 30;
        let run = |workers| {
            let mut ex = Executor::new(problem.clone(), workers).unwrap();
            Mopls::new(params.clone()).run(&mut ex, seed).unwrap()
        };
        let a = run(1);
        prop_assert_eq!(&a, &run(3));
        prop_assert!(a.archive.check_invariants().is_ok());
        for pair in a.rows.windows(2) {
            prop_assert_eq!(pair[1].evaluations, pair[0].evaluations + pop);
            prop_assert_eq!(pair[1].center_ids.len(), pop);
            prop_assert!(pair[1].center_ids.iter().all(|&c| c < pair[0].evaluations));
        }
        let recs = records_from_traces(problem.as_ref(), "lzf1-d4", &[(a, TrialStatus::Completed)]).unwrap();
        let rec = &recs[0];
        for (row, again) in rec.rows.iter().zip(rec.recompute_hc().unwrap()) {
            prop_assert!((row.hc.unwrap() - again.unwrap()).abs() <= 1e-9);
        }
        for pair in rec.rows.windows(2) {
            prop_assert!(pair[1].hv >= pair[0].hv);
        }
        let agg = aggregate(&recs);
        let finals = [rec.final_hc().unwrap()];
        prop_assert_eq!(agg.last().unwrap().hc_median, median(&finals));
    }
}
