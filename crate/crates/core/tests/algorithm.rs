use sagin_core::algorithm::best_effort;
use sagin_core::oracle::joint_reference;
use sagin_core::{
    check_feasibility, energy_breakdown, initialize, run_algorithm1, run_scheme, ScenarioConfig,
    SchemeId, SolverOptions,
};

fn table_one() -> ScenarioConfig {
    ScenarioConfig::reference_with_seed(4, 7).unwrap()
}

#[test]
fn converges_monotonically_for_each_sat_cpu() {
    let opts = SolverOptions::default();
    for f_s in [0.5e9, 1e9, 2e9] {
        let mut cfg = table_one();
        cfg.sat_cpu = f_s;
        let out = run_scheme(&cfg, SchemeId::SaginPsc, &opts, 7).unwrap();
        let trace = &out.trace;
        assert!(
            trace.is_monotone(1e-9),
            "F_S = {f_s}: {:?}",
            trace.block_objectives()
        );
        assert!(
            trace.converged && out.iterations() <= 10,
            "F_S = {f_s}: {} iterations",
            out.iterations()
        );
        let obj = trace.objectives();
        let (a, b) = (obj[obj.len() - 2], obj[obj.len() - 1]);
        assert!((a - b).abs() / a < opts.outer_tolerance);
        assert!(check_feasibility(&cfg, &out.state).is_feasible());
    }
}

#[test]
fn decoupled_instance_settles_after_one_pass() {
    let mut cfg = table_one();
    cfg.latency_budget = 1e6;
    let out = run_scheme(&cfg, SchemeId::NonSemantic, &SolverOptions::default(), 7).unwrap();
    let obj = out.trace.objectives();
    assert!(out.trace.converged);
    // One pass that moves, one that confirms.
    assert_eq!(out.iterations(), 2);
    assert_eq!(obj[1], obj[2]);
}

#[test]
fn single_terminal_matches_joint_brute_force() {
    let opts = SolverOptions::default();
    let cases = [
        ([30.0, -20.0], 64.0, 0.7, 1e9),
        ([0.0, 0.0], 16.0, 0.7, 1e9),
        ([120.0, 40.0], 32.0, 0.4, 1e9),
        ([10.0, 10.0], 8.0, 1.0, 2e9),
    ];
    for (xy, kb, t, f_s) in cases {
        let mut cfg = ScenarioConfig::reference(vec![xy]);
        cfg.data_bits = vec![kb * 8192.0];
        cfg.latency_budget = t;
        cfg.sat_cpu = f_s;
        let ours = run_scheme(&cfg, SchemeId::SaginPsc, &opts, 7).unwrap();
        let oracle = joint_reference(&cfg, 11, 41, 30).unwrap();
        let gap = (ours.energy.total - oracle.energy) / oracle.energy;
        assert!(
            gap.abs() <= 0.05,
            "{xy:?}: ours {} oracle {}",
            ours.energy.total,
            oracle.energy
        );
    }
}

#[test]
fn identical_inputs_give_identical_traces() {
    let cfg = table_one();
    let opts = SolverOptions::default();
    for scheme in SchemeId::ALL {
        let a = best_effort(run_scheme(&cfg, scheme, &opts, 11)).unwrap();
        let b = best_effort(run_scheme(&cfg, scheme, &opts, 11)).unwrap();
        assert_eq!(a.state, b.state, "{scheme}");
        assert_eq!(
            a.trace.without_timing(),
            b.trace.without_timing(),
            "{scheme}"
        );
    }
}

#[test]
fn initial_state_is_reproducible_and_covers_everyone() {
    let cfg = table_one();
    let a = initialize(&cfg).unwrap();
    assert_eq!(a, initialize(&cfg).unwrap());
    let report = check_feasibility(&cfg, &a);
    assert!(report
        .violations
        .iter()
        .all(|v| v.constraint == sagin_core::physics::Constraint::Latency));
}

#[test]
fn non_semantic_spends_no_compute_energy() {
    let out = best_effort(run_scheme(
        &table_one(),
        SchemeId::NonSemantic,
        &SolverOptions::default(),
        7,
    ))
    .unwrap();
    assert_eq!(out.energy.sat_compute, 0.0);
    assert_eq!(out.energy.uav_compute, 0.0);
    assert!(out.state.allocation.ratio.iter().all(|&r| r == 1.0));
}

#[test]
fn random_assignment_follows_the_seed() {
    let cfg = table_one();
    let opts = SolverOptions::default();
    let a = best_effort(run_scheme(&cfg, SchemeId::RandomComp, &opts, 0)).unwrap();
    let b = best_effort(run_scheme(&cfg, SchemeId::RandomComp, &opts, 0)).unwrap();
    assert_eq!(a.state, b.state);
    assert_eq!(a.energy, b.energy);
    // The assignment is drawn once and never revisited.
    let c = best_effort(run_scheme(&cfg, SchemeId::RandomComp, &opts, 1)).unwrap();
    assert_ne!(
        (&a.state.allocation.task_sat, &a.state.allocation.task_uav),
        (&c.state.allocation.task_sat, &c.state.allocation.task_uav)
    );
}

#[test]
fn full_scheme_never_loses_to_non_semantic() {
    let opts = SolverOptions::default();
    for seed in 0..6 {
        let mut cfg = ScenarioConfig::reference_with_seed(4, seed).unwrap();
        cfg.data_bits = vec![(16 + 16 * seed) as f64 * 8192.0; 4];
        let full = best_effort(run_scheme(&cfg, SchemeId::SaginPsc, &opts, seed)).unwrap();
        let plain = best_effort(run_scheme(&cfg, SchemeId::NonSemantic, &opts, seed)).unwrap();
        if plain.feasible {
            assert!(full.feasible);
            assert!(full.energy.total <= plain.energy.total, "seed {seed}");
        }
    }
}

#[test]
fn fixed_location_keeps_the_start_position() {
    let cfg = table_one();
    let out = run_scheme(&cfg, SchemeId::FixedLocation, &SolverOptions::default(), 7).unwrap();
    assert_eq!(
        out.state.placement.uav_xy,
        initialize(&cfg).unwrap().placement.uav_xy
    );
}

#[test]
fn reported_energy_matches_state() {
    let cfg = table_one();
    let init = initialize(&cfg).unwrap();
    let out = best_effort(run_algorithm1(&cfg, &SolverOptions::default(), init)).unwrap();
    assert_eq!(out.energy, energy_breakdown(&cfg, &out.state).unwrap());
}
