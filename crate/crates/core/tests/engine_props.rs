use ris_ra::access::PolicyKind;
use ris_ra::config::ScenarioConfig;
use ris_ra::engine::{optimal_over_s, run_monte_carlo, run_monte_carlo_with_workers, simulate_frame};
use ris_ra::receiver::{build_occupancy, singleton_successes};

fn cfg(policy: PolicyKind, devices: usize, trials: u64) -> ScenarioConfig {
    ScenarioConfig {
        policy,
        devices,
        trials,
        seed: 4242,
        ..ScenarioConfig::default()
    }
}

#[test]
fn single_replica_policy_gains_nothing_from_sic() {
    let c = cfg(PolicyKind::Sscp { s: 1 }, 15, 1);
    for trial in 0..500 {
        let t = simulate_frame(&c, trial).unwrap();
        let occ = build_occupancy(&t.decision);
        assert_eq!(t.successes(), singleton_successes(&occ, &t.snr, c.snr_threshold).unwrap());
    }
}

#[test]
fn one_trial_has_zero_width_intervals() {
    let r = run_monte_carlo(&cfg(PolicyKind::Carp, 5, 1)).unwrap();
    assert_eq!(r.trials, 1);
    assert_eq!(r.ci95_throughput, 0.0);
    assert_eq!(r.ci95_power, 0.0);
    assert_eq!(r.ci95_ee, 0.0);
    assert_eq!(r.ee_ratio_of_means, r.ee_mean_of_ratios);
}

#[test]
fn worker_count_does_not_change_results() {
    for policy in [PolicyKind::Carp, PolicyKind::Irsap] {
        let c = cfg(policy, 8, 400);
        let one = run_monte_carlo_with_workers(&c, 1).unwrap();
        let three = run_monte_carlo_with_workers(&c, 3).unwrap();
        assert_eq!(one, three);
    }
}

#[test]
fn seed_changes_results() {
    let a = run_monte_carlo(&cfg(PolicyKind::Crdsap, 10, 200)).unwrap();
    let b = run_monte_carlo(&ScenarioConfig {
        seed: 4243,
        ..cfg(PolicyKind::Crdsap, 10, 200)
    })
    .unwrap();
    assert_ne!(a.mean_throughput, b.mean_throughput);
}

#[test]
fn lone_aligned_device_prefers_fewest_slots() {
    // A = 1 for every S, so G = 1/((1+r)S T) falls with S and the optimum
    // is the smallest S the policy allows.
    for policy in [PolicyKind::Carp, PolicyKind::Crdsap] {
        let mut c = cfg(policy, 1, 50);
        c.mtd_distance_m = (25.0, 25.0);
        c.mtd_angle_rad = (0.0, 0.0);
        let s_values: Vec<usize> = (policy.min_slots()..=12).collect();
        let opt = optimal_over_s(&c, &s_values).unwrap();
        assert_eq!(opt.best_throughput, policy.min_slots());
        assert_eq!(opt.best_energy_efficiency, policy.min_slots());
        for &s in &s_values {
            let r = opt.at(s).unwrap();
            let r_eff = if policy.requires_training() { c.training_ratio } else { 0.0 };
            let expected = 1.0 / ((1.0 + r_eff) * s as f64 * c.access_slot_s);
            assert_eq!(r.mean_successes, 1.0);
            assert!((r.mean_throughput - expected).abs() <= 1e-12 * expected);
        }
    }
}

#[test]
fn charging_training_lowers_crdsap_efficiency() {
    let free = cfg(PolicyKind::Crdsap, 10, 200);
    let charged = ScenarioConfig {
        always_charge_training: true,
        ..free.clone()
    };
    let a = run_monte_carlo(&free).unwrap();
    let b = run_monte_carlo(&charged).unwrap();
    assert_eq!(a.mean_throughput, b.mean_throughput);
    assert!(b.mean_power > a.mean_power);
}
