mod common;

use rand::rngs::StdRng;
use rand::SeedableRng;
use tagflow::junction::{brute_force_solve, solve};
use tagflow::{CoefficientMode, SimConfig, Simulator};

#[test]
fn random_networks_conserve_mass() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..20 {
        let net = common::random_network(&mut rng);
        let cfg = SimConfig {
            t_end: 8.0,
            coefficient_mode: CoefficientMode::Static,
            ..SimConfig::default()
        };
        let traj = Simulator::new(&net, CoefficientMode::Static).unwrap().run(&cfg).unwrap();
        assert!(traj.max_mass_residual <= 1e-10, "{}", traj.max_mass_residual);
        assert!(traj.max_junction_imbalance <= 1e-14, "{}", traj.max_junction_imbalance);
        for s in &traj.samples {
            for d in &s.density {
                assert!(d.iter().all(|r| (0.0..=1.0).contains(r)));
            }
        }
    }
}

#[test]
fn random_junctions_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..100 {
        let p = common::random_problem(&mut rng);
        let a = solve(&p).unwrap();
        let b = brute_force_solve(&p, 1e-3).unwrap();
        for (x, y) in a.gamma_in.iter().zip(&b.gamma_in) {
            assert!((x - y).abs() <= 2e-3, "{p:?}: {a:?} vs {b:?}");
        }
    }
}
