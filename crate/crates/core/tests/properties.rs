use fpa_bench::auction::{BidProbabilityVector, ThresholdVector};
use fpa_bench::bench::config::override_key;
use fpa_bench::bench::grammar::{parse_dist, parse_learner, parse_number};
use fpa_bench::bench::parse_config;
use fpa_bench::bench::verify::{random_distribution, random_grid};
use fpa_bench::learners::LearnerSpec;
use fpa_bench::projection::{ga_step_probabilities, ga_step_thresholds, project_oracle, ChainPolytope};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn polytope(seed: u64, thresholds: bool) -> ChainPolytope {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = random_grid(&mut rng, 8);
    if thresholds {
        ChainPolytope::thresholds(&grid)
    } else {
        ChainPolytope::probabilities(&grid, &random_distribution(&mut rng))
    }
}

fn point(dim: usize, raw: &[f64]) -> Vec<f64> {
    raw.iter().cycle().take(dim).copied().collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

proptest! {
    #[test]
    fn projection_is_feasible_and_idempotent(seed in any::<u64>(), thresholds in any::<bool>(), raw in prop::collection::vec(-2.0..3.0f64, 8)) {
        let poly = polytope(seed, thresholds);
        let x = project_oracle(&poly, &point(poly.dim(), &raw)).unwrap();
        prop_assert!(poly.contains(&x, 1e-12));
        let again = project_oracle(&poly, &x).unwrap();
        prop_assert!(dist(&x, &again) < 1e-12);
    }

    #[test]
    fn projection_is_non_expansive(
        seed in any::<u64>(),
        thresholds in any::<bool>(),
        a in prop::collection::vec(-2.0..3.0f64, 8),
        b in prop::collection::vec(-2.0..3.0f64, 8),
    ) {
        let poly = polytope(seed, thresholds);
        let (qa, qb) = (point(poly.dim(), &a), point(poly.dim(), &b));
        let (xa, xb) = (project_oracle(&poly, &qa).unwrap(), project_oracle(&poly, &qb).unwrap());
        prop_assert!(dist(&xa, &xb) <= dist(&qa, &qb) + 1e-12);
    }

    #[test]
    fn probability_steps_stay_feasible(seed in any::<u64>(), h_raw in any::<usize>(), eta in 1e-6..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = random_grid(&mut rng, 8);
        let dist = random_distribution(&mut rng);
        let mut p = BidProbabilityVector::sample(&grid, &dist, &mut rng);
        let poly = ChainPolytope::probabilities(&grid, &dist);
        for step in 0..5 {
            let h = (h_raw + step) % (grid.k() + 1);
            p = ga_step_probabilities(&grid, &dist, &p, h, eta).unwrap().0;
            prop_assert!(poly.contains(p.as_slice(), 1e-12));
        }
    }

    #[test]
    fn threshold_steps_stay_feasible(seed in any::<u64>(), h_raw in any::<usize>(), eta in 1e-6..2.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = random_grid(&mut rng, 8);
        let mut v = ThresholdVector::sample(&grid, &mut rng);
        let poly = ChainPolytope::thresholds(&grid);
        for step in 0..5 {
            let h = (h_raw + step) % (grid.k() + 1);
            v = ga_step_thresholds(&grid, &v, h, eta).unwrap().0;
            prop_assert!(poly.contains(v.as_slice(), 1e-12));
        }
    }

    #[test]
    fn fractions_parse_exactly(num in 0u32..1000, den in 1u32..1000) {
        let parsed = parse_number(&format!("{num}/{den}")).unwrap();
        prop_assert_eq!(parsed, num as f64 / den as f64);
    }

    #[test]
    fn learner_specs_round_trip(eta in 1e-4..1.0f64, buckets in 1usize..200, which in 0usize..4) {
        let spec = match which {
            0 => LearnerSpec::Alg1 { eta: Some(eta) },
            1 => LearnerSpec::Alg2 { eta: Some(eta) },
            2 => LearnerSpec::Ftl { buckets },
            _ => LearnerSpec::Alg1Harmonic { fbar: 1.0 + eta, dmin: eta },
        };
        prop_assert_eq!(parse_learner(&spec.to_string()).unwrap(), spec);
    }

    #[test]
    fn distributions_round_trip(delta in 0.01..0.87f64, a in 0.0..0.5f64, width in 0.01..0.5f64) {
        for d in [format!("equirev({delta})"), format!("uniform({a}, {})", a + width)] {
            let parsed = parse_dist(&d).unwrap();
            prop_assert_eq!(parse_dist(&parsed.to_string()).unwrap(), parsed);
        }
    }

    #[test]
    fn horizon_override_is_applied(horizon in 2u64..1_000_000, seed in any::<u32>()) {
        let base = "grid = { K = 2, eps = 0.25 }\ndist = \"uniform\"\nlearner = \"alg2\"\nadversary = \"stochastic(0.5,0.25,0.25)\"\nT = 10\n";
        let text = override_key(base, "T", &horizon.to_string()).unwrap();
        let text = override_key(&text, "seed", &seed.to_string()).unwrap();
        let config = parse_config(&text).unwrap();
        prop_assert_eq!(config.horizon, horizon);
        prop_assert_eq!(config.seed, seed as u64);
    }
}
