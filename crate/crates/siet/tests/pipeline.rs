//! Cross-module flows: a full scenario evaluated through both bound
//! families, with the structural invariants the reports promise.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use siet::achievability::{
    achievable_energy_rate_cap, achievable_rate_exact, dep_circular_cc, min_equal_radius,
    rate_cap,
};
use siet::code::{sample_codebook, CodeSpec, CodebookMode, LayerProbabilities, MessageCount};
use siet::constellation::{Constellation, Layer};
use siet::energy::{
    constant_composition_energy, energy_profile, eop, profile_from_energies, HarvesterModel,
};
use siet::impossibility::{
    dep_lower_bound, energy_rate_cap, eop_lower_bound, rate_upper_exact, rate_upper_stirling,
};
use siet::sim::{estimate_dep, ChannelParams, Decoder};

fn scenario() -> (Constellation, LayerProbabilities, u64, f64) {
    let constellation = Constellation::new(
        vec![
            Layer { amplitude: 6.0, count: 4, phase_shift: 0.0, decode_radius: 1.2 },
            Layer { amplitude: 3.0, count: 4, phase_shift: 0.7, decode_radius: 1.2 },
        ],
        6.0,
    );
    let probs = LayerProbabilities::new(vec![0.5, 0.5]).unwrap();
    (constellation, probs, 8, 1.0)
}

#[test]
fn bounds_pipeline_respects_report_invariants() {
    let (constellation, probs, n, sigma2) = scenario();
    assert!(constellation.validate().is_empty());
    let counts = constellation.layer_counts();
    let code_type = probs.per_symbol_type(&counts);
    let model = HarvesterModel::default();

    // Impossibility side.
    let dep = dep_lower_bound(&constellation, &code_type, n, 64, sigma2).unwrap();
    assert!((0.0..=1.0).contains(&dep.clamped));
    let rate = rate_upper_exact(n, &code_type).unwrap();
    assert!(rate.bits <= rate.cap_bits + 1e-9);
    let stirling = rate_upper_stirling(n, &code_type).unwrap();
    assert!(stirling >= rate.bits);

    // Achievability side never beats the universal cap either.
    let class_rate = achievable_rate_exact(n, &probs, &counts).unwrap();
    assert!(class_rate.bits_per_use <= rate_cap(&constellation).unwrap() + 1e-9);
    assert!((class_rate.bits_per_use - rate.bits).abs() < 1e-12);

    // Energy side: a sampled codebook of the scenario is constant
    // composition, so its profile has a single level matching the closed
    // form, and both cap rules agree on it.
    let spec = CodeSpec::new(
        n,
        constellation.clone(),
        probs.clone(),
        MessageCount::Exact(64),
        CodebookMode::Sample { seed: 12 },
    )
    .unwrap();
    let codebook = sample_codebook(&spec).unwrap();
    let profile = energy_profile(&codebook, &model);
    assert_eq!(profile.levels.len(), 1);
    let closed_energy = constant_composition_energy(&probs, &constellation, &model, n);
    assert!((profile.levels[0] - closed_energy).abs() <= 1e-9 * closed_energy);
    for k in 0..=4u32 {
        let delta = f64::from(k) / 4.0;
        let cap = energy_rate_cap(&profile, delta);
        assert_eq!(cap, achievable_energy_rate_cap(&profile, delta));
        assert!(eop_lower_bound(&profile, cap) <= delta + 1e-12);
    }
}

#[test]
fn equal_radius_collapse_agrees_with_monte_carlo() {
    let (constellation, probs, n, sigma2) = scenario();
    let radius = constellation.layers[0].decode_radius;
    let closed = dep_circular_cc(&probs, &[radius, radius], n, sigma2);
    // Inverse map reproduces the common radius.
    let r_back = min_equal_radius(closed, n, sigma2).unwrap();
    assert!((r_back - radius).abs() < 1e-9);

    let spec = CodeSpec::new(
        n,
        constellation.clone(),
        probs,
        MessageCount::Exact(32),
        CodebookMode::Sample { seed: 3 },
    )
    .unwrap();
    let codebook = sample_codebook(&spec).unwrap();
    let params = ChannelParams { noise_variance: sigma2, seed: 42, trials: 30_000 };
    let estimate = estimate_dep(&codebook, &constellation, &params, Decoder::Circular);
    assert!(
        (estimate.point_estimate - closed).abs() <= 3.0 * estimate.standard_error,
        "estimate {} closed {closed} se {}",
        estimate.point_estimate,
        estimate.standard_error
    );
}

#[test]
fn cap_composition_holds_on_random_profiles() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for _ in 0..200 {
        let m = 2 + (rng.next_u64() % 7) as usize;
        let energies: Vec<f64> = (0..m)
            .map(|_| 0.1 + (rng.next_u64() % 1000) as f64 / 100.0)
            .collect();
        let profile = profile_from_energies(energies);
        let messages = profile.message_count();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=messages {
            let delta = k as f64 / messages as f64;
            let cap = energy_rate_cap(&profile, delta);
            assert!(cap >= prev);
            assert!(eop(&profile, cap) <= delta + 1e-12);
            prev = cap;
        }
    }
}
