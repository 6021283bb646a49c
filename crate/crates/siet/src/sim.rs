//! Seedable Monte Carlo simulation of the discrete memoryless complex-AWGN
//! channel, with minimum-distance and circular-region decoders.
//!
//! Reproducibility contract: every trial draws from its own counter-keyed
//! generator stream, so results are bit-identical for a given
//! `(seed, trials, codebook)` regardless of how trials are sharded across
//! threads. Gaussian samples come from one frozen transform (Box-Muller on
//! open-closed uniforms), not from a distribution library, so they are
//! stable across dependency upgrades.

use std::collections::HashMap;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::Codebook;
use crate::constellation::{Constellation, SymbolId};

/// Stream salt separating message draws from noise draws within a trial.
const MESSAGE_SALT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Channel and experiment parameters.
///
/// `noise_variance` is the total per-complex-sample variance; the real and
/// imaginary parts each carry half of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub noise_variance: f64,
    pub seed: u64,
    pub trials: u64,
}

/// Which decoder an estimate used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoder {
    MinDistance,
    Circular,
}

impl std::fmt::Display for Decoder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Decoder::MinDistance => write!(f, "min_distance"),
            Decoder::Circular => write!(f, "circular"),
        }
    }
}

/// Empirical decoding-error probability with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepEstimate {
    pub point_estimate: f64,
    pub standard_error: f64,
    pub trials: u64,
    pub decoder: Decoder,
}

impl DepEstimate {
    pub fn csv_header() -> &'static str {
        "decoder,trials,p_hat,se,seed"
    }

    pub fn csv_row(&self, seed: u64, fmt: &dyn Fn(f64) -> String) -> String {
        format!(
            "{},{},{},{},{}",
            self.decoder,
            self.trials,
            fmt(self.point_estimate),
            fmt(self.standard_error),
            seed
        )
    }
}

/// The generator stream dedicated to noise for one trial.
fn noise_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// The generator stream dedicated to the message draw for one trial.
fn message_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ MESSAGE_SALT);
    rng.set_stream(trial);
    rng
}

/// One standard-normal pair via Box-Muller on `u1 in (0,1]`, `u2 in [0,1)`.
fn standard_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    const STEP: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = 1.0 - (rng.next_u64() >> 11) as f64 * STEP;
    let u2 = (rng.next_u64() >> 11) as f64 * STEP;
    let radius = (-2.0 * u1.ln()).sqrt();
    let angle = std::f64::consts::TAU * u2;
    (radius * angle.cos(), radius * angle.sin())
}

/// Unbiased index in `0..n` (rejection on the modulo tail).
fn uniform_index(rng: &mut ChaCha8Rng, n: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX % n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return x % n;
        }
    }
}

/// Complex noise sequence of length `n` for one trial; component variance
/// is half the channel noise variance.
pub fn noise_sequence(params: &ChannelParams, trial: u64, n: usize) -> Vec<Complex64> {
    let mut rng = noise_rng(params.seed, trial);
    let component_sigma = (params.noise_variance / 2.0).sqrt();
    (0..n)
        .map(|_| {
            let (re, im) = standard_normal_pair(&mut rng);
            Complex64::new(component_sigma * re, component_sigma * im)
        })
        .collect()
}

/// Passes one codeword through the channel: `y_m = u_m + N_m`, fully
/// determined by `(seed, trial, m)`.
pub fn transmit(
    codeword: &[SymbolId],
    constellation: &Constellation,
    params: &ChannelParams,
    trial: u64,
) -> Vec<Complex64> {
    let noise = noise_sequence(params, trial, codeword.len());
    codeword
        .iter()
        .zip(noise)
        .map(|(&id, n)| constellation.symbol_value(id) + n)
        .collect()
}

/// Materialized codebook ready for repeated decoding.
pub struct PreparedCode {
    pub symbols: Vec<(SymbolId, Complex64)>,
    pub radii_sq: Vec<f64>,
    pub codeword_values: Vec<Vec<Complex64>>,
    index_of: HashMap<Vec<SymbolId>, usize>,
}

impl PreparedCode {
    pub fn new(codebook: &Codebook, constellation: &Constellation) -> Self {
        let symbols = constellation.symbols();
        let radii_sq = constellation
            .layers
            .iter()
            .map(|l| l.decode_radius * l.decode_radius)
            .collect();
        let codeword_values = codebook
            .codewords
            .iter()
            .map(|cw| cw.iter().map(|&id| constellation.symbol_value(id)).collect())
            .collect();
        let index_of = codebook
            .codewords
            .iter()
            .enumerate()
            .map(|(i, cw)| (cw.clone(), i))
            .collect();
        PreparedCode {
            symbols,
            radii_sq,
            codeword_values,
            index_of,
        }
    }
}

/// Nearest-codeword decoding in squared Euclidean distance; ties resolve to
/// the lowest message index.
pub fn decode_min_distance(received: &[Complex64], prepared: &PreparedCode) -> usize {
    let mut best = 0usize;
    let mut best_d = f64::INFINITY;
    for (i, cw) in prepared.codeword_values.iter().enumerate() {
        let d: f64 = received
            .iter()
            .zip(cw)
            .map(|(y, u)| (y - u).norm_sqr())
            .sum();
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

/// Circular-region decoding: message `i` iff every received sample lands in
/// the closed disk of its own symbol. Returns `None` when no codeword
/// qualifies, which counts as an error.
///
/// Each sample is mapped to the unique symbol whose disk contains it (the
/// disks are disjoint for a valid constellation); the symbol sequence is
/// then looked up in the codebook.
pub fn decode_circular(received: &[Complex64], prepared: &PreparedCode) -> Option<usize> {
    let mut ids = Vec::with_capacity(received.len());
    for y in received {
        let mut hit = None;
        for &(id, x) in &prepared.symbols {
            if (y - x).norm_sqr() <= prepared.radii_sq[id.layer] {
                hit = Some(id);
                break;
            }
        }
        ids.push(hit?);
    }
    prepared.index_of.get(&ids).copied()
}

/// Estimates the average DEP by uniform-message simulation.
///
/// Trials run in parallel; per-trial generator streams make the result
/// independent of the shard count. Needs at least 100 trials for the
/// binomial standard error to mean anything.
pub fn estimate_dep(
    codebook: &Codebook,
    constellation: &Constellation,
    params: &ChannelParams,
    decoder: Decoder,
) -> DepEstimate {
    assert!(params.trials >= 100, "estimate_dep needs at least 100 trials");
    let prepared = PreparedCode::new(codebook, constellation);
    let m = codebook.codewords.len() as u64;
    let errors: u64 = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let message = uniform_index(&mut message_rng(params.seed, trial), m) as usize;
            let received = transmit(&codebook.codewords[message], constellation, params, trial);
            let decoded = match decoder {
                Decoder::MinDistance => Some(decode_min_distance(&received, &prepared)),
                Decoder::Circular => decode_circular(&received, &prepared),
            };
            u64::from(decoded != Some(message))
        })
        .sum();
    let p_hat = errors as f64 / params.trials as f64;
    DepEstimate {
        point_estimate: p_hat,
        standard_error: (p_hat * (1.0 - p_hat) / params.trials as f64).sqrt(),
        trials: params.trials,
        decoder,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::achievability::{dep_circular_cc, dep_circular_general, disk_success_probability};
    use crate::code::{
        enumerate_codebook, sample_codebook, CodeSpec, CodebookMode, LayerProbabilities,
        MessageCount,
    };
    use crate::constellation::Layer;
    use approx::assert_relative_eq;

    fn two_ring() -> Constellation {
        Constellation::new(
            vec![
                Layer { amplitude: 6.0, count: 4, phase_shift: 0.0, decode_radius: 1.2 },
                Layer { amplitude: 3.0, count: 4, phase_shift: 0.5, decode_radius: 1.2 },
            ],
            6.0,
        )
    }

    fn toy_codebook(seed: u64, m: u64) -> (Codebook, Constellation) {
        let c = two_ring();
        let spec = CodeSpec::new(
            8,
            c.clone(),
            LayerProbabilities::new(vec![0.5, 0.5]).unwrap(),
            MessageCount::Exact(m),
            CodebookMode::Sample { seed },
        )
        .unwrap();
        (sample_codebook(&spec).unwrap(), c)
    }

    #[test]
    fn noise_is_deterministic_per_trial() {
        let params = ChannelParams { noise_variance: 1.0, seed: 9, trials: 1 };
        let a = noise_sequence(&params, 3, 16);
        let b = noise_sequence(&params, 3, 16);
        assert_eq!(a, b);
        let c = noise_sequence(&params, 4, 16);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_noise_returns_the_codeword() {
        let (cb, c) = toy_codebook(1, 8);
        let params = ChannelParams { noise_variance: 1e-30, seed: 0, trials: 1 };
        let y = transmit(&cb.codewords[0], &c, &params, 0);
        for (got, &id) in y.iter().zip(&cb.codewords[0]) {
            assert_relative_eq!(got.re, c.symbol_value(id).re, epsilon = 1e-10);
            assert_relative_eq!(got.im, c.symbol_value(id).im, epsilon = 1e-10);
        }
    }

    #[test]
    fn component_moments_match_the_channel_law() {
        let params = ChannelParams { noise_variance: 2.5, seed: 77, trials: 1 };
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0usize;
        for trial in 0..500 {
            for z in noise_sequence(&params, trial, 1000) {
                sum += z.re + z.im;
                sum_sq += z.re * z.re + z.im * z.im;
                count += 2;
            }
        }
        let mean = sum / count as f64;
        let var = sum_sq / count as f64 - mean * mean;
        assert!(mean.abs() < 0.01);
        assert_relative_eq!(var, params.noise_variance / 2.0, max_relative = 0.01);
    }

    #[test]
    fn min_distance_decodes_exact_codeword() {
        let (cb, c) = toy_codebook(2, 16);
        let prepared = PreparedCode::new(&cb, &c);
        for (i, cw) in cb.codewords.iter().enumerate() {
            let clean: Vec<Complex64> = cw.iter().map(|&id| c.symbol_value(id)).collect();
            assert_eq!(decode_min_distance(&clean, &prepared), i);
        }
    }

    #[test]
    fn min_distance_tie_breaks_to_lowest_index() {
        // Antipodal code {(+1,-1), (-1,+1)}; the origin pair sits on the
        // perpendicular bisector of the two codewords.
        let c = Constellation::new(
            vec![Layer { amplitude: 1.0, count: 2, phase_shift: 0.0, decode_radius: 0.9 }],
            1.0,
        );
        let spec = CodeSpec::new(
            2,
            c.clone(),
            LayerProbabilities::new(vec![1.0]).unwrap(),
            MessageCount::Max,
            CodebookMode::Enumerate,
        )
        .unwrap();
        let cb = enumerate_codebook(&spec).unwrap();
        assert_eq!(cb.codewords.len(), 2);
        let prepared = PreparedCode::new(&cb, &c);
        let midpoint = vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(decode_min_distance(&midpoint, &prepared), 0);
    }

    #[test]
    fn min_distance_matches_exhaustive_oracle() {
        let (cb, c) = toy_codebook(3, 4);
        let prepared = PreparedCode::new(&cb, &c);
        let params = ChannelParams { noise_variance: 4.0, seed: 5, trials: 1 };
        for trial in 0..200 {
            let msg = (trial % 4) as usize;
            let y = transmit(&cb.codewords[msg], &c, &params, trial);
            let got = decode_min_distance(&y, &prepared);
            // Oracle: brute force over all codewords with naive arithmetic.
            let mut best = (f64::INFINITY, 0usize);
            for (j, cw) in cb.codewords.iter().enumerate() {
                let mut d = 0.0;
                for (ym, &id) in y.iter().zip(cw) {
                    d += (ym - c.symbol_value(id)).norm_sqr();
                }
                if d < best.0 {
                    best = (d, j);
                }
            }
            assert_eq!(got, best.1);
        }
    }

    #[test]
    fn circular_decodes_clean_and_rejects_far_samples() {
        let (cb, c) = toy_codebook(4, 16);
        let prepared = PreparedCode::new(&cb, &c);
        for (i, cw) in cb.codewords.iter().enumerate() {
            let clean: Vec<Complex64> = cw.iter().map(|&id| c.symbol_value(id)).collect();
            assert_eq!(decode_circular(&clean, &prepared), Some(i));
        }
        // One sample far from every disk forces a no-decode.
        let mut y: Vec<Complex64> = cb.codewords[0]
            .iter()
            .map(|&id| c.symbol_value(id))
            .collect();
        y[3] = Complex64::new(100.0, 100.0);
        assert_eq!(decode_circular(&y, &prepared), None);
    }

    #[test]
    fn disk_membership_fraction_matches_closed_form() {
        let params = ChannelParams { noise_variance: 1.0, seed: 21, trials: 1 };
        let r = 1.0f64;
        let trials = 200_000u64;
        let mut inside = 0u64;
        for trial in 0..trials {
            let z = noise_sequence(&params, trial, 1)[0];
            if z.norm_sqr() <= r * r {
                inside += 1;
            }
        }
        let p_hat = inside as f64 / trials as f64;
        let closed = disk_success_probability(r, params.noise_variance);
        let se = (closed * (1.0 - closed) / trials as f64).sqrt();
        assert!(
            (p_hat - closed).abs() <= 3.0 * se,
            "p_hat={p_hat} closed={closed} se={se}"
        );
    }

    #[test]
    fn circular_estimate_matches_exact_dep() {
        let (cb, c) = toy_codebook(6, 32);
        let params = ChannelParams { noise_variance: 1.0, seed: 13, trials: 20_000 };
        let est = estimate_dep(&cb, &c, &params, Decoder::Circular);
        let closed = dep_circular_general(&cb, &c.radii(), params.noise_variance);
        let cc = dep_circular_cc(
            &cb.spec.layer_probs,
            &c.radii(),
            cb.block_length(),
            params.noise_variance,
        );
        assert_relative_eq!(closed, cc, epsilon = 1e-12);
        assert!(
            (est.point_estimate - closed).abs() <= 3.0 * est.standard_error,
            "estimate {} vs closed {closed} (se {})",
            est.point_estimate,
            est.standard_error
        );
    }

    #[test]
    fn estimate_is_reproducible_and_shard_invariant() {
        let (cb, c) = toy_codebook(8, 16);
        let params = ChannelParams { noise_variance: 0.8, seed: 4, trials: 4000 };
        let a = estimate_dep(&cb, &c, &params, Decoder::MinDistance);
        let b = estimate_dep(&cb, &c, &params, Decoder::MinDistance);
        assert_eq!(a, b);

        // Serial replay of the same per-trial streams must agree exactly.
        let prepared = PreparedCode::new(&cb, &c);
        let mut errors = 0u64;
        for trial in 0..params.trials {
            let m = uniform_index(&mut message_rng(params.seed, trial), 16) as usize;
            let y = transmit(&cb.codewords[m], &c, &params, trial);
            if decode_min_distance(&y, &prepared) != m {
                errors += 1;
            }
        }
        assert_eq!(a.point_estimate, errors as f64 / params.trials as f64);
        assert_relative_eq!(
            a.standard_error,
            (a.point_estimate * (1.0 - a.point_estimate) / params.trials as f64).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn vanishing_noise_gives_zero_errors() {
        let (cb, c) = toy_codebook(9, 16);
        let params = ChannelParams { noise_variance: 1e-12, seed: 2, trials: 500 };
        for decoder in [Decoder::MinDistance, Decoder::Circular] {
            let est = estimate_dep(&cb, &c, &params, decoder);
            assert_eq!(est.point_estimate, 0.0);
        }
    }

    #[test]
    fn rotation_equivariance_of_min_distance_decisions() {
        // Rotating constellation and noise by the same angle preserves all
        // pairwise distances up to rounding, so decisions agree.
        let (cb, c) = toy_codebook(10, 8);
        let params = ChannelParams { noise_variance: 2.0, seed: 31, trials: 1 };
        for omega in [0.3, std::f64::consts::FRAC_PI_2, 5.9] {
            let rot = Complex64::from_polar(1.0, omega);
            let c_rot = c.rotate(omega);
            let cb_rot = Codebook {
                spec: CodeSpec {
                    constellation: c_rot.clone(),
                    ..cb.spec.clone()
                },
                codewords: cb.codewords.clone(),
            };
            let prepared = PreparedCode::new(&cb, &c);
            let prepared_rot = PreparedCode::new(&cb_rot, &c_rot);
            for trial in 0..2000 {
                let msg = (trial % 8) as usize;
                let noise = noise_sequence(&params, trial, 8);
                let y: Vec<Complex64> = cb.codewords[msg]
                    .iter()
                    .zip(&noise)
                    .map(|(&id, n)| c.symbol_value(id) + n)
                    .collect();
                let y_rot: Vec<Complex64> = cb.codewords[msg]
                    .iter()
                    .zip(&noise)
                    .map(|(&id, n)| c_rot.symbol_value(id) + rot * n)
                    .collect();
                assert_eq!(
                    decode_min_distance(&y, &prepared),
                    decode_min_distance(&y_rot, &prepared_rot),
                    "trial {trial} omega {omega}"
                );
            }
        }
    }
}
