//! Nonlinear harvested-energy model, per-codeword energies and outage.
//!
//! Harvested energy is `k1 |x|^2 + k2 |x|^4` summed over the block. Because
//! every symbol of layer `c` has modulus `A_c`, energies are computed from
//! layer amplitudes and per-layer usage counts; they are therefore exactly
//! invariant under rotations and per-layer phase shifts of the
//! constellation. Energy units are arbitrary and follow the caller's
//! amplitude units.

use serde::{Deserialize, Serialize};

use crate::code::{Codebook, LayerProbabilities};
use crate::constellation::{Constellation, SymbolId};

/// Second- and fourth-order harvester coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarvesterModel {
    pub k1: f64,
    pub k2: f64,
}

impl Default for HarvesterModel {
    fn default() -> Self {
        HarvesterModel { k1: 0.0034, k2: 0.3829 }
    }
}

impl HarvesterModel {
    /// Energy one use of a symbol with the given modulus contributes.
    pub fn symbol_energy(&self, amplitude: f64) -> f64 {
        let a2 = amplitude * amplitude;
        self.k1 * a2 + self.k2 * a2 * a2
    }
}

/// Per-codeword energies with deduplicated levels and multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    /// `e_i` for each codeword, in codeword order.
    pub per_codeword: Vec<f64>,
    /// Distinct energy levels, strictly increasing.
    pub levels: Vec<f64>,
    /// Number of codewords at each level; sums to the codeword count.
    pub multiplicities: Vec<u64>,
}

/// Energy carried by one codeword.
pub fn codeword_energy(
    codeword: &[SymbolId],
    constellation: &Constellation,
    model: &HarvesterModel,
) -> f64 {
    let mut usage = vec![0u64; constellation.layers.len()];
    for id in codeword {
        usage[id.layer] += 1;
    }
    usage
        .iter()
        .zip(&constellation.layers)
        .map(|(&k, layer)| k as f64 * model.symbol_energy(layer.amplitude))
        .sum()
}

/// Block energy of any codeword of a constant-composition code:
/// `n * sum_c p_c (k1 A_c^2 + k2 A_c^4)`.
pub fn constant_composition_energy(
    layer_probs: &LayerProbabilities,
    constellation: &Constellation,
    model: &HarvesterModel,
    n: u64,
) -> f64 {
    let per_use: f64 = layer_probs
        .as_slice()
        .iter()
        .zip(&constellation.layers)
        .map(|(&p, layer)| p * model.symbol_energy(layer.amplitude))
        .sum();
    n as f64 * per_use
}

/// Builds the energy profile of a codebook.
///
/// Levels are deduplicated with tolerance `1e-9 * max(e)`; codewords with
/// identical layer usage produce bitwise-identical energies, so the
/// tolerance only merges genuinely indistinguishable levels.
pub fn energy_profile(codebook: &Codebook, model: &HarvesterModel) -> EnergyProfile {
    let constellation = &codebook.spec.constellation;
    let per_codeword: Vec<f64> = codebook
        .codewords
        .iter()
        .map(|cw| codeword_energy(cw, constellation, model))
        .collect();
    profile_from_energies(per_codeword)
}

/// Profile from raw per-codeword energies.
pub fn profile_from_energies(per_codeword: Vec<f64>) -> EnergyProfile {
    let max = per_codeword.iter().cloned().fold(0.0f64, f64::max);
    let tol = 1e-9 * max;
    let mut sorted = per_codeword.clone();
    sorted.sort_by(f64::total_cmp);
    let mut levels: Vec<f64> = Vec::new();
    let mut multiplicities: Vec<u64> = Vec::new();
    for e in sorted {
        match levels.last() {
            Some(&last) if e - last <= tol => *multiplicities.last_mut().unwrap() += 1,
            _ => {
                levels.push(e);
                multiplicities.push(1);
            }
        }
    }
    EnergyProfile { per_codeword, levels, multiplicities }
}

impl EnergyProfile {
    pub fn message_count(&self) -> u64 {
        self.multiplicities.iter().sum()
    }

    /// CSV block of per-codeword energies: `codeword_index,energy`.
    pub fn per_codeword_csv(&self) -> String {
        let mut out = String::from("codeword_index,energy\n");
        for (i, e) in self.per_codeword.iter().enumerate() {
            out.push_str(&format!("{i},{e:.12e}\n"));
        }
        out
    }

    /// CSV block of unique levels: `level_index,level,multiplicity`.
    pub fn levels_csv(&self) -> String {
        let mut out = String::from("level_index,level,multiplicity\n");
        for (j, (e, y)) in self.levels.iter().zip(&self.multiplicities).enumerate() {
            out.push_str(&format!("{j},{e:.12e},{y}\n"));
        }
        out
    }
}

/// Energy-outage probability: the fraction of codewords with energy
/// strictly below the target `B`. A codeword exactly at `B` is not in
/// outage.
pub fn eop(profile: &EnergyProfile, target: f64) -> f64 {
    let m = profile.per_codeword.len() as f64;
    let below: u64 = profile
        .levels
        .iter()
        .zip(&profile.multiplicities)
        .filter(|(&e, _)| e < target)
        .map(|(_, &y)| y)
        .sum();
    below as f64 / m
}
