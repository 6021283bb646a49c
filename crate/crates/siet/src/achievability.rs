//! What the constructed layered code family attains with circular decoding
//! sets: exact DEP of the circular decoder, the equal-radius inverse, the
//! per-layer packing caps and rate bounds, EOP and energy-rate values, and
//! the probability vectors maximizing rate or energy.
//!
//! The circular-decoder DEP here is exact for that decoder (and therefore
//! an achievable upper bound on the best decoder's DEP). None of the
//! formulas depend on layer phase shifts; reports are bit-identical across
//! rotations.

use crate::code::{exact_log_codeword_count, Codebook, LayerProbabilities};
use crate::constellation::{max_symbols_per_layer, Constellation};
use crate::energy::{self, EnergyProfile, HarvesterModel};
use crate::impossibility;
use crate::{Error, Result};

/// Rate in both logarithmic units, for reporting boundaries that need both.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rate {
    pub nats_per_use: f64,
    pub bits_per_use: f64,
}

/// Probability that one noisy sample lands inside the radius-`r` disk
/// around its own symbol: `1 - exp(-r^2 / sigma^2)`.
pub fn disk_success_probability(radius: f64, noise_variance: f64) -> f64 {
    -f64::exp_m1(-(radius * radius) / noise_variance)
}

/// Exact DEP of the circular decoder for a constant-composition code:
/// `1 - prod_c (1 - exp(-r_c^2/sigma^2))^(n p_c)`.
pub fn dep_circular_cc(
    layer_probs: &LayerProbabilities,
    radii: &[f64],
    n: u64,
    noise_variance: f64,
) -> f64 {
    let log_success: f64 = layer_probs
        .as_slice()
        .iter()
        .zip(radii)
        .map(|(&p, &r)| n as f64 * p * f64::ln_1p(-(-(r * r) / noise_variance).exp()))
        .sum();
    -f64::exp_m1(log_success)
}

/// Exact DEP of the circular decoder for an arbitrary codebook: the average
/// over codewords of the per-codeword success product, using each
/// codeword's own per-layer usage.
pub fn dep_circular_general(codebook: &Codebook, radii: &[f64], noise_variance: f64) -> f64 {
    let log_disk: Vec<f64> = radii
        .iter()
        .map(|&r| f64::ln_1p(-(-(r * r) / noise_variance).exp()))
        .collect();
    let m = codebook.codewords.len() as f64;
    let success: f64 = (0..codebook.codewords.len())
        .map(|i| {
            let usage = codebook.layer_usage(i);
            let log_p: f64 = usage
                .iter()
                .zip(&log_disk)
                .map(|(&k, &lp)| k as f64 * lp)
                .sum();
            log_p.exp()
        })
        .sum::<f64>()
        / m;
    1.0 - success
}

/// Smallest common decoding radius achieving DEP `epsilon` over `n` uses:
/// `sqrt(sigma^2 ln(1 / (1 - (1-eps)^(1/n))))`.
///
/// Round trip: [`dep_circular_cc`] with equal radii at this value returns
/// `epsilon` to within floating rounding.
pub fn min_equal_radius(epsilon: f64, n: u64, noise_variance: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    // 1 - (1-eps)^(1/n) computed through expm1/ln_1p so the round trip
    // stays accurate for extreme eps and large n.
    let miss = -f64::exp_m1(f64::ln_1p(-epsilon) / n as f64);
    Ok((-noise_variance * miss.ln()).sqrt())
}

/// Per-layer packing caps `floor(pi / (2 asin(r_c / 2 A_c)))`.
pub fn per_layer_symbol_caps(constellation: &Constellation) -> Result<Vec<usize>> {
    constellation
        .layers
        .iter()
        .map(|l| max_symbols_per_layer(l.amplitude, l.decode_radius))
        .collect()
}

/// Rate cap from the packing caps: `log2` of their sum, in bits per use.
pub fn rate_cap(constellation: &Constellation) -> Result<f64> {
    let caps = per_layer_symbol_caps(constellation)?;
    Ok((caps.iter().sum::<usize>() as f64).log2())
}

/// Exact rate of the full constant-composition class, in nats and bits.
pub fn achievable_rate_exact(
    n: u64,
    layer_probs: &LayerProbabilities,
    layer_counts: &[usize],
) -> Result<Rate> {
    let log_m = exact_log_codeword_count(n, layer_probs, layer_counts)?;
    Ok(Rate {
        nats_per_use: log_m.nats() / n as f64,
        bits_per_use: log_m.bits() / n as f64,
    })
}

/// EOP of a constant-composition code at energy rate `target`: an indicator
/// on the single block energy.
pub fn achievable_eop_cc(
    layer_probs: &LayerProbabilities,
    constellation: &Constellation,
    model: &HarvesterModel,
    n: u64,
    target: f64,
) -> f64 {
    let e = energy::constant_composition_energy(layer_probs, constellation, model, n);
    if e < target {
        1.0
    } else {
        0.0
    }
}

/// EOP of an arbitrary codebook at energy rate `target`.
pub fn achievable_eop_general(profile: &EnergyProfile, target: f64) -> f64 {
    energy::eop(profile, target)
}

/// Energy-rate cap at outage budget `delta` for the constructed family.
/// The achievable and impossibility caps coincide: both follow the outage
/// step rule over the same energy profile.
pub fn achievable_energy_rate_cap(profile: &EnergyProfile, delta: f64) -> f64 {
    impossibility::energy_rate_cap(profile, delta)
}

/// Layer probabilities maximizing the information rate: `p_c = L_c / L`.
pub fn optimal_probs_for_rate(layer_counts: &[usize]) -> LayerProbabilities {
    let total: usize = layer_counts.iter().sum();
    LayerProbabilities::new(
        layer_counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect(),
    )
    .expect("proportional vector is a pmf")
}

/// Layer probabilities maximizing the block energy: all mass on the
/// outermost layer.
pub fn optimal_probs_for_energy(layer_count: usize) -> LayerProbabilities {
    let mut p = vec![0.0; layer_count];
    p[0] = 1.0;
    LayerProbabilities::new(p).expect("degenerate vector is a pmf")
}

/// Which EOP form a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EopForm {
    /// Indicator on the single constant-composition energy level (exact).
    ConstantCompositionExact,
    /// Average outage indicator over per-codeword energies (lower bound).
    GeneralLowerBound,
}

/// Evaluated achievability values for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct AchievabilityReport {
    pub block_length: u64,
    /// Message count; a float so whole-class scenarios stay representable.
    pub messages: f64,
    pub noise_variance: f64,
    pub radii: Vec<f64>,
    /// Exact circular-decoder DEP.
    pub dep_exact: f64,
    /// Equal radius that would achieve the same DEP.
    pub min_radius: f64,
    pub per_layer_symbol_caps: Vec<usize>,
    pub rate_cap_bits: f64,
    pub rate_exact: Rate,
    pub eop: f64,
    pub eop_form: EopForm,
    pub energy_rate_caps: Vec<(f64, f64)>,
    pub provenance: &'static str,
}

impl AchievabilityReport {
    pub fn csv_header(layer_count: usize) -> String {
        let radii: Vec<String> = (1..=layer_count).map(|c| format!("r_{c}")).collect();
        format!(
            "n,M,sigma2,{},eps_ach,R_cap_bits,R_exact_bits,delta_ach,B_cap_at_delta",
            radii.join(",")
        )
    }

    pub fn csv_row(&self, fmt: &dyn Fn(f64) -> String) -> String {
        let radii: Vec<String> = self.radii.iter().map(|&r| fmt(r)).collect();
        let cap = self
            .energy_rate_caps
            .last()
            .map(|&(_, b)| b)
            .unwrap_or(f64::NAN);
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.block_length,
            crate::impossibility::format_message_count(self.messages, fmt),
            fmt(self.noise_variance),
            radii.join(","),
            fmt(self.dep_exact),
            fmt(self.rate_cap_bits),
            fmt(self.rate_exact.bits_per_use),
            fmt(self.eop),
            fmt(cap),
        )
    }
}
