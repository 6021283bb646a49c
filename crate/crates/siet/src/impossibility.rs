//! Bounds that no code over a given set of channel input symbols can beat:
//! a pairwise-distance lower bound on the DEP, exact and entropy-form upper
//! bounds on the information rate of constant-composition codes, the outage
//! lower bound on the EOP, and the step rule capping the energy rate.
//!
//! Everything here is a pure formula evaluation over the inputs; no
//! optimization happens in this module.

use crate::code::TypeVector;
use crate::constellation::Constellation;
use crate::energy::{self, EnergyProfile};
use crate::numerics::{entropy_nats, log_multinomial, q_function};
use crate::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// DEP lower bound with both the raw formula output and its clamp to [0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepLowerBound {
    /// `(M-1) Q(...)` exactly as evaluated; can exceed 1 for large `M`.
    pub raw: f64,
    /// The raw value clamped to probability range.
    pub clamped: f64,
}

/// Rate upper bound for a constant-composition type, plus the universal
/// `log2 L` cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateUpperBound {
    /// `(1/n) log2 ( n! / prod (n P(x))! )` in bits per channel use.
    pub bits: f64,
    /// `log2 L`, the cap without any composition constraint.
    pub cap_bits: f64,
}

/// Argument of the tail function in the pairwise DEP bound: the square root
/// of the type-weighted farthest-pair squared distances over `2 sigma^2`.
fn pairwise_q_argument(
    constellation: &Constellation,
    code_type: &TypeVector,
    n: u64,
    noise_variance: f64,
) -> Result<f64> {
    let symbols = constellation.symbols();
    if symbols.len() < 2 {
        return Err(Error::DegenerateConstellation);
    }
    let mut weighted_sq = 0.0;
    for &(id, freq) in code_type.entries() {
        let own = constellation.symbol_value(id);
        // Farthest other symbol; ties settle on the lowest (layer, index)
        // which leaves the distance unchanged.
        let mut far = 0.0f64;
        for &(other_id, other) in &symbols {
            if other_id == id {
                continue;
            }
            far = far.max((own - other).norm_sqr());
        }
        weighted_sq += n as f64 * freq * far;
    }
    Ok((weighted_sq / (2.0 * noise_variance)).sqrt())
}

/// Lower-bounds the DEP of any constant-composition code with the given
/// type: each symbol is paired with the farthest other symbol, and the
/// pairwise tail probability is scaled by `M - 1`.
pub fn dep_lower_bound(
    constellation: &Constellation,
    code_type: &TypeVector,
    n: u64,
    messages: u64,
    noise_variance: f64,
) -> Result<DepLowerBound> {
    if messages < 2 {
        return Err(Error::TooFewMessages(messages));
    }
    let arg = pairwise_q_argument(constellation, code_type, n, noise_variance)?;
    let raw = (messages - 1) as f64 * q_function(arg);
    Ok(DepLowerBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// [`dep_lower_bound`] for message counts given as `ln M`, for classes too
/// large to hold in an integer. The product is evaluated in the log domain;
/// overflow saturates cleanly at the clamp.
pub fn dep_lower_bound_ln(
    constellation: &Constellation,
    code_type: &TypeVector,
    n: u64,
    ln_messages: f64,
    noise_variance: f64,
) -> Result<DepLowerBound> {
    if ln_messages < LN_2 - 1e-9 {
        return Err(Error::TooFewMessages(ln_messages.exp().floor() as u64));
    }
    let arg = pairwise_q_argument(constellation, code_type, n, noise_variance)?;
    // ln(M - 1) = ln M + ln(1 - exp(-ln M)).
    let ln_m1 = ln_messages + f64::ln_1p(-(-ln_messages).exp());
    let ln_raw = ln_m1 + ln_q_function(arg);
    let raw = ln_raw.exp();
    Ok(DepLowerBound {
        raw,
        clamped: raw.clamp(0.0, 1.0),
    })
}

/// `ln Q(x)`, switching to the Gaussian tail asymptotic once `Q` underflows.
fn ln_q_function(x: f64) -> f64 {
    let q = q_function(x);
    if q > 1e-300 {
        q.ln()
    } else {
        -0.5 * x * x - x.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
    }
}

/// Exact multinomial rate bound for a constant-composition type.
pub fn rate_upper_exact(n: u64, code_type: &TypeVector) -> Result<RateUpperBound> {
    let counts: Vec<u64> = code_type
        .realized_counts(n)?
        .into_iter()
        .map(|(_, k)| k)
        .collect();
    let log_m = log_multinomial(n, &counts)?;
    Ok(RateUpperBound {
        bits: log_m.bits() / n as f64,
        cap_bits: (code_type.entries().len() as f64).log2(),
    })
}

/// Entropy-form relaxation of [`rate_upper_exact`], finite-`n` corrections
/// included. Evaluated in nats and converted to bits at return.
///
/// Requires every type entry to be strictly positive.
pub fn rate_upper_stirling(n: u64, code_type: &TypeVector) -> Result<f64> {
    for &(id, f) in code_type.entries() {
        if f <= 0.0 {
            return Err(Error::ZeroTypeEntry {
                layer: id.layer,
                index: id.index,
            });
        }
    }
    let p = code_type.frequencies();
    let l = p.len() as f64;
    let nf = n as f64;
    let h = entropy_nats(&p)?;
    let ln_sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt().ln();

    let correction_quad = (1.0 / 12.0 - p.iter().map(|&x| 1.0 / (12.0 * x + 1.0)).sum::<f64>())
        / (nf * nf);
    let correction_lin = (ln_sqrt_2pi
        - p.iter()
            .map(|&x| (2.0 * std::f64::consts::PI * x).sqrt().ln())
            .sum::<f64>())
        / nf;
    let correction_log = -nf.ln() / nf * ((l - 1.0) / 2.0);

    let nats = h + correction_quad + correction_lin + correction_log;
    Ok(nats / LN_2)
}

/// Lower bound on the EOP at energy rate `target`; identical to the outage
/// fraction of the profile.
pub fn eop_lower_bound(profile: &EnergyProfile, target: f64) -> f64 {
    energy::eop(profile, target)
}

/// Upper bound on the energy rate at outage budget `delta`: the smallest
/// level whose cumulative codeword share reaches `delta`.
///
/// `delta = 0` maps to the lowest level, `delta = 1` to the highest.
pub fn energy_rate_cap(profile: &EnergyProfile, delta: f64) -> f64 {
    let m = profile.message_count() as f64;
    let mut cumulative = 0u64;
    for (&level, &y) in profile.levels.iter().zip(&profile.multiplicities) {
        cumulative += y;
        if delta <= cumulative as f64 / m {
            return level;
        }
    }
    *profile.levels.last().expect("profile has at least one level")
}

/// Renders a message count that may exceed integer range.
pub fn format_message_count(m: f64, fmt: &dyn Fn(f64) -> String) -> String {
    if m.fract() == 0.0 && m.abs() < 9e15 {
        format!("{}", m as u64)
    } else {
        fmt(m)
    }
}

/// Evaluated impossibility bounds for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpossibilityReport {
    pub block_length: u64,
    /// Message count; a float so whole-class scenarios beyond integer range
    /// stay representable.
    pub messages: f64,
    pub noise_variance: f64,
    pub dep: DepLowerBound,
    pub rate: RateUpperBound,
    pub rate_stirling_bits: f64,
    /// EOP lower bound at the scenario's energy-rate target.
    pub eop_lower: f64,
    /// `(delta, cap)` pairs of the energy-rate step rule, non-decreasing in
    /// both coordinates.
    pub energy_rate_caps: Vec<(f64, f64)>,
    /// Which rule produced each field, named by what it does.
    pub provenance: &'static str,
}

impl ImpossibilityReport {
    pub fn csv_header() -> &'static str {
        "n,M,sigma2,eps_min,R_exact_bits,R_stirling_bits,delta_min,B_cap_at_delta"
    }

    /// One CSV row; `fmt` renders each float.
    pub fn csv_row(&self, fmt: &dyn Fn(f64) -> String) -> String {
        let cap = self
            .energy_rate_caps
            .last()
            .map(|&(_, b)| b)
            .unwrap_or(f64::NAN);
        format!(
            "{},{},{},{},{},{},{},{}",
            self.block_length,
            format_message_count(self.messages, fmt),
            fmt(self.noise_variance),
            fmt(self.dep.clamped),
            fmt(self.rate.bits),
            fmt(self.rate_stirling_bits),
            fmt(self.eop_lower),
            fmt(cap),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::LayerProbabilities;
    use crate::constellation::Layer;
    use crate::energy::profile_from_energies;
    use approx::assert_relative_eq;

    fn bpsk() -> Constellation {
        Constellation::new(
            vec![Layer { amplitude: 1.0, count: 2, phase_shift: 0.0, decode_radius: 0.5 }],
            1.0,
        )
    }

    fn uniform_type(c: &Constellation) -> TypeVector {
        let probs = LayerProbabilities::new(
            c.layers
                .iter()
                .map(|l| l.count as f64 / c.total_symbols() as f64)
                .collect(),
        )
        .unwrap();
        probs.per_symbol_type(&c.layer_counts())
    }

    #[test]
    fn dep_bound_hand_evaluation() {
        // Antipodal pair, n=2, uniform type, M=2, sigma^2=4: the weighted
        // squared distance is 8, the argument is 1, so the bound is Q(1).
        let c = bpsk();
        let t = uniform_type(&c);
        let b = dep_lower_bound(&c, &t, 2, 2, 4.0).unwrap();
        assert_relative_eq!(b.raw, q_function(1.0), epsilon = 1e-15);
        assert_relative_eq!(b.clamped, 0.158_655_253_931, epsilon = 1e-10);
    }

    #[test]
    fn dep_bound_rejects_degenerate_inputs() {
        let c = bpsk();
        let t = uniform_type(&c);
        assert!(matches!(
            dep_lower_bound(&c, &t, 2, 1, 4.0),
            Err(Error::TooFewMessages(1))
        ));
        let single = Constellation::new(
            vec![Layer { amplitude: 1.0, count: 1, phase_shift: 0.0, decode_radius: 0.5 }],
            1.0,
        );
        let t1 = uniform_type(&single);
        assert!(matches!(
            dep_lower_bound(&single, &t1, 2, 2, 4.0),
            Err(Error::DegenerateConstellation)
        ));
    }

    #[test]
    fn ln_variant_agrees_with_integer_counts() {
        let c = bpsk();
        let t = uniform_type(&c);
        for m in [2u64, 5, 1000] {
            let a = dep_lower_bound(&c, &t, 4, m, 2.0).unwrap();
            let b = dep_lower_bound_ln(&c, &t, 4, (m as f64).ln(), 2.0).unwrap();
            assert_relative_eq!(a.raw, b.raw, max_relative = 1e-13);
        }
        // Huge classes saturate at the clamp without overflow artifacts.
        let b = dep_lower_bound_ln(&c, &t, 4, 500.0, 2.0).unwrap();
        assert_eq!(b.clamped, 1.0);
        // Tiny tail times a huge class stays finite and sane.
        let b = dep_lower_bound_ln(&c, &t, 10_000, 200.0, 1e-4).unwrap();
        assert!(b.raw >= 0.0 && b.raw.is_finite());
    }

    #[test]
    fn dep_bound_limits() {
        let c = bpsk();
        let t = uniform_type(&c);
        // Vanishing noise sends the bound to zero.
        let b = dep_lower_bound(&c, &t, 2, 2, 1e-6).unwrap();
        assert!(b.clamped < 1e-300);
        // Huge message count clamps at one, raw value preserved.
        let b = dep_lower_bound(&c, &t, 2, 1_000_000, 100.0).unwrap();
        assert!(b.raw > 1.0);
        assert_eq!(b.clamped, 1.0);
    }

    #[test]
    fn dep_bound_scaling_monotonicity() {
        // Scaling all coordinates by lambda > 1 scales the Q argument by
        // lambda, so the bound cannot increase.
        let mk = |scale: f64| {
            Constellation::new(
                vec![Layer {
                    amplitude: scale,
                    count: 4,
                    phase_shift: 0.0,
                    decode_radius: 0.1,
                }],
                scale,
            )
        };
        let mut prev = f64::INFINITY;
        for scale in [1.0, 1.5, 2.0, 4.0] {
            let c = mk(scale);
            let t = uniform_type(&c);
            let b = dep_lower_bound(&c, &t, 4, 8, 1.0).unwrap();
            assert!(b.raw <= prev + 1e-15);
            prev = b.raw;
        }
    }

    #[test]
    fn rate_exact_examples() {
        let c = Constellation::new(
            vec![
                Layer { amplitude: 20.0, count: 5, phase_shift: 0.0, decode_radius: 2.0 },
                Layer { amplitude: 10.0, count: 5, phase_shift: 0.0, decode_radius: 2.0 },
            ],
            20.0,
        );
        let t = uniform_type(&c);
        let r = rate_upper_exact(100, &t).unwrap();
        assert_relative_eq!(r.bits, 212.695_249_824_808_3 / LN_2 / 100.0, epsilon = 1e-12);
        assert_relative_eq!(r.cap_bits, 10f64.log2(), epsilon = 1e-15);
        assert!(r.bits <= r.cap_bits + 1e-9);

        // Single symbol: zero rate.
        let single = Constellation::new(
            vec![Layer { amplitude: 1.0, count: 1, phase_shift: 0.0, decode_radius: 0.5 }],
            1.0,
        );
        let r = rate_upper_exact(2, &uniform_type(&single)).unwrap();
        assert_eq!(r.bits, 0.0);
    }

    #[test]
    fn stirling_upper_bounds_exact_and_converges() {
        let c = Constellation::new(
            vec![
                Layer { amplitude: 20.0, count: 5, phase_shift: 0.0, decode_radius: 2.0 },
                Layer { amplitude: 10.0, count: 5, phase_shift: 0.0, decode_radius: 2.0 },
            ],
            20.0,
        );
        let t = uniform_type(&c);
        let exact = rate_upper_exact(100, &t).unwrap().bits;
        let stirling = rate_upper_stirling(100, &t).unwrap();
        assert!(stirling >= exact);
        assert!(stirling - exact < 0.01);

        // Large n: the bound approaches the entropy in bits.
        let h_bits = entropy_nats(&t.frequencies()).unwrap() / LN_2;
        let far = rate_upper_stirling(1_000_000, &t).unwrap();
        assert_relative_eq!(far, h_bits, epsilon = 1e-4);
    }

    #[test]
    fn stirling_single_symbol_matches_plugged_formula() {
        let single = Constellation::new(
            vec![Layer { amplitude: 1.0, count: 1, phase_shift: 0.0, decode_radius: 0.5 }],
            1.0,
        );
        let t = uniform_type(&single);
        let n = 50u64;
        let got = rate_upper_stirling(n, &t).unwrap();
        let expect_nats = (1.0 / (n as f64 * n as f64)) * (1.0 / 12.0 - 1.0 / 13.0);
        assert_relative_eq!(got, expect_nats / LN_2, epsilon = 1e-12);
    }

    #[test]
    fn stirling_rejects_zero_entries() {
        let c = Constellation::new(
            vec![
                Layer { amplitude: 2.0, count: 1, phase_shift: 0.0, decode_radius: 0.2 },
                Layer { amplitude: 1.0, count: 1, phase_shift: 0.0, decode_radius: 0.2 },
            ],
            2.0,
        );
        let probs = LayerProbabilities::new(vec![1.0, 0.0]).unwrap();
        let t = probs.per_symbol_type(&c.layer_counts());
        assert!(matches!(
            rate_upper_stirling(10, &t),
            Err(Error::ZeroTypeEntry { layer: 1, index: 0 })
        ));
    }

    #[test]
    fn energy_cap_stepping_examples() {
        let profile = profile_from_energies(vec![1.0, 2.0, 2.0, 3.0]);
        assert_eq!(energy_rate_cap(&profile, 0.25), 1.0);
        assert_eq!(energy_rate_cap(&profile, 0.75), 2.0);
        assert_eq!(energy_rate_cap(&profile, 1.0), 3.0);
        assert_eq!(energy_rate_cap(&profile, 0.0), 1.0);

        // All-distinct energies: budget 1/M allows only the lowest level.
        let distinct = profile_from_energies(vec![1.0, 4.0, 9.0, 16.0]);
        assert_eq!(energy_rate_cap(&distinct, 0.25), 1.0);
        assert_eq!(energy_rate_cap(&distinct, 0.2), 1.0);

        // Constant composition: the single level regardless of delta.
        let cc = profile_from_energies(vec![7.0; 5]);
        for delta in [0.0, 0.3, 1.0] {
            assert_eq!(energy_rate_cap(&cc, delta), 7.0);
        }
    }

    #[test]
    fn energy_cap_is_consistent_with_outage() {
        // eop(profile, cap(delta)) <= delta: the cap never overshoots the
        // budget, and caps are non-decreasing in delta.
        let profile = profile_from_energies(vec![0.5, 1.5, 1.5, 2.5, 2.5, 6.0]);
        let m = profile.message_count();
        let mut prev_cap = f64::NEG_INFINITY;
        for k in 0..=m {
            let delta = k as f64 / m as f64;
            let cap = energy_rate_cap(&profile, delta);
            assert!(eop_lower_bound(&profile, cap) <= delta + 1e-12);
            assert!(cap >= prev_cap);
            prev_cap = cap;
        }
    }

    #[test]
    fn report_row_has_eight_fields() {
        let profile = profile_from_energies(vec![1.0, 2.0]);
        let c = bpsk();
        let t = uniform_type(&c);
        let report = ImpossibilityReport {
            block_length: 2,
            messages: 2.0,
            noise_variance: 4.0,
            dep: dep_lower_bound(&c, &t, 2, 2, 4.0).unwrap(),
            rate: rate_upper_exact(2, &t).unwrap(),
            rate_stirling_bits: rate_upper_stirling(2, &t).unwrap(),
            eop_lower: eop_lower_bound(&profile, 1.5),
            energy_rate_caps: vec![(0.5, energy_rate_cap(&profile, 0.5))],
            provenance: "pairwise-farthest;multinomial;entropy-corrected;outage-step",
        };
        let row = report.csv_row(&|x| format!("{x}"));
        assert_eq!(row.split(',').count(), 8);
        assert_eq!(
            ImpossibilityReport::csv_header().split(',').count(),
            8
        );
    }
}
