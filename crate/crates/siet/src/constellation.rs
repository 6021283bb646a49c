//! Layered circular sets of channel input symbols.
//!
//! A constellation is a union of layers; layer `c` places `L_c` symbols
//! equally spaced on the circle of radius `A_c` with phase shift `alpha_c`,
//! and carries the radius `r_c` of the circular decoding set around each of
//! its symbols. Amplitudes are unit-agnostic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// One amplitude ring of the constellation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Radius of the ring the symbols sit on. Must be positive.
    pub amplitude: f64,
    /// Number of symbols equally spaced on the ring.
    pub count: usize,
    /// Common phase shift of the ring's symbols, normalized to `[0, 2*pi)`.
    pub phase_shift: f64,
    /// Radius of the circular decoding set around each symbol of this layer.
    pub decode_radius: f64,
}

/// Identifies symbol `index` of layer `layer` (both zero-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolId {
    pub layer: usize,
    pub index: usize,
}

/// A layered set of channel input symbols under a peak-amplitude constraint.
///
/// Immutable after construction; layers are ordered by strictly decreasing
/// amplitude (validated by [`Constellation::validate`], not by construction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constellation {
    pub layers: Vec<Layer>,
    pub peak_amplitude: f64,
}

/// One failed constellation constraint, as data rather than an error.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// A layer field that must be positive is not.
    NonPositive { layer: usize, field: &'static str },
    /// Amplitudes must strictly decrease from layer `upper` to `upper + 1`.
    AmplitudeOrder { upper: usize },
    /// The first layer exceeds the peak-amplitude constraint.
    PeakExceeded { amplitude: f64, peak: f64 },
    /// Consecutive rings are closer than the sum of their decoding radii.
    LayerSeparation { upper: usize, gap: f64, needed: f64 },
    /// A decoding radius larger than the layer diameter; the packing angle
    /// is undefined.
    RadiusTooLarge { layer: usize },
    /// More symbols configured than disjoint decoding disks fit on the ring.
    LayerOvercrowded { layer: usize, count: usize, cap: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NonPositive { layer, field } => {
                write!(f, "layer {layer}: {field} must be positive")
            }
            Violation::AmplitudeOrder { upper } => write!(
                f,
                "amplitudes must strictly decrease between layers {upper} and {}",
                upper + 1
            ),
            Violation::PeakExceeded { amplitude, peak } => {
                write!(f, "first-layer amplitude {amplitude} exceeds peak constraint {peak}")
            }
            Violation::LayerSeparation { upper, gap, needed } => write!(
                f,
                "layers {upper} and {}: amplitude gap {gap} below radius sum {needed}",
                upper + 1
            ),
            Violation::RadiusTooLarge { layer } => {
                write!(f, "layer {layer}: RadiusTooLarge (decode radius exceeds ring diameter)")
            }
            Violation::LayerOvercrowded { layer, count, cap } => {
                write!(f, "layer {layer}: {count} symbols exceed the packing cap {cap}")
            }
        }
    }
}

/// Largest number of symbols whose radius-`r` decoding disks fit disjointly
/// on the circle of radius `amplitude`: `floor(pi / (2 asin(r / 2A)))`.
///
/// The tiny slack added before the floor keeps exact-geometry inputs (ratios
/// that are whole numbers in exact arithmetic) on the intended side.
pub fn max_symbols_per_layer(amplitude: f64, radius: f64) -> Result<usize> {
    let ratio = radius / (2.0 * amplitude);
    if ratio.is_nan() || ratio <= 0.0 || ratio > 1.0 {
        return Err(Error::RadiusTooLarge {
            radius,
            diameter: 2.0 * amplitude,
        });
    }
    let cap = std::f64::consts::PI / (2.0 * ratio.asin());
    Ok((cap + 1e-9).floor() as usize)
}

impl Constellation {
    /// Builds a constellation, normalizing phase shifts to `[0, 2*pi)`.
    pub fn new(layers: Vec<Layer>, peak_amplitude: f64) -> Self {
        let layers = layers
            .into_iter()
            .map(|mut l| {
                l.phase_shift = l.phase_shift.rem_euclid(TAU);
                l
            })
            .collect();
        Constellation {
            layers,
            peak_amplitude,
        }
    }

    /// Total number of symbols across all layers.
    pub fn total_symbols(&self) -> usize {
        self.layers.iter().map(|l| l.count).sum()
    }

    /// Per-layer symbol counts.
    pub fn layer_counts(&self) -> Vec<usize> {
        self.layers.iter().map(|l| l.count).collect()
    }

    /// Per-layer decoding radii.
    pub fn radii(&self) -> Vec<f64> {
        self.layers.iter().map(|l| l.decode_radius).collect()
    }

    /// Complex value of one symbol.
    pub fn symbol_value(&self, id: SymbolId) -> Complex64 {
        let layer = &self.layers[id.layer];
        let angle = TAU * id.index as f64 / layer.count as f64 + layer.phase_shift;
        Complex64::from_polar(layer.amplitude, angle)
    }

    /// All symbols in `(layer, index)` order.
    pub fn symbols(&self) -> Vec<(SymbolId, Complex64)> {
        let mut out = Vec::with_capacity(self.total_symbols());
        for (c, layer) in self.layers.iter().enumerate() {
            for index in 0..layer.count {
                let id = SymbolId { layer: c, index };
                out.push((id, self.symbol_value(id)));
            }
        }
        out
    }

    /// The same constellation with every phase shift advanced by `omega`.
    pub fn rotate(&self, omega: f64) -> Constellation {
        let layers = self
            .layers
            .iter()
            .map(|l| Layer {
                phase_shift: (l.phase_shift + omega).rem_euclid(TAU),
                ..l.clone()
            })
            .collect();
        Constellation {
            layers,
            peak_amplitude: self.peak_amplitude,
        }
    }

    /// Checks every structural constraint; an empty list means valid.
    ///
    /// Checked per layer: positive amplitude, radius and count; count within
    /// the packing cap. Checked across layers: strictly decreasing
    /// amplitudes, peak constraint on the first layer, and amplitude gaps of
    /// consecutive layers at least the sum of their decoding radii so that
    /// decoding disks of different layers stay disjoint.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for (c, layer) in self.layers.iter().enumerate() {
            if layer.amplitude.is_nan() || layer.amplitude <= 0.0 {
                v.push(Violation::NonPositive { layer: c, field: "amplitude" });
            }
            if layer.count == 0 {
                v.push(Violation::NonPositive { layer: c, field: "count" });
            }
            if layer.decode_radius.is_nan() || layer.decode_radius <= 0.0 {
                v.push(Violation::NonPositive { layer: c, field: "decode_radius" });
            }
            if layer.amplitude > 0.0 && layer.decode_radius > 0.0 {
                match max_symbols_per_layer(layer.amplitude, layer.decode_radius) {
                    Ok(cap) => {
                        if layer.count > cap {
                            v.push(Violation::LayerOvercrowded {
                                layer: c,
                                count: layer.count,
                                cap,
                            });
                        }
                    }
                    Err(_) => v.push(Violation::RadiusTooLarge { layer: c }),
                }
            }
        }
        if let Some(first) = self.layers.first() {
            if first.amplitude > self.peak_amplitude {
                v.push(Violation::PeakExceeded {
                    amplitude: first.amplitude,
                    peak: self.peak_amplitude,
                });
            }
        }
        for c in 0..self.layers.len().saturating_sub(1) {
            let (hi, lo) = (&self.layers[c], &self.layers[c + 1]);
            if hi.amplitude <= lo.amplitude {
                v.push(Violation::AmplitudeOrder { upper: c });
            }
            let gap = hi.amplitude - lo.amplitude;
            let needed = hi.decode_radius + lo.decode_radius;
            // Touching disks are allowed; the slack keeps gaps derived as
            // amplitude differences from failing by one rounding step.
            if gap < needed * (1.0 - 1e-12) {
                v.push(Violation::LayerSeparation { upper: c, gap, needed });
            }
        }
        v
    }
}
