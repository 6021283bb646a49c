//! Constant-composition codebooks, their types, and rate accounting.
//!
//! Codewords are stored as sequences of symbol identifiers; complex values
//! only materialize at the channel boundary. This keeps type arithmetic
//! exact.

use std::collections::HashSet;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constellation::{Constellation, SymbolId};
use crate::numerics::{log_multinomial, validate_pmf, LogValue};
use crate::{Error, Result};

/// Default cap on explicit codebook enumeration.
pub const ENUMERATION_CAP: u64 = 1_000_000;

/// Per-layer usage frequencies of a code, one entry per layer, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerProbabilities(Vec<f64>);

impl LayerProbabilities {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        validate_pmf(&p)?;
        Ok(LayerProbabilities(p))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Expands layer probabilities to the per-symbol type `p_c / L_c`.
    pub fn per_symbol_type(&self, layer_counts: &[usize]) -> TypeVector {
        let mut entries = Vec::new();
        for (c, (&p, &count)) in self.0.iter().zip(layer_counts).enumerate() {
            for index in 0..count {
                entries.push((SymbolId { layer: c, index }, p / count as f64));
            }
        }
        TypeVector { entries }
    }
}

/// Empirical pmf over constellation symbols, ordered by `(layer, index)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeVector {
    entries: Vec<(SymbolId, f64)>,
}

impl TypeVector {
    pub fn new(entries: Vec<(SymbolId, f64)>) -> Result<Self> {
        let freqs: Vec<f64> = entries.iter().map(|&(_, f)| f).collect();
        validate_pmf(&freqs)?;
        Ok(TypeVector { entries })
    }

    pub fn entries(&self) -> &[(SymbolId, f64)] {
        &self.entries
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.entries.iter().map(|&(_, f)| f).collect()
    }

    /// Integer per-symbol counts at block length `n`.
    ///
    /// Fails with `Infeasible` when some `n * frequency` is not an integer
    /// within `1e-9`.
    pub fn realized_counts(&self, n: u64) -> Result<Vec<(SymbolId, u64)>> {
        let mut out = Vec::with_capacity(self.entries.len());
        for &(id, f) in &self.entries {
            let exact = n as f64 * f;
            let k = exact.round();
            if (exact - k).abs() > 1e-9 {
                return Err(Error::Infeasible(format!(
                    "n*frequency = {exact} for symbol ({}:{}) is not an integer",
                    id.layer, id.index
                )));
            }
            out.push((id, k as u64));
        }
        Ok(out)
    }
}

/// How the message set is sized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MessageCount {
    /// Use the whole composition class.
    Max,
    Exact(u64),
}

/// How codewords are produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CodebookMode {
    Enumerate,
    Sample { seed: u64 },
}

/// Parameters pinning down one constant-composition codebook.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub block_length: u64,
    pub constellation: Constellation,
    pub layer_probs: LayerProbabilities,
    pub messages: MessageCount,
    pub mode: CodebookMode,
}

impl CodeSpec {
    /// Validates realizability of the composition and that the requested
    /// message count fits inside the class.
    pub fn new(
        block_length: u64,
        constellation: Constellation,
        layer_probs: LayerProbabilities,
        messages: MessageCount,
        mode: CodebookMode,
    ) -> Result<Self> {
        let counts = constellation.layer_counts();
        if layer_probs.len() != counts.len() {
            return Err(Error::Infeasible(format!(
                "{} layer probabilities for {} layers",
                layer_probs.len(),
                counts.len()
            )));
        }
        let spec = CodeSpec {
            block_length,
            constellation,
            layer_probs,
            messages,
            mode,
        };
        let log_count = spec.log_codeword_count()?;
        if let MessageCount::Exact(m) = messages {
            if m == 0 {
                return Err(Error::Exhausted { requested: 0, available: 0 });
            }
            if (m as f64).ln() > log_count.nats() + 1e-9 {
                return Err(Error::Exhausted {
                    requested: m,
                    available: log_count.to_linear().round() as u64,
                });
            }
        }
        Ok(spec)
    }

    /// Per-symbol repetition count `n p_c / L_c` for each symbol of layer c.
    pub fn symbol_repeats(&self) -> Result<Vec<(SymbolId, u64)>> {
        self.layer_probs
            .per_symbol_type(&self.constellation.layer_counts())
            .realized_counts(self.block_length)
    }

    /// `ln M_max` of the composition class.
    pub fn log_codeword_count(&self) -> Result<LogValue> {
        exact_log_codeword_count(
            self.block_length,
            &self.layer_probs,
            &self.constellation.layer_counts(),
        )
    }
}

/// A list of distinct constant-composition codewords plus the spec that
/// produced them. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub spec: CodeSpec,
    pub codewords: Vec<Vec<SymbolId>>,
}

/// Snaps a desired layer-probability vector to the closest one realizable at
/// block length `n`, minimizing the L1 distance.
///
/// Realizable means `n q_c / L_c` is a non-negative integer for every layer
/// and the counts fill the block exactly. Ties prefer bumping layers with
/// the largest fractional remainder of `n p_c / L_c`, then the lowest layer
/// index.
pub fn snap_layer_probs(p: &[f64], n: u64, layer_counts: &[usize]) -> Result<LayerProbabilities> {
    validate_pmf(p)?;
    if p.len() != layer_counts.len() {
        return Err(Error::Infeasible(format!(
            "{} probabilities for {} layers",
            p.len(),
            layer_counts.len()
        )));
    }
    // Order layers by (remainder desc, index asc) for the tie rule.
    let targets: Vec<f64> = p
        .iter()
        .zip(layer_counts)
        .map(|(&pc, &lc)| n as f64 * pc / lc as f64)
        .collect();
    let mut tie_order: Vec<usize> = (0..p.len()).collect();
    tie_order.sort_by(|&a, &b| {
        let ra = targets[a].fract();
        let rb = targets[b].fract();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });

    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut ks = vec![0u64; p.len()];
    search(
        0,
        n,
        layer_counts,
        p,
        n,
        &tie_order,
        &mut ks,
        &mut best,
    );
    let (_, ks) = best.ok_or_else(|| {
        Error::Infeasible(format!(
            "block length {n} is not a non-negative combination of layer sizes {layer_counts:?}"
        ))
    })?;
    let q: Vec<f64> = ks
        .iter()
        .zip(layer_counts)
        .map(|(&k, &lc)| (k * lc as u64) as f64 / n as f64)
        .collect();
    LayerProbabilities::new(q)
}

#[allow(clippy::too_many_arguments)]
fn search(
    layer: usize,
    remaining: u64,
    layer_counts: &[usize],
    p: &[f64],
    n: u64,
    tie_order: &[usize],
    ks: &mut Vec<u64>,
    best: &mut Option<(f64, Vec<u64>)>,
) {
    if layer == layer_counts.len() {
        if remaining != 0 {
            return;
        }
        let dist: f64 = ks
            .iter()
            .zip(layer_counts)
            .zip(p)
            .map(|((&k, &lc), &pc)| ((k * lc as u64) as f64 / n as f64 - pc).abs())
            .sum();
        let replace = match best {
            None => true,
            Some((bd, bk)) => {
                if dist < *bd - 1e-12 {
                    true
                } else if dist > *bd + 1e-12 {
                    false
                } else {
                    // Equal distance: prefer larger counts on layers with the
                    // largest remainder, then on the lowest index.
                    tie_order
                        .iter()
                        .find_map(|&c| match ks[c].cmp(&bk[c]) {
                            std::cmp::Ordering::Greater => Some(true),
                            std::cmp::Ordering::Less => Some(false),
                            std::cmp::Ordering::Equal => None,
                        })
                        .unwrap_or(false)
                }
            }
        };
        if replace {
            *best = Some((dist, ks.clone()));
        }
        return;
    }
    let lc = layer_counts[layer] as u64;
    for k in 0..=(remaining / lc) {
        ks[layer] = k;
        search(
            layer + 1,
            remaining - k * lc,
            layer_counts,
            p,
            n,
            tie_order,
            ks,
            best,
        );
    }
    ks[layer] = 0;
}

/// `ln` of the size of the composition class: `n! / prod_c ((n p_c/L_c)!)^{L_c}`.
pub fn exact_log_codeword_count(
    n: u64,
    layer_probs: &LayerProbabilities,
    layer_counts: &[usize],
) -> Result<LogValue> {
    let repeats = layer_probs
        .per_symbol_type(layer_counts)
        .realized_counts(n)?;
    let counts: Vec<u64> = repeats.iter().map(|&(_, k)| k).collect();
    log_multinomial(n, &counts)
}

/// Information rate in bits per channel use given `ln M`.
pub fn rate_bits_per_use(n: u64, log_m: LogValue) -> f64 {
    log_m.bits() / n as f64
}

/// All codewords of the composition class in lexicographic symbol-id order.
pub fn enumerate_codebook(spec: &CodeSpec) -> Result<Codebook> {
    enumerate_with_cap(spec, ENUMERATION_CAP)
}

/// As [`enumerate_codebook`] with an explicit cap on the class size.
///
/// With an exact message count the walk stops early, so only that count is
/// held against the cap; `Max` requires the whole class to fit.
pub fn enumerate_with_cap(spec: &CodeSpec, cap: u64) -> Result<Codebook> {
    let log_count = spec.log_codeword_count()?;
    let wanted = match spec.messages {
        MessageCount::Max => {
            if log_count.nats() > (cap as f64).ln() + 1e-9 {
                return Err(Error::TooManyCodewords {
                    log_count: log_count.nats(),
                    cap,
                });
            }
            u64::MAX
        }
        MessageCount::Exact(m) => {
            if m > cap {
                return Err(Error::TooManyCodewords {
                    log_count: (m as f64).ln(),
                    cap,
                });
            }
            m
        }
    };
    let base = base_codeword(spec)?;
    let mut codewords = Vec::new();
    let mut current = base;
    loop {
        codewords.push(current.clone());
        if codewords.len() as u64 == wanted || !next_permutation(&mut current) {
            break;
        }
    }
    Ok(Codebook {
        spec: spec.clone(),
        codewords,
    })
}

/// `M` distinct uniformly random members of the composition class,
/// deterministic for a fixed seed.
///
/// Each draw is a full Fisher-Yates shuffle of the composition multiset;
/// duplicates are rejected against a canonical-sequence set. When the
/// requested count is within 10% of the whole class (and the class is
/// enumerable), falls back to enumerate-then-subsample to bound rejection
/// time.
pub fn sample_codebook(spec: &CodeSpec) -> Result<Codebook> {
    let seed = match spec.mode {
        CodebookMode::Sample { seed } => seed,
        CodebookMode::Enumerate => {
            return Err(Error::Infeasible("sample_codebook needs SAMPLE mode".into()))
        }
    };
    let m = match spec.messages {
        MessageCount::Exact(m) => m,
        MessageCount::Max => {
            let count = spec.log_codeword_count()?.to_linear();
            if !count.is_finite() || count > ENUMERATION_CAP as f64 {
                return Err(Error::TooManyCodewords {
                    log_count: spec.log_codeword_count()?.nats(),
                    cap: ENUMERATION_CAP,
                });
            }
            count.round() as u64
        }
    };
    let class_size = spec.log_codeword_count()?.to_linear();
    if (m as f64) > class_size * (1.0 + 1e-9) {
        return Err(Error::Exhausted {
            requested: m,
            available: class_size.round() as u64,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if class_size <= ENUMERATION_CAP as f64 && m as f64 >= 0.9 * class_size {
        // Dense request: enumerate and subsample without replacement.
        let full_spec = CodeSpec {
            messages: MessageCount::Max,
            ..spec.clone()
        };
        let mut all = enumerate_codebook(&full_spec)?.codewords;
        for i in 0..m as usize {
            let j = i + uniform_index(&mut rng, all.len() - i);
            all.swap(i, j);
        }
        all.truncate(m as usize);
        return Ok(Codebook {
            spec: spec.clone(),
            codewords: all,
        });
    }

    let base = base_codeword(spec)?;
    let mut seen: HashSet<Vec<SymbolId>> = HashSet::with_capacity(m as usize);
    let mut codewords = Vec::with_capacity(m as usize);
    let mut scratch = base;
    while codewords.len() < m as usize {
        fisher_yates(&mut rng, &mut scratch);
        if seen.insert(scratch.clone()) {
            codewords.push(scratch.clone());
        }
    }
    Ok(Codebook {
        spec: spec.clone(),
        codewords,
    })
}

/// The lexicographically smallest codeword of the class.
fn base_codeword(spec: &CodeSpec) -> Result<Vec<SymbolId>> {
    let repeats = spec.symbol_repeats()?;
    let mut base = Vec::with_capacity(spec.block_length as usize);
    for (id, k) in repeats {
        for _ in 0..k {
            base.push(id);
        }
    }
    debug_assert_eq!(base.len() as u64, spec.block_length);
    Ok(base)
}

/// Classic in-place next lexicographic permutation; false once exhausted.
fn next_permutation(seq: &mut [SymbolId]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// Unbiased integer in `0..n` from 64-bit draws (rejection on the tail).
fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    debug_assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - (u64::MAX % n + 1) % n;
    loop {
        let x = rng.next_u64();
        if x <= zone {
            return (x % n) as usize;
        }
    }
}

fn fisher_yates(rng: &mut ChaCha8Rng, seq: &mut [SymbolId]) {
    for i in (1..seq.len()).rev() {
        let j = uniform_index(rng, i + 1);
        seq.swap(i, j);
    }
}

impl Codebook {
    pub fn message_count(&self) -> u64 {
        self.codewords.len() as u64
    }

    pub fn block_length(&self) -> u64 {
        self.spec.block_length
    }

    /// The code type: per-symbol empirical frequencies averaged over all
    /// codewords. For constant-composition codebooks this equals every
    /// codeword's own type.
    pub fn code_type(&self) -> TypeVector {
        let counts = self.spec.constellation.layer_counts();
        let mut acc: Vec<Vec<u64>> = counts.iter().map(|&c| vec![0u64; c]).collect();
        for cw in &self.codewords {
            for id in cw {
                acc[id.layer][id.index] += 1;
            }
        }
        let total = (self.codewords.len() as u64 * self.spec.block_length) as f64;
        let mut entries = Vec::new();
        for (layer, symbol_counts) in acc.iter().enumerate() {
            for (index, &k) in symbol_counts.iter().enumerate() {
                entries.push((SymbolId { layer, index }, k as f64 / total));
            }
        }
        TypeVector { entries }
    }

    /// Per-layer symbol counts of one codeword.
    pub fn layer_usage(&self, message: usize) -> Vec<u64> {
        let mut usage = vec![0u64; self.spec.constellation.layers.len()];
        for id in &self.codewords[message] {
            usage[id.layer] += 1;
        }
        usage
    }

    /// Text export: a header `n=..,M=..,L=c0;c1;..` followed by one codeword
    /// per line as comma-separated `layer:index` tokens (zero-based).
    pub fn export(&self) -> String {
        let counts = self
            .spec
            .constellation
            .layer_counts()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let mut out = format!(
            "n={},M={},L={}\n",
            self.spec.block_length,
            self.codewords.len(),
            counts
        );
        for cw in &self.codewords {
            let line = cw
                .iter()
                .map(|id| format!("{}:{}", id.layer, id.index))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses the [`Codebook::export`] format against a known constellation.
    pub fn import(text: &str, constellation: Constellation) -> Result<Codebook> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Infeasible("empty codebook file".into()))?;
        let mut n = None;
        for field in header.split(',') {
            if let Some(v) = field.strip_prefix("n=") {
                n = v.parse::<u64>().ok();
            }
        }
        let n = n.ok_or_else(|| Error::Infeasible("codebook header missing n=".into()))?;
        let mut codewords = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut cw = Vec::with_capacity(n as usize);
            for tok in line.split(',') {
                let (c, l) = tok
                    .split_once(':')
                    .ok_or_else(|| Error::Infeasible(format!("bad symbol token {tok:?}")))?;
                let id = SymbolId {
                    layer: c
                        .trim()
                        .parse()
                        .map_err(|_| Error::Infeasible(format!("bad layer in {tok:?}")))?,
                    index: l
                        .trim()
                        .parse()
                        .map_err(|_| Error::Infeasible(format!("bad index in {tok:?}")))?,
                };
                if id.layer >= constellation.layers.len()
                    || id.index >= constellation.layers[id.layer].count
                {
                    return Err(Error::Infeasible(format!(
                        "symbol {}:{} outside the constellation",
                        id.layer, id.index
                    )));
                }
                cw.push(id);
            }
            if cw.len() as u64 != n {
                return Err(Error::CountMismatch {
                    expected: n,
                    got: cw.len() as u64,
                });
            }
            codewords.push(cw);
        }
        let m = codewords.len() as u64;
        // Reconstruct layer probabilities from the first codeword.
        let first = codewords
            .first()
            .ok_or_else(|| Error::Infeasible("codebook has no codewords".into()))?;
        let mut usage = vec![0u64; constellation.layers.len()];
        for id in first {
            usage[id.layer] += 1;
        }
        let probs =
            LayerProbabilities::new(usage.iter().map(|&u| u as f64 / n as f64).collect())?;
        let spec = CodeSpec::new(
            n,
            constellation,
            probs,
            MessageCount::Exact(m),
            CodebookMode::Enumerate,
        )?;
        Ok(Codebook { spec, codewords })
    }
}
