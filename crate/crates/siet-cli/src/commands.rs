//! Command implementations. Each returns the text that goes to `--out` (or
//! stdout), so they are directly testable.

use siet::achievability::{
    self, achievable_rate_exact, dep_circular_cc, dep_circular_general, disk_success_probability,
    min_equal_radius, per_layer_symbol_caps, rate_cap, AchievabilityReport, EopForm,
};
use siet::code::{
    enumerate_codebook, sample_codebook, snap_layer_probs, CodeSpec, Codebook, LayerProbabilities,
    MessageCount,
};
use siet::constellation::{Constellation, Layer};
use siet::energy::{constant_composition_energy, profile_from_energies, HarvesterModel};
use siet::impossibility::{
    dep_lower_bound_ln, energy_rate_cap, eop_lower_bound, rate_upper_exact, rate_upper_stirling,
    ImpossibilityReport,
};
use siet::sim::{estimate_dep, ChannelParams, Decoder, DepEstimate};
use siet::Error;

use crate::config::{ModeConfig, ScenarioConfig};
use crate::{fmt_float, CliError};

/// Validates the constellation, mapping violations to the dedicated error.
fn require_valid(constellation: &Constellation) -> Result<(), CliError> {
    let violations = constellation.validate();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(CliError::InvalidConstellation(
            violations.iter().map(|v| v.to_string()).collect(),
        ))
    }
}

/// Layer probabilities from the config, default proportional to counts.
fn scenario_probs(cfg: &ScenarioConfig) -> Result<LayerProbabilities, CliError> {
    let counts = cfg.constellation.layer_counts();
    match &cfg.code.layer_probs {
        Some(p) => LayerProbabilities::new(p.clone()).map_err(CliError::from),
        None => Ok(achievability::optimal_probs_for_rate(&counts)),
    }
}

/// Evaluates both reports for one scenario and renders them as two CSV
/// blocks (one header and one row each).
pub fn cmd_bounds(cfg: &ScenarioConfig) -> Result<String, CliError> {
    require_valid(&cfg.constellation)?;
    let constellation = &cfg.constellation;
    let counts = constellation.layer_counts();
    let n = cfg.code.block_length;
    let sigma2 = cfg.channel.noise_variance;
    let model: HarvesterModel = cfg.model.into();
    let probs = scenario_probs(cfg)?;
    let messages = cfg.code.messages.to_message_count()?;

    // Realizability gate.
    let spec = CodeSpec::new(
        n,
        constellation.clone(),
        probs.clone(),
        messages,
        cfg.code.mode.to_codebook_mode(cfg.channel.seed),
    )?;
    let log_class = spec.log_codeword_count()?;
    let (ln_m, m_value) = match messages {
        MessageCount::Exact(m) => ((m as f64).ln(), m as f64),
        MessageCount::Max => (log_class.nats(), log_class.to_linear()),
    };

    let code_type = probs.per_symbol_type(&counts);
    let dep = dep_lower_bound_ln(constellation, &code_type, n, ln_m, sigma2)?;
    let rate = rate_upper_exact(n, &code_type)?;
    let stirling = match rate_upper_stirling(n, &code_type) {
        Ok(v) => v,
        Err(Error::ZeroTypeEntry { .. }) => f64::NAN,
        Err(e) => return Err(e.into()),
    };

    let block_energy = constant_composition_energy(&probs, constellation, &model, n);
    let profile = profile_from_energies(vec![block_energy]);
    let b_target = cfg.targets.energy_rate.unwrap_or(block_energy);
    let delta_budget = cfg.targets.eop.unwrap_or(0.0);

    let impossibility = ImpossibilityReport {
        block_length: n,
        messages: m_value,
        noise_variance: sigma2,
        dep,
        rate,
        rate_stirling_bits: stirling,
        eop_lower: eop_lower_bound(&profile, b_target),
        energy_rate_caps: vec![(delta_budget, energy_rate_cap(&profile, delta_budget))],
        provenance: "pairwise-farthest-tail;multinomial-exact;entropy-corrected;outage-step",
    };

    let radii = constellation.radii();
    let eps_ach = dep_circular_cc(&probs, &radii, n, sigma2);
    let min_radius = if eps_ach > 0.0 && eps_ach < 1.0 {
        min_equal_radius(eps_ach, n, sigma2)?
    } else {
        f64::NAN
    };
    let achievable = AchievabilityReport {
        block_length: n,
        messages: m_value,
        noise_variance: sigma2,
        radii: radii.clone(),
        dep_exact: eps_ach,
        min_radius,
        per_layer_symbol_caps: per_layer_symbol_caps(constellation)?,
        rate_cap_bits: rate_cap(constellation)?,
        rate_exact: achievable_rate_exact(n, &probs, &counts)?,
        eop: achievability::achievable_eop_cc(&probs, constellation, &model, n, b_target),
        eop_form: EopForm::ConstantCompositionExact,
        energy_rate_caps: vec![(
            delta_budget,
            achievability::achievable_energy_rate_cap(&profile, delta_budget),
        )],
        provenance: "circular-exact;packing-caps;class-multinomial;cc-indicator;outage-step",
    };

    let mut out = String::new();
    out.push_str("# schema: siet.bounds.impossibility.v1\n");
    out.push_str(ImpossibilityReport::csv_header());
    out.push('\n');
    out.push_str(&impossibility.csv_row(&fmt_float));
    out.push('\n');
    out.push_str("# schema: siet.bounds.achievability.v1\n");
    out.push_str(&AchievabilityReport::csv_header(constellation.layers.len()));
    out.push('\n');
    out.push_str(&achievable.csv_row(&fmt_float));
    out.push('\n');
    Ok(out)
}

/// One row of the rate/energy trade-off sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigBrRow {
    pub p: f64,
    pub a2: f64,
    pub energy: f64,
    pub rate_nats: f64,
    pub rate_bits: f64,
}

/// Sweeps the layer-1 probability and second-layer amplitude of a two-layer
/// scenario, reporting block energy and the exact class rate in both units.
pub fn sweep_figbr_rows(cfg: &ScenarioConfig) -> Result<Vec<FigBrRow>, CliError> {
    let sweep = cfg
        .sweep
        .figbr
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sweep.figbr] section".into()))?;
    ScenarioConfig::check_grid("p", &sweep.p_grid)?;
    ScenarioConfig::check_grid("a2", &sweep.a2_grid)?;
    if cfg.constellation.layers.len() != 2 {
        return Err(CliError::Config(
            "the figbr sweep needs a two-layer constellation template".into(),
        ));
    }
    let n = cfg.code.block_length;
    let counts = cfg.constellation.layer_counts();
    let model: HarvesterModel = cfg.model.into();
    let mut rows = Vec::new();
    for &a2 in &sweep.a2_grid {
        let mut constellation = cfg.constellation.clone();
        constellation.layers[1].amplitude = a2;
        require_valid(&constellation)?;
        for &p in &sweep.p_grid {
            let snapped = snap_layer_probs(&[p, 1.0 - p], n, &counts)?;
            let energy = constant_composition_energy(&snapped, &constellation, &model, n);
            let rate = achievable_rate_exact(n, &snapped, &counts)?;
            rows.push(FigBrRow {
                p: snapped.as_slice()[0],
                a2,
                energy,
                rate_nats: rate.nats_per_use,
                rate_bits: rate.bits_per_use,
            });
        }
    }
    Ok(rows)
}

pub fn cmd_sweep_figbr(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let rows = sweep_figbr_rows(cfg)?;
    let mut out = String::from("# schema: siet.sweep-figbr.v1\np,a2,energy,rate_nats,rate_bits\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(r.p),
            fmt_float(r.a2),
            fmt_float(r.energy),
            fmt_float(r.rate_nats),
            fmt_float(r.rate_bits),
        ));
    }
    Ok(out)
}

/// One row of the information-energy region sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    pub epsilon: f64,
    pub probs: Vec<f64>,
    pub rate_bits: f64,
    pub energy_rate: f64,
    pub frontier: bool,
}

/// Walks the probability simplex for each DEP target, deriving the common
/// decoding radius from the target and the layer amplitudes from the
/// radius (each ring `2r` inside the previous one).
pub fn sweep_regions_rows(cfg: &ScenarioConfig) -> Result<Vec<RegionRow>, CliError> {
    let sweep = cfg
        .sweep
        .regions
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sweep.regions] section".into()))?;
    ScenarioConfig::check_grid("epsilon", &sweep.epsilon_grid)?;
    if sweep.p_step <= 0.0 || sweep.p_step > 1.0 {
        return Err(CliError::Config("p_step must lie in (0, 1]".into()));
    }
    let template = &cfg.constellation;
    let layer_count = template.layers.len();
    if layer_count < 2 {
        return Err(CliError::Config(
            "the regions sweep needs at least two layers".into(),
        ));
    }
    let n = cfg.code.block_length;
    let sigma2 = cfg.channel.noise_variance;
    let counts = template.layer_counts();
    let model: HarvesterModel = cfg.model.into();

    let mut rows = Vec::new();
    for &epsilon in &sweep.epsilon_grid {
        let radius = min_equal_radius(epsilon, n, sigma2)?;
        // Amplitudes step down by twice the radius from the top ring.
        let a1 = template.layers[0].amplitude;
        let layers: Vec<Layer> = (0..layer_count)
            .map(|c| Layer {
                amplitude: a1 - 2.0 * radius * c as f64,
                count: counts[c],
                phase_shift: template.layers[c].phase_shift,
                decode_radius: radius,
            })
            .collect();
        if layers.last().unwrap().amplitude <= 0.0 {
            return Err(CliError::from(Error::InfeasibleGeometry(format!(
                "innermost amplitude {} not positive at epsilon {epsilon}",
                layers.last().unwrap().amplitude
            ))));
        }
        let constellation = Constellation::new(layers, template.peak_amplitude);
        require_valid(&constellation)?;

        // Snapped simplex walk, deduplicated.
        let mut seen: Vec<Vec<u64>> = Vec::new();
        let mut grid_p = Vec::new();
        let steps = (1.0 / sweep.p_step).round() as u64;
        for i in 0..=steps {
            for j in 0..=(steps - i) {
                let mut p = vec![0.0; layer_count];
                p[0] = i as f64 / steps as f64;
                p[1] = j as f64 / steps as f64;
                let rest = 1.0 - p[0] - p[1];
                if layer_count > 2 {
                    p[layer_count - 1] = rest.max(0.0);
                } else if rest.abs() > 1e-12 {
                    continue;
                }
                grid_p.push(p);
            }
        }
        for p in grid_p {
            let snapped = match snap_layer_probs(&p, n, &counts) {
                Ok(s) => s,
                Err(Error::Infeasible(_)) => continue,
                Err(e) => return Err(e.into()),
            };
            let key: Vec<u64> = snapped.as_slice().iter().map(|x| x.to_bits()).collect();
            if seen.contains(&key) {
                continue;
            }
            seen.push(key);
            let rate = achievable_rate_exact(n, &snapped, &counts)?;
            let energy = constant_composition_energy(&snapped, &constellation, &model, n);
            rows.push(RegionRow {
                epsilon,
                probs: snapped.as_slice().to_vec(),
                rate_bits: rate.bits_per_use,
                energy_rate: energy,
                frontier: false,
            });
        }
    }
    mark_pareto_frontier(&mut rows);
    Ok(rows)
}

/// Flags rows not dominated in (rate, energy) by any other row of the same
/// epsilon group.
fn mark_pareto_frontier(rows: &mut [RegionRow]) {
    for i in 0..rows.len() {
        let dominated = rows.iter().enumerate().any(|(j, other)| {
            j != i
                && other.epsilon == rows[i].epsilon
                && other.rate_bits >= rows[i].rate_bits
                && other.energy_rate >= rows[i].energy_rate
                && (other.rate_bits > rows[i].rate_bits
                    || other.energy_rate > rows[i].energy_rate)
        });
        rows[i].frontier = !dominated;
    }
}

pub fn cmd_sweep_regions(cfg: &ScenarioConfig) -> Result<String, CliError> {
    let rows = sweep_regions_rows(cfg)?;
    let layer_count = cfg.constellation.layers.len();
    let p_cols: Vec<String> = (1..=layer_count).map(|c| format!("p{c}")).collect();
    let mut out = format!(
        "# schema: siet.sweep-regions.v1\nepsilon,{},R_bits,B,frontier\n",
        p_cols.join(",")
    );
    for r in rows {
        let probs: Vec<String> = r.probs.iter().map(|&p| fmt_float(p)).collect();
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_float(r.epsilon),
            probs.join(","),
            fmt_float(r.rate_bits),
            fmt_float(r.energy_rate),
            u8::from(r.frontier),
        ));
    }
    Ok(out)
}

/// One closed-form versus Monte Carlo comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyRow {
    pub check: &'static str,
    pub closed_form: f64,
    pub mc_estimate: f64,
    pub standard_error: f64,
    pub pass: bool,
}

/// Runs the three channel-simulator oracles against their closed forms.
///
/// A comparison passes when the estimate sits within three standard errors
/// of the closed form.
pub fn verify_rows(cfg: &ScenarioConfig, seed: u64, trials: u64) -> Result<Vec<VerifyRow>, CliError> {
    if trials < 10_000 {
        return Err(CliError::Config(format!(
            "verification needs at least 10000 trials, got {trials}"
        )));
    }
    require_valid(&cfg.constellation)?;
    let constellation = &cfg.constellation;
    let sigma2 = cfg.channel.noise_variance;
    let n = cfg.code.block_length;
    let mut rows = Vec::new();

    // Disk membership of raw noise around a symbol.
    let radius = constellation.layers[0].decode_radius;
    let params = ChannelParams { noise_variance: sigma2, seed, trials };
    let mut inside = 0u64;
    for trial in 0..trials {
        let z = siet::sim::noise_sequence(&params, trial, 1)[0];
        if z.norm_sqr() <= radius * radius {
            inside += 1;
        }
    }
    let p_hat = inside as f64 / trials as f64;
    let closed = disk_success_probability(radius, sigma2);
    let se = (p_hat * (1.0 - p_hat) / trials as f64).sqrt();
    rows.push(VerifyRow {
        check: "disk_membership",
        closed_form: closed,
        mc_estimate: p_hat,
        standard_error: se,
        pass: (p_hat - closed).abs() <= 3.0 * se,
    });

    // Circular-decoder DEP against the per-codeword product form.
    let probs = scenario_probs(cfg)?;
    let messages = cfg.code.messages.to_message_count()?;
    let spec = CodeSpec::new(
        n,
        constellation.clone(),
        probs.clone(),
        messages,
        cfg.code.mode.to_codebook_mode(seed),
    )?;
    let codebook = match cfg.code.mode {
        ModeConfig::Sample => sample_codebook(&spec)?,
        ModeConfig::Enumerate => enumerate_codebook(&spec)?,
    };
    let params = ChannelParams { noise_variance: sigma2, seed, trials };
    let est = estimate_dep(&codebook, constellation, &params, Decoder::Circular);
    let closed = dep_circular_general(&codebook, &constellation.radii(), sigma2);
    rows.push(VerifyRow {
        check: "circular_dep_product_form",
        closed_form: closed,
        mc_estimate: est.point_estimate,
        standard_error: est.standard_error,
        pass: (est.point_estimate - closed).abs() <= 3.0 * est.standard_error,
    });

    // Equal-radius collapse, on the same code with all radii forced equal.
    let mut equalized = constellation.clone();
    for layer in &mut equalized.layers {
        layer.decode_radius = radius;
    }
    require_valid(&equalized)?;
    let eq_codebook = Codebook {
        spec: CodeSpec {
            constellation: equalized.clone(),
            ..codebook.spec.clone()
        },
        codewords: codebook.codewords.clone(),
    };
    let params = ChannelParams { noise_variance: sigma2, seed: seed.wrapping_add(1), trials };
    let est = estimate_dep(&eq_codebook, &equalized, &params, Decoder::Circular);
    let closed = -f64::exp_m1((n as f64) * f64::ln_1p(-(-radius * radius / sigma2).exp()));
    rows.push(VerifyRow {
        check: "circular_dep_equal_radius",
        closed_form: closed,
        mc_estimate: est.point_estimate,
        standard_error: est.standard_error,
        pass: (est.point_estimate - closed).abs() <= 3.0 * est.standard_error,
    });

    Ok(rows)
}

/// Extra decoder estimates for a codebook file, appended by `verify` when
/// the config names one.
pub fn codebook_estimates(
    cfg: &ScenarioConfig,
    path: &std::path::Path,
    seed: u64,
    trials: u64,
) -> Result<Vec<DepEstimate>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let codebook = Codebook::import(&text, cfg.constellation.clone())?;
    let params = ChannelParams {
        noise_variance: cfg.channel.noise_variance,
        seed,
        trials,
    };
    Ok(vec![
        estimate_dep(&codebook, &cfg.constellation, &params, Decoder::MinDistance),
        estimate_dep(&codebook, &cfg.constellation, &params, Decoder::Circular),
    ])
}

/// Renders verification rows; the boolean reports whether every check
/// passed.
pub fn cmd_verify(cfg: &ScenarioConfig, seed: u64, trials: u64) -> Result<(String, bool), CliError> {
    let rows = verify_rows(cfg, seed, trials)?;
    let mut out =
        String::from("# schema: siet.verify.v1\ncheck,closed_form,mc_estimate,se,pass\n");
    let mut all_pass = true;
    for r in &rows {
        all_pass &= r.pass;
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.check,
            fmt_float(r.closed_form),
            fmt_float(r.mc_estimate),
            fmt_float(r.standard_error),
            u8::from(r.pass),
        ));
    }
    if let Some(path) = &cfg.verify.codebook {
        let estimates = codebook_estimates(cfg, std::path::Path::new(path), seed, trials)?;
        out.push_str("# schema: siet.dep-estimate.v1\n");
        out.push_str(DepEstimate::csv_header());
        out.push('\n');
        for est in estimates {
            out.push_str(&est.csv_row(seed, &fmt_float));
            out.push('\n');
        }
    }
    Ok((out, all_pass))
}

/// Builds the scenario's codebook and renders the exchange format.
pub fn cmd_construct(cfg: &ScenarioConfig, seed: u64) -> Result<String, CliError> {
    require_valid(&cfg.constellation)?;
    let probs = scenario_probs(cfg)?;
    let messages = cfg.code.messages.to_message_count()?;
    let spec = CodeSpec::new(
        cfg.code.block_length,
        cfg.constellation.clone(),
        probs,
        messages,
        cfg.code.mode.to_codebook_mode(seed),
    )?;
    let codebook = match cfg.code.mode {
        ModeConfig::Sample => sample_codebook(&spec)?,
        ModeConfig::Enumerate => enumerate_codebook(&spec)?,
    };
    Ok(codebook.export())
}
