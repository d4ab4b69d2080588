use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{trials_to_csv, write_file, Check, Estimate, ExperimentConfig, TrialRecord};
use crate::error::Result;
use crate::graph::generate_gnp;
use crate::moments::{calibrate_p, ModelParams, MomentReport};
use crate::solver::{classify_instance, count_k_sets, ClassTag};

/// Empirical Pr(X>0), Pr(X=1), E[X], E[N] against Markov / Paley–Zygmund.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub config: ExperimentConfig,
    pub k: usize,
    pub p: f64,
    pub pr_x_pos: Estimate,
    pub pr_unique: Estimate,
    pub mean_x: Estimate,
    pub mean_n: Estimate,
    pub class_counts: Vec<(ClassTag, u64)>,
    pub e_x: f64,
    pub e_x2: f64,
    pub e_n: f64,
    pub e_n2: f64,
    pub markov_upper: f64,
    /// E[X]² / E[X²] with the exact second moment
    pub pz_lower: f64,
    /// same with the independent-pairs second moment
    pub pz_lower_independent: f64,
    /// δ/(δ+1)
    pub pz_lower_form: f64,
    /// δ(1-δ)/(1+δ)
    pub unique_lower: f64,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl SandwichReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| crate::Error::Domain(format!("cannot create {}: {e}", dir.display())))?;
        write_file(
            &dir.join("sandwich_trials.csv"),
            &trials_to_csv(&self.trials, self.config.record_timings),
        )?;
        write_file(&dir.join("sandwich_summary.json"), &self.summary_json())
    }
}

pub fn run_sandwich_experiment(config: &ExperimentConfig) -> Result<SandwichReport> {
    config.validate()?;
    let n = config.n;
    let k = config.k();
    let p = calibrate_p(n as u64, k as u64, config.delta)?;
    let params = ModelParams::new(n as u64, k as u64, p)
        .with_delta(config.delta)
        .with_c(config.c);
    let moments = MomentReport::compute(&params)?;

    let trials: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let start = Instant::now();
            let mut rng = config.graph_stream(t);
            let g = generate_gnp(n, p, &mut rng)?;
            let counts = count_k_sets(&g, k)?;
            let class = classify_instance(&g, k)?;
            Ok(TrialRecord {
                trial: t,
                graph_stream: 2 * t,
                aux_stream: 2 * t + 1,
                class: class.tag(),
                x_count: counts.dominating,
                n_count: counts.near,
                s_outside_h: None,
                witness_found: None,
                certificate: None,
                wall_time: start.elapsed(),
            })
        })
        .collect::<Result<_>>()?;

    let pr_x_pos = Estimate::from_samples(trials.iter().map(|t| f64::from(t.x_count > 0)));
    let pr_unique = Estimate::from_samples(trials.iter().map(|t| f64::from(t.x_count == 1)));
    let mean_x = Estimate::from_samples(trials.iter().map(|t| t.x_count as f64));
    let mean_n = Estimate::from_samples(trials.iter().map(|t| t.n_count as f64));
    let class_counts = ClassTag::ALL
        .iter()
        .map(|&c| (c, trials.iter().filter(|t| t.class == c).count() as u64))
        .collect();

    let e_x = moments.e_x.to_f64();
    let e_n = moments.e_n.to_f64();
    let pz_lower = moments.pz_lower.to_f64();
    let mut checks = Vec::new();
    if mean_x.degenerate {
        for name in ["mean_x_within_4se", "pr_x_pos_sandwich", "mean_n_within_4se"] {
            checks.push(Check::skipped(name, "fewer than two trials".into()));
        }
    } else {
        let dev = (mean_x.mean - e_x).abs();
        checks.push(Check::new(
            "mean_x_within_4se",
            dev <= 4.0 * mean_x.se,
            format!("mean X {:.6} vs E[X] {:.6}, |diff| {:.3e} <= 4 SE {:.3e}", mean_x.mean, e_x, dev, 4.0 * mean_x.se),
        ));
        let lo = pz_lower - 4.0 * pr_x_pos.se;
        let hi = config.delta + 4.0 * pr_x_pos.se;
        checks.push(Check::new(
            "pr_x_pos_sandwich",
            (lo..=hi).contains(&pr_x_pos.mean),
            format!("Pr(X>0) {:.6} in [{:.6}, {:.6}]", pr_x_pos.mean, lo, hi),
        ));
        let dev = (mean_n.mean - e_n).abs();
        checks.push(Check::new(
            "mean_n_within_4se",
            dev <= 4.0 * mean_n.se,
            format!("mean N {:.6} vs E[N] {:.6}, |diff| {:.3e} <= 4 SE {:.3e}", mean_n.mean, e_n, dev, 4.0 * mean_n.se),
        ));
    }

    Ok(SandwichReport {
        config: config.clone(),
        k,
        p,
        pr_x_pos,
        pr_unique,
        mean_x,
        mean_n,
        class_counts,
        e_x,
        e_x2: moments.e_x2.to_f64(),
        e_n,
        e_n2: moments.e_n2.to_f64(),
        markov_upper: moments.markov_upper.to_f64(),
        pz_lower,
        pz_lower_independent: moments.pz_lower_independent.to_f64(),
        pz_lower_form: moments.pz_lower_form.to_f64(),
        unique_lower: moments.unique_lower.to_f64(),
        checks,
        trials,
    })
}
