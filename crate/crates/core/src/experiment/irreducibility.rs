use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    certificates_jsonl, trials_to_csv, write_file, Check, Estimate, ExperimentConfig,
    TrialRecord, WitnessMode,
};
use crate::error::{Error, Result};
use crate::graph::generate_gnp;
use crate::moments::{binomial, calibrate_p, prob_single_neighbor, ModelParams};
use crate::solver::{classify_instance, count_k_sets, ClassTag, InstanceClass};
use crate::symmetry::{
    apply_mapping, find_forward_witness, find_reverse_witness, verify_certificate, Direction,
    Quad,
};

/// Outcome counts for one mapping direction.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DirectionTally {
    /// trials of the matching class
    pub eligible_class: u64,
    /// of those, the witness set avoids H
    pub outside_h: u64,
    /// predicted Pr(witness set avoids H) for a uniform set
    pub outside_h_predicted: f64,
    pub witness_found: u64,
    /// predicted Pr(some outside vertex has exactly one neighbor in S)
    pub witness_predicted: f64,
    /// successful applications
    pub applied: u64,
    pub degree_preserved: u64,
    pub edge_count_preserved: u64,
    pub h_unchanged: u64,
    pub locally_sound: u64,
    pub flipped: u64,
    pub flipped_ci95: (f64, f64),
}

impl DirectionTally {
    fn rate(num: u64, den: u64) -> f64 {
        if den == 0 {
            f64::NAN
        } else {
            num as f64 / den as f64
        }
    }

    pub fn outside_h_rate(&self) -> f64 {
        Self::rate(self.outside_h, self.eligible_class)
    }

    pub fn witness_rate(&self) -> f64 {
        Self::rate(self.witness_found, self.outside_h)
    }

    pub fn flipped_rate(&self) -> f64 {
        Self::rate(self.flipped, self.applied)
    }

    fn flag_checks(&self, label: &str) -> Vec<Check> {
        let flags = [
            ("degree_preserved", self.degree_preserved),
            ("edge_count_preserved", self.edge_count_preserved),
            ("h_unchanged", self.h_unchanged),
            ("locally_sound", self.locally_sound),
        ];
        flags
            .iter()
            .map(|&(name, ok)| {
                let name = format!("{label}_{name}");
                if self.applied == 0 {
                    Check::skipped(&name, "no applications".into())
                } else {
                    Check::new(&name, ok == self.applied, format!("{ok}/{}", self.applied))
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityReport {
    pub config: ExperimentConfig,
    pub k: usize,
    pub p: f64,
    pub h_size: usize,
    pub class_counts: Vec<(ClassTag, u64)>,
    pub forward: DirectionTally,
    pub reverse: DirectionTally,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub trials: Vec<TrialRecord>,
}

impl IrreducibilityReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.iter().any(Check::failed)
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_outputs(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::Domain(format!("cannot create {}: {e}", dir.display())))?;
        write_file(
            &dir.join("irreducibility_trials.csv"),
            &trials_to_csv(&self.trials, self.config.record_timings),
        )?;
        write_file(
            &dir.join("irreducibility_certificates.jsonl"),
            &certificates_jsonl(&self.trials),
        )?;
        write_file(&dir.join("irreducibility_summary.json"), &self.summary_json())
    }
}

fn run_trial(config: &ExperimentConfig, k: usize, p: f64, t: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let g = generate_gnp(config.n, p, &mut config.graph_stream(t))?;
    let mut aux = config.aux_stream(t);
    let h = config.choose_h(&mut aux);
    let counts = count_k_sets(&g, k)?;
    let class = classify_instance(&g, k)?;
    let mut rec = TrialRecord {
        trial: t,
        graph_stream: 2 * t,
        aux_stream: 2 * t + 1,
        class: class.tag(),
        x_count: counts.dominating,
        n_count: counts.near,
        s_outside_h: None,
        witness_found: None,
        certificate: None,
        wall_time: Default::default(),
    };
    let rng = match config.witness_mode {
        WitnessMode::Lexicographic => None,
        WitnessMode::Randomized => Some(&mut aux),
    };
    let attempt = match class {
        InstanceClass::UniqueDom { set } => {
            let outside = set.is_disjoint(&h);
            rec.s_outside_h = Some(outside);
            if outside {
                find_forward_witness(&g, set, h, rng)?.map(|q| (q, Direction::Forward, set))
            } else {
                None
            }
        }
        InstanceClass::NoDomWithNear { set, vertex } => {
            let outside = set.with(vertex).is_disjoint(&h);
            rec.s_outside_h = Some(outside);
            if outside {
                find_reverse_witness(&g, set, vertex, h, rng)?
                    .map(|(u, z, w)| (Quad::new(u, vertex, z, w), Direction::Reverse, set))
            } else {
                None
            }
        }
        InstanceClass::MultiDom { .. } | InstanceClass::NoDomNoNear => None,
    };
    if rec.s_outside_h == Some(true) {
        rec.witness_found = Some(attempt.is_some());
    }
    if let Some((quad, dir, target)) = attempt {
        let (after, cert) = apply_mapping(&g, quad, dir, target, h)?;
        rec.certificate = Some(verify_certificate(&g, &after, &cert, k)?);
    }
    rec.wall_time = start.elapsed();
    Ok(rec)
}

fn tally(trials: &[TrialRecord], tag: ClassTag, dir: Direction) -> DirectionTally {
    let mut d = DirectionTally::default();
    for t in trials.iter().filter(|t| t.class == tag) {
        d.eligible_class += 1;
        d.outside_h += u64::from(t.s_outside_h == Some(true));
        d.witness_found += u64::from(t.witness_found == Some(true));
        let Some(c) = t.certificate.as_ref().filter(|c| c.direction == dir) else {
            continue;
        };
        d.applied += 1;
        d.degree_preserved += u64::from(c.degree_preserved);
        d.edge_count_preserved += u64::from(c.edge_count_preserved);
        d.h_unchanged += u64::from(c.h_unchanged == Some(true));
        d.locally_sound += u64::from(c.locally_sound);
        d.flipped += u64::from(c.flipped == Some(true));
    }
    d.flipped_ci95 = Estimate::wilson95(d.flipped, d.applied);
    d
}

/// Samples graphs at the calibrated p, attempts the forward swap on
/// unique-solution instances and the reverse swap on near-solution instances,
/// and verifies every certificate with the exact solver.
pub fn run_irreducibility_experiment(config: &ExperimentConfig) -> Result<IrreducibilityReport> {
    config.validate()?;
    let n = config.n;
    let k = config.k();
    let h_size = config.h_size();
    if h_size + k + 2 > n {
        return Err(Error::Domain(format!(
            "|H|={h_size} leaves no room for a swap: need |H| <= n-k-2 = {}",
            n as i64 - k as i64 - 2
        )));
    }
    let p = calibrate_p(n as u64, k as u64, config.delta)?;
    let params = ModelParams::new(n as u64, k as u64, p)
        .with_delta(config.delta)
        .with_c(config.c);

    let trials: Vec<TrialRecord> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, k, p, t))
        .collect::<Result<_>>()?;

    let class_counts = ClassTag::ALL
        .iter()
        .map(|&c| (c, trials.iter().filter(|t| t.class == c).count() as u64))
        .collect();

    let (nu, hu, ku) = (n as u64, h_size as u64, k as u64);
    let single = prob_single_neighbor(&params)?;
    let mut forward = tally(&trials, ClassTag::UniqueDom, Direction::Forward);
    forward.outside_h_predicted = (binomial(nu - hu, ku) / binomial(nu, ku)).to_f64();
    forward.witness_predicted = 1.0 - single.no_witness;
    let mut reverse = tally(&trials, ClassTag::NoDomWithNear, Direction::Reverse);
    reverse.outside_h_predicted = (binomial(nu - hu, ku + 1) / binomial(nu, ku + 1)).to_f64();
    reverse.witness_predicted = 1.0 - single.no_witness;

    let mut checks = forward.flag_checks("forward");
    checks.extend(reverse.flag_checks("reverse"));

    Ok(IrreducibilityReport {
        config: config.clone(),
        k,
        p,
        h_size,
        class_counts,
        forward,
        reverse,
        checks,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{HSelection, KRule};

    #[test]
    fn small_run_is_sound_and_reproducible() {
        let mut cfg = ExperimentConfig::new(16, KRule::Explicit(2), 0.5, 300, 5);
        let a = run_irreducibility_experiment(&cfg).unwrap();
        assert!(a.all_passed(), "{:#?}", a.checks);
        assert!(a.forward.applied + a.reverse.applied > 0);
        let b = run_irreducibility_experiment(&cfg).unwrap();
        assert_eq!(certificates_jsonl(&a.trials), certificates_jsonl(&b.trials));

        cfg.h_selection = HSelection::RandomNc;
        cfg.witness_mode = WitnessMode::Randomized;
        let c = run_irreducibility_experiment(&cfg).unwrap();
        assert!(c.all_passed(), "{:#?}", c.checks);
        let d = run_irreducibility_experiment(&cfg).unwrap();
        assert_eq!(c.summary_json(), d.summary_json());
    }

    #[test]
    fn oversized_h_is_rejected() {
        let mut cfg = ExperimentConfig::new(8, KRule::Explicit(3), 0.5, 1, 0);
        cfg.c = 0.9;
        assert!(matches!(
            run_irreducibility_experiment(&cfg),
            Err(Error::Domain(_))
        ));
    }
}
