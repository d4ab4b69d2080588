//! Batch experiments: calibrate p, sample graphs, classify them exactly,
//! apply swaps, and summarize everything next to the closed forms.
//!
//! Trial `t` draws its graph from stream `2t` and any auxiliary randomness
//! (random H, randomized witness choice) from stream `2t + 1`, so results do
//! not depend on how trials are scheduled across threads.

mod audit;
mod irreducibility;
mod sandwich;

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::solver::ClassTag;
use crate::symmetry::MappingCertificate;
use crate::vertex_set::VertexSet;

pub use audit::{audit_point, run_formula_audit, AuditReport, AuditRow, AUDIT_P_GRID, AUDIT_RTOL};
pub use irreducibility::{run_irreducibility_experiment, DirectionTally, IrreducibilityReport};
pub use sandwich::{run_sandwich_experiment, SandwichReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HSelection {
    /// vertices 0..⌈n^c⌉
    FirstNc,
    /// a uniform random ⌈n^c⌉-subset per trial
    RandomNc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum KRule {
    Explicit(usize),
    /// round(ln n)
    RoundLnN,
}

impl KRule {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            KRule::Explicit(k) => k,
            KRule::RoundLnN => (n as f64).ln().round() as usize,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WitnessMode {
    Lexicographic,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k_rule: KRule,
    pub delta: f64,
    pub c: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub h_selection: HSelection,
    pub witness_mode: WitnessMode,
    /// include per-trial wall time in CSV output (breaks byte-identical reruns)
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn new(n: usize, k_rule: KRule, delta: f64, trials: u64, master_seed: u64) -> Self {
        Self {
            n,
            k_rule,
            delta,
            c: crate::moments::DEFAULT_C,
            trials,
            master_seed,
            h_selection: HSelection::FirstNc,
            witness_mode: WitnessMode::Lexicographic,
            record_timings: false,
        }
    }

    pub fn k(&self) -> usize {
        self.k_rule.resolve(self.n)
    }

    /// ⌈n^c⌉
    pub fn h_size(&self) -> usize {
        (self.n as f64).powf(self.c).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if self.trials == 0 {
            return Err(Error::Domain("trials must be at least 1".into()));
        }
        if k == 0 || k >= self.n {
            return Err(Error::Domain(format!("need 1 <= k < n, got n={} k={k}", self.n)));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Domain(format!("delta={} not in (0,1)", self.delta)));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(Error::Domain(format!("c={} not in (0,1)", self.c)));
        }
        Ok(())
    }

    pub fn graph_stream(&self, trial: u64) -> RngStream {
        RngStream::new(self.master_seed, 2 * trial)
    }

    pub fn aux_stream(&self, trial: u64) -> RngStream {
        RngStream::new(self.master_seed, 2 * trial + 1)
    }

    pub fn choose_h(&self, aux: &mut RngStream) -> VertexSet {
        let size = self.h_size().min(self.n);
        match self.h_selection {
            HSelection::FirstNc => (0..size).collect(),
            HSelection::RandomNc => {
                let mut pool: Vec<usize> = (0..self.n).collect();
                for i in 0..size {
                    let j = i + aux.below(self.n - i);
                    pool.swap(i, j);
                }
                pool[..size].iter().copied().collect()
            }
        }
    }
}

/// One named pass/fail line; `passed = None` means not evaluated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: Option<bool>,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: Some(passed),
            detail,
        }
    }

    pub fn skipped(name: &str, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: None,
            detail,
        }
    }

    pub fn failed(&self) -> bool {
        self.passed == Some(false)
    }

    pub fn line(&self) -> String {
        let tag = match self.passed {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "SKIP",
        };
        format!("[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Sample mean with its standard error. `se` is NaN with fewer than two
/// samples; `degenerate` flags that case.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub degenerate: bool,
}

impl Estimate {
    pub fn from_samples<I: IntoIterator<Item = f64>>(xs: I) -> Self {
        let xs: Vec<f64> = xs.into_iter().collect();
        let t = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / t;
        if xs.len() < 2 {
            return Self {
                mean,
                se: f64::NAN,
                degenerate: true,
            };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (t - 1.0);
        Self {
            mean,
            se: (var / t).sqrt(),
            degenerate: false,
        }
    }

    /// Wilson 95% interval for a proportion.
    pub fn wilson95(successes: u64, total: u64) -> (f64, f64) {
        if total == 0 {
            return (0.0, 1.0);
        }
        let z = 1.959_963_984_540_054;
        let n = total as f64;
        let ph = successes as f64 / n;
        let denom = 1.0 + z * z / n;
        let center = (ph + z * z / (2.0 * n)) / denom;
        let half = z * (ph * (1.0 - ph) / n + z * z / (4.0 * n * n)).sqrt() / denom;
        ((center - half).max(0.0), (center + half).min(1.0))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub graph_stream: u64,
    pub aux_stream: u64,
    pub class: ClassTag,
    pub x_count: u64,
    pub n_count: u64,
    /// whether the class witness (S, or S ∪ {v}) avoids H; `None` if no witness
    pub s_outside_h: Option<bool>,
    /// `None` when no mapping was attempted
    pub witness_found: Option<bool>,
    pub certificate: Option<MappingCertificate>,
    #[serde(skip)]
    pub wall_time: Duration,
}

fn opt_bool(b: Option<bool>) -> &'static str {
    match b {
        Some(true) => "1",
        Some(false) => "0",
        None => "",
    }
}

/// One row per trial.
pub fn trials_to_csv(trials: &[TrialRecord], timings: bool) -> String {
    let mut s = String::from(
        "trial,graph_stream,aux_stream,class,x_count,n_count,s_outside_h,witness_found,\
         direction,quad,degree_preserved,edge_count_preserved,locally_sound,h_unchanged,\
         flipped,pre_class,post_class,before_hash,after_hash",
    );
    if timings {
        s.push_str(",wall_us");
    }
    s.push('\n');
    for t in trials {
        let _ = write!(
            s,
            "{},{},{},{},{},{},{},{},",
            t.trial,
            t.graph_stream,
            t.aux_stream,
            t.class,
            t.x_count,
            t.n_count,
            opt_bool(t.s_outside_h),
            opt_bool(t.witness_found)
        );
        match &t.certificate {
            Some(c) => {
                let q = c.quad;
                let _ = write!(
                    s,
                    "{},{};{};{};{},{},{},{},{},{},{},{},{},{}",
                    c.direction,
                    q.u,
                    q.v,
                    q.z,
                    q.w,
                    opt_bool(Some(c.degree_preserved)),
                    opt_bool(Some(c.edge_count_preserved)),
                    opt_bool(Some(c.locally_sound)),
                    opt_bool(c.h_unchanged),
                    opt_bool(c.flipped),
                    c.pre_class.map(|x| x.as_str()).unwrap_or(""),
                    c.post_class.map(|x| x.as_str()).unwrap_or(""),
                    c.before_hash,
                    c.after_hash
                );
            }
            None => s.push_str(",,,,,,,,,,"),
        }
        if timings {
            let _ = write!(s, ",{}", t.wall_time.as_micros());
        }
        s.push('\n');
    }
    s
}

/// Certificates, one JSON document per line.
pub fn certificates_jsonl(trials: &[TrialRecord]) -> String {
    trials
        .iter()
        .filter_map(|t| t.certificate.as_ref())
        .map(|c| c.to_json_line() + "\n")
        .collect()
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_rules() {
        assert_eq!(KRule::RoundLnN.resolve(100), 5);
        assert_eq!(KRule::RoundLnN.resolve(40), 4);
        assert_eq!(KRule::Explicit(3).resolve(40), 3);
    }

    #[test]
    fn h_selection() {
        let mut cfg = ExperimentConfig::new(40, KRule::Explicit(4), 0.5, 1, 0);
        assert_eq!(cfg.h_size(), 7);
        let h = cfg.choose_h(&mut cfg.aux_stream(0));
        assert_eq!(h.to_vec(), (0..7).collect::<Vec<_>>());
        cfg.h_selection = HSelection::RandomNc;
        let a = cfg.choose_h(&mut cfg.aux_stream(3));
        let b = cfg.choose_h(&mut cfg.aux_stream(3));
        assert_eq!(a, b);
        assert_eq!(a.len(), 7);
    }

    #[test]
    fn estimates() {
        let e = Estimate::from_samples([1.0, 0.0, 1.0, 0.0]);
        assert_eq!(e.mean, 0.5);
        assert!((e.se - (1.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(Estimate::from_samples([2.0]).degenerate);
        let (lo, hi) = Estimate::wilson95(50, 100);
        assert!(lo < 0.5 && hi > 0.5 && lo > 0.39 && hi < 0.61);
    }
}
