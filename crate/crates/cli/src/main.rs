use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use domlab_core::experiment::{
    run_formula_audit, run_irreducibility_experiment, run_sandwich_experiment, Check,
    ExperimentConfig, HSelection, KRule, WitnessMode, AUDIT_P_GRID,
};
use domlab_core::moments::{DEFAULT_C, DEFAULT_DELTA};
use domlab_core::{
    apply_mapping, calibrate_p, classify_instance, count_k_sets, expected_x, find_forward_witness,
    find_reverse_witness, generate_gnp, verify_certificate, Direction, Graph, InstanceClass,
    ModelParams, MomentReport, Quad, RngStream, VertexSet,
};
use serde_json::json;

#[derive(Parser)]
#[command(name = "domlab", version, about = "Dominating k-sets in G(n,p): exact solver, moments, swap experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a G(n,p) graph and print it as an edge list
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// write the graph here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Count and classify dominating k-sets of a graph file
    Solve {
        graph: PathBuf,
        /// defaults to round(ln n)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// First and second moments for (n, k, p)
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Solve E[X](p) = delta for p
    Calibrate {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Apply one verified swap to a graph file
    Map {
        graph: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_C)]
        c: f64,
        /// comma-separated H; defaults to vertices 0..ceil(n^c)
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<usize>>,
        /// pick uniformly among valid quadruples with this seed
        #[arg(long)]
        seed: Option<u64>,
        /// write the rewired graph here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare closed-form moments with exhaustive enumeration
    Audit {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        /// comma-separated p grid
        #[arg(long, value_delimiter = ',', default_values_t = AUDIT_P_GRID)]
        p: Vec<f64>,
        /// extra points as n:k:p, comma-separated
        #[arg(long, value_delimiter = ',')]
        extra: Vec<String>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical Pr(X>0), E[X], E[N] against the moment bounds
    Sandwich(ExperimentArgs),
    /// Forward and reverse swaps on sampled instances, with certificates
    Irreducibility(ExperimentArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_C)]
    c: f64,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// directory for the per-trial CSV and summary files
    #[arg(long)]
    out: Option<PathBuf>,
    /// stdout format: per-trial CSV or the summary document
    #[arg(long, value_enum, default_value_t = Format::Structured)]
    format: Format,
    /// record per-trial wall time in the CSV
    #[arg(long)]
    timings: bool,
    /// draw H uniformly per trial instead of 0..ceil(n^c)
    #[arg(long)]
    random_h: bool,
    /// choose uniformly among valid witnesses instead of the first
    #[arg(long)]
    random_witness: bool,
}

impl ExperimentArgs {
    fn config(&self) -> ExperimentConfig {
        let k_rule = self.k.map_or(KRule::RoundLnN, KRule::Explicit);
        let mut cfg = ExperimentConfig::new(self.n, k_rule, self.delta, self.trials, self.seed);
        cfg.c = self.c;
        cfg.record_timings = self.timings;
        if self.random_h {
            cfg.h_selection = HSelection::RandomNc;
        }
        if self.random_witness {
            cfg.witness_mode = WitnessMode::Randomized;
        }
        cfg
    }
}

fn default_k(n: u64) -> u64 {
    ((n as f64).ln().round() as u64).max(1)
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    text.parse()
        .with_context(|| format!("parsing {}", path.display()))
}

fn print_checks(checks: &[Check]) -> bool {
    let mut ok = true;
    for c in checks {
        eprintln!("{}", c.line());
        ok &= !c.failed();
    }
    ok
}

fn emit(out: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(out.as_bytes())?;
    if !out.ends_with('\n') {
        stdout.write_all(b"\n")?;
    }
    Ok(())
}

fn class_json(class: &InstanceClass) -> serde_json::Value {
    serde_json::to_value(class).expect("class serializes")
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Gen {
            n,
            p,
            seed,
            stream,
            out,
        } => {
            let g = generate_gnp(n, p, &mut RngStream::new(seed, stream))?;
            match out {
                Some(path) => std::fs::write(&path, g.to_text())
                    .with_context(|| format!("writing {}", path.display()))?,
                None => emit(&g.to_text())?,
            }
            Ok(true)
        }
        Command::Solve { graph, k, format } => {
            let g = read_graph(&graph)?;
            let k = k.unwrap_or_else(|| default_k(g.n() as u64) as usize);
            let counts = count_k_sets(&g, k)?;
            let class = classify_instance(&g, k)?;
            match format {
                Format::Csv => emit(&format!(
                    "n,k,dominating,near,total_examined,class,fingerprint\n{},{k},{},{},{},{},{}",
                    g.n(),
                    counts.dominating,
                    counts.near,
                    counts.total_examined,
                    class.tag(),
                    g.fingerprint()
                ))?,
                Format::Structured => emit(&serde_json::to_string_pretty(&json!({
                    "n": g.n(),
                    "k": k,
                    "fingerprint": g.fingerprint(),
                    "counts": counts,
                    "classification": class_json(&class),
                }))?)?,
            }
            Ok(true)
        }
        Command::Moments {
            n,
            k,
            p,
            delta,
            c,
            format,
        } => {
            let params = ModelParams::new(n, k.unwrap_or_else(|| default_k(n)), p)
                .with_delta(delta)
                .with_c(c);
            let r = MomentReport::compute(&params)?;
            emit(&match format {
                Format::Csv => r.to_kv_text(),
                Format::Structured => r.to_json(),
            })?;
            Ok(true)
        }
        Command::Calibrate { n, k, delta, format } => {
            let k = k.unwrap_or_else(|| default_k(n));
            let p = calibrate_p(n, k, delta)?;
            let e_x = expected_x(&ModelParams::new(n, k, p)).to_f64();
            let rel = (e_x - delta).abs() / delta;
            match format {
                Format::Csv => emit(&format!(
                    "n,k,delta,p,e_x,rel_err\n{n},{k},{delta},{p:.17e},{e_x:.17e},{rel:.3e}"
                ))?,
                Format::Structured => emit(&serde_json::to_string_pretty(&json!({
                    "n": n, "k": k, "delta": delta, "p": p, "e_x": e_x, "rel_err": rel,
                }))?)?,
            }
            Ok(true)
        }
        Command::Map {
            graph,
            k,
            c,
            h,
            seed,
            out,
        } => run_map(&graph, k, c, h, seed, out.as_deref()),
        Command::Audit {
            n_max,
            p,
            extra,
            format,
            out,
        } => {
            let extra = extra
                .iter()
                .map(|s| parse_point(s))
                .collect::<Result<Vec<_>>>()?;
            let r = run_formula_audit(n_max, &p, &extra)?;
            let structured = serde_json::to_string_pretty(&r)?;
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("audit.csv"), r.to_csv())?;
                std::fs::write(dir.join("audit_summary.json"), &structured)?;
            }
            emit(&match format {
                Format::Csv => r.to_csv(),
                Format::Structured => structured,
            })?;
            eprintln!(
                "info: independent-pairs second moments deviate by up to {:.3e}",
                r.max_rel_err_independent
            );
            Ok(print_checks(&r.checks))
        }
        Command::Sandwich(args) => {
            let r = run_sandwich_experiment(&args.config())?;
            if let Some(dir) = &args.out {
                r.write_outputs(dir)?;
            }
            emit(&match args.format {
                Format::Csv => domlab_core::experiment::trials_to_csv(&r.trials, args.timings),
                Format::Structured => r.summary_json(),
            })?;
            Ok(print_checks(&r.checks))
        }
        Command::Irreducibility(args) => {
            let r = run_irreducibility_experiment(&args.config())?;
            if let Some(dir) = &args.out {
                r.write_outputs(dir)?;
            }
            emit(&match args.format {
                Format::Csv => domlab_core::experiment::trials_to_csv(&r.trials, args.timings),
                Format::Structured => r.summary_json(),
            })?;
            for (name, d) in [("forward", &r.forward), ("reverse", &r.reverse)] {
                eprintln!(
                    "info: {name}: applied {} flipped {} ({:.4}, 95% CI [{:.4}, {:.4}])",
                    d.applied,
                    d.flipped,
                    d.flipped_rate(),
                    d.flipped_ci95.0,
                    d.flipped_ci95.1
                );
            }
            Ok(print_checks(&r.checks))
        }
    }
}

fn parse_point(s: &str) -> Result<(usize, usize, f64)> {
    let parts: Vec<&str> = s.split(':').collect();
    let [n, k, p] = parts[..] else {
        bail!("expected n:k:p, got {s:?}");
    };
    Ok((n.parse()?, k.parse()?, p.parse()?))
}

fn run_map(
    path: &Path,
    k: Option<usize>,
    c: f64,
    h: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<bool> {
    let g = read_graph(path)?;
    let n = g.n();
    let k = k.unwrap_or_else(|| default_k(n as u64) as usize);
    let h: VertexSet = match h {
        Some(vs) => vs.into_iter().collect(),
        None => (0..((n as f64).powf(c).ceil() as usize).min(n)).collect(),
    };
    h.check_within(n)?;
    let mut rng = seed.map(|s| RngStream::new(s, 0));
    let class = classify_instance(&g, k)?;
    let attempt = match class {
        InstanceClass::UniqueDom { set } if set.is_disjoint(&h) => {
            find_forward_witness(&g, set, h, rng.as_mut())?.map(|q| (q, Direction::Forward, set))
        }
        InstanceClass::NoDomWithNear { set, vertex } if set.with(vertex).is_disjoint(&h) => {
            find_reverse_witness(&g, set, vertex, h, rng.as_mut())?
                .map(|(u, z, w)| (Quad::new(u, vertex, z, w), Direction::Reverse, set))
        }
        _ => None,
    };
    let Some((quad, dir, target)) = attempt else {
        emit(&serde_json::to_string_pretty(&json!({
            "classification": class_json(&class),
            "h_vertices": h,
            "certificate": null,
        }))?)?;
        eprintln!("info: no applicable swap for class {}", class.tag());
        return Ok(true);
    };
    let (after, cert) = apply_mapping(&g, quad, dir, target, h)?;
    let cert = verify_certificate(&g, &after, &cert, k)?;
    if let Some(path) = out {
        std::fs::write(path, after.to_text())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    emit(&cert.to_json_line())?;
    let what = format!("{} swap on {:?}", cert.direction, cert.quad);
    let checks = [
        Check::new("degree_preserved", cert.degree_preserved, what.clone()),
        Check::new("edge_count_preserved", cert.edge_count_preserved, what.clone()),
        Check::new("h_unchanged", cert.h_unchanged == Some(true), what.clone()),
        Check::new("locally_sound", cert.locally_sound, what),
    ];
    eprintln!("info: flipped = {}", cert.flipped == Some(true));
    Ok(print_checks(&checks))
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
