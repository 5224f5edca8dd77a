//! normlab: determinants, volumes, rotundity moduli and projection
//! diagnostics for finite-dimensional normed spaces, with reproducible
//! JSON/CSV artifacts.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use normlab_core::approximation::{
    default_delta_schedule, distance_to_set, ksch_diagnostic, near_projection_sample,
    SetDescriptor,
};
use normlab_core::determinant::{dk_determinant, subfamily_scan, DeterminantInput};
use normlab_core::presets::{cube_preset, kwuc_pair_preset, parse_space_arg, zoo};
use normlab_core::report::{csv_table, fmt_f64, CheckResult};
use normlab_core::rotundity::{
    classify_k_rotund, modulus_estimate, product_witness_build, quotient_modulus_sweep,
    FactorWitness, ModulusMode, ModulusQuery, SearchBudget,
};
use normlab_core::space::{Functional, NormDescriptor, PValue, Space};
use normlab_core::suites;
use normlab_core::volume::{diam_k, vk_volume, VolumeStrategy};
use normlab_core::Tolerances;

#[derive(Parser)]
#[command(
    name = "normlab",
    version,
    about = "Numerics laboratory for the geometry of finite-dimensional normed spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Space descriptor: inline JSON, `zoo:<name>`, or a shorthand such
    /// as `lp:2:3`, `sullivan:4:1,2`, `smith:3`, `hexagon`.
    #[arg(long)]
    space: Option<String>,
    /// Order parameter k.
    #[arg(long, default_value_t = 1)]
    k: usize,
    /// RNG seed; fixed seed implies byte-identical artifacts.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Tolerance overrides, `key=value`, repeatable.
    #[arg(long)]
    tol: Vec<String>,
}

impl CommonArgs {
    fn space(&self) -> Result<Space> {
        let arg = self
            .space
            .as_deref()
            .ok_or_else(|| anyhow!("--space is required for this command"))?;
        let descriptor = parse_space_arg(arg)?;
        Ok(Space::new(descriptor)?)
    }

    fn tolerances(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        for ov in &self.tol {
            let (key, value) = ov
                .split_once('=')
                .ok_or_else(|| anyhow!("tolerance override must be key=value, got `{ov}`"))?;
            let value: f64 = value.parse().context("tolerance value must be a number")?;
            t.apply_override(key, value).map_err(|e| anyhow!(e))?;
        }
        Ok(t)
    }

    fn emit<T: Serialize>(&self, payload: &T, csv: Option<String>) -> Result<()> {
        let body = match self.format {
            OutputFormat::Json => serde_json::to_string_pretty(payload)? + "\n",
            OutputFormat::Csv => csv.ok_or_else(|| {
                anyhow!("this command has no CSV representation; use --format json")
            })?,
        };
        match &self.out {
            Some(path) => fs::write(path, body).context("writing output file")?,
            None => print!("{body}"),
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate the bordered determinant D_k of points and functionals.
    Det {
        #[command(flatten)]
        common: CommonArgs,
        /// Points, inline JSON `[[..],..]` or `@file`.
        #[arg(long)]
        points: String,
        /// Functionals (coordinate arrays), inline JSON or `@file`.
        #[arg(long)]
        functionals: String,
        /// Also emit the full subfamily scan table.
        #[arg(long, default_value_t = false)]
        scan: bool,
    },
    /// k-dimensional volume of k+1 points.
    Volume {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        points: String,
        /// Strategy: auto, exact or iterative.
        #[arg(long, default_value = "auto")]
        mode: String,
    },
    /// k-dimensional diameter of a finite point set.
    Diam {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        points: String,
        #[arg(long, default_value = "auto")]
        mode: String,
    },
    /// Rotundity modulus estimate (modes kur, kwur, kwlur).
    Modulus {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "kur")]
        mode: String,
        /// Epsilon level(s), comma separated. Defaults to the scaled grid.
        #[arg(long)]
        eps: Option<String>,
        /// Functionals for the directional modes, inline JSON or `@file`.
        #[arg(long)]
        functionals: Option<String>,
        /// Anchor point for kwlur.
        #[arg(long)]
        anchor: Option<String>,
        /// Budget `multistarts,local_steps`.
        #[arg(long)]
        budget: Option<String>,
    },
    /// Search for a k-rotundity failure witness.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Volume floor a witness must clear.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long)]
        budget: Option<String>,
    },
    /// Distance to a set and near-projection sampling.
    Project {
        #[command(flatten)]
        common: CommonArgs,
        /// Target set descriptor (JSON or `@file`).
        #[arg(long)]
        set: String,
        /// Query point.
        #[arg(long)]
        point: String,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long, default_value_t = 24)]
        budget: usize,
    },
    /// Chebyshev-style decay diagnostics, including named presets.
    Diagnose {
        #[command(flatten)]
        common: CommonArgs,
        /// Named preset: `cube-3e1` or `pair-linf`.
        #[arg(long)]
        preset: Option<String>,
        /// General mode: target set descriptor.
        #[arg(long)]
        set: Option<String>,
        /// General mode: query point.
        #[arg(long)]
        point: Option<String>,
        /// General mode: functionals.
        #[arg(long)]
        functionals: Option<String>,
        #[arg(long, default_value_t = 24)]
        budget: usize,
    },
    /// Build and verify the l_p-product staircase witness.
    ProductWitness {
        #[command(flatten)]
        common: CommonArgs,
        /// JSON config: {"p": ..., "factors": [descriptors],
        /// "witnesses": [{"x": [..], "y": [..], "functional": [..]}]}
        #[arg(long)]
        config: String,
    },
    /// Directional modulus sweep over a family of quotient subspaces.
    QuotientSweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Functionals (coordinate arrays), inline JSON or `@file`.
        #[arg(long)]
        functionals: String,
        /// Family of subspace bases: JSON `[[[..],..],..]` or `@file`.
        #[arg(long)]
        subspaces: String,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long)]
        budget: Option<String>,
    },
    /// Run the verification suites and print a pass/fail table.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Suite name (spaces, determinant, volume, rotundity,
        /// approximation, acceptance).
        #[arg(long)]
        suite: Option<String>,
        /// Run every suite.
        #[arg(long, default_value_t = false)]
        all: bool,
    },
    /// List the built-in example spaces, or emit one descriptor.
    Zoo {
        #[command(flatten)]
        common: CommonArgs,
        /// Emit the descriptor JSON of one zoo entry.
        #[arg(long)]
        build: Option<String>,
    },
}

fn read_arg_payload(arg: &str) -> Result<String> {
    if let Some(path) = arg.strip_prefix('@') {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    } else {
        Ok(arg.to_string())
    }
}

fn parse_points(arg: &str) -> Result<Vec<Vec<f64>>> {
    let body = read_arg_payload(arg)?;
    serde_json::from_str(&body).context("points must be a JSON array of number arrays")
}

fn parse_point(arg: &str) -> Result<Vec<f64>> {
    let body = read_arg_payload(arg)?;
    serde_json::from_str(&body).context("point must be a JSON number array")
}

fn parse_functionals(space: &Space, arg: &str, unitize: bool) -> Result<Vec<Functional>> {
    let coords: Vec<Vec<f64>> = serde_json::from_str(&read_arg_payload(arg)?)
        .context("functionals must be a JSON array of coordinate arrays")?;
    coords
        .into_iter()
        .map(|c| {
            if unitize {
                Ok(space.unit_functional(&c)?)
            } else {
                Ok(space.functional(c)?)
            }
        })
        .collect()
}

fn parse_set(arg: &str) -> Result<SetDescriptor> {
    let body = read_arg_payload(arg)?;
    serde_json::from_str(&body).context("set must be a SetDescriptor JSON object")
}

fn parse_budget(arg: &Option<String>) -> Result<SearchBudget> {
    match arg {
        None => Ok(SearchBudget::default()),
        Some(s) => {
            let (a, b) = s
                .split_once(',')
                .ok_or_else(|| anyhow!("budget must be `multistarts,local_steps`"))?;
            Ok(SearchBudget {
                multistarts: a.trim().parse().context("bad multistart count")?,
                local_steps: b.trim().parse().context("bad step count")?,
            })
        }
    }
}

fn parse_strategy(mode: &str) -> Result<VolumeStrategy> {
    match mode {
        "auto" => Ok(VolumeStrategy::Auto),
        "exact" => Ok(VolumeStrategy::Exact),
        "iterative" => Ok(VolumeStrategy::Iterative),
        other => bail!("unknown volume strategy `{other}`"),
    }
}

/// Default eps grid {0.1, 0.25, 0.5, 1.0, 1.5} scaled by k! 2^k / 2 so it
/// covers the feasible determinant range uniformly at every order.
fn default_eps_grid(k: usize) -> Vec<f64> {
    let bound = (1..=k).product::<usize>() as f64 * 2f64.powi(k as i32);
    [0.1, 0.25, 0.5, 1.0, 1.5]
        .iter()
        .map(|r| r * bound / 2.0)
        .collect()
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match cli.command {
        Command::Det {
            common,
            points,
            functionals,
            scan,
        } => {
            let space = common.space()?;
            let points = parse_points(&points)?;
            let fs = parse_functionals(&space, &functionals, false)?;
            let input = DeterminantInput::new(&points, &fs)?;
            let value = dk_determinant(&input);
            let scan_result = if scan {
                Some(subfamily_scan(&points, &fs)?)
            } else {
                None
            };
            let csv = scan_result.as_ref().map(|s| s.to_csv());
            let payload = json!({
                "command": "det",
                "k": fs.len(),
                "value": value,
                "functionals": fs,
                "scan": scan_result,
            });
            common.emit(&payload, csv)?;
        }
        Command::Volume {
            common,
            points,
            mode,
        } => {
            let space = common.space()?;
            let points = parse_points(&points)?;
            let strategy = parse_strategy(&mode)?;
            let res = vk_volume(&space, &points, common.k, strategy, common.seed)?;
            let payload = json!({
                "command": "volume",
                "k": common.k,
                "value": res.value,
                "strategy": res.strategy,
                "lower_bound": res.lower_bound,
                "certificate": res.certificate,
            });
            common.emit(&payload, None)?;
        }
        Command::Diam {
            common,
            points,
            mode,
        } => {
            let space = common.space()?;
            let points = parse_points(&points)?;
            let strategy = parse_strategy(&mode)?;
            let res = diam_k(&space, &points, common.k, strategy, common.seed)?;
            let payload = json!({
                "command": "diam",
                "k": common.k,
                "value": res.value,
                "witness": res.witness,
                "exhaustive": res.exhaustive,
                "certificate": res.volume.certificate,
            });
            common.emit(&payload, None)?;
        }
        Command::Modulus {
            common,
            mode,
            eps,
            functionals,
            anchor,
            budget,
        } => {
            let space = common.space()?;
            let mode = match mode.as_str() {
                "kur" => ModulusMode::KUr,
                "kwur" => ModulusMode::KWur,
                "kwlur" => ModulusMode::KWlur,
                other => bail!("unknown modulus mode `{other}`"),
            };
            let grid: Vec<f64> = match &eps {
                Some(s) => s
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().context("bad eps value"))
                    .collect::<Result<_>>()?,
                None => default_eps_grid(common.k),
            };
            let fs = match &functionals {
                Some(arg) => parse_functionals(&space, arg, true)?,
                None => Vec::new(),
            };
            let anchor = anchor.as_deref().map(parse_point).transpose()?;
            let budget = parse_budget(&budget)?;
            let mut rows = Vec::new();
            let mut results = Vec::new();
            let mut warm: Vec<Vec<Vec<f64>>> = Vec::new();
            let mut grid_sorted = grid.clone();
            grid_sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            for &e in &grid_sorted {
                let mut q = ModulusQuery::new(mode, common.k, e);
                q.functionals = fs.clone();
                q.anchor = anchor.clone();
                q.budget = budget;
                q.seed = common.seed;
                q.warm_starts = warm.clone();
                let est = modulus_estimate(&space, &q)?;
                if !est.infeasible {
                    warm.push(est.witness.clone());
                }
                rows.push(vec![
                    fmt_f64(e),
                    format!("{mode:?}"),
                    fmt_f64(est.value),
                    est.converged.to_string(),
                ]);
                results.push(json!({"eps": e, "estimate": est}));
            }
            results.reverse();
            rows.reverse();
            let csv = csv_table("normlab modulus csv v1", &["eps", "mode", "value", "converged"], &rows);
            let payload = json!({
                "command": "modulus",
                "k": common.k,
                "mode": mode,
                "results": results,
            });
            common.emit(&payload, Some(csv))?;
        }
        Command::Classify {
            common,
            eps,
            budget,
        } => {
            let space = common.space()?;
            let budget = parse_budget(&budget)?;
            let verdict = classify_k_rotund(&space, common.k, eps, budget, common.seed)?;
            let payload = json!({
                "command": "classify",
                "k": common.k,
                "verdict": verdict,
            });
            common.emit(&payload, None)?;
        }
        Command::Project {
            common,
            set,
            point,
            delta,
            budget,
        } => {
            let space = common.space()?;
            let set = parse_set(&set)?;
            let x = parse_point(&point)?;
            let dist = distance_to_set(&space, &x, &set)?;
            let sample = near_projection_sample(&space, &x, &set, delta, budget, common.seed)?;
            let payload = json!({
                "command": "project",
                "distance": dist.distance,
                "nearest": dist.nearest,
                "delta": delta,
                "samples": sample.points,
            });
            common.emit(&payload, None)?;
        }
        Command::Diagnose {
            common,
            preset,
            set,
            point,
            functionals,
            budget,
        } => match preset.as_deref() {
            Some("cube-3e1") => {
                let preset = cube_preset(common.k, budget, common.seed)?;
                let csv = decay_csv(&preset.report.schedule, &preset.report.sup_det, &preset.report.diam);
                let payload = json!({
                    "command": "diagnose",
                    "preset": "cube-3e1",
                    "k": common.k,
                    "floor": preset.canonical_floor,
                    "canonical_points": preset.canonical_points,
                    "diam_lower_bound": preset.diam_lower_bound,
                    "report": preset.report,
                });
                common.emit(&payload, Some(csv))?;
            }
            Some("pair-linf") => {
                let preset = kwuc_pair_preset(common.k, 60)?;
                let payload = json!({
                    "command": "diagnose",
                    "preset": "pair-linf",
                    "k": common.k,
                    "expected_stall": preset.expected_stall,
                    "report": preset.report,
                });
                common.emit(&payload, None)?;
            }
            Some(other) => bail!("unknown preset `{other}` (available: cube-3e1, pair-linf)"),
            None => {
                let space = common.space()?;
                let set = parse_set(&set.ok_or_else(|| anyhow!("--set required"))?)?;
                let x = parse_point(&point.ok_or_else(|| anyhow!("--point required"))?)?;
                let fs = parse_functionals(
                    &space,
                    &functionals.ok_or_else(|| anyhow!("--functionals required"))?,
                    true,
                )?;
                let schedule = default_delta_schedule();
                let report = ksch_diagnostic(
                    &space, &set, &x, common.k, &fs, &schedule, budget, common.seed,
                )?;
                let csv = decay_csv(&report.schedule, &report.sup_det, &report.diam);
                let payload = json!({
                    "command": "diagnose",
                    "k": common.k,
                    "report": report,
                });
                common.emit(&payload, Some(csv))?;
            }
        },
        Command::ProductWitness { common, config } => {
            #[derive(serde::Deserialize)]
            struct RawWitness {
                x: Vec<f64>,
                y: Vec<f64>,
                functional: Vec<f64>,
            }
            #[derive(serde::Deserialize)]
            struct Config {
                p: PValue,
                factors: Vec<NormDescriptor>,
                witnesses: Vec<RawWitness>,
            }
            let cfg: Config = serde_json::from_str(&read_arg_payload(&config)?)
                .context("bad product-witness config")?;
            let factors: Vec<Space> = cfg
                .factors
                .iter()
                .map(|d| Ok(Space::new(d.clone())?))
                .collect::<Result<_>>()?;
            let witnesses: Vec<FactorWitness> = cfg
                .witnesses
                .iter()
                .zip(&factors)
                .map(|(w, s)| {
                    Ok(FactorWitness {
                        x: w.x.clone(),
                        y: w.y.clone(),
                        functional: s.unit_functional(&w.functional)?,
                    })
                })
                .collect::<Result<_>>()?;
            let res = product_witness_build(&factors, &witnesses, cfg.p)?;
            let payload = json!({
                "command": "product-witness",
                "result": res,
            });
            common.emit(&payload, None)?;
        }
        Command::QuotientSweep {
            common,
            functionals,
            subspaces,
            eps,
            budget,
        } => {
            let space = common.space()?;
            let fs = parse_functionals(&space, &functionals, true)?;
            let family: Vec<Vec<Vec<f64>>> =
                serde_json::from_str(&read_arg_payload(&subspaces)?)
                    .context("subspaces must be a JSON array of basis lists")?;
            let budget = parse_budget(&budget)?;
            let res = quotient_modulus_sweep(&space, &fs, &family, eps, budget, common.seed)?;
            let rows: Vec<Vec<String>> = res
                .entries
                .iter()
                .map(|e| {
                    vec![
                        fmt_f64(eps),
                        "kwur".into(),
                        fmt_f64(e.estimate.value),
                        e.estimate.converged.to_string(),
                    ]
                })
                .collect();
            let csv = csv_table("normlab sweep csv v1", &["eps", "mode", "value", "converged"], &rows);
            let payload = json!({
                "command": "quotient-sweep",
                "eps": eps,
                "result": res,
            });
            common.emit(&payload, Some(csv))?;
        }
        Command::Verify { common, suite, all } => {
            let _ = common.tolerances()?;
            let to_run: Vec<String> = if all {
                suites::suite_names().iter().map(|s| s.to_string()).collect()
            } else {
                vec![suite.ok_or_else(|| anyhow!("pass --suite <name> or --all"))?]
            };
            let mut any_fail = false;
            let mut suites_payload = Vec::new();
            for name in &to_run {
                let checks: Vec<CheckResult> = suites::run_suite(name, common.seed)?;
                println!("== suite {name} (seed {})", common.seed);
                for c in &checks {
                    let status = if c.pass { "PASS" } else { "FAIL" };
                    println!(
                        "  {status} {:<30} stat {:.3e} thr {:.3e}  {}",
                        c.name, c.statistic, c.threshold, c.detail
                    );
                    any_fail |= !c.pass;
                }
                suites_payload.push(json!({"suite": name, "checks": checks}));
            }
            let payload = json!({
                "command": "verify",
                "seed": common.seed,
                "suites": suites_payload,
            });
            if common.out.is_some() || common.format == OutputFormat::Csv {
                let rows: Vec<Vec<String>> = suites_payload
                    .iter()
                    .flat_map(|s| {
                        let suite = s["suite"].as_str().unwrap_or("").to_string();
                        s["checks"]
                            .as_array()
                            .cloned()
                            .unwrap_or_default()
                            .into_iter()
                            .map(move |c| {
                                vec![
                                    suite.clone(),
                                    c["name"].as_str().unwrap_or("").into(),
                                    c["pass"].to_string(),
                                    c["statistic"].to_string(),
                                ]
                            })
                    })
                    .collect();
                let csv = csv_table("normlab verify csv v1", &["suite", "check", "pass", "statistic"], &rows);
                common.emit(&payload, Some(csv))?;
            }
            if any_fail {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Zoo { common, build } => match build {
            Some(name) => {
                let d = normlab_core::presets::zoo_lookup(&name)
                    .ok_or_else(|| anyhow!("unknown zoo space `{name}`"))?;
                common.emit(&d, None)?;
            }
            None => {
                let entries = zoo();
                for z in &entries {
                    println!("{:<16} dim {:<2} {}", z.name, z.descriptor.dim(), z.blurb);
                }
                if common.out.is_some() {
                    common.emit(&entries, None)?;
                }
            }
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn decay_csv(schedule: &[f64], sup: &[f64], diam: &[f64]) -> String {
    let rows: Vec<Vec<String>> = schedule
        .iter()
        .zip(sup.iter().zip(diam))
        .map(|(d, (s, dm))| vec![fmt_f64(*d), fmt_f64(*s), fmt_f64(*dm)])
        .collect();
    csv_table("normlab decay csv v1", &["delta", "sup_det", "diam_k"], &rows)
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
