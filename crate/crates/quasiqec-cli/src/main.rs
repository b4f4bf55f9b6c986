//! Experiment runner: every acceptance experiment is reachable from a
//! subcommand, emits CSV or JSON, and is deterministic for a fixed
//! (config, seed) pair.
//!
//! Exit codes: 0 all in-run tolerances pass, 1 a tolerance failed,
//! 2 usage error.

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasiqec::linalg::MatrixJson;
use quasiqec::quasi::{self, Family, Metric, ScalingPoint};
use quasiqec::vbs::mps::build_code;
use quasiqec::vbs::recover::{
    average_recovery_distance, depolarizing_link, recover_logical, ErrorSpec,
};
use quasiqec::vbs::su::{chi, ground_energy, su_basis, transfer_spectrum};
use quasiqec::vbs::{decode, dense, gates};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "quasiqec", version, about = "quasi-exact QEC experiments")]
struct Cli {
    /// JSON config file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for every stochastic step; reported back in the output.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid-level parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Debug)]
#[serde(rename_all = "lowercase")]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand, Clone, Debug)]
enum Command {
    /// Operator-basis, transfer-spectrum, and energy checks.
    Algebra(AlgebraArgs),
    /// Build a code family: Gram data, encoding error, edge states,
    /// and the dense cross-check when the chain is small enough.
    Code(CommonArgs),
    /// Local-error recovery: location-averaged distances or one
    /// explicit error configuration.
    Recover(RecoverArgs),
    /// Exact binomial success curves and the quasithreshold pair.
    Threshold(ThresholdArgs),
    /// Strong/weak classification over a size grid.
    Classify(ClassifyArgs),
    /// Gate-cell partition statistics and the Euler recomposition test.
    Gatecell(GatecellArgs),
    /// Metric sweep over a (d, N, t) grid.
    Sweep(SweepArgs),
    /// The full acceptance suite.
    All,
}

#[derive(Args, Clone, Debug, Default)]
struct AlgebraArgs {
    #[arg(short)]
    d: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
struct CommonArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(short)]
    d: Option<usize>,
    #[arg(short = 'N', long = "sites")]
    n: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
struct RecoverArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(short)]
    t: Option<usize>,
    #[arg(short)]
    p: Option<f64>,
    /// Explicit error items, e.g. `bond:a=3,n=5,+` (repeatable).
    #[arg(long = "error")]
    errors: Vec<String>,
}

#[derive(Args, Clone, Debug, Default)]
struct ThresholdArgs {
    #[arg(short)]
    d: Option<usize>,
    #[arg(short = 'N', long = "sites")]
    n: Option<usize>,
    #[arg(short)]
    t: Option<usize>,
    /// Physical rate grid, comma separated.
    #[arg(short, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    mc_samples: Option<u64>,
    /// Also run the transversal-flip decoder Monte Carlo at each p.
    #[arg(long)]
    decoder: bool,
}

#[derive(Args, Clone, Debug, Default)]
struct ClassifyArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long)]
    window: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
struct GatecellArgs {
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
}

#[derive(Args, Clone, Debug, Default)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    metric: Option<String>,
    /// Sizes to sweep, comma separated (overrides -N).
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(short)]
    t: Option<usize>,
    #[arg(short)]
    p: Option<f64>,
}

/// File-backed configuration; unknown keys are rejected.
#[derive(Deserialize, Default, Debug)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default)]
    command: Option<String>,
    #[serde(default)]
    seed: Option<u64>,
    #[serde(default)]
    jobs: Option<usize>,
    #[serde(default)]
    format: Option<OutputFormat>,
    #[serde(default)]
    out: Option<PathBuf>,
    #[serde(default)]
    family: Option<String>,
    #[serde(default)]
    d: Option<usize>,
    #[serde(default, rename = "N")]
    n: Option<usize>,
    #[serde(default)]
    t: Option<usize>,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    p_grid: Option<Vec<f64>>,
    #[serde(default)]
    n_grid: Option<Vec<usize>>,
    #[serde(default)]
    window: Option<usize>,
    #[serde(default)]
    eta: Option<f64>,
    #[serde(default)]
    samples: Option<usize>,
    #[serde(default)]
    mc_samples: Option<u64>,
    #[serde(default)]
    metric: Option<String>,
    #[serde(default)]
    errors: Option<Vec<String>>,
}

fn fail_usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config: ConfigFile = match &cli.config {
        None => ConfigFile::default(),
        Some(path) => match std::fs::read_to_string(path) {
            Err(e) => return fail_usage(&format!("cannot read config {}: {e}", path.display())),
            Ok(text) => match serde_json::from_str(&text) {
                Err(e) => return fail_usage(&format!("invalid config: {e}")),
                Ok(cfg) => cfg,
            },
        },
    };

    let jobs = cli.jobs.or(config.jobs);
    if let Some(j) = jobs {
        if rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    let seed = cli.seed.or(config.seed).unwrap_or(1);
    let format = cli.format.or(config.format).unwrap_or(OutputFormat::Csv);
    let out_path = cli.out.clone().or_else(|| config.out.clone());

    let command = match cli.command.clone() {
        Some(c) => c,
        None => match config.command.as_deref() {
            Some("algebra") => Command::Algebra(AlgebraArgs::default()),
            Some("code") => Command::Code(CommonArgs::default()),
            Some("recover") => Command::Recover(RecoverArgs::default()),
            Some("threshold") => Command::Threshold(ThresholdArgs::default()),
            Some("classify") => Command::Classify(ClassifyArgs::default()),
            Some("gatecell") => Command::Gatecell(GatecellArgs::default()),
            Some("sweep") => Command::Sweep(SweepArgs::default()),
            Some("all") => Command::All,
            _ => return fail_usage("no subcommand given (flag or config `command`)"),
        },
    };

    match run(command, &config, seed, format) {
        Err(e) => fail_usage(&e.to_string()),
        Ok((text, ok)) => {
            let emit = match out_path {
                None => {
                    print!("{text}");
                    Ok(())
                }
                Some(p) => std::fs::write(&p, &text),
            };
            if let Err(e) = emit {
                return fail_usage(&format!("cannot write output: {e}"));
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
    }
}

type RunResult = Result<(String, bool), Box<dyn std::error::Error>>;

fn run(command: Command, config: &ConfigFile, seed: u64, format: OutputFormat) -> RunResult {
    match command {
        Command::Algebra(args) => algebra(args.d.or(config.d).unwrap_or(2), format),
        Command::Code(args) => code_report(
            Family::parse(
                args.family
                    .as_deref()
                    .or(config.family.as_deref())
                    .unwrap_or("holographic"),
            )?,
            args.d.or(config.d).unwrap_or(2),
            args.n.or(config.n).unwrap_or(10),
            format,
        ),
        Command::Recover(args) => recover(
            Family::parse(
                args.common
                    .family
                    .as_deref()
                    .or(config.family.as_deref())
                    .unwrap_or("holographic"),
            )?,
            args.common.d.or(config.d).unwrap_or(2),
            args.common.n.or(config.n).unwrap_or(10),
            args.t.or(config.t).unwrap_or(1),
            args.p.or(config.p).unwrap_or(0.3),
            if args.errors.is_empty() {
                config.errors.clone().unwrap_or_default()
            } else {
                args.errors
            },
            seed,
            format,
        ),
        Command::Threshold(args) => threshold(
            args.d.or(config.d).unwrap_or(2),
            args.n.or(config.n).unwrap_or(100),
            args.t.or(config.t).unwrap_or(1),
            if args.p.is_empty() {
                config
                    .p_grid
                    .clone()
                    .or_else(|| config.p.map(|p| vec![p]))
                    .unwrap_or_else(|| vec![0.01, 0.05, 0.1])
            } else {
                args.p
            },
            args.mc_samples.or(config.mc_samples),
            args.decoder,
            seed,
            format,
        ),
        Command::Classify(args) => classify(
            Family::parse(
                args.family
                    .as_deref()
                    .or(config.family.as_deref())
                    .unwrap_or("edge"),
            )?,
            if args.n_grid.is_empty() {
                config.n_grid.clone().unwrap_or_else(|| vec![8, 10, 12])
            } else {
                args.n_grid
            },
            args.window.or(config.window).unwrap_or(2),
            format,
        ),
        Command::Gatecell(args) => gatecell_report(
            args.eta.or(config.eta).unwrap_or(0.3),
            args.samples.or(config.samples).unwrap_or(1000),
            seed,
            format,
        ),
        Command::Sweep(args) => sweep_cmd(
            Family::parse(
                args.common
                    .family
                    .as_deref()
                    .or(config.family.as_deref())
                    .unwrap_or("holographic"),
            )?,
            Metric::parse(
                args.metric
                    .as_deref()
                    .or(config.metric.as_deref())
                    .unwrap_or("recovery_Dt"),
            )?,
            args.common.d.or(config.d).unwrap_or(2),
            if args.n_grid.is_empty() {
                config
                    .n_grid
                    .clone()
                    .unwrap_or_else(|| vec![args.common.n.or(config.n).unwrap_or(10)])
            } else {
                args.n_grid
            },
            args.t.or(config.t),
            args.p.or(config.p),
            format,
        ),
        Command::All => all_cmd(format),
    }
}

#[derive(Serialize)]
struct CheckRow {
    quantity: String,
    analytic: f64,
    computed: f64,
    abs_err: f64,
    pass: bool,
}

fn rows_output<T: Serialize>(
    format: OutputFormat,
    header: &str,
    to_csv_row: impl Fn(&T) -> String,
    rows: &[T],
) -> String {
    match format {
        OutputFormat::Json => {
            format!("{}\n", serde_json::json!({"schema": 1, "rows": rows}))
        }
        OutputFormat::Csv => {
            let mut s = format!("{header}\n");
            for r in rows {
                s.push_str(&to_csv_row(r));
                s.push('\n');
            }
            s
        }
    }
}

fn check_rows_output(format: OutputFormat, rows: Vec<CheckRow>) -> (String, bool) {
    let ok = rows.iter().all(|r| r.pass);
    let text = rows_output(
        format,
        "quantity,analytic,computed,abs_err,pass",
        |r: &CheckRow| {
            format!(
                "{},{:e},{:e},{:e},{}",
                r.quantity, r.analytic, r.computed, r.abs_err, r.pass
            )
        },
        &rows,
    );
    (text, ok)
}

fn algebra(d: usize, format: OutputFormat) -> RunResult {
    let su = su_basis(d)?;
    let ts = transfer_spectrum(d)?;
    let mut rows = Vec::new();
    let mut push = |name: &str, analytic: f64, computed: f64, tol: f64| {
        rows.push(CheckRow {
            quantity: name.to_string(),
            analytic,
            computed,
            abs_err: (analytic - computed).abs(),
            pass: (analytic - computed).abs() <= tol,
        });
    };
    let mut worst = 0.0_f64;
    for a in 0..su.dim_adjoint {
        for b in 0..su.dim_adjoint {
            let tr = quasiqec::linalg::trace(&(&su.t[a] * &su.t[b]));
            let want = if a == b { 0.5 } else { 0.0 };
            worst = worst.max((tr.re - want).abs()).max(tr.im.abs());
        }
    }
    push("trace_normalization_defect", 0.0, worst, 1e-10);
    let want = su.dim_adjoint as f64 / (2.0 * d as f64);
    push(
        "casimir_defect",
        0.0,
        quasiqec::linalg::max_abs(
            &(su.casimir() - quasiqec::linalg::identity(d) * quasiqec::linalg::cr(want)),
        ),
        1e-12,
    );
    push("transfer_mu0", ts.mu0, ts.eigenvalues[0], 1e-12);
    push("transfer_mu1", ts.mu1, ts.eigenvalues[d * d - 1], 1e-12);
    let (eh, eh2) = ground_energy(d);
    let n = 32;
    let mut h_val = 0.0;
    let mut h2_val = 0.0;
    for a in 0..su.dim_adjoint {
        h_val += quasiqec::vbs::mps::ring_expectation(
            d,
            n,
            &[(5, su.adjoint[a].clone()), (6, su.adjoint[a].clone())],
        )?
        .re;
        for b in 0..su.dim_adjoint {
            let ab = &su.adjoint[a] * &su.adjoint[b];
            h2_val += quasiqec::vbs::mps::ring_expectation(d, n, &[(5, ab.clone()), (6, ab)])?.re;
        }
    }
    push("energy_h", eh, h_val, 1e-9);
    push("energy_h2", eh2, h2_val, 1e-9);
    Ok(check_rows_output(format, rows))
}

fn code_report(family: Family, d: usize, n: usize, format: OutputFormat) -> RunResult {
    let code = build_code(d, n, family.boundary())?;
    let gram = MatrixJson::from(code.gram());
    let encoding_error = quasi::code_encoding_error(&code);
    let mut edge_rows = Vec::new();
    if family == Family::VbsHolographic {
        for site in [1usize, n / 2 + 1, n + 1] {
            let rep = code.edge_state(0, site)?;
            let dev = quasiqec::linalg::max_abs(
                &(&rep.sigma
                    - quasiqec::linalg::identity(d) * quasiqec::linalg::cr(1.0 / d as f64)),
            );
            edge_rows.push(serde_json::json!({"site": site, "distance_to_mixed": dev}));
        }
    }
    let dense_check = if (d * d - 1).pow(n as u32) <= 400_000 && n >= 3 {
        let rep = dense::ed_cross_check(d, n)?;
        Some(serde_json::json!({
            "degeneracy": rep.degeneracy,
            "frustration_residual": rep.per_term_residual,
            "codeword_fidelities": rep.codeword_fidelities,
            "energy_h": rep.energy.0,
            "energy_h_analytic": rep.energy_analytic.0,
        }))
    } else {
        None
    };
    let flip = if family == Family::VbsBulk {
        let rep = gates::bulk_logical_x(&code)?;
        Some(serde_json::json!({"fidelity": rep.fidelity, "tensor_defect": rep.tensor_defect}))
    } else {
        None
    };
    let doc = serde_json::json!({
        "schema": 1,
        "family": family,
        "d": d,
        "N": n,
        "gram": gram,
        "encoding_error": encoding_error,
        "chi": chi(d),
        "edge_states": edge_rows,
        "dense_cross_check": dense_check,
        "transversal_flip": flip,
    });
    let text = match format {
        OutputFormat::Json => format!("{doc}\n"),
        OutputFormat::Csv => {
            let mut s = String::from("quantity,value\n");
            s.push_str(&format!("encoding_error,{encoding_error:e}\n"));
            s.push_str(&format!("chi,{:e}\n", chi(d)));
            if let Some(dc) = &dense_check {
                s.push_str(&format!("ground_degeneracy,{}\n", dc["degeneracy"]));
            }
            s
        }
    };
    Ok((text, true))
}

#[allow(clippy::too_many_arguments)]
fn recover(
    family: Family,
    d: usize,
    n: usize,
    t: usize,
    p: f64,
    errors: Vec<String>,
    seed: u64,
    format: OutputFormat,
) -> RunResult {
    let code = build_code(d, n, family.boundary())?;
    if !errors.is_empty() {
        let spec = ErrorSpec::parse(&errors)?;
        let links_idx = spec.bond_links()?;
        let links: Vec<_> = links_idx
            .iter()
            .map(|&b| depolarizing_link(&code, b, p))
            .collect();
        let m = code.num_codewords();
        let mut sigma = quasiqec::linalg::zeros(m, m);
        sigma[(0, 0)] = quasiqec::linalg::cr(1.0);
        let rec = recover_logical(&code, &links, &sigma)?;
        let doc = serde_json::json!({
            "schema": 1,
            "family": family, "d": d, "N": n, "p": p,
            "links": links_idx,
            "sigma_f": MatrixJson::from(&rec.sigma_f),
            "trace": rec.trace,
            "d_t": rec.d_t,
            "d_t_analytic": rec.d_t_analytic,
            "seed": seed,
        });
        let text = match format {
            OutputFormat::Json => format!("{doc}\n"),
            OutputFormat::Csv => format!(
                "d,N,t,p,quantity,value,analytic,rel_err,seed\n{},{},{},{:e},recover_Dt,{:e},{:e},{:e},{}\n",
                d,
                n,
                links_idx.len(),
                p,
                rec.d_t,
                rec.d_t_analytic,
                (rec.d_t - rec.d_t_analytic).abs() / rec.d_t_analytic.max(1e-300),
                seed
            ),
        };
        return Ok((text, true));
    }
    let rep = average_recovery_distance(&code, t, p)?;
    let pass = rep.rel_discrepancy <= if t == 1 { 0.05 } else { 0.10 };
    let text = match format {
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::json!({
                "schema": 1, "family": family, "report": rep, "seed": seed, "pass": pass
            })
        ),
        OutputFormat::Csv => format!(
            "d,N,t,p,quantity,value,analytic,rel_err,seed\n{},{},{},{:e},recovery_Dt,{:e},{:e},{:e},{}\n",
            d, n, t, p, rep.exact_average, rep.law_value, rep.rel_discrepancy, seed
        ),
    };
    Ok((text, pass))
}

#[allow(clippy::too_many_arguments)]
fn threshold(
    d: usize,
    n: usize,
    t: usize,
    p_grid: Vec<f64>,
    mc_samples: Option<u64>,
    decoder: bool,
    seed: u64,
    format: OutputFormat,
) -> RunResult {
    let rep = quasi::threshold_report(n, d, t, &p_grid, mc_samples.map(|s| (s, seed)))?;
    let mut ok = true;
    if mc_samples.is_some() {
        for row in &rep.rows {
            let err = (row.mc_estimate.unwrap() - row.success).abs();
            ok &= err <= 3.0 * row.mc_std_error.unwrap().max(1e-5);
        }
    }
    let decoder_rows: Vec<decode::DecoderMonteCarlo> = if decoder {
        p_grid
            .iter()
            .map(|&p| decode::decoder_monte_carlo(n, p, mc_samples.unwrap_or(100_000), seed))
            .collect::<quasiqec::Result<_>>()?
    } else {
        Vec::new()
    };
    let text = match format {
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::json!({"threshold": rep, "decoder": decoder_rows, "pass": ok})
        ),
        OutputFormat::Csv => {
            let mut s = String::from(
                "p,success,mc_estimate,mc_std_error,eps_p_star,eps_l_star,samples,seed\n",
            );
            for row in &rep.rows {
                s.push_str(&format!(
                    "{:e},{:e},{},{},{:e},{:e},{},{}\n",
                    row.p,
                    row.success,
                    row.mc_estimate.map(|x| format!("{x:e}")).unwrap_or_default(),
                    row.mc_std_error
                        .map(|x| format!("{x:e}"))
                        .unwrap_or_default(),
                    rep.eps_p_star,
                    rep.eps_l_star,
                    rep.mc_samples.map(|x| x.to_string()).unwrap_or_default(),
                    rep.seed.map(|x| x.to_string()).unwrap_or_default(),
                ));
            }
            for row in &decoder_rows {
                s.push_str(&format!(
                    "decoder_failure:{:e},{:e},,{:e},,,{},{}\n",
                    row.p, row.failure_rate, row.std_error, row.samples, row.seed
                ));
            }
            s
        }
    };
    Ok((text, ok))
}

fn classify(family: Family, n_grid: Vec<usize>, window: usize, format: OutputFormat) -> RunResult {
    let rep = quasi::classify(family, &n_grid, window)?;
    let ok = rep
        .rows
        .iter()
        .all(|r| r.weak_metric <= r.strong_metric + 1e-12);
    let text = match format {
        OutputFormat::Json => {
            format!("{}\n", serde_json::json!({"classification": rep, "pass": ok}))
        }
        OutputFormat::Csv => {
            let mut s = String::from("N,window,strong_metric,weak_metric\n");
            for r in &rep.rows {
                s.push_str(&format!(
                    "{},{},{:e},{:e}\n",
                    r.n_sites, r.window, r.strong_metric, r.weak_metric
                ));
            }
            s.push_str(&format!("# weak={} decay={:?}\n", rep.weak, rep.decay));
            s
        }
    };
    Ok((text, ok))
}

fn gatecell_report(eta: f64, samples: usize, seed: u64, format: OutputFormat) -> RunResult {
    use quasiqec::gatecell::*;
    let u1 = u1_partition(eta)?;
    let su2 = su2_partition(eta)?;
    let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let u = quasiqec::channels::random_unitary(2, &mut rng);
        let su_mat = &u / u.determinant().powf(0.5);
        let (t1, t2, t3) = euler_decompose(&su_mat)?;
        worst = worst.max(projective_distance(&su_mat, &euler_recompose(t1, t2, t3)));
    }
    let ok = worst <= 1e-9;
    let doc = serde_json::json!({
        "schema": 1,
        "eta": eta,
        "u1_segments": u1.segments,
        "su2_cube_side": su2.cube_side,
        "euler_samples": samples,
        "euler_max_recomposition_error": worst,
        "seed": seed,
        "pass": ok,
    });
    let text = match format {
        OutputFormat::Json => format!("{doc}\n"),
        OutputFormat::Csv => format!(
            "quantity,value\nu1_segments,{}\nsu2_cube_side,{:e}\neuler_max_recomposition_error,{:e}\nseed,{}\n",
            u1.segments, su2.cube_side, worst, seed
        ),
    };
    Ok((text, ok))
}

fn sweep_cmd(
    family: Family,
    metric: Metric,
    d: usize,
    n_grid: Vec<usize>,
    t: Option<usize>,
    p: Option<f64>,
    format: OutputFormat,
) -> RunResult {
    let grid: Vec<ScalingPoint> = n_grid
        .iter()
        .map(|&n| ScalingPoint { d, n, t, p })
        .collect();
    let rep = quasi::sweep(family, &grid, metric)?;
    let text = match format {
        OutputFormat::Json => format!("{}\n", serde_json::json!(rep)),
        OutputFormat::Csv => rep.to_csv(),
    };
    Ok((text, true))
}

fn all_cmd(format: OutputFormat) -> RunResult {
    let results = quasiqec::acceptance::run_all();
    let ok = results.iter().all(|r| r.passed);
    let text = match format {
        OutputFormat::Json => format!(
            "{}\n",
            serde_json::json!({"criteria": results, "pass": ok})
        ),
        OutputFormat::Csv => {
            let mut s = String::new();
            for r in &results {
                s.push_str(&format!(
                    "criterion {:2} [{}] {}{}{}\n",
                    r.id,
                    if r.passed { "pass" } else { "FAIL" },
                    r.name,
                    if r.details.is_empty() { "" } else { " :: " },
                    r.details
                ));
            }
            s.push_str(&format!(
                "{}/{} criteria passed\n",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            ));
            s
        }
    };
    Ok((text, ok))
}
