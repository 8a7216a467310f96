use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use modvoa::liealg::{sl2_spec, StructureSpec};
use modvoa::suites::{run_suite, AlgebraChoice, Suite, SuiteConfig};
use modvoa::vacuum::{
    build_graded_module, ideal_filtration_dims, ideal_graded_span, raising_radical, IdealFamily, InducedModule,
};
use modvoa::zhu::{classify_irreducibles_u_sl2, omega_w_action_check, simple_top};
use modvoa::{Prime, Report, StructureConstants};

#[derive(Parser)]
#[command(name = "modvoa", version, about = "Exact checks for modular Virasoro and affine vertex algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite; exits 1 if any check fails.
    Verify(Opts),
    /// Graded dimensions of V, the p-center ideal, V^0, the raising radical J and L = V/J.
    Dims(Opts),
    /// List the irreducible modules of the p-center quotient.
    Classify(Opts),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AlgebraArg {
    Virasoro,
    Sl2,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
struct Opts {
    /// Characteristic of the base field, an odd prime.
    #[arg(long, default_value_t = 3)]
    p: u64,
    #[arg(long, value_enum, default_value_t = AlgebraArg::Virasoro)]
    algebra: AlgebraArg,
    /// Central charge (Virasoro).
    #[arg(long, allow_hyphen_values = true)]
    c: Option<i64>,
    /// Level (affine).
    #[arg(long, allow_hyphen_values = true)]
    level: Option<i64>,
    /// Parameter of the Virasoro p-center ideal.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<i64>,
    /// Character of the affine p-center ideal, as name=value pairs.
    #[arg(long, value_delimiter = ',')]
    chi: Vec<String>,
    #[arg(long, default_value_t = 9)]
    max_degree: usize,
    /// One of appendix, lucas, restricted, cmn, pcenter-field, zhu-vir,
    /// zhu-affine, c2, singular, axioms, all.
    #[arg(long)]
    suite: Option<Suite>,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// TOML structure constants for sl2 or a custom algebra.
    #[arg(long)]
    structure_file: Option<PathBuf>,
}

/// Validated options.
struct Config {
    p: Prime,
    algebra: AlgebraChoice,
    c: u32,
    level: u32,
    family: IdealFamily,
    max_degree: usize,
    seed: u64,
    output: Output,
    is_sl2: bool,
}

impl Config {
    fn suite_config(&self) -> SuiteConfig {
        SuiteConfig {
            p: self.p,
            algebra: self.algebra.clone(),
            c: self.c,
            level: self.level,
            max_degree: self.max_degree,
            seed: self.seed,
        }
    }

    fn params(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![("p", self.p.to_string())];
        match &self.algebra {
            AlgebraChoice::Virasoro => {
                v.push(("algebra", "virasoro".into()));
                v.push(("c", self.c.to_string()));
            }
            AlgebraChoice::Finite(sc) => {
                v.push(("algebra", if self.is_sl2 { "sl2".into() } else { sc.names().join(",") }));
                v.push(("level", self.level.to_string()));
            }
        }
        match &self.family {
            IdealFamily::Virasoro { mu } => v.push(("mu", mu.to_string())),
            IdealFamily::Affine { chi } => v.push(("chi", chi.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))),
        }
        v.push(("max-degree", self.max_degree.to_string()));
        v.push(("seed", self.seed.to_string()));
        v
    }
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, msg).exit()
}

fn load_spec(path: &PathBuf) -> Result<StructureSpec> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn configure(opts: &Opts, unchecked_structure: bool) -> Result<Config> {
    let p = Prime::new(opts.p).unwrap_or_else(|e| usage_error(format!("--p {}: {e}", opts.p)));
    let virasoro = opts.algebra == AlgebraArg::Virasoro;
    if virasoro {
        if !opts.chi.is_empty() {
            usage_error("--chi applies to sl2 and custom algebras, not virasoro");
        }
        if opts.level.is_some() {
            usage_error("--level applies to sl2 and custom algebras, not virasoro");
        }
        if opts.structure_file.is_some() {
            usage_error("--structure-file applies to sl2 and custom algebras, not virasoro");
        }
    } else {
        if opts.mu.is_some() {
            usage_error("--mu applies to the virasoro algebra only");
        }
        if opts.c.is_some() {
            usage_error("--c applies to the virasoro algebra only; use --level");
        }
    }
    if opts.algebra == AlgebraArg::Custom && opts.structure_file.is_none() {
        usage_error("--algebra custom requires --structure-file");
    }
    let spec = match &opts.structure_file {
        Some(path) => Some(load_spec(path)?),
        None if opts.algebra == AlgebraArg::Sl2 => Some(sl2_spec(opts.p)),
        None => None,
    };
    if let Some(s) = &spec {
        if s.p != opts.p {
            usage_error(format!("structure file is over F_{} but --p is {}", s.p, opts.p));
        }
    }
    let algebra = match &spec {
        None => AlgebraChoice::Virasoro,
        Some(s) => {
            let sc = if unchecked_structure {
                StructureConstants::from_spec_unchecked(s)?
            } else {
                StructureConstants::from_spec(s)?
            };
            AlgebraChoice::Finite(Arc::new(sc))
        }
    };
    let family = match &algebra {
        AlgebraChoice::Virasoro => IdealFamily::Virasoro { mu: p.reduce(opts.mu.unwrap_or(0)) },
        AlgebraChoice::Finite(sc) => {
            let mut chi = vec![0; sc.dim()];
            for item in &opts.chi {
                let (name, value) = item
                    .split_once('=')
                    .unwrap_or_else(|| usage_error(format!("--chi entry {item:?} is not of the form name=value")));
                let i = sc
                    .index_of(name.trim())
                    .unwrap_or_else(|| usage_error(format!("--chi: unknown basis element {name:?}")));
                let v: i64 = value.trim().parse().unwrap_or_else(|_| usage_error(format!("--chi: bad value {value:?}")));
                chi[i] = p.reduce(v);
            }
            IdealFamily::Affine { chi }
        }
    };
    let is_sl2 = matches!(&algebra, AlgebraChoice::Finite(sc) if **sc == StructureConstants::sl2(p));
    Ok(Config {
        p,
        c: p.reduce(opts.c.unwrap_or(0)),
        level: p.reduce(opts.level.unwrap_or(0)),
        algebra,
        family,
        max_degree: opts.max_degree,
        seed: opts.seed,
        output: opts.output,
        is_sl2,
    })
}

fn emit_json<T: Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn cmd_verify(opts: &Opts) -> Result<ExitCode> {
    let suite = opts.suite.unwrap_or(Suite::All);
    let cfg = configure(opts, matches!(suite, Suite::Restricted))?;
    if cfg.output == Output::Csv {
        usage_error("csv output is available for dims and classify; use text or json");
    }
    let reports = run_suite(suite, &cfg.suite_config()).unwrap_or_else(|e| usage_error(e));
    let mut merged = Report::merged(suite.name(), &reports);
    for (k, v) in cfg.params() {
        merged = merged.param(k, v);
    }
    match cfg.output {
        Output::Json => emit_json(&merged)?,
        _ => {
            let mut out = std::io::stdout().lock();
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            let verdict = if merged.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} {suite}: {} passed, {} failed", merged.summary.pass, merged.summary.fail)?;
        }
    }
    Ok(if merged.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

#[derive(Debug, Serialize)]
struct DimRow {
    degree: usize,
    #[serde(rename = "V")]
    v: usize,
    ideal: usize,
    #[serde(rename = "V0")]
    v0: usize,
    #[serde(rename = "J")]
    j: usize,
    #[serde(rename = "L")]
    l: usize,
}

#[derive(Debug, Serialize)]
struct DimsOutput {
    params: std::collections::BTreeMap<String, String>,
    /// Whether the ideal columns are cumulative dimensions of `I ∩ V_{≤d}`.
    filtered: bool,
    rows: Vec<DimRow>,
}

fn cmd_dims(opts: &Opts) -> Result<ExitCode> {
    if opts.suite.is_some() {
        usage_error("--suite applies to verify only");
    }
    let cfg = configure(opts, false)?;
    let n = cfg.max_degree;
    let m = match &cfg.algebra {
        AlgebraChoice::Virasoro => InducedModule::virasoro_vacuum(cfg.p, cfg.c, n),
        AlgebraChoice::Finite(sc) => InducedModule::affine_vacuum(sc.clone(), cfg.level, n),
    };
    let v = m.dims();
    let filtered = !cfg.family.is_graded();
    let (ideal, v0) = if filtered {
        let f = ideal_filtration_dims(&m, &cfg.family)?;
        let cumulative: Vec<usize> = v.iter().scan(0, |a, x| {
            *a += x;
            Some(*a)
        }).collect();
        let v0: Vec<usize> = cumulative.iter().zip(&f).map(|(a, b)| a - b).collect();
        (f, v0)
    } else {
        let i = ideal_graded_span(&m, &cfg.family)?.dims();
        let v0: Vec<usize> = v.iter().zip(&i).map(|(a, b)| a - b).collect();
        (i, v0)
    };
    let j = raising_radical(&m).dims();
    let rows: Vec<DimRow> = (0..=n)
        .map(|d| DimRow { degree: d, v: v[d], ideal: ideal[d], v0: v0[d], j: j[d], l: v[d] - j[d] })
        .collect();
    eprintln!("note: dimensions computed through degree {n}{}", if filtered {
        "; the ideal is not graded, so ideal and V0 columns are cumulative over degrees <= d"
    } else {
        ""
    });
    match cfg.output {
        Output::Json => emit_json(&DimsOutput {
            params: cfg.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            filtered,
            rows,
        })?,
        Output::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            for r in &rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Output::Text => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", "degree", "V", "ideal", "V0", "J", "L")?;
            for r in &rows {
                writeln!(out, "{:>6} {:>8} {:>8} {:>8} {:>8} {:>8}", r.degree, r.v, r.ideal, r.v0, r.j, r.l)?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Debug, Serialize)]
struct ModuleRow {
    module: String,
    top_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    h_spectrum: Option<Vec<u32>>,
    dims: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct ClassifyOutput {
    params: std::collections::BTreeMap<String, String>,
    modules: Vec<ModuleRow>,
    report: Report,
}

fn cmd_classify(opts: &Opts) -> Result<ExitCode> {
    if opts.suite.is_some() {
        usage_error("--suite applies to verify only");
    }
    let cfg = configure(opts, false)?;
    let p = cfg.p;
    let n = cfg.max_degree;
    let mut rows = Vec::new();
    let mut parts = Vec::new();
    match &cfg.algebra {
        AlgebraChoice::Virasoro => {
            for lambda in 0..p.get() {
                let w = InducedModule::virasoro_verma(p, cfg.c, lambda, n);
                let dims = build_graded_module(&w).dims();
                parts.push(omega_w_action_check(&w.with_max_degree(0), n.min(4)).param("lambda", lambda));
                rows.push(ModuleRow { module: format!("L_Vir({}, {lambda})", cfg.c), top_dim: 1, h_spectrum: None, dims });
            }
        }
        AlgebraChoice::Finite(sc) if cfg.is_sl2 => {
            let (mods, report) = classify_irreducibles_u_sl2(p);
            parts.push(report);
            for s in &mods {
                let top = simple_top(p, s);
                let w = InducedModule::affine_generalized_verma(sc.clone(), cfg.level, top, n)?;
                let dims = build_graded_module(&w).dims();
                parts.push(omega_w_action_check(&w.with_max_degree(0), n.min(2)).param("top", s.highest_weight));
                rows.push(ModuleRow {
                    module: format!("L({}, L({}))", cfg.level, s.highest_weight),
                    top_dim: s.dim,
                    h_spectrum: Some(s.h_spectrum.clone()),
                    dims,
                });
            }
        }
        AlgebraChoice::Finite(_) => usage_error("classify supports --algebra virasoro and sl2"),
    }
    let mut report = Report::merged("classify", &parts);
    for (k, v) in cfg.params() {
        report = report.param(k, v);
    }
    match cfg.output {
        Output::Json => emit_json(&ClassifyOutput {
            params: cfg.params().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            modules: rows,
            report: report.clone(),
        })?,
        Output::Csv => {
            let mut w = csv::Writer::from_writer(std::io::stdout().lock());
            let mut header = vec!["module".to_string(), "top_dim".to_string()];
            header.extend((0..=n).map(|d| format!("degree_{d}")));
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![r.module.clone(), r.top_dim.to_string()];
                rec.extend(r.dims.iter().map(|d| d.to_string()));
                w.write_record(&rec)?;
            }
            w.flush()?;
        }
        Output::Text => {
            let mut out = std::io::stdout().lock();
            writeln!(out, "{} irreducible modules (graded dimensions through degree {n})", rows.len())?;
            for r in &rows {
                let spectrum = r
                    .h_spectrum
                    .as_ref()
                    .map(|s| format!(" h-weights [{}]", s.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                    .unwrap_or_default();
                let dims = r.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",");
                writeln!(out, "  {}: top dim {}{spectrum}; dims ({dims})", r.module, r.top_dim)?;
            }
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} classify: {} passed, {} failed", report.summary.pass, report.summary.fail)?;
            for c in report.failures() {
                writeln!(out, "  FAIL {}: {}", c.name, c.witness.clone().unwrap_or_default())?;
            }
        }
    }
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Verify(o) => cmd_verify(o),
        Command::Dims(o) => cmd_dims(o),
        Command::Classify(o) => cmd_classify(o),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
