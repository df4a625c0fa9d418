//! The `fejer` command line.
//!
//! Exit codes: 0 success, 1 a verify experiment failed, 2 bad flags,
//! parameters, resolutions or files.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fejer_core::kernels::{dirichlet, fejer, fejer_closed_2pow_paley};
use fejer_core::limits::{set_cap, ABSOLUTE_MAX_RESOLUTION};
use fejer_core::operators::{fejer_mean, maximal_fejer};
use fejer_core::spaces::{hardy_norm, lp_quasinorm, make_atom, weak_lp};
use fejer_core::systems::{kaczmarz_to_paley, paley_sign};
use fejer_core::transform::{fourier_coeffs, inverse};
use fejer_core::{Backend, Convention, Exponent, GridFn, Resolution, SystemId, WeightSpec};

use crate::config::{Provenance, RunConfig};
use crate::error::{LabError, LabResult};
use crate::io::{self, AnyCoeffs, AnyGrid, Format};
use crate::report::Status;
use crate::verify::{
    parse_conventions, parse_range, Experiment, Harness, Lemma2Params, Lemma3Params, Lemma4Params, Lemma5Params,
    Thm1Params, Thm2Params,
};

pub const FLOAT_CAP_ENV: &str = "FEJER_FLOAT_RES_CAP";
pub const EXACT_CAP_ENV: &str = "FEJER_EXACT_RES_CAP";

#[derive(Debug, Parser)]
#[command(name = "fejer", version, about = "Walsh-Paley and Walsh-Kaczmarz Fejér analysis on the dyadic group")]
pub struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fejér (or Dirichlet) kernel as an exact grid
    Kernel(KernelArgs),
    /// Walsh coefficients of a grid, or the inverse
    Transform(TransformArgs),
    /// Fejér mean sigma_n f
    Mean(MeanArgs),
    /// Weighted maximal Fejér operator
    Maximal(MaximalArgs),
    /// L_p, weak L_p or H_p quasinorm of a grid
    Norm(NormArgs),
    /// A seeded p-atom
    Atom(AtomArgs),
    /// Index and sign tables
    #[command(subcommand)]
    Systems(SystemsCommand),
    /// Run a verification experiment
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliSystem {
    Paley,
    Kaczmarz,
}

impl From<CliSystem> for SystemId {
    fn from(s: CliSystem) -> Self {
        match s {
            CliSystem::Paley => SystemId::Paley,
            CliSystem::Kaczmarz => SystemId::Kaczmarz,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliConvention {
    ZeroBased,
    OneBased,
}

impl From<CliConvention> for Convention {
    fn from(c: CliConvention) -> Self {
        match c {
            CliConvention::ZeroBased => Convention::ZeroBased,
            CliConvention::OneBased => Convention::OneBased,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliFormat {
    Json,
    Csv,
}

impl From<CliFormat> for Format {
    fn from(f: CliFormat) -> Self {
        match f {
            CliFormat::Json => Format::Json,
            CliFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out, else json
    #[arg(long, value_enum)]
    pub format: Option<CliFormat>,
}

impl OutputArgs {
    fn format(&self) -> Format {
        match (self.format, &self.out) {
            (Some(f), _) => f.into(),
            (None, Some(p)) => Format::from_path(p),
            (None, None) => Format::Json,
        }
    }
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    #[arg(long, value_enum, default_value = "paley")]
    pub system: CliSystem,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub resolution: u32,
    #[arg(long, value_enum, default_value = "zero-based")]
    pub convention: CliConvention,
    /// Evaluate the piecewise closed form (Paley, n a power of two)
    #[arg(long)]
    pub closed_form: bool,
    /// Emit the Dirichlet kernel D_n instead
    #[arg(long, conflicts_with = "closed_form")]
    pub dirichlet: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "paley")]
    pub system: CliSystem,
    /// Read coefficients and synthesize the grid
    #[arg(long)]
    pub inverse: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MeanArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "kaczmarz")]
    pub system: CliSystem,
    #[arg(long)]
    pub n: u64,
    #[arg(long, value_enum, default_value = "zero-based")]
    pub convention: CliConvention,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CliWeight {
    Unit,
    Log2sq,
    Power,
}

#[derive(Debug, Args)]
pub struct MaximalArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "kaczmarz")]
    pub system: CliSystem,
    #[arg(long, value_enum, default_value = "unit")]
    pub weight: CliWeight,
    /// Exponent for the power weight (n+1)^(1/p-2), 0 < p < 1/2
    #[arg(long)]
    pub p: Option<String>,
    /// Largest n in the supremum; defaults to 2^M
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long, value_enum, default_value = "zero-based")]
    pub convention: CliConvention,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormKind {
    Lp,
    Weak,
    Hardy,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub kind: NormKind,
    #[arg(long)]
    pub p: f64,
    /// Write a JSON record here instead of printing the value
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AtomArgs {
    /// Level N of the support I_N
    #[arg(long = "N")]
    pub level: u32,
    #[arg(long)]
    pub p: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Defaults to N + 1
    #[arg(long)]
    pub resolution: Option<u32>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Subcommand)]
pub enum SystemsCommand {
    /// map(n) and the sign tables of w_n and kappa_n, long format CSV
    Table(TableArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Rows for 0 <= n < n_max
    #[arg(long)]
    pub n_max: u64,
    #[arg(long)]
    pub resolution: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentId {
    Lemma2,
    Lemma3,
    Lemma4,
    Lemma5,
    Thm1,
    Thm2,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub experiment: ExperimentId,
    /// Exponent(s): thm1 takes a comma list, thm2 a single value
    #[arg(long)]
    pub p: Option<String>,
    /// thm2: m values, e.g. 1..4
    #[arg(long)]
    pub m_range: Option<String>,
    /// lemma2, lemma5: A values, e.g. 1..10; lemma3: the A values to run
    #[arg(long)]
    pub a_range: Option<String>,
    /// lemma3, thm1: level(s) N
    #[arg(long)]
    pub levels: Option<String>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub resolution: Option<u32>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// both, zero-based or one-based
    #[arg(long)]
    pub convention: Option<String>,
    /// thm2: unit, log2sq or power:<p>
    #[arg(long)]
    pub weight: Option<String>,
    /// thm1: M = max N + headroom
    #[arg(long)]
    pub headroom: Option<u32>,
    /// thm1: random bounded functions for the L_inf constant
    #[arg(long)]
    pub samples: Option<u64>,
    /// thm1: allowed growth factor of the sweep statistic
    #[arg(long)]
    pub growth_tol: Option<f64>,
    /// Corrupt one input so a working harness reports fail
    #[arg(long)]
    pub self_test: bool,
    /// Record wall time (the report is then not byte-reproducible)
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn apply_env_caps() -> LabResult<()> {
    for (var, backend) in [(FLOAT_CAP_ENV, Backend::Float), (EXACT_CAP_ENV, Backend::Exact)] {
        if let Ok(v) = std::env::var(var) {
            let cap: u32 = v
                .trim()
                .parse()
                .map_err(|_| LabError::format(format!("{var}={v} is not a resolution")))?;
            if cap > ABSOLUTE_MAX_RESOLUTION {
                return Err(LabError::format(format!("{var}={cap} exceeds {ABSOLUTE_MAX_RESOLUTION}")));
            }
            set_cap(backend, cap);
        }
    }
    Ok(())
}

pub fn execute(cli: Cli) -> LabResult<i32> {
    apply_env_caps()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(LabError::format("--jobs must be at least 1"));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool
        .build()
        .map_err(|e| LabError::format(format!("thread pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Kernel(a) => kernel(a),
        Command::Transform(a) => transform(a),
        Command::Mean(a) => mean(a),
        Command::Maximal(a) => maximal(a),
        Command::Norm(a) => norm(a),
        Command::Atom(a) => atom(a),
        Command::Systems(SystemsCommand::Table(a)) => table(a),
        Command::Verify(a) => verify(a),
    })
}

fn emit(out: &Option<PathBuf>, text: &str) -> LabResult<()> {
    match out {
        Some(path) => io::write_string(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_grid(grid: &AnyGrid, config: RunConfig, output: &OutputArgs) -> LabResult<()> {
    let text = io::render_grid(grid, &Provenance::new(config), output.format())?;
    emit(&output.out, &text)
}

fn input_param(path: &Path) -> String {
    path.display().to_string()
}

fn kernel(a: KernelArgs) -> LabResult<i32> {
    let system = SystemId::from(a.system);
    let convention = Convention::from(a.convention);
    let res = Resolution::new(a.resolution)?;
    let mut config = RunConfig::new("kernel", a.output.format().as_str());
    config.resolution = Some(a.resolution);
    config.system = Some(system.as_str().into());
    config.convention = Some(convention.as_str().into());
    config = config.param("n", a.n);

    let grid = if a.dirichlet {
        config = config.param("kind", "dirichlet");
        dirichlet(system, a.n, res)?.to_exact()
    } else if a.closed_form {
        config = config.param("kind", "fejer-closed-form");
        if system != SystemId::Paley || !a.n.is_power_of_two() {
            return Err(LabError::format("--closed-form needs --system paley and n a power of two"));
        }
        let exp = a.n.trailing_zeros();
        GridFn::new(
            res,
            (0..res.cells())
                .map(|z| fejer_closed_2pow_paley(exp, z, res, convention))
                .collect::<fejer_core::Result<Vec<_>>>()?,
        )?
    } else {
        config = config.param("kind", "fejer");
        fejer(system, a.n, res, convention)?.to_exact()
    };
    let summary = format!(
        "kernel {} n={} M={}: value at 0 = {}",
        system.as_str(),
        a.n,
        a.resolution,
        grid.values()[0]
    );
    emit_grid(&AnyGrid::Exact(grid), config, &a.output)?;
    eprintln!("{summary}");
    Ok(0)
}

fn transform(a: TransformArgs) -> LabResult<i32> {
    let system = SystemId::from(a.system);
    let mut config = RunConfig::new("transform", "json");
    config.system = Some(system.as_str().into());
    config = config.param("in", input_param(&a.input)).param("inverse", a.inverse);
    if a.output.format() == Format::Csv && !a.inverse {
        return Err(LabError::format("coefficient vectors are written as JSON only"));
    }
    if a.inverse {
        config.format = a.output.format().as_str().into();
        let grid = match io::read_coeffs(&a.input)? {
            AnyCoeffs::Exact(c) => AnyGrid::Exact(inverse(&c)),
            AnyCoeffs::Float(c) => AnyGrid::Float(inverse(&c)),
        };
        config.resolution = Some(grid.resolution().bits());
        emit_grid(&grid, config, &a.output)?;
        eprintln!("transform: synthesized a grid at M={}", grid.resolution().bits());
        return Ok(0);
    }
    let grid = io::read_grid(&a.input)?;
    config.resolution = Some(grid.resolution().bits());
    let coeffs = match &grid {
        AnyGrid::Exact(g) => AnyCoeffs::Exact(fourier_coeffs(g, system)),
        AnyGrid::Float(g) => AnyCoeffs::Float(fourier_coeffs(g, system)),
    };
    let text = io::coeffs_to_json(&coeffs, &Provenance::new(config))?;
    emit(&a.output.out, &text)?;
    eprintln!(
        "transform: {} coefficients of a {} grid at M={}",
        system.as_str(),
        grid.backend().as_str(),
        grid.resolution().bits()
    );
    Ok(0)
}

fn mean(a: MeanArgs) -> LabResult<i32> {
    let system = SystemId::from(a.system);
    let convention = Convention::from(a.convention);
    let grid = io::read_grid(&a.input)?;
    let mut config = RunConfig::new("mean", a.output.format().as_str());
    config.resolution = Some(grid.resolution().bits());
    config.system = Some(system.as_str().into());
    config.convention = Some(convention.as_str().into());
    config = config.param("in", input_param(&a.input)).param("n", a.n);
    let out = match &grid {
        AnyGrid::Exact(g) => AnyGrid::Exact(fejer_mean(g, system, a.n, convention)?),
        AnyGrid::Float(g) => AnyGrid::Float(fejer_mean(g, system, a.n, convention)?),
    };
    emit_grid(&out, config, &a.output)?;
    eprintln!("mean: sigma_{} over {} at M={}", a.n, system.as_str(), grid.resolution().bits());
    Ok(0)
}

fn weight_spec(kind: CliWeight, p: Option<&str>) -> LabResult<WeightSpec> {
    Ok(match kind {
        CliWeight::Unit => WeightSpec::Unit,
        CliWeight::Log2sq => WeightSpec::Log2Sq,
        CliWeight::Power => {
            let p = p.ok_or_else(|| LabError::format("--weight power needs --p"))?;
            let p = Exponent::from_str(p)?;
            let w = WeightSpec::Power(p);
            w.validate()?;
            w
        }
    })
}

fn maximal(a: MaximalArgs) -> LabResult<i32> {
    let system = SystemId::from(a.system);
    let convention = Convention::from(a.convention);
    let weight = weight_spec(a.weight, a.p.as_deref())?;
    let grid = io::read_grid(&a.input)?;
    let res = grid.resolution();
    let n_max = a.n_max.unwrap_or(res.cells() as u64);
    let mut config = RunConfig::new("maximal", a.output.format().as_str());
    config.resolution = Some(res.bits());
    config.system = Some(system.as_str().into());
    config.convention = Some(convention.as_str().into());
    config.weight = Some(format!("{:?}", a.weight).to_lowercase());
    config.p = a.p.clone();
    config.n_max = Some(n_max);
    config = config.param("in", input_param(&a.input));
    let g = match &grid {
        AnyGrid::Exact(f) => maximal_fejer(f, system, n_max, &weight, convention)?,
        AnyGrid::Float(f) => maximal_fejer(f, system, n_max, &weight, convention)?,
    };
    let peak = g.values().iter().copied().fold(0.0f64, f64::max);
    emit_grid(&AnyGrid::Float(g), config, &a.output)?;
    eprintln!("maximal: n <= {n_max}, sup = {peak}");
    Ok(0)
}

fn norm(a: NormArgs) -> LabResult<i32> {
    let grid = io::read_grid(&a.input)?;
    let value = match (&grid, a.kind) {
        (AnyGrid::Exact(g), NormKind::Lp) => lp_quasinorm(g, a.p)?,
        (AnyGrid::Exact(g), NormKind::Weak) => weak_lp(g, a.p)?,
        (AnyGrid::Exact(g), NormKind::Hardy) => hardy_norm(g, a.p)?,
        (AnyGrid::Float(g), NormKind::Lp) => lp_quasinorm(g, a.p)?,
        (AnyGrid::Float(g), NormKind::Weak) => weak_lp(g, a.p)?,
        (AnyGrid::Float(g), NormKind::Hardy) => hardy_norm(g, a.p)?,
    };
    let kind = format!("{:?}", a.kind).to_lowercase();
    match &a.out {
        Some(path) => {
            let mut config = RunConfig::new("norm", "json");
            config.resolution = Some(grid.resolution().bits());
            config.p = Some(a.p.to_string());
            config = config.param("in", input_param(&a.input)).param("kind", &kind);
            #[derive(serde::Serialize)]
            struct NormOut<'a> {
                #[serde(flatten)]
                provenance: Provenance,
                kind: &'a str,
                p: f64,
                value: f64,
            }
            let doc = NormOut {
                provenance: Provenance::new(config),
                kind: &kind,
                p: a.p,
                value,
            };
            io::write_string(path, &(serde_json::to_string_pretty(&doc)? + "\n"))?;
            eprintln!("norm {kind} p={}: {value}", a.p);
        }
        None => println!("{value}"),
    }
    Ok(0)
}

fn atom(a: AtomArgs) -> LabResult<i32> {
    let p = Exponent::from_str(&a.p)?;
    let bits = a.resolution.unwrap_or(a.level + 1);
    let res = Resolution::new(bits)?;
    let atom = make_atom(a.level, p, res, a.seed)?;
    atom.validate()
        .map_err(|e| LabError::format(format!("generated atom is invalid: {e}")))?;
    let mut config = RunConfig::new("atom", a.output.format().as_str());
    config.resolution = Some(bits);
    config.p = Some(p.to_string());
    config.seed = Some(a.seed);
    config = config.param("N", a.level);
    let peak = atom.values.max_abs();
    emit_grid(&AnyGrid::Exact(atom.values), config, &a.output)?;
    eprintln!("atom on I_{} at M={bits}, p={p}, seed {}: sup |a| = {peak}", a.level, a.seed);
    Ok(0)
}

fn table(a: TableArgs) -> LabResult<i32> {
    let res = Resolution::new(a.resolution)?;
    if a.n_max == 0 {
        return Err(LabError::format("--n-max must be at least 1"));
    }
    res.check_index(a.n_max - 1)?;
    let mut config = RunConfig::new("systems table", "csv");
    config.resolution = Some(a.resolution);
    config.n_max = Some(a.n_max);
    let mut buf = Provenance::new(config).comment_lines().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["n", "map", "cell", "paley", "kaczmarz"])?;
        for n in 0..a.n_max {
            let map = kaczmarz_to_paley(n);
            for u in 0..res.cells() {
                w.write_record([
                    n.to_string(),
                    map.to_string(),
                    u.to_string(),
                    paley_sign(n, u).to_string(),
                    paley_sign(map, u).to_string(),
                ])?;
            }
        }
        w.flush()?;
    }
    let text = String::from_utf8(buf).map_err(|e| LabError::format(e.to_string()))?;
    emit(&a.out, &text)?;
    eprintln!("systems table: n < {} at M={}", a.n_max, a.resolution);
    Ok(0)
}

fn exponent_list(s: &str) -> LabResult<Vec<Exponent>> {
    s.split(',')
        .map(|t| Exponent::from_str(t.trim()).map_err(LabError::from))
        .collect()
}

fn u32_list(s: &str) -> LabResult<Vec<u32>> {
    parse_range(s)?
        .into_iter()
        .map(|v| u32::try_from(v).map_err(|_| LabError::format(format!("{v} is too large"))))
        .collect()
}

fn bounds(s: &str) -> LabResult<(u32, u32)> {
    let v = u32_list(s)?;
    let lo = *v.iter().min().expect("nonempty");
    let hi = *v.iter().max().expect("nonempty");
    if v.len() as u32 != hi - lo + 1 {
        return Err(LabError::format(format!("`{s}` must be a contiguous range")));
    }
    Ok((lo, hi))
}

fn parse_weight(s: &str) -> LabResult<WeightSpec> {
    match s {
        "unit" => Ok(WeightSpec::Unit),
        "log2sq" => Ok(WeightSpec::Log2Sq),
        _ => match s.strip_prefix("power:") {
            Some(p) => {
                let w = WeightSpec::Power(Exponent::from_str(p)?);
                w.validate()?;
                Ok(w)
            }
            None => Err(LabError::format(format!("unknown weight `{s}` (unit, log2sq, power:<p>)"))),
        },
    }
}

/// Flags each experiment understands; anything else given is an error.
fn allowed_flags(id: ExperimentId) -> &'static [&'static str] {
    match id {
        ExperimentId::Lemma2 => &["a-range", "resolution", "convention"],
        ExperimentId::Lemma3 => &["levels", "a-range", "n-max", "convention"],
        ExperimentId::Lemma4 => &["n-min", "n-max", "resolution"],
        ExperimentId::Lemma5 => &["a-range", "convention"],
        ExperimentId::Thm1 => &[
            "p",
            "levels",
            "headroom",
            "n-max",
            "trials",
            "seed",
            "samples",
            "growth-tol",
            "convention",
        ],
        ExperimentId::Thm2 => &["p", "m-range", "weight"],
    }
}

fn given_flags(a: &VerifyArgs) -> Vec<(&'static str, String)> {
    let mut v = Vec::new();
    let mut put = |k: &'static str, val: Option<String>| {
        if let Some(val) = val {
            v.push((k, val));
        }
    };
    put("p", a.p.clone());
    put("m-range", a.m_range.clone());
    put("a-range", a.a_range.clone());
    put("levels", a.levels.clone());
    put("n-min", a.n_min.map(|x| x.to_string()));
    put("n-max", a.n_max.map(|x| x.to_string()));
    put("resolution", a.resolution.map(|x| x.to_string()));
    put("trials", a.trials.map(|x| x.to_string()));
    put("seed", a.seed.map(|x| x.to_string()));
    put("convention", a.convention.clone());
    put("weight", a.weight.clone());
    put("headroom", a.headroom.map(|x| x.to_string()));
    put("samples", a.samples.map(|x| x.to_string()));
    put("growth-tol", a.growth_tol.map(|x| x.to_string()));
    v
}

fn single_convention(s: &str) -> LabResult<Convention> {
    let c = parse_conventions(s)?;
    if c.len() != 1 {
        return Err(LabError::format("this experiment takes a single convention"));
    }
    Ok(c[0])
}

fn build_experiment(a: &VerifyArgs) -> LabResult<Experiment> {
    Ok(match a.experiment {
        ExperimentId::Lemma2 => {
            let mut p = Lemma2Params::default();
            if let Some(r) = &a.a_range {
                (p.a_min, p.a_max) = bounds(r)?;
            }
            if let Some(m) = a.resolution {
                p.resolution = m;
            }
            if let Some(c) = &a.convention {
                p.conventions = parse_conventions(c)?;
            }
            Experiment::Lemma2(p)
        }
        ExperimentId::Lemma3 => {
            let mut p = Lemma3Params::default();
            if let Some(l) = &a.levels {
                let v = u32_list(l)?;
                if v.len() != 1 {
                    return Err(LabError::format("lemma3 takes a single level N"));
                }
                p.level = v[0];
            }
            if let Some(r) = &a.a_range {
                p.a_values = u32_list(r)?;
            }
            p.n_max = a.n_max;
            if let Some(c) = &a.convention {
                p.convention = single_convention(c)?;
            }
            Experiment::Lemma3(p)
        }
        ExperimentId::Lemma4 => {
            let mut p = Lemma4Params::default();
            if let Some(n) = a.n_min {
                p.n_min = n;
            }
            if let Some(n) = a.n_max {
                p.n_max = n;
            }
            if let Some(m) = a.resolution {
                p.resolution = m;
            }
            Experiment::Lemma4(p)
        }
        ExperimentId::Lemma5 => {
            let mut p = Lemma5Params::default();
            if let Some(r) = &a.a_range {
                (p.a_min, p.a_max) = bounds(r)?;
            }
            if let Some(c) = &a.convention {
                p.conventions = parse_conventions(c)?;
            }
            Experiment::Lemma5(p)
        }
        ExperimentId::Thm1 => {
            let mut p = Thm1Params::default();
            if let Some(s) = &a.p {
                p.p_values = exponent_list(s)?;
            }
            if let Some(l) = &a.levels {
                p.levels = u32_list(l)?;
            }
            if let Some(h) = a.headroom {
                p.headroom = h;
            }
            p.n_max = a.n_max;
            if let Some(t) = a.trials {
                p.trials = t;
            }
            if let Some(s) = a.seed {
                p.seed = s;
            }
            if let Some(s) = a.samples {
                p.linf_samples = s;
            }
            if let Some(g) = a.growth_tol {
                p.growth_tolerance = g;
            }
            if let Some(c) = &a.convention {
                p.convention = single_convention(c)?;
            }
            Experiment::Thm1(p)
        }
        ExperimentId::Thm2 => {
            let mut p = Thm2Params::default();
            if let Some(s) = &a.p {
                p.p = Exponent::from_str(s)?;
            }
            if let Some(r) = &a.m_range {
                (p.m_min, p.m_max) = bounds(r)?;
            }
            if let Some(w) = &a.weight {
                p.weight = parse_weight(w)?;
            }
            Experiment::Thm2(p)
        }
    })
}

fn verify(a: VerifyArgs) -> LabResult<i32> {
    let allowed = allowed_flags(a.experiment);
    let given = given_flags(&a);
    if let Some((k, _)) = given.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(LabError::format(format!(
            "--{k} does not apply to this experiment (accepted: {})",
            allowed.iter().map(|f| format!("--{f}")).collect::<Vec<_>>().join(", ")
        )));
    }
    let experiment = build_experiment(&a)?;
    let format = a.output.format();

    let mut config = RunConfig::new("verify", format.as_str());
    config = config.param("experiment", experiment.id());
    for (k, v) in &given {
        match *k {
            "p" => config.p = Some(v.clone()),
            "resolution" => config.resolution = v.parse().ok(),
            "n-max" => config.n_max = v.parse().ok(),
            "seed" => config.seed = v.parse().ok(),
            "convention" => config.convention = Some(v.clone()),
            "weight" => config.weight = Some(v.clone()),
            _ => config = config.param(k, v),
        }
    }
    if a.self_test {
        config = config.param("self-test", true);
    }

    let harness = Harness {
        self_test: a.self_test,
        ..Harness::default()
    };
    let start = Instant::now();
    let mut report = experiment.run(&harness)?;
    if a.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    report.provenance = Some(Provenance::new(config));

    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(&a.output.out, &text)?;
    eprintln!("{}", report.summary());
    Ok(if report.status == Status::Fail { 1 } else { 0 })
}
