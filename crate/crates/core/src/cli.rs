//! The experiment driver behind the `mixnorm` binary.
//!
//! Every run is a [`RunConfig`]: a command, an optional instance file, the
//! exponents, and the sampling knobs. [`run`] executes the computation and
//! returns the rendered report together with a process exit code:
//!
//! * `0` — success,
//! * `1` — a verify-suite property failed,
//! * `2` — usage or parse error,
//! * `3` — schema violation,
//! * `4` — invariant violation,
//! * `5` — solver or optimizer failure.
//!
//! Identical configurations produce byte-identical reports.

use std::path::PathBuf;

use crate::adapters::{
    build_linear_instance, build_lipschitz_instance, classical_linear_mixing_constant,
    classical_lipschitz_mixing_constant,
};
use crate::math::close_rel;
use crate::mixed::{
    mixed_norm_closed, mixed_norm_splitting_search, mixed_norm_sup_measure, MixedFamilyValues,
};
use crate::mixing::{domination_at, mixing_lower_bound, mixing_upper_domination};
use crate::model::{FamilyItem, WeightedFamily};
use crate::report::{fmt_value, fmt_vector, Report, ReportEntry};
use crate::schema::{load_spec, save_instance, LoadedSpec};
use crate::summing::{pietsch_norm_with_dual, ratio_lower_bound_seeded, witness_from_dual};
use crate::{Error, ExponentParams, Instance, Result};

/// The supported commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    SummingNorm,
    MixedNorm,
    MixingConstant,
    VerifySuite,
    AdaptLinear,
    AdaptLipschitz,
}

impl Command {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "summing-norm" => Ok(Self::SummingNorm),
            "mixed-norm" => Ok(Self::MixedNorm),
            "mixing-constant" => Ok(Self::MixingConstant),
            "verify-suite" => Ok(Self::VerifySuite),
            "adapt-linear" => Ok(Self::AdaptLinear),
            "adapt-lipschitz" => Ok(Self::AdaptLipschitz),
            other => Err(Error::Parameter(format!(
                "unknown command `{other}`; expected summing-norm, mixed-norm, \
                 mixing-constant, verify-suite, adapt-linear or adapt-lipschitz"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Csv,
}

/// One fully-specified run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub instance: Option<PathBuf>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s: Option<f64>,
    pub t: Option<f64>,
    pub seed: u64,
    pub samples: usize,
    pub grid_depth: usize,
    /// Agreement tolerance for the adapter coherence report.
    pub tol: f64,
    pub format: ReportFormat,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            instance: None,
            p: None,
            q: None,
            s: None,
            t: None,
            seed: 0,
            samples: 50,
            grid_depth: 10,
            tol: 1e-6,
            format: ReportFormat::Text,
            out: None,
        }
    }
}

/// Outcome of a run: the exit code and the rendered report.
pub struct RunOutcome {
    pub exit_code: i32,
    pub rendered: String,
}

/// Executes one configuration. Errors are already mapped to exit codes by
/// the caller via [`Error::exit_code`].
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let report = match config.command {
        Command::SummingNorm => run_summing(config)?,
        Command::MixedNorm => run_mixed(config)?,
        Command::MixingConstant => run_mixing(config)?,
        Command::VerifySuite => return run_verify(config),
        Command::AdaptLinear | Command::AdaptLipschitz => run_adapt(config)?,
    };
    Ok(RunOutcome { exit_code: 0, rendered: render(config, &report) })
}

fn render(config: &RunConfig, report: &Report) -> String {
    match config.format {
        ReportFormat::Text => report.to_text(),
        ReportFormat::Csv => report.to_csv(),
    }
}

fn load_required(config: &RunConfig) -> Result<LoadedSpec> {
    let path = config
        .instance
        .as_ref()
        .ok_or_else(|| Error::Parameter("this command needs --instance PATH".into()))?;
    load_spec(path)
}

fn instance_of(spec: LoadedSpec) -> Result<(Instance, Option<ExponentParams>, Option<WeightedFamily>)> {
    match spec {
        LoadedSpec::Instance { instance, exponents, family, .. } => {
            Ok((instance, exponents, family))
        }
        _ => Err(Error::Parameter("this command needs a file of kind `instance`".into())),
    }
}

fn exponents_for(config: &RunConfig, from_file: Option<ExponentParams>) -> Result<ExponentParams> {
    match (config.q, config.s) {
        (Some(q), Some(s)) => match config.p {
            Some(p) => ExponentParams::new(p, q, s),
            None => ExponentParams::qs(q, s),
        },
        _ => from_file.ok_or_else(|| {
            Error::Parameter("exponents missing: pass --q and --s or store them in the file".into())
        }),
    }
}

fn run_summing(config: &RunConfig) -> Result<Report> {
    let (instance, exponents, _) = instance_of(load_required(config)?)?;
    let p = config
        .p
        .or_else(|| exponents.map(|e| e.p()))
        .ok_or_else(|| Error::Parameter("summing-norm needs --p".into()))?;
    let (cert, dual) = pietsch_norm_with_dual(&instance, p)?;
    let mut report = Report::default();
    let mut entry = ReportEntry::new("summing-norm", cert.constant, "domination-lp")
        .with_seed(config.seed);
    let witness = match witness_from_dual((instance.n_a, instance.n_c, instance.n_g), &dual, p) {
        Ok(w) => Some(w),
        Err(Error::EmptyWitness) => None,
        Err(other) => return Err(other),
    };
    let injected: Vec<WeightedFamily> = witness.iter().cloned().collect();
    if config.samples > 0 {
        let (lower, _) =
            ratio_lower_bound_seeded(&instance, p, config.samples, config.seed, &injected)?;
        entry = entry.with_bounds(lower, cert.constant);
    }
    report.push(entry);
    report.note(format!("certificate measure {}", fmt_vector(cert.measure.weights())));
    report.note(format!("certificate max violation {}", fmt_value(cert.max_violation)));
    if let Some(w) = witness {
        report.note(format!("extremal family {}", fmt_family(&w)));
    }
    Ok(report)
}

fn default_family(instance: &Instance) -> WeightedFamily {
    let items = (0..instance.probe_count())
        .map(|r| {
            let (a, c, g) = instance.probe_coords(r);
            FamilyItem { weight: 1.0, a, c, g }
        })
        .collect();
    WeightedFamily::new(items).expect("unit weights are valid")
}

fn fmt_family(fam: &WeightedFamily) -> String {
    let parts: Vec<String> = fam
        .items()
        .iter()
        .map(|it| format!("({}, a={}, c={}, g={})", fmt_value(it.weight), it.a, it.c, it.g))
        .collect();
    format!("[{}]", parts.join(", "))
}

fn run_mixed(config: &RunConfig) -> Result<Report> {
    let (instance, exponents, family) = instance_of(load_required(config)?)?;
    let e = exponents_for(config, exponents)?;
    let family = family.unwrap_or_else(|| default_family(&instance));
    let vals = MixedFamilyValues::from_instance(&instance, &family)?;
    let mut report = Report::default();
    if e.is_diagonal() {
        let value = mixed_norm_closed(&vals, e.q())?;
        report.push(
            ReportEntry::new("mixed-norm", value, "diagonal-closed-form").with_seed(config.seed),
        );
    } else {
        let result = mixed_norm_sup_measure(&vals, &e)?;
        let search = mixed_norm_splitting_search(&vals, &e, 4, config.seed)?;
        report.push(
            ReportEntry::new("mixed-norm", result.value, "measure-maximization")
                .with_bounds(result.value, result.value + result.gap)
                .with_seed(config.seed),
        );
        report.push(
            ReportEntry::new("mixed-norm-splitting-search", search, "splitting-minimization")
                .with_seed(config.seed),
        );
        report.note(format!("extremal measure {}", fmt_vector(result.measure.weights())));
        report.note(format!("splitting sequence {}", fmt_vector(&result.splitting)));
    }
    report.note(format!("family {}", fmt_family(&family)));
    Ok(report)
}

fn run_mixing(config: &RunConfig) -> Result<Report> {
    let (instance, exponents, _) = instance_of(load_required(config)?)?;
    let e = exponents_for(config, exponents)?;
    let p = config.p.unwrap_or_else(|| e.q());
    let mut report = Report::default();
    if p == e.q() {
        let (upper, worst_mu) = mixing_upper_domination(&instance, &e, config.grid_depth)?;
        let (lower, witness) = mixing_lower_bound(&instance, &e, p, config.samples, config.seed)?;
        report.push(
            ReportEntry::new("mixing-constant", upper, "two-measure-domination")
                .with_bounds(lower, upper)
                .with_seed(config.seed),
        );
        let (cert, _) = domination_at(&instance, &worst_mu, &e)?;
        report.note(format!("worst measure {}", fmt_vector(worst_mu.weights())));
        report.note(format!("certificate measure {}", fmt_vector(cert.measure.weights())));
        report.note(format!("certificate max violation {}", fmt_value(cert.max_violation)));
        report.note(format!("extremal family {}", fmt_family(&witness)));
    } else {
        let (lower, witness) = mixing_lower_bound(&instance, &e, p, config.samples, config.seed)?;
        report.push(
            ReportEntry::new("mixing-constant-lower-bound", lower, "family-ratio-sampling")
                .with_seed(config.seed),
        );
        report.note(format!("extremal family {}", fmt_family(&witness)));
    }
    Ok(report)
}

fn run_verify(config: &RunConfig) -> Result<RunOutcome> {
    let results = crate::suite::run_suite(config.seed);
    let mut report = Report::default();
    for r in &results {
        report.push(
            ReportEntry::new(
                r.name,
                if r.pass { 1.0 } else { 0.0 },
                if r.pass { "pass" } else { "FAIL" },
            )
            .with_seed(config.seed),
        );
        report.note(format!("{}: {} ({})", r.name, if r.pass { "pass" } else { "FAIL" }, r.detail));
    }
    let rendered = render(config, &report);
    let exit_code = if crate::suite::all_passed(&results) {
        0
    } else {
        // Exit 1 with the first failing property named at the end.
        1
    };
    let mut rendered = rendered;
    if exit_code != 0 {
        if let Some(first) = results.iter().find(|r| !r.pass) {
            rendered.push_str(&format!("first failing property: {}\n", first.name));
        }
    }
    Ok(RunOutcome { exit_code, rendered })
}

fn run_adapt(config: &RunConfig) -> Result<Report> {
    let spec = load_required(config)?;
    let e = exponents_for(config, None)?;
    let mut report = Report::default();
    let (instance, classical, anchor) = match (config.command, spec) {
        (Command::AdaptLinear, LoadedSpec::Linear(spec)) => {
            let instance = build_linear_instance(&spec)?;
            let classical = classical_linear_mixing_constant(&spec, &e, config.grid_depth)?;
            (instance, classical, "linear-pairings")
        }
        (Command::AdaptLipschitz, LoadedSpec::Lipschitz(spec)) => {
            let instance = build_lipschitz_instance(&spec)?;
            let classical = classical_lipschitz_mixing_constant(&spec, &e, config.grid_depth)?;
            (instance, classical, "lipschitz-increments")
        }
        (Command::AdaptLinear, _) => {
            return Err(Error::Parameter("adapt-linear needs a file of kind `linear_map`".into()))
        }
        (Command::AdaptLipschitz, _) => {
            return Err(Error::Parameter(
                "adapt-lipschitz needs a file of kind `lipschitz_map`".into(),
            ))
        }
        _ => unreachable!("run_adapt is only called for adapter commands"),
    };
    let (generic, worst_mu) = mixing_upper_domination(&instance, &e, config.grid_depth)?;
    let (classical_value, classical_mu) = classical;
    report.push(
        ReportEntry::new("mixing-constant", generic, "two-measure-domination")
            .with_seed(config.seed),
    );
    report.push(ReportEntry::new("mixing-constant-direct", classical_value, anchor));
    let agree = close_rel(generic, classical_value, config.tol);
    report.note(format!(
        "route agreement within {}: {}",
        fmt_value(config.tol),
        if agree { "yes" } else { "NO" }
    ));
    report.note(format!("worst measure {}", fmt_vector(worst_mu.weights())));
    report.note(format!("direct-route measure {}", fmt_vector(classical_mu.weights())));
    if let Some(out) = &config.out {
        save_instance(out, &instance, Some(&e), None)?;
        report.note(format!("instance written to {}", out.display()));
    }
    if !agree {
        return Err(Error::Convergence {
            best: generic,
            gap: (generic - classical_value).abs(),
        });
    }
    Ok(report)
}
