//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification claim fails, 2 on usage
//! or input errors. All Monte Carlo paths require a seed (`--seed` or the
//! `LATVAL_SEED` environment variable); identical inputs and seeds produce
//! byte-identical output regardless of `--threads`.

use crate::ehrhart::{fit_exact, fit_statistical, to_hstar, FittedPolynomial};
use crate::experiment::{self, ExperimentReport};
use crate::fixtures;
use crate::io::{self, csv_table, CoefficientJson, PolynomialJson};
use crate::mc::{McParams, DEFAULT_SAMPLES};
use crate::polytope::Polytope;
use crate::rat::rat_int;
use crate::valuation::{self, AngleRoute, Family};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "latval",
    version,
    about = "Exact lattice-polytope valuations: discrete volumes, solid angles, \
             Grassmann angle valuations, dilation polynomials and their identity suite"
)]
pub struct Cli {
    /// Worker threads for Monte Carlo estimation (default: logical cores).
    /// Results are deterministic for a fixed seed regardless of this value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
pub struct PolytopeSource {
    /// Path to a polytope JSON file: {"dim": d, "vertices": [[..], ..]}.
    #[arg(long, conflicts_with = "builtin")]
    pub polytope: Option<PathBuf>,
    /// Built-in fixture: cube:D, simplex:D or reeve:H.
    #[arg(long)]
    pub builtin: Option<String>,
}

#[derive(Args, Clone)]
pub struct ConeSource {
    /// Path to a cone JSON file: {"ambient_dim": d, "generators": [[..], ..]}.
    #[arg(long, conflicts_with = "builtin_cone")]
    pub cone: Option<PathBuf>,
    /// Built-in cone: orthant:D, halfspace:D, subspace:D:J, ray:D, full:D, zero:D.
    #[arg(long)]
    pub builtin_cone: Option<String>,
}

#[derive(Args, Clone, Copy)]
pub struct McArgs {
    /// Monte Carlo samples per angle estimate.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Seed for all randomness (falls back to LATVAL_SEED).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    L,
    A,
    Ak,
    Gk,
    Vk,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Count lattice points of a dilate, grouped by face dimension.
    Count {
        #[command(flatten)]
        source: PolytopeSource,
        #[arg(long, default_value_t = 1)]
        dilate: i64,
    },
    /// Evaluate one valuation on one dilate.
    Valuation {
        #[command(flatten)]
        source: PolytopeSource,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        dilate: i64,
        #[command(flatten)]
        mc: McArgs,
        /// Force the Monte Carlo route even where closed forms exist.
        #[arg(long)]
        monte_carlo: bool,
    },
    /// Fit the dilation polynomial of a valuation.
    Ehrhart {
        #[command(flatten)]
        source: PolytopeSource,
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Fit a dilation polynomial and transform to the binomial basis.
    Hstar {
        #[command(flatten)]
        source: PolytopeSource,
        #[arg(long, value_enum, default_value_t = FamilyArg::L)]
        family: FamilyArg,
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Angle functionals of a cone: gamma, alpha_mod, upsilon, alpha.
    Angles {
        #[command(flatten)]
        source: ConeSource,
        /// Comma-separated list among gamma, alpha_mod, upsilon, alpha.
        #[arg(long, default_value = "gamma,alpha_mod,upsilon,alpha")]
        what: String,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Run a verification suite; exits 1 if any claim fails.
    Verify {
        /// identities | valuations | reciprocity | coefficients | conjecture | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        mc: McArgs,
        /// Number of cones in the identity suite.
        #[arg(long, default_value_t = 20)]
        cones: usize,
    },
    /// Reproduce the tetrahedron polynomial suite for a given height.
    Reeve {
        #[arg(long)]
        h: i64,
        #[command(flatten)]
        mc: McArgs,
    },
    /// Average the k-th intrinsic volume of Gaussian images of a cone.
    GaussImage {
        #[command(flatten)]
        source: ConeSource,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[command(flatten)]
        mc: McArgs,
    },
}

#[derive(Debug)]
pub enum CliError {
    /// Exit code 2: bad usage or malformed input.
    Input(String),
    /// Exit code 1: a verification claim failed. Carries the rendered
    /// report so it is still written before exiting.
    ClaimsFailed { rendered: String },
}

impl From<io::InputError> for CliError {
    fn from(e: io::InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::error::GeomError> for CliError {
    fn from(e: crate::error::GeomError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<fixtures::BuiltinError> for CliError {
    fn from(e: fixtures::BuiltinError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<crate::error::FitError> for CliError {
    fn from(e: crate::error::FitError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<experiment::ExperimentError> for CliError {
    fn from(e: experiment::ExperimentError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn resolve_polytope(src: &PolytopeSource) -> Result<Polytope, CliError> {
    match (&src.polytope, &src.builtin) {
        (Some(path), None) => Ok(io::load_polytope(&path.to_string_lossy())?),
        (None, Some(spec)) => Ok(fixtures::builtin_polytope(spec)?),
        _ => Err(CliError::Input(
            "exactly one of --polytope or --builtin is required".into(),
        )),
    }
}

fn resolve_cone(src: &ConeSource) -> Result<crate::cone::Cone, CliError> {
    match (&src.cone, &src.builtin_cone) {
        (Some(path), None) => Ok(io::load_cone(&path.to_string_lossy())?),
        (None, Some(spec)) => Ok(fixtures::builtin_cone(spec)?),
        _ => Err(CliError::Input(
            "exactly one of --cone or --builtin-cone is required".into(),
        )),
    }
}

fn resolve_seed(mc: &McArgs) -> Result<McParams, CliError> {
    let seed = match mc.seed {
        Some(s) => s,
        None => match std::env::var("LATVAL_SEED") {
            Ok(v) => v.parse().map_err(|_| {
                CliError::Input(format!("LATVAL_SEED must be an integer, got '{v}'"))
            })?,
            Err(_) => {
                return Err(CliError::Input(
                    "Monte Carlo paths need a seed: pass --seed or set LATVAL_SEED".into(),
                ))
            }
        },
    };
    Ok(McParams::new(mc.samples, seed))
}

fn family_of(arg: FamilyArg) -> Family {
    match arg {
        FamilyArg::L => Family::L,
        FamilyArg::A => Family::A,
        FamilyArg::Ak => Family::Ak,
        FamilyArg::Gk => Family::Gk,
        FamilyArg::Vk => Family::Gk, // Vk handled separately before dispatch
    }
}

fn need_k(family: FamilyArg, k: Option<usize>) -> Result<usize, CliError> {
    match family {
        FamilyArg::Ak | FamilyArg::Gk | FamilyArg::Vk => {
            k.ok_or_else(|| CliError::Input("--k is required for this family".into()))
        }
        _ => Ok(k.unwrap_or(0)),
    }
}

#[derive(Serialize)]
struct CountOutput {
    count: u64,
    by_face_dim: BTreeMap<usize, u64>,
}

#[derive(Serialize)]
struct ValuationOutput {
    family: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<usize>,
    dilate: i64,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_exact: Option<String>,
    exact: bool,
    stderr: f64,
}

#[derive(Serialize)]
struct AnglesOutput {
    ambient_dim: usize,
    cone_dim: usize,
    lineality_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<crate::angle::AngleEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha_mod: Option<Vec<crate::angle::AngleEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    upsilon: Option<Vec<crate::angle::AngleEstimate>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<crate::angle::AngleEstimate>,
}

/// Runs a parsed command and returns the rendered output.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    if let Some(n) = cli.threads {
        // Ignore failures from double initialization (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.cmd {
        Cmd::Count { source, dilate } => {
            let p = resolve_polytope(source)?;
            let pts = crate::lattice::enumerate_points(&p, *dilate)?;
            let out = CountOutput {
                count: pts.count(),
                by_face_dim: pts.counts_by_dim(&p).into_iter().collect(),
            };
            Ok(match cli.format {
                Format::Json => serde_json::to_string_pretty(&out).unwrap(),
                Format::Csv => {
                    let mut rows = vec![vec!["count".to_string(), out.count.to_string()]];
                    for (d, c) in &out.by_face_dim {
                        rows.push(vec![format!("relint_dim_{d}"), c.to_string()]);
                    }
                    csv_table(&["key", "value"], &rows)
                }
            })
        }
        Cmd::Valuation {
            source,
            family,
            k,
            dilate,
            mc,
            monte_carlo,
        } => {
            let p = resolve_polytope(source)?;
            let k = need_k(*family, *k)?;
            let route = if *monte_carlo {
                AngleRoute::MonteCarlo
            } else {
                AngleRoute::Hybrid
            };
            let needs_seed = !matches!(family, FamilyArg::L);
            let params = if needs_seed {
                resolve_seed(mc)?
            } else {
                McParams::new(mc.samples, 0)
            };
            let (name, v, exact_string) = match family {
                FamilyArg::L => {
                    let count = valuation::count_points(&p, *dilate)?;
                    let v = valuation::eval_l(&p, *dilate)?;
                    let s = v
                        .exact
                        .then(|| crate::rat::format_rat(&rat_int(count as i64)));
                    ("L".to_string(), v, s)
                }
                FamilyArg::A => ("A".into(), valuation::eval_a(&p, *dilate, route, params)?, None),
                FamilyArg::Ak => (
                    format!("A_{k}"),
                    valuation::eval_ak(&p, k, *dilate, route, params)?,
                    None,
                ),
                FamilyArg::Gk => (
                    format!("G_{k}"),
                    valuation::eval_gk(&p, k, *dilate, route, params)?,
                    None,
                ),
                FamilyArg::Vk => (format!("V_{k}"), valuation::eval_vk(&p, k, params), None),
            };
            let out = ValuationOutput {
                family: name,
                k: matches!(family, FamilyArg::Ak | FamilyArg::Gk | FamilyArg::Vk).then_some(k),
                dilate: *dilate,
                value: v.value,
                value_exact: exact_string,
                exact: v.exact,
                stderr: v.stderr,
            };
            Ok(match cli.format {
                Format::Json => serde_json::to_string_pretty(&out).unwrap(),
                Format::Csv => csv_table(
                    &["family", "k", "dilate", "value", "exact", "stderr"],
                    &[vec![
                        out.family.clone(),
                        out.k.map_or(String::new(), |k| k.to_string()),
                        out.dilate.to_string(),
                        format!("{}", out.value),
                        out.exact.to_string(),
                        format!("{}", out.stderr),
                    ]],
                ),
            })
        }
        Cmd::Ehrhart { source, family, k, mc } => {
            let p = resolve_polytope(source)?;
            let k = need_k(*family, *k)?;
            let (name, poly) = fit_family(&p, *family, k, mc)?;
            let out = PolynomialJson::new(&name, named_k(*family, k), &poly);
            Ok(render_polynomial(cli.format, out))
        }
        Cmd::Hstar { source, family, k, mc } => {
            let p = resolve_polytope(source)?;
            let k = need_k(*family, *k)?;
            let (name, poly) = fit_family(&p, *family, k, mc)?;
            let h = to_hstar(&poly);
            let out = PolynomialJson::new(&name, named_k(*family, k), &poly).with_hstar(&h);
            Ok(render_polynomial(cli.format, out))
        }
        Cmd::Angles { source, what, mc } => {
            let c = resolve_cone(source)?;
            let params = resolve_seed(mc)?;
            let d = c.ambient_dim();
            let mut out = AnglesOutput {
                ambient_dim: d,
                cone_dim: c.dim(),
                lineality_dim: c.lineality_dim(),
                gamma: None,
                alpha_mod: None,
                upsilon: None,
                alpha: None,
            };
            for part in what.split(',') {
                match part.trim() {
                    "gamma" => {
                        out.gamma = Some(
                            (0..=d)
                                .map(|k| {
                                    crate::angle::grassmann_angle(&c, k, params.derive(k as u64))
                                })
                                .collect(),
                        )
                    }
                    "alpha_mod" => {
                        out.alpha_mod = Some(
                            (0..=d)
                                .map(|k| {
                                    crate::angle::modified_grassmann_angle(
                                        &c,
                                        k,
                                        params.derive(100 + k as u64),
                                    )
                                })
                                .collect(),
                        )
                    }
                    "upsilon" => {
                        out.upsilon =
                            Some(crate::angle::intrinsic_volumes(&c, params.derive(200)).v)
                    }
                    "alpha" => {
                        out.alpha = Some(crate::angle::solid_angle(&c, params.derive(300)))
                    }
                    other => {
                        return Err(CliError::Input(format!(
                            "unknown angle functional '{other}' (expected gamma, alpha_mod, upsilon, alpha)"
                        )))
                    }
                }
            }
            Ok(match cli.format {
                Format::Json => serde_json::to_string_pretty(&out).unwrap(),
                Format::Csv => {
                    let mut rows = Vec::new();
                    let push = |rows: &mut Vec<Vec<String>>, what: &str, k: String, a: &crate::angle::AngleEstimate| {
                        rows.push(vec![
                            what.to_string(),
                            k,
                            format!("{}", a.value),
                            a.exact.to_string(),
                            format!("{}", a.stderr),
                        ]);
                    };
                    for (label, vs) in [("gamma", &out.gamma), ("alpha_mod", &out.alpha_mod), ("upsilon", &out.upsilon)] {
                        if let Some(vs) = vs {
                            for (kk, a) in vs.iter().enumerate() {
                                push(&mut rows, label, kk.to_string(), a);
                            }
                        }
                    }
                    if let Some(a) = &out.alpha {
                        push(&mut rows, "alpha", String::new(), a);
                    }
                    csv_table(&["what", "k", "value", "exact", "stderr"], &rows)
                }
            })
        }
        Cmd::Verify { suite, mc, cones } => {
            let params = resolve_seed(mc)?;
            let mut reports: Vec<ExperimentReport> = Vec::new();
            let known = ["identities", "valuations", "reciprocity", "coefficients", "conjecture", "all"];
            if !known.contains(&suite.as_str()) {
                return Err(CliError::Input(format!(
                    "unknown suite '{suite}' (expected one of {})",
                    known.join(", ")
                )));
            }
            let all = suite == "all";
            if all || suite == "identities" {
                reports.push(experiment::run_identity_suite(*cones, params.samples, params.seed));
            }
            if all || suite == "valuations" {
                reports.push(experiment::run_valuation_axiom_suite(params.samples, params.seed)?);
            }
            if all || suite == "reciprocity" {
                reports.push(experiment::run_reciprocity_suite(params.samples, params.seed)?);
            }
            if all || suite == "coefficients" {
                reports.push(experiment::run_leading_coefficient_suite(params.samples, params.seed)?);
            }
            if all || suite == "conjecture" {
                reports.push(experiment::run_conjecture_scan(3, 12, params.samples, params.seed)?);
            }
            render_reports(cli.format, reports)
        }
        Cmd::Reeve { h, mc } => {
            if *h < 1 {
                return Err(CliError::Input("--h must be at least 1".into()));
            }
            let params = resolve_seed(mc)?;
            let report = experiment::run_reeve(*h, params.samples, params.seed)?;
            render_reports(cli.format, vec![report])
        }
        Cmd::GaussImage { source, k, trials, mc } => {
            let c = resolve_cone(source)?;
            if !(1..=c.ambient_dim().min(3)).contains(k) {
                return Err(CliError::Input(
                    "--k must satisfy 1 <= k <= min(ambient_dim, 3)".into(),
                ));
            }
            let params = resolve_seed(mc)?;
            let report = experiment::run_gauss_image(&c, *k, *trials, params.samples, params.seed)?;
            render_reports(cli.format, vec![report])
        }
    }
}

fn named_k(family: FamilyArg, k: usize) -> Option<usize> {
    matches!(family, FamilyArg::Ak | FamilyArg::Gk).then_some(k)
}

fn fit_family(
    p: &Polytope,
    family: FamilyArg,
    k: usize,
    mc: &McArgs,
) -> Result<(String, FittedPolynomial), CliError> {
    const EXACT_SE: f64 = 1e-10;
    match family {
        FamilyArg::L => {
            let degree = p.dim();
            let values: Result<Vec<_>, _> = (0..=(degree as i64 + 3))
                .map(|n| valuation::count_points(p, n).map(|c| (n, rat_int(c as i64))))
                .collect();
            Ok(("L".into(), fit_exact(&values?, degree)?))
        }
        FamilyArg::A => {
            let params = resolve_seed(mc)?;
            let degree = p.dim();
            let values: Result<Vec<_>, CliError> = (1..=(degree as i64 + 3))
                .map(|n| {
                    let v = valuation::eval_a(p, n, AngleRoute::Hybrid, params.derive(n as u64))?;
                    Ok((n, v.value, v.stderr.max(EXACT_SE)))
                })
                .collect();
            Ok(("A".into(), fit_statistical(&values?, degree)?))
        }
        FamilyArg::Ak => {
            let params = resolve_seed(mc)?;
            let degree = k.min(p.dim());
            let values: Result<Vec<_>, CliError> = (1..=(degree as i64 + 3))
                .map(|n| {
                    let v = valuation::eval_ak(p, k, n, AngleRoute::Hybrid, params.derive(n as u64))?;
                    Ok((n, v.value, v.stderr.max(EXACT_SE)))
                })
                .collect();
            Ok((format!("A_{k}"), fit_statistical(&values?, degree)?))
        }
        FamilyArg::Gk => {
            let params = resolve_seed(mc)?;
            let degree = p.dim();
            let values: Result<Vec<_>, CliError> = (1..=(degree as i64 + 3))
                .map(|n| {
                    let v = valuation::eval_gk(p, k, n, AngleRoute::Hybrid, params.derive(n as u64))?;
                    Ok((n, v.value, v.stderr.max(EXACT_SE)))
                })
                .collect();
            Ok((format!("G_{k}"), fit_statistical(&values?, degree)?))
        }
        FamilyArg::Vk => Err(CliError::Input(
            "V_k is a single value, not a dilation polynomial; use `valuation --family vk`".into(),
        )),
    }
}

fn render_polynomial(format: Format, out: PolynomialJson) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&out).unwrap(),
        Format::Csv => {
            let mut rows = Vec::new();
            for (i, c) in out.coeffs.iter().enumerate() {
                let (v, se) = match c {
                    CoefficientJson::Exact(s) => (s.clone(), String::new()),
                    CoefficientJson::Estimated { value, stderr } => {
                        (format!("{value}"), format!("{stderr}"))
                    }
                };
                rows.push(vec![out.family.clone(), "monomial".into(), format!("t^{i}"), v, se]);
            }
            if let Some(h) = &out.hstar {
                for (i, c) in h.iter().enumerate() {
                    let (v, se) = match c {
                        CoefficientJson::Exact(s) => (s.clone(), String::new()),
                        CoefficientJson::Estimated { value, stderr } => {
                            (format!("{value}"), format!("{stderr}"))
                        }
                    };
                    rows.push(vec![out.family.clone(), "binomial".into(), format!("h*_{i}"), v, se]);
                }
            }
            csv_table(&["family", "basis", "term", "value", "stderr"], &rows)
        }
    }
}

fn render_reports(format: Format, reports: Vec<ExperimentReport>) -> Result<String, CliError> {
    let all_passed = reports.iter().all(|r| r.passed);
    let rendered = match format {
        Format::Json => serde_json::to_string_pretty(&reports).unwrap(),
        Format::Csv => {
            let mut rows = Vec::new();
            for r in &reports {
                for c in &r.claims {
                    rows.push(vec![
                        r.name.clone(),
                        c.what.clone(),
                        c.identity.clone(),
                        c.expected.clone(),
                        c.observed.clone(),
                        format!("{}", c.abs_error),
                        format!("{}", c.tolerance),
                        c.pass.to_string(),
                    ]);
                }
            }
            csv_table(
                &["report", "what", "identity", "expected", "observed", "abs_error", "tolerance", "pass"],
                &rows,
            )
        }
    };
    if all_passed {
        Ok(rendered)
    } else {
        // Callers print the report, then exit 1.
        Err(CliError::Input(String::new()).into_claims(rendered))
    }
}

impl CliError {
    fn into_claims(self, rendered: String) -> CliError {
        // Smuggle the rendered report through so main can print it before
        // exiting with code 1.
        CliError::ClaimsFailedWith(rendered)
    }
}

#[derive(Debug)]
pub enum Never {}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_schema_is_consistent() {
        Cli::command().debug_assert();
    }
}
