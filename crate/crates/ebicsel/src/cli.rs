//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! Feature ids in input and output are 1-based column numbers of the
//! covariate block (the response column is not counted).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgAction, Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ebicsel_core::ebic::{ebic_value, GammaSpec};
use ebicsel_core::experiments::{link_label, CvConfig, CvLinkReport, WorkflowConfig};
use ebicsel_core::glm_fit::{c6_diagnostics, fit_mle, Dataset, FitOptions, ModelIndex};
use ebicsel_core::select::{select_pipeline, SelectConfig};
use ebicsel_core::simgen::{design_for, generate_replicate_stream, Setting, SimDesign};
use ebicsel_core::{Family, Link, LinkFamily};

use crate::config::{load_overrides, overlay, Manifest};
use crate::error::{AppError, AppResult};
use crate::io::{feature_names, read_dataset, write_dataset};
use crate::runner;
use crate::tables::{feature_list, num, opt_num, Table};

#[derive(Debug, Parser)]
#[command(
    name = "ebicsel",
    version,
    about = "Feature selection in generalized linear models with EBIC"
)]
pub struct Cli {
    /// Worker threads; overrides the EBICSEL_THREADS environment variable.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON options file, or the manifest of an earlier run; its entries
    /// override the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Directory receiving the result tables and the manifest.
    #[arg(long, short, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit one model; report coefficients, log-likelihood and EBIC.
    Fit(FitArgs),
    /// Screening and forward selection on a CSV dataset.
    Select(SelectArgs),
    /// Monte-Carlo PDR/FDR tables for the simulation settings.
    Simulate(SimulateArgs),
    /// Cross-validated link comparison, optionally with per-link paths and
    /// final selections.
    CvLinks(CvLinksArgs),
    /// Ratio diagnostics for the curvature condition at a coefficient vector.
    Diagnose(DiagnoseArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fit(_) => "fit",
            Command::Select(_) => "select",
            Command::Simulate(_) => "simulate",
            Command::CvLinks(_) => "cv-links",
            Command::Diagnose(_) => "diagnose",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FitArgs {
    /// CSV file with a header row; the first column is the response `y`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "bernoulli")]
    pub family: String,
    #[arg(long, default_value = "logit")]
    pub link: String,
    /// Feature ids in the model.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<usize>,
    #[arg(long)]
    pub no_intercept: bool,
    /// EBIC γ values or presets (bic, gamma2, gamma3, mbic, final, boundary).
    #[arg(
        long = "gamma",
        value_delimiter = ',',
        default_value = "bic,gamma2,gamma3,mbic"
    )]
    pub gammas: Vec<String>,
}

/// Options shared by `select` and `simulate`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectOpts {
    /// EBIC γ values or presets; the first drives the forward path.
    #[arg(
        long = "gamma",
        value_delimiter = ',',
        default_value = "bic,gamma2,gamma3,mbic"
    )]
    pub gammas: Vec<String>,
    #[arg(long, default_value_t = 50)]
    pub max_steps: usize,
    /// Screening runs when the number of features exceeds this.
    #[arg(long, default_value_t = 1000)]
    pub screen_threshold: usize,
    #[arg(long, default_value_t = 400)]
    pub screen_keep: usize,
    /// Build a separate forward path for every γ.
    #[arg(long)]
    pub path_per_gamma: bool,
}

impl SelectOpts {
    fn to_config(&self, allow_separated: bool, k_multiplier: f64) -> AppResult<SelectConfig> {
        if !(k_multiplier > 0.0) {
            return Err(AppError::Usage("k multiplier must be positive".into()));
        }
        Ok(SelectConfig {
            gammas: parse_gammas(&self.gammas)?,
            max_steps: self.max_steps,
            screen_threshold: self.screen_threshold,
            screen_keep: self.screen_keep,
            k_multiplier,
            path_per_gamma: self.path_per_gamma,
            allow_separated,
        })
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SelectArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "bernoulli")]
    pub family: String,
    #[arg(long, default_value = "logit")]
    pub link: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub select: SelectOpts,
    /// Let fits that hit the coefficient cap enter the path.
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    pub allow_separated: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulateArgs {
    /// Simulation setting (1, 2 or 3).
    #[arg(long, default_value_t = 1)]
    pub setting: u8,
    /// Compound-symmetry correlations.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub rho: Vec<f64>,
    /// Sample sizes; the feature count and true model size follow from n.
    #[arg(long = "n", value_delimiter = ',', default_value = "100,200,500")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Binary link used for fitting (responses are always generated with cloglog).
    #[arg(long, default_value = "cloglog")]
    pub link: String,
    #[command(flatten)]
    #[serde(flatten)]
    pub select: SelectOpts,
    /// The path length is capped at ⌈k · p0⌉.
    #[arg(long, default_value_t = 3.0)]
    pub k_multiplier: f64,
    #[arg(long, default_value_t = false, action = ArgAction::Set)]
    pub allow_separated: bool,
    /// Variance of the N(1, ·) mixture component.
    #[arg(long, default_value_t = 0.5)]
    pub mixture_variance: f64,
    /// Also write every replicate as CSV, with the design as JSON.
    #[arg(long)]
    pub dump_replicates: bool,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CvLinksArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "bernoulli")]
    pub family: String,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "logit,probit,cauchit,cloglog"
    )]
    pub links: Vec<String>,
    #[arg(long, default_value_t = 8)]
    pub folds: usize,
    /// Forward-path length on each training fold.
    #[arg(long, default_value_t = 10)]
    pub path_length: usize,
    /// γ choosing the model on each training fold.
    #[arg(long, default_value = "final")]
    pub gamma: String,
    /// Seed of the fold assignment.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub screen_threshold: usize,
    #[arg(long, default_value_t = 400)]
    pub screen_keep: usize,
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub allow_separated: bool,
    /// Also build a full-data path per link and make the final selections.
    #[arg(long)]
    pub workflow: bool,
    #[arg(long, default_value_t = 50)]
    pub workflow_path_length: usize,
    /// γ of the final selection.
    #[arg(long, default_value = "final")]
    pub final_gamma: String,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiagnoseArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "bernoulli")]
    pub family: String,
    #[arg(long, default_value = "logit")]
    pub link: String,
    /// Coefficients as `feature=value`; unlisted features are zero.
    #[arg(long, value_delimiter = ',')]
    pub beta: Vec<String>,
    /// Fit these features (with an intercept) and use the fitted slopes.
    /// The intercept is not part of the evaluated linear predictor.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<usize>,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_from<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("ebicsel: {e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command line. Result tables and the manifest are written to
/// the output directory; the returned text is what the binary prints.
pub fn run(cli: Cli) -> AppResult<String> {
    let threads = runner::resolve_threads(cli.threads)?;
    let pool = runner::thread_pool(threads)?;
    let overrides = match &cli.config {
        Some(path) => Some(load_overrides(path, cli.command.name())?),
        None => None,
    };
    fs::create_dir_all(&cli.out).map_err(|e| AppError::io(&cli.out, e))?;
    let out = cli.out.as_path();
    macro_rules! merged {
        ($args:expr) => {
            match &overrides {
                Some(o) => overlay(&$args, o)?,
                None => $args,
            }
        };
    }
    match cli.command {
        Command::Fit(a) => run_fit(merged!(a), out),
        Command::Select(a) => run_select(merged!(a), out),
        Command::Simulate(a) => run_simulate(merged!(a), out, &pool),
        Command::CvLinks(a) => run_cv_links(merged!(a), out, &pool),
        Command::Diagnose(a) => run_diagnose(merged!(a), out),
    }
}

fn parse_link_family(family: &str, link: &str) -> AppResult<LinkFamily> {
    let family: Family = family.parse()?;
    let link: Link = link.parse()?;
    Ok(LinkFamily::new(family, link)?)
}

fn parse_gammas(specs: &[String]) -> AppResult<Vec<GammaSpec>> {
    if specs.is_empty() {
        return Err(AppError::Usage("no gamma values given".into()));
    }
    specs
        .iter()
        .map(|s| s.parse().map_err(AppError::from))
        .collect()
}

/// Reads the input CSV, checks the responses against `family`, and replaces
/// the path by its canonical form so the manifest is location independent.
fn load_input(input: &mut Option<PathBuf>, family: Family) -> AppResult<Dataset> {
    let Some(path) = input.as_ref() else {
        return Err(AppError::Usage("missing --input".into()));
    };
    let data = read_dataset(path)?;
    data.validate_for(family)?;
    if let Ok(abs) = fs::canonicalize(path) {
        *input = Some(abs);
    }
    Ok(data)
}

fn zero_based(ids: &[usize], p: usize) -> AppResult<Vec<usize>> {
    ids.iter()
        .map(|&j| {
            if (1..=p).contains(&j) {
                Ok(j - 1)
            } else {
                Err(AppError::Usage(format!("feature {j} outside 1..={p}")))
            }
        })
        .collect()
}

fn names_of(names: &[String], features: &[usize]) -> String {
    features
        .iter()
        .map(|&j| names[j].as_str())
        .collect::<Vec<_>>()
        .join(",")
}

fn finish<T: Serialize>(
    out: &Path,
    command: &str,
    args: &T,
    seeds: Value,
    tables: &[(&str, &Table)],
    extra_outputs: Vec<String>,
) -> AppResult<()> {
    let mut outputs = Vec::new();
    for (file, table) in tables {
        table.write(&out.join(file))?;
        outputs.push((*file).to_string());
    }
    outputs.extend(extra_outputs);
    Manifest::new(command, args, seeds, outputs)?.write(out)
}

fn run_fit(mut args: FitArgs, out: &Path) -> AppResult<String> {
    let lf = parse_link_family(&args.family, &args.link)?;
    let gammas = parse_gammas(&args.gammas)?;
    let data = load_input(&mut args.input, lf.family())?;
    let (n, p) = (data.n(), data.p());
    let mut model = ModelIndex::new(zero_based(&args.features, p)?);
    if args.no_intercept {
        model = model.without_intercept();
    }
    if model.n_coef() == 0 {
        return Err(AppError::Usage("model has no coefficients".into()));
    }
    let fit = fit_mle(&lf, &data, &model, &FitOptions::default())?;
    let names = feature_names(&data);

    let mut coef = Table::new(["term", "feature", "estimate"]);
    let mut b = fit.beta.iter();
    if model.has_intercept() {
        coef.push(vec![
            "(intercept)".into(),
            "-".into(),
            num(*b.next().unwrap()),
        ]);
    }
    for (&j, v) in model.indices().iter().zip(b) {
        coef.push(vec![names[j].clone(), (j + 1).to_string(), num(*v)]);
    }

    let mut summary = Table::new(["quantity", "value"]);
    for (k, v) in [
        ("n", n.to_string()),
        ("p", p.to_string()),
        ("size", model.len().to_string()),
        ("log_lik", num(fit.log_lik)),
        ("converged", fit.converged.to_string()),
        ("separated", fit.separated.to_string()),
        ("iterations", fit.iterations.to_string()),
        ("grad_norm", num(fit.grad_norm)),
        ("fisher_fallback", fit.used_fisher_fallback.to_string()),
    ] {
        summary.push(vec![k.into(), v]);
    }

    let mut ebic = Table::new([
        "gamma",
        "gamma_value",
        "size_penalty",
        "prior_penalty",
        "ebic",
    ]);
    for g in &gammas {
        let gv = g.resolve(n, p)?;
        let (size_pen, prior_pen, value) = ebic_value(fit.log_lik, model.len(), n, p, gv)?;
        ebic.push(vec![
            g.label(),
            num(gv),
            num(size_pen),
            num(prior_pen),
            num(value),
        ]);
    }

    finish(
        out,
        "fit",
        &args,
        Value::Null,
        &[
            ("coefficients.tsv", &coef),
            ("fit.tsv", &summary),
            ("ebic.tsv", &ebic),
        ],
        Vec::new(),
    )?;
    Ok(format!(
        "{}\n{}\n{}",
        coef.to_tsv(),
        summary.to_tsv(),
        ebic.to_tsv()
    ))
}

fn run_select(mut args: SelectArgs, out: &Path) -> AppResult<String> {
    let lf = parse_link_family(&args.family, &args.link)?;
    let config = args.select.to_config(args.allow_separated, 3.0)?;
    let data = load_input(&mut args.input, lf.family())?;
    let names = feature_names(&data);
    let report = select_pipeline(&lf, &data, &config, None)?;
    let labels: Vec<String> = config.gammas.iter().map(GammaSpec::label).collect();

    let mut header = vec![
        "path".to_string(),
        "step".into(),
        "feature".into(),
        "name".into(),
        "log_lik".into(),
    ];
    header.extend(labels.iter().map(|l| format!("ebic_{l}")));
    let mut path_table = Table::new(header);
    for path in &report.paths {
        let criterion = &labels[path.path_gamma];
        let mut row = vec![
            criterion.clone(),
            "0".into(),
            "-".into(),
            "(intercept only)".into(),
        ];
        row.push(num(path.null_fit.log_lik));
        row.extend(path.null_ebic.iter().map(|&v| num(v)));
        path_table.push(row);
        for (k, step) in path.steps.iter().enumerate() {
            let mut row = vec![
                criterion.clone(),
                (k + 1).to_string(),
                (step.feature + 1).to_string(),
                names[step.feature].clone(),
                num(step.fit.log_lik),
            ];
            row.extend(step.ebic.iter().map(|&v| num(v)));
            path_table.push(row);
        }
    }

    let mut selected = Table::new([
        "gamma",
        "gamma_value",
        "size",
        "features",
        "names",
        "ebic",
        "log_lik",
    ]);
    for f in &report.finals {
        selected.push(vec![
            f.gamma.label(),
            num(f.gamma_value),
            f.features.len().to_string(),
            feature_list(&f.features),
            names_of(&names, &f.features),
            num(f.ebic),
            num(f.log_lik),
        ]);
    }

    let mut tables = vec![("path.tsv", &path_table), ("selected.tsv", &selected)];
    let mut screen_table = Table::new(["rank", "feature", "name", "statistic"]);
    if let Some(screen) = &report.screen {
        for (rank, &j) in screen.keep.iter().enumerate() {
            screen_table.push(vec![
                (rank + 1).to_string(),
                (j + 1).to_string(),
                names[j].clone(),
                num(screen.statistics[j]),
            ]);
        }
        tables.push(("screen.tsv", &screen_table));
    }
    finish(out, "select", &args, Value::Null, &tables, Vec::new())?;
    Ok(format!("{}\n{}", path_table.to_tsv(), selected.to_tsv()))
}

fn design_json(design: &SimDesign) -> Value {
    let truth = design.true_model();
    json!({
        "setting": design.setting.number(),
        "n": design.n,
        "pn": design.pn,
        "p0n": design.p0n,
        "rho": design.rho,
        "spacing": design.spacing,
        "q": design.q,
        "mixtureSecondVariance": design.mixture_second_variance,
        "support": truth.support.iter().map(|j| j + 1).collect::<Vec<_>>(),
        "beta": truth.beta,
    })
}

fn run_simulate(args: SimulateArgs, out: &Path, pool: &rayon::ThreadPool) -> AppResult<String> {
    let setting = Setting::from_number(args.setting)?;
    let lf = LinkFamily::binary(args.link.parse()?)?;
    let config = args
        .select
        .to_config(args.allow_separated, args.k_multiplier)?;
    if args.n.is_empty() || args.rho.is_empty() {
        return Err(AppError::Usage(
            "need at least one sample size and one rho".into(),
        ));
    }
    let mut summary = Table::new([
        "setting", "rho", "n", "gamma", "mean_pdr", "se_pdr", "mean_fdr", "se_fdr", "n_reps",
        "n_failed",
    ]);
    let mut per_rep = Table::new([
        "setting",
        "rho",
        "n",
        "replicate",
        "gamma",
        "pdr",
        "fdr",
        "selected",
        "status",
    ]);
    let mut extra = Vec::new();
    for &rho in &args.rho {
        for &n in &args.n {
            let mut design = design_for(setting, n, rho)?;
            design.mixture_second_variance = args.mixture_variance;
            design.validate()?;
            let (result, outcomes) =
                runner::run_batch(pool, &lf, &design, args.reps, &config, args.seed)?;
            let (s, r, nn) = (setting.number().to_string(), num(rho), n.to_string());
            for cell in &result.cells {
                summary.push(vec![
                    s.clone(),
                    r.clone(),
                    nn.clone(),
                    cell.gamma.label(),
                    num(cell.mean_pdr),
                    opt_num(cell.se_pdr),
                    num(cell.mean_fdr),
                    opt_num(cell.se_fdr),
                    cell.replicates.to_string(),
                    cell.failed.to_string(),
                ]);
            }
            for (id, outcome) in &outcomes {
                match outcome {
                    Ok(o) => {
                        for (g, spec) in config.gammas.iter().enumerate() {
                            per_rep.push(vec![
                                s.clone(),
                                r.clone(),
                                nn.clone(),
                                id.to_string(),
                                spec.label(),
                                num(o.rates[g].pdr),
                                num(o.rates[g].fdr),
                                feature_list(&o.selected[g]),
                                "ok".into(),
                            ]);
                        }
                    }
                    Err(e) => per_rep.push(vec![
                        s.clone(),
                        r.clone(),
                        nn.clone(),
                        id.to_string(),
                        "-".into(),
                        "NA".into(),
                        "NA".into(),
                        String::new(),
                        format!("failed: {e}"),
                    ]),
                }
            }
            if args.dump_replicates {
                extra.extend(dump_replicates(out, &design, args.reps, args.seed)?);
            }
        }
    }
    let seeds = json!({
        "seed": args.seed,
        "replicateStreams": format!("replicate r of every design uses stream r, r = 0..{}", args.reps),
    });
    finish(
        out,
        "simulate",
        &args,
        seeds,
        &[("summary.tsv", &summary), ("replicates.tsv", &per_rep)],
        extra,
    )?;
    Ok(summary.to_tsv())
}

fn dump_replicates(out: &Path, design: &SimDesign, reps: u64, seed: u64) -> AppResult<Vec<String>> {
    let dir = out.join("replicates");
    fs::create_dir_all(&dir).map_err(|e| AppError::io(&dir, e))?;
    let stem = format!(
        "s{}_rho{}_n{}",
        design.setting.number(),
        design.rho,
        design.n
    );
    let mut files = Vec::new();
    let design_file = format!("replicates/{stem}_design.json");
    let text = serde_json::to_string_pretty(&design_json(design))
        .map_err(|e| AppError::Usage(e.to_string()))?;
    fs::write(out.join(&design_file), text + "\n")
        .map_err(|e| AppError::io(out.join(&design_file), e))?;
    files.push(design_file);
    for r in 0..reps {
        let rep = generate_replicate_stream(design, seed, r)?;
        let file = format!("replicates/{stem}_rep{r:04}.csv");
        write_dataset(&out.join(&file), &rep.dataset)?;
        files.push(file);
    }
    Ok(files)
}

fn cv_tables(report: &CvLinkReport, data: &Dataset) -> (Table, Table) {
    let mut header = vec!["link".to_string(), "criterion".into()];
    header.extend((1..=report.folds).map(|f| format!("fold_{f}")));
    header.push("chosen".into());
    let mut cv = Table::new(header);
    for (k, lf) in report.links.iter().enumerate() {
        let mut row = vec![link_label(lf), num(report.criterion[k])];
        row.extend(report.fold_scores[k].iter().map(|&v| num(v)));
        row.push(if k == report.chosen { "yes" } else { "no" }.into());
        cv.push(row);
    }
    let mut folds = Table::new(["row", "y", "fold"]);
    for (i, &f) in report.assignment.iter().enumerate() {
        folds.push(vec![
            (i + 1).to_string(),
            num(data.y()[i]),
            (f + 1).to_string(),
        ]);
    }
    (cv, folds)
}

fn run_cv_links(mut args: CvLinksArgs, out: &Path, pool: &rayon::ThreadPool) -> AppResult<String> {
    let family: Family = args.family.parse()?;
    let links: Vec<LinkFamily> = args
        .links
        .iter()
        .map(|l| parse_link_family(&args.family, l))
        .collect::<AppResult<_>>()?;
    let cv_config = CvConfig {
        folds: args.folds,
        path_length: args.path_length,
        gamma: args.gamma.parse()?,
        seed: args.seed,
        select: SelectConfig {
            screen_threshold: args.screen_threshold,
            screen_keep: args.screen_keep,
            allow_separated: args.allow_separated,
            ..SelectConfig::default()
        },
    };
    if args.path_length == 0 || args.workflow_path_length == 0 {
        return Err(AppError::Usage("path lengths must be positive".into()));
    }
    let data = load_input(&mut args.input, family)?;
    let seeds = json!({ "foldSeed": args.seed });
    if !args.workflow {
        let report = runner::cv_links(pool, &data, &links, &cv_config)?;
        let (cv, folds) = cv_tables(&report, &data);
        finish(
            out,
            "cv-links",
            &args,
            seeds,
            &[("cv.tsv", &cv), ("folds.tsv", &folds)],
            Vec::new(),
        )?;
        return Ok(cv.to_tsv());
    }

    let wf = WorkflowConfig {
        path_length: args.workflow_path_length,
        final_gamma: args.final_gamma.parse()?,
        cv: cv_config,
    };
    let report = runner::workflow(pool, &data, &links, &wf)?;
    let (cv, folds) = cv_tables(&report.cv, &data);
    let names = feature_names(&data);
    let mut header = vec!["step".to_string()];
    header.extend(links.iter().map(link_label));
    let mut paths = Table::new(header);
    let longest = report
        .per_link
        .iter()
        .map(|s| s.path.len())
        .max()
        .unwrap_or(0);
    for k in 0..longest {
        let mut row = vec![(k + 1).to_string()];
        row.extend(report.per_link.iter().map(|s| {
            s.path
                .get(k)
                .map_or_else(String::new, |j| (j + 1).to_string())
        }));
        paths.push(row);
    }
    let mut finals = Table::new([
        "link",
        "gamma_value",
        "size",
        "features",
        "names",
        "max_log_lik",
        "cv_chosen",
    ]);
    for (k, s) in report.per_link.iter().enumerate() {
        finals.push(vec![
            link_label(&s.link),
            num(s.gamma_value),
            s.selected.len().to_string(),
            feature_list(&s.selected),
            names_of(&names, &s.selected),
            num(s.max_log_lik),
            if k == report.cv.chosen { "yes" } else { "no" }.into(),
        ]);
    }
    finish(
        out,
        "cv-links",
        &args,
        seeds,
        &[
            ("cv.tsv", &cv),
            ("folds.tsv", &folds),
            ("paths.tsv", &paths),
            ("final.tsv", &finals),
        ],
        Vec::new(),
    )?;
    Ok(format!("{}\n{}", cv.to_tsv(), finals.to_tsv()))
}

fn parse_sparse_beta(entries: &[String], p: usize) -> AppResult<Vec<f64>> {
    let mut beta = vec![0.0; p];
    for e in entries {
        let (j, v) = e.split_once('=').ok_or_else(|| {
            AppError::Usage(format!(
                "coefficient `{e}` is not of the form feature=value"
            ))
        })?;
        let j: usize = j
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("bad feature id in `{e}`")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("bad coefficient in `{e}`")))?;
        let j = zero_based(&[j], p)?[0];
        beta[j] = v;
    }
    Ok(beta)
}

fn run_diagnose(mut args: DiagnoseArgs, out: &Path) -> AppResult<String> {
    let lf = parse_link_family(&args.family, &args.link)?;
    let data = load_input(&mut args.input, lf.family())?;
    let p = data.p();
    let beta0 = if !args.features.is_empty() {
        if !args.beta.is_empty() {
            return Err(AppError::Usage(
                "give either --beta or --features, not both".into(),
            ));
        }
        let model = ModelIndex::new(zero_based(&args.features, p)?);
        let fit = fit_mle(&lf, &data, &model, &FitOptions::default())?;
        let mut beta = vec![0.0; p];
        for (&j, &b) in model.indices().iter().zip(&fit.beta[1..]) {
            beta[j] = b;
        }
        beta
    } else {
        parse_sparse_beta(&args.beta, p)?
    };
    let r = c6_diagnostics(&lf, &data, &beta0)?;
    let mut table = Table::new(["quantity", "value"]);
    for (k, v) in [
        ("n", r.n.to_string()),
        ("reference", num(r.reference)),
        ("score_ratio", num(r.score_ratio)),
        (
            "score_ratio_feature",
            (r.score_ratio_column + 1).to_string(),
        ),
        (
            "score_ratio_below_reference",
            r.score_ratio_below_reference().to_string(),
        ),
        ("curvature_ratio", opt_num(r.curvature_ratio)),
        (
            "curvature_ratio_below_reference",
            r.curvature_ratio_below_reference()
                .map_or_else(|| "NA".into(), |b| b.to_string()),
        ),
        ("max_abs_x", num(r.max_abs_x)),
        ("max_abs_h1", num(r.max_abs_h1)),
        ("max_abs_h2", num(r.max_abs_h2)),
        ("min_variance", num(r.min_variance)),
        ("max_variance", num(r.max_variance)),
        ("zero_columns", r.zero_columns.to_string()),
    ] {
        table.push(vec![k.into(), v]);
    }
    finish(
        out,
        "diagnose",
        &args,
        Value::Null,
        &[("diagnose.tsv", &table)],
        Vec::new(),
    )?;
    Ok(table.to_tsv())
}
