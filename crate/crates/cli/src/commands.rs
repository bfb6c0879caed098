use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use serde::Serialize;
use tailfit_bench::config::load_study;
use tailfit_bench::study::{write_comparison_csv, write_raw_csv, write_summary_csv, StudyKind};
use tailfit_bench::{run_study, StudySpec};
use tailfit_core::empirical::rank_transform;
use tailfit_core::mestim::{fit_bivariate, plugin_covariance_ai};
use tailfit_core::simulate::{simulate, write_simulation};
use tailfit_core::spatial::{fit_spatial, pairwise_fits, DroppedPair, PairResult};
use tailfit_core::{
    FitOptions, Noise, SimModel, SimSpec, SpatialMethod, SpatialModel, TailFamily, TailIndexMode, ThetaVector,
    WeightScheme,
};

use crate::args::{Cli, Command, FitArgs, FitSpatialArgs, ModelArg, SimulateArgs, SpatialMethodArg, StudyArgs};
use crate::io::{read_coords_csv, read_numeric_csv};
use crate::output::emit;
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(cli, a),
        Command::Fit(a) => cmd_fit(cli, a),
        Command::FitSpatial(a) => cmd_fit_spatial(cli, a),
        Command::Study(a) => cmd_study(cli, a),
    }
}

fn need(v: Option<f64>, flag: &str, model: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("model {model} requires --{flag}")))
}

#[derive(Serialize)]
struct SimulateManifest<'a> {
    #[serde(flatten)]
    spec: &'a SimSpec,
    rows: usize,
    columns: usize,
    out: String,
    coords_out: Option<String>,
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), CliError> {
    let model = match a.model {
        ModelArg::M1 => SimModel::M1 { theta: need(a.theta, "theta", "m1")? },
        ModelArg::M2 => SimModel::M2 { nu: need(a.nu, "nu", "m2")?, phi: need(a.phi, "phi", "m2")?, r: need(a.r, "r", "m2")? },
        ModelArg::M3 => SimModel::M3 { alpha_r: need(a.alpha_r, "alpha-r", "m3")?, alpha_w: a.alpha_w },
        ModelArg::Ibr => {
            let path = a.coords.as_ref().ok_or_else(|| CliError::Usage("model ibr requires --coords".into()))?;
            SimModel::SpatialIbr {
                coords: read_coords_csv(path)?,
                alpha: need(a.alpha, "alpha", "ibr")?,
                beta: need(a.beta, "beta", "ibr")?,
            }
        }
    };
    let spec = SimSpec::new(model, a.n, cli.seed.unwrap_or(0))
        .with_noise(a.noise_alpha.map(|pareto_alpha| Noise { pareto_alpha }))
        .with_margins(a.margins.into());
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let data = simulate(&spec)?;
    let coords = write_simulation(&spec, &data, &a.out)?;
    emit(
        &SimulateManifest {
            spec: &spec,
            rows: data.nrows(),
            columns: data.ncols(),
            out: a.out.display().to_string(),
            coords_out: coords.map(|p| p.display().to_string()),
        },
        cli.format,
    )
}

fn fit_options(cli: &Cli, zeta: crate::args::ZetaArg) -> FitOptions {
    let mut o = FitOptions::with_seed(cli.seed.unwrap_or(0));
    o.zeta_profile = zeta.into();
    o
}

#[derive(Serialize)]
struct FitOutput {
    family: TailFamily,
    columns: [String; 2],
    n: usize,
    theta_hat: Vec<f64>,
    zeta_hat: f64,
    sigma_hat: f64,
    eta_hat: f64,
    objective: f64,
    k: usize,
    m: f64,
    converged: bool,
    boundary_flag: bool,
    /// Plug-in covariance of `(θ̂, nζ̂/m)`.
    covariance: Option<Vec<Vec<f64>>>,
}

fn cmd_fit(cli: &Cli, a: &FitArgs) -> Result<(), CliError> {
    let family: TailFamily = a.family.into();
    let table = read_numeric_csv(&a.input)?;
    if table.data.nrows() < 2 {
        return Err(CliError::Input(format!("{}: need at least 2 data rows", a.input.display())));
    }
    let (c1, c2) = match &a.columns {
        Some(c) => (table.column(&c[0])?, table.column(&c[1])?),
        None if table.headers.len() >= 2 => (0, 1),
        None => return Err(CliError::Input(format!("{}: need at least 2 columns", a.input.display()))),
    };
    if c1 == c2 {
        return Err(CliError::Usage("--columns must name two different columns".into()));
    }
    let theta_ref = match &a.theta_ref {
        Some(v) => ThetaVector::new(family, v.clone()).map_err(|e| CliError::Usage(e.to_string()))?,
        None => family.default_reference(),
    };
    let weights = WeightScheme::preset(family, &theta_ref, a.weights).map_err(|e| CliError::Usage(e.to_string()))?;
    let mode = match (a.threshold.k, a.threshold.m) {
        (Some(k), _) => TailIndexMode::FixedK(k),
        (_, Some(m)) => TailIndexMode::EffectiveM(m),
        _ => unreachable!("clap enforces one of --k / --m"),
    };
    let sample = rank_transform(&table.data)?;
    let fit = fit_bivariate(&sample, (c1, c2), family, &weights, mode, &fit_options(cli, a.zeta_profile))?;
    let covariance = if a.covariance {
        let c = plugin_covariance_ai(family, &fit, &weights)?;
        Some((0..c.nrows()).map(|i| c.row(i).iter().copied().collect()).collect())
    } else {
        None
    };
    emit(
        &FitOutput {
            family,
            columns: [table.headers[c1].clone(), table.headers[c2].clone()],
            n: sample.n(),
            theta_hat: fit.theta_hat.values().to_vec(),
            zeta_hat: fit.zeta_hat,
            sigma_hat: fit.sigma_hat,
            eta_hat: fit.eta_hat,
            objective: fit.objective,
            k: fit.k_used,
            m: fit.m_used,
            converged: fit.converged,
            boundary_flag: fit.boundary,
            covariance,
        },
        cli.format,
    )
}

#[derive(Serialize)]
struct PairRow {
    site1: String,
    site2: String,
    distance: f64,
    k: usize,
    m: f64,
    theta_hat: Option<f64>,
    zeta_hat: Option<f64>,
    converged: bool,
    boundary: bool,
}

#[derive(Serialize)]
struct DroppedRow {
    site1: String,
    site2: String,
    reason: String,
}

#[derive(Serialize)]
struct SpatialOutput {
    method: &'static str,
    m: usize,
    alpha_hat: Option<f64>,
    beta_hat: Option<f64>,
    objective: Option<f64>,
    converged: Option<bool>,
    boundary_flag: Option<bool>,
    pairs: Vec<PairRow>,
    dropped: Vec<DroppedRow>,
}

fn cmd_fit_spatial(cli: &Cli, a: &FitSpatialArgs) -> Result<(), CliError> {
    let table = read_numeric_csv(&a.input)?;
    let coords = read_coords_csv(&a.coords)?;
    if coords.len() != table.headers.len() {
        return Err(CliError::Input(format!(
            "{} has {} locations but {} has {} columns",
            a.coords.display(),
            coords.len(),
            a.input.display(),
            table.headers.len()
        )));
    }
    let model = SpatialModel::new(coords).map_err(|e| CliError::Input(e.to_string()))?;
    let family = model.link().bivariate_family();
    let weights = WeightScheme::preset(family, &family.default_reference(), a.weights)?;
    let sample = rank_transform(&table.data)?;
    let opts = fit_options(cli, a.zeta_profile);
    let name = |i: usize| table.headers[i].clone();
    let dropped_rows = |d: &[DroppedPair]| -> Vec<DroppedRow> {
        d.iter().map(|d| DroppedRow { site1: name(d.pair.0), site2: name(d.pair.1), reason: d.reason.clone() }).collect()
    };
    let pair_row = |p: &PairResult| PairRow {
        site1: name(p.pair.0),
        site2: name(p.pair.1),
        distance: p.distance,
        k: p.k,
        m: p.m,
        theta_hat: p.theta_hat,
        zeta_hat: p.zeta_hat,
        converged: p.converged,
        boundary: p.boundary,
    };
    let out = match a.method {
        SpatialMethodArg::Pairwise => {
            let pw = pairwise_fits(&sample, &model, a.m, &weights, &opts)?;
            SpatialOutput {
                method: "pairwise",
                m: a.m,
                alpha_hat: None,
                beta_hat: None,
                objective: None,
                converged: None,
                boundary_flag: None,
                pairs: pw
                    .fits
                    .iter()
                    .map(|(s, f)| PairRow {
                        site1: name(f.pair.0),
                        site2: name(f.pair.1),
                        distance: model.distances()[*s],
                        k: f.k_used,
                        m: f.m_used,
                        theta_hat: Some(f.theta_hat.values()[0]),
                        zeta_hat: Some(f.zeta_hat),
                        converged: f.converged,
                        boundary: f.boundary,
                    })
                    .collect(),
                dropped: dropped_rows(&pw.dropped),
            }
        }
        SpatialMethodArg::Ls | SpatialMethodArg::Joint => {
            let (method, label) = match a.method {
                SpatialMethodArg::Ls => (SpatialMethod::LeastSquares, "least_squares"),
                _ => (SpatialMethod::Joint, "joint"),
            };
            let fit = fit_spatial(&sample, &model, a.m, &weights, method, &opts)?;
            SpatialOutput {
                method: label,
                m: a.m,
                alpha_hat: Some(fit.alpha_hat),
                beta_hat: Some(fit.beta_hat),
                objective: Some(fit.objective),
                converged: Some(fit.converged),
                boundary_flag: Some(fit.boundary),
                pairs: fit.pairs.iter().map(pair_row).collect(),
                dropped: dropped_rows(&fit.dropped),
            }
        }
    };
    emit(&out, cli.format)
}

#[derive(Serialize)]
struct StudyOutput<'a> {
    study: &'a StudySpec,
    outputs: Vec<String>,
    failed: usize,
    total: usize,
    wall_clock_secs: f64,
}

fn cmd_study(cli: &Cli, a: &StudyArgs) -> Result<(), CliError> {
    let mut spec = load_study(&a.config)?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(r) = a.replications {
        spec.replications = r;
    }
    spec.validate()?;
    std::fs::create_dir_all(&a.out_dir)?;
    let res = run_study(&spec)?;
    let path = |suffix: &str| -> PathBuf { a.out_dir.join(format!("{}_{suffix}.csv", spec.name)) };
    let mut outputs = Vec::new();
    let raw = path("raw");
    write_raw_csv(&res, BufWriter::new(File::create(&raw)?))?;
    outputs.push(raw);
    let summary = path("summary");
    write_summary_csv(&res, &spec.metrics, BufWriter::new(File::create(&summary)?))?;
    outputs.push(summary);
    if spec.kind == StudyKind::Spatial {
        let pairs = path("pairs");
        write_comparison_csv(&res, BufWriter::new(File::create(&pairs)?))?;
        outputs.push(pairs);
    }
    emit(
        &StudyOutput {
            study: &spec,
            outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
            failed: res.failed,
            total: res.total,
            wall_clock_secs: res.wall_clock_secs,
        },
        cli.format,
    )
}
