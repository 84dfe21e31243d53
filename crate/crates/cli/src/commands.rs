use std::path::{Path, PathBuf};

use log::{info, warn};
use serde::Serialize;
use yamabe_core::continuation::{locate_degenerate, trace_branch, Branch, DegeneracyReport, Direction};
use yamabe_core::geometry::{identity_errors, lifted_residual, observed_order, sample_pairs, FDScheme, IdentityErrors};
use yamabe_core::model::{derived_constants, lambda_k, DerivedConstants};
use yamabe_core::polyspec;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::records::{branch_csv, branch_header, branch_records, branch_stem, csv_text, fmt_float, write_branch_jsonl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// lambda_k ladder as CSV
    Eigen,
    /// Gegenbauer values, zeros and integrals
    Poly,
    /// trace D_k^+ and D_k^-
    Branch,
    /// degenerate solution on D_k^+
    Degenerate,
    /// identities and lifted PDE residuals on the product of spheres
    Verify,
}

/// Run one command, writing its files into `cfg.output_dir`. Returns the
/// paths written.
pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    cfg.validate()?;
    std::fs::create_dir_all(&cfg.output_dir)?;
    match command {
        Command::Eigen => eigen(cfg),
        Command::Poly => poly(cfg),
        Command::Branch => branch(cfg),
        Command::Degenerate => degenerate(cfg),
        Command::Verify => verify(cfg),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, text)?;
    info!("wrote {}", path.display());
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn eigen(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = cfg.params()?;
    let mut text = String::from("k,lambda_k\n");
    for k in 1..=cfg.k {
        text.push_str(&format!("{k},{}\n", fmt_float(lambda_k(k, &params)?)));
    }
    print!("{text}");
    Ok(vec![write(&cfg.output_dir, "eigen.csv", &text)?])
}

fn poly(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (k, n) = (cfg.k, cfg.n);
    let dir = &cfg.output_dir;
    let samples = 201;
    let mut rows = Vec::with_capacity(samples);
    for i in 0..samples {
        let t = -1.0 + 2.0 * i as f64 / (samples - 1) as f64;
        rows.push(vec![t, polyspec::gegenbauer_eval(k, n, t)?, polyspec::gegenbauer_deriv(k, n, t)?]);
    }
    let values = csv_text(&["t", "P", "dP"], rows);
    let zeros = polyspec::gegenbauer_zeros(k, n)?;
    let zeros_text = csv_text(&["zero"], zeros.iter().map(|&z| vec![z]));

    let mut integrals = String::from("quantity,value\n");
    let entries = [
        ("weight_mass", polyspec::weight_mass(n)),
        ("square_integral", polyspec::square_integral(k, n)?),
        ("cube_integral", polyspec::cube_integral(k, n)?),
        ("jacobi_eigenvalue", polyspec::JacobiParams::ultraspherical(n)?.eigenvalue(k)),
    ];
    for (name, v) in entries {
        integrals.push_str(&format!("{name},{}\n", fmt_float(v)));
    }

    let lin = polyspec::linearization_coeffs(k, n)?;
    let lin_text = csv_text(
        &["j", "G_j"],
        lin.coeffs.iter().enumerate().map(|(j, &g)| vec![j as f64, g]),
    );
    let gasper = polyspec::gasper_recurrence_report(k, n)?;

    Ok(vec![
        write(dir, "poly_values.csv", &values)?,
        write(dir, "poly_zeros.csv", &zeros_text)?,
        write(dir, "poly_integrals.csv", &integrals)?,
        write(dir, "poly_linearization.csv", &lin_text)?,
        write(dir, "poly_gasper.json", &to_json(&gasper)?)?,
    ])
}

fn trace(cfg: &RunConfig, direction: Direction) -> Result<Branch, CliError> {
    let sys = cfg.system()?;
    let branch = trace_branch(cfg.k, direction, &cfg.continuation(), &sys)?;
    info!(
        "k = {} {}: {} points, stopped by {:?}",
        cfg.k,
        direction.name(),
        branch.points.len(),
        branch.termination
    );
    Ok(branch)
}

fn write_branch(cfg: &RunConfig, branch: &Branch) -> Result<Vec<PathBuf>, CliError> {
    let stem = branch_stem(branch.k, branch.direction);
    let records = branch_records(branch);
    let jsonl = cfg.output_dir.join(format!("{stem}.jsonl"));
    write_branch_jsonl(&jsonl, &branch_header(branch, cfg), &records)?;
    info!("wrote {}", jsonl.display());
    let csv = write(&cfg.output_dir, &format!("{stem}.csv"), &branch_csv(&records))?;
    Ok(vec![jsonl, csv])
}

fn branch(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (plus, minus) = std::thread::scope(|scope| {
        let plus = scope.spawn(|| trace(cfg, Direction::Plus));
        let minus = scope.spawn(|| trace(cfg, Direction::Minus));
        (join(plus), join(minus))
    });
    // Write whatever succeeded before reporting a failure.
    let mut written = Vec::new();
    let mut first_err = None;
    for result in [plus, minus] {
        match result {
            Ok(b) => written.extend(write_branch(cfg, &b)?),
            Err(e) => {
                warn!("{e}");
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

fn join<T>(handle: std::thread::ScopedJoinHandle<'_, Result<T, CliError>>) -> Result<T, CliError> {
    handle
        .join()
        .unwrap_or_else(|_| Err(CliError::Other("worker thread panicked".into())))
}

#[derive(Serialize)]
struct DegenerateOutput<'a> {
    n: usize,
    delta: f64,
    q: f64,
    #[serde(rename = "N")]
    grid_degree: usize,
    lambda_k: f64,
    constants: DerivedConstants,
    #[serde(flatten)]
    report: &'a DegeneracyReport,
}

/// Trace `D_k^+` and locate its degenerate point.
pub fn find_degenerate(cfg: &RunConfig) -> Result<(Branch, DegeneracyReport), CliError> {
    let sys = cfg.system()?;
    let branch = trace(cfg, Direction::Plus)?;
    match locate_degenerate(&branch, &cfg.continuation(), &sys)? {
        Some(rep) => Ok((branch, rep)),
        None => Err(CliError::NoConvergence(format!(
            "no degenerate point found on the k = {} branch ({} points, stopped by {:?})",
            cfg.k,
            branch.points.len(),
            branch.termination
        ))),
    }
}

fn degenerate(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let (branch, rep) = find_degenerate(cfg)?;
    let mut written = write_branch(cfg, &branch)?;
    info!(
        "lambda* = {} (lambda_{} = {}), sigma = {:e}",
        rep.lambda_star,
        cfg.k,
        lambda_k(cfg.k, &cfg.params()?)?,
        rep.sigma_at_star
    );
    let params = cfg.params()?;
    let out = DegenerateOutput {
        n: cfg.n,
        delta: cfg.delta,
        q: cfg.q,
        grid_degree: cfg.grid_degree,
        lambda_k: lambda_k(cfg.k, &params)?,
        constants: derived_constants(&params)?,
        report: &rep,
    };
    let stem = format!("degenerate_k{}", cfg.k);
    written.push(write(&cfg.output_dir, &format!("{stem}.json"), &to_json(&out)?)?);
    let sys = cfg.system()?;
    let profile = csv_text(
        &["t", "phi"],
        sys.grid().nodes().iter().zip(&rep.phi_star).map(|(&t, &p)| vec![t, p]),
    );
    written.push(write(&cfg.output_dir, &format!("{stem}_profile.csv"), &profile)?);
    Ok(written)
}

#[derive(Serialize)]
struct IdentityReport {
    h: f64,
    errors: IdentityErrors,
    /// Steps used for the observed order.
    order_steps: [f64; 2],
    order_laplacian: f64,
    order_gradient: f64,
}

#[derive(Serialize)]
struct LiftedReport {
    lambda: f64,
    h: f64,
    residual: f64,
    residual_half_h: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    delta: f64,
    q: f64,
    sample_count: usize,
    seed: u64,
    identities: IdentityReport,
    trivial: LiftedReport,
    degenerate: Option<LiftedReport>,
}

fn verify(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let params = cfg.params()?;
    let scheme = cfg.scheme()?;
    let half = FDScheme::new(0.5 * cfg.h).map_err(|e| CliError::Config(e.to_string()))?;
    let pairs = sample_pairs(cfg.n, cfg.sample_count, cfg.seed)?;
    let order_steps = [0.02, 0.01];
    let coarse = identity_errors(&pairs, &FDScheme::new(order_steps[0])?, cfg.delta);
    let fine = identity_errors(&pairs, &FDScheme::new(order_steps[1])?, cfg.delta);
    let identities = IdentityReport {
        h: cfg.h,
        errors: identity_errors(&pairs, &scheme, cfg.delta),
        order_steps,
        order_laplacian: observed_order(coarse.laplacian, fine.laplacian),
        order_gradient: observed_order(coarse.gradient, fine.gradient),
    };

    let sys = cfg.system()?;
    let lifted = |phi: &[f64], lambda: f64| -> Result<LiftedReport, CliError> {
        Ok(LiftedReport {
            lambda,
            h: cfg.h,
            residual: lifted_residual(phi, lambda, sys.grid(), &params, cfg.sample_count, &scheme, cfg.seed)?,
            residual_half_h: lifted_residual(phi, lambda, sys.grid(), &params, cfg.sample_count, &half, cfg.seed)?,
        })
    };
    let trivial = lifted(&vec![0.0; sys.size()], lambda_k(cfg.k, &params)?)?;
    let degenerate = match find_degenerate(cfg) {
        Ok((_, rep)) => Some(lifted(&rep.phi_star, rep.lambda_star)?),
        Err(CliError::NoConvergence(msg)) => {
            warn!("{msg}; skipping the degenerate profile");
            None
        }
        Err(e) => return Err(e),
    };
    let report = VerifyReport {
        n: cfg.n,
        delta: cfg.delta,
        q: cfg.q,
        sample_count: cfg.sample_count,
        seed: cfg.seed,
        identities,
        trivial,
        degenerate,
    };
    Ok(vec![write(&cfg.output_dir, "verify.json", &to_json(&report)?)?])
}
