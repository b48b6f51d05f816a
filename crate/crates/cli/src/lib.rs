//! Command-line front end for `rir-core`.
//!
//! [`run`] executes a parsed [`Cli`] and writes the primary output to the
//! given writer (or to `--out`). Errors carry the process exit code:
//! 2 for invalid input, 3 for numerical failures, 4 for unmet preconditions.

pub mod args;
pub mod parse;
mod report;

use std::fs;
use std::io::Write;
use std::time::Instant;

use rir_core::cyclicnet::{characteristic_poly, DiagPerturbation};
use rir_core::nyquistdata::{
    eigen_markers, gain_crossing_frequencies, inverse_nyquist_curve, monotone_gain_check,
    value_set_band, value_set_distance, FrequencyGrid,
};
use rir_core::rirbounds::{self, analyze, AnalysisOptions, Tolerances};
use rir_core::{CyclicNetwork, ErrorKind, RationalFn, RirError};
use serde_json::json;
use thiserror::Error;

pub use args::Cli;
use args::{
    AgentArgs, Command, Format, HomogenizeArgs, NyquistArgs, RirCommand, SweepArgs, VerifyArgs,
};
use report::{fmt_num, ComplexJson, RirJson, SweepRow};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] RirError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation => "validation",
                ErrorKind::Numerical => "numerical",
                ErrorKind::Precondition => "precondition",
            },
            CliError::Usage(_) | CliError::Io(_) => "validation",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "numerical" => 3,
            "precondition" => 4,
            _ => 2,
        }
    }

    /// Machine-readable form written to standard error.
    pub fn to_json(&self) -> String {
        json!({
            "error": {
                "kind": self.kind(),
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, CliError> {
    let ok = |v: f64, strict: bool| v.is_finite() && if strict { v > 0.0 } else { v >= 0.0 };
    if !ok(cli.tol_axis, false) {
        return Err(CliError::Usage(format!(
            "--tol-axis must be >= 0, got {}",
            cli.tol_axis
        )));
    }
    if !ok(cli.margin_req, false) {
        return Err(CliError::Usage(format!(
            "--margin-req must be >= 0, got {}",
            cli.margin_req
        )));
    }
    if !ok(cli.rho_bisect_tol, true) {
        return Err(CliError::Usage(format!(
            "--rho-bisect-tol must be > 0, got {}",
            cli.rho_bisect_tol
        )));
    }
    Ok(Tolerances {
        tol_axis: cli.tol_axis,
        margin_req: cli.margin_req,
        rho_bisect_tol: cli.rho_bisect_tol,
    })
}

fn agent(a: &AgentArgs) -> Result<RationalFn, CliError> {
    match (a.gain, a.tau, &a.num, &a.den) {
        (Some(k), Some(tau), None, None) => {
            if !(k > 0.0 && tau > 0.0) {
                return Err(CliError::Usage(format!(
                    "K and tau must be positive (got K={k}, tau={tau})"
                )));
            }
            Ok(RationalFn::from_real(&[k], &[tau, 1.0])?)
        }
        (None, None, Some(num), Some(den)) => Ok(RationalFn::from_real(num, den)?),
        _ => Err(CliError::Usage(
            "give either --K and --tau, or --num and --den".into(),
        )),
    }
}

/// Runs one command, writing its output to `out` unless `--out` is set.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let tol = tolerances(cli)?;
    let pool = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(t) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start thread pool: {e}")))?,
        ),
        None => None,
    };
    let mut buf: Vec<u8> = Vec::new();
    let mut body = || -> Result<(), CliError> {
        let out = &mut buf;
        match &cli.command {
            Command::Rir(cmd) => cmd_rir(cli, cmd, &tol, out),
            Command::Sweep(a) => cmd_sweep(cli, a, &tol, out),
            Command::Nyquist(a) => cmd_nyquist(cli, a, &tol, out),
            Command::Verify(a) => cmd_verify(cli, a, &tol, out),
            Command::Homogenize(a) => cmd_homogenize(cli, a, out),
        }
    };
    let result = match pool {
        Some(p) => p.install(body),
        None => body(),
    };
    out.write_all(&buf)?;
    result
}

fn emit(cli: &Cli, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.out {
        Some(path) => fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json_only(cli: &Cli, what: &str) -> Result<(), CliError> {
    if cli.format == Some(Format::Csv) {
        return Err(CliError::Usage(format!("{what} output is JSON only")));
    }
    Ok(())
}

fn cmd_rir(
    cli: &Cli,
    cmd: &RirCommand,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let net = match cmd {
        RirCommand::FirstOrder(a) => CyclicNetwork::first_order(a.n, a.mu, a.gain, a.tau)?,
        RirCommand::General(a) => {
            CyclicNetwork::new(a.n, a.mu, RationalFn::from_real(&a.num, &a.den)?)?
        }
    };
    let opts = AnalysisOptions {
        tolerances: *tol,
        ..AnalysisOptions::default()
    };
    let start = Instant::now();
    let report = analyze(&net, &opts)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let doc = RirJson::new(&net, &report, tol, runtime_ms);
    let text = match cli.format.unwrap_or(Format::Json) {
        Format::Json => serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)? + "\n",
        Format::Csv => doc.to_csv()?,
    };
    emit(cli, &text, out)?;
    if report.rho_plus.is_none() {
        return Err(RirError::NotStrictlyUnstable.into());
    }
    Ok(())
}

fn sweep_row(n: usize, h: &RationalFn, mu: f64, first_order: bool, tol: &Tolerances) -> SweepRow {
    let result = CyclicNetwork::new(n, mu, h.clone()).and_then(|net| {
        let opts = AnalysisOptions {
            tolerances: *tol,
            ..AnalysisOptions::default()
        };
        analyze(&net, &opts)
    });
    SweepRow::new(n, first_order, result)
}

fn cmd_sweep(
    cli: &Cli,
    a: &SweepArgs,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    use rayon::prelude::*;
    let h = agent(&a.agent)?;
    let first_order = a.agent.gain.is_some();
    let ns: Vec<usize> = (a.n_from..=a.n_to).filter(|n| n % 2 == 1).collect();
    let rows: Vec<SweepRow> = ns
        .par_iter()
        .map(|&n| sweep_row(n, &h, a.agent.mu, first_order, tol))
        .collect();
    let text = match cli.format.unwrap_or(Format::Csv) {
        Format::Csv => report::sweep_csv(&rows, first_order)?,
        Format::Json => {
            let docs: Vec<_> = rows.iter().map(|r| r.to_json(first_order)).collect();
            serde_json::to_string_pretty(&docs).map_err(std::io::Error::other)? + "\n"
        }
    };
    emit(cli, &text, out)
}

/// Log grid mirrored to negative frequencies around 0.
fn symmetric_grid(points: usize) -> Result<FrequencyGrid, CliError> {
    if points < 2 {
        return Err(CliError::Usage("--grid-points must be at least 2".into()));
    }
    let pos = FrequencyGrid::log_spaced(1e-3, 1e3, points, false)?;
    let mut w: Vec<f64> = pos.omegas().iter().rev().map(|x| -x).collect();
    w.push(0.0);
    w.extend_from_slice(pos.omegas());
    Ok(FrequencyGrid::new(w)?)
}

fn cmd_nyquist(
    cli: &Cli,
    a: &NyquistArgs,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if cli.format == Some(Format::Json) {
        return Err(CliError::Usage("nyquist output is CSV only".into()));
    }
    let h = agent(&a.agent)?;
    let net = CyclicNetwork::new(a.n, a.agent.mu, h.clone())?;
    let rho = match a.rho {
        Some(r) => r,
        None => rirbounds::rho_plus(&net, tol.tol_axis)?.0,
    };
    if !(rho > 0.0 && rho < 1.0) {
        return Err(CliError::Usage(format!(
            "--rho must lie in (0, 1), got {rho}"
        )));
    }
    let grid = symmetric_grid(a.grid_points)?;
    let curve = inverse_nyquist_curve(&h, &grid)?;
    let band_grid = symmetric_grid(a.band_points)?;
    let band = value_set_band(&h, rho, &band_grid, a.alphas)?;
    let markers = eigen_markers(net.n(), net.mu())?;

    let mut curve_csv = String::from("omega,re,im\n");
    for (w, z) in &curve {
        curve_csv.push_str(&format!(
            "{},{},{}\n",
            fmt_num(*w),
            fmt_num(z.re),
            fmt_num(z.im)
        ));
    }
    let mut band_csv = String::from("omega,alpha,re,im\n");
    for s in &band.slices {
        for (alpha, z) in band.alphas.iter().zip(&s.boundary) {
            band_csv.push_str(&format!(
                "{},{},{},{}\n",
                fmt_num(s.omega),
                fmt_num(*alpha),
                fmt_num(z.re),
                fmt_num(z.im)
            ));
        }
    }
    let mut markers_csv = String::from("k,re,im\n");
    for (k, z) in markers.iter().enumerate() {
        markers_csv.push_str(&format!("{},{},{}\n", k + 1, fmt_num(z.re), fmt_num(z.im)));
    }

    match &cli.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            fs::write(dir.join("curve.csv"), &curve_csv)?;
            fs::write(dir.join("band.csv"), &band_csv)?;
            fs::write(dir.join("markers.csv"), &markers_csv)?;
            let positive: Vec<_> = curve.iter().filter(|(w, _)| *w >= 0.0).copied().collect();
            let summary = json!({
                "rho": rho,
                "files": ["curve.csv", "band.csv", "markers.csv"],
                "monotone_gain": monotone_gain_check(&positive),
                "crossing_frequencies": gain_crossing_frequencies(&h, net.mu())?,
                "lambda1_distance": value_set_distance(&h, markers[0])?,
            });
            writeln!(
                out,
                "{}",
                serde_json::to_string_pretty(&summary).map_err(std::io::Error::other)?
            )?;
        }
        None => {
            write!(
                out,
                "# curve\n{curve_csv}# band\n{band_csv}# markers\n{markers_csv}"
            )?;
        }
    }
    Ok(())
}

fn cmd_verify(
    cli: &Cli,
    a: &VerifyArgs,
    tol: &Tolerances,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    json_only(cli, "verify")?;
    let h = agent(&a.agent)?;
    let net = CyclicNetwork::new(a.n, a.agent.mu, h)?;
    let channels = a
        .deltas
        .iter()
        .map(|d| {
            let (num, den) = parse::parse_channel(d)?;
            Ok(RationalFn::from_real(&num, &den)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let pert = match channels.len() {
        1 => DiagPerturbation::homogeneous(channels[0].clone(), net.n())?,
        m if m == net.n() => DiagPerturbation::new(channels)?,
        m => {
            return Err(RirError::LengthMismatch {
                expected: net.n(),
                got: m,
            }
            .into())
        }
    };
    let roots = characteristic_poly(&net, Some(&pert))?.roots()?;
    let max_re = roots.iter().map(|r| r.re).fold(f64::NEG_INFINITY, f64::max);
    let doc = json!({
        "stabilizes": max_re < -tol.margin_req,
        "max_root_real_part": max_re,
        "norms": pert.norms(),
        "max_norm": pert.norm(),
    });
    let text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)? + "\n";
    emit(cli, &text, out)
}

fn cmd_homogenize(cli: &Cli, a: &HomogenizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    json_only(cli, "homogenize")?;
    let deltas = a
        .deltas
        .iter()
        .map(|d| parse::parse_complex(d))
        .collect::<Result<Vec<_>, _>>()?;
    let delta = rirbounds::homogenize(&deltas, a.r)?;
    let one = num_complex::Complex64::new(1.0, 0.0);
    let product: num_complex::Complex64 = deltas.iter().map(|d| one + d).product();
    let scale: f64 = deltas.iter().map(|d| (one + d).norm()).product();
    let residual = ((one + delta).powu(deltas.len() as u32) - product).norm() / scale;
    let doc = json!({
        "delta": ComplexJson::from(delta),
        "abs": delta.norm(),
        "product_residual": residual,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(std::io::Error::other)? + "\n";
    emit(cli, &text, out)
}
