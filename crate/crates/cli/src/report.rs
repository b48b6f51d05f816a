use num_complex::Complex64;
use rir_core::rirbounds::{RirReport, Tolerances};
use rir_core::{Classification, CyclicNetwork, RirError};
use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Debug, Serialize)]
pub struct AgentJson {
    pub num: Vec<f64>,
    pub den: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct NominalJson {
    pub classification: &'static str,
    pub roots: Vec<ComplexJson>,
    pub margin: f64,
}

#[derive(Debug, Serialize)]
pub struct RirJson {
    pub n: usize,
    pub mu: f64,
    pub h: AgentJson,
    pub nominal: NominalJson,
    pub rho_p: f64,
    pub rho_plus: Option<f64>,
    pub unstable_indices: Vec<usize>,
    pub marginal_indices: Vec<usize>,
    pub closed_form_first_order: Option<f64>,
    pub norm_based_first_order: Option<f64>,
    pub agree: Option<bool>,
    pub rho_upper_homogeneous: Option<f64>,
    pub rho_c_estimate: Option<f64>,
    pub consistency_flags: Vec<String>,
    pub tolerances: Tolerances,
    pub runtime_ms: f64,
}

impl RirJson {
    pub fn new(net: &CyclicNetwork, r: &RirReport, tol: &Tolerances, runtime_ms: f64) -> Self {
        let real = |p: &rir_core::ComplexPoly| p.coeffs().iter().map(|c| c.re).collect();
        let mut roots = r.nominal.stability.roots.clone();
        roots.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
        RirJson {
            n: net.n(),
            mu: net.mu(),
            h: AgentJson {
                num: real(net.h().num()),
                den: real(net.h().den()),
            },
            nominal: NominalJson {
                classification: r.nominal.stability.classification.as_str(),
                roots: roots.into_iter().map(ComplexJson::from).collect(),
                margin: r.nominal.stability.stability_margin,
            },
            rho_p: r.rho_p,
            rho_plus: r.rho_plus,
            unstable_indices: r.unstable_indices.clone(),
            marginal_indices: r.marginal_indices.clone(),
            closed_form_first_order: r.first_order.map(|f| f.closed_form),
            norm_based_first_order: r.first_order.map(|f| f.norm_based),
            agree: r.first_order.map(|f| f.agree),
            rho_upper_homogeneous: r.rho_upper_homogeneous,
            rho_c_estimate: r.rho_c_estimate,
            consistency_flags: r.consistency_flags.clone(),
            tolerances: *tol,
            runtime_ms,
        }
    }

    /// Scalar fields as a one-row table.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "n",
            "mu",
            "classification",
            "margin",
            "rho_p",
            "rho_plus",
            "rho_upper_homogeneous",
            "rho_c_estimate",
            "closed_form_first_order",
            "norm_based_first_order",
            "agree",
        ])
        .map_err(csv_err)?;
        w.write_record([
            self.n.to_string(),
            fmt_num(self.mu),
            self.nominal.classification.to_string(),
            fmt_num(self.nominal.margin),
            fmt_num(self.rho_p),
            fmt_opt(self.rho_plus),
            fmt_opt(self.rho_upper_homogeneous),
            fmt_opt(self.rho_c_estimate),
            fmt_opt(self.closed_form_first_order),
            fmt_opt(self.norm_based_first_order),
            self.agree.map(|a| a.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
        finish(w)
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(std::io::Error::other(e)))
}

pub struct SweepRow {
    pub n: usize,
    pub rho_p: Option<f64>,
    pub rho_plus: Option<f64>,
    pub rho_upper_homogeneous: Option<f64>,
    pub rho_c_estimate: Option<f64>,
    pub nominal_unstable: Option<bool>,
    pub closed_form: Option<f64>,
    pub norm_based: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn new(n: usize, first_order: bool, result: Result<RirReport, RirError>) -> Self {
        match result {
            Ok(r) => {
                // radii are reported only for strictly unstable nominals
                let unstable =
                    r.nominal.stability.classification == Classification::StrictlyUnstable;
                let keep = |x: Option<f64>| x.filter(|_| unstable);
                let fo = r.first_order.filter(|_| first_order && unstable);
                SweepRow {
                    n,
                    rho_p: keep(Some(r.rho_p)),
                    rho_plus: keep(r.rho_plus),
                    rho_upper_homogeneous: keep(r.rho_upper_homogeneous),
                    rho_c_estimate: keep(r.rho_c_estimate),
                    nominal_unstable: Some(unstable),
                    closed_form: fo.map(|f| f.closed_form),
                    norm_based: fo.map(|f| f.norm_based),
                    error: None,
                }
            }
            Err(e) => SweepRow {
                n,
                rho_p: None,
                rho_plus: None,
                rho_upper_homogeneous: None,
                rho_c_estimate: None,
                nominal_unstable: None,
                closed_form: None,
                norm_based: None,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn to_json(&self, first_order: bool) -> Value {
        let mut v = json!({
            "n": self.n,
            "rho_p": self.rho_p,
            "rho_plus": self.rho_plus,
            "rho_upper_homogeneous": self.rho_upper_homogeneous,
            "rho_c_estimate": self.rho_c_estimate,
            "nominal_unstable": self.nominal_unstable,
        });
        if first_order {
            v["closed_form_first_order"] = json!(self.closed_form);
            v["norm_based_first_order"] = json!(self.norm_based);
        }
        v["error"] = json!(self.error);
        v
    }
}

pub fn sweep_csv(rows: &[SweepRow], first_order: bool) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "n",
        "rho_p",
        "rho_plus",
        "rho_upper_homogeneous",
        "rho_c_estimate",
        "nominal_unstable",
    ];
    if first_order {
        header.extend(["closed_form_first_order", "norm_based_first_order"]);
    }
    header.push("error");
    w.write_record(&header).map_err(csv_err)?;
    for r in rows {
        let mut rec = vec![
            r.n.to_string(),
            fmt_opt(r.rho_p),
            fmt_opt(r.rho_plus),
            fmt_opt(r.rho_upper_homogeneous),
            fmt_opt(r.rho_c_estimate),
            r.nominal_unstable
                .map(|b| b.to_string())
                .unwrap_or_default(),
        ];
        if first_order {
            rec.push(fmt_opt(r.closed_form));
            rec.push(fmt_opt(r.norm_based));
        }
        rec.push(r.error.clone().unwrap_or_default());
        w.write_record(&rec).map_err(csv_err)?;
    }
    finish(w)
}
