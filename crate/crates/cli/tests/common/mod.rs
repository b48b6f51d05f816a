#![allow(dead_code)]

use std::process::Command;

use num_complex::Complex64;
use serde_json::Value;

pub const BIN: &str = env!("CARGO_BIN_EXE_cyclic-rir");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }

    pub fn error(&self) -> Value {
        serde_json::from_str(self.stderr.trim())
            .unwrap_or_else(|e| panic!("stderr is not JSON ({e}): {}", self.stderr))
    }
}

pub fn cli_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CYCLIC_RIR_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

pub fn cli(args: &[&str]) -> Run {
    cli_env(args, &[])
}

/// Report with the timing field removed, for byte comparisons.
pub fn without_runtime(mut v: Value) -> String {
    if let Some(o) = v.as_object_mut() {
        o.remove("runtime_ms");
    }
    v.to_string()
}

pub fn horner(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    f1.max(f2)
}

/// Peak of `f` over `0`, a log grid on `[1e-4, 1e4]` (mirrored when
/// `both_signs`), and `±1e9`; the best cell is refined by golden section.
pub fn grid_peak(f: impl Fn(f64) -> f64, points: usize, both_signs: bool) -> f64 {
    let pos = log_space(1e-4, 1e4, points);
    let mut w: Vec<f64> = Vec::with_capacity(2 * points + 3);
    if both_signs {
        w.push(-1e9);
        w.extend(pos.iter().rev().map(|x| -x));
    }
    w.push(0.0);
    w.extend(pos.iter().copied());
    w.push(1e9);
    let vals: Vec<f64> = w.iter().map(|&x| f(x)).collect();
    let (i, &best) = vals
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty grid");
    if i == 0 || i + 1 == w.len() {
        return best;
    }
    best.max(golden_max(&f, w[i - 1], w[i + 1]))
}
