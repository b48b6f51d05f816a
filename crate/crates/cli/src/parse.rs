//! Text formats: complex numbers `a+bi` and perturbation channels `NUM:DEN`.

use num_complex::Complex64;

use crate::CliError;

/// Parses `a+bi`, `a-bi`, `a`, or `bi` (`j` is accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let bad = || CliError::Usage(format!("invalid complex number '{text}' (expected a+bi)"));
    let t = text.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return t
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.trim_start_matches('+').parse().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("invalid coefficient '{s}'")))
        })
        .collect()
}

/// `NUM:DEN` with comma-separated descending coefficients on each side.
pub fn parse_channel(text: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let (num, den) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("perturbation '{text}' must be NUM:DEN")))?;
    Ok((parse_list(num)?, parse_list(den)?))
}
