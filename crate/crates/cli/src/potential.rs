//! Text forms of a potential: `zero`, `const:<c>`, `poly:<c0>,<c1>,...` and
//! `csv:<path>` (two columns `t,value` covering `[0, 1]`).

use std::path::Path;

use frac_spectra::{Interp, Potential, SampledFunction};

use crate::CliError;

fn number(token: &str) -> Result<f64, CliError> {
    let v: f64 = token.trim().parse().map_err(|_| CliError::Parse {
        token: token.to_string(),
        reason: "not a number".into(),
    })?;
    if !v.is_finite() {
        return Err(CliError::Parse {
            token: token.to_string(),
            reason: "not finite".into(),
        });
    }
    Ok(v)
}

pub fn parse_potential(spec: &str) -> Result<Potential, CliError> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok(Potential::Zero);
    }
    let Some((kind, rest)) = spec.split_once(':') else {
        return Err(CliError::Parse {
            token: spec.to_string(),
            reason: "expected zero, const:<c>, poly:<c0>,<c1>,... or csv:<path>".into(),
        });
    };
    match kind {
        "const" => Ok(Potential::Constant(number(rest)?)),
        "poly" => {
            let cs = rest.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
            Ok(Potential::Polynomial(cs))
        }
        "csv" => read_samples(Path::new(rest)).map(Potential::Sampled),
        _ => Err(CliError::Parse {
            token: kind.to_string(),
            reason: "unknown potential kind".into(),
        }),
    }
}

/// Two-column `t,value` samples; a non-numeric first row is taken as a header.
fn read_samples(path: &Path) -> Result<SampledFunction, CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let file = std::fs::File::open(path).map_err(io)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(file);
    let (mut nodes, mut values) = (vec![], vec![]);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse {
            token: path.display().to_string(),
            reason: e.to_string(),
        })?;
        if rec.len() != 2 {
            return Err(CliError::Parse {
                token: rec.iter().collect::<Vec<_>>().join(","),
                reason: format!("expected two columns on row {}", i + 1),
            });
        }
        if i == 0 && rec[0].parse::<f64>().is_err() {
            continue;
        }
        nodes.push(number(&rec[0])?);
        values.push(number(&rec[1])?);
    }
    SampledFunction::new(nodes, values, Interp::Linear).map_err(|e| CliError::Parse {
        token: path.display().to_string(),
        reason: e.to_string(),
    })
}
