//! Result emission. CSV columns are fixed and the output is byte-stable for
//! identical inputs: floats print in shortest round-trip form, missing
//! values as empty fields.

use std::fmt::Write as _;

use crate::sweep::TrialResult;

pub const CSV_HEADER: &str =
    "n,c,d,domain,seed,dismantlable,covered,b0,b1,b2,truncated,nerve_a,nerve_b,nerve_c,ms_total";

fn opt_bool(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

pub fn to_csv(results: &[TrialResult]) -> String {
    let mut out = String::with_capacity(64 * (results.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for t in results {
        let c = t.c.map(|c| format!("{c}")).unwrap_or_default();
        let (b0, b1, b2, truncated) = match &t.betti {
            Some(p) => {
                let get = |k: usize| p.betti.get(k).map(|b| b.to_string()).unwrap_or_default();
                (get(0), get(1), get(2), if p.truncated { "true" } else { "false" })
            }
            None => (String::new(), String::new(), String::new(), ""),
        };
        let (na, nb, nc) = match &t.nerve {
            Some(f) => (
                if f.a { "true" } else { "false" },
                if f.b { "true" } else { "false" },
                if f.c { "true" } else { "false" },
            ),
            None => ("", "", ""),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            t.n,
            c,
            t.d,
            t.domain,
            t.seed,
            opt_bool(t.dismantlable),
            opt_bool(t.covered),
            b0,
            b1,
            b2,
            truncated,
            na,
            nb,
            nc,
            t.ms.total,
        );
    }
    out
}

pub fn to_json(results: &[TrialResult]) -> serde_json::Result<String> {
    serde_json::to_string_pretty(results)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

/// Writes results to `path` in the chosen format. IO failures carry the
/// path.
pub fn emit_to_path(
    path: &std::path::Path,
    results: &[TrialResult],
    format: EmitFormat,
) -> anyhow::Result<()> {
    use anyhow::Context;
    let body = match format {
        EmitFormat::Csv => to_csv(results),
        EmitFormat::Json => to_json(results).context("serializing results")?,
    };
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
