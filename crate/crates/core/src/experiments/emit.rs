//! CSV, JSON and gnuplot output.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::study::StudyResult;
use crate::error::Result;

pub const CSV_HEADER: &str = "s,scaled_modular,limit,abs_err,rel_err,tail_bound,stderr,wall_ms";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Plot,
}

/// Shortest round-trip form, switching to exponent notation for very small
/// or very large magnitudes.
fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// One row per s; absent values are empty fields.
pub fn to_csv(result: &StudyResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            num(r.s),
            num(r.scaled_modular),
            num(r.limit),
            num(r.abs_err),
            opt(r.rel_err),
            num(r.tail_bound),
            opt(r.stderr),
            opt(r.wall_ms)
        );
    }
    out
}

pub fn to_json(result: &StudyResult) -> Result<String> {
    Ok(serde_json::to_string_pretty(result)?)
}

pub fn from_json(text: &str) -> Result<StudyResult> {
    Ok(serde_json::from_str(text)?)
}

/// Gnuplot script plotting `rel_err` against `1 − s` on log-log axes from
/// the CSV named `csv_name`, which is expected in the same directory.
pub fn plot_script(result: &StudyResult, csv_name: &str) -> String {
    let title = result.config.stem();
    format!(
        "# rel_err against 1 - s\n\
         set datafile separator ','\n\
         set logscale xy\n\
         set xlabel '1 - s'\n\
         set ylabel 'relative error'\n\
         set key top left\n\
         set title '{title}'\n\
         set terminal pngcairo size 800,600\n\
         set output '{title}.png'\n\
         plot '{csv_name}' using (1 - $1):5 skip 1 with linespoints title 'rel\\_err'\n"
    )
}

/// Write the requested artifact into `dir`; the plot script is accompanied
/// by the CSV it reads.
pub fn emit(result: &StudyResult, format: Format, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let stem = result.config.stem();
    let csv_name = format!("{stem}.csv");
    let mut written = Vec::new();
    let mut write = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    match format {
        Format::Csv => write(csv_name, to_csv(result))?,
        Format::Json => write(format!("{stem}.json"), to_json(result)?)?,
        Format::Plot => {
            write(csv_name.clone(), to_csv(result))?;
            write(format!("{stem}.gp"), plot_script(result, &csv_name))?;
        }
    }
    Ok(written)
}
