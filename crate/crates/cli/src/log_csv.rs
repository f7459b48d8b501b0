//! The trace CSV: `n,objective,objective_gap,psnr,elapsed_ms`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use tiksplit::trace::SolveTrace;

use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 5] = ["n", "objective", "objective_gap", "psnr", "elapsed_ms"];

#[derive(Clone, Debug, PartialEq)]
pub struct LogRow {
    pub n: usize,
    pub objective: f64,
    pub objective_gap: f64,
    pub psnr: f64,
    pub elapsed_ms: f64,
}

/// Rows of a solve. The gap is taken against the smallest objective seen in
/// the run itself; `gap` recomputes it against a common reference.
pub fn rows_from_trace(trace: &SolveTrace) -> Vec<LogRow> {
    let best = trace
        .rows
        .iter()
        .filter_map(|r| r.objective)
        .fold(f64::INFINITY, f64::min);
    trace
        .rows
        .iter()
        .map(|r| {
            let objective = r.objective.unwrap_or(f64::NAN);
            LogRow {
                n: r.n,
                objective,
                objective_gap: objective - best,
                psnr: r.psnr.unwrap_or(f64::NAN),
                elapsed_ms: r.elapsed_ms,
            }
        })
        .collect()
}

pub fn write_rows(out: impl Write, rows: &[LogRow]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.objective.to_string(),
            r.objective_gap.to_string(),
            r.psnr.to_string(),
            format!("{:.3}", r.elapsed_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn save(path: &Path, rows: &[LogRow]) -> CliResult {
    let file = std::fs::File::create(path)
        .with_context(|| format!("creating {}", path.display()))
        .map_err(CliError::io)?;
    write_rows(file, rows)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(CliError::io)
}

/// Parses a trace CSV. Lines starting with `#` are skipped.
pub fn parse(input: impl Read) -> anyhow::Result<Vec<LogRow>> {
    let body: String = BufReader::new(input)
        .lines()
        .filter(|l| l.as_ref().map_or(true, |l| !l.starts_with('#')))
        .collect::<Result<Vec<_>, _>>()?
        .join("\n");
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header != HEADER {
        return Err(anyhow!(
            "unexpected header {:?}, expected {}",
            header.join(","),
            HEADER.join(",")
        ));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let num = |i: usize| -> anyhow::Result<f64> {
            rec[i]
                .parse::<f64>()
                .with_context(|| format!("bad {} value {:?}", HEADER[i], &rec[i]))
        };
        rows.push(LogRow {
            n: rec[0]
                .parse()
                .with_context(|| format!("bad n value {:?}", &rec[0]))?,
            objective: num(1)?,
            objective_gap: num(2)?,
            psnr: num(3)?,
            elapsed_ms: num(4)?,
        });
    }
    Ok(rows)
}

pub fn load(path: &Path) -> CliResult<Vec<LogRow>> {
    let file = std::fs::File::open(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(CliError::io)?;
    parse(file)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(CliError::config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_comments_and_infinities() {
        let rows = vec![
            LogRow {
                n: 1,
                objective: 2.5,
                objective_gap: 0.5,
                psnr: f64::INFINITY,
                elapsed_ms: 0.25,
            },
            LogRow {
                n: 10,
                objective: 2.0,
                objective_gap: 0.0,
                psnr: 31.25,
                elapsed_ms: 1.5,
            },
        ];
        let mut buf = b"# comment\n".to_vec();
        write_rows(&mut buf, &rows).unwrap();
        assert_eq!(parse(buf.as_slice()).unwrap(), rows);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse("a,b\n1,2\n".as_bytes()).is_err());
    }
}
