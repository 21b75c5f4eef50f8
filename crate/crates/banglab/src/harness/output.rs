//! Result serialization: CSV (RFC 4180 via the csv crate), JSON lines, and
//! two-column TSV for plot data.

use crate::error::Result;
use crate::harness::ResultRow;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for OutputFormat {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" => Ok(OutputFormat::Jsonl),
            other => Err(crate::error::Error::invalid(format!(
                "unknown format `{other}` (expected csv or jsonl)"
            ))),
        }
    }
}

pub fn write_rows<W: Write>(rows: &[ResultRow], format: OutputFormat, out: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(rows, out),
        OutputFormat::Jsonl => write_jsonl(rows, out),
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(std::io::Error::other)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Plot data: one (x, y) pair per line, tab-separated, with a `# x y` header.
pub fn write_tsv_pairs<W: Write>(
    pairs: &[(f64, f64)],
    x_name: &str,
    y_name: &str,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# {x_name}\t{y_name}")?;
    for &(x, y) in pairs {
        writeln!(out, "{x}\t{y}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> ResultRow {
        ResultRow {
            instance: "spike(a=0.5,b=1)".into(),
            algorithm: "qaoa".into(),
            n: 16,
            seed: 7,
            schedule: "qaoa(p=1)".into(),
            success: 0.9375,
            energy: Some(0.125),
            q_bound: None,
            min_gap: None,
            survival_fraction: None,
            mean_moves: None,
            wall_ms: 12.5,
        }
    }

    #[test]
    fn csv_has_header_and_skips_wall_time() {
        let mut buf = Vec::new();
        write_csv(&[sample_row()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert_eq!(
            header,
            "instance,algorithm,n,seed,schedule,success,energy,q_bound,min_gap,survival_fraction,mean_moves"
        );
        let row = lines.next().unwrap();
        assert!(row.contains("0.9375"));
        assert!(!row.contains("12.5"));
    }

    #[test]
    fn jsonl_round_trips() {
        let mut buf = Vec::new();
        write_jsonl(&[sample_row()], &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(buf.trim_ascii_end()).unwrap();
        assert_eq!(v["n"], 16);
        assert_eq!(v["q_bound"], serde_json::Value::Null);
        assert_eq!(v["success"], 0.9375);
    }

    #[test]
    fn tsv_pairs_layout() {
        let mut buf = Vec::new();
        write_tsv_pairs(&[(0.5, 2.0), (1.0, 4.0)], "u", "gap", &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# u\tgap\n0.5\t2\n1\t4\n");
    }
}
