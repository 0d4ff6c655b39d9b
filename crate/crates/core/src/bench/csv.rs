//! CSV emission and parsing for sweep records.
//!
//! One header line, one row per record, LF endings. Lines starting with `#`
//! are comments and are skipped when parsing. Failed points carry the literal
//! `failed` in the checksum column.

use super::{BenchError, BenchRecord};

pub const CSV_HEADER: &str =
    "kernel,size,vlen_bits,lanes,cycles,vector_instructions,scalar_instructions,vector_element_ops,checksum";

const FAILED: &str = "failed";

pub fn emit_csv(records: &[BenchRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let checksum = r.checksum.map_or_else(|| FAILED.to_string(), |c| format!("{c:.5e}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.kernel,
            r.size,
            r.vlen_bits,
            r.lanes,
            r.cycles,
            r.vector_instructions,
            r.scalar_instructions,
            r.vector_element_ops,
            checksum
        ));
    }
    out
}

/// Parses text produced by [`emit_csv`]. Errors carry 1-based line numbers.
pub fn parse_csv(text: &str) -> Result<Vec<BenchRecord>, BenchError> {
    let mut records = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line.trim() != CSV_HEADER {
                return Err(BenchError::Csv { line: line_no, message: "unexpected header".into() });
            }
            saw_header = true;
            continue;
        }
        records.push(parse_row(line).map_err(|message| BenchError::Csv { line: line_no, message })?);
    }
    if !saw_header {
        return Err(BenchError::Csv { line: 1, message: "missing header".into() });
    }
    Ok(records)
}

fn parse_row(line: &str) -> Result<BenchRecord, String> {
    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 9 {
        return Err(format!("expected 9 fields, found {}", fields.len()));
    }
    fn num<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, String> {
        s.parse().map_err(|_| format!("bad {name} '{s}'"))
    }
    let checksum = match fields[8] {
        FAILED => None,
        s => Some(num::<f64>("checksum", s)?),
    };
    Ok(BenchRecord {
        kernel: fields[0].parse().map_err(|e: crate::kernels::UnknownKernel| e.to_string())?,
        size: num("size", fields[1])?,
        vlen_bits: num("vlen_bits", fields[2])?,
        lanes: num("lanes", fields[3])?,
        cycles: num("cycles", fields[4])?,
        vector_instructions: num("vector_instructions", fields[5])?,
        scalar_instructions: num("scalar_instructions", fields[6])?,
        vector_element_ops: num("vector_element_ops", fields[7])?,
        checksum,
    })
}
