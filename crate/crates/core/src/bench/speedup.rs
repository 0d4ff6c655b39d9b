//! Speedup of every sweep point relative to a baseline machine configuration.

use std::collections::HashMap;

use crate::kernels::KernelId;

use super::{BenchError, BenchRecord};

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupRow {
    pub kernel: KernelId,
    pub size: usize,
    pub vlen_bits: u32,
    pub lanes: u32,
    pub speedup: f64,
}

/// `cycles(baseline) / cycles(point)` per kernel and size. Failed points are
/// left out; a failed baseline counts as missing.
pub fn speedup_table(
    records: &[BenchRecord],
    baseline_vlen: u32,
    baseline_lanes: u32,
) -> Result<Vec<SpeedupRow>, BenchError> {
    let baselines: HashMap<(KernelId, usize), u64> = records
        .iter()
        .filter(|r| !r.is_failed() && r.vlen_bits == baseline_vlen && r.lanes == baseline_lanes)
        .map(|r| ((r.kernel, r.size), r.cycles))
        .collect();
    records
        .iter()
        .filter(|r| !r.is_failed())
        .map(|r| {
            let base = baselines.get(&(r.kernel, r.size)).ok_or(BenchError::MissingBaseline {
                kernel: r.kernel,
                size: r.size,
                vlen: baseline_vlen,
                lanes: baseline_lanes,
            })?;
            Ok(SpeedupRow {
                kernel: r.kernel,
                size: r.size,
                vlen_bits: r.vlen_bits,
                lanes: r.lanes,
                speedup: *base as f64 / r.cycles.max(1) as f64,
            })
        })
        .collect()
}

/// Fixed-width text table with two decimals.
pub fn format_speedup_table(rows: &[SpeedupRow]) -> String {
    let mut out = format!("{:<8} {:>6} {:>9} {:>6} {:>9}\n", "kernel", "size", "vlen_bits", "lanes", "speedup");
    for r in rows {
        out.push_str(&format!(
            "{:<8} {:>6} {:>9} {:>6} {:>9.2}\n",
            r.kernel.name(),
            r.size,
            r.vlen_bits,
            r.lanes,
            r.speedup
        ));
    }
    out
}
