//! Sweep harness: every kernel across sizes, VLEN values and lane counts,
//! with the cycle ledger of each point recorded as a [`BenchRecord`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::kernels::{KernelError, KernelId};
use crate::vector_machine::{CycleLedger, VectorConfig, VectorContext, PRESET_LANES, PRESET_VLENS};
use crate::workload::Workload;

mod chart;
mod csv;
mod spec_file;
mod speedup;

pub use chart::{emit_svg_chart, ChartOptions, GroupBy};
pub use csv::{emit_csv, parse_csv, CSV_HEADER};
pub use spec_file::parse_sweep_spec;
pub use speedup::{format_speedup_table, speedup_table, SpeedupRow};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BenchError {
    #[error("no records to chart")]
    EmptyInput,
    #[error("baseline vlen={vlen} lanes={lanes} missing for kernel {kernel} size {size}")]
    MissingBaseline { kernel: KernelId, size: usize, vlen: u32, lanes: u32 },
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error("sweep spec line {line}: {message}")]
    SpecFile { line: usize, message: String },
    #[error("invalid sweep: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub kernels: Vec<KernelId>,
    pub sizes: Vec<usize>,
    pub fft_sizes: Vec<usize>,
    pub vlens: Vec<u32>,
    pub lanes: Vec<u32>,
    pub seed: u64,
    pub issue_overhead: u64,
    pub strided_factor: u64,
}

pub const DEFAULT_SEED: u64 = 42;

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            kernels: KernelId::ALL.to_vec(),
            sizes: vec![16, 32],
            fft_sizes: vec![64, 256, 1024],
            vlens: PRESET_VLENS.to_vec(),
            lanes: PRESET_LANES.to_vec(),
            seed: DEFAULT_SEED,
            issue_overhead: 1,
            strided_factor: 2,
        }
    }
}

/// A (VLEN, lanes) pair dropped because it does not form a valid machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedConfig {
    pub vlen_bits: u32,
    pub lanes: u32,
    pub reason: String,
}

impl SweepSpec {
    /// Sorts and de-duplicates every axis.
    pub fn normalized(&self) -> SweepSpec {
        fn tidy<T: Ord + Clone>(v: &[T]) -> Vec<T> {
            let mut v = v.to_vec();
            v.sort();
            v.dedup();
            v
        }
        SweepSpec {
            kernels: tidy(&self.kernels),
            sizes: tidy(&self.sizes),
            fft_sizes: tidy(&self.fft_sizes),
            vlens: tidy(&self.vlens),
            lanes: tidy(&self.lanes),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.sizes.contains(&0) {
            return Err(BenchError::InvalidSpec("sizes must be positive".into()));
        }
        if let Some(bad) = self.fft_sizes.iter().find(|&&n| crate::kernels::FftPlan::new(n).is_err()) {
            return Err(BenchError::InvalidSpec(format!("fft size {bad} is not a power of 4")));
        }
        if self.strided_factor == 0 {
            return Err(BenchError::InvalidSpec("strided_factor must be >= 1".into()));
        }
        Ok(())
    }

    /// Valid machine configurations, plus the pairs that had to be skipped.
    pub fn configs(&self) -> (Vec<VectorConfig>, Vec<SkippedConfig>) {
        let spec = self.normalized();
        let mut valid = Vec::new();
        let mut skipped = Vec::new();
        for &vlen_bits in &spec.vlens {
            for &lanes in &spec.lanes {
                match VectorConfig::with_costs(vlen_bits, lanes, spec.issue_overhead, spec.strided_factor) {
                    Ok(cfg) => valid.push(cfg),
                    Err(e) => skipped.push(SkippedConfig { vlen_bits, lanes, reason: e.to_string() }),
                }
            }
        }
        (valid, skipped)
    }

    /// `(kernel, size)` pairs in record order.
    pub fn cases(&self) -> Vec<(KernelId, usize)> {
        let spec = self.normalized();
        spec.kernels
            .iter()
            .flat_map(|&k| {
                let sizes = if k.is_transform() { &spec.fft_sizes } else { &spec.sizes };
                sizes.iter().map(move |&n| (k, n))
            })
            .collect()
    }

    /// Number of records a sweep of this spec produces.
    pub fn point_count(&self) -> usize {
        self.cases().len() * self.configs().0.len()
    }
}

/// One sweep point. `checksum` is the output norm rounded to six significant
/// digits, or `None` when the kernel failed at this point.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub kernel: KernelId,
    pub size: usize,
    pub vlen_bits: u32,
    pub lanes: u32,
    pub cycles: u64,
    pub vector_instructions: u64,
    pub scalar_instructions: u64,
    pub vector_element_ops: u64,
    pub checksum: Option<f64>,
}

impl BenchRecord {
    pub fn is_failed(&self) -> bool {
        self.checksum.is_none()
    }

    fn key(&self) -> (KernelId, usize, u32, u32) {
        (self.kernel, self.size, self.vlen_bits, self.lanes)
    }
}

/// Rounds to six significant digits.
pub fn round_checksum(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// Named phase of a sweep point's ledger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartRecord {
    pub kernel: KernelId,
    pub size: usize,
    pub vlen_bits: u32,
    pub lanes: u32,
    pub part: &'static str,
    pub ledger: CycleLedger,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedConfig>,
    pub parts: Vec<PartRecord>,
    /// Error text for every failed point, keyed like the records.
    pub failures: Vec<(KernelId, usize, u32, u32, String)>,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<BenchRecord>, BenchError> {
    Ok(run_sweep_detailed(spec)?.records)
}

/// Runs every valid point. Points execute in parallel, one context each;
/// results are sorted by `(kernel, size, vlen, lanes)` before returning.
pub fn run_sweep_detailed(spec: &SweepSpec) -> Result<SweepReport, BenchError> {
    spec.validate()?;
    let (configs, skipped) = spec.configs();
    let workloads: BTreeMap<(KernelId, usize), Result<Workload, KernelError>> =
        spec.cases().into_par_iter().map(|(k, n)| ((k, n), Workload::generate(k, n, spec.seed))).collect();
    Ok(execute(&workloads, &configs, skipped))
}

fn execute(
    workloads: &BTreeMap<(KernelId, usize), Result<Workload, KernelError>>,
    configs: &[VectorConfig],
    skipped: Vec<SkippedConfig>,
) -> SweepReport {
    let points: Vec<_> = workloads.iter().flat_map(|(&key, w)| configs.iter().map(move |cfg| (key, w, *cfg))).collect();

    let mut results: Vec<_> = points
        .into_par_iter()
        .map(|((kernel, size), workload, cfg)| {
            let mut ctx = VectorContext::new(cfg).expect("validated config");
            let outcome = workload.as_ref().map_err(Clone::clone).and_then(|w| w.run_vec_with_parts(&mut ctx));
            let ledger = ctx.snapshot();
            let record = |checksum| BenchRecord {
                kernel,
                size,
                vlen_bits: cfg.vlen_bits,
                lanes: cfg.lanes,
                cycles: ledger.total_cycles,
                vector_instructions: ledger.vector_instructions,
                scalar_instructions: ledger.scalar_instructions,
                vector_element_ops: ledger.vector_element_ops,
                checksum,
            };
            match outcome {
                Ok((out, parts)) => {
                    let parts = parts
                        .into_iter()
                        .map(|(part, ledger)| PartRecord {
                            kernel,
                            size,
                            vlen_bits: cfg.vlen_bits,
                            lanes: cfg.lanes,
                            part,
                            ledger,
                        })
                        .collect();
                    (record(Some(round_checksum(out.norm()))), parts, None)
                }
                Err(e) => (record(None), Vec::new(), Some(e.to_string())),
            }
        })
        .collect();
    results.sort_by_key(|(r, _, _)| r.key());

    let mut report = SweepReport { records: Vec::new(), skipped, parts: Vec::new(), failures: Vec::new() };
    for (record, parts, failure) in results {
        if let Some(msg) = failure {
            report.failures.push((record.kernel, record.size, record.vlen_bits, record.lanes, msg));
        }
        report.parts.extend(parts);
        report.records.push(record);
    }
    report
}
