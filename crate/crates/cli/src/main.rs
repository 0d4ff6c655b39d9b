use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lowphy_core::bench::{
    emit_csv, emit_svg_chart, format_speedup_table, parse_csv, parse_sweep_spec, run_sweep_detailed, speedup_table,
    ChartOptions, GroupBy, SweepSpec,
};
use lowphy_core::verify::{run_verify, VerifyOptions};
use lowphy_core::KernelId;

/// Verify and benchmark LOW-PHY kernels on a modeled vector processor.
#[derive(Debug, Parser)]
#[command(name = "lowphy", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check kernel correctness and reference/vectorized agreement.
    Verify(VerifyArgs),
    /// Sweep kernels over sizes and machine configurations, writing CSV.
    Bench(BenchArgs),
    /// Render a sweep CSV as an SVG bar chart.
    Plot(PlotArgs),
    /// Print cycle speedups relative to a baseline configuration.
    Speedup(SpeedupArgs),
}

#[derive(Debug, Args)]
struct Selection {
    /// Kernels to include (lse, mmse, fft, zf, beam).
    #[arg(long = "kernels", visible_alias = "kernel", value_delimiter = ',')]
    kernels: Option<Vec<KernelId>>,
    /// Matrix dimensions (antenna count for beam).
    #[arg(long = "sizes", visible_alias = "size", value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// FFT lengths (powers of 4). When only fft is selected, --sizes also works.
    #[arg(long, value_delimiter = ',')]
    fft_sizes: Option<Vec<usize>>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Selection {
    fn fft_only(&self) -> bool {
        matches!(&self.kernels, Some(k) if !k.is_empty() && k.iter().all(|&k| k == KernelId::Fft))
    }

    fn fft_sizes(&self) -> Option<Vec<usize>> {
        match (&self.fft_sizes, &self.sizes) {
            (Some(f), _) => Some(f.clone()),
            (None, Some(s)) if self.fft_only() => Some(s.clone()),
            _ => None,
        }
    }
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    sel: Selection,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[command(flatten)]
    sel: Selection,
    /// VLEN values in bits.
    #[arg(long, value_delimiter = ',')]
    vlens: Option<Vec<u32>>,
    /// Lane counts.
    #[arg(long, value_delimiter = ',')]
    lanes: Option<Vec<u32>>,
    /// Sweep spec file; flags given on the command line override its keys.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output CSV path (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// Sweep CSV produced by `bench`.
    csv: PathBuf,
    /// Output SVG path (defaults to the CSV path with an .svg extension).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Use a log10 cycle axis.
    #[arg(long)]
    log_scale: bool,
    /// Group bars by VLEN first instead of size first.
    #[arg(long)]
    vlen_first: bool,
}

#[derive(Debug, Args)]
struct SpeedupArgs {
    csv: PathBuf,
    #[arg(long, default_value_t = 512)]
    baseline_vlen: u32,
    #[arg(long, default_value_t = 2)]
    baseline_lanes: u32,
}

/// Exit status 1: runtime or check failure. Usage errors exit 2 via clap or
/// [`usage_error`].
fn failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Speedup(a) => cmd_speedup(a),
    }
}

fn cmd_verify(a: VerifyArgs) -> ExitCode {
    let mut opts = VerifyOptions::default();
    if let Some(fft) = a.sel.fft_sizes() {
        opts.fft_sizes = fft;
    }
    if let Some(k) = a.sel.kernels {
        opts.kernels = k;
    }
    if let Some(s) = a.sel.sizes {
        opts.sizes = s;
    }
    if let Some(seed) = a.sel.seed {
        opts.seed = seed;
    }
    let results = run_verify(&opts);
    for r in &results {
        println!("{r}");
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} checks passed (seed {})", results.len(), opts.seed);
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn sweep_spec(a: &BenchArgs) -> Result<SweepSpec, String> {
    let mut spec = match &a.spec {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            parse_sweep_spec(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SweepSpec::default(),
    };
    if let Some(fft) = a.sel.fft_sizes() {
        spec.fft_sizes = fft;
    }
    if let Some(k) = &a.sel.kernels {
        spec.kernels = k.clone();
    }
    if let Some(s) = &a.sel.sizes {
        spec.sizes = s.clone();
    }
    if let Some(v) = &a.vlens {
        spec.vlens = v.clone();
    }
    if let Some(l) = &a.lanes {
        spec.lanes = l.clone();
    }
    if let Some(seed) = a.sel.seed {
        spec.seed = seed;
    }
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

fn cmd_bench(a: BenchArgs) -> ExitCode {
    let spec = match sweep_spec(&a) {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let report = match run_sweep_detailed(&spec) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let csv = format!("# seed={}\n{}", spec.seed, emit_csv(&report.records));

    let mut summary = Vec::new();
    summary.push(format!("{} points run, {} failed", report.records.len(), report.failures.len()));
    for s in &report.skipped {
        summary.push(format!("skipped vlen={} lanes={}: {}", s.vlen_bits, s.lanes, s.reason));
    }
    for (k, n, v, l, msg) in &report.failures {
        summary.push(format!("failed {k} n={n} vlen={v} lanes={l}: {msg}"));
    }
    for p in &report.parts {
        summary.push(format!(
            "{} n={} vlen={} lanes={} {}: {} cycles",
            p.kernel, p.size, p.vlen_bits, p.lanes, p.part, p.ledger.total_cycles
        ));
    }

    match &a.out {
        Some(path) => {
            if let Err(e) = fs::write(path, csv) {
                return failure(format!("cannot write {}: {e}", path.display()));
            }
            summary.iter().for_each(|l| println!("{l}"));
            println!("wrote {}", path.display());
        }
        None => {
            print!("{csv}");
            summary.iter().for_each(|l| eprintln!("{l}"));
        }
    }
    ExitCode::SUCCESS
}

fn read_records(path: &Path) -> Result<Vec<lowphy_core::bench::BenchRecord>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_csv(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_plot(a: PlotArgs) -> ExitCode {
    let records = match read_records(&a.csv) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    let opts = ChartOptions {
        log_scale: a.log_scale,
        group_by: if a.vlen_first { GroupBy::VlenThenSize } else { GroupBy::SizeThenVlen },
    };
    let svg = match emit_svg_chart(&records, &opts) {
        Ok(s) => s,
        Err(e) => return failure(e),
    };
    let out = a.out.unwrap_or_else(|| a.csv.with_extension("svg"));
    if let Err(e) = fs::write(&out, svg) {
        return failure(format!("cannot write {}: {e}", out.display()));
    }
    println!("wrote {}", out.display());
    ExitCode::SUCCESS
}

fn cmd_speedup(a: SpeedupArgs) -> ExitCode {
    let records = match read_records(&a.csv) {
        Ok(r) => r,
        Err(e) => return failure(e),
    };
    match speedup_table(&records, a.baseline_vlen, a.baseline_lanes) {
        Ok(rows) => {
            print!("{}", format_speedup_table(&rows));
            ExitCode::SUCCESS
        }
        Err(e) => failure(e),
    }
}
