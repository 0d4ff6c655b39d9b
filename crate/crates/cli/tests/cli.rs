use std::fs;
use std::process::{Command, Output};

use lowphy_core::bench::CSV_HEADER;
use lowphy_core::verify::VerifyOptions;

fn lowphy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowphy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ROW: &str = "lse,16,512,2,1000,10,5,100,1.00000e0";

#[test]
fn verify_single_kernel() {
    let o = lowphy(&["verify", "--kernel", "zf", "--size", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 17);
}

#[test]
fn verify_full_matches_documented_count() {
    let o = lowphy(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let passes = stdout(&o).lines().filter(|l| l.starts_with("PASS")).count();
    assert_eq!(passes, VerifyOptions::default().expected_checks());
    assert_eq!(passes, 214);
}

#[test]
fn verify_fft_takes_sizes() {
    let o = lowphy(&["verify", "--kernel", "fft", "--size", "64"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("fft n=64"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "--kernel", "nosuch"][..],
        &["verify", "--bogus"],
        &["frobnicate"],
        &[],
        &["bench", "--sizes", "abc"],
    ] {
        let o = lowphy(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    assert!(stderr(&lowphy(&["verify", "--kernel", "nosuch"])).contains("unknown kernel"));
}

#[test]
fn bench_single_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("one.csv");
    let o = lowphy(&[
        "bench",
        "--vlens",
        "512",
        "--lanes",
        "2",
        "--kernels",
        "lse",
        "--sizes",
        "16",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# seed=42");
    assert_eq!(lines[1], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("lse,16,512,2,"));
    assert!(stdout(&o).contains("1 points run, 0 failed"));
}

#[test]
fn bench_spec_file_and_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("sweep.txt");
    fs::write(&spec, "# small\nkernels = fft, zf\nsizes = 16\nfft_sizes = 64\nvlens = 1024\nlanes = 2, 4\nseed = 7\n")
        .unwrap();
    let o = lowphy(&["bench", "--spec", spec.to_str().unwrap(), "--lanes", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# seed=7\n"));
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r.contains(",1024,8,")));
}

#[test]
fn bench_bad_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.txt");
    assert_eq!(lowphy(&["bench", "--spec", missing.to_str().unwrap()]).status.code(), Some(2));
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "colour = blue\n").unwrap();
    let o = lowphy(&["bench", "--spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1"));
    assert_eq!(lowphy(&["bench", "--kernels", "fft", "--fft-sizes", "32"]).status.code(), Some(2));
}

#[test]
fn bench_unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("no/such/dir/x.csv");
    let o = lowphy(&[
        "bench",
        "--kernels",
        "lse",
        "--sizes",
        "16",
        "--vlens",
        "512",
        "--lanes",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    fs::write(&csv, format!("{CSV_HEADER}\n{ROW}\n")).unwrap();
    let o = lowphy(&["plot", csv.to_str().unwrap(), "--log-scale"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = fs::read_to_string(dir.path().join("r.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn plot_rejects_empty_and_malformed() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, format!("{CSV_HEADER}\n")).unwrap();
    let o = lowphy(&["plot", empty.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no records"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, format!("{CSV_HEADER}\n{ROW}\nlse,16,oops\n")).unwrap();
    let o = lowphy(&["plot", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn speedup_ratios() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    fs::write(&csv, format!("{CSV_HEADER}\n{ROW}\nlse,16,512,4,2000,10,5,100,1.00000e0\n")).unwrap();
    let o = lowphy(&["speedup", csv.to_str().unwrap(), "--baseline-vlen", "512", "--baseline-lanes", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let speedups: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().last().unwrap()).collect();
    assert_eq!(speedups, ["1.00", "0.50"]);
}

#[test]
fn speedup_missing_baseline_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    fs::write(&csv, format!("{CSV_HEADER}\n{ROW}\n")).unwrap();
    let o = lowphy(&["speedup", csv.to_str().unwrap(), "--baseline-lanes", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kernel lse size 16"), "{}", stderr(&o));
}

#[test]
fn default_sweep_speedups_at_least_one() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("d.csv");
    assert!(lowphy(&["bench", "--out", csv.to_str().unwrap()]).status.success());
    let o = lowphy(&["speedup", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let values: Vec<f64> =
        stdout(&o).lines().skip(1).map(|l| l.split_whitespace().last().unwrap().parse().unwrap()).collect();
    assert_eq!(values.len(), 165);
    assert!(values.iter().all(|&v| v >= 1.0));
}
