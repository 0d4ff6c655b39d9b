//! Hand-written SVG 1.1 grouped bar chart of sweep cycles.
//!
//! One 1200×400 panel per kernel, stacked vertically. Within a panel the bars
//! are grouped by (size, VLEN) and each lane count is one colored series.
//! All coordinates are printed with two decimals so output is byte-stable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use crate::kernels::KernelId;

use super::{BenchError, BenchRecord};

pub const PANEL_WIDTH: f64 = 1200.0;
pub const PANEL_HEIGHT: f64 = 400.0;

const MARGIN_LEFT: f64 = 90.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const PLOT_WIDTH: f64 = PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
const PLOT_HEIGHT: f64 = PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GroupBy {
    /// Outer key size, inner key VLEN.
    #[default]
    SizeThenVlen,
    VlenThenSize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ChartOptions {
    pub log_scale: bool,
    pub group_by: GroupBy,
}

fn kernel_title(k: KernelId) -> &'static str {
    match k {
        KernelId::Lse => "LSE channel estimation",
        KernelId::Mmse => "MMSE channel estimation",
        KernelId::Fft => "radix-4 FFT",
        KernelId::Zf => "zero-forcing precoder",
        KernelId::Beam => "beamforming (channel + weights)",
    }
}

enum Scale {
    Linear { top: f64 },
    Log { lo: f64, hi: f64 },
}

impl Scale {
    fn for_values(values: &[u64], log: bool) -> Self {
        let max = values.iter().copied().max().unwrap_or(0) as f64;
        if log {
            let min = values.iter().copied().filter(|&v| v > 0).min().unwrap_or(1) as f64;
            let lo = min.log10().floor();
            let mut hi = max.max(1.0).log10().ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
            Scale::Log { lo, hi }
        } else {
            Scale::Linear { top: nice_ceil(max) }
        }
    }

    /// Bar height in plot units.
    fn height(&self, value: u64) -> f64 {
        match *self {
            Scale::Linear { top } => value as f64 / top * PLOT_HEIGHT,
            Scale::Log { lo, hi } => {
                let v = (value.max(1) as f64).log10();
                ((v - lo) / (hi - lo)).clamp(0.0, 1.0) * PLOT_HEIGHT
            }
        }
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        match *self {
            Scale::Linear { top } => {
                (0..=5).map(|i| (i as f64 / 5.0 * PLOT_HEIGHT, format!("{:.0}", top * i as f64 / 5.0))).collect()
            }
            Scale::Log { lo, hi } => {
                let decades = (hi - lo) as i32;
                (0..=decades)
                    .map(|d| (d as f64 / decades as f64 * PLOT_HEIGHT, format!("1e{}", lo as i32 + d)))
                    .collect()
            }
        }
    }
}

fn nice_ceil(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    let p = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * p).find(|&v| v >= x).unwrap_or(10.0 * p)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn emit_svg_chart(records: &[BenchRecord], opts: &ChartOptions) -> Result<String, BenchError> {
    if records.is_empty() {
        return Err(BenchError::EmptyInput);
    }
    let mut by_kernel: BTreeMap<KernelId, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_kernel.entry(r.kernel).or_default().push(r);
    }

    let height = PANEL_HEIGHT * by_kernel.len() as f64;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{PANEL_WIDTH:.0}" height="{height:.0}" viewBox="0 0 {PANEL_WIDTH:.0} {height:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{PANEL_WIDTH:.0}" height="{height:.0}" fill="#ffffff"/>"##);
    for (idx, (kernel, recs)) in by_kernel.iter().enumerate() {
        write_panel(&mut svg, *kernel, recs, idx as f64 * PANEL_HEIGHT, opts);
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn write_panel(svg: &mut String, kernel: KernelId, recs: &[&BenchRecord], y_offset: f64, opts: &ChartOptions) {
    let group_key = |r: &BenchRecord| match opts.group_by {
        GroupBy::SizeThenVlen => (r.size as u64, u64::from(r.vlen_bits)),
        GroupBy::VlenThenSize => (u64::from(r.vlen_bits), r.size as u64),
    };
    let groups: Vec<(u64, u64)> = recs.iter().map(|r| group_key(r)).collect::<BTreeSet<_>>().into_iter().collect();
    let series: Vec<u32> = recs.iter().map(|r| r.lanes).collect::<BTreeSet<_>>().into_iter().collect();
    let ok: Vec<&&BenchRecord> = recs.iter().filter(|r| !r.is_failed()).collect();
    let scale = Scale::for_values(&ok.iter().map(|r| r.cycles).collect::<Vec<_>>(), opts.log_scale);

    let base_y = MARGIN_TOP + PLOT_HEIGHT;
    let _ = writeln!(svg, r#"<g id="panel-{kernel}" transform="translate(0,{y_offset:.2})">"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        MARGIN_LEFT + PLOT_WIDTH / 2.0,
        escape(kernel_title(kernel))
    );

    for (dy, label) in scale.ticks() {
        let y = base_y - dy;
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN_LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            MARGIN_LEFT + PLOT_WIDTH
        );
        let _ =
            writeln!(svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#, MARGIN_LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN_LEFT:.2}" y1="{MARGIN_TOP:.2}" x2="{MARGIN_LEFT:.2}" y2="{base_y:.2}" stroke="#000000"/>"##
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{MARGIN_LEFT:.2}" y1="{base_y:.2}" x2="{:.2}" y2="{base_y:.2}" stroke="#000000"/>"##,
        MARGIN_LEFT + PLOT_WIDTH
    );
    let y_label = if opts.log_scale { "clock cycles (log10)" } else { "clock cycles" };
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{y_label}</text>"#,
        MARGIN_TOP + PLOT_HEIGHT / 2.0,
        MARGIN_TOP + PLOT_HEIGHT / 2.0
    );
    let x_label = match opts.group_by {
        GroupBy::SizeThenVlen => "size / VLEN (bits)",
        GroupBy::VlenThenSize => "VLEN (bits) / size",
    };
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_label}</text>"#,
        MARGIN_LEFT + PLOT_WIDTH / 2.0,
        PANEL_HEIGHT - 14.0
    );

    let group_w = PLOT_WIDTH / groups.len() as f64;
    let bar_w = group_w * 0.8 / series.len() as f64;
    for (gi, &(outer, inner)) in groups.iter().enumerate() {
        let gx = MARGIN_LEFT + gi as f64 * group_w;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{outer} / {inner}</text>"#,
            gx + group_w / 2.0,
            base_y + 18.0
        );
        for (si, &lanes) in series.iter().enumerate() {
            let Some(r) = ok.iter().find(|r| group_key(r) == (outer, inner) && r.lanes == lanes) else {
                continue;
            };
            let h = scale.height(r.cycles);
            let _ = writeln!(
                svg,
                r#"<rect id="bar-{}-{}-{}-{}" x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>{} n={} vlen={} lanes={}: {} cycles</title></rect>"#,
                r.kernel,
                r.size,
                r.vlen_bits,
                r.lanes,
                gx + group_w * 0.1 + si as f64 * bar_w,
                base_y - h,
                bar_w,
                h,
                PALETTE[si % PALETTE.len()],
                r.kernel,
                r.size,
                r.vlen_bits,
                r.lanes,
                r.cycles
            );
        }
    }

    let legend_x = MARGIN_LEFT + PLOT_WIDTH + 20.0;
    for (si, &lanes) in series.iter().enumerate() {
        let y = MARGIN_TOP + 10.0 + si as f64 * 20.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend-entry"><rect x="{legend_x:.2}" y="{y:.2}" width="12" height="12" fill="{}"/><text x="{:.2}" y="{:.2}">lanes = {lanes}</text></g>"#,
            PALETTE[si % PALETTE.len()],
            legend_x + 18.0,
            y + 10.0
        );
    }
    svg.push_str("</g>\n");
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(kernel: KernelId, size: usize, vlen_bits: u32, lanes: u32, cycles: u64) -> BenchRecord {
        BenchRecord {
            kernel,
            size,
            vlen_bits,
            lanes,
            cycles,
            vector_instructions: 1,
            scalar_instructions: 1,
            vector_element_ops: 1,
            checksum: Some(1.0),
        }
    }

    fn bar_height(svg: &str, id: &str) -> f64 {
        let start = svg.find(&format!(r#"id="{id}""#)).expect("bar present");
        let rest = &svg[start..];
        let h = rest.find("height=\"").unwrap() + 8;
        rest[h..h + rest[h..].find('"').unwrap()].parse().unwrap()
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(emit_svg_chart(&[], &ChartOptions::default()), Err(BenchError::EmptyInput));
    }

    #[test]
    fn one_record_one_bar() {
        let svg = emit_svg_chart(&[rec(KernelId::Lse, 16, 512, 2, 800)], &ChartOptions::default()).unwrap();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<rect id=\"bar-").count(), 1);
        // nice ceiling of 800 is 1000
        assert!((bar_height(&svg, "bar-lse-16-512-2") - 0.8 * PLOT_HEIGHT).abs() < 0.01);
    }

    #[test]
    fn heights_proportional() {
        let recs = [rec(KernelId::Zf, 16, 512, 2, 1000), rec(KernelId::Zf, 16, 512, 4, 250)];
        let svg = emit_svg_chart(&recs, &ChartOptions::default()).unwrap();
        let a = bar_height(&svg, "bar-zf-16-512-2");
        let b = bar_height(&svg, "bar-zf-16-512-4");
        assert!((a / b - 4.0).abs() < 1e-3);
        assert_eq!(svg.matches("class=\"legend-entry\"").count(), 2);
    }

    #[test]
    fn one_panel_per_kernel() {
        let recs = [
            rec(KernelId::Lse, 16, 512, 2, 10),
            rec(KernelId::Fft, 64, 512, 2, 10),
            rec(KernelId::Lse, 32, 512, 2, 10),
        ];
        let svg = emit_svg_chart(&recs, &ChartOptions::default()).unwrap();
        assert_eq!(svg.matches("<g id=\"panel-").count(), 2);
        assert!(svg.contains(r#"height="800""#));
    }

    #[test]
    fn log_scale_orders_bars() {
        let recs = [rec(KernelId::Fft, 64, 512, 2, 100_000), rec(KernelId::Fft, 64, 512, 8, 1_000)];
        let opts = ChartOptions { log_scale: true, ..ChartOptions::default() };
        let svg = emit_svg_chart(&recs, &opts).unwrap();
        let hi = bar_height(&svg, "bar-fft-64-512-2");
        let lo = bar_height(&svg, "bar-fft-64-512-8");
        assert!((hi - PLOT_HEIGHT).abs() < 0.01);
        assert!(lo.abs() < 0.01);
        assert!(svg.contains(">1e3<") && svg.contains(">1e5<"));
    }

    #[test]
    fn failed_records_have_no_bar() {
        let mut bad = rec(KernelId::Zf, 16, 512, 4, 5);
        bad.checksum = None;
        let svg = emit_svg_chart(&[rec(KernelId::Zf, 16, 512, 2, 10), bad], &ChartOptions::default()).unwrap();
        assert_eq!(svg.matches("<rect id=\"bar-").count(), 1);
    }

    #[test]
    fn nice_ceiling() {
        assert_eq!(nice_ceil(800.0), 1000.0);
        assert_eq!(nice_ceil(1000.0), 1000.0);
        assert_eq!(nice_ceil(1200.0), 2000.0);
        assert_eq!(nice_ceil(2100.0), 2500.0);
        assert_eq!(nice_ceil(0.0), 1.0);
    }
}
