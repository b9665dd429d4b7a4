//! CSV and SVG emitters for sweep results.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::scenario::{RunResult, SweepResult};

pub const CSV_HEADER: &str = "f_p_hz,seed,ddm_raw,ddm_eq,dev_raw,dev_eq";

/// f64 `Display` is shortest round-trip, so parsing the CSV back is exact.
pub fn write_csv<W: Write>(runs: &[RunResult], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in runs {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.f_p_hz, r.seed, r.ddm_raw, r.ddm_eq, r.dev_raw, r.dev_eq
        )?;
    }
    Ok(())
}

pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    write_file(path, |w| write_csv(&result.runs, w))
}

pub fn parse_csv(text: &str) -> Result<Vec<RunResult>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        other => {
            return Err(Error::Config(format!(
                "unexpected CSV header {:?}",
                other.unwrap_or("")
            )))
        }
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let bad = |what: &str| Error::Config(format!("CSV line {}: {what}", i + 2));
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(bad("expected 6 fields"));
            }
            let num = |j: usize| {
                fields[j]
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| bad("bad number"))
            };
            Ok(RunResult {
                f_p_hz: num(0)?,
                seed: fields[1].trim().parse().map_err(|_| bad("bad seed"))?,
                ddm_raw: num(2)?,
                ddm_eq: num(3)?,
                dev_raw: num(4)?,
                dev_eq: num(5)?,
            })
        })
        .collect()
}

pub fn read_csv(path: &Path) -> Result<Vec<RunResult>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

pub fn emit_plot(result: &SweepResult, path: &Path) -> Result<()> {
    let svg = render_svg(result);
    write_file(path, |w| w.write_all(svg.as_bytes()))
}

fn write_file(
    path: &Path,
    f: impl FnOnce(&mut std::io::BufWriter<std::fs::File>) -> std::io::Result<()>,
) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 450.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

/// Self-contained SVG line chart of median deviations against f_p. Blind
/// spots are marked with dashed verticals.
pub fn render_svg(result: &SweepResult) -> String {
    let s = &result.summaries;
    let (x0, x1) = match (s.first(), s.last()) {
        (Some(a), Some(b)) if b.f_p_hz > a.f_p_hz => (a.f_p_hz, b.f_p_hz),
        (Some(a), _) => (a.f_p_hz - 0.5, a.f_p_hz + 0.5),
        _ => (0.0, 1.0),
    };
    let y_max = s
        .iter()
        .flat_map(|p| [p.median_dev_raw, p.median_dev_eq])
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let y_max = if y_max > 0.0 { y_max * 1.05 } else { 1.0 };
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let px = |x: f64| MARGIN_L + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| MARGIN_T + plot_h - y / y_max * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#333"/>"##
    );
    for i in 0..=5 {
        let y = y_max * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{:.4}</text>"##,
            MARGIN_L,
            py(y),
            MARGIN_L + plot_w,
            py(y),
            MARGIN_L - 6.0,
            py(y) + 4.0,
            y
        );
    }
    for i in 0..=5 {
        let x = x0 + (x1 - x0) * i as f64 / 5.0;
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{:.1}</text>"#,
            px(x),
            MARGIN_T + plot_h + 18.0,
            x
        );
    }
    for p in s.iter().filter(|p| p.is_blind_spot()) {
        let _ = writeln!(
            out,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#999" stroke-dasharray="4 3"><title>blind spot at {3} Hz: equalization may underperform</title></line>"##,
            px(p.f_p_hz),
            MARGIN_T,
            MARGIN_T + plot_h,
            p.f_p_hz
        );
    }
    let series = |pick: fn(&crate::harness::scenario::FpSummary) -> f64| {
        s.iter()
            .filter(|p| pick(p).is_finite())
            .map(|p| format!("{:.2},{:.2}", px(p.f_p_hz), py(pick(p))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#d62728" stroke-width="1.5" points="{}"/>"##,
        series(|p| p.median_dev_raw)
    );
    let _ = writeln!(
        out,
        r##"<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{}"/>"##,
        series(|p| p.median_dev_eq)
    );
    let lx = MARGIN_L + plot_w - 170.0;
    let _ = writeln!(
        out,
        r##"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="#d62728" stroke-width="2"/><text x="{2}" y="{3}">non-equalized</text>"##,
        MARGIN_T + 15.0,
        lx + 20.0,
        lx + 26.0,
        MARGIN_T + 19.0
    );
    let _ = writeln!(
        out,
        r##"<line x1="{lx}" y1="{0}" x2="{1}" y2="{0}" stroke="#1f77b4" stroke-width="2"/><text x="{2}" y="{3}">equalized</text>"##,
        MARGIN_T + 33.0,
        lx + 20.0,
        lx + 26.0,
        MARGIN_T + 37.0
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">propeller frequency f_p (Hz)</text>"#,
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">median DDM deviation</text>"#,
        MARGIN_T + plot_h / 2.0,
        MARGIN_T + plot_h / 2.0
    );
    out.push_str("</svg>\n");
    out
}
