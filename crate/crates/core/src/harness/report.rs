//! CSV traces, slope tables and log-log SVG regret plots.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::algorithms::RegretTrace;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 6] = ["t", "block", "phase", "reward", "cum_reward", "feasible"];

#[derive(Serialize)]
struct CsvRow<'a> {
    t: usize,
    block: usize,
    phase: &'a str,
    reward: f64,
    cum_reward: f64,
    feasible: bool,
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_trace_csv<W: Write>(trace: &RegretTrace, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let mut cum = 0.0;
    for r in &trace.records {
        cum += r.reward;
        w.serialize(CsvRow {
            t: r.t,
            block: r.block,
            phase: r.phase.as_str(),
            reward: r.reward,
            cum_reward: cum,
            feasible: r.feasible,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `log y` on `log x` over the pairs with both
/// coordinates positive; `None` with fewer than two usable distinct `x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// About `count` log-spaced 1-based indices in `[lo, hi]`.
fn log_spaced(lo: usize, hi: usize, count: usize) -> Vec<usize> {
    let (lo, hi) = (lo.max(1), hi.max(1));
    let (a, b) = ((lo as f64).ln(), (hi as f64).ln());
    let mut out: Vec<usize> = (0..count)
        .map(|i| {
            let f = if count > 1 { i as f64 / (count - 1) as f64 } else { 1.0 };
            ((a + f * (b - a)).exp().round() as usize).clamp(lo, hi)
        })
        .collect();
    out.dedup();
    out
}

/// One curve of a regret plot: `regret[s−1] = R_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotSeries {
    pub label: String,
    pub regret: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRow {
    pub label: String,
    pub horizon: usize,
    pub final_regret: f64,
    /// Fitted log-log slope of `R_s` over the last two decades of `s`.
    pub slope: Option<f64>,
}

impl PlotSeries {
    pub fn slope(&self) -> Option<f64> {
        let n = self.regret.len();
        if n < 2 {
            return None;
        }
        let idx = log_spaced((n / 100).max(1), n, 60);
        let xs: Vec<f64> = idx.iter().map(|&s| s as f64).collect();
        let ys: Vec<f64> = idx.iter().map(|&s| self.regret[s - 1]).collect();
        fit_loglog_slope(&xs, &ys)
    }

    pub fn slope_row(&self) -> SlopeRow {
        SlopeRow {
            label: self.label.clone(),
            horizon: self.regret.len(),
            final_regret: self.regret.last().copied().unwrap_or(0.0),
            slope: self.slope(),
        }
    }
}

pub fn write_slope_table<W: Write>(rows: &[SlopeRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "horizon", "final_regret", "slope"]).map_err(csv_err)?;
    for r in rows {
        let slope = r.slope.map(|s| s.to_string()).unwrap_or_default();
        w.write_record([r.label.clone(), r.horizon.to_string(), r.final_regret.to_string(), slope]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Log-log plot of `max(R_s, floor)` against `s`, one polyline per series,
/// with the fitted slope in the legend. Returns the SVG and the slope table.
pub fn emit_plot(series: &[PlotSeries]) -> Result<(String, Vec<SlopeRow>)> {
    if series.is_empty() {
        return Err(Error::InvalidParameter("emit_plot needs at least one trace".into()));
    }
    let (w, h, ml, mr, mt, mb) = (720.0, 460.0, 70.0, 20.0, 20.0, 50.0);
    let max_t = series.iter().map(|s| s.regret.len()).max().unwrap_or(1).max(2);
    let max_r =
        series.iter().flat_map(|s| s.regret.iter()).cloned().filter(|r| r.is_finite() && *r > 0.0).fold(0.0, f64::max);
    let floor = if max_r > 0.0 { max_r * 1e-4 } else { 1.0 };
    let (y_lo, y_hi) = (floor.log10().floor(), (max_r.max(floor * 10.0)).log10().ceil());
    let x_hi = (max_t as f64).log10().ceil().max(1.0);
    let px = |s: f64| ml + (s.log10() / x_hi) * (w - ml - mr);
    let py = |r: f64| {
        let r = if r.is_finite() { r.max(floor) } else { floor };
        h - mb - (r.log10() - y_lo) / (y_hi - y_lo) * (h - mt - mb)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        w - ml - mr,
        h - mt - mb
    );
    for e in 0..=(x_hi as i32) {
        let x = px(10f64.powi(e));
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{mt}" x2="{x:.2}" y2="{}" stroke="#ddd"/>"##, h - mb);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{e}</text>"#, h - mb + 16.0);
    }
    for e in (y_lo as i32)..=(y_hi as i32) {
        let y = py(10f64.powi(e));
        let _ = writeln!(svg, r##"<line x1="{ml}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, w - mr);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{e}</text>"#, ml - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">round t</text>"#, (w + ml) / 2.0, h - 12.0);
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">cumulative (1-1/e)-regret</text>"#,
        h / 2.0,
        h / 2.0
    );

    let mut rows = Vec::with_capacity(series.len());
    for (i, s) in series.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let row = s.slope_row();
        let points: Vec<String> = if s.regret.is_empty() {
            Vec::new()
        } else {
            log_spaced(1, s.regret.len(), 400)
                .into_iter()
                .map(|t| format!("{:.2},{:.2}", px(t as f64), py(s.regret[t - 1])))
                .collect()
        };
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
        let slope = row.slope.map(|v| format!("{v:.3}")).unwrap_or_else(|| "n/a".into());
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" fill="{colour}">{} (slope {slope})</text>"#,
            ml + 10.0,
            mt + 16.0 * (i + 1) as f64,
            escape(&s.label)
        );
        rows.push(row);
    }
    svg.push_str("</svg>\n");
    Ok((svg, rows))
}
