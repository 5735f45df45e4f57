use std::path::{Path, PathBuf};

use plotters::prelude::*;

use super::{PointSummary, SimError};

/// Bounding angles per figure, in ascending order.
pub const EPSILONS_PER_PLOT: usize = 3;

const PALETTE: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(23, 190, 207),
];

/// One curve: mean ξ against σ_d for one algorithm at one ε.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub epsilon: f64,
    pub quaternion: bool,
    pub points: Vec<(f64, f64)>,
}

/// A figure: the curves of one scenario for a group of ε values.
#[derive(Debug, Clone, PartialEq)]
pub struct Figure {
    pub scenario: u8,
    pub epsilons: Vec<f64>,
    pub curves: Vec<Curve>,
}

impl Figure {
    pub fn file_name(&self) -> String {
        let eps: Vec<String> = self.epsilons.iter().map(|e| format!("{e}")).collect();
        format!("scenario{}_eps_{}.svg", self.scenario, eps.join("-"))
    }
}

/// Groups a summary into figures: per scenario, ε values in ascending order in
/// chunks of [`EPSILONS_PER_PLOT`].
pub fn figures(summary: &[PointSummary]) -> Result<Vec<Figure>, SimError> {
    let mut scenarios: Vec<u8> = summary.iter().map(|s| s.scenario).collect();
    scenarios.sort_unstable();
    scenarios.dedup();
    let mut out = Vec::new();
    for sc in scenarios {
        let rows: Vec<&PointSummary> = summary.iter().filter(|s| s.scenario == sc).collect();
        let mut eps: Vec<f64> = rows.iter().map(|s| s.epsilon).collect();
        eps.sort_by(f64::total_cmp);
        eps.dedup();
        for group in eps.chunks(EPSILONS_PER_PLOT) {
            let mut curves = Vec::new();
            for &e in group {
                let mut pts: Vec<&&PointSummary> = rows.iter().filter(|s| s.epsilon == e).collect();
                pts.sort_by(|a, b| a.sigma_d.total_cmp(&b.sigma_d));
                for quaternion in [false, true] {
                    let points: Vec<(f64, f64)> = pts
                        .iter()
                        .filter_map(|s| {
                            let m = if quaternion { s.mean_qdsmds } else { s.mean_smds };
                            m.map(|m| (s.sigma_d, m))
                        })
                        .collect();
                    if points.is_empty() {
                        continue;
                    }
                    let name = if quaternion { "QD-SMDS" } else { "SMDS" };
                    curves.push(Curve {
                        label: format!("{name}, ε = {e}°"),
                        epsilon: e,
                        quaternion,
                        points,
                    });
                }
            }
            if !curves.is_empty() {
                out.push(Figure {
                    scenario: sc,
                    epsilons: group.to_vec(),
                    curves,
                });
            }
        }
    }
    if out.is_empty() {
        return Err(SimError::EmptyDataset);
    }
    Ok(out)
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Renders one figure as SVG text.
pub fn render_svg(fig: &Figure) -> Result<String, SimError> {
    let mut buf = String::new();
    {
        let root = SVGBackend::with_string(&mut buf, (800, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(plot_err)?;
        let all = fig.curves.iter().flat_map(|c| c.points.iter());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in all {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let (x0, x1) = padded(x0, x1);
        let (_, y1) = padded(y0, y1);
        let y0 = 0.0;
        let caption = format!("Scenario {}: mean localization error", roman(fig.scenario));
        let mut chart = ChartBuilder::on(&root)
            .caption(caption, ("sans-serif", 22))
            .margin(16)
            .x_label_area_size(44)
            .y_label_area_size(64)
            .build_cartesian_2d(x0..x1, y0..y1)
            .map_err(plot_err)?;
        chart
            .configure_mesh()
            .x_desc("σ_d [m]")
            .y_desc("mean ξ [m]")
            .axis_desc_style(("sans-serif", 16))
            .label_style(("sans-serif", 13))
            .draw()
            .map_err(plot_err)?;
        for c in &fig.curves {
            let k = fig.epsilons.iter().position(|&e| e == c.epsilon).unwrap_or(0);
            let color = PALETTE[k % PALETTE.len()];
            let style = color.stroke_width(if c.quaternion { 2 } else { 1 });
            chart
                .draw_series(LineSeries::new(c.points.iter().copied(), style))
                .map_err(plot_err)?
                .label(c.label.clone())
                .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], style));
            if c.quaternion {
                chart
                    .draw_series(c.points.iter().map(|&p| TriangleMarker::new(p, 5, color.filled())))
                    .map_err(plot_err)?;
            } else {
                chart
                    .draw_series(c.points.iter().map(|&p| Circle::new(p, 4, color.stroke_width(1))))
                    .map_err(plot_err)?;
            }
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.85))
            .border_style(BLACK)
            .label_font(("sans-serif", 14))
            .position(SeriesLabelPosition::UpperLeft)
            .draw()
            .map_err(plot_err)?;
        root.present().map_err(plot_err)?;
    }
    Ok(buf)
}

fn roman(s: u8) -> &'static str {
    match s {
        1 => "I",
        2 => "II",
        _ => "?",
    }
}

fn plot_err<E: std::fmt::Display>(e: E) -> SimError {
    SimError::Plot(e.to_string())
}

/// Writes one SVG per figure into `dir`.
pub fn emit_plots(summary: &[PointSummary], dir: &Path) -> Result<Vec<PathBuf>, SimError> {
    std::fs::create_dir_all(dir)?;
    figures(summary)?
        .iter()
        .map(|fig| {
            let path = dir.join(fig.file_name());
            std::fs::write(&path, render_svg(fig)?)?;
            Ok(path)
        })
        .collect()
}
