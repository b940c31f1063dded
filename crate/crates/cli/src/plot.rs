//! Static SVG plots: time series and plane heatmaps.

use std::path::Path;

use plotters::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot: {0}")]
    Empty(String),

    #[error("plot backend: {0}")]
    Backend(String),
}

fn backend<E: std::fmt::Debug>(e: E) -> PlotError {
    PlotError::Backend(format!("{e:?}"))
}

#[derive(Debug, Clone)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub size: (u32, u32),
}

impl PlotStyle {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), size: (800, 500) }
    }
}

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, x: &[f64], y: &[f64]) -> Self {
        Self { label: label.into(), points: x.iter().copied().zip(y.iter().copied()).collect() }
    }
}

/// `[lo, hi]` widened so a flat series still gets a usable axis.
fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) =
        values.filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let span = hi - lo;
    if span <= 1e-12 * lo.abs().max(hi.abs()) {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    } else {
        (lo - 0.05 * span, hi + 0.05 * span)
    }
}

pub fn line_plot(path: &Path, style: &PlotStyle, series: &[Series]) -> Result<(), PlotError> {
    if series.is_empty() || series.iter().any(|s| s.points.is_empty()) {
        return Err(PlotError::Empty(style.title.clone()));
    }
    let (x0, x1) = padded_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = padded_range(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let root = SVGBackend::new(path, style.size).into_drawing_area();
    root.fill(&WHITE).map_err(backend)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&style.title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(45)
        .y_label_area_size(85)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(backend)?;
    chart
        .configure_mesh()
        .x_desc(&style.x_label)
        .y_desc(&style.y_label)
        .y_label_formatter(&|v| format!("{v:.3e}"))
        .draw()
        .map_err(backend)?;
    for (k, s) in series.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(s.points.iter().copied(), color.stroke_width(2)))
            .map_err(backend)?
            .label(&s.label)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    if series.len() > 1 || !series[0].label.is_empty() {
        chart.configure_series_labels().background_style(WHITE.mix(0.8)).border_style(BLACK).draw().map_err(backend)?;
    }
    root.present().map_err(backend)
}

/// Row-major samples `values[j * nx + i]` at `(x0 + i dx, y0 + j dy)`.
#[derive(Debug, Clone, Copy)]
pub struct Heatmap<'a> {
    pub nx: usize,
    pub ny: usize,
    pub x0: f64,
    pub y0: f64,
    pub dx: f64,
    pub dy: f64,
    pub values: &'a [f64],
}

/// Cells per axis above which the image is block-averaged.
pub const MAX_CELLS: usize = 160;

const VIRIDIS: [(u8, u8, u8); 5] = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)];

fn viridis(v: f64) -> RGBColor {
    let v = v.clamp(0.0, 1.0) * (VIRIDIS.len() - 1) as f64;
    let k = (v.floor() as usize).min(VIRIDIS.len() - 2);
    let t = v - k as f64;
    let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
    let (a, b) = (VIRIDIS[k], VIRIDIS[k + 1]);
    RGBColor(mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

/// Block averages so neither axis exceeds [`MAX_CELLS`].
fn downsample(map: &Heatmap) -> (usize, usize, Vec<f64>) {
    let (bx, by) = (map.nx.div_ceil(MAX_CELLS), map.ny.div_ceil(MAX_CELLS));
    let (mx, my) = (map.nx.div_ceil(bx), map.ny.div_ceil(by));
    let mut out = vec![0.0; mx * my];
    let mut count = vec![0usize; mx * my];
    for j in 0..map.ny {
        for i in 0..map.nx {
            let k = (j / by) * mx + i / bx;
            out[k] += map.values[j * map.nx + i];
            count[k] += 1;
        }
    }
    out.iter_mut().zip(&count).for_each(|(v, &c)| *v /= c as f64);
    (mx, my, out)
}

/// Densities normalized to their own maximum, linear color scale.
pub fn heatmap(path: &Path, style: &PlotStyle, map: &Heatmap) -> Result<(), PlotError> {
    if map.nx == 0 || map.ny == 0 || map.values.len() != map.nx * map.ny {
        return Err(PlotError::Empty(style.title.clone()));
    }
    let (mx, my, cells) = downsample(map);
    let (cx, cy) = (map.dx * (map.nx as f64 / mx as f64), map.dy * (map.ny as f64 / my as f64));
    let (x0, y0) = (map.x0 - 0.5 * map.dx, map.y0 - 0.5 * map.dy);
    let (x1, y1) = (x0 + mx as f64 * cx, y0 + my as f64 * cy);
    let peak = cells.iter().copied().fold(0.0, f64::max);
    let scale = if peak > 0.0 { 1.0 / peak } else { 0.0 };
    let root = SVGBackend::new(path, (style.size.0.min(style.size.1) + 120, style.size.0.min(style.size.1)))
        .into_drawing_area();
    root.fill(&WHITE).map_err(backend)?;
    let mut chart = ChartBuilder::on(&root)
        .caption(&style.title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(45)
        .y_label_area_size(85)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(backend)?;
    chart
        .configure_mesh()
        .disable_mesh()
        .x_desc(&style.x_label)
        .y_desc(&style.y_label)
        .x_label_formatter(&|v| format!("{v:.3e}"))
        .y_label_formatter(&|v| format!("{v:.3e}"))
        .draw()
        .map_err(backend)?;
    chart
        .draw_series((0..my).flat_map(|j| {
            let cells = &cells;
            (0..mx).map(move |i| {
                let (a, b) = (x0 + i as f64 * cx, y0 + j as f64 * cy);
                Rectangle::new([(a, b), (a + cx, b + cy)], viridis(cells[j * mx + i] * scale).filled())
            })
        }))
        .map_err(backend)?;
    root.present().map_err(backend)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_series_draws_a_horizontal_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flat.svg");
        let t: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let y = vec![2.5; 50];
        line_plot(&path, &PlotStyle::new("flat", "time [au]", "value [1]"), &[Series::new("", &t, &y)]).unwrap();
        let svg = std::fs::read_to_string(&path).unwrap();
        assert!(svg.contains("time [au]") && svg.contains("value [1]"));
        // the data line is the polyline with the most vertices (the frame has two)
        let pts = svg
            .split("<polyline")
            .skip(1)
            .map(|l| l.split("points=\"").nth(1).unwrap().split('"').next().unwrap())
            .max_by_key(|p| p.split_whitespace().count())
            .expect("a polyline");
        let ys: Vec<&str> = pts.split_whitespace().map(|p| p.split(',').nth(1).unwrap()).collect();
        assert!(ys.len() >= 2 && ys.iter().all(|y| *y == ys[0]), "{pts}");
    }

    #[test]
    fn empty_series_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let style = PlotStyle::new("e", "x", "y");
        assert!(matches!(line_plot(&dir.path().join("a.svg"), &style, &[]), Err(PlotError::Empty(_))));
        let empty = Series::new("s", &[], &[]);
        assert!(matches!(line_plot(&dir.path().join("b.svg"), &style, &[empty]), Err(PlotError::Empty(_))));
        let map = Heatmap { nx: 0, ny: 0, x0: 0.0, y0: 0.0, dx: 1.0, dy: 1.0, values: &[] };
        assert!(matches!(heatmap(&dir.path().join("c.svg"), &style, &map), Err(PlotError::Empty(_))));
    }

    #[test]
    fn downsampling_averages_blocks() {
        let n = 2 * MAX_CELLS;
        let values: Vec<f64> = (0..n * n).map(|k| ((k % n) % 2) as f64).collect();
        let map = Heatmap { nx: n, ny: n, x0: 0.0, y0: 0.0, dx: 1.0, dy: 1.0, values: &values };
        let (mx, my, cells) = downsample(&map);
        assert_eq!((mx, my), (MAX_CELLS, MAX_CELLS));
        assert!(cells.iter().all(|v| (v - 0.5).abs() < 1e-15));
        assert_eq!(viridis(0.0), RGBColor(68, 1, 84));
        assert_eq!(viridis(1.0), RGBColor(253, 231, 37));
    }
}
