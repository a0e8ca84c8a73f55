//! Standalone SVG scatter plots: two-algorithm slices of the performance
//! space (Mini-APS) and PCA projections.
//!
//! Output is plain SVG 1.1 text with no external references. Pixel
//! coordinates are printed with two decimals, so identical inputs give
//! byte-identical documents.

use std::fmt::Write as _;

use thiserror::Error;

use crate::matrix::PerformanceMatrix;
use crate::reduce::PcaProjection;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VizError {
    #[error("unknown algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("x and y axis are both {0:?}")]
    SameAlgorithm(String),
    #[error("no dataset has scores for both {0:?} and {1:?}")]
    NoPlottablePoints(String, String),
    #[error("every plotted score of {0:?} is zero")]
    ZeroAxis(String),
    #[error("need at least 2 algorithms, got {0}")]
    TooFewAlgorithms(usize),
    #[error("scatter plot needs exactly 2 components, projection has {0}")]
    BadComponentCount(usize),
    #[error("{found} metric values for {expected} projected datasets")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid plot spec: {0}")]
    InvalidSpec(String),
}

/// Datasets whose name starts with `prefix` are drawn in `color`, on top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighlightGroup {
    pub name: String,
    pub prefix: String,
    /// `#RRGGBB`
    pub color: String,
}

impl HighlightGroup {
    pub fn new(name: impl Into<String>, prefix: impl Into<String>, color: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            prefix: prefix.into(),
            color: color.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColorBy {
    Difficulty,
    Variance,
}

impl ColorBy {
    pub fn label(self) -> &'static str {
        match self {
            ColorBy::Difficulty => "Difficulty",
            ColorBy::Variance => "Variance",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub width_px: u32,
    pub height_px: u32,
    pub highlight_groups: Vec<HighlightGroup>,
    pub color_by: Option<ColorBy>,
    pub point_radius_px: f64,
}

impl Default for PlotSpec {
    fn default() -> Self {
        Self {
            width_px: 600,
            height_px: 600,
            highlight_groups: Vec::new(),
            color_by: None,
            point_radius_px: 4.0,
        }
    }
}

fn parse_hex(color: &str) -> Option<[u8; 3]> {
    let hex = color.strip_prefix('#')?;
    if hex.len() != 6 || !hex.bytes().all(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).ok();
    Some([channel(0)?, channel(2)?, channel(4)?])
}

impl PlotSpec {
    pub fn validate(&self) -> Result<(), VizError> {
        if self.width_px == 0 || self.height_px == 0 {
            return Err(VizError::InvalidSpec("width and height must be positive".into()));
        }
        if !(self.point_radius_px > 0.0 && self.point_radius_px.is_finite()) {
            return Err(VizError::InvalidSpec("point radius must be positive".into()));
        }
        for group in &self.highlight_groups {
            if group.prefix.is_empty() {
                return Err(VizError::InvalidSpec(format!("group {:?} has an empty pattern", group.name)));
            }
            if parse_hex(&group.color).is_none() {
                return Err(VizError::InvalidSpec(format!("color {:?} is not #RRGGBB", group.color)));
            }
        }
        Ok(())
    }

    fn group_of(&self, dataset: &str) -> Option<usize> {
        self.highlight_groups
            .iter()
            .position(|g| dataset.starts_with(&g.prefix))
    }
}

const BASE_COLOR: &str = "#9e9e9e";
const LOW_COLOR: [u8; 3] = [0x2c, 0x7b, 0xb6];
const HIGH_COLOR: [u8; 3] = [0xd7, 0x19, 0x1c];

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

fn px(value: f64) -> String {
    let s = format!("{value:.2}");
    if s == "-0.00" {
        "0.00".to_string()
    } else {
        s
    }
}

fn lerp_color(t: f64) -> String {
    let t = t.clamp(0.0, 1.0);
    let c: Vec<u8> = LOW_COLOR
        .iter()
        .zip(HIGH_COLOR)
        .map(|(&a, b)| (a as f64 + (b as f64 - a as f64) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

/// Formats a percentage with two significant figures.
fn percent_2sf(ratio: f64) -> String {
    let pct = ratio * 100.0;
    if pct == 0.0 || !pct.is_finite() {
        return "0".to_string();
    }
    let magnitude = pct.abs().log10().floor() as i32;
    let decimals = (1 - magnitude).max(0) as usize;
    format!("{pct:.decimals$}")
}

struct Frame {
    width: f64,
    height: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn new(spec: &PlotSpec, legend: bool) -> Self {
        Self {
            width: spec.width_px as f64,
            height: spec.height_px as f64,
            left: 64.0,
            right: if legend { 110.0 } else { 24.0 },
            top: 40.0,
            bottom: 56.0,
        }
    }

    fn plot_width(&self) -> f64 {
        (self.width - self.left - self.right).max(1.0)
    }

    fn plot_height(&self) -> f64 {
        (self.height - self.top - self.bottom).max(1.0)
    }

    /// Unit square to pixels, y up.
    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + x * self.plot_width(),
            self.top + (1.0 - y) * self.plot_height(),
        )
    }
}

struct Canvas {
    body: String,
}

impl Canvas {
    fn open(frame: &Frame, title: &str) -> Self {
        let mut body = String::new();
        body.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
            w = frame.width,
            h = frame.height
        );
        let _ = writeln!(body, "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>", frame.width, frame.height);
        let _ = writeln!(
            body,
            "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">{}</text>",
            px(frame.width / 2.0),
            escape(title)
        );
        Self { body }
    }

    fn axes(&mut self, frame: &Frame, x_label: &str, y_label: &str, x_ticks: &[(f64, String)], y_ticks: &[(f64, String)]) {
        let (x0, y0) = frame.map(0.0, 0.0);
        let (x1, y1) = frame.map(1.0, 1.0);
        let b = &mut self.body;
        let _ = writeln!(b, "<g stroke=\"#333333\" stroke-width=\"1\">");
        let _ = writeln!(b, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", px(x0), px(y0), px(x1), px(y0));
        let _ = writeln!(b, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", px(x0), px(y0), px(x0), px(y1));
        for (t, _) in x_ticks {
            let (x, _) = frame.map(*t, 0.0);
            let _ = writeln!(b, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", px(x), px(y0), px(x), px(y0 + 5.0));
        }
        for (t, _) in y_ticks {
            let (_, y) = frame.map(0.0, *t);
            let _ = writeln!(b, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>", px(x0 - 5.0), px(y), px(x0), px(y));
        }
        let _ = writeln!(b, "</g>");
        let _ = writeln!(b, "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">");
        for (t, label) in x_ticks {
            let (x, _) = frame.map(*t, 0.0);
            let _ = writeln!(b, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", px(x), px(y0 + 18.0), escape(label));
        }
        for (t, label) in y_ticks {
            let (_, y) = frame.map(0.0, *t);
            let _ = writeln!(b, "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>", px(x0 - 8.0), px(y + 4.0), escape(label));
        }
        let _ = writeln!(b, "</g>");
        let _ = writeln!(
            b,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>",
            px((x0 + x1) / 2.0),
            px(frame.height - 14.0),
            escape(x_label)
        );
        let (cy, cx) = ((y0 + y1) / 2.0, 18.0);
        let _ = writeln!(
            b,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 {} {})\">{}</text>",
            px(cx),
            px(cy),
            px(cx),
            px(cy),
            escape(y_label)
        );
    }

    fn point(&mut self, (x, y): (f64, f64), radius: f64, fill: &str, stroke: &str, name: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"1\"><title>{}</title></circle>",
            px(x),
            px(y),
            px(radius),
            fill,
            stroke,
            escape(name)
        );
    }

    fn group_legend(&mut self, frame: &Frame, groups: &[HighlightGroup]) {
        for (i, group) in groups.iter().enumerate() {
            let x = frame.left + 8.0;
            let y = frame.top + 6.0 + 16.0 * i as f64;
            let _ = writeln!(
                self.body,
                "<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/><text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
                px(x),
                px(y),
                group.color,
                px(x + 14.0),
                px(y + 9.0),
                escape(&group.name)
            );
        }
    }

    fn close(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

/// Scatter of two algorithms' scores, each axis divided by its maximum over
/// the plotted datasets.
pub fn mini_aps_svg<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    algo_x: &str,
    algo_y: &str,
    spec: &PlotSpec,
) -> Result<String, VizError> {
    spec.validate()?;
    let ax = matrix
        .algorithm_index(algo_x)
        .ok_or_else(|| VizError::UnknownAlgorithm(algo_x.to_string()))?;
    let ay = matrix
        .algorithm_index(algo_y)
        .ok_or_else(|| VizError::UnknownAlgorithm(algo_y.to_string()))?;
    if ax == ay {
        return Err(VizError::SameAlgorithm(algo_x.to_string()));
    }
    let points: Vec<(&str, f64, f64)> = matrix
        .datasets()
        .iter()
        .enumerate()
        .filter_map(|(d, name)| {
            let x = matrix.cell(d, ax)?.to_f64()?;
            let y = matrix.cell(d, ay)?.to_f64()?;
            Some((name.as_str(), x, y))
        })
        .collect();
    if points.is_empty() {
        return Err(VizError::NoPlottablePoints(algo_x.to_string(), algo_y.to_string()));
    }
    let max_x = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let max_y = points.iter().map(|p| p.2).fold(0.0, f64::max);
    if max_x <= 0.0 {
        return Err(VizError::ZeroAxis(algo_x.to_string()));
    }
    if max_y <= 0.0 {
        return Err(VizError::ZeroAxis(algo_y.to_string()));
    }

    let frame = Frame::new(spec, false);
    let mut canvas = Canvas::open(&frame, &format!("{algo_x} vs {algo_y}"));
    let ticks: Vec<(f64, String)> = [(0.0, "0"), (0.5, "0.5"), (1.0, "1")]
        .iter()
        .map(|(t, l)| (*t, l.to_string()))
        .collect();
    canvas.axes(
        &frame,
        &format!("{algo_x} (normalized)"),
        &format!("{algo_y} (normalized)"),
        &ticks,
        &ticks,
    );
    let _ = writeln!(canvas.body, "<g class=\"points\">");
    let draw = |canvas: &mut Canvas, (name, x, y): (&str, f64, f64), fill: &str| {
        canvas.point(frame.map(x / max_x, y / max_y), spec.point_radius_px, fill, "#ffffff", name);
    };
    for &p in points.iter().filter(|p| spec.group_of(p.0).is_none()) {
        draw(&mut canvas, p, BASE_COLOR);
    }
    for (g, group) in spec.highlight_groups.iter().enumerate() {
        for &p in points.iter().filter(|p| spec.group_of(p.0) == Some(g)) {
            draw(&mut canvas, p, &group.color);
        }
    }
    let _ = writeln!(canvas.body, "</g>");
    canvas.group_legend(&frame, &spec.highlight_groups);
    Ok(canvas.close())
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPlot {
    pub algo_x: String,
    pub algo_y: String,
    pub svg: String,
}

impl GridPlot {
    pub fn label(&self) -> String {
        format!("{} vs {}", self.algo_x, self.algo_y)
    }

    /// `mini_<algoX>_vs_<algoY>.svg`
    pub fn file_name(&self) -> String {
        format!("mini_{}_vs_{}.svg", self.algo_x, self.algo_y)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MiniApsGrid {
    pub plots: Vec<GridPlot>,
    /// One entry per skipped pair.
    pub warnings: Vec<String>,
}

/// One Mini-APS per unordered algorithm pair in matrix order, or per ordered
/// pair when `ordered` is set. Pairs without co-present scores are skipped.
pub fn mini_aps_grid<T: Scalar>(
    matrix: &PerformanceMatrix<T>,
    spec: &PlotSpec,
    ordered: bool,
) -> Result<MiniApsGrid, VizError> {
    let n = matrix.dimension();
    if n < 2 {
        return Err(VizError::TooFewAlgorithms(n));
    }
    let names: Vec<&str> = matrix.algorithms().iter().map(|a| a.as_str()).collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| if ordered { i != j } else { i < j })
        .collect();
    let mut grid = MiniApsGrid::default();
    for (i, j) in pairs {
        match mini_aps_svg(matrix, names[i], names[j], spec) {
            Ok(svg) => grid.plots.push(GridPlot {
                algo_x: names[i].to_string(),
                algo_y: names[j].to_string(),
                svg,
            }),
            Err(err @ (VizError::NoPlottablePoints(..) | VizError::ZeroAxis(_))) => {
                grid.warnings.push(format!("skipped {} vs {}: {err}", names[i], names[j]))
            }
            Err(err) => return Err(err),
        }
    }
    Ok(grid)
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let span = hi - lo;
    if span > 0.0 {
        (lo - 0.05 * span, hi + 0.05 * span)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

/// Two-component PCA scatter. With `metric_values`, points are filled on a
/// linear gradient between the lowest and highest value and a legend strip is
/// drawn; datasets whose value is `None` stay grey.
pub fn pca_scatter_svg<T: Scalar>(
    projection: &PcaProjection<T>,
    metric_values: Option<&[Option<T>]>,
    spec: &PlotSpec,
) -> Result<String, VizError> {
    spec.validate()?;
    let k = projection.components.len();
    if k != 2 {
        return Err(VizError::BadComponentCount(k));
    }
    let count = projection.dataset_ids.len();
    if let Some(values) = metric_values {
        if values.len() != count {
            return Err(VizError::LengthMismatch {
                expected: count,
                found: values.len(),
            });
        }
    }
    let coords: Vec<(f64, f64)> = projection
        .coordinates
        .iter()
        .map(|c| (c[0].to_f64().unwrap_or(0.0), c[1].to_f64().unwrap_or(0.0)))
        .collect();
    let (x_lo, x_hi) = padded_range(coords.iter().map(|c| c.0));
    let (y_lo, y_hi) = padded_range(coords.iter().map(|c| c.1));
    let unit = |(x, y): (f64, f64)| ((x - x_lo) / (x_hi - x_lo), (y - y_lo) / (y_hi - y_lo));

    let values: Option<Vec<Option<f64>>> =
        metric_values.map(|v| v.iter().map(|x| x.and_then(|x| x.to_f64())).collect());
    let range = values.as_ref().and_then(|v| {
        let present: Vec<f64> = v.iter().flatten().copied().collect();
        if present.is_empty() {
            None
        } else {
            Some(present.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x))))
        }
    });

    let frame = Frame::new(spec, range.is_some());
    let mut canvas = Canvas::open(&frame, "PCA projection");
    let ratio = |i: usize| projection.explained_variance_ratio[i].to_f64().unwrap_or(0.0);
    let ticks = |lo: f64, hi: f64| -> Vec<(f64, String)> {
        [0.0, 0.5, 1.0]
            .iter()
            .map(|&t| (t, format!("{:.2}", lo + t * (hi - lo))))
            .collect()
    };
    canvas.axes(
        &frame,
        &format!("Component 1 ({}% explained variance)", percent_2sf(ratio(0))),
        &format!("Component 2 ({}% explained variance)", percent_2sf(ratio(1))),
        &ticks(x_lo, x_hi),
        &ticks(y_lo, y_hi),
    );

    let fill_of = |i: usize| -> String {
        match (&values, range) {
            (Some(v), Some((lo, hi))) => match v[i] {
                Some(x) if hi > lo => lerp_color((x - lo) / (hi - lo)),
                Some(_) => lerp_color(0.0),
                None => BASE_COLOR.to_string(),
            },
            _ => BASE_COLOR.to_string(),
        }
    };
    let coloring = range.is_some();
    let _ = writeln!(canvas.body, "<g class=\"points\">");
    let mut order: Vec<usize> = (0..count)
        .filter(|&i| spec.group_of(projection.dataset_ids[i].as_str()).is_none())
        .collect();
    for g in 0..spec.highlight_groups.len() {
        order.extend((0..count).filter(|&i| spec.group_of(projection.dataset_ids[i].as_str()) == Some(g)));
    }
    for i in order {
        let name = projection.dataset_ids[i].as_str();
        let group = spec.group_of(name).map(|g| spec.highlight_groups[g].color.as_str());
        let (fill, stroke) = match (coloring, group) {
            (true, Some(color)) => (fill_of(i), color.to_string()),
            (true, None) => (fill_of(i), "#ffffff".to_string()),
            (false, Some(color)) => (color.to_string(), "#ffffff".to_string()),
            (false, None) => (BASE_COLOR.to_string(), "#ffffff".to_string()),
        };
        let (x, y) = unit(coords[i]);
        canvas.point(frame.map(x, y), spec.point_radius_px, &fill, &stroke, name);
    }
    let _ = writeln!(canvas.body, "</g>");
    canvas.group_legend(&frame, &spec.highlight_groups);

    if let Some((lo, hi)) = range {
        let title = spec.color_by.map_or("value", ColorBy::label);
        let x = frame.width - frame.right + 24.0;
        let top = frame.top;
        let strip = frame.plot_height().min(200.0);
        let b = &mut canvas.body;
        let _ = writeln!(b, "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"11\">");
        let _ = writeln!(b, "<text x=\"{}\" y=\"{}\">{}</text>", px(x), px(top - 6.0), escape(title));
        if hi > lo {
            const STEPS: usize = 10;
            let step = strip / STEPS as f64;
            for s in 0..STEPS {
                // top of the strip is the highest value
                let t = 1.0 - (s as f64 + 0.5) / STEPS as f64;
                let _ = writeln!(
                    b,
                    "<rect x=\"{}\" y=\"{}\" width=\"16\" height=\"{}\" fill=\"{}\"/>",
                    px(x),
                    px(top + s as f64 * step),
                    px(step),
                    lerp_color(t)
                );
            }
            let _ = writeln!(b, "<text x=\"{}\" y=\"{}\">{:.3}</text>", px(x + 20.0), px(top + 9.0), hi);
            let _ = writeln!(b, "<text x=\"{}\" y=\"{}\">{:.3}</text>", px(x + 20.0), px(top + strip), lo);
        } else {
            let _ = writeln!(
                b,
                "<rect x=\"{}\" y=\"{}\" width=\"16\" height=\"16\" fill=\"{}\"/>",
                px(x),
                px(top),
                lerp_color(0.0)
            );
            let _ = writeln!(b, "<text x=\"{}\" y=\"{}\">{:.3}</text>", px(x + 20.0), px(top + 12.0), lo);
        }
        let _ = writeln!(b, "</g>");
    }
    Ok(canvas.close())
}
