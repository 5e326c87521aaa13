//! Standalone SVG figures: StationPlot scatter with hull overlay, and box
//! plots of feature distributions.

mod axis;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use axis::{nice_step, tick_label, Axis};

use crate::embedding::{PointCloud, Points};
use crate::error::{Error, Result};
use crate::geometry::{quickhull2d, ConvexHull2D, Hull, Point2};
use crate::stats::BoxplotSummary;

pub const HEALTHY_COLOR: &str = "#2e8b3a";
pub const SEIZURE_COLOR: &str = "#1f5fbf";
const OTHER_COLOR: &str = "#d9822b";
const FALLBACK_COLOR: &str = "#555555";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlotStyle {
    /// Size of one panel in pixels.
    pub width: u32,
    pub height: u32,
    pub point_radius: f64,
    pub class_colors: BTreeMap<String, String>,
    pub margins: u32,
    pub axis_tick_count: usize,
}

impl Default for PlotStyle {
    fn default() -> Self {
        let mut class_colors = BTreeMap::new();
        for tag in ["healthy", "A", "B"] {
            class_colors.insert(tag.to_string(), HEALTHY_COLOR.to_string());
        }
        for tag in ["interictal", "C", "D"] {
            class_colors.insert(tag.to_string(), OTHER_COLOR.to_string());
        }
        for tag in ["seizure", "E"] {
            class_colors.insert(tag.to_string(), SEIZURE_COLOR.to_string());
        }
        PlotStyle {
            width: 480,
            height: 480,
            point_radius: 1.2,
            class_colors,
            margins: 60,
            axis_tick_count: 5,
        }
    }
}

impl PlotStyle {
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidConfig("plot dimensions must be positive".into()));
        }
        if 2 * self.margins >= self.width || 2 * self.margins >= self.height {
            return Err(Error::InvalidConfig(format!(
                "margins {} must be less than half of {}x{}",
                self.margins, self.width, self.height
            )));
        }
        if !(self.point_radius > 0.0 && self.point_radius.is_finite()) {
            return Err(Error::InvalidConfig("point radius must be positive".into()));
        }
        Ok(())
    }

    pub fn color_for(&self, class: Option<&str>) -> &str {
        class
            .and_then(|c| self.class_colors.get(c))
            .map(String::as_str)
            .unwrap_or(FALLBACK_COLOR)
    }
}

/// Pixel rectangle of a panel's plotting area and the data range it shows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub width: f64,
    pub height: f64,
    pub x: Axis,
    pub y: Axis,
}

impl Frame {
    pub fn new(offset_x: f64, style: &PlotStyle, x: Axis, y: Axis) -> Frame {
        let m = f64::from(style.margins);
        Frame {
            left: offset_x + m,
            top: m,
            width: f64::from(style.width) - 2.0 * m,
            height: f64::from(style.height) - 2.0 * m,
            x,
            y,
        }
    }

    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + self.x.unit(x) * self.width,
            self.top + (1.0 - self.y.unit(y)) * self.height,
        )
    }

    pub fn contains_pixel(&self, px: f64, py: f64) -> bool {
        px >= self.left && px <= self.left + self.width && py >= self.top && py <= self.top + self.height
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn open_document(out: &mut String, width: u32, height: u32) {
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">"
    )
    .unwrap();
    writeln!(
        out,
        "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>"
    )
    .unwrap();
}

fn draw_frame(out: &mut String, f: &Frame, style: &PlotStyle, xlabel: &str, ylabel: &str, xticks: bool) {
    writeln!(
        out,
        "<rect class=\"frame\" x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>",
        f.left, f.top, f.width, f.height
    )
    .unwrap();
    let bottom = f.top + f.height;
    if xticks {
        let step = f.x.tick_step(style.axis_tick_count);
        for t in f.x.ticks(style.axis_tick_count) {
            let (px, _) = f.map(t, f.y.lo);
            writeln!(
                out,
                "<line x1=\"{px:.2}\" y1=\"{bottom:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
                bottom + 5.0
            )
            .unwrap();
            writeln!(
                out,
                "<text x=\"{px:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                bottom + 18.0,
                tick_label(t, step)
            )
            .unwrap();
        }
    }
    let step = f.y.tick_step(style.axis_tick_count);
    for t in f.y.ticks(style.axis_tick_count) {
        let (_, py) = f.map(f.x.lo, t);
        writeln!(
            out,
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"black\"/>",
            f.left - 5.0,
            f.left
        )
        .unwrap();
        writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            f.left - 8.0,
            py + 4.0,
            tick_label(t, step)
        )
        .unwrap();
    }
    if !xlabel.is_empty() {
        writeln!(
            out,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            f.left + f.width / 2.0,
            bottom + 38.0,
            escape(xlabel)
        )
        .unwrap();
    }
    let (lx, ly) = (f.left - 45.0, f.top + f.height / 2.0);
    writeln!(
        out,
        "<text x=\"{lx:.2}\" y=\"{ly:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 {lx:.2} {ly:.2})\">{}</text>",
        escape(ylabel)
    )
    .unwrap();
}

fn delta_label(order: usize) -> String {
    match order {
        0 => "x(t)".to_string(),
        1 => "Δx(t)".to_string(),
        n => format!("Δ^{n} x(t)"),
    }
}

#[allow(clippy::too_many_arguments)]
fn scatter_panel(
    out: &mut String,
    offset_x: f64,
    pts: &[Point2],
    hull: Option<&[Point2]>,
    labels: (String, String),
    title: &str,
    color: &str,
    style: &PlotStyle,
) {
    let frame = Frame::new(
        offset_x,
        style,
        Axis::padded(pts.iter().map(|p| p.x)),
        Axis::padded(pts.iter().map(|p| p.y)),
    );
    writeln!(out, "<g class=\"panel\">").unwrap();
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        frame.left + frame.width / 2.0,
        frame.top - 15.0,
        escape(title)
    )
    .unwrap();
    draw_frame(out, &frame, style, &labels.0, &labels.1, true);
    writeln!(out, "<g class=\"points\" fill=\"{color}\" fill-opacity=\"0.6\">").unwrap();
    for p in pts {
        let (px, py) = frame.map(p.x, p.y);
        writeln!(
            out,
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{}\"/>",
            style.point_radius
        )
        .unwrap();
    }
    out.push_str("</g>\n");
    if let Some(h) = hull {
        let coords: Vec<String> = h
            .iter()
            .map(|p| {
                let (px, py) = frame.map(p.x, p.y);
                format!("{px:.2},{py:.2}")
            })
            .collect();
        writeln!(
            out,
            "<polygon class=\"hull\" points=\"{}\" fill=\"{color}\" fill-opacity=\"0.08\" stroke=\"black\" stroke-width=\"1.5\"/>",
            coords.join(" ")
        )
        .unwrap();
    }
    out.push_str("</g>\n");
}

/// Scatter plot of a StationPlot with an optional hull overlay.
///
/// A 3D cloud becomes three side-by-side projections (xy, xz, yz); a spatial
/// hull is shown through the 2D hull of each projection of its vertices.
pub fn render_stationplot(
    cloud: &PointCloud,
    hull: Option<&Hull>,
    class: Option<&str>,
    style: &PlotStyle,
) -> Result<String> {
    style.validate()?;
    if cloud.is_empty() {
        return Err(Error::InvalidInput("cannot plot an empty point cloud".into()));
    }
    let color = style.color_for(class).to_string();
    let n = cloud.order;
    let name = |k: usize| delta_label(n + k);
    let title = match class {
        Some(c) => format!("{} ({c}), n = {n}", cloud.source_id),
        None => format!("{}, n = {n}", cloud.source_id),
    };
    let mut out = String::new();
    match cloud.points() {
        Points::Planar(pts) => {
            let overlay: Option<Vec<Point2>> = match hull {
                None => None,
                Some(Hull::Planar(h)) => Some(h.vertices().to_vec()),
                Some(Hull::Spatial(_)) => {
                    return Err(Error::InvalidInput("spatial hull given for a planar cloud".into()))
                }
            };
            open_document(&mut out, style.width, style.height);
            scatter_panel(
                &mut out,
                0.0,
                pts,
                overlay.as_deref(),
                (name(0), name(1)),
                &title,
                &color,
                style,
            );
        }
        Points::Spatial(pts) => {
            let spatial = match hull {
                None => None,
                Some(Hull::Spatial(h)) => Some(h),
                Some(Hull::Planar(_)) => {
                    return Err(Error::InvalidInput("planar hull given for a spatial cloud".into()))
                }
            };
            open_document(&mut out, 3 * style.width, style.height);
            let axes: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
            for (panel, &(a, b)) in axes.iter().enumerate() {
                let proj: Vec<Point2> = pts.iter().map(|p| project(p, a, b)).collect();
                let overlay = match spatial {
                    Some(h) => {
                        let verts: Vec<Point2> = h.vertices().iter().map(|p| project(p, a, b)).collect();
                        quickhull2d(&verts).ok().map(|h2| h2.vertices().to_vec())
                    }
                    None => None,
                };
                scatter_panel(
                    &mut out,
                    (panel as u32 * style.width) as f64,
                    &proj,
                    overlay.as_deref(),
                    (name(a), name(b)),
                    &title,
                    &color,
                    style,
                );
            }
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn project(p: &crate::geometry::Point3, a: usize, b: usize) -> Point2 {
    let c = [p.x, p.y, p.z];
    Point2::new(c[a], c[b])
}

/// Convenience for the common planar case.
pub fn render_planar(
    cloud: &PointCloud,
    hull: Option<&ConvexHull2D>,
    class: Option<&str>,
    style: &PlotStyle,
) -> Result<String> {
    let hull = hull.map(|h| Hull::Planar(h.clone()));
    render_stationplot(cloud, hull.as_ref(), class, style)
}

/// One box-and-whisker glyph per labelled summary, left to right in the
/// given order.
pub fn render_boxplot(summaries: &[(String, BoxplotSummary)], title: &str, style: &PlotStyle) -> Result<String> {
    style.validate()?;
    if summaries.is_empty() {
        return Err(Error::InvalidInput("box plot needs at least one summary".into()));
    }
    let values = summaries.iter().flat_map(|(_, s)| {
        [s.whisker_low, s.whisker_high, s.q1, s.q3]
            .into_iter()
            .chain(s.outliers.iter().copied())
    });
    let y = Axis::padded(values);
    let k = summaries.len() as f64;
    let x = Axis { lo: 0.0, hi: k };
    let frame = Frame::new(0.0, style, x, y);

    let mut out = String::new();
    open_document(&mut out, style.width, style.height);
    writeln!(
        out,
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\" font-size=\"13\">{}</text>",
        frame.left + frame.width / 2.0,
        frame.top - 15.0,
        escape(title)
    )
    .unwrap();
    draw_frame(&mut out, &frame, style, "", title, false);
    let slot = frame.width / k;
    let box_w = (slot * 0.5).min(80.0);
    for (i, (label, s)) in summaries.iter().enumerate() {
        let color = style.color_for(Some(label));
        let cx = frame.left + (i as f64 + 0.5) * slot;
        let py = |v: f64| frame.map(0.0, v).1;
        let (x0, x1) = (cx - box_w / 2.0, cx + box_w / 2.0);
        writeln!(out, "<g class=\"box\" data-label=\"{}\">", escape(label)).unwrap();
        // whiskers
        for (from, to) in [(s.q1, s.whisker_low), (s.q3, s.whisker_high)] {
            writeln!(
                out,
                "<line class=\"whisker\" x1=\"{cx:.2}\" y1=\"{:.2}\" x2=\"{cx:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
                py(from),
                py(to)
            )
            .unwrap();
            writeln!(
                out,
                "<line class=\"cap\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>",
                cx - box_w / 4.0,
                py(to),
                cx + box_w / 4.0,
                py(to)
            )
            .unwrap();
        }
        if s.q3 > s.q1 {
            writeln!(
                out,
                "<rect class=\"iqr\" x=\"{x0:.2}\" y=\"{:.2}\" width=\"{box_w:.2}\" height=\"{:.2}\" fill=\"{color}\" fill-opacity=\"0.5\" stroke=\"black\"/>",
                py(s.q3),
                py(s.q1) - py(s.q3)
            )
            .unwrap();
        }
        writeln!(
            out,
            "<line class=\"median\" x1=\"{x0:.2}\" y1=\"{m:.2}\" x2=\"{x1:.2}\" y2=\"{m:.2}\" stroke=\"black\" stroke-width=\"2\"/>",
            m = py(s.median)
        )
        .unwrap();
        for &o in &s.outliers {
            writeln!(
                out,
                "<circle class=\"outlier\" cx=\"{cx:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"none\" stroke=\"{color}\"/>",
                py(o)
            )
            .unwrap();
        }
        writeln!(
            out,
            "<text x=\"{cx:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            frame.top + frame.height + 18.0,
            escape(label)
        )
        .unwrap();
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}
