//! SVG and ASCII renderings of a [`LinearLawModel`].
//!
//! Both renderings work in display units (amounts divided by the model's
//! unit scale). The SVG keeps data coordinates inside a transformed group, so
//! polyline points and guide endpoints read directly as values on the axes.
//! Lines are clipped to the plotting window in exact arithmetic before any
//! number is printed.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{Equilibrium, LinearFn, LinearLawModel};
use crate::money::format_rational_fixed;

pub const ASCII_WIDTH: usize = 80;
pub const ASCII_HEIGHT: usize = 24;

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 20.0;
const MARGIN_BOTTOM: f64 = 50.0;

// Label offsets as fractions of the axis spans; with the default window they
// put the labels where the reference R plot has them.
const EQ_LABEL_DX: f64 = 0.0289;
const EQ_LABEL_DY: f64 = 0.018;
const RIGHTS_LABEL_DY: f64 = 0.02;
const DUTIES_LABEL_DY: f64 = 0.0275;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagramError {
    #[error("{axis}-range [{min}, {max}] is empty or inverted")]
    EmptyRange { axis: char, min: f64, max: f64 },
    #[error("canvas {width}x{height} is too small (minimum 200x150)")]
    CanvasTooSmall { width: u32, height: u32 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramOptions {
    /// Horizontal window in display units.
    pub x_range: (f64, f64),
    /// Vertical window in display units.
    pub y_range: (f64, f64),
    pub width: u32,
    pub height: u32,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        DiagramOptions {
            x_range: (0.0, 5000.0),
            y_range: (0.0, 1000.0),
            width: 720,
            height: 540,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub svg: String,
    pub ascii: String,
}

pub fn render_diagram(
    model: &LinearLawModel,
    equilibrium: &Equilibrium,
    opts: &DiagramOptions,
) -> Result<Diagram, DiagramError> {
    Ok(Diagram {
        svg: render_svg(model, equilibrium, opts)?,
        ascii: render_ascii(model, equilibrium, opts)?,
    })
}

/// The model in display units, restricted to the plotting window.
struct Scene {
    x_min: BigRational,
    x_max: BigRational,
    y_min: BigRational,
    y_max: BigRational,
    rights: Vec<Piece>,
    duties: Vec<Piece>,
    equilibrium: Option<(BigRational, BigRational)>,
}

struct Piece {
    from: BigRational,
    to: BigRational,
    line: LinearFn,
}

impl Scene {
    fn new(
        model: &LinearLawModel,
        equilibrium: &Equilibrium,
        opts: &DiagramOptions,
    ) -> Result<Scene, DiagramError> {
        let (x_min, x_max) = window('x', opts.x_range)?;
        let (y_min, y_max) = window('y', opts.y_range)?;
        if opts.width < 200 || opts.height < 150 {
            return Err(DiagramError::CanvasTooSmall {
                width: opts.width,
                height: opts.height,
            });
        }
        let scale = BigRational::from_integer(BigInt::from(model.unit_scale()));
        let rights = model.rights().rescaled(&scale);
        let duties = model.duties().rescaled(&scale);

        let whole = |line: &LinearFn| {
            vec![Piece {
                from: x_min.clone(),
                to: x_max.clone(),
                line: line.clone(),
            }]
        };
        let duty_pieces = match model.duties_domain_end() {
            Some(end) if model.strict_domain() => {
                let end = end.as_ratio() / &scale;
                if end <= x_min {
                    whole(&rights)
                } else if end >= x_max {
                    whole(&duties)
                } else {
                    vec![
                        Piece {
                            from: x_min.clone(),
                            to: end.clone(),
                            line: duties.clone(),
                        },
                        Piece {
                            from: end,
                            to: x_max.clone(),
                            line: rights.clone(),
                        },
                    ]
                }
            }
            _ => whole(&duties),
        };

        let equilibrium = match equilibrium {
            Equilibrium::Point(p) => {
                let x = p.income.as_ratio() / &scale;
                let y = p.responsibility.as_ratio() / &scale;
                let inside = x >= x_min && x <= x_max && y >= y_min && y <= y_max;
                inside.then_some((x, y))
            }
            _ => None,
        };

        Ok(Scene {
            rights: whole(&rights),
            duties: duty_pieces,
            x_min,
            x_max,
            y_min,
            y_max,
            equilibrium,
        })
    }

    /// Vertices of the visible part of a piecewise line.
    fn clipped_vertices(&self, pieces: &[Piece]) -> Vec<(BigRational, BigRational)> {
        let mut points: Vec<(BigRational, BigRational)> = Vec::new();
        for piece in pieces {
            let Some((a, b)) = clip(piece, &self.y_min, &self.y_max) else {
                continue;
            };
            for x in [a, b] {
                let y = piece.line.eval(&x);
                if points.last().is_none_or(|last| last.0 != x || last.1 != y) {
                    points.push((x, y));
                }
            }
        }
        points
    }

    fn value_at(pieces: &[Piece], x: f64) -> f64 {
        let piece = pieces
            .iter()
            .find(|p| x <= to_f64(&p.to))
            .unwrap_or_else(|| pieces.last().expect("at least one piece"));
        to_f64(&piece.line.slope) * x + piece.line.intercept.to_f64()
    }

    fn spans(&self) -> (f64, f64) {
        (
            to_f64(&(&self.x_max - &self.x_min)),
            to_f64(&(&self.y_max - &self.y_min)),
        )
    }
}

fn window(axis: char, (min, max): (f64, f64)) -> Result<(BigRational, BigRational), DiagramError> {
    let empty = || DiagramError::EmptyRange { axis, min, max };
    if min.partial_cmp(&max) != Some(std::cmp::Ordering::Less) {
        return Err(empty());
    }
    let lo = BigRational::from_float(min).ok_or_else(empty)?;
    let hi = BigRational::from_float(max).ok_or_else(empty)?;
    Ok((lo, hi))
}

/// Sub-interval of the piece's domain where the line stays within `[y_min, y_max]`.
fn clip(piece: &Piece, y_min: &BigRational, y_max: &BigRational) -> Option<(BigRational, BigRational)> {
    let line = &piece.line;
    if line.slope.is_zero() {
        let y = line.intercept.as_ratio();
        return (y >= y_min && y <= y_max).then(|| (piece.from.clone(), piece.to.clone()));
    }
    let at = |y: &BigRational| (y - line.intercept.as_ratio()) / &line.slope;
    let (a, b) = (at(y_min), at(y_max));
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let from = if lo > piece.from { lo } else { piece.from.clone() };
    let to = if hi < piece.to { hi } else { piece.to.clone() };
    (from <= to).then_some((from, to))
}

fn to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Data coordinate with at most three decimals.
fn coord(value: &BigRational) -> String {
    let mut text = format_rational_fixed(value, 3);
    while text.ends_with('0') {
        text.pop();
    }
    if text.ends_with('.') {
        text.pop();
    }
    if text == "-0" {
        text = "0".to_string();
    }
    text
}

fn px(value: f64) -> String {
    let mut text = format!("{value:.2}");
    while text.ends_with('0') {
        text.pop();
    }
    if text.ends_with('.') {
        text.pop();
    }
    text
}

fn escape_xml(text: &str) -> String {
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

/// SVG 1.1 document: two solid polylines (rights, duties), two dashed guides
/// meeting at the equilibrium, three line labels and two axis labels. The
/// guides and the equilibrium label are left out when the equilibrium is not
/// inside the window.
pub fn render_svg(
    model: &LinearLawModel,
    equilibrium: &Equilibrium,
    opts: &DiagramOptions,
) -> Result<String, DiagramError> {
    let scene = Scene::new(model, equilibrium, opts)?;
    let (width, height) = (opts.width as f64, opts.height as f64);
    let plot_w = width - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = height - MARGIN_TOP - MARGIN_BOTTOM;
    let (x_span, y_span) = scene.spans();
    let (x_min, y_min) = (to_f64(&scene.x_min), to_f64(&scene.y_min));
    let (x_max, y_max) = (to_f64(&scene.x_max), to_f64(&scene.y_max));
    let to_px = |x: f64, y: f64| {
        (
            MARGIN_LEFT + (x - x_min) / x_span * plot_w,
            MARGIN_TOP + (y_max - y) / y_span * plot_h,
        )
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = opts.width,
        h = opts.height
    );
    let _ = writeln!(
        svg,
        r#"  <rect class="frame" x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black" stroke-width="1"/>"#,
        px(MARGIN_LEFT),
        px(MARGIN_TOP),
        px(plot_w),
        px(plot_h)
    );
    let _ = writeln!(
        svg,
        r#"  <g class="plot" transform="translate({} {}) scale({} {}) translate({} {})" fill="none" stroke="black">"#,
        px(MARGIN_LEFT),
        px(MARGIN_TOP + plot_h),
        plot_w / x_span,
        -(plot_h / y_span),
        coord(&-&scene.x_min),
        coord(&-&scene.y_min)
    );
    for (class, pieces) in [("rights", &scene.rights), ("duties", &scene.duties)] {
        let points: Vec<String> = scene
            .clipped_vertices(pieces)
            .iter()
            .map(|(x, y)| format!("{},{}", coord(x), coord(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"    <polyline class="{class}" points="{}" stroke-width="3" vector-effect="non-scaling-stroke"/>"#,
            points.join(" ")
        );
    }
    if let Some((ex, ey)) = &scene.equilibrium {
        let guides = [
            (ex, &scene.y_min, ex, ey),
            (&scene.x_min, ey, ex, ey),
        ];
        for (x1, y1, x2, y2) in guides {
            let _ = writeln!(
                svg,
                r#"    <line class="guide" x1="{}" y1="{}" x2="{}" y2="{}" stroke-width="2" stroke-dasharray="6 4" vector-effect="non-scaling-stroke"/>"#,
                coord(x1),
                coord(y1),
                coord(x2),
                coord(y2)
            );
        }
    }
    svg.push_str("  </g>\n");

    let clamp_y = |y: f64| y.clamp(y_min, y_max);
    let mut labels: Vec<(f64, f64, &str, &str)> = Vec::new();
    if let Some((ex, ey)) = &scene.equilibrium {
        labels.push((
            to_f64(ex) + EQ_LABEL_DX * x_span,
            clamp_y(to_f64(ey) + EQ_LABEL_DY * y_span),
            "start",
            "Legal equilibrium",
        ));
    }
    labels.push((
        x_max,
        clamp_y(clamp_y(Scene::value_at(&scene.rights, x_max)) + RIGHTS_LABEL_DY * y_span),
        "end",
        "Graph of rights",
    ));
    labels.push((
        x_min,
        clamp_y(clamp_y(Scene::value_at(&scene.duties, x_min)) + DUTIES_LABEL_DY * y_span),
        "start",
        "Graph of duties",
    ));
    for (x, y, anchor, text) in labels {
        let (lx, ly) = to_px(x, y);
        let _ = writeln!(
            svg,
            r#"  <text class="label" x="{}" y="{}" text-anchor="{anchor}" dominant-baseline="middle" font-family="sans-serif" font-size="13">{}</text>"#,
            px(lx),
            px(ly),
            escape_xml(text)
        );
    }
    let _ = writeln!(
        svg,
        r#"  <text class="axis-label" x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        px(MARGIN_LEFT + plot_w / 2.0),
        px(height - 15.0),
        escape_xml(&model.axis_labels.x)
    );
    let (yx, yy) = (25.0, MARGIN_TOP + plot_h / 2.0);
    let _ = writeln!(
        svg,
        r#"  <text class="axis-label" x="{}" y="{}" transform="rotate(-90 {} {})" text-anchor="middle" font-family="sans-serif" font-size="13">{}</text>"#,
        px(yx),
        px(yy),
        px(yx),
        px(yy),
        escape_xml(&model.axis_labels.y)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// An 80×24 character plot followed by a legend: `*` marks the rights line,
/// `#` the duties line, `.` the guides and `+` the equilibrium cell.
pub fn render_ascii(
    model: &LinearLawModel,
    equilibrium: &Equilibrium,
    opts: &DiagramOptions,
) -> Result<String, DiagramError> {
    let scene = Scene::new(model, equilibrium, opts)?;
    let (x_span, y_span) = scene.spans();
    let (x_min, y_min) = (to_f64(&scene.x_min), to_f64(&scene.y_min));
    let y_max = to_f64(&scene.y_max);
    let mut grid = [[' '; ASCII_WIDTH]; ASCII_HEIGHT];

    let col_of = |x: f64| {
        (((x - x_min) / x_span * ASCII_WIDTH as f64).floor().max(0.0) as usize).min(ASCII_WIDTH - 1)
    };
    let row_of = |y: f64| {
        (((y_max - y) / y_span * ASCII_HEIGHT as f64).floor().max(0.0) as usize)
            .min(ASCII_HEIGHT - 1)
    };

    let eq_cell = scene.equilibrium.as_ref().map(|(ex, ey)| {
        let (ex, ey) = (to_f64(ex), to_f64(ey));
        (col_of(ex), row_of(ey))
    });
    if let Some((ec, er)) = eq_cell {
        for row in grid.iter_mut().skip(er) {
            row[ec] = '.';
        }
        for cell in grid[er].iter_mut().take(ec) {
            *cell = '.';
        }
    }

    for (mark, pieces) in [('*', &scene.rights), ('#', &scene.duties)] {
        for col in 0..ASCII_WIDTH {
            let left = x_min + x_span * col as f64 / ASCII_WIDTH as f64;
            let right = x_min + x_span * (col + 1) as f64 / ASCII_WIDTH as f64;
            let mut samples = vec![
                Scene::value_at(pieces, left),
                Scene::value_at(pieces, right),
            ];
            for piece in pieces {
                let break_x = to_f64(&piece.to);
                if break_x > left && break_x < right {
                    samples.push(Scene::value_at(pieces, break_x));
                }
            }
            let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if hi < y_min || lo > y_max {
                continue;
            }
            for row in grid.iter_mut().take(row_of(lo.max(y_min)) + 1).skip(row_of(hi.min(y_max))) {
                row[col] = mark;
            }
        }
    }
    if let Some((ec, er)) = eq_cell {
        grid[er][ec] = '+';
    }

    let mut out = String::with_capacity((ASCII_WIDTH + 1) * (ASCII_HEIGHT + 6));
    for row in &grid {
        let line: String = row.iter().collect();
        out.push_str(line.trim_end());
        out.push('\n');
    }
    let _ = writeln!(out, "* Graph of rights: R(I) = {}", model.rights().describe("I"));
    let _ = writeln!(out, "# Graph of duties: D(I) = {}", model.duties().describe("I"));
    match &scene.equilibrium {
        Some((ex, ey)) => {
            let _ = writeln!(out, "+ Legal equilibrium: ({}, {})", coord(ex), coord(ey));
        }
        None => {
            let _ = writeln!(out, "+ Legal equilibrium: not in view ({equilibrium})");
        }
    }
    let _ = writeln!(
        out,
        "x: {} [{}, {}]",
        model.axis_labels.x,
        coord(&scene.x_min),
        coord(&scene.x_max)
    );
    let _ = writeln!(
        out,
        "y: {} [{}, {}]",
        model.axis_labels.y,
        coord(&scene.y_min),
        coord(&scene.y_max)
    );
    Ok(out)
}
