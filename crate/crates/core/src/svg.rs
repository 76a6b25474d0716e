//! Minimal SVG rendering of sweep datasets.
//!
//! Output is for eyeballing only; the CSV files are the data of record.

use std::fmt::Write as _;

use crate::sweep::{CellStatus, FigureDataset, Quantity};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{}" y="30" font-size="16" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn axes_labels(out: &mut String, d: &FigureDataset, y_label: &str) {
    let x = &d.axes[0];
    let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(out, r#"<rect x="{l}" y="{t}" width="{}" height="{}" fill="none" stroke="black"/>"#, r - l, b - t);
    let _ = writeln!(out, r#"<text x="{l}" y="{}" font-size="12">{:.3}</text>"#, b + 18.0, x.start);
    let _ = writeln!(out, r#"<text x="{r}" y="{}" font-size="12" text-anchor="end">{:.3}</text>"#, b + 18.0, x.stop);
    let _ = writeln!(out, r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">{}</text>"#, WIDTH / 2.0, b + 40.0, x.name);
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" font-size="14" transform="rotate(-90 20 {})" text-anchor="middle">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );
}

/// Grey-scale colour for a value in `[0, 1]`, dark for large values.
fn shade(v: f64) -> String {
    let g = (255.0 * (1.0 - v.clamp(0.0, 1.0))).round() as u8;
    format!("rgb({g},{g},{g})")
}

/// Heatmap of the dataset's quantity over a two-axis grid. Singular cells are red,
/// unphysical ones pale blue.
pub fn heatmap(d: &FigureDataset, title: &str) -> String {
    assert_eq!(d.axes.len(), 2, "heatmap needs two axes");
    let mut out = String::new();
    header(&mut out, title);
    let (nx, ny) = (d.axes[0].count, d.axes[1].count);
    let cw = (WIDTH - 2.0 * MARGIN) / nx as f64;
    let ch = (HEIGHT - 2.0 * MARGIN) / ny as f64;
    for i in 0..nx {
        for j in 0..ny {
            let c = d.cell(&[i, j]);
            let fill = match c.status {
                CellStatus::Singular => "rgb(220,0,0)".to_string(),
                CellStatus::Unphysical => "rgb(200,220,255)".to_string(),
                _ => shade(d.quantity.of(&c.probabilities)),
            };
            // y grows upward.
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}"/>"#,
                MARGIN + i as f64 * cw,
                HEIGHT - MARGIN - (j + 1) as f64 * ch,
                cw + 0.05,
                ch + 0.05
            );
        }
    }
    axes_labels(&mut out, d, d.axes[1].name.as_str());
    out.push_str("</svg>\n");
    out
}

/// Line plot over the first axis: one curve per quantity for one-axis data,
/// one curve per value of the first axis for two-axis data (x is then the
/// second axis).
pub fn line_plot(d: &FigureDataset, title: &str) -> String {
    const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];
    let mut out = String::new();
    header(&mut out, title);
    let (xs, curves): (Vec<f64>, Vec<(String, Vec<f64>)>) = if d.axes.len() == 1 {
        let qs = [Quantity::Transmission, Quantity::Reflection, Quantity::ForwardTransfer, Quantity::BackwardTransfer];
        (d.axes[0].values(), qs.iter().map(|q| (q.label().to_string(), d.series(0, *q))).collect())
    } else {
        let outer = &d.axes[0];
        (
            d.axes[1].values(),
            (0..outer.count).map(|i| (format!("{} = {:.3}", outer.name, outer.value(i)), d.series(i, d.quantity))).collect(),
        )
    };
    let (x0, x1) = (xs[0], xs[xs.len() - 1]);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);
    for (n, (label, ys)) in curves.iter().enumerate() {
        let color = COLORS[n % COLORS.len()];
        let mut path = String::new();
        let mut pen_down = false;
        for (x, y) in xs.iter().zip(ys) {
            if !y.is_finite() {
                pen_down = false;
                continue;
            }
            let _ = write!(path, "{}{:.2},{:.2} ", if pen_down { "L" } else { "M" }, px(*x), py(*y));
            pen_down = true;
        }
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.trim_end());
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 120.0,
            MARGIN + 16.0 * (n + 1) as f64,
            escape(label)
        );
    }
    let mut fake = d.clone();
    if d.axes.len() == 2 {
        fake.axes = vec![d.axes[1]];
    }
    axes_labels(&mut out, &fake, "probability");
    out.push_str("</svg>\n");
    out
}
