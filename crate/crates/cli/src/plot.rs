//! Deterministic SVG scatter plots of the projection, one per cluster report.

use std::collections::HashMap;
use std::fmt::Write as _;

use miscon::discover::{ClusterReport, ProjectionRow};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 520.0;
const MARGIN: f64 = 30.0;
const LEGEND_W: f64 = 170.0;
pub const NOISE_COLOR: &str = "#9e9e9e";

/// Fill color of the cluster with the given density rank (1-based).
pub fn cluster_color(rank: usize) -> String {
    let hue = ((rank - 1) as f64 * 137.508) % 360.0;
    format!("hsl({hue:.1},65%,45%)")
}

fn item_bit(item: &str) -> Option<u8> {
    item.strip_prefix('R').and_then(|d| d.parse::<u8>().ok()).filter(|&b| b < 8)
}

/// Rows that belong in the plot of `report`: the submissions failing its item.
pub fn plotted_rows<'a>(rows: &'a [ProjectionRow], report: &ClusterReport) -> Vec<&'a ProjectionRow> {
    match item_bit(&report.item) {
        Some(bit) => rows.iter().filter(|r| r.failed_items & (1 << bit) != 0).collect(),
        None => rows.iter().collect(),
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// One `<circle>` per plotted submission, colored by cluster (gray for
/// noise), and a legend of `<rect>` swatches labelled by density rank.
pub fn render_svg(rows: &[ProjectionRow], report: &ClusterReport) -> String {
    let points = plotted_rows(rows, report);
    let rank_of: HashMap<&str, usize> = report
        .clusters
        .iter()
        .flat_map(|c| c.members.iter().map(move |m| (m.as_str(), c.density_rank)))
        .collect();

    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let plot_w = WIDTH - 2.0 * MARGIN - LEGEND_W;
    let plot_h = HEIGHT - 2.0 * MARGIN - 20.0;
    let scale = |v: f64, lo: f64, hi: f64, span: f64| if hi > lo { (v - lo) / (hi - lo) * span } else { span / 2.0 };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="20" font-family="sans-serif" font-size="14">{} {} ({} failing)</text>"#,
        escape(&report.item),
        escape(&report.title),
        points.len()
    );
    let top = MARGIN + 20.0;
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN}" y="{top}" width="{plot_w}" height="{plot_h}" fill="none" stroke="#cccccc"/>"##
    );
    for p in &points {
        let cx = MARGIN + scale(p.x, x0, x1, plot_w);
        let cy = top + plot_h - scale(p.y, y0, y1, plot_h);
        let (fill, r) = match rank_of.get(p.id.as_str()) {
            Some(&rank) => (cluster_color(rank), 4.0),
            None => (NOISE_COLOR.to_string(), 3.0),
        };
        let _ = writeln!(
            svg,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{r}" fill="{fill}"><title>{}</title></circle>"#,
            escape(&p.id)
        );
    }

    let lx = WIDTH - LEGEND_W;
    let mut ly = top;
    let mut entry = |svg: &mut String, color: &str, label: String| {
        let _ = writeln!(svg, r#"<rect x="{lx}" y="{ly}" width="12" height="12" fill="{color}"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{}</text>"#,
            lx + 18.0,
            ly + 10.0,
            escape(&label)
        );
        ly += 18.0;
    };
    for c in &report.clusters {
        let mark = if c.selected { " *" } else { "" };
        entry(&mut svg, &cluster_color(c.density_rank), format!("rank {} ({} pts){mark}", c.density_rank, c.members.len()));
    }
    entry(&mut svg, NOISE_COLOR, format!("noise ({} pts)", report.noise.len()));
    svg.push_str("</svg>\n");
    svg
}
