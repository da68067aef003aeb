//! Self-contained SVG renderings of the pipeline outputs: MDS scatters
//! colored by cluster, stacked membership bars, per-cluster periodicity
//! profiles, super-level persistence diagrams, and barcodes. Coordinates
//! are formatted with fixed precision so identical inputs produce
//! byte-identical files.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

pub fn color(index: usize) -> &'static str {
    PALETTE[index % PALETTE.len()]
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{:.4}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">{title}</text>",
        WIDTH / 2.0
    );
    s
}

fn axes(s: &mut String, x_label: &str, y_label: &str) {
    let x0 = MARGIN;
    let y0 = HEIGHT - MARGIN;
    let x1 = WIDTH - MARGIN;
    let y1 = MARGIN;
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.4}\" y1=\"{y0:.4}\" x2=\"{x1:.4}\" y2=\"{y0:.4}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<line x1=\"{x0:.4}\" y1=\"{y0:.4}\" x2=\"{x0:.4}\" y2=\"{y1:.4}\" stroke=\"black\"/>"
    );
    let _ = writeln!(
        s,
        "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>",
        (x0 + x1) / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{:.4}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.4})\">{y_label}</text>",
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn of(points: impl Iterator<Item = (f64, f64)>) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for (x, y) in points {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if !f.x_min.is_finite() {
            f = Frame { x_min: 0.0, x_max: 1.0, y_min: 0.0, y_max: 1.0 };
        }
        if f.x_max - f.x_min < 1e-12 {
            f.x_max = f.x_min + 1.0;
        }
        if f.y_max - f.y_min < 1e-12 {
            f.y_max = f.y_min + 1.0;
        }
        f
    }

    fn x(&self, v: f64) -> f64 {
        MARGIN + (v - self.x_min) / (self.x_max - self.x_min) * (WIDTH - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - MARGIN - (v - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }
}

/// Scatter of 2-D coordinates colored by cluster label.
pub fn scatter(title: &str, points: &[(f64, f64)], labels: &[usize]) -> String {
    let mut s = header(title);
    axes(&mut s, "coordinate 1", "coordinate 2");
    let frame = Frame::of(points.iter().copied());
    for (i, &(x, y)) in points.iter().enumerate() {
        let _ = writeln!(
            s,
            "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"5\" fill=\"{}\"/>",
            frame.x(x),
            frame.y(y),
            color(labels.get(i).copied().unwrap_or(0))
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One stacked bar of membership shares per subject.
pub fn stacked_bars(title: &str, ids: &[String], memberships: &[Vec<f64>]) -> String {
    let mut s = header(title);
    axes(&mut s, "subject", "membership");
    let n = ids.len().max(1);
    let span = WIDTH - 2.0 * MARGIN;
    let bar = span / n as f64 * 0.7;
    for (i, row) in memberships.iter().enumerate() {
        let x = MARGIN + span * (i as f64 + 0.15) / n as f64;
        let mut acc = 0.0;
        for (c, &u) in row.iter().enumerate() {
            let h = u * (HEIGHT - 2.0 * MARGIN);
            let y = HEIGHT - MARGIN - (acc + u) * (HEIGHT - 2.0 * MARGIN);
            let _ = writeln!(
                s,
                "<rect x=\"{x:.4}\" y=\"{y:.4}\" width=\"{bar:.4}\" height=\"{h:.4}\" fill=\"{}\"/>",
                color(c)
            );
            acc += u;
        }
        let _ = writeln!(
            s,
            "<text x=\"{:.4}\" y=\"{:.4}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{}</text>",
            x + bar / 2.0,
            HEIGHT - MARGIN + 14.0,
            ids[i]
        );
    }
    s.push_str("</svg>\n");
    s
}

/// One polyline per cluster: the mean profile over frames.
pub fn profiles(title: &str, cluster_profiles: &[(usize, Vec<f64>)]) -> String {
    let mut s = header(title);
    axes(&mut s, "frame", "periodicity score");
    let max_len = cluster_profiles
        .iter()
        .map(|(_, p)| p.len())
        .max()
        .unwrap_or(1);
    let frame = Frame {
        x_min: 1.0,
        x_max: max_len.max(2) as f64,
        y_min: 0.0,
        y_max: 1.0,
    };
    for (label, profile) in cluster_profiles {
        let mut path = String::new();
        for (j, &v) in profile.iter().enumerate() {
            let cmd = if j == 0 { 'M' } else { 'L' };
            let _ = write!(path, "{cmd}{:.4} {:.4} ", frame.x((j + 1) as f64), frame.y(v));
        }
        let _ = writeln!(
            s,
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
            path.trim_end(),
            color(*label)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Persistence diagram: one marker per class, diagonal drawn, one color
/// per series.
pub fn diagram(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut s = header(title);
    axes(&mut s, "merge value", "peak value");
    let all = series.iter().flat_map(|(_, pts)| pts.iter().copied());
    let frame = Frame::of(all);
    let lo = frame.x_min.min(frame.y_min);
    let hi = frame.x_max.max(frame.y_max);
    let frame = Frame {
        x_min: lo,
        x_max: hi,
        y_min: lo,
        y_max: hi,
    };
    let _ = writeln!(
        s,
        "<line x1=\"{:.4}\" y1=\"{:.4}\" x2=\"{:.4}\" y2=\"{:.4}\" stroke=\"#bbbbbb\" stroke-dasharray=\"4 3\"/>",
        frame.x(lo),
        frame.y(lo),
        frame.x(hi),
        frame.y(hi)
    );
    for (i, (_, pts)) in series.iter().enumerate() {
        for &(x, y) in pts {
            let _ = writeln!(
                s,
                "<circle cx=\"{:.4}\" cy=\"{:.4}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\"/>",
                frame.x(x),
                frame.y(y),
                color(i)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Barcode: one horizontal interval per class, subjects stacked.
pub fn barcode(title: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let mut s = header(title);
    axes(&mut s, "filtration value", "class");
    let all = series.iter().flat_map(|(_, b)| b.iter().copied());
    let frame = Frame::of(all.map(|(a, b)| (a.min(b), a.max(b))));
    let total_bars: usize = series.iter().map(|(_, b)| b.len()).sum();
    let step = (HEIGHT - 2.0 * MARGIN) / (total_bars.max(1) as f64 + 1.0);
    let mut row = 0;
    for (i, (_, bars)) in series.iter().enumerate() {
        for &(lo, hi) in bars {
            row += 1;
            let y = HEIGHT - MARGIN - row as f64 * step;
            let _ = writeln!(
                s,
                "<line x1=\"{:.4}\" y1=\"{y:.4}\" x2=\"{:.4}\" y2=\"{y:.4}\" stroke=\"{}\" stroke-width=\"3\"/>",
                frame.x(lo.min(hi)),
                frame.x(lo.max(hi)),
                color(i)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
