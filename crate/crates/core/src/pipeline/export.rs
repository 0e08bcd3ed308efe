//! Instance-space CSV and SVG scatter views.
//!
//! All drawing constants live in the block below so that output is
//! byte-stable for identical input.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::pipeline::projection::InstanceSpace;

pub const CANVAS_WIDTH: f64 = 900.0;
pub const CANVAS_HEIGHT: f64 = 700.0;
/// Plot-area margin in pixels (left, right, top, bottom).
pub const MARGIN: (f64, f64, f64, f64) = (70.0, 190.0, 50.0, 60.0);
/// Fraction of each axis span added on both sides.
pub const AXIS_PADDING: f64 = 0.05;
pub const POINT_RADIUS: f64 = 4.0;
/// Eight-step viridis-like palette, dark to light.
pub const PALETTE: [&str; 8] = [
    "#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725",
];
pub const GOOD_COLOR: &str = "#1f77b4";
pub const BAD_COLOR: &str = "#ff7f0e";
pub const HULL_OPACITY: f64 = 0.15;

pub const SPACE_CSV: &str = "instance_space.csv";
pub const SOURCES_SVG: &str = "sources.svg";
pub const GOOD_COUNT_SVG: &str = "good_count.svg";

/// Writes `id,z1,z2,source,<algorithms...>,good_count` with 0/1 labels.
pub fn write_space_csv<W: std::io::Write>(space: &InstanceSpace, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["id".to_owned(), "z1".into(), "z2".into(), "source".into()];
    header.extend(space.algorithms.iter().cloned());
    header.push("good_count".into());
    w.write_record(&header)?;
    for p in &space.points {
        let mut rec = vec![p.id.clone(), p.z[0].to_string(), p.z[1].to_string(), p.source.clone()];
        rec.extend(p.good.iter().map(|g| if *g { "1" } else { "0" }.to_owned()));
        rec.push(p.good_count.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// File-name-safe form of an algorithm id.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes the CSV and every SVG view into `out_dir`; returns the paths written.
pub fn export_space(space: &InstanceSpace, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if space.points.is_empty() {
        return Err(Error::Argument("instance space is empty".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let csv_path = out_dir.join(SPACE_CSV);
    write_space_csv(space, std::fs::File::create(&csv_path)?)?;
    written.push(csv_path);

    let mut save = |name: String, svg: String| -> Result<()> {
        let path = out_dir.join(name);
        std::fs::write(&path, svg)?;
        written.push(path);
        Ok(())
    };
    save(SOURCES_SVG.into(), sources_svg(space))?;
    save(GOOD_COUNT_SVG.into(), good_count_svg(space))?;
    for (a, alg) in space.algorithms.iter().enumerate() {
        save(format!("footprint_{}.svg", file_stem(alg)), footprint_svg(space, a))?;
    }
    Ok(written)
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn new(space: &InstanceSpace) -> Self {
        let span = |vals: Vec<f64>| {
            let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let d = hi - lo;
            if d > 0.0 {
                (lo - AXIS_PADDING * d, hi + AXIS_PADDING * d)
            } else {
                (lo - 0.5, hi + 0.5)
            }
        };
        let (x0, x1) = span(space.points.iter().map(|p| p.z[0]).collect());
        let (y0, y1) = span(space.points.iter().map(|p| p.z[1]).collect());
        Self { x0, x1, y0, y1 }
    }

    fn px(&self, z: [f64; 2]) -> (f64, f64) {
        let (l, r, t, b) = MARGIN;
        let w = CANVAS_WIDTH - l - r;
        let h = CANVAS_HEIGHT - t - b;
        (
            l + (z[0] - self.x0) / (self.x1 - self.x0) * w,
            t + h - (z[1] - self.y0) / (self.y1 - self.y0) * h,
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn open(title: &str, frame: &Frame) -> String {
    let (l, r, t, b) = MARGIN;
    let w = CANVAS_WIDTH - l - r;
    let h = CANVAS_HEIGHT - t - b;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_WIDTH}" height="{CANVAS_HEIGHT}" viewBox="0 0 {CANVAS_WIDTH} {CANVAS_HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{l}" y="{:.2}" font-size="16">{}</text>"#, t - 18.0, escape(title));
    let _ = writeln!(
        s,
        r##"<rect x="{l}" y="{t}" width="{w}" height="{h}" fill="none" stroke="#333"/>"##
    );
    let bottom = t + h;
    let _ = writeln!(s, r#"<text x="{l}" y="{:.2}">{:.3}</text>"#, bottom + 16.0, frame.x0);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#,
        l + w,
        bottom + 16.0,
        frame.x1
    );
    let _ = writeln!(s, r#"<text x="{:.2}" y="{bottom}" text-anchor="end">{:.3}</text>"#, l - 6.0, frame.y0);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{:.3}</text>"#, l - 6.0, t + 10.0, frame.y1);
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">z1</text>"#,
        l + w / 2.0,
        CANVAS_HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">z2</text>"#,
        t + h / 2.0,
        t + h / 2.0
    );
    s
}

fn point(s: &mut String, frame: &Frame, z: [f64; 2], color: &str, id: &str) {
    let (x, y) = frame.px(z);
    let _ = writeln!(
        s,
        r#"<circle cx="{x:.2}" cy="{y:.2}" r="{POINT_RADIUS}" fill="{color}"><title>{}</title></circle>"#,
        escape(id)
    );
}

fn legend(s: &mut String, entries: &[(String, &str)]) {
    let x = CANVAS_WIDTH - MARGIN.1 + 20.0;
    for (i, (label, color)) in entries.iter().enumerate() {
        let y = MARGIN.2 + 10.0 + 20.0 * i as f64;
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{POINT_RADIUS}" fill="{color}"/>"#);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, x + 10.0, y + 4.0, escape(label));
    }
}

fn close(mut s: String) -> String {
    s.push_str("</svg>\n");
    s
}

/// Points coloured by source suite.
pub fn sources_svg(space: &InstanceSpace) -> String {
    let frame = Frame::new(space);
    let mut sources: Vec<&str> = space.points.iter().map(|p| p.source.as_str()).collect();
    sources.sort_unstable();
    sources.dedup();
    let color = |src: &str| PALETTE[sources.iter().position(|s| *s == src).unwrap_or(0) % PALETTE.len()];
    let mut s = open("Instances by source", &frame);
    for p in &space.points {
        point(&mut s, &frame, p.z, color(&p.source), &p.id);
    }
    let entries: Vec<(String, &str)> = sources.iter().map(|src| ((*src).to_owned(), color(src))).collect();
    legend(&mut s, &entries);
    close(s)
}

fn count_color(count: usize, total: usize) -> &'static str {
    if total == 0 {
        return PALETTE[0];
    }
    let idx = (count * (PALETTE.len() - 1) + total / 2) / total;
    PALETTE[idx.min(PALETTE.len() - 1)]
}

/// Points coloured by the number of good algorithms.
pub fn good_count_svg(space: &InstanceSpace) -> String {
    let frame = Frame::new(space);
    let total = space.algorithms.len();
    let mut s = open("Number of good algorithms", &frame);
    for p in &space.points {
        point(&mut s, &frame, p.z, count_color(p.good_count, total), &p.id);
    }
    let mut counts: Vec<usize> = space.points.iter().map(|p| p.good_count).collect();
    counts.sort_unstable();
    counts.dedup();
    let entries: Vec<(String, &str)> = counts.iter().map(|&c| (c.to_string(), count_color(c, total))).collect();
    legend(&mut s, &entries);
    close(s)
}

/// Good/bad points of one algorithm with the convex hull of the good ones.
pub fn footprint_svg(space: &InstanceSpace, algorithm: usize) -> String {
    let frame = Frame::new(space);
    let name = &space.algorithms[algorithm];
    let mut s = open(&format!("Footprint: {name}"), &frame);
    let good: Vec<[f64; 2]> = space
        .points
        .iter()
        .filter(|p| p.good[algorithm])
        .map(|p| p.z)
        .collect();
    let hull = convex_hull(&good);
    if hull.len() >= 3 {
        let pts: Vec<String> = hull
            .iter()
            .map(|&z| {
                let (x, y) = frame.px(z);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polygon points="{}" fill="{GOOD_COLOR}" fill-opacity="{HULL_OPACITY}" stroke="{GOOD_COLOR}"/>"#,
            pts.join(" ")
        );
    }
    for p in &space.points {
        let color = if p.good[algorithm] { GOOD_COLOR } else { BAD_COLOR };
        point(&mut s, &frame, p.z, color, &p.id);
    }
    legend(&mut s, &[("good".into(), GOOD_COLOR), ("bad".into(), BAD_COLOR)]);
    close(s)
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull by the monotone chain, collinear points dropped.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::projection::SpacePoint;

    fn space(algs: usize) -> InstanceSpace {
        let points = (0..3)
            .map(|i| {
                let good: Vec<bool> = (0..algs).map(|a| (i + a) % 2 == 0).collect();
                SpacePoint {
                    id: format!("p{i}"),
                    z: [i as f64, (i * i) as f64],
                    source: if i == 0 { "A".into() } else { "B".into() },
                    good_count: good.iter().filter(|g| **g).count(),
                    good,
                }
            })
            .collect();
        InstanceSpace {
            algorithms: (0..algs).map(|a| format!("alg {a}")).collect(),
            points,
        }
    }

    #[test]
    fn export_counts_files_and_columns() {
        let dir = tempfile::tempdir().unwrap();
        let files = export_space(&space(2), dir.path()).unwrap();
        assert_eq!(files.len(), 1 + 1 + 1 + 2);
        assert!(dir.path().join("footprint_alg_1.svg").exists());
        let text = std::fs::read_to_string(dir.path().join(SPACE_CSV)).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "id,z1,z2,source,alg 0,alg 1,good_count");
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], "p0,0,0,A,1,0,1");
    }

    #[test]
    fn export_without_algorithms() {
        let dir = tempfile::tempdir().unwrap();
        let files = export_space(&space(0), dir.path()).unwrap();
        assert_eq!(files.len(), 3);
    }

    #[test]
    fn export_is_byte_stable() {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        export_space(&space(2), a.path()).unwrap();
        export_space(&space(2), b.path()).unwrap();
        for f in [SPACE_CSV, SOURCES_SVG, GOOD_COUNT_SVG, "footprint_alg_0.svg"] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
        }
    }

    #[test]
    fn hull_of_square_with_interior() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0]];
        assert_eq!(convex_hull(&pts), vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).len(), 2);
    }

    #[test]
    fn palette_extremes() {
        assert_eq!(count_color(0, 3), PALETTE[0]);
        assert_eq!(count_color(3, 3), PALETTE[7]);
        assert_eq!(count_color(0, 0), PALETTE[0]);
    }
}
