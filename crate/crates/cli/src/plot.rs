//! Static SVG rendering of a point set projected onto two coordinates.

use std::fmt::Write;

use peelkit_core::{scalar, Error, PointSet};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 10] =
    ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f"];

/// Parses `i,j`; both axes must exist and differ, except in dimension 1
/// where only axis 0 exists and the second coordinate is drawn as zero.
pub fn parse_axes(text: &str, dim: usize) -> Result<(usize, usize), Error> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let bad = || Error::InvalidArgument(format!("axes must be two distinct indices below {dim}, got {text:?}"));
    let [a, b] = parts.as_slice() else { return Err(bad()) };
    let a: usize = a.parse().map_err(|_| bad())?;
    let b: usize = b.parse().map_err(|_| bad())?;
    if dim == 1 && a == 0 {
        return Ok((0, b));
    }
    if a == b || a >= dim || b >= dim {
        return Err(bad());
    }
    Ok((a, b))
}

fn project(ps: &PointSet, axes: (usize, usize)) -> Vec<(f64, f64)> {
    ps.points()
        .iter()
        .map(|p| {
            let x = scalar::to_f64(&p.coords()[axes.0]);
            let y = if ps.dim() == 1 { 0.0 } else { scalar::to_f64(&p.coords()[axes.1]) };
            (x, y)
        })
        .collect()
}

pub fn render(ps: &PointSet, axes: (usize, usize)) -> String {
    let pts = project(ps, axes);
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (0f64, 0f64, 0f64, 0f64);
    for &(x, y) in &pts {
        lo_x = lo_x.min(x);
        hi_x = hi_x.max(x);
        lo_y = lo_y.min(y);
        hi_y = hi_y.max(y);
    }
    let span = (hi_x - lo_x).max(hi_y - lo_y).max(1e-12);
    let scale = (SIZE - 2.0 * MARGIN) / span;
    let to_screen = |(x, y): (f64, f64)| (MARGIN + (x - lo_x) * scale, SIZE - MARGIN - (y - lo_y) * scale);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="8" y="18" font-family="sans-serif" font-size="12">{} points, axes ({}, {})</text>"#,
        ps.len(),
        axes.0,
        axes.1
    );

    let blocks = ps.blocks.clone().unwrap_or_else(|| vec![0; ps.len()]);
    let block_count = blocks.iter().max().map_or(0, |b| b + 1);
    if ps.blocks.is_some() {
        // Each block drawn as a polyline ordered by distance from the origin.
        for b in 0..block_count {
            let mut members: Vec<usize> = (0..ps.len()).filter(|&i| blocks[i] == b).collect();
            if members.len() < 2 {
                continue;
            }
            members.sort_by_key(|&i| ps.points()[i].norm_sq());
            let path: Vec<String> = members
                .iter()
                .map(|&i| {
                    let (x, y) = to_screen(pts[i]);
                    format!("{x:.3},{y:.3}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5" opacity="0.6"/>"#,
                path.join(" "),
                PALETTE[b % PALETTE.len()]
            );
        }
    }
    for (i, &p) in pts.iter().enumerate() {
        let (x, y) = to_screen(p);
        let color = PALETTE[blocks[i] % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="{color}"><title>point {i}, block {}</title></circle>"#,
            blocks[i]
        );
    }
    let (ox, oy) = to_screen((0.0, 0.0));
    let _ = writeln!(
        svg,
        r#"<g id="origin" stroke="black" stroke-width="2"><line x1="{:.3}" y1="{oy:.3}" x2="{:.3}" y2="{oy:.3}"/><line x1="{ox:.3}" y1="{:.3}" x2="{ox:.3}" y2="{:.3}"/></g>"#,
        ox - 7.0,
        ox + 7.0,
        oy - 7.0,
        oy + 7.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axes_parsing() {
        assert_eq!(parse_axes("0,1", 2).unwrap(), (0, 1));
        assert_eq!(parse_axes("2, 0", 3).unwrap(), (2, 0));
        assert!(parse_axes("0,0", 2).is_err());
        assert!(parse_axes("0,3", 3).is_err());
        assert!(parse_axes("x", 2).is_err());
        assert_eq!(parse_axes("0,1", 1).unwrap(), (0, 1));
    }

    #[test]
    fn single_point_has_one_marker() {
        let ps = PointSet::from_ints(2, &[&[3, 4]]).unwrap();
        let svg = render(&ps, (0, 1));
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("id=\"origin\""));
    }
}
