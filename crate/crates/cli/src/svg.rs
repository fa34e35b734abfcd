//! SVG picture of one period of a planar coloring.

use std::fmt::Write;

use chromatic_tiler::color::Coloring;
use chromatic_tiler::geom::BodyKind;
use chromatic_tiler::{Polytope, Vector};

/// Seven well-separated hues, then a few extras; cycled for more colors.
const PALETTE: [&str; 10] = [
    "#e6194b", "#3cb44b", "#ffe119", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
    "#bcf60c", "#008080",
];

const WIDTH: f64 = 800.0;

/// Renders the scaled fundamental domain s·[0,1)²·B with every colored piece
/// that meets it, clipped to the domain, plus the unit sphere of K centered
/// in the domain. Only meaningful for n = 2.
pub fn render(c: &Coloring) -> String {
    let s = c.scale();
    let lattice = c.tiling().torus().lattice();
    let b = lattice.basis();
    let domain = [Vector::zeros(2), b[0] * s, (b[0] + b[1]) * s, b[1] * s];
    let (lo, hi) = bounds(&domain);
    let margin = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let view_w = hi[0] - lo[0] + 2.0 * margin;
    let view_h = hi[1] - lo[1] + 2.0 * margin;
    let px = WIDTH / view_w;
    // Plane → picture coordinates (y up).
    let map = |p: &Vector| ((p[0] - lo[0] + margin) * px, (hi[1] + margin - p[1]) * px);
    let path = |pts: &[Vector]| {
        let mut d = String::new();
        for (i, p) in pts.iter().enumerate() {
            let (x, y) = map(p);
            let _ = write!(d, "{}{x:.3},{y:.3} ", if i == 0 { "M" } else { "L" });
        }
        d.push('Z');
        d
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        WIDTH,
        view_h * px,
        WIDTH,
        view_h * px
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="domain"><path d="{}"/></clipPath></defs>"#,
        path(&domain)
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<g clip-path="url(#domain)" stroke="black" stroke-width="0.5">"#
    );
    let index = c.index();
    // Lower-numbered pieces win overlaps, so they are painted last.
    for (piece, &label) in index.pieces().iter().zip(index.labels()).rev() {
        // Move the piece near the domain, then draw its neighboring copies.
        let center = piece.centroid_of_vertices();
        let f = lattice.coords(&center);
        let home = lattice.vector(&[-f[0].floor() as i64, -f[1].floor() as i64]);
        let ring = ordered_ring(piece);
        let color = PALETTE[label % PALETTE.len()];
        for z0 in -1..=1 {
            for z1 in -1..=1 {
                let shift = home + lattice.vector(&[z0, z1]);
                let pts: Vec<Vector> = ring.iter().map(|v| (*v + shift) * s).collect();
                let _ = writeln!(out, r#"<path d="{}" fill="{color}"/>"#, path(&pts));
            }
        }
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(
        out,
        r#"<path d="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
        path(&domain)
    );
    let mid = (domain[0] + domain[2]) * 0.5;
    let (cx, cy) = map(&mid);
    let k = c.body();
    match k.kind() {
        BodyKind::EuclideanBall => {
            let _ = writeln!(
                out,
                r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="black" stroke-dasharray="4 3"/>"#,
                k.scale() * px
            );
        }
        BodyKind::SymmetricPolytope { vertices, .. } => {
            let mut vs: Vec<Vector> = vertices.iter().map(|v| *v * k.scale() + mid).collect();
            sort_by_angle(&mut vs, &mid);
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="none" stroke="black" stroke-dasharray="4 3"/>"#,
                path(&vs)
            );
        }
    }
    let _ = writeln!(out, "</svg>");
    out
}

fn bounds(pts: &[Vector]) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in pts {
        for j in 0..2 {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    (lo, hi)
}

fn ordered_ring(p: &Polytope) -> Vec<Vector> {
    let mut vs = p.vertices().to_vec();
    let c = p.centroid_of_vertices();
    sort_by_angle(&mut vs, &c);
    vs
}

fn sort_by_angle(vs: &mut [Vector], c: &Vector) {
    vs.sort_by(|a, b| {
        let ta = (a[1] - c[1]).atan2(a[0] - c[0]);
        let tb = (b[1] - c[1]).atan2(b[0] - c[0]);
        ta.total_cmp(&tb)
    });
}
