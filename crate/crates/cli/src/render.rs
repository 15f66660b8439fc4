//! Deterministic SVG and PGM output.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use subhyp::{Connector, GridField, Point, PolygonDomain, Square};

/// Shape-only view of a chain; deserializes from both wide-path and
/// narrow-path outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RenderChain {
    pub squares: Vec<Square>,
    #[serde(default)]
    pub hats: Vec<Option<Square>>,
    #[serde(default)]
    pub connectors: Vec<Connector>,
}

fn fx(v: f64) -> String {
    format!("{v:.6}")
}

pub fn render_svg(
    d: &PolygonDomain,
    chains: &[RenderChain],
    geodesics: &[Vec<Point>],
) -> String {
    let (lo, hi) = d.bbox();
    let margin = 0.05 * (hi.x - lo.x).max(hi.y - lo.y).max(1e-9);
    let w = hi.x - lo.x + 2.0 * margin;
    let h = hi.y - lo.y + 2.0 * margin;
    // svg y runs downward; flip around the padded top edge
    let sy = |y: f64| (hi.y + margin) - y;
    let sx = |x: f64| x - (lo.x - margin);
    let stroke = (w.max(h) / 600.0).max(1e-9);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {} {}\">",
        fx(w),
        fx(h)
    );
    let pts: Vec<String> = d
        .vertices()
        .iter()
        .map(|p| format!("{},{}", fx(sx(p.x)), fx(sy(p.y))))
        .collect();
    let _ = writeln!(
        s,
        "  <polygon points=\"{}\" fill=\"#eef2f7\" stroke=\"#333333\" stroke-width=\"{}\"/>",
        pts.join(" "),
        fx(2.0 * stroke)
    );
    for chain in chains {
        for c in &chain.connectors {
            match c {
                Connector::Hat(hat) => {
                    let _ = writeln!(
                        s,
                        "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f5c542\" fill-opacity=\"0.6\" stroke=\"none\"/>",
                        fx(sx(hat.xmin())),
                        fx(sy(hat.ymax())),
                        fx(2.0 * hat.radius),
                        fx(2.0 * hat.radius)
                    );
                }
                Connector::Open(seg) => {
                    let _ = writeln!(
                        s,
                        "  <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#2e8b57\" stroke-width=\"{}\"/>",
                        fx(sx(seg.a.x)),
                        fx(sy(seg.a.y)),
                        fx(sx(seg.b.x)),
                        fx(sy(seg.b.y)),
                        fx(2.0 * stroke)
                    );
                }
            }
        }
        for hat in chain.hats.iter().flatten() {
            let _ = writeln!(
                s,
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#f5c542\" fill-opacity=\"0.6\" stroke=\"none\"/>",
                fx(sx(hat.xmin())),
                fx(sy(hat.ymax())),
                fx(2.0 * hat.radius),
                fx(2.0 * hat.radius)
            );
        }
        for (i, q) in chain.squares.iter().enumerate() {
            let _ = writeln!(
                s,
                "  <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"{}\"/>",
                fx(sx(q.xmin())),
                fx(sy(q.ymax())),
                fx(2.0 * q.radius),
                fx(2.0 * q.radius),
                fx(stroke)
            );
            let _ = writeln!(
                s,
                "  <text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"middle\" fill=\"#c0392b\">{}</text>",
                fx(sx(q.center.x)),
                fx(sy(q.center.y)),
                fx((q.radius * 0.8).max(4.0 * stroke)),
                i + 1
            );
        }
    }
    for path in geodesics {
        if path.is_empty() {
            continue;
        }
        let pts: Vec<String> = path
            .iter()
            .map(|p| format!("{},{}", fx(sx(p.x)), fx(sy(p.y))))
            .collect();
        let _ = writeln!(
            s,
            "  <polyline points=\"{}\" fill=\"none\" stroke=\"#1f4fd8\" stroke-width=\"{}\"/>",
            pts.join(" "),
            fx(2.0 * stroke)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Binary PGM of the boundary-distance field (0 outside the domain).
pub fn grid_pgm(g: &GridField) -> Vec<u8> {
    let max = g
        .bdist
        .iter()
        .zip(&g.inside)
        .filter(|(_, &i)| i)
        .map(|(&b, _)| b)
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let mut out = format!("P5\n{} {}\n255\n", g.nx, g.ny).into_bytes();
    // top row first
    for j in (0..g.ny).rev() {
        for i in 0..g.nx {
            let idx = g.idx(i, j);
            let v = if g.inside[idx] {
                (1.0 + 254.0 * g.bdist[idx] / max).round() as u8
            } else {
                0
            };
            out.push(v);
        }
    }
    out
}
