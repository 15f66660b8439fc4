//! Deterministic families of test domains: convex baselines, the U
//! corridor, staircases with small corner openings, combs with
//! geometrically shrinking teeth, spiral corridors, and random simply
//! connected polyominoes.

use std::collections::VecDeque;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::PolygonDomain;
use crate::error::{Error, Result};
use crate::geom::Point;

/// Recipe for a generated domain. Same spec (and seed) always yields a
/// bit-identical vertex list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DomainSpec {
    Square { side: f64 },
    Ngon { n: usize, radius: f64 },
    UCorridor,
    Staircase { n: usize, omega: f64 },
    Comb { n: usize, depth: f64, ratio: f64 },
    Spiral { turns: usize, gap: f64 },
    RandomRectilinear { cells: usize, seed: u64 },
}

pub const STAIRCASE_OMEGA_DEFAULT: f64 = 0.05;
pub const SPIRAL_GAP_DEFAULT: f64 = 0.2;

pub fn generate(spec: &DomainSpec) -> Result<PolygonDomain> {
    match *spec {
        DomainSpec::Square { side } => square(side),
        DomainSpec::Ngon { n, radius } => ngon(n, radius),
        DomainSpec::UCorridor => u_corridor(),
        DomainSpec::Staircase { n, omega } => staircase(n, omega),
        DomainSpec::Comb { n, depth, ratio } => comb(n, depth, ratio),
        DomainSpec::Spiral { turns, gap } => spiral(turns, gap),
        DomainSpec::RandomRectilinear { cells, seed } => random_rectilinear(cells, seed),
    }
}

pub fn square(side: f64) -> Result<PolygonDomain> {
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::BadParams(format!("square side must be positive, got {side}")));
    }
    PolygonDomain::load(vec![
        Point::new(0.0, 0.0),
        Point::new(side, 0.0),
        Point::new(side, side),
        Point::new(0.0, side),
    ])
}

pub fn ngon(n: usize, radius: f64) -> Result<PolygonDomain> {
    if n < 3 {
        return Err(Error::BadParams(format!("ngon needs at least 3 vertices, got {n}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::BadParams(format!("ngon radius must be positive, got {radius}")));
    }
    let verts = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            Point::new(radius * t.cos(), radius * t.sin())
        })
        .collect();
    PolygonDomain::load(verts)
}

/// The fixed 8-vertex U corridor used as the running example throughout
/// the test suite.
pub fn u_corridor() -> Result<PolygonDomain> {
    PolygonDomain::load(vec![
        Point::new(0.0, 0.0),
        Point::new(5.0, 0.0),
        Point::new(5.0, 5.0),
        Point::new(4.0, 5.0),
        Point::new(4.0, 1.0),
        Point::new(1.0, 1.0),
        Point::new(1.0, 5.0),
        Point::new(0.0, 5.0),
    ])
}

/// n unit cells on the diagonal, consecutive cells joined through an
/// omega-by-omega bridge square at the shared corner. omega = 0 would
/// pinch the polygon into a non-simple chain and is rejected.
pub fn staircase(n: usize, omega: f64) -> Result<PolygonDomain> {
    if n < 1 {
        return Err(Error::BadParams("staircase needs at least one cell".into()));
    }
    if !(omega > 0.0 && omega < 0.5) {
        return Err(Error::BadParams(format!(
            "staircase opening must lie in (0, 0.5), got {omega}"
        )));
    }
    let mut v = Vec::new();
    // lower-right chain: bottoms and right walls of the cells
    v.push(Point::new(0.0, 0.0));
    for i in 0..n {
        let i = i as f64;
        v.push(Point::new(i + 1.0, i));
        v.push(Point::new(i + 1.0, i + 1.0));
    }
    // upper-left chain with a bridge notch at each interior corner
    let nf = n as f64;
    v.push(Point::new(nf - 1.0, nf));
    for i in (1..n).rev() {
        let i = i as f64;
        v.push(Point::new(i, i + omega));
        v.push(Point::new(i - omega, i + omega));
        v.push(Point::new(i - omega, i));
        v.push(Point::new(i - 1.0, i));
    }
    PolygonDomain::load(v)
}

/// Horizontal spine with n teeth hanging below it at x = ratio^i,
/// i = 1..n; tooth i has width ratio^i (1 - ratio) / 2, so teeth shrink
/// geometrically toward x = 0 while staying pairwise disjoint.
pub fn comb(n: usize, depth: f64, ratio: f64) -> Result<PolygonDomain> {
    if n < 1 {
        return Err(Error::BadParams("comb needs at least one tooth".into()));
    }
    if !(depth > 0.0 && depth <= 1.0) {
        return Err(Error::BadParams(format!("comb depth must lie in (0, 1], got {depth}")));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::BadParams(format!("comb ratio must lie in (0, 1), got {ratio}")));
    }
    let spine_h = 0.25;
    let mut v = Vec::new();
    v.push(Point::new(0.0, 1.0));
    for i in (1..=n).rev() {
        let (a, w) = comb_tooth(i, ratio);
        v.push(Point::new(a, 1.0));
        v.push(Point::new(a, 1.0 - depth));
        v.push(Point::new(a + w, 1.0 - depth));
        v.push(Point::new(a + w, 1.0));
    }
    v.push(Point::new(1.0, 1.0));
    v.push(Point::new(1.0, 1.0 + spine_h));
    v.push(Point::new(0.0, 1.0 + spine_h));
    PolygonDomain::load(v)
}

/// Left edge and width of comb tooth i (1-based; larger i lies closer
/// to x = 0).
pub fn comb_tooth(i: usize, ratio: f64) -> (f64, f64) {
    let a = ratio.powi(i as i32);
    (a, a * (1.0 - ratio) / 2.0)
}

/// Rectilinear spiral corridor of width `gap`, walls of the same
/// thickness, winding inward `turns` times.
pub fn spiral(turns: usize, gap: f64) -> Result<PolygonDomain> {
    if turns < 1 {
        return Err(Error::BadParams("spiral needs at least one turn".into()));
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::BadParams(format!("spiral gap must be positive, got {gap}")));
    }
    let pitch = 2.0 * gap;
    let base = pitch * (2.0 * turns as f64 + 1.0);
    let dirs = [
        Point::new(1.0, 0.0),
        Point::new(0.0, 1.0),
        Point::new(-1.0, 0.0),
        Point::new(0.0, -1.0),
    ];
    let legs = 4 * turns;
    let mut pts = vec![Point::new(0.0, 0.0)];
    let mut leg_dirs = Vec::new();
    for k in 0..legs {
        let d = dirs[k % 4];
        let len = base - pitch * ((k + 1) / 2) as f64;
        let p = *pts.last().unwrap();
        pts.push(Point::new(p.x + d.x * len, p.y + d.y * len));
        leg_dirs.push(d);
    }
    // thicken the center line by gap/2 per side: axis-parallel offset
    // corners are v + (g/2)(n_prev + n_next), square caps at the ends
    let g2 = gap / 2.0;
    let normal = |d: Point| Point::new(-d.y, d.x);
    let m = pts.len() - 1;
    let mut v = Vec::new();
    let d0 = leg_dirs[0];
    let n0 = normal(d0);
    v.push(Point::new(
        pts[0].x + g2 * (-d0.x + n0.x),
        pts[0].y + g2 * (-d0.y + n0.y),
    ));
    for i in 1..m {
        let na = normal(leg_dirs[i - 1]);
        let nb = normal(leg_dirs[i]);
        v.push(Point::new(
            pts[i].x + g2 * (na.x + nb.x),
            pts[i].y + g2 * (na.y + nb.y),
        ));
    }
    let dl = leg_dirs[m - 1];
    let nl = normal(dl);
    v.push(Point::new(
        pts[m].x + g2 * (dl.x + nl.x),
        pts[m].y + g2 * (dl.y + nl.y),
    ));
    v.push(Point::new(
        pts[m].x + g2 * (dl.x - nl.x),
        pts[m].y + g2 * (dl.y - nl.y),
    ));
    for i in (1..m).rev() {
        let na = normal(leg_dirs[i - 1]);
        let nb = normal(leg_dirs[i]);
        v.push(Point::new(
            pts[i].x - g2 * (na.x + nb.x),
            pts[i].y - g2 * (na.y + nb.y),
        ));
    }
    v.push(Point::new(
        pts[0].x + g2 * (-d0.x - n0.x),
        pts[0].y + g2 * (-d0.y - n0.y),
    ));
    PolygonDomain::load(v)
}

/// Random simply connected polyomino with `cells` unit cells, grown one
/// frontier cell at a time. Additions that would pinch the boundary at a
/// corner or enclose a hole are rejected.
pub fn random_rectilinear(cells: usize, seed: u64) -> Result<PolygonDomain> {
    if cells < 1 {
        return Err(Error::BadParams("random_rectilinear needs at least one cell".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 2 * cells + 3;
    let center = (cells + 1) as i64;
    let mut filled = vec![false; side * side];
    let at = |x: i64, y: i64| (y as usize) * side + x as usize;
    filled[at(center, center)] = true;
    let mut count = 1;
    while count < cells {
        let mut frontier = Vec::new();
        for y in 1..(side as i64 - 1) {
            for x in 1..(side as i64 - 1) {
                if filled[at(x, y)] {
                    continue;
                }
                let adj = [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)];
                if adj.iter().any(|&(a, b)| filled[at(a, b)]) {
                    frontier.push((x, y));
                }
            }
        }
        let mut ok = false;
        while !frontier.is_empty() {
            let pick = rng.gen_range(0..frontier.len());
            let (x, y) = frontier.swap_remove(pick);
            filled[at(x, y)] = true;
            if polyomino_valid(&filled, side) {
                ok = true;
                break;
            }
            filled[at(x, y)] = false;
        }
        if !ok {
            return Err(Error::BadParams(
                "random_rectilinear growth stalled; try another seed".into(),
            ));
        }
        count += 1;
    }
    let verts = trace_polyomino(&filled, side);
    PolygonDomain::load(verts)
}

/// No corner pinches (diagonal contact without a shared orthogonal
/// neighbor) and a connected complement.
fn polyomino_valid(filled: &[bool], side: usize) -> bool {
    let at = |x: i64, y: i64| (y as usize) * side + x as usize;
    let s = side as i64;
    for y in 1..(s - 1) {
        for x in 1..(s - 1) {
            if !filled[at(x, y)] {
                continue;
            }
            for (dx, dy) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                if filled[at(x + dx, y + dy)]
                    && !filled[at(x + dx, y)]
                    && !filled[at(x, y + dy)]
                {
                    return false;
                }
            }
        }
    }
    // complement connectivity: flood from the border ring
    let mut seen = vec![false; side * side];
    let mut q = VecDeque::new();
    seen[0] = true;
    q.push_back((0i64, 0i64));
    let mut reached = 1usize;
    while let Some((x, y)) = q.pop_front() {
        for (nx, ny) in [(x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)] {
            if nx < 0 || ny < 0 || nx >= s || ny >= s {
                continue;
            }
            let i = at(nx, ny);
            if !seen[i] && !filled[i] {
                seen[i] = true;
                reached += 1;
                q.push_back((nx, ny));
            }
        }
    }
    let empty = filled.iter().filter(|&&f| !f).count();
    reached == empty
}

/// Walk the boundary with the interior on the left and merge collinear
/// runs. Pinch-free polyominoes have a single boundary cycle.
fn trace_polyomino(filled: &[bool], side: usize) -> Vec<Point> {
    let s = side as i64;
    let at = |x: i64, y: i64| (y as usize) * side + x as usize;
    let cell = |x: i64, y: i64| x >= 0 && y >= 0 && x < s && y < s && filled[at(x, y)];
    // find a starting cell and walk from its bottom-left corner going right
    let mut start = None;
    'scan: for y in 0..s {
        for x in 0..s {
            if cell(x, y) {
                start = Some((x, y));
                break 'scan;
            }
        }
    }
    let (sx, sy) = start.expect("polyomino has at least one cell");
    let start_v = (sx, sy);
    let mut v = start_v;
    let mut dir = (1i64, 0i64);
    let mut corners: Vec<(i64, i64)> = Vec::new();
    loop {
        let next = (v.0 + dir.0, v.1 + dir.1);
        // at lattice vertex `next`, pick the outgoing direction keeping the
        // interior on the left: prefer a left turn, then straight, then right
        let left = (-dir.1, dir.0);
        let right = (dir.1, -dir.0);
        let mut new_dir = dir;
        for d in [left, dir, right] {
            // the edge from `next` along d has the interior cell on its left
            let (lx, ly) = match d {
                (1, 0) => (next.0, next.1),
                (-1, 0) => (next.0 - 1, next.1 - 1),
                (0, 1) => (next.0 - 1, next.1),
                _ => (next.0, next.1 - 1),
            };
            let (rx, ry) = match d {
                (1, 0) => (next.0, next.1 - 1),
                (-1, 0) => (next.0 - 1, next.1),
                (0, 1) => (next.0, next.1),
                _ => (next.0 - 1, next.1 - 1),
            };
            if cell(lx, ly) && !cell(rx, ry) {
                new_dir = d;
                break;
            }
        }
        if new_dir != dir {
            corners.push(next);
        }
        dir = new_dir;
        v = next;
        if v == start_v {
            break;
        }
    }
    corners
        .iter()
        .map(|&(x, y)| Point::new(x as f64, y as f64))
        .collect()
}
