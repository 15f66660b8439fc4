//! Subhyperbolic lengths and metrics: len_alpha, the grid metric d_alpha,
//! the subhyperbolicity estimate s_alpha, the arc-diameter diagnostic and
//! the extension classifier.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{GridField, PolygonDomain, DEFAULT_MAX_CELLS};
use crate::error::{Error, Result};
use crate::geom::{uniform_dist, Point, Square};

/// Subhyperbolic length of a polyline: the integral of dist(u, boundary)^
/// (alpha - 1) against Euclidean arclength, by composite midpoint quadrature
/// with step at most min(h_quad, 0.25 local boundary distance).
///
/// alpha = 0 (quasihyperbolic) is accepted for diagnostics.
pub fn len_alpha(d: &PolygonDomain, path: &[Point], alpha: f64, h_quad: f64) -> Result<f64> {
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
    assert!(h_quad > 0.0 && h_quad.is_finite());
    for p in path {
        if !d.contains(p) {
            return Err(Error::PathLeavesDomain(p.x, p.y));
        }
    }
    if path.len() < 2 {
        return Ok(0.0);
    }
    let step_floor = h_quad * 1e-3;
    let mut total = 0.0;
    for w in path.windows(2) {
        let (p, q) = (w[0], w[1]);
        let len = p.euclid_dist(&q);
        if len == 0.0 {
            continue;
        }
        let mut s = 0.0;
        while s < len {
            let here = p.lerp(&q, s / len);
            let step = h_quad
                .min(0.25 * d.boundary_distance(&here))
                .max(step_floor)
                .min(len - s);
            let mid = p.lerp(&q, (s + step / 2.0) / len);
            if !d.contains(&mid) {
                return Err(Error::PathLeavesDomain(mid.x, mid.y));
            }
            total += d.boundary_distance(&mid).powf(alpha - 1.0) * step;
            s += step;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicResult {
    pub value: f64,
    /// Cell-center polyline of the realizing grid path.
    pub path: Vec<Point>,
    pub alpha: f64,
    pub h: f64,
    pub refined_value: Option<f64>,
}

#[derive(PartialEq)]
struct HeapItem {
    cost: f64,
    idx: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Dijkstra over inside cells with 8-neighbor moves; `keep` restricts the
/// usable cells. Returns per-cell cost and predecessor.
fn dijkstra(
    g: &GridField,
    start: usize,
    alpha: f64,
    keep: Option<&dyn Fn(usize) -> bool>,
    target: Option<usize>,
) -> (Vec<f64>, Vec<usize>) {
    let n = g.nx * g.ny;
    let mut cost = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let weight: Vec<f64> = g
        .bdist
        .iter()
        .map(|&b| if b > 0.0 { b.powf(alpha - 1.0) } else { 0.0 })
        .collect();
    let mut heap = BinaryHeap::new();
    cost[start] = 0.0;
    heap.push(HeapItem {
        cost: 0.0,
        idx: start,
    });
    while let Some(HeapItem { cost: c, idx }) = heap.pop() {
        if c > cost[idx] {
            continue;
        }
        if Some(idx) == target {
            break;
        }
        let (i, j) = (idx % g.nx, idx / g.nx);
        for (di, dj) in NEIGHBORS {
            let ni = i as isize + di;
            let nj = j as isize + dj;
            if ni < 0 || nj < 0 || ni as usize >= g.nx || nj as usize >= g.ny {
                continue;
            }
            let nidx = nj as usize * g.nx + ni as usize;
            if !g.inside[nidx] || keep.map_or(false, |f| !f(nidx)) {
                continue;
            }
            let elen = if di != 0 && dj != 0 {
                g.h * std::f64::consts::SQRT_2
            } else {
                g.h
            };
            let w = elen * 0.5 * (weight[idx] + weight[nidx]);
            let nc = c + w;
            if nc < cost[nidx] {
                cost[nidx] = nc;
                prev[nidx] = idx;
                heap.push(HeapItem { cost: nc, idx: nidx });
            }
        }
    }
    (cost, prev)
}

fn endpoint_cell(g: &GridField, p: &Point) -> Result<usize> {
    g.nearest_inside_cell(p, 4)
        .map(|(i, j)| g.idx(i, j))
        .ok_or(Error::PointOutside(p.x, p.y))
}

/// Grid estimate of the subhyperbolic metric d_alpha: shortest path on the
/// 8-neighbor graph of inside cells, edge weight = Euclidean edge length
/// times the mean endpoint weight dist^(alpha - 1).
pub fn d_alpha(d: &PolygonDomain, g: &GridField, x: &Point, y: &Point, alpha: f64) -> Result<GeodesicResult> {
    assert!((0.0..=1.0).contains(&alpha), "alpha must lie in [0, 1]");
    for p in [x, y] {
        if !d.contains(p) {
            return Err(Error::PointOutside(p.x, p.y));
        }
    }
    let sx = endpoint_cell(g, x)?;
    let sy = endpoint_cell(g, y)?;
    if sx == sy {
        return Ok(GeodesicResult {
            value: 0.0,
            path: vec![g.cell_center(sx % g.nx, sx / g.nx)],
            alpha,
            h: g.h,
            refined_value: None,
        });
    }
    let (cost, prev) = dijkstra(g, sx, alpha, None, Some(sy));
    if !cost[sy].is_finite() {
        return Err(Error::Disconnected);
    }
    let mut path = Vec::new();
    let mut at = sy;
    while at != usize::MAX {
        path.push(g.cell_center(at % g.nx, at / g.nx));
        if at == sx {
            break;
        }
        at = prev[at];
    }
    path.reverse();
    Ok(GeodesicResult {
        value: cost[sy],
        path,
        alpha,
        h: g.h,
        refined_value: None,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SAlphaEstimate {
    pub alpha: f64,
    /// Lower estimate of the supremum of d_alpha(x, y) / |x - y|^alpha.
    pub value: f64,
    pub argmax_pair: (Point, Point),
    pub samples: usize,
    pub h: f64,
}

fn random_interior_point(d: &PolygonDomain, rng: &mut ChaCha8Rng) -> Option<Point> {
    let (lo, hi) = d.bbox();
    for _ in 0..1000 {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if d.contains(&p) {
            return Some(p);
        }
    }
    None
}

/// Cells whose boundary distance is within half a cell of `target`.
fn cells_near_offset(g: &GridField, target: f64) -> Vec<usize> {
    (0..g.nx * g.ny)
        .filter(|&idx| g.inside[idx] && (g.bdist[idx] - target).abs() <= 0.5 * g.h)
        .collect()
}

/// Stratified pair sample: uniform interior pairs, boundary-hugging pairs at
/// offsets 2h, 4h and 8h, and all pairs of the probe points.
fn sample_pairs(
    d: &PolygonDomain,
    g: &GridField,
    pair_budget: usize,
    seed: u64,
    probes: &[Point],
) -> Vec<(Point, Point)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = Vec::new();
    for i in 0..probes.len() {
        for j in (i + 1)..probes.len() {
            pairs.push((probes[i], probes[j]));
        }
    }
    let offsets = [2.0 * g.h, 4.0 * g.h, 8.0 * g.h];
    let strata: Vec<Vec<usize>> = offsets.iter().map(|&t| cells_near_offset(g, t)).collect();
    let mut k = 0usize;
    while pairs.len() < pair_budget + probes.len() * (probes.len().saturating_sub(1)) / 2 {
        // alternate strata deterministically
        let stratum = k % (offsets.len() + 1);
        k += 1;
        if stratum == 0 {
            if let (Some(a), Some(b)) = (
                random_interior_point(d, &mut rng),
                random_interior_point(d, &mut rng),
            ) {
                pairs.push((a, b));
            } else {
                break;
            }
        } else {
            let cells = &strata[stratum - 1];
            if cells.len() < 2 {
                continue;
            }
            let a = cells[rng.gen_range(0..cells.len())];
            let b = cells[rng.gen_range(0..cells.len())];
            pairs.push((
                g.cell_center(a % g.nx, a / g.nx),
                g.cell_center(b % g.nx, b / g.nx),
            ));
        }
        if k > 16 * (pair_budget + 4) {
            break;
        }
    }
    pairs
}

/// Lower estimate of s_alpha by stratified pair sampling; deterministic for
/// a fixed seed.
pub fn s_alpha_estimate(
    d: &PolygonDomain,
    g: &GridField,
    alpha: f64,
    pair_budget: usize,
    seed: u64,
    probes: &[Point],
) -> SAlphaEstimate {
    assert!(pair_budget >= 1);
    assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
    let pairs = sample_pairs(d, g, pair_budget, seed, probes);
    let mut best = 0.0f64;
    let mut arg = (Point::new(0.0, 0.0), Point::new(0.0, 0.0));
    let mut samples = 0usize;
    for (a, b) in pairs {
        let sep = uniform_dist(&a, &b);
        if sep <= g.h {
            continue;
        }
        let Ok(res) = d_alpha(d, g, &a, &b, alpha) else {
            continue;
        };
        samples += 1;
        let ratio = res.value / sep.powf(alpha);
        if ratio > best {
            best = ratio;
            arg = (a, b);
        }
    }
    SAlphaEstimate {
        alpha,
        value: best,
        argmax_pair: arg,
        samples,
        h: g.h,
    }
}

/// Least R (by bisection) such that the pair is grid-connected inside the
/// lens of the two R-squares; reported as max over pairs of R / |a - b|.
pub fn arc_diameter_estimate(
    d: &PolygonDomain,
    g: &GridField,
    pair_budget: usize,
    seed: u64,
    probes: &[Point],
) -> f64 {
    let pairs = sample_pairs(d, g, pair_budget, seed, probes);
    let mut eta = 0.0f64;
    for (a, b) in pairs {
        let sep = uniform_dist(&a, &b);
        if sep <= 2.0 * g.h {
            continue;
        }
        let (Ok(ca), Ok(cb)) = (endpoint_cell(g, &a), endpoint_cell(g, &b)) else {
            continue;
        };
        let connected_at = |r: f64| -> bool {
            let sa = Square::new(a, r);
            let sb = Square::new(b, r);
            let keep = |idx: usize| {
                let c = g.cell_center(idx % g.nx, idx / g.nx);
                sa.closure_contains(&c) && sb.closure_contains(&c)
            };
            if !keep(ca) || !keep(cb) {
                return false;
            }
            // plain BFS suffices for reachability
            let mut seen = vec![false; g.nx * g.ny];
            let mut queue = std::collections::VecDeque::new();
            seen[ca] = true;
            queue.push_back(ca);
            while let Some(idx) = queue.pop_front() {
                if idx == cb {
                    return true;
                }
                let (i, j) = (idx % g.nx, idx / g.nx);
                for (di, dj) in NEIGHBORS {
                    let ni = i as isize + di;
                    let nj = j as isize + dj;
                    if ni < 0 || nj < 0 || ni as usize >= g.nx || nj as usize >= g.ny {
                        continue;
                    }
                    let nidx = nj as usize * g.nx + ni as usize;
                    if !seen[nidx] && g.inside[nidx] && keep(nidx) {
                        seen[nidx] = true;
                        queue.push_back(nidx);
                    }
                }
            }
            false
        };
        let mut lo = sep;
        let mut hi = 2.0 * d.bbox_diag();
        if !connected_at(hi) {
            continue;
        }
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            if connected_at(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        eta = eta.max(hi / sep);
    }
    eta
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    ExtensionLikely,
    NonExtensionSuspected,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub p: f64,
    pub m: usize,
    pub alpha: f64,
    pub s_alpha_estimate: SAlphaEstimate,
    pub decision: Decision,
    /// (h, pair budget, estimate) for every run performed.
    pub growth_trace: Vec<(f64, usize, f64)>,
}

/// Classify by the growth of the s_alpha estimate under grid refinement and
/// budget doubling: stable (< 10% on both axes) reads as extension-likely,
/// >= 50% growth on both axes as non-extension-suspected.
pub fn classify_extension(
    d: &PolygonDomain,
    p: f64,
    m: usize,
    budget: usize,
    seed: u64,
    probes: &[Point],
    h: f64,
) -> Result<Verdict> {
    assert!(p > 2.0, "p must exceed 2");
    assert!(m >= 1);
    let alpha = (p - 2.0) / (p - 1.0);
    let g1 = d.rasterize(h, DEFAULT_MAX_CELLS)?;
    let g2 = d.rasterize(h / 2.0, DEFAULT_MAX_CELLS)?;
    let mut trace = Vec::new();
    let mut run = |g: &GridField, b: usize| -> f64 {
        let est = s_alpha_estimate(d, g, alpha, b, seed, probes);
        trace.push((g.h, b, est.value));
        est.value
    };
    let v_h_b = run(&g1, budget);
    let v_h_2b = run(&g1, 2 * budget);
    let v_h2_b = run(&g2, budget);
    let v_h2_2b = run(&g2, 2 * budget);
    let _ = (v_h_b, v_h2_b);
    let rel = |from: f64, to: f64| (to - from) / from.max(1e-12);
    let refine_growth = rel(v_h_2b, v_h2_2b);
    let budget_growth = rel(v_h2_b, v_h2_2b);
    let decision = if refine_growth.abs() < 0.10 && budget_growth.abs() < 0.10 {
        Decision::ExtensionLikely
    } else if refine_growth >= 0.50 && budget_growth >= 0.50 {
        Decision::NonExtensionSuspected
    } else {
        Decision::Inconclusive
    };
    let final_est = s_alpha_estimate(d, &g2, alpha, 2 * budget, seed, probes);
    Ok(Verdict {
        p,
        m,
        alpha,
        s_alpha_estimate: final_est,
        decision,
        growth_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DEFAULT_MAX_CELLS;

    fn unit_square_centered() -> PolygonDomain {
        // S(0, 1): side 2 centered at the origin
        PolygonDomain::load(vec![
            Point::new(-1.0, -1.0),
            Point::new(1.0, -1.0),
            Point::new(1.0, 1.0),
            Point::new(-1.0, 1.0),
        ])
        .unwrap()
    }

    #[test]
    fn len_alpha_radial_closed_form() {
        let d = unit_square_centered();
        // segment (0,0) -> (t,0): len = (1 - (1 - t)^alpha) / alpha
        for (alpha, t) in [(0.5, 0.75), (0.5, 0.25), (0.3, 0.5), (1.0, 0.3)] {
            let path = [Point::new(0.0, 0.0), Point::new(t, 0.0)];
            let got = len_alpha(&d, &path, alpha, 1e-4).unwrap();
            let want = (1.0 - (1.0f64 - t).powf(alpha)) / alpha;
            assert!(
                (got - want).abs() / want < 5e-3,
                "alpha={alpha} t={t}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn len_alpha_degenerate_and_errors() {
        let d = unit_square_centered();
        assert_eq!(
            len_alpha(&d, &[Point::new(0.0, 0.0)], 0.5, 1e-3).unwrap(),
            0.0
        );
        assert!(matches!(
            len_alpha(&d, &[Point::new(0.0, 0.0), Point::new(2.0, 0.0)], 0.5, 1e-3),
            Err(Error::PathLeavesDomain(_, _))
        ));
    }

    #[test]
    fn d_alpha_geodesic_is_near_euclidean() {
        let d = unit_square_centered();
        let g = d.rasterize(0.01, DEFAULT_MAX_CELLS).unwrap();
        let x = Point::new(-0.5, -0.25);
        let y = Point::new(0.5, 0.55);
        let res = d_alpha(&d, &g, &x, &y, 1.0).unwrap();
        let euclid = x.euclid_dist(&y);
        assert!(res.value >= euclid - 2.0 * g.h);
        assert!(res.value <= euclid * 1.09, "octile bound: {}", res.value);
        // symmetry
        let back = d_alpha(&d, &g, &y, &x, 1.0).unwrap();
        assert!((back.value - res.value).abs() < 1e-12);
        // coincident points
        assert_eq!(d_alpha(&d, &g, &x, &x, 1.0).unwrap().value, 0.0);
    }

    #[test]
    fn d_alpha_segment_upper_bound() {
        let d = unit_square_centered();
        let g = d.rasterize(0.005, DEFAULT_MAX_CELLS).unwrap();
        let x = Point::new(-0.5, 0.0);
        let y = Point::new(0.5, 0.0);
        let res = d_alpha(&d, &g, &x, &y, 0.5).unwrap();
        // straight segment gives 2 (1 - 0.5^0.5) / 0.5
        let bound = 2.0 * (1.0 - 0.5f64.powf(0.5)) / 0.5;
        assert!(
            res.value <= bound + 8.0 * g.h.powf(0.5),
            "value {} vs bound {bound}",
            res.value
        );
        assert!(res.value > 0.5 * bound);
    }

    #[test]
    fn d_alpha_triangle_inequality() {
        let d = unit_square_centered();
        let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
        let pts = [
            Point::new(-0.7, -0.7),
            Point::new(0.3, 0.1),
            Point::new(0.6, -0.4),
        ];
        for alpha in [0.5, 1.0] {
            let dab = d_alpha(&d, &g, &pts[0], &pts[1], alpha).unwrap().value;
            let dbc = d_alpha(&d, &g, &pts[1], &pts[2], alpha).unwrap().value;
            let dac = d_alpha(&d, &g, &pts[0], &pts[2], alpha).unwrap().value;
            assert!(dac <= dab + dbc + 1e-9);
        }
    }

    #[test]
    fn s_alpha_unit_square_below_ceiling() {
        let d = unit_square_centered();
        let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
        let est = s_alpha_estimate(&d, &g, 0.5, 40, 7, &[]);
        assert!(est.samples > 0);
        assert!(est.value > 0.0);
        assert!(est.value <= 1.25 * 3.0 / 0.5, "estimate {}", est.value);
        // determinism
        let again = s_alpha_estimate(&d, &g, 0.5, 40, 7, &[]);
        assert_eq!(est.value, again.value);
    }

    #[test]
    fn arc_diameter_convex() {
        let d = unit_square_centered();
        let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
        let eta = arc_diameter_estimate(&d, &g, 20, 3, &[]);
        assert!(eta > 0.0);
        assert!(eta <= 1.3, "eta {eta}");
    }

    #[test]
    fn classify_unit_square() {
        let d = unit_square_centered();
        let v = classify_extension(&d, 4.0, 2, 20, 11, &[], 0.04).unwrap();
        assert!((v.alpha - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(v.decision, Decision::ExtensionLikely);
        assert!(v.s_alpha_estimate.value <= 1.25 * 3.0 / v.alpha);
        assert_eq!(v.growth_trace.len(), 4);
    }
}
