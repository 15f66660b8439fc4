//! The weight w on the narrow path, the axis-direction pseudometric
//! potentials phi_j, and the rapidly growing function h_m with its
//! derivative identities and the chain inequalities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::domain::GridField;
use crate::error::{Error, Result};
use crate::geom::{Point, Square};
use crate::narrow_path::NarrowChain;
use crate::wide_path::Connector;

/// Per-square weight w = (diam Q_i)^(1/(1-p)); zero on connector regions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NarrowWeight {
    pub p: f64,
    pub weights: Vec<f64>,
}

pub fn narrow_weight(chain: &NarrowChain, p: f64) -> NarrowWeight {
    assert!(p > 2.0, "p must exceed 2");
    let weights = chain
        .squares
        .iter()
        .map(|q| q.diam().powf(1.0 / (1.0 - p)))
        .collect();
    NarrowWeight { p, weights }
}

impl NarrowWeight {
    pub fn w_max(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }
}

/// Rasterization of the narrow path N on its own grid: per-cell membership
/// and the index of the open square containing the cell center (None in
/// connector regions, where the weight vanishes).
#[derive(Debug, Clone)]
pub struct NarrowGrid {
    pub g: GridField,
    pub square_of: Vec<Option<usize>>,
    /// Cell index of the source x.
    pub source: usize,
    /// Cell index nearest to y.
    pub sink: usize,
}

/// Default grid pitch: min diam Q_i / 16. Chains with diameter ratios
/// beyond 1e4 are rejected rather than silently under-resolved.
pub fn narrow_grid(chain: &NarrowChain, h_override: Option<f64>, max_cells: usize) -> Result<NarrowGrid> {
    let dmin = chain
        .squares
        .iter()
        .map(Square::diam)
        .fold(f64::INFINITY, f64::min);
    let dmax = chain
        .squares
        .iter()
        .map(Square::diam)
        .fold(0.0f64, f64::max);
    if dmax / dmin > 1e4 {
        return Err(Error::ResolutionInsufficient(
            dmax / dmin,
            "narrow chain diameter ratio too large to resolve".into(),
        ));
    }
    let h = h_override.unwrap_or(dmin / 16.0);
    let hats: Vec<&Square> = chain
        .connectors
        .iter()
        .filter_map(|c| match c {
            Connector::Hat(s) => Some(s),
            Connector::Open(_) => None,
        })
        .collect();
    let mut xmin = f64::INFINITY;
    let mut ymin = f64::INFINITY;
    let mut xmax = f64::NEG_INFINITY;
    let mut ymax = f64::NEG_INFINITY;
    for s in chain.squares.iter().chain(hats.iter().copied()) {
        xmin = xmin.min(s.xmin());
        ymin = ymin.min(s.ymin());
        xmax = xmax.max(s.xmax());
        ymax = ymax.max(s.ymax());
    }
    let origin = Point::new(xmin - h, ymin - h);
    let nx = ((xmax - xmin + 2.0 * h) / h).ceil() as usize;
    let ny = ((ymax - ymin + 2.0 * h) / h).ceil() as usize;
    if nx.saturating_mul(ny) > max_cells {
        return Err(Error::GridTooLarge(nx * ny, max_cells));
    }
    let mut inside = vec![false; nx * ny];
    let mut square_of = vec![None; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let idx = j * nx + i;
            let c = Point::new(origin.x + (i as f64 + 0.5) * h, origin.y + (j as f64 + 0.5) * h);
            for (qi, q) in chain.squares.iter().enumerate() {
                if q.contains(&c) {
                    square_of[idx] = Some(qi);
                    break;
                }
            }
            inside[idx] = square_of[idx].is_some()
                || chain.squares.iter().any(|q| q.closure_contains(&c))
                || hats.iter().any(|s| s.closure_contains(&c));
        }
    }
    let g = GridField {
        origin,
        h,
        nx,
        ny,
        bdist: vec![0.0; inside.len()],
        inside,
    };
    let source = g
        .nearest_inside_cell(&chain.x, 4)
        .map(|(i, j)| g.idx(i, j))
        .ok_or(Error::SourceOutsideNarrowPath)?;
    let sink = g
        .nearest_inside_cell(&chain.y, 4)
        .map(|(i, j)| g.idx(i, j))
        .ok_or(Error::SourceOutsideNarrowPath)?;
    Ok(NarrowGrid {
        g,
        square_of,
        source,
        sink,
    })
}

impl NarrowGrid {
    pub fn cell_weight(&self, w: &NarrowWeight, idx: usize) -> f64 {
        self.square_of[idx].map_or(0.0, |qi| w.weights[qi])
    }

    pub fn cell_center(&self, idx: usize) -> Point {
        self.g.cell_center(idx % self.g.nx, idx / self.g.nx)
    }
}

/// Potential phi_j(z) = rho_{w,j}(z, x): single-source shortest path on the
/// 4-neighbor grid of N cells, charging mean endpoint weight times h for
/// moves along axis j and nothing for moves along the other axis.
#[derive(Debug, Clone)]
pub struct AxisPseudometricField {
    /// 1 or 2.
    pub j: usize,
    pub phi: Vec<f64>,
    /// Dijkstra tree parent per cell (usize::MAX at the source and
    /// unreachable cells).
    pub prev: Vec<usize>,
}

#[derive(PartialEq)]
struct HeapItem {
    cost: f64,
    idx: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
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

pub fn phi_field(ng: &NarrowGrid, w: &NarrowWeight, j: usize) -> Result<AxisPseudometricField> {
    assert!(j == 1 || j == 2, "axis index must be 1 or 2");
    let g = &ng.g;
    let n = g.nx * g.ny;
    if !g.inside[ng.source] {
        return Err(Error::SourceOutsideNarrowPath);
    }
    let mut phi = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    phi[ng.source] = 0.0;
    heap.push(HeapItem {
        cost: 0.0,
        idx: ng.source,
    });
    while let Some(HeapItem { cost, idx }) = heap.pop() {
        if cost > phi[idx] {
            continue;
        }
        let (ci, cj) = (idx % g.nx, idx / g.nx);
        for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)] {
            let ni = ci as isize + di;
            let nj = cj as isize + dj;
            if ni < 0 || nj < 0 || ni as usize >= g.nx || nj as usize >= g.ny {
                continue;
            }
            let nidx = nj as usize * g.nx + ni as usize;
            if !g.inside[nidx] {
                continue;
            }
            let along_j = if j == 1 { di != 0 } else { dj != 0 };
            let step = if along_j {
                g.h * 0.5 * (ng.cell_weight(w, idx) + ng.cell_weight(w, nidx))
            } else {
                0.0
            };
            let nc = cost + step;
            if nc < phi[nidx] {
                phi[nidx] = nc;
                prev[nidx] = idx;
                heap.push(HeapItem { cost: nc, idx: nidx });
            }
        }
    }
    Ok(AxisPseudometricField { j, phi, prev })
}

/// Evaluation of h_m at one point, with diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowingEval {
    pub m: usize,
    pub value: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// |h_m(tree path) - h_m(L path)| when the L-shaped alternative stays
    /// inside N.
    pub path_residual: Option<f64>,
    pub z: Point,
}

/// Cells of the phi-field tree path from the source to `to` (source first).
fn tree_path(f: &AxisPseudometricField, source: usize, to: usize) -> Result<Vec<usize>> {
    let mut path = Vec::new();
    let mut at = to;
    loop {
        path.push(at);
        if at == source {
            break;
        }
        at = f.prev[at];
        if at == usize::MAX {
            return Err(Error::PathUnavailable);
        }
    }
    path.reverse();
    Ok(path)
}

/// L-shaped cell path between two cells if one of the two bend orders
/// stays in N.
fn l_path(ng: &NarrowGrid, from: usize, to: usize) -> Option<Vec<usize>> {
    let g = &ng.g;
    let walk = |horizontal_first: bool| -> Option<Vec<usize>> {
        let (mut i, mut j) = (from % g.nx, from / g.nx);
        let (ti, tj) = (to % g.nx, to / g.nx);
        let mut path = vec![from];
        let step_x = |i: &mut usize, j: usize, path: &mut Vec<usize>| -> bool {
            while *i != ti {
                *i = if ti > *i { *i + 1 } else { *i - 1 };
                let idx = j * g.nx + *i;
                if !g.inside[idx] {
                    return false;
                }
                path.push(idx);
            }
            true
        };
        let step_y = |i: usize, j: &mut usize, path: &mut Vec<usize>| -> bool {
            while *j != tj {
                *j = if tj > *j { *j + 1 } else { *j - 1 };
                let idx = *j * g.nx + i;
                if !g.inside[idx] {
                    return false;
                }
                path.push(idx);
            }
            true
        };
        let ok = if horizontal_first {
            step_x(&mut i, j, &mut path) && step_y(i, &mut j, &mut path)
        } else {
            step_y(i, &mut j, &mut path) && step_x(&mut i, j, &mut path)
        };
        ok.then_some(path)
    };
    walk(true).or_else(|| walk(false))
}

/// Line integral of (phi1(u)(z1-u1)^(m-2), phi2(u)(z2-u2)^(m-2)) along a
/// cell path, composite midpoint per edge.
fn integrate_along(
    ng: &NarrowGrid,
    f1: &AxisPseudometricField,
    f2: &AxisPseudometricField,
    m: usize,
    z: &Point,
    cells: &[usize],
) -> f64 {
    let _g = &ng.g;
    let e = (m - 2) as i32;
    let mut total = 0.0;
    for win in cells.windows(2) {
        let (u, v) = (win[0], win[1]);
        let pu = ng.cell_center(u);
        let pv = ng.cell_center(v);
        let mid = Point::new(0.5 * (pu.x + pv.x), 0.5 * (pu.y + pv.y));
        if (pu.y - pv.y).abs() < (pu.x - pv.x).abs() {
            // horizontal edge: charges phi1 (z1 - u1)^(m-2) du1
            let phi = 0.5 * (f1.phi[u] + f1.phi[v]);
            total += phi * (z.x - mid.x).powi(e) * (pv.x - pu.x);
        } else {
            let phi = 0.5 * (f2.phi[u] + f2.phi[v]);
            total += phi * (z.y - mid.y).powi(e) * (pv.y - pu.y);
        }
    }
    total
}

pub fn evaluate_h_m(
    ng: &NarrowGrid,
    f1: &AxisPseudometricField,
    f2: &AxisPseudometricField,
    m: usize,
    z: &Point,
) -> Result<GrowingEval> {
    assert!(m >= 1);
    let cell = ng
        .g
        .nearest_inside_cell(z, 2)
        .map(|(i, j)| ng.g.idx(i, j))
        .ok_or(Error::PathUnavailable)?;
    let phi1 = f1.phi[cell];
    let phi2 = f2.phi[cell];
    if !phi1.is_finite() || !phi2.is_finite() {
        return Err(Error::PathUnavailable);
    }
    if m == 1 {
        return Ok(GrowingEval {
            m,
            value: phi1 + phi2,
            phi1,
            phi2,
            path_residual: None,
            z: *z,
        });
    }
    let cells = tree_path(f1, ng.source, cell)?;
    let value = integrate_along(ng, f1, f2, m, z, &cells);
    let path_residual = l_path(ng, ng.source, cell)
        .filter(|alt| alt != &cells)
        .map(|alt| (integrate_along(ng, f1, f2, m, z, &alt) - value).abs());
    Ok(GrowingEval {
        m,
        value,
        phi1,
        phi2,
        path_residual,
        z: *z,
    })
}

/// Pure finite-difference derivative of order `ord` of h_m along axis `j`
/// at the cell `at`, step = one cell. None when the stencil leaves N.
fn fd_pure(
    ng: &NarrowGrid,
    f1: &AxisPseudometricField,
    f2: &AxisPseudometricField,
    m: usize,
    at: usize,
    j: usize,
    ord: usize,
) -> Option<f64> {
    let g = &ng.g;
    let (ci, cj) = (at % g.nx, at / g.nx);
    let mut acc = 0.0;
    for t in 0..=ord {
        let off = t as isize - (ord as isize) / 2;
        let (i, jj) = if j == 1 {
            (ci as isize + off, cj as isize)
        } else {
            (ci as isize, cj as isize + off)
        };
        if i < 0 || jj < 0 || i as usize >= g.nx || jj as usize >= g.ny {
            return None;
        }
        let idx = jj as usize * g.nx + i as usize;
        if !g.inside[idx] {
            return None;
        }
        let z = ng.cell_center(idx);
        let v = evaluate_h_m(ng, f1, f2, m, &z).ok()?.value;
        // centered-stencil binomial coefficients with alternating signs
        let sign = if (ord - t) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(ord, t) * v;
    }
    Some(acc / g.h.powi(ord as i32))
}

fn binomial(n: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for t in 0..k {
        r = r * (n - t) as f64 / (t + 1) as f64;
    }
    r
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|t| t as f64).product::<f64>().max(1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowingReport {
    /// Sum (diam Q_n)^alpha <= 8 (phi1(y) + phi2(y)).
    pub e1: bool,
    pub e1_lhs: f64,
    pub e1_rhs: f64,
    /// d_alpha(x, y) <= (12/alpha) Sum (diam Q_n)^alpha.
    pub e2: bool,
    pub e2_lhs: f64,
    pub e2_rhs: f64,
    /// Pure (m-1)-th derivatives: ~0 at x, (m-2)! phi_j near y.
    pub e3: bool,
    /// Mixed derivatives of total order <= m-1 vanish.
    pub e4: bool,
    pub failures: Vec<String>,
}

impl GrowingReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Search from `near` for a cell whose full pure stencils along both axes
/// stay in N.
fn stencil_cell(ng: &NarrowGrid, near: usize, ord: usize) -> Option<usize> {
    let g = &ng.g;
    let (ci, cj) = (near % g.nx, near / g.nx);
    let reach = (ord / 2 + 1) as isize;
    for ring in 0..=(4 * reach) {
        for dj in -ring..=ring {
            for di in -ring..=ring {
                if di.abs().max(dj.abs()) != ring {
                    continue;
                }
                let (i, j) = (ci as isize + di, cj as isize + dj);
                if i < reach || j < reach || i + reach >= g.nx as isize || j + reach >= g.ny as isize
                {
                    continue;
                }
                let ok = (-reach..=reach).all(|o| {
                    g.inside[(j as usize) * g.nx + (i + o) as usize]
                        && g.inside[((j + o) as usize) * g.nx + i as usize]
                });
                if ok {
                    return Some(j as usize * g.nx + i as usize);
                }
            }
        }
    }
    None
}

/// The paper inequalities E1, E2 and the derivative identities E3, E4 on
/// the assembled fields. `d_alpha_value` is the grid estimate of
/// d_alpha(x, y) on the ambient domain; `tol` is the multiplicative slack
/// for E1/E2.
pub fn growing_inequalities_report(
    chain: &NarrowChain,
    ng: &NarrowGrid,
    w: &NarrowWeight,
    f1: &AxisPseudometricField,
    f2: &AxisPseudometricField,
    m: usize,
    d_alpha_value: f64,
    tol: f64,
) -> GrowingReport {
    let alpha = (w.p - 2.0) / (w.p - 1.0);
    let mut failures = Vec::new();
    let sum_alpha: f64 = chain.squares.iter().map(|q| q.diam().powf(alpha)).sum();

    let e1_lhs = sum_alpha;
    let e1_rhs = 8.0 * (f1.phi[ng.sink] + f2.phi[ng.sink]);
    let e1 = e1_lhs <= e1_rhs * (1.0 + tol);
    if !e1 {
        failures.push(format!("E1: {e1_lhs} > 8(phi1+phi2)(y) = {e1_rhs}"));
    }

    let e2_lhs = d_alpha_value;
    let e2_rhs = (12.0 / alpha) * sum_alpha;
    let e2 = e2_lhs <= e2_rhs * (1.0 + tol);
    if !e2 {
        failures.push(format!("E2: d_alpha = {e2_lhs} > {e2_rhs}"));
    }

    let mut e3 = true;
    let mut e4 = true;
    if m >= 2 {
        let ord = m - 1;
        let fact = factorial(m.saturating_sub(2));
        let zero_tol = 2.0 * fact * w.w_max() * ng.g.h;
        for (label, near, expect_phi) in [
            ("x", ng.source, false),
            ("y", ng.sink, true),
        ] {
            let Some(at) = stencil_cell(ng, near, ord) else {
                e3 = false;
                failures.push(format!("E3: no stencil cell near {label}"));
                continue;
            };
            for (jf, j) in [(f1, 1usize), (f2, 2usize)] {
                let Some(fd) = fd_pure(ng, f1, f2, m, at, j, ord) else {
                    e3 = false;
                    failures.push(format!("E3: stencil left N near {label}"));
                    continue;
                };
                let want = fact * jf.phi[at];
                if expect_phi && want > zero_tol {
                    if (fd - want).abs() > 0.05 * want + zero_tol {
                        e3 = false;
                        failures.push(format!(
                            "E3: d^{ord} h_{m}/dz{j}^{ord} near {label} = {fd}, want {want}"
                        ));
                    }
                } else if !expect_phi && fd.abs() > zero_tol + 0.05 * want {
                    e3 = false;
                    failures.push(format!(
                        "E3: d^{ord} h_{m}/dz{j}^{ord} at {label} = {fd}, want ~0"
                    ));
                }
            }
            // E4: mixed second difference must vanish when m >= 3
            if m >= 3 {
                let g = &ng.g;
                let (ci, cj) = (at % g.nx, at / g.nx);
                let mut vals = Vec::new();
                for (sx, sy) in [(1i32, 1i32), (1, -1), (-1, 1), (-1, -1)] {
                    let i = ci as isize + sx as isize;
                    let j = cj as isize + sy as isize;
                    let idx = (j as usize) * g.nx + i as usize;
                    if !g.inside[idx] {
                        vals.clear();
                        break;
                    }
                    let z = ng.cell_center(idx);
                    match evaluate_h_m(ng, f1, f2, m, &z) {
                        Ok(ev) => vals.push((sx * sy) as f64 * ev.value),
                        Err(_) => {
                            vals.clear();
                            break;
                        }
                    }
                }
                if vals.len() == 4 {
                    let mixed = vals.iter().sum::<f64>() / (4.0 * g.h * g.h);
                    if mixed.abs() > 2.0 * w.w_max() {
                        e4 = false;
                        failures.push(format!("E4: mixed difference near {label} = {mixed}"));
                    }
                }
            }
        }
    }

    GrowingReport {
        e1,
        e1_lhs,
        e1_rhs,
        e2,
        e2_lhs,
        e2_rhs,
        e3,
        e4,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{PolygonDomain, DEFAULT_MAX_CELLS};
    use crate::metrics::d_alpha;
    use crate::narrow_path::build_narrow_chain;
    use crate::wide_path::{build_wide_chain, compute_connectors, compute_hats};

    fn chain_in_square(r: f64, y: Point) -> (PolygonDomain, NarrowChain) {
        let d = PolygonDomain::load(vec![
            Point::new(-r, -r),
            Point::new(r, -r),
            Point::new(r, r),
            Point::new(-r, r),
        ])
        .unwrap();
        let g = d.rasterize(r / 50.0, DEFAULT_MAX_CELLS).unwrap();
        let mut wide = build_wide_chain(&d, &g, &Point::new(0.0, 0.0), &y, 100).unwrap();
        compute_hats(&mut wide, &d).unwrap();
        compute_connectors(&mut wide, &d).unwrap();
        (d, build_narrow_chain(&wide).unwrap())
    }

    #[test]
    fn weight_arithmetic() {
        let (_, chain) = chain_in_square(0.25, Point::new(0.0, 0.0));
        // single square of diameter 0.5
        assert_eq!(chain.k(), 1);
        let w = narrow_weight(&chain, 4.0);
        assert!((w.weights[0] - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
        let w1 = narrow_weight(&chain, 3.0);
        assert!((w1.weights[0] - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn phi_single_square_closed_form() {
        let (_, chain) = chain_in_square(0.5, Point::new(0.0, 0.0));
        assert_eq!(chain.k(), 1);
        let w = narrow_weight(&chain, 4.0);
        let wv = w.weights[0];
        let ng = narrow_grid(&chain, Some(0.01), DEFAULT_MAX_CELLS).unwrap();
        let f1 = phi_field(&ng, &w, 1).unwrap();
        let f2 = phi_field(&ng, &w, 2).unwrap();
        // phi_j(x) = 0
        assert_eq!(f1.phi[ng.source], 0.0);
        assert_eq!(f2.phi[ng.source], 0.0);
        let src = ng.cell_center(ng.source);
        for t in [0.1, 0.25, 0.4] {
            let p = Point::new(src.x + t, src.y);
            let cell = ng.g.nearest_inside_cell(&p, 1).unwrap();
            let idx = ng.g.idx(cell.0, cell.1);
            let tt = (ng.cell_center(idx).x - src.x).abs();
            assert!(
                (f1.phi[idx] - tt * wv).abs() <= wv * ng.g.h + 1e-12,
                "phi1 at t={t}: {} vs {}",
                f1.phi[idx],
                tt * wv
            );
            // vertical moves are free for phi1
            assert!(f2.phi[idx] <= wv * ng.g.h + 1e-12 || f2.phi[idx] > 0.0);
        }
        // phi1 vanishes along the vertical line through x
        let p = Point::new(src.x, src.y + 0.3);
        let cell = ng.g.nearest_inside_cell(&p, 1).unwrap();
        assert_eq!(f1.phi[ng.g.idx(cell.0, cell.1)], 0.0);
    }

    #[test]
    fn h2_single_square_closed_form() {
        let (_, chain) = chain_in_square(0.5, Point::new(0.0, 0.0));
        let w = narrow_weight(&chain, 4.0);
        let wv = w.weights[0];
        let ng = narrow_grid(&chain, Some(0.005), DEFAULT_MAX_CELLS).unwrap();
        let f1 = phi_field(&ng, &w, 1).unwrap();
        let f2 = phi_field(&ng, &w, 2).unwrap();
        let src = ng.cell_center(ng.source);
        // h_m(x) = 0
        let at_src = evaluate_h_m(&ng, &f1, &f2, 2, &src).unwrap();
        assert_eq!(at_src.value, 0.0);
        for t in [0.2, 0.4] {
            let z = Point::new(src.x + t, src.y);
            let ev = evaluate_h_m(&ng, &f1, &f2, 2, &z).unwrap();
            let want = t * t / 2.0 * wv;
            assert!(
                (ev.value - want).abs() < 0.05 * want,
                "h2({t}) = {} want {want}",
                ev.value
            );
        }
    }

    type Pipeline = (
        PolygonDomain,
        NarrowChain,
        NarrowWeight,
        NarrowGrid,
        AxisPseudometricField,
        AxisPseudometricField,
    );

    fn u_pipeline() -> &'static Pipeline {
        static CACHE: std::sync::OnceLock<Pipeline> = std::sync::OnceLock::new();
        CACHE.get_or_init(|| {
            let d = PolygonDomain::load(vec![
            Point::new(0.0, 0.0),
            Point::new(5.0, 0.0),
            Point::new(5.0, 5.0),
            Point::new(4.0, 5.0),
            Point::new(4.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 5.0),
            Point::new(0.0, 5.0),
        ])
        .unwrap();
        let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
        let mut wide = build_wide_chain(
            &d,
            &g,
            &Point::new(0.5, 4.5),
            &Point::new(4.5, 4.5),
            10_000,
        )
        .unwrap();
        compute_hats(&mut wide, &d).unwrap();
        compute_connectors(&mut wide, &d).unwrap();
            let chain = build_narrow_chain(&wide).unwrap();
            let w = narrow_weight(&chain, 4.0);
            let ng = narrow_grid(&chain, None, DEFAULT_MAX_CELLS).unwrap();
            let f1 = phi_field(&ng, &w, 1).unwrap();
            let f2 = phi_field(&ng, &w, 2).unwrap();
            (d, chain, w, ng, f1, f2)
        })
    }

    #[test]
    fn u_domain_inequalities() {
        let (d, chain, w, ng, f1, f2) = u_pipeline();
        let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
        let alpha = (4.0 - 2.0) / (4.0 - 1.0);
        let da = d_alpha(d, &g, &chain.x, &chain.y, alpha).unwrap();
        for m in [2usize, 3] {
            let rep = growing_inequalities_report(chain, ng, w, f1, f2, m, da.value, 0.05);
            assert!(rep.all_pass(), "m={m} failures: {:?}", rep.failures);
        }
        // sabotage: zeroed weights break E1
        let mut wz = w.clone();
        for v in wz.weights.iter_mut() {
            *v = 0.0;
        }
        let f1z = phi_field(ng, &wz, 1).unwrap();
        let f2z = phi_field(ng, &wz, 2).unwrap();
        let rep = growing_inequalities_report(chain, ng, &wz, &f1z, &f2z, 2, da.value, 0.05);
        assert!(!rep.e1);
    }

    #[test]
    fn u_domain_path_independence() {
        let (_, chain, _, ng, f1, f2) = u_pipeline();
        // candidate points across the chain: wherever an L-shaped
        // alternative exists it must agree with the tree path
        let mut checked = 0usize;
        for q in &chain.squares {
            for z in [
                q.center,
                Point::new(q.center.x + 0.25 * q.radius, q.center.y - 0.25 * q.radius),
            ] {
                let Ok(ev) = evaluate_h_m(ng, f1, f2, 2, &z) else {
                    continue;
                };
                if let Some(res) = ev.path_residual {
                    checked += 1;
                    assert!(
                        res <= 1e-3 * ev.value.abs().max(1e-9),
                        "residual {res} vs value {} at {:?}",
                        ev.value,
                        z
                    );
                }
            }
        }
        assert!(checked >= 3, "only {checked} points had an L path");
    }
}
