//! Narrow chain: shrink the wide-chain squares S_1..S_k to Q_1..Q_k and
//! assemble the narrow path N = union of (Q_i union Y_i).

use serde::{Deserialize, Serialize};

use crate::domain::{GridField, PolygonDomain};
use crate::error::{Error, Result};
use crate::geom::{
    classify_squares, dist_axis_segments, dist_squares, tau_for, uniform_dist, Point, Segment,
    SetGeom, Square, SquareRelationTag,
};
use crate::wide_path::{Connector, WideChain};

/// The shrink budget derived from rotation guards: per rotation index m the
/// guard square H_m sits in S_{m+1} with the rotation point as a vertex, and
/// eps0 = 1/4 min over m of dist(H_m, S_{m+3}).  Infinite when the chain has
/// no rotation indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Eps0 {
    pub value: f64,
    /// (rotation index m, dist(H_m, S_{m+3})) for each guard.
    pub guards: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NarrowChain {
    pub squares: Vec<Square>,
    /// Inherited from the parent chain, one entry per interface.
    pub hats: Vec<Option<Square>>,
    /// Per interface: the hat at point interfaces, the open segment
    /// (s_i, t_i) otherwise.  Populated by `narrow_connectors`.
    pub connectors: Vec<Connector>,
    pub eps0: Eps0,
    /// Indices where the i-1/i+1 contact was ambiguous at tolerance scale.
    pub near_rotation_flags: Vec<usize>,
    pub parent: WideChain,
    pub x: Point,
    pub y: Point,
}

impl NarrowChain {
    pub fn k(&self) -> usize {
        self.squares.len()
    }

    pub fn scale(&self) -> f64 {
        self.parent.scale()
    }
}

/// Smallest square through `a` and `b` inside the closed box of `k`:
/// the exact span on the axis achieving the uniform distance, the other
/// interval slid to fit inside `k`.
fn square_through(k: &Square, a: &Point, b: &Point) -> Square {
    let dx = (a.x - b.x).abs();
    let dy = (a.y - b.y).abs();
    let d = dx.max(dy);
    let fit = |lo: f64, hi: f64, kmin: f64, kmax: f64| -> f64 {
        // least L with [L, L + d] inside [kmin, kmax] and containing [lo, hi]
        let _ = hi;
        kmin.max(lo.min(kmax - d))
    };
    let (x0, y0) = if dy >= dx {
        let y0 = a.y.min(b.y);
        let x0 = fit(a.x.min(b.x), a.x.max(b.x), k.xmin(), k.xmax());
        (x0, y0)
    } else {
        let x0 = a.x.min(b.x);
        let y0 = fit(a.y.min(b.y), a.y.max(b.y), k.ymin(), k.ymax());
        (x0, y0)
    };
    Square::new(Point::new(x0 + d / 2.0, y0 + d / 2.0), d / 2.0)
}

/// Move a touch-interface point into the open interface, at most
/// min(len/4, gap/4) from the minimizing position.
fn perturb_into_open(interface: &Segment, p: &Point, gap: f64, tol: f64) -> Point {
    let len = interface.uniform_len();
    if len <= tol {
        return *p;
    }
    let t = if (interface.b.x - interface.a.x).abs() > (interface.b.y - interface.a.y).abs() {
        (p.x - interface.a.x) / (interface.b.x - interface.a.x)
    } else {
        (p.y - interface.a.y) / (interface.b.y - interface.a.y)
    };
    let margin = ((len / 4.0).min(gap / 4.0) / len).min(0.5);
    interface.point_at(t.clamp(margin, 1.0 - margin))
}

/// The subsquare of `k` with vertex `a` and the given diameter.
fn corner_subsquare(k: &Square, a: &Point, diam: f64) -> Square {
    let sx = if k.center.x >= a.x { 1.0 } else { -1.0 };
    let sy = if k.center.y >= a.y { 1.0 } else { -1.0 };
    Square::new(
        Point::new(a.x + sx * diam / 2.0, a.y + sy * diam / 2.0),
        diam / 2.0,
    )
}

/// Shrink the middle square of a touching triple: K tilde inside k^cl still
/// touching k1 and k2, with diam <= 2 dist(k1, k2) when k1 and k2 have
/// disjoint closures and diam = eps when they share a single point.
/// Segment interfaces are preserved.
pub fn shrink_middle_square(k1: &Square, k: &Square, k2: &Square, eps: f64) -> Result<Square> {
    let scale = [k1, k, k2]
        .iter()
        .map(|s| s.radius.max(s.center.x.abs()).max(s.center.y.abs()))
        .fold(1.0f64, f64::max);
    let tol = tau_for(scale);
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolated("eps must be positive".into()));
    }
    let r1 = classify_squares(k1, k);
    let r2 = classify_squares(k2, k);
    if r1.tag != SquareRelationTag::Touching || r2.tag != SquareRelationTag::Touching {
        return Err(Error::PreconditionViolated(
            "middle square must touch both neighbors".into(),
        ));
    }
    let r12 = classify_squares(k1, k2);
    match r12.tag {
        SquareRelationTag::Overlapping | SquareRelationTag::Nested => Err(
            Error::PreconditionViolated("outer squares must be disjoint".into()),
        ),
        SquareRelationTag::Separated => {
            let i1 = r1.interface.unwrap();
            let i2 = r2.interface.unwrap();
            let (gap, a0, b0) = dist_axis_segments(&i1, &i2);
            let a = perturb_into_open(&i1, &a0, gap, tol);
            let b = perturb_into_open(&i2, &b0, gap, tol);
            Ok(square_through(k, &a, &b))
        }
        SquareRelationTag::Touching => {
            let iface = r12.interface.as_ref().unwrap();
            if iface.uniform_len() > 10.0 * tol {
                return Err(Error::PreconditionViolated(
                    "outer squares share a segment".into(),
                ));
            }
            // shared vertex: the rotation point, a common vertex of all three
            let a = iface.midpoint();
            let a = k
                .corners()
                .iter()
                .copied()
                .min_by(|p, q| {
                    uniform_dist(p, &a)
                        .partial_cmp(&uniform_dist(q, &a))
                        .unwrap()
                })
                .unwrap();
            if uniform_dist(&a, &iface.midpoint()) > 10.0 * tol {
                return Err(Error::PreconditionViolated(
                    "shared point is not a vertex of the middle square".into(),
                ));
            }
            if eps > k.diam() + tol {
                return Err(Error::PreconditionViolated(
                    "eps exceeds the middle square diameter".into(),
                ));
            }
            Ok(corner_subsquare(k, &a, eps.min(k.diam())))
        }
    }
}

/// Rotation guards and the resulting eps0.
pub fn compute_eps0(wide: &WideChain) -> Eps0 {
    let s = &wide.squares;
    let k = s.len();
    let mut guards = Vec::new();
    for m in 0..k.saturating_sub(3) {
        let rel = classify_squares(&s[m], &s[m + 2]);
        if rel.tag != SquareRelationTag::Touching {
            continue;
        }
        let a = rel.interface.as_ref().unwrap().midpoint();
        let hd = 0.25 * s[m].diam().min(s[m + 1].diam()).min(s[m + 2].diam());
        let h = corner_subsquare(&s[m + 1], &a, hd);
        guards.push((m, dist_squares(&h, &s[m + 3])));
    }
    let value = guards
        .iter()
        .map(|&(_, g)| g)
        .fold(f64::INFINITY, f64::min)
        * 0.25;
    Eps0 { value, guards }
}

/// The inductive shrink: Q_1 = S_1, then Q_{m+1} from the triple
/// (Q_m, S_{m+1}, S_{m+2}) with eps = 1/4 min of the three diameters and
/// eps0, and finally Q_k = S_k.
pub fn build_narrow_chain(wide: &WideChain) -> Result<NarrowChain> {
    let s = &wide.squares;
    let k = s.len();
    let tol = tau_for(wide.scale());
    let eps0 = compute_eps0(wide);
    let mut q = Vec::with_capacity(k);
    let mut flags = Vec::new();
    q.push(s[0]);
    for i in 1..k.saturating_sub(1) {
        let prev: Square = q[i - 1];
        let eps = 0.25
            * prev
                .diam()
                .min(s[i].diam())
                .min(s[i + 1].diam())
                .min(eps0.value);
        let rel = classify_squares(&prev, &s[i + 1]);
        let ambiguous = match rel.tag {
            SquareRelationTag::Separated => dist_squares(&prev, &s[i + 1]) <= 10.0 * tol,
            SquareRelationTag::Touching => {
                let len = rel.interface.as_ref().unwrap().uniform_len();
                len > tol && len <= 10.0 * tol
            }
            _ => false,
        };
        if ambiguous {
            flags.push(i);
        }
        q.push(shrink_middle_square(&prev, &s[i], &s[i + 1], eps)?);
    }
    if k >= 2 {
        q.push(s[k - 1]);
    }
    let mut chain = NarrowChain {
        squares: q,
        hats: wide.hats.clone(),
        connectors: Vec::new(),
        eps0,
        near_rotation_flags: flags,
        parent: wide.clone(),
        x: wide.x,
        y: wide.y,
    };
    narrow_connectors(&mut chain)?;
    Ok(chain)
}

/// Fill in the connectors Y_i: the hat at point interfaces, the open
/// segment (s_i, t_i) at segment interfaces.
pub fn narrow_connectors(chain: &mut NarrowChain) -> Result<()> {
    let tol = tau_for(chain.scale());
    let q = &chain.squares;
    let mut connectors = Vec::with_capacity(q.len().saturating_sub(1));
    for i in 0..q.len().saturating_sub(1) {
        let rel = classify_squares(&q[i], &q[i + 1]);
        if rel.tag != SquareRelationTag::Touching {
            return Err(Error::PreconditionViolated(format!(
                "squares {i} and {} do not touch",
                i + 1
            )));
        }
        let iface = rel.interface.unwrap();
        if iface.uniform_len() > tol {
            connectors.push(Connector::Open(iface));
        } else {
            let hat = chain
                .hats
                .get(i)
                .copied()
                .flatten()
                .ok_or_else(|| Error::PreconditionViolated(format!("missing hat at {i}")))?;
            if hat.diam() > 0.25 * q[i].diam().min(q[i + 1].diam()) + tol {
                return Err(Error::HatTooLarge(i));
            }
            connectors.push(Connector::Hat(hat));
        }
    }
    chain.connectors = connectors;
    Ok(())
}

fn connector_set(c: &Connector) -> SetGeom {
    match c {
        Connector::Hat(s) => SetGeom::Sq(*s),
        Connector::Open(seg) => SetGeom::Seg(*seg),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NarrowReport {
    /// Q_1 = S_1, Q_k = S_k, Q_i inside S_i, endpoints carried.
    pub endpoints: bool,
    pub pairwise_disjoint: bool,
    /// Consecutive closures meet; skip-one closures share at most a point;
    /// farther closures are disjoint.
    pub contact_pattern: bool,
    /// Point-vs-segment interface cardinality matches the parent chain.
    pub interface_cardinality: bool,
    /// diam Q_{i+1} <= 2 dist(Q_i, Q_{i+2}) away from rotations, and
    /// <= 1/4 min(diam Q_i, diam Q_{i+2}) at them.
    pub diam_bounds: bool,
    /// At rotations, Q_{i+1} stays clear of S_{i+3}.
    pub skip_disjoint: bool,
    /// diam Q_{i+1} <= 4 dist(Y_i, Y_{i+1}) and the endpoint analogues.
    pub connector_gaps: bool,
    /// Hats within 1/4 of neighbor diameters, clear of non-adjacent squares.
    pub hat_separation: bool,
    pub grid_connected: bool,
    /// The complement of N in the padded grid is connected.
    pub simply_connected: bool,
    /// Every narrow cell lies in the wide path.
    pub contained_in_wide: bool,
    pub failures: Vec<String>,
}

impl NarrowReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_narrow_invariants(
    chain: &NarrowChain,
    d: &PolygonDomain,
    g: &GridField,
) -> NarrowReport {
    let q = &chain.squares;
    let s = &chain.parent.squares;
    let k = q.len();
    let tol = tau_for(chain.scale());
    let mut failures = Vec::new();

    let mut endpoints = k == s.len() && !q.is_empty();
    if endpoints {
        endpoints &= uniform_dist(&q[0].center, &s[0].center) <= tol
            && (q[0].radius - s[0].radius).abs() <= tol;
        endpoints &= uniform_dist(&q[k - 1].center, &s[k - 1].center) <= tol
            && (q[k - 1].radius - s[k - 1].radius).abs() <= tol;
        endpoints &= uniform_dist(&q[0].center, &chain.x) <= tol;
        endpoints &= q[k - 1].closure_contains_tol(&chain.y, tol);
        for i in 0..k {
            // Q_i inside S_i
            endpoints &= uniform_dist(&q[i].center, &s[i].center) <= s[i].radius - q[i].radius + tol;
        }
    }
    if !endpoints {
        failures.push("endpoint or containment conditions fail".into());
    }

    let mut pairwise_disjoint = true;
    let mut contact_pattern = true;
    for i in 0..k {
        for j in (i + 1)..k {
            let rel = classify_squares(&q[i], &q[j]);
            match rel.tag {
                SquareRelationTag::Overlapping | SquareRelationTag::Nested => {
                    pairwise_disjoint = false;
                    failures.push(format!("squares {i} and {j} overlap"));
                }
                SquareRelationTag::Touching => {
                    let len = rel.interface.as_ref().unwrap().uniform_len();
                    if j == i + 2 && len > tol {
                        contact_pattern = false;
                        failures.push(format!("closures {i} and {j} share a segment"));
                    } else if j > i + 2 {
                        contact_pattern = false;
                        failures.push(format!("closures {i} and {j} meet"));
                    }
                }
                SquareRelationTag::Separated => {
                    if j == i + 1 {
                        contact_pattern = false;
                        failures.push(format!("consecutive squares {i} and {j} do not touch"));
                    }
                }
            }
        }
    }

    let mut interface_cardinality = true;
    for i in 0..k.saturating_sub(1) {
        let rq = classify_squares(&q[i], &q[i + 1]);
        let rs = classify_squares(&s[i], &s[i + 1]);
        let point_q = rq
            .interface
            .as_ref()
            .map(|f| f.uniform_len() <= tol)
            .unwrap_or(true);
        let point_s = rs
            .interface
            .as_ref()
            .map(|f| f.uniform_len() <= tol)
            .unwrap_or(true);
        if point_q != point_s {
            interface_cardinality = false;
            failures.push(format!("interface {i} changed cardinality"));
        }
    }

    let mut diam_bounds = true;
    let mut skip_disjoint = true;
    for i in 0..k.saturating_sub(2) {
        if chain.near_rotation_flags.contains(&(i + 1)) {
            continue;
        }
        let rel = classify_squares(&q[i], &s[i + 2]);
        if rel.tag == SquareRelationTag::Separated {
            let bound = 2.0 * dist_squares(&q[i], &q[i + 2]);
            if q[i + 1].diam() > bound + tol {
                diam_bounds = false;
                failures.push(format!(
                    "diam Q_{} = {} exceeds 2 dist = {}",
                    i + 1,
                    q[i + 1].diam(),
                    bound
                ));
            }
        } else {
            let bound = 0.25 * q[i].diam().min(q[i + 2].diam());
            if q[i + 1].diam() > bound + tol {
                diam_bounds = false;
                failures.push(format!(
                    "diam Q_{} = {} exceeds quarter bound = {}",
                    i + 1,
                    q[i + 1].diam(),
                    bound
                ));
            }
            if i + 3 < k && dist_squares(&q[i + 1], &s[i + 3]) <= tol {
                skip_disjoint = false;
                failures.push(format!("Q_{} reaches S_{}", i + 1, i + 3));
            }
        }
    }

    let mut connector_gaps = true;
    let ys: Vec<SetGeom> = chain.connectors.iter().map(connector_set).collect();
    if ys.len() == k.saturating_sub(1) && k >= 2 {
        for i in 0..k - 2 {
            let rel = classify_squares(&q[i], &s[i + 2]);
            if rel.tag != SquareRelationTag::Separated {
                continue;
            }
            let gap = ys[i].dist_to(&ys[i + 1]);
            if q[i + 1].diam() > 4.0 * gap + tol {
                connector_gaps = false;
                failures.push(format!(
                    "diam Q_{} = {} exceeds 4 dist(Y_{i}, Y_{}) = {}",
                    i + 1,
                    q[i + 1].diam(),
                    i + 1,
                    4.0 * gap
                ));
            }
        }
        if q[0].diam() > 4.0 * ys[0].dist_to_point(&chain.x) + tol {
            connector_gaps = false;
            failures.push("diam Q_1 exceeds 4 dist(x, Y_1)".into());
        }
        if q[k - 1].diam() > 4.0 * ys[k - 2].dist_to_point(&chain.y) + tol {
            connector_gaps = false;
            failures.push("diam Q_k exceeds 4 dist(y, Y_{k-1})".into());
        }
    }

    let mut hat_separation = true;
    for (i, hat) in chain.hats.iter().enumerate() {
        let Some(hat) = hat else { continue };
        if hat.diam() > 0.25 * q[i].diam().min(q[i + 1].diam()) + tol {
            hat_separation = false;
            failures.push(format!("hat {i} too large for its neighbors"));
        }
        for (j, qj) in q.iter().enumerate() {
            if j == i || j == i + 1 {
                continue;
            }
            if dist_squares(hat, qj) <= tol {
                hat_separation = false;
                failures.push(format!("hat {i} meets Q_{j}"));
            }
        }
    }

    // rasterized narrow path, dilated by half a cell so that squares below
    // the grid resolution still leave a cell trace
    let n_cells = g.nx * g.ny;
    let reach = 0.5 * g.h;
    let mut mask = vec![false; n_cells];
    for idx in 0..n_cells {
        let c = g.cell_center(idx % g.nx, idx / g.nx);
        let in_q = q.iter().any(|sq| sq.dist_to_point(&c) <= reach);
        let in_hat = chain
            .connectors
            .iter()
            .any(|y| matches!(y, Connector::Hat(hs) if hs.dist_to_point(&c) <= reach));
        mask[idx] = in_q || in_hat;
    }
    let bfs = |start: usize, keep: &dyn Fn(usize) -> bool| -> usize {
        let mut seen = vec![false; n_cells];
        let mut queue = std::collections::VecDeque::new();
        seen[start] = true;
        queue.push_back(start);
        let mut count = 1usize;
        while let Some(idx) = queue.pop_front() {
            let (i, j) = (idx % g.nx, idx / g.nx);
            let mut push = |ni: usize, nj: usize| {
                let nidx = nj * g.nx + ni;
                if !seen[nidx] && keep(nidx) {
                    seen[nidx] = true;
                    count += 1;
                    queue.push_back(nidx);
                }
            };
            if i > 0 {
                push(i - 1, j);
            }
            if i + 1 < g.nx {
                push(i + 1, j);
            }
            if j > 0 {
                push(i, j - 1);
            }
            if j + 1 < g.ny {
                push(i, j + 1);
            }
        }
        count
    };
    let total_in = mask.iter().filter(|&&b| b).count();
    let grid_connected = match mask.iter().position(|&b| b) {
        Some(start) => bfs(start, &|idx| mask[idx]) == total_in,
        None => false,
    };
    if !grid_connected {
        failures.push("narrow path not grid-connected".into());
    }
    let total_out = n_cells - total_in;
    let simply_connected = match mask.iter().position(|&b| !b) {
        Some(start) => bfs(start, &|idx| !mask[idx]) == total_out,
        None => true,
    };
    if !simply_connected {
        failures.push("narrow path complement disconnected".into());
    }
    let mut contained_in_wide = true;
    for idx in 0..n_cells {
        if !mask[idx] {
            continue;
        }
        let c = g.cell_center(idx % g.nx, idx / g.nx);
        let in_wide = s.iter().any(|sq| sq.dist_to_point(&c) <= reach + tol)
            || chain
                .parent
                .hats
                .iter()
                .flatten()
                .any(|hs| hs.dist_to_point(&c) <= reach + tol);
        if !in_wide {
            contained_in_wide = false;
            failures.push("narrow cell escapes the wide path".into());
            break;
        }
    }
    let _ = d;

    NarrowReport {
        endpoints,
        pairwise_disjoint,
        contact_pattern,
        interface_cardinality,
        diam_bounds,
        skip_disjoint,
        connector_gaps,
        hat_separation,
        grid_connected,
        simply_connected,
        contained_in_wide,
        failures,
    }
}
