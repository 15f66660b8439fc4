//! The simply connected domain: polygon ingestion, membership, uniform-norm
//! boundary distance, maximal inscribed squares, rasterization and the
//! connectivity queries used by the separation machinery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{
    dist_point_segment_inf, dist_segment_square, tau_for, uniform_dist, Point, Segment, Square,
};

pub const DEFAULT_MAX_CELLS: usize = 4_000_000;

/// Bounded simply connected domain given by a simple polygon (CCW).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonDomain {
    vertices: Vec<Point>,
    bbox: (Point, Point),
}

/// Serialized form of a domain file: `{"vertices": [[x, y], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct DomainFile {
    pub vertices: Vec<[f64; 2]>,
}

impl PolygonDomain {
    /// Validate a vertex list and normalize orientation to counterclockwise.
    pub fn load(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::TooFewVertices(vertices.len()));
        }
        for v in &vertices {
            if !v.is_finite() {
                return Err(Error::Degenerate("non-finite vertex".into()));
            }
        }
        let n = vertices.len();
        let scale = vertices
            .iter()
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0f64, f64::max);
        let tol = tau_for(scale);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if uniform_dist(&a, &b) <= tol {
                return Err(Error::Degenerate(format!("zero-length edge at {i}")));
            }
        }
        // spikes: consecutive edges folding back over each other
        for i in 0..n {
            let p = vertices[i];
            let q = vertices[(i + 1) % n];
            let r = vertices[(i + 2) % n];
            let cross = (q.x - p.x) * (r.y - q.y) - (q.y - p.y) * (r.x - q.x);
            let dot = (q.x - p.x) * (r.x - q.x) + (q.y - p.y) * (r.y - q.y);
            if cross.abs() <= tol * scale.max(1.0) && dot < 0.0 {
                return Err(Error::Degenerate(format!("spike at vertex {}", (i + 1) % n)));
            }
        }
        // simplicity: O(n^2) pairwise edge test
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let e1 = Segment::new(vertices[i], vertices[(i + 1) % n]);
                let e2 = Segment::new(vertices[j], vertices[(j + 1) % n]);
                if adjacent {
                    if edges_overlap_beyond_endpoint(&e1, &e2, tol) {
                        return Err(Error::NotSimple(i, j));
                    }
                } else if segments_intersect(&e1, &e2, tol) {
                    return Err(Error::NotSimple(i, j));
                }
            }
        }
        let mut vertices = vertices;
        if signed_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        let bbox = bbox_of(&vertices);
        Ok(PolygonDomain { vertices, bbox })
    }

    pub fn from_file_vertices(raw: &[[f64; 2]]) -> Result<Self> {
        Self::load(raw.iter().map(|v| Point::new(v[0], v[1])).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn to_file(&self) -> DomainFile {
        DomainFile {
            vertices: self.vertices.iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    pub fn bbox(&self) -> (Point, Point) {
        self.bbox
    }

    pub fn bbox_diag(&self) -> f64 {
        self.bbox.0.euclid_dist(&self.bbox.1)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| Segment::new(self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Membership in the open interior; boundary points count as outside.
    pub fn contains(&self, p: &Point) -> bool {
        let scale = self.bbox.1.x.abs().max(self.bbox.1.y.abs()).max(1.0);
        if self.boundary_distance(p) <= 1e-12 * scale {
            return false;
        }
        let mut inside = false;
        let n = self.vertices.len();
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            if (a.y > p.y) != (b.y > p.y) {
                let xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < xint {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Uniform-norm distance to the polygon boundary (defined everywhere).
    pub fn boundary_distance(&self, p: &Point) -> f64 {
        self.edges()
            .map(|e| dist_point_segment_inf(p, &e))
            .fold(f64::INFINITY, f64::min)
    }

    /// The maximal square in the domain centered at `c`: radius equals the
    /// uniform boundary distance of the center.
    pub fn max_inscribed_square(&self, c: &Point) -> Result<Square> {
        if !self.contains(c) {
            return Err(Error::PointOutside(c.x, c.y));
        }
        Ok(Square::new(*c, self.boundary_distance(c)))
    }

    /// Rasterize onto a grid of cell size `h` covering the bbox padded by `h`.
    pub fn rasterize(&self, h: f64, max_cells: usize) -> Result<GridField> {
        assert!(h > 0.0 && h.is_finite());
        let origin = Point::new(self.bbox.0.x - h, self.bbox.0.y - h);
        let w = self.bbox.1.x - self.bbox.0.x + 2.0 * h;
        let hgt = self.bbox.1.y - self.bbox.0.y + 2.0 * h;
        let nx = (w / h).ceil() as usize;
        let ny = (hgt / h).ceil() as usize;
        if nx.saturating_mul(ny) > max_cells {
            return Err(Error::GridTooLarge(nx * ny, max_cells));
        }
        let mut inside = vec![false; nx * ny];
        let mut bdist = vec![0.0f64; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let c = Point::new(
                    origin.x + (i as f64 + 0.5) * h,
                    origin.y + (j as f64 + 0.5) * h,
                );
                let idx = j * nx + i;
                bdist[idx] = self.boundary_distance(&c);
                inside[idx] = self.contains(&c);
            }
        }
        Ok(GridField {
            origin,
            h,
            nx,
            ny,
            inside,
            bdist,
        })
    }
}

fn signed_area(v: &[Point]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

fn bbox_of(v: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in v {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

fn orient(a: &Point, b: &Point, c: &Point) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Closed segment intersection test with tolerance.
fn segments_intersect(s1: &Segment, s2: &Segment, tol: f64) -> bool {
    let d1 = orient(&s2.a, &s2.b, &s1.a);
    let d2 = orient(&s2.a, &s2.b, &s1.b);
    let d3 = orient(&s1.a, &s1.b, &s2.a);
    let d4 = orient(&s1.a, &s1.b, &s2.b);
    if ((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol))
        && ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))
    {
        return true;
    }
    // endpoint / collinear contacts
    dist_point_segment_inf(&s1.a, s2) <= tol
        || dist_point_segment_inf(&s1.b, s2) <= tol
        || dist_point_segment_inf(&s2.a, s1) <= tol
        || dist_point_segment_inf(&s2.b, s1) <= tol
}

/// For adjacent polygon edges sharing one endpoint: do they overlap anywhere
/// beyond the shared point?
fn edges_overlap_beyond_endpoint(e1: &Segment, e2: &Segment, tol: f64) -> bool {
    // identify the shared endpoint
    let pairs = [
        (e1.a, e1.b, e2.a, e2.b),
        (e1.a, e1.b, e2.b, e2.a),
        (e1.b, e1.a, e2.a, e2.b),
        (e1.b, e1.a, e2.b, e2.a),
    ];
    for (shared1, other1, shared2, other2) in pairs {
        if uniform_dist(&shared1, &shared2) <= tol {
            // check the far endpoints against the other edge
            return dist_point_segment_inf(&other1, &Segment::new(shared2, other2)) <= tol
                || dist_point_segment_inf(&other2, &Segment::new(shared1, other1)) <= tol;
        }
    }
    false
}

/// Discretization of the domain: per-cell interior flag and uniform boundary
/// distance at cell centers.
#[derive(Debug, Clone)]
pub struct GridField {
    pub origin: Point,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub inside: Vec<bool>,
    pub bdist: Vec<f64>,
}

impl GridField {
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    /// Cell containing the point, if within the grid extent.
    pub fn cell_of(&self, p: &Point) -> Option<(usize, usize)> {
        let fx = (p.x - self.origin.x) / self.h;
        let fy = (p.y - self.origin.y) / self.h;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let i = fx.floor() as usize;
        let j = fy.floor() as usize;
        if i >= self.nx || j >= self.ny {
            None
        } else {
            Some((i, j))
        }
    }

    /// Cell of `p`, or the nearest inside cell within a few rings of it.
    pub fn nearest_inside_cell(&self, p: &Point, max_ring: usize) -> Option<(usize, usize)> {
        let (ci, cj) = self.cell_of(p)?;
        if self.inside[self.idx(ci, cj)] {
            return Some((ci, cj));
        }
        for ring in 1..=max_ring {
            let r = ring as isize;
            let mut best: Option<((usize, usize), f64)> = None;
            for dj in -r..=r {
                for di in -r..=r {
                    if di.abs() != r && dj.abs() != r {
                        continue;
                    }
                    let i = ci as isize + di;
                    let j = cj as isize + dj;
                    if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
                        continue;
                    }
                    let (i, j) = (i as usize, j as usize);
                    if self.inside[self.idx(i, j)] {
                        let d = uniform_dist(p, &self.cell_center(i, j));
                        if best.map_or(true, |(_, bd)| d < bd) {
                            best = Some(((i, j), d));
                        }
                    }
                }
            }
            if let Some((cell, _)) = best {
                return Some(cell);
            }
        }
        None
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|b| **b).count()
    }
}

/// Flood-fill component labels of inside cells avoiding a set of closed
/// squares (4-connectivity). Labels are assigned in row-major discovery order.
#[derive(Debug, Clone)]
pub struct ComponentLabeling {
    pub labels: Vec<Option<u32>>,
    pub n_components: u32,
    pub h: f64,
}

impl ComponentLabeling {
    pub fn label_of_cell(&self, g: &GridField, cell: (usize, usize)) -> Option<u32> {
        self.labels[g.idx(cell.0, cell.1)]
    }
}

/// Label the inside cells whose centers avoid the closures of `excluded`.
pub fn components_excluding(g: &GridField, excluded: &[Square]) -> ComponentLabeling {
    let mut labels: Vec<Option<u32>> = vec![None; g.nx * g.ny];
    let admissible = |i: usize, j: usize| -> bool {
        let idx = g.idx(i, j);
        if !g.inside[idx] {
            return false;
        }
        let c = g.cell_center(i, j);
        !excluded.iter().any(|q| q.closure_contains(&c))
    };
    let mut next = 0u32;
    let mut queue = std::collections::VecDeque::new();
    for j in 0..g.ny {
        for i in 0..g.nx {
            if labels[g.idx(i, j)].is_some() || !admissible(i, j) {
                continue;
            }
            let lab = next;
            next += 1;
            labels[g.idx(i, j)] = Some(lab);
            queue.push_back((i, j));
            while let Some((ci, cj)) = queue.pop_front() {
                let neigh = [
                    (ci.wrapping_sub(1), cj),
                    (ci + 1, cj),
                    (ci, cj.wrapping_sub(1)),
                    (ci, cj + 1),
                ];
                for (ni, nj) in neigh {
                    if ni >= g.nx || nj >= g.ny {
                        continue;
                    }
                    if labels[g.idx(ni, nj)].is_none() && admissible(ni, nj) {
                        labels[g.idx(ni, nj)] = Some(lab);
                        queue.push_back((ni, nj));
                    }
                }
            }
        }
    }
    ComponentLabeling {
        labels,
        n_components: next,
        h: g.h,
    }
}

/// Spec'd entry point: components of the inside cells minus one closed square.
pub fn components_minus_square(g: &GridField, q: &Square) -> ComponentLabeling {
    components_excluding(g, std::slice::from_ref(q))
}

/// Maximal open arcs of a square boundary lying in the domain, ordered by
/// perimeter parameter from a base point on the square-and-domain boundary.
#[derive(Debug, Clone)]
pub struct BoundaryArcs {
    pub host: Square,
    pub base: Point,
    base_param: f64,
    /// Intervals `(begin, end)` in perimeter length from the base.
    pub arcs: Vec<(f64, f64)>,
}

impl BoundaryArcs {
    pub fn point_at(&self, rel: f64) -> Point {
        self.host.boundary_point_at(self.base_param + rel)
    }

    pub fn perimeter(&self) -> f64 {
        8.0 * self.host.radius
    }
}

/// Intersections of an axis-parallel side with an arbitrary segment, as
/// parameters on the side ('t' along a->b). Collinear overlaps contribute
/// their endpoints.
fn side_edge_params(side: &Segment, edge: &Segment, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let horizontal = (side.a.y - side.b.y).abs() <= tol;
    let (s0, s1, fixed, e0, e1, f0, f1) = if horizontal {
        (
            side.a.x, side.b.x, side.a.y, edge.a.x, edge.b.x, edge.a.y, edge.b.y,
        )
    } else {
        (
            side.a.y, side.b.y, side.a.x, edge.a.y, edge.b.y, edge.a.x, edge.b.x,
        )
    };
    let len = s1 - s0;
    if len.abs() <= tol {
        return out;
    }
    let to_t = |coord: f64| (coord - s0) / len;
    if (f0 - fixed).abs() <= tol && (f1 - fixed).abs() <= tol {
        // collinear: overlap endpoints
        for coord in [e0, e1] {
            let t = to_t(coord);
            if (-1e-9..=1.0 + 1e-9).contains(&t) {
                out.push(t.clamp(0.0, 1.0));
            }
        }
    } else if (f0 - fixed) * (f1 - fixed) <= 0.0 && (f0 - f1).abs() > tol {
        let u = (fixed - f0) / (f1 - f0);
        let coord = e0 + u * (e1 - e0);
        let t = to_t(coord);
        if (-1e-9..=1.0 + 1e-9).contains(&t) {
            out.push(t.clamp(0.0, 1.0));
        }
    }
    out
}

/// Compute the maximal open arcs of `∂s ∩ Ω`, ordered from `base`.
pub fn boundary_arcs(d: &PolygonDomain, s: &Square, base: &Point) -> Result<BoundaryArcs> {
    let tol = tau_for(s.radius.max(s.center.x.abs()).max(s.center.y.abs()));
    if d.boundary_distance(&s.center) < s.radius - tol {
        return Err(Error::PreconditionViolated(
            "square is not contained in the domain".into(),
        ));
    }
    let contact = d
        .edges()
        .map(|e| dist_segment_square(&e, s))
        .fold(f64::INFINITY, f64::min);
    if contact > tol {
        return Err(Error::NoBoundaryContact);
    }
    if d.boundary_distance(base) > tol || s.dist_to_point(base) > tol {
        return Err(Error::BasePointInvalid);
    }
    let base_param = s.boundary_param_of(base);
    let per = 8.0 * s.radius;
    // split parameters, relative to the base
    let mut cuts: Vec<f64> = vec![0.0, per];
    for corner_t in [0.0, 2.0 * s.radius, 4.0 * s.radius, 6.0 * s.radius] {
        cuts.push((corner_t - base_param).rem_euclid(per));
    }
    let sides = s.sides();
    for side in &sides {
        for e in d.edges() {
            for t in side_edge_params(side, &e, tol) {
                let p = side.point_at(t);
                let abs = s.boundary_param_of(&p);
                cuts.push((abs - base_param).rem_euclid(per));
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    // classify each sub-interval by its midpoint and merge runs in Omega
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= tol {
            continue;
        }
        let mid = s.boundary_point_at(base_param + 0.5 * (t0 + t1));
        // strictly inside: sub-intervals lying on the domain boundary are
        // not part of the open arcs
        if d.contains(&mid) && d.boundary_distance(&mid) > tol {
            if let Some(last) = arcs.last_mut() {
                // merge only across cut points interior to Omega
                let joint = s.boundary_point_at(base_param + t0);
                if (last.1 - t0).abs() <= tol && d.boundary_distance(&joint) > tol {
                    last.1 = t1;
                    continue;
                }
            }
            arcs.push((t0, t1));
        }
    }
    Ok(BoundaryArcs {
        host: *s,
        base: *base,
        base_param,
        arcs,
    })
}
