//! Axis-aligned square, segment and point primitives under the uniform norm.
//!
//! All distances between points, sets and square "radii" are measured in the
//! max norm; Euclidean length is used only for arclength integrals elsewhere.

use serde::{Deserialize, Serialize};

/// Relative tolerance base for codimension-1 predicates (touching contacts).
pub const TAU_GEOM: f64 = 1e-9;

/// Tolerance scaled to the magnitude of the inputs involved in a predicate.
pub fn tau_for(scale: f64) -> f64 {
    TAU_GEOM * scale.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        Point::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }

    pub fn euclid_dist(&self, other: &Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }
}

/// Uniform (max) norm distance between two points.
pub fn uniform_dist(a: &Point, b: &Point) -> f64 {
    (a.x - b.x).abs().max((a.y - b.y).abs())
}

/// Open axis-aligned square given by center and "radius" (half side length).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Square {
    pub center: Point,
    pub radius: f64,
}

impl Square {
    pub fn new(center: Point, radius: f64) -> Self {
        assert!(radius > 0.0, "square radius must be positive");
        assert!(center.is_finite());
        Square { center, radius }
    }

    pub fn diam(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn xmin(&self) -> f64 {
        self.center.x - self.radius
    }
    pub fn xmax(&self) -> f64 {
        self.center.x + self.radius
    }
    pub fn ymin(&self) -> f64 {
        self.center.y - self.radius
    }
    pub fn ymax(&self) -> f64 {
        self.center.y + self.radius
    }

    /// Membership in the open square.
    pub fn contains(&self, p: &Point) -> bool {
        uniform_dist(&self.center, p) < self.radius
    }

    /// Membership in the closed square.
    pub fn closure_contains(&self, p: &Point) -> bool {
        uniform_dist(&self.center, p) <= self.radius
    }

    pub fn closure_contains_tol(&self, p: &Point, tol: f64) -> bool {
        uniform_dist(&self.center, p) <= self.radius + tol
    }

    /// Uniform distance from a point to the closed square (0 inside).
    pub fn dist_to_point(&self, p: &Point) -> f64 {
        let gx = ((p.x - self.center.x).abs() - self.radius).max(0.0);
        let gy = ((p.y - self.center.y).abs() - self.radius).max(0.0);
        gx.max(gy)
    }

    /// Corners in counterclockwise order starting from the bottom-left.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin(), self.ymin()),
            Point::new(self.xmax(), self.ymin()),
            Point::new(self.xmax(), self.ymax()),
            Point::new(self.xmin(), self.ymax()),
        ]
    }

    /// The four sides as closed segments.
    pub fn sides(&self) -> [Segment; 4] {
        let c = self.corners();
        [
            Segment::new(c[0], c[1]),
            Segment::new(c[1], c[2]),
            Segment::new(c[2], c[3]),
            Segment::new(c[3], c[0]),
        ]
    }

    /// Dilation about the center by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Square {
        Square::new(self.center, self.radius * lambda)
    }

    /// Point on the boundary at perimeter parameter `t` in `[0, 8r)`,
    /// measured from the bottom-left corner: bottom side left-to-right, then
    /// right side upward, top side right-to-left, left side downward.
    pub fn boundary_point_at(&self, t: f64) -> Point {
        let r = self.radius;
        let side = 2.0 * r;
        let t = t.rem_euclid(8.0 * r);
        if t < side {
            Point::new(self.xmin() + t, self.ymin())
        } else if t < 2.0 * side {
            Point::new(self.xmax(), self.ymin() + (t - side))
        } else if t < 3.0 * side {
            Point::new(self.xmax() - (t - 2.0 * side), self.ymax())
        } else {
            Point::new(self.xmin(), self.ymax() - (t - 3.0 * side))
        }
    }

    /// Perimeter parameter of a point lying on the boundary (within
    /// tolerance); the point is projected onto the nearest side.
    pub fn boundary_param_of(&self, p: &Point) -> f64 {
        let r = self.radius;
        let side = 2.0 * r;
        // distance to each side line, pick nearest
        let d_top = (p.y - self.ymax()).abs();
        let d_right = (p.x - self.xmax()).abs();
        let d_bottom = (p.y - self.ymin()).abs();
        let d_left = (p.x - self.xmin()).abs();
        let cx = p.x.clamp(self.xmin(), self.xmax());
        let cy = p.y.clamp(self.ymin(), self.ymax());
        let mut best = (d_bottom, cx - self.xmin());
        if d_right < best.0 {
            best = (d_right, side + (cy - self.ymin()));
        }
        if d_top < best.0 {
            best = (d_top, 2.0 * side + (self.xmax() - cx));
        }
        if d_left < best.0 {
            best = (d_left, 3.0 * side + (self.ymax() - cy));
        }
        best.1.rem_euclid(8.0 * r)
    }
}

/// Closed line segment; `a == b` degenerates to a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub fn new(a: Point, b: Point) -> Self {
        Segment { a, b }
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.a.lerp(&self.b, t)
    }

    pub fn midpoint(&self) -> Point {
        self.point_at(0.5)
    }

    pub fn uniform_len(&self) -> f64 {
        uniform_dist(&self.a, &self.b)
    }

    pub fn euclid_len(&self) -> f64 {
        self.a.euclid_dist(&self.b)
    }

    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.uniform_len() <= tol
    }

    pub fn is_axis_parallel(&self, tol: f64) -> bool {
        (self.a.x - self.b.x).abs() <= tol || (self.a.y - self.b.y).abs() <= tol
    }
}

/// Mutual position of two squares per the touching/nesting predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SquareRelationTag {
    Nested,
    Overlapping,
    Touching,
    Separated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquareRelation {
    pub tag: SquareRelationTag,
    /// Contact set for touching squares: a segment, possibly degenerate.
    pub interface: Option<Segment>,
    /// Contact point on `[c1, c2]` for touching squares.
    pub contact: Option<Point>,
}

/// Classify the mutual position of two open squares.
///
/// Touching holds iff `||c1 - c2|| = r1 + r2` within tolerance; the contact
/// point on the center segment is `A = alpha*c1 + (1-alpha)*c2` with
/// `alpha = r2/(r1+r2)`.
pub fn classify_squares(s1: &Square, s2: &Square) -> SquareRelation {
    let d = uniform_dist(&s1.center, &s2.center);
    let rsum = s1.radius + s2.radius;
    let scale = rsum
        .max(s1.center.x.abs().max(s1.center.y.abs()))
        .max(s2.center.x.abs().max(s2.center.y.abs()));
    let tol = tau_for(scale);
    if (d - rsum).abs() <= tol {
        let interface = touch_interface(s1, s2);
        let alpha = s2.radius / rsum;
        let contact = Point::new(
            alpha * s1.center.x + (1.0 - alpha) * s2.center.x,
            alpha * s1.center.y + (1.0 - alpha) * s2.center.y,
        );
        SquareRelation {
            tag: SquareRelationTag::Touching,
            interface: Some(interface),
            contact: Some(contact),
        }
    } else if d <= (s1.radius - s2.radius).abs() {
        SquareRelation {
            tag: SquareRelationTag::Nested,
            interface: None,
            contact: None,
        }
    } else if d < rsum {
        SquareRelation {
            tag: SquareRelationTag::Overlapping,
            interface: None,
            contact: None,
        }
    } else {
        SquareRelation {
            tag: SquareRelationTag::Separated,
            interface: None,
            contact: None,
        }
    }
}

/// Intersection of the two closed boxes, valid when the squares touch.
/// The result is a segment (possibly degenerate to a point).
fn touch_interface(s1: &Square, s2: &Square) -> Segment {
    let x0 = s1.xmin().max(s2.xmin());
    let x1 = s1.xmax().min(s2.xmax());
    let y0 = s1.ymin().max(s2.ymin());
    let y1 = s1.ymax().min(s2.ymax());
    // one of the two extents collapses for touching squares; keep both ends
    // clamped to the common box either way
    Segment::new(
        Point::new(x0.min(x1), y0.min(y1)),
        Point::new(x0.max(x1), y0.max(y1)),
    )
}

/// Exact uniform-norm distance from a point to a closed segment.
///
/// The objective `t -> max(|u(t)|, |v(t)|)` is piecewise linear, so the
/// minimum is attained at an endpoint or at a breakpoint where a component
/// vanishes or the two components cross.
pub fn dist_point_segment_inf(p: &Point, s: &Segment) -> f64 {
    // u(t) = p.x - (a.x + t dx), v(t) = p.y - (a.y + t dy)
    let dx = s.b.x - s.a.x;
    let dy = s.b.y - s.a.y;
    let u0 = p.x - s.a.x;
    let v0 = p.y - s.a.y;
    let mut candidates = [0.0f64, 1.0, 0.0, 0.0, 0.0, 0.0];
    let mut n = 2usize;
    let push_root = |num: f64, den: f64, buf: &mut [f64; 6], n: &mut usize| {
        if den.abs() > 0.0 {
            let t = num / den;
            if t > 0.0 && t < 1.0 {
                buf[*n] = t;
                *n += 1;
            }
        }
    };
    // u(t) = 0, v(t) = 0
    push_root(u0, dx, &mut candidates, &mut n);
    push_root(v0, dy, &mut candidates, &mut n);
    // u = v, u = -v (sign crossings of the max)
    push_root(u0 - v0, dx - dy, &mut candidates, &mut n);
    push_root(u0 + v0, dx + dy, &mut candidates, &mut n);
    candidates[..n]
        .iter()
        .map(|&t| {
            let q = s.point_at(t);
            uniform_dist(p, &q)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Uniform-norm distance between two closed squares (0 if they intersect
/// or touch): the max of the per-axis interval gaps.
pub fn dist_squares(s1: &Square, s2: &Square) -> f64 {
    let gx = ((s1.center.x - s2.center.x).abs() - (s1.radius + s2.radius)).max(0.0);
    let gy = ((s1.center.y - s2.center.y).abs() - (s1.radius + s2.radius)).max(0.0);
    gx.max(gy)
}

/// Uniform-norm distance from a closed segment to a closed square.
///
/// `t -> max(gap_x(t), gap_y(t))` is piecewise linear in the segment
/// parameter; minimize over endpoints and breakpoints.
pub fn dist_segment_square(s: &Segment, q: &Square) -> f64 {
    let dx = s.b.x - s.a.x;
    let dy = s.b.y - s.a.y;
    let mut candidates = vec![0.0, 1.0];
    let mut push_root = |num: f64, den: f64| {
        if den.abs() > 0.0 {
            let t = num / den;
            if t > 0.0 && t < 1.0 {
                candidates.push(t);
            }
        }
    };
    // kinks of |sx - cx|: sx = cx; zeros of gap_x: sx = cx +- r; same for y
    for off in [-q.radius, 0.0, q.radius] {
        push_root(q.center.x + off - s.a.x, dx);
        push_root(q.center.y + off - s.a.y, dy);
    }
    // crossings gap_x = gap_y in each sign combination
    for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
        // sx*(x(t)-cx) = sy*(y(t)-cy)
        push_root(
            sy * (s.a.y - q.center.y) - sx * (s.a.x - q.center.x),
            sx * dx - sy * dy,
        );
    }
    candidates
        .into_iter()
        .map(|t| q.dist_to_point(&s.point_at(t)))
        .fold(f64::INFINITY, f64::min)
}

/// Uniform-norm distance between two closed axis-parallel segments, with a
/// minimizing pair of points. Both segments must be axis-parallel (or
/// degenerate); this is the only case arising between sides of axis-aligned
/// squares.
pub fn dist_axis_segments(s1: &Segment, s2: &Segment) -> (f64, Point, Point) {
    let (ax0, ax1) = minmax(s1.a.x, s1.b.x);
    let (ay0, ay1) = minmax(s1.a.y, s1.b.y);
    let (bx0, bx1) = minmax(s2.a.x, s2.b.x);
    let (by0, by1) = minmax(s2.a.y, s2.b.y);
    let (gx, px, qx) = interval_gap(ax0, ax1, bx0, bx1);
    let (gy, py, qy) = interval_gap(ay0, ay1, by0, by1);
    (gx.max(gy), Point::new(px, py), Point::new(qx, qy))
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Gap between `[a0,a1]` and `[b0,b1]` plus nearest coordinates in each.
fn interval_gap(a0: f64, a1: f64, b0: f64, b1: f64) -> (f64, f64, f64) {
    if a1 < b0 {
        (b0 - a1, a1, b0)
    } else if b1 < a0 {
        (a0 - b1, a0, b1)
    } else {
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        let mid = 0.5 * (lo + hi);
        (0.0, mid, mid)
    }
}

/// Uniform-norm distance from a point to a closed segment or square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SetGeom {
    Seg(Segment),
    Sq(Square),
    Pt(Point),
}

impl SetGeom {
    pub fn dist_to_point(&self, p: &Point) -> f64 {
        match self {
            SetGeom::Seg(s) => dist_point_segment_inf(p, s),
            SetGeom::Sq(q) => q.dist_to_point(p),
            SetGeom::Pt(q) => uniform_dist(p, q),
        }
    }

    /// Uniform distance between two sets from the segment/square/point family.
    /// Segments are assumed axis-parallel when paired with each other.
    pub fn dist_to(&self, other: &SetGeom) -> f64 {
        match (self, other) {
            (SetGeom::Pt(p), _) => other.dist_to_point(p),
            (_, SetGeom::Pt(p)) => self.dist_to_point(p),
            (SetGeom::Seg(s1), SetGeom::Seg(s2)) => dist_axis_segments(s1, s2).0,
            (SetGeom::Seg(s), SetGeom::Sq(q)) | (SetGeom::Sq(q), SetGeom::Seg(s)) => {
                dist_segment_square(s, q)
            }
            (SetGeom::Sq(q1), SetGeom::Sq(q2)) => dist_squares(q1, q2),
        }
    }
}
