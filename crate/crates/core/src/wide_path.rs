//! The wide square chain S_1..S_k from x to y, its hat squares and
//! connectors, invariant audits, and the structure of the complement of the
//! assembled path.

use serde::{Deserialize, Serialize};

use crate::domain::{components_excluding, GridField, PolygonDomain};
use crate::error::{Error, Result};
use crate::geom::{
    classify_squares, tau_for, Point, Segment, Square, SquareRelationTag,
};
use crate::separation::separating_square;

/// Connector between consecutive chain squares: a hat square at a point
/// contact, or the open interface segment.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Connector {
    Hat(Square),
    Open(Segment),
}

/// The three minima entering the hat radius.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HatDelta {
    pub delta: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WideChain {
    pub squares: Vec<Square>,
    /// Per interface i (between squares i and i+1): the hat square when the
    /// interface is a point. Populated by `compute_hats`.
    pub hats: Vec<Option<Square>>,
    /// Per interface. Populated by `compute_connectors`.
    pub connectors: Vec<Connector>,
    pub x: Point,
    pub y: Point,
    pub hat_delta: Option<HatDelta>,
    /// Indices i where the closures of squares i and i+2 share one point.
    pub rotation_indices: Vec<usize>,
}

impl WideChain {
    pub fn k(&self) -> usize {
        self.squares.len()
    }

    pub fn scale(&self) -> f64 {
        self.squares
            .iter()
            .map(|s| s.radius.max(s.center.x.abs()).max(s.center.y.abs()))
            .fold(1.0f64, f64::max)
    }
}

/// Terminal square: touches `prev` on its distance-achieving side, has
/// diameter dist(y, prev), and carries y on its closure.
fn final_square(d: &PolygonDomain, prev: &Square, y: &Point) -> Option<Square> {
    let gx = (y.x - prev.center.x).abs() - prev.radius;
    let gy = (y.y - prev.center.y).abs() - prev.radius;
    let dist = gx.max(gy);
    if dist <= 0.0 {
        return None;
    }
    let rho = dist / 2.0;
    let reach = prev.radius + rho;
    let center = if gx >= gy {
        Point::new(
            prev.center.x + (y.x - prev.center.x).signum() * reach,
            y.y.clamp(prev.center.y - reach, prev.center.y + reach),
        )
    } else {
        Point::new(
            y.x.clamp(prev.center.x - reach, prev.center.x + reach),
            prev.center.y + (y.y - prev.center.y).signum() * reach,
        )
    };
    let s = Square::new(center, rho);
    let tol = tau_for(rho.max(center.x.abs()).max(center.y.abs()));
    if d.contains(&center)
        && d.boundary_distance(&center) >= rho * (1.0 - 1e-9)
        && s.closure_contains_tol(y, tol)
    {
        Some(s)
    } else {
        None
    }
}

/// Build the chain by iterating the separation search from the maximal
/// inscribed square at x toward y.
pub fn build_wide_chain(
    d: &PolygonDomain,
    g: &GridField,
    x: &Point,
    y: &Point,
    max_k: usize,
) -> Result<WideChain> {
    let s1 = d.max_inscribed_square(x)?;
    if !d.contains(y) {
        return Err(Error::PointOutside(y.x, y.y));
    }
    let mut squares = vec![s1];
    let tol = tau_for(d.bbox_diag());
    while !squares.last().unwrap().closure_contains_tol(y, tol) {
        if squares.len() >= max_k {
            return Err(Error::ChainTooLong(max_k));
        }
        let prev = *squares.last().unwrap();
        let sep = separating_square(d, g, &prev, y)?;
        if sep.contains_b {
            if let Some(last) = final_square(d, &prev, y) {
                squares.push(last);
                break;
            }
            if sep.k.square.closure_contains_tol(y, tol) {
                squares.push(sep.k.square);
                break;
            }
            // grid-level containment only: y is within ~h of the square but
            // not carried by it; adopt it and keep marching
            if sep.k.square.diam() < 4.0 * g.h {
                return Err(Error::ResolutionInsufficient(
                    g.h,
                    "terminal square does not carry the endpoint".into(),
                ));
            }
            squares.push(sep.k.square);
            continue;
        }
        if sep.k.square.diam() < 4.0 * g.h {
            return Err(Error::ChainTooLong(squares.len()));
        }
        squares.push(sep.k.square);
    }
    let mut rotation_indices = Vec::new();
    for i in 0..squares.len().saturating_sub(2) {
        let rel = classify_squares(&squares[i], &squares[i + 2]);
        if rel.tag == SquareRelationTag::Touching
            && rel.interface.as_ref().is_some_and(|s| s.is_degenerate(tol))
        {
            rotation_indices.push(i);
        }
    }
    Ok(WideChain {
        squares,
        hats: Vec::new(),
        connectors: Vec::new(),
        x: *x,
        y: *y,
        hat_delta: None,
        rotation_indices,
    })
}

/// Classify interface i of the chain: Ok(segment) when the closures share a
/// segment, Err(point) when they share one point.
fn interface_of(chain: &WideChain, i: usize, tol: f64) -> Result<(Segment, Point, bool)> {
    let rel = classify_squares(&chain.squares[i], &chain.squares[i + 1]);
    if rel.tag != SquareRelationTag::Touching {
        return Err(Error::PreconditionViolated(format!(
            "squares {i} and {} do not touch",
            i + 1
        )));
    }
    let seg = rel.interface.unwrap();
    let contact = rel.contact.unwrap();
    let is_point = seg.is_degenerate(tol);
    Ok((seg, contact, is_point))
}

/// Compute the hat squares at point interfaces and the shared radius.
pub fn compute_hats(chain: &mut WideChain, d: &PolygonDomain) -> Result<()> {
    let k = chain.k();
    let tol = tau_for(chain.scale());
    let mut point_contacts: Vec<(usize, Point)> = Vec::new();
    for i in 0..k.saturating_sub(1) {
        let (_, contact, is_point) = interface_of(chain, i, tol)?;
        if is_point {
            point_contacts.push((i, contact));
        }
    }
    chain.hats = vec![None; k.saturating_sub(1)];
    if point_contacts.is_empty() {
        chain.hat_delta = None;
        return Ok(());
    }
    let d1 = point_contacts
        .iter()
        .map(|(_, w)| d.boundary_distance(w))
        .fold(f64::INFINITY, f64::min);
    let d2 = chain
        .squares
        .iter()
        .map(Square::diam)
        .fold(f64::INFINITY, f64::min);
    let mut d3 = f64::INFINITY;
    for &(m, w) in &point_contacts {
        for (j, s) in chain.squares.iter().enumerate() {
            if j == m || j == m + 1 {
                continue;
            }
            d3 = d3.min(s.dist_to_point(&w));
        }
    }
    let delta = 0.125 * d1.min(d2).min(d3);
    if delta <= tol {
        return Err(Error::DegenerateDelta(delta));
    }
    for (i, w) in point_contacts {
        chain.hats[i] = Some(Square::new(w, delta));
    }
    chain.hat_delta = Some(HatDelta { delta, d1, d2, d3 });
    Ok(())
}

/// Assemble the connectors: hats at point interfaces, open segments
/// otherwise. Requires hats to be computed.
pub fn compute_connectors(chain: &mut WideChain, d: &PolygonDomain) -> Result<()> {
    let k = chain.k();
    let tol = tau_for(chain.scale());
    if chain.hats.len() != k.saturating_sub(1) {
        return Err(Error::PreconditionViolated("hats not computed".into()));
    }
    let mut out = Vec::with_capacity(k.saturating_sub(1));
    for i in 0..k.saturating_sub(1) {
        let (seg, _, is_point) = interface_of(chain, i, tol)?;
        if is_point {
            let hat = chain.hats[i].ok_or(Error::PreconditionViolated(format!(
                "missing hat at point interface {i}"
            )))?;
            out.push(Connector::Hat(hat));
        } else {
            // the open interface segment must lie in Omega
            for t in [0.01, 0.5, 0.99] {
                if !d.contains(&seg.point_at(t)) {
                    return Err(Error::ConnectorNotInOmega(i));
                }
            }
            out.push(Connector::Open(seg));
        }
    }
    chain.connectors = out;
    Ok(())
}

/// Per-invariant audit of the chain.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WideReport {
    pub endpoints: bool,
    pub pairwise_disjoint: bool,
    pub consecutive_touch_in_omega: bool,
    pub nonconsecutive_closed_disjoint_in_omega: bool,
    pub separation: bool,
    pub skip_intersections_single: bool,
    pub center_segments_in_omega: bool,
    pub hat_bounds: bool,
    pub failures: Vec<String>,
}

impl WideReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_wide_invariants(chain: &WideChain, d: &PolygonDomain, g: &GridField) -> WideReport {
    let k = chain.k();
    let tol = tau_for(chain.scale());
    let mut failures = Vec::new();
    let sq = &chain.squares;

    let endpoints = sq
        .first()
        .is_some_and(|s| s.closure_contains_tol(&chain.x, tol))
        && sq
            .last()
            .is_some_and(|s| s.closure_contains_tol(&chain.y, tol));
    if !endpoints {
        failures.push("endpoints not carried by the chain".into());
    }

    let mut pairwise_disjoint = true;
    let mut nonconsecutive = true;
    let mut consecutive = true;
    for i in 0..k {
        for j in (i + 1)..k {
            let rel = classify_squares(&sq[i], &sq[j]);
            if matches!(
                rel.tag,
                SquareRelationTag::Nested | SquareRelationTag::Overlapping
            ) {
                pairwise_disjoint = false;
                failures.push(format!("squares {i} and {j} overlap"));
                continue;
            }
            if j == i + 1 {
                // consecutive closures must meet, with a contact set in Omega
                if rel.tag != SquareRelationTag::Touching {
                    consecutive = false;
                    failures.push(format!("squares {i} and {j} do not touch"));
                } else {
                    let probe = rel.interface.unwrap().midpoint();
                    if !d.contains(&probe) && d.boundary_distance(&probe) > tol {
                        consecutive = false;
                        failures.push(format!("interface {i}/{j} leaves the domain"));
                    }
                }
            } else if rel.tag == SquareRelationTag::Touching {
                // far contacts must avoid the open domain
                let seg = rel.interface.unwrap();
                let samples = if seg.is_degenerate(tol) { 1 } else { 9 };
                for s in 0..samples {
                    let t = if samples == 1 {
                        0.5
                    } else {
                        s as f64 / (samples - 1) as f64
                    };
                    let p = seg.point_at(t);
                    if d.contains(&p) && d.boundary_distance(&p) > tol {
                        nonconsecutive = false;
                        failures.push(format!("closed squares {i} and {j} meet inside Omega"));
                        break;
                    }
                }
            }
        }
    }

    let mut skip_single = true;
    for i in 0..k.saturating_sub(2) {
        let rel = classify_squares(&sq[i], &sq[i + 2]);
        if rel.tag == SquareRelationTag::Touching
            && !rel.interface.as_ref().unwrap().is_degenerate(tol)
        {
            skip_single = false;
            failures.push(format!("squares {i} and {} share a segment", i + 2));
        }
    }

    let mut centers_ok = true;
    for i in 0..k.saturating_sub(1) {
        for t in 0..=100 {
            let p = sq[i].center.lerp(&sq[i + 1].center, t as f64 / 100.0);
            if !d.contains(&p) {
                centers_ok = false;
                failures.push(format!("center segment {i} leaves the domain"));
                break;
            }
        }
    }

    let mut separation = true;
    for i in 1..k.saturating_sub(1) {
        let lab = components_excluding(g, std::slice::from_ref(&sq[i]));
        let label_of = |p: &Point| {
            g.cell_of(p)
                .or_else(|| g.nearest_inside_cell(p, 2))
                .and_then(|c| lab.labels[g.idx(c.0, c.1)])
        };
        let before: Vec<_> = (0..i).filter_map(|j| label_of(&sq[j].center)).collect();
        let after: Vec<_> = ((i + 1)..k).filter_map(|j| label_of(&sq[j].center)).collect();
        if before.len() != i || after.len() != k - i - 1 {
            separation = false;
            failures.push(format!("separation check at {i}: unlabeled centers"));
            continue;
        }
        if before.iter().any(|l| after.contains(l)) {
            separation = false;
            failures.push(format!("removing square {i} does not split the chain"));
        }
    }

    let mut hat_bounds = true;
    for (i, hat) in chain.hats.iter().enumerate() {
        let Some(hat) = hat else { continue };
        let cap = 0.25 * sq[i].diam().min(sq[i + 1].diam());
        if hat.diam() > cap * (1.0 + 1e-9) {
            hat_bounds = false;
            failures.push(format!("hat {i} exceeds a quarter of its squares"));
        }
        let doubled = hat.scaled(2.0);
        for (j, s) in sq.iter().enumerate() {
            if j == i || j == i + 1 {
                continue;
            }
            if crate::geom::dist_squares(&doubled, s) <= 0.0 {
                hat_bounds = false;
                failures.push(format!("doubled hat {i} meets square {j}"));
            }
        }
    }

    WideReport {
        endpoints,
        pairwise_disjoint,
        consecutive_touch_in_omega: consecutive,
        nonconsecutive_closed_disjoint_in_omega: nonconsecutive,
        separation,
        skip_intersections_single: skip_single,
        center_segments_in_omega: centers_ok,
        hat_bounds,
        failures,
    }
}

/// Component structure of the complement of the assembled path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplementReport {
    /// Component label with the chain square indices its closure touches.
    pub components: Vec<(u32, Vec<usize>)>,
    /// Component labels touching exactly square i.
    pub phi: Vec<Vec<u32>>,
    /// Component labels touching exactly squares i and i+1.
    pub psi: Vec<Vec<u32>>,
    pub multiplicity: u32,
    pub h: f64,
}

pub fn complement_report(
    chain: &WideChain,
    d: &PolygonDomain,
    g: &GridField,
) -> Result<ComplementReport> {
    let _ = d;
    let k = chain.k();
    let mut blocks: Vec<Square> = chain.squares.clone();
    blocks.extend(chain.hats.iter().flatten().copied());
    let lab = components_excluding(g, &blocks);
    // touched square indices per component
    let mut touched: Vec<std::collections::BTreeSet<usize>> =
        vec![Default::default(); lab.n_components as usize];
    let near = 1.5 * g.h;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let Some(label) = lab.labels[g.idx(i, j)] else {
                continue;
            };
            let c = g.cell_center(i, j);
            for (si, s) in chain.squares.iter().enumerate() {
                // side contact only: cells diagonally across a corner share
                // just a point with the square and do not count as touching
                let dx = ((c.x - s.center.x).abs() - s.radius).max(0.0);
                let dy = ((c.y - s.center.y).abs() - s.radius).max(0.0);
                if dx.max(dy) <= near && dx.min(dy) <= 0.25 * g.h {
                    touched[label as usize].insert(si);
                }
            }
        }
    }
    let mut components = Vec::new();
    let mut phi: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut psi: Vec<Vec<u32>> = vec![Vec::new(); k.saturating_sub(1)];
    for (label, set) in touched.iter().enumerate() {
        let idxs: Vec<usize> = set.iter().copied().collect();
        match idxs.as_slice() {
            [one] => phi[*one].push(label as u32),
            [a, b] if *b == *a + 1 => psi[*a].push(label as u32),
            _ => {
                return Err(Error::ComponentTouchesTooMany(idxs, g.h));
            }
        }
        components.push((label as u32, idxs));
    }
    // covering multiplicity of {Phi_i} u {Psi_i} by rasterized counting
    let mut multiplicity = 0u32;
    for j in 0..g.ny {
        for i in 0..g.nx {
            if !g.inside[g.idx(i, j)] {
                continue;
            }
            let c = g.cell_center(i, j);
            let comp = lab.labels[g.idx(i, j)];
            let mut count = 0u32;
            for si in 0..k {
                // Phi_i = S_i u its components
                let in_phi = chain.squares[si].contains(&c)
                    || comp.is_some_and(|l| phi[si].contains(&l));
                if in_phi {
                    count += 1;
                }
            }
            for ii in 0..k.saturating_sub(1) {
                // Psi_i = S_i u S_{i+1} u T_i u its components
                let in_psi = chain.squares[ii].contains(&c)
                    || chain.squares[ii + 1].contains(&c)
                    || chain.hats[ii].is_some_and(|hat| hat.closure_contains(&c))
                    || comp.is_some_and(|l| psi[ii].contains(&l));
                if in_psi {
                    count += 1;
                }
            }
            multiplicity = multiplicity.max(count);
        }
    }
    Ok(ComplementReport {
        components,
        phi,
        psi,
        multiplicity,
        h: g.h,
    })
}
