//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line. Tolerances are pinned here and nowhere else.

use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subhyp::{
    build_narrow_chain, build_wide_chain, classify_extension, comb, comb_tooth, complement_report,
    compute_connectors, compute_hats, d_alpha, evaluate_h_m, growing_inequalities_report,
    len_alpha, narrow_connectors, narrow_grid, narrow_weight, ngon, phi_field, random_rectilinear,
    s_alpha_estimate, separating_square, spiral, square, staircase, u_corridor,
    verify_narrow_invariants, verify_wide_invariants, classify_squares, uniform_dist, Decision,
    Error, GridField, NarrowChain, NarrowGrid, Point, PolygonDomain, Square,
    SquareRelationTag, WideChain, DEFAULT_MAX_CELLS,
};

fn report(n: usize, desc: &str, ok: bool, detail: &str, elapsed: Duration, budget_s: f64) {
    let within = elapsed.as_secs_f64() < budget_s;
    println!(
        "ACCEPTANCE {n}: {} — {desc} ({detail}; {:.1}s of {budget_s:.0}s budget)",
        if ok && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {n} failed: {detail}");
    assert!(
        within,
        "criterion {n} exceeded runtime budget: {:.1}s >= {budget_s}s",
        elapsed.as_secs_f64()
    );
}

// ---------------------------------------------------------------- fixtures

struct DomainCase {
    name: String,
    d: PolygonDomain,
    h: f64,
    g: GridField,
}

fn corpus() -> &'static Vec<DomainCase> {
    static CACHE: OnceLock<Vec<DomainCase>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut cases = Vec::new();
        let mut add = |name: &str, d: PolygonDomain, h: f64| {
            let g = d.rasterize(h, DEFAULT_MAX_CELLS).unwrap();
            cases.push(DomainCase {
                name: name.to_string(),
                d,
                h,
                g,
            });
        };
        add("u_corridor", u_corridor().unwrap(), 0.05);
        add("staircase6", staircase(6, 0.05).unwrap(), 0.0125);
        add("spiral2", spiral(2, 0.2).unwrap(), 0.02);
        for seed in 0..20u64 {
            add(
                &format!("rect{seed}"),
                random_rectilinear(12, seed).unwrap(),
                0.1,
            );
        }
        cases
    })
}

fn interior_point(c: &DomainCase, rng: &mut ChaCha8Rng, min_bdist: f64) -> Point {
    let (lo, hi) = c.d.bbox();
    for _ in 0..10_000 {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if c.d.contains(&p) && c.d.boundary_distance(&p) >= min_bdist {
            return p;
        }
    }
    panic!("no interior point with clearance {min_bdist} in {}", c.name);
}

struct ChainCase {
    di: usize,
    chain: WideChain,
}

/// Five audited point pairs per corpus domain, chains with hats and
/// connectors attached.
fn chains() -> &'static Vec<ChainCase> {
    static CACHE: OnceLock<Vec<ChainCase>> = OnceLock::new();
    CACHE.get_or_init(|| {
        let mut out = Vec::new();
        for (di, c) in corpus().iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + di as u64);
            let mut built = 0;
            let mut tries = 0;
            while built < 5 {
                tries += 1;
                assert!(tries < 200, "chain sampling stalled on {}", c.name);
                let x = interior_point(c, &mut rng, 3.0 * c.h);
                let y = interior_point(c, &mut rng, 3.0 * c.h);
                if uniform_dist(&x, &y) < 6.0 * c.h {
                    continue;
                }
                let Ok(mut chain) = build_wide_chain(&c.d, &c.g, &x, &y, 10_000) else {
                    continue;
                };
                // keep the narrow-path raster tractable downstream
                let dmin = chain
                    .squares
                    .iter()
                    .map(Square::diam)
                    .fold(f64::INFINITY, f64::min);
                let dmax = chain.squares.iter().map(Square::diam).fold(0.0, f64::max);
                if dmin < c.h || dmax / dmin > 64.0 {
                    continue;
                }
                if compute_hats(&mut chain, &c.d).is_err() {
                    continue;
                }
                if compute_connectors(&mut chain, &c.d).is_err() {
                    continue;
                }
                out.push(ChainCase { di, chain });
                built += 1;
            }
        }
        out
    })
}

fn narrow_of(chain: &WideChain) -> Result<NarrowChain, Error> {
    let mut n = build_narrow_chain(chain)?;
    narrow_connectors(&mut n)?;
    Ok(n)
}

fn narrow_grid_fallback(chain: &NarrowChain) -> Result<NarrowGrid, Error> {
    let dmin = chain
        .squares
        .iter()
        .map(Square::diam)
        .fold(f64::INFINITY, f64::min);
    for div in [16.0, 8.0, 4.0] {
        match narrow_grid(chain, Some(dmin / div), DEFAULT_MAX_CELLS) {
            Err(Error::GridTooLarge(..)) => continue,
            other => return other,
        }
    }
    narrow_grid(chain, Some(dmin / 2.0), DEFAULT_MAX_CELLS)
}

// --------------------------------------------------------------- criteria

/// Open-box overlap, nesting and closed-contact oracle by dense sampling
/// plus the exact max-norm touching identity.
fn oracle_tag(s1: &Square, s2: &Square) -> SquareRelationTag {
    let d = uniform_dist(&s1.center, &s2.center);
    let scale = (s1.radius + s2.radius)
        .max(s1.center.x.abs().max(s1.center.y.abs()))
        .max(s2.center.x.abs().max(s2.center.y.abs()));
    if (d - (s1.radius + s2.radius)).abs() <= 1e-9 * scale.max(1.0) {
        return SquareRelationTag::Touching;
    }
    // sample a dense grid strictly inside the closed-box intersection; for
    // axis-aligned squares the open overlap is nonempty iff these points hit it
    let x0 = s1.xmin().max(s2.xmin());
    let x1 = s1.xmax().min(s2.xmax());
    let y0 = s1.ymin().max(s2.ymin());
    let y1 = s1.ymax().min(s2.ymax());
    let n = 17;
    let mut open_overlap = false;
    if x1 > x0 && y1 > y0 {
        'grid: for i in 1..n {
            for j in 1..n {
                let p = Point::new(
                    x0 + (x1 - x0) * i as f64 / n as f64,
                    y0 + (y1 - y0) * j as f64 / n as f64,
                );
                if s1.contains(&p) && s2.contains(&p) {
                    open_overlap = true;
                    break 'grid;
                }
            }
        }
    }
    if open_overlap {
        let (small, big) = if s1.radius <= s2.radius { (s1, s2) } else { (s2, s1) };
        let tol = 1e-9 * scale.max(1.0);
        let nested = small
            .corners()
            .iter()
            .all(|p| big.closure_contains_tol(p, tol));
        if nested {
            SquareRelationTag::Nested
        } else {
            SquareRelationTag::Overlapping
        }
    } else {
        SquareRelationTag::Separated
    }
}

#[test]
fn acceptance_01_square_pair_predicates() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut bad = 0usize;
    let mut detail = String::new();
    for trial in 0..10_000 {
        let r1 = rng.gen_range(0.05..1.0);
        let r2 = rng.gen_range(0.05..1.0);
        let c1 = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let s1 = Square::new(c1, r1);
        let s2 = match trial % 10 {
            // exact touching: edge contact and corner contact
            0..=2 => {
                let rsum = r1 + r2;
                let lateral = rng.gen_range(-rsum..rsum);
                let (dx, dy) = match trial % 4 {
                    0 => (rsum, lateral),
                    1 => (-rsum, lateral),
                    2 => (lateral, rsum),
                    _ => (rsum, rsum),
                };
                Square::new(Point::new(c1.x + dx, c1.y + dy), r2)
            }
            // nested with margin
            3 => {
                let r2 = rng.gen_range(0.01..0.8) * r1;
                let m = (r1 - r2) * rng.gen_range(0.0..0.95);
                let t = rng.gen_range(0.0..std::f64::consts::TAU);
                return_nested(c1, r2, m, t)
            }
            // free placement: overlapping or separated
            _ => Square::new(
                Point::new(rng.gen_range(-2.5..2.5), rng.gen_range(-2.5..2.5)),
                r2,
            ),
        };
        let rel = classify_squares(&s1, &s2);
        let want = oracle_tag(&s1, &s2);
        if rel.tag != want {
            bad += 1;
            if bad == 1 {
                detail = format!("first mismatch: {:?} vs oracle {:?} for {s1:?} {s2:?}", rel.tag, want);
            }
        }
        // the touching identity both ways
        let d = uniform_dist(&s1.center, &s2.center);
        let scale = (r1 + r2).max(2.5);
        let identity = (d - (r1 + r2)).abs() <= 1e-9 * scale;
        if (rel.tag == SquareRelationTag::Touching) != identity {
            bad += 1;
        }
    }
    report(
        1,
        "classify_squares agrees with the dense oracle on 10^4 pairs",
        bad == 0,
        &if bad == 0 { "0 mismatches".into() } else { format!("{bad} mismatches; {detail}") },
        start.elapsed(),
        5.0,
    );
}

fn return_nested(c1: Point, r2: f64, m: f64, t: f64) -> Square {
    Square::new(Point::new(c1.x + m * t.cos(), c1.y + m * t.sin()), r2)
}

#[test]
fn acceptance_02_separation_corpus() {
    let _ = corpus();
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut runs = 0usize;
    for (di, c) in corpus().iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + di as u64);
        let mut done = 0;
        let mut tries = 0;
        while done < 10 && tries < 400 {
            tries += 1;
            let x = interior_point(c, &mut rng, 2.0 * c.h);
            let Ok(host) = c.d.max_inscribed_square(&x) else {
                continue;
            };
            if host.radius < 2.0 * c.h {
                continue;
            }
            let b = interior_point(c, &mut rng, 2.0 * c.h);
            if host.closure_contains_tol(&b, 2.0 * c.h) {
                continue;
            }
            done += 1;
            runs += 1;
            match separating_square(&c.d, &c.g, &host, &b) {
                Ok(_) => {}
                Err(e) => failures.push(format!(
                    "{}: host ({}, {}) r {}, b ({}, {}): {e}",
                    c.name, host.center.x, host.center.y, host.radius, b.x, b.y
                )),
            }
        }
        assert!(done == 10, "could not sample 10 instances on {}", c.name);
    }
    report(
        2,
        "separating_square succeeds with grid-verified separation on the corpus",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{runs} instances, 0 failures")
        } else {
            format!("{} failures, e.g. {}", failures.len(), failures[0])
        },
        start.elapsed(),
        120.0,
    );
}

#[test]
fn acceptance_03_wide_invariants() {
    let _ = chains();
    let start = Instant::now();
    let mut failures = Vec::new();
    for cc in chains() {
        let c = &corpus()[cc.di];
        let rep = verify_wide_invariants(&cc.chain, &c.d, &c.g);
        if !rep.all_pass() {
            failures.push(format!("{}: {:?}", c.name, rep.failures));
        }
    }
    report(
        3,
        "wide-chain invariants hold on the corpus x5 point pairs",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{} chains audited", chains().len())
        } else {
            format!("{} failing chains, e.g. {}", failures.len(), failures[0])
        },
        start.elapsed(),
        120.0,
    );
}

#[test]
fn acceptance_04_narrow_invariants() {
    let _ = chains();
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut audited = 0;
    for (di, c) in corpus().iter().enumerate() {
        // first two chains per domain
        for cc in chains().iter().filter(|cc| cc.di == di).take(2) {
            audited += 1;
            match narrow_of(&cc.chain) {
                Ok(narrow) => {
                    let rep = verify_narrow_invariants(&narrow, &c.d, &c.g);
                    if !rep.all_pass() {
                        failures.push(format!("{}: {:?}", c.name, rep.failures));
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", c.name)),
            }
        }
    }
    report(
        4,
        "narrow-chain invariants (shrink bounds, skips, connectivity) hold",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{audited} chains audited")
        } else {
            format!("{} failures, e.g. {}", failures.len(), failures[0])
        },
        start.elapsed(),
        60.0,
    );
}

#[test]
fn acceptance_05_complement_structure() {
    let _ = chains();
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut audited = 0;
    for (di, c) in corpus().iter().enumerate() {
        let Some(cc) = chains().iter().find(|cc| cc.di == di) else {
            continue;
        };
        let g2 = c.d.rasterize(c.h / 2.0, DEFAULT_MAX_CELLS).unwrap();
        for g in [&c.g, &g2] {
            audited += 1;
            match complement_report(&cc.chain, &c.d, g) {
                Ok(rep) => {
                    if rep.multiplicity > 3 {
                        failures.push(format!("{}: M = {}", c.name, rep.multiplicity));
                    }
                    for (_, idxs) in &rep.components {
                        let ok = idxs.len() == 1
                            || (idxs.len() == 2 && idxs[1] == idxs[0] + 1);
                        if !ok {
                            failures.push(format!("{}: component touches {idxs:?}", c.name));
                        }
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", c.name)),
            }
        }
    }
    report(
        5,
        "complement components touch 1-2 consecutive squares and M <= 3 at h, h/2",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{audited} reports")
        } else {
            format!("{} failures, e.g. {}", failures.len(), failures[0])
        },
        start.elapsed(),
        60.0,
    );
}

#[test]
fn acceptance_06_metric_ceilings() {
    let start = Instant::now();
    let sq = square(1.0).unwrap();
    let gsq = sq.rasterize(1.0 / 128.0, DEFAULT_MAX_CELLS).unwrap();
    let rect = PolygonDomain::load(vec![
        Point::new(0.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(2.0, 1.0),
        Point::new(0.0, 1.0),
    ])
    .unwrap();
    let grect = rect.rasterize(1.0 / 128.0, DEFAULT_MAX_CELLS).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = (0.0f64, String::new());
    let mut failures = 0usize;
    let run = |d: &PolygonDomain, g: &GridField, alpha: f64, pairs: usize, cap: f64, tag: &str,
                   rng: &mut ChaCha8Rng, worst: &mut (f64, String), failures: &mut usize| {
        let (lo, hi) = d.bbox();
        let mut n = 0;
        while n < pairs {
            let a = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            let b = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
            if !d.contains(&a) || !d.contains(&b) || uniform_dist(&a, &b) < 4.0 * g.h {
                continue;
            }
            n += 1;
            let res = d_alpha(d, g, &a, &b, alpha).unwrap();
            let bound = cap / alpha * uniform_dist(&a, &b).powf(alpha) * 1.25;
            let ratio = res.value / bound;
            if ratio > worst.0 {
                *worst = (ratio, format!("{tag} alpha={alpha:.3}"));
            }
            if res.value > bound {
                *failures += 1;
            }
        }
    };
    for &alpha in &[1.0 / 3.0, 0.5, 2.0 / 3.0] {
        run(&sq, &gsq, alpha, 334, 3.0, "square", &mut rng, &mut worst, &mut failures);
        run(&rect, &grect, alpha, 100, 12.0, "two-square", &mut rng, &mut worst, &mut failures);
    }
    report(
        6,
        "d_alpha <= (3/alpha)|a-b|^alpha in a square, <= (12/alpha) on two-square unions (x1.25)",
        failures == 0,
        &format!("worst ratio {:.3} of bound ({})", worst.0, worst.1),
        start.elapsed(),
        120.0,
    );
}

#[test]
fn acceptance_07_quadrature_closed_form() {
    let start = Instant::now();
    let d = PolygonDomain::load(vec![
        Point::new(-1.0, -1.0),
        Point::new(1.0, -1.0),
        Point::new(1.0, 1.0),
        Point::new(-1.0, 1.0),
    ])
    .unwrap();
    let mut worst = 0.0f64;
    for &alpha in &[1.0 / 3.0, 0.5, 2.0 / 3.0] {
        for &t in &[0.25, 0.5, 0.9] {
            let path = [Point::new(0.0, 0.0), Point::new(t, 0.0)];
            let got = len_alpha(&d, &path, alpha, 1e-4).unwrap();
            let want = (1.0 - (1.0 - t).powf(alpha)) / alpha;
            worst = worst.max((got - want).abs() / want);
        }
    }
    report(
        7,
        "len_alpha matches the analytic antiderivative within 0.5%",
        worst < 0.005,
        &format!("worst relative error {worst:.2e}"),
        start.elapsed(),
        1.0,
    );
}

#[test]
fn acceptance_08_chain_metric_consistency() {
    let _ = chains();
    let start = Instant::now();
    let p = 4.0;
    let alpha = (p - 2.0) / (p - 1.0);
    let mut failures = Vec::new();
    let mut audited = 0;
    for (di, c) in corpus().iter().enumerate() {
        for cc in chains().iter().filter(|cc| cc.di == di).take(3) {
            audited += 1;
            let res = (|| -> Result<(), Error> {
                let narrow = narrow_of(&cc.chain)?;
                let ng = narrow_grid_fallback(&narrow)?;
                let w = narrow_weight(&narrow, p);
                let f1 = phi_field(&ng, &w, 1)?;
                let f2 = phi_field(&ng, &w, 2)?;
                let da = d_alpha(&c.d, &c.g, &narrow.x, &narrow.y, alpha)?;
                let rep =
                    growing_inequalities_report(&narrow, &ng, &w, &f1, &f2, 1, da.value, 0.25);
                if !(rep.e1 && rep.e2) {
                    return Err(Error::PreconditionViolated(format!(
                        "E1 {} ({} vs {}), E2 {} ({} vs {})",
                        rep.e1, rep.e1_lhs, rep.e1_rhs, rep.e2, rep.e2_lhs, rep.e2_rhs
                    )));
                }
                Ok(())
            })();
            if let Err(e) = res {
                failures.push(format!("{}: {e}", c.name));
            }
        }
    }
    report(
        8,
        "d_alpha(x,y) <= (12/a) sum (diam Q)^a and sum <= 8(phi1+phi2)(y) (x1.25)",
        failures.is_empty(),
        &if failures.is_empty() {
            format!("{audited} pipelines")
        } else {
            format!("{} failures, e.g. {}", failures.len(), failures[0])
        },
        start.elapsed(),
        180.0,
    );
}

#[test]
fn acceptance_09_growing_function() {
    let start = Instant::now();
    let d = u_corridor().unwrap();
    let g = d.rasterize(0.02, DEFAULT_MAX_CELLS).unwrap();
    let mut chain =
        build_wide_chain(&d, &g, &Point::new(0.5, 4.5), &Point::new(4.5, 4.5), 10_000).unwrap();
    compute_hats(&mut chain, &d).unwrap();
    compute_connectors(&mut chain, &d).unwrap();
    let narrow = narrow_of(&chain).unwrap();
    let dmin = narrow
        .squares
        .iter()
        .map(Square::diam)
        .fold(f64::INFINITY, f64::min);
    let p = 4.0;
    let w = narrow_weight(&narrow, p);
    let build = |hn: f64| {
        let ng = narrow_grid(&narrow, Some(hn), DEFAULT_MAX_CELLS).unwrap();
        let f1 = phi_field(&ng, &w, 1).unwrap();
        let f2 = phi_field(&ng, &w, 2).unwrap();
        (ng, f1, f2)
    };
    let coarse = build(dmin / 8.0);
    let fine = build(dmin / 16.0);
    // candidate z: square centers and offset points; take the coarse-grid
    // worst path-independence residual and require it to shrink at fine h
    let mut cands = Vec::new();
    for q in &narrow.squares {
        cands.push(q.center);
        cands.push(Point::new(q.center.x + q.radius / 2.0, q.center.y));
        cands.push(Point::new(q.center.x, q.center.y + q.radius / 2.0));
    }
    let residual_at = |s: &(NarrowGrid, _, _), z: &Point, m: usize| -> Option<(f64, f64)> {
        let e = evaluate_h_m(&s.0, &s.1, &s.2, m, z).ok()?;
        e.path_residual.map(|r| (r, e.value.abs()))
    };
    let mut halving_ok = true;
    let mut halving_detail = String::new();
    for m in [2usize, 3] {
        let mut worst: Option<(f64, f64, Point)> = None;
        for z in &cands {
            if let Some((r, v)) = residual_at(&coarse, z, m) {
                if worst.as_ref().is_none_or(|w| r > w.0) {
                    worst = Some((r, v, *z));
                }
            }
        }
        let (rc, vc, z) = worst.expect("no two-path candidate point");
        if rc <= 1e-6 * vc.max(1.0) {
            continue; // already at convergence floor
        }
        let (rf, _) = residual_at(&fine, &z, m).expect("fine evaluation");
        if rf > 0.75 * rc {
            halving_ok = false;
            halving_detail = format!("m={m}: residual {rc:.3e} -> {rf:.3e}");
        }
    }
    // derivative identities on the fine fields
    let da = d_alpha(&d, &g, &narrow.x, &narrow.y, (p - 2.0) / (p - 1.0)).unwrap();
    let mut deriv_ok = true;
    let mut deriv_detail = String::new();
    for m in [2usize, 3] {
        let rep =
            growing_inequalities_report(&narrow, &fine.0, &w, &fine.1, &fine.2, m, da.value, 0.25);
        if !(rep.e3 && rep.e4) {
            deriv_ok = false;
            deriv_detail = format!("m={m}: {:?}", rep.failures);
        }
    }
    report(
        9,
        "h_m two-path residual halves under refinement; FD derivatives match (m-2)! phi_j",
        halving_ok && deriv_ok,
        &if halving_ok && deriv_ok {
            "residual halving and derivative stencils verified for m in {2,3}".into()
        } else {
            format!("{halving_detail} {deriv_detail}")
        },
        start.elapsed(),
        120.0,
    );
}

#[test]
fn acceptance_10_classification_dichotomy() {
    let start = Instant::now();
    let p = 3.0; // alpha = 1/2
    let alpha = 0.5;
    let mut failures = Vec::new();
    for (name, d) in [("unit square", square(1.0).unwrap()), ("64-gon", ngon(64, 1.0).unwrap())] {
        let h = d.bbox_diag() / 256.0;
        let v = classify_extension(&d, p, 2, 40, 3, &[], h).unwrap();
        if v.decision != Decision::ExtensionLikely {
            failures.push(format!("{name}: decision {:?}", v.decision));
        }
        if v.s_alpha_estimate.value > 3.0 / alpha {
            failures.push(format!(
                "{name}: s_alpha estimate {} > {}",
                v.s_alpha_estimate.value,
                3.0 / alpha
            ));
        }
    }
    // comb dichotomy: estimates strictly increasing by >= 25% per step
    let depth = 0.5;
    let ratio = 0.5;
    let mut ests = Vec::new();
    for n in [4usize, 6, 8] {
        let d = comb(n, depth, ratio).unwrap();
        let (_, wn) = comb_tooth(n, ratio);
        let h = wn / 2.0;
        let g = d.rasterize(h, DEFAULT_MAX_CELLS).unwrap();
        // probe points at the tips of the two deepest teeth
        let probes: Vec<Point> = [n, n - 1]
            .iter()
            .map(|&i| {
                let (a, w) = comb_tooth(i, ratio);
                Point::new(a + w / 2.0, 1.0 - depth + 2.0 * h)
            })
            .collect();
        let est = s_alpha_estimate(&d, &g, alpha, 4, 7, &probes);
        ests.push((n, est.value));
    }
    for k in 1..ests.len() {
        if !(ests[k].1 >= 1.25 * ests[k - 1].1) {
            failures.push(format!(
                "comb growth stalls: n={} gives {}, n={} gives {}",
                ests[k - 1].0,
                ests[k - 1].1,
                ests[k].0,
                ests[k].1
            ));
        }
    }
    report(
        10,
        "convex domains classify extension-likely; comb s_alpha grows >= 25% per step",
        failures.is_empty(),
        &format!(
            "comb estimates {:?}{}",
            ests,
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
        start.elapsed(),
        180.0,
    );
}

#[test]
fn acceptance_11_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_subhyp");
    let dir = std::env::temp_dir().join("subhyp-acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    let dom = dir.join("u.json");
    let run = |args: &[&str]| -> Vec<u8> {
        let out = Command::new(bin).args(args).output().unwrap();
        out.stdout
    };
    let status = Command::new(bin)
        .args(["gen", "--kind", "u-corridor", "--out", dom.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let verify_args = [
        "verify", "--domain", dom.to_str().unwrap(), "--from", "0.5,4.5", "--to", "4.5,4.5",
        "--h", "0.05",
    ];
    let classify_args = [
        "classify", "--domain", dom.to_str().unwrap(), "--p", "4", "--budget", "20",
        "--seed", "9", "--h", "0.2",
    ];
    let v1 = run(&verify_args);
    let v2 = run(&verify_args);
    let c1 = run(&classify_args);
    let c2 = run(&classify_args);
    let ok = v1 == v2 && c1 == c2 && !v1.is_empty() && !c1.is_empty();
    report(
        11,
        "verify and classify produce byte-identical JSON across repeated runs",
        ok,
        &format!("verify {} bytes, classify {} bytes", v1.len(), c1.len()),
        start.elapsed(),
        120.0,
    );
}
