//! Square-chain decompositions and subhyperbolic metrics on planar
//! polygonal domains.

pub mod domain;
pub mod error;
pub mod generators;
pub mod geom;
pub mod growing;
pub mod metrics;
pub mod narrow_path;
pub mod separation;
pub mod wide_path;

pub use domain::{
    boundary_arcs, components_excluding, components_minus_square, BoundaryArcs,
    ComponentLabeling, DomainFile, GridField, PolygonDomain, DEFAULT_MAX_CELLS,
};
pub use error::{Error, Result};
pub use generators::{
    comb, comb_tooth, generate, ngon, random_rectilinear, spiral, square, staircase,
    u_corridor, DomainSpec, SPIRAL_GAP_DEFAULT, STAIRCASE_OMEGA_DEFAULT,
};
pub use wide_path::{
    build_wide_chain, complement_report, compute_connectors, compute_hats,
    verify_wide_invariants, ComplementReport, Connector, HatDelta, WideChain, WideReport,
};
pub use growing::{
    evaluate_h_m, growing_inequalities_report, narrow_grid, narrow_weight, phi_field,
    AxisPseudometricField, GrowingEval, GrowingReport, NarrowGrid, NarrowWeight,
};
pub use metrics::{
    arc_diameter_estimate, classify_extension, d_alpha, len_alpha, s_alpha_estimate, Decision,
    GeodesicResult, SAlphaEstimate, Verdict,
};
pub use narrow_path::{
    build_narrow_chain, compute_eps0, narrow_connectors, shrink_middle_square,
    verify_narrow_invariants, Eps0, NarrowChain, NarrowReport,
};
pub use separation::{
    classify_accessibility, maximal_touching_square, separating_square, AccessVerdict,
    Accessibility, SeparatingSquare, TouchingSquareK,
};
pub use geom::{
    classify_squares, dist_axis_segments, dist_point_segment_inf, dist_segment_square,
    dist_squares, tau_for, uniform_dist, Point, Segment, SetGeom, Square, SquareRelation,
    SquareRelationTag, TAU_GEOM,
};
