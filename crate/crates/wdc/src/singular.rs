//! Exact singular-set and boundary-cover extraction for planar inputs.
//!
//! For piecewise-affine data the loci where subdifferentials are large sit
//! on finitely many seam segments of the piece arrangement; these are
//! enumerated exactly, clipped to a caller-declared box.

use serde::{Deserialize, Serialize};

use crate::arrangement::{self, Line};
use crate::dc::{DCFunction, MaxAffine};
use crate::error::{Error, Result};
use crate::geom::{self, BoundingBox};
use crate::lp::{self, Constraint};
use crate::sample::SamplingPlan;
use crate::subdiff::{self, SubdiffMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    G,
    H,
}

/// Where a cover segment comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Seam of two pieces of one convex component.
    Seam { component: Component, i: usize, j: usize },
    /// Zero line of the affine cell of a certified piece pair.
    CellZero { g_piece: usize, h_piece: usize },
    /// Arrangement vertex, kept as a degenerate segment.
    Vertex,
}

/// A segment of the cover; degenerate loci are zero-length segments.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverSegment {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub provenance: Provenance,
}

impl CoverSegment {
    pub fn length(&self) -> f64 {
        geom::dist(&self.a, &self.b)
    }

    pub fn distance_to(&self, p: &[f64]) -> f64 {
        geom::point_segment_distance(p, &self.a, &self.b).0
    }
}

/// Finite list of segments covering a singular locus, with a note on any
/// box clipping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentCover {
    pub segments: Vec<CoverSegment>,
    pub clipped: bool,
}

impl SegmentCover {
    pub fn distance_to(&self, p: &[f64]) -> f64 {
        self.segments
            .iter()
            .map(|s| s.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Points of the box where `diam(subdifferential of g) > eps`, as exact
/// seam segments of the active-piece arrangement of the convex `g`.
pub fn singular_set_pwa_2d(g: &MaxAffine, eps: f64, bbox: &BoundingBox) -> Result<SegmentCover> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: g.dim() });
    }
    if eps <= 0.0 {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let mut segments = Vec::new();
    let mut clipped = false;
    let n = g.pieces.len();
    for i in 0..n {
        for j in i + 1..n {
            let (pi, pj) = (&g.pieces[i], &g.pieces[j]);
            let normal = geom::sub(&pi.a, &pj.a);
            if geom::norm(&normal) < 1e-14 {
                continue;
            }
            // seam line g_i = g_j, active where both attain the max
            let Some((range, o, d)) = active_interval_on_line(g, i, j, bbox) else {
                continue;
            };
            let (t0, t1, was_clipped) = range;
            clipped |= was_clipped;
            // active piece set is constant on the relative interior
            let tm = 0.5 * (t0 + t1);
            let mid = [o[0] + tm * d[0], o[1] + tm * d[1]];
            let active = g.active(&mid, subdiff::DEFAULT_TOL);
            let mut diam = 0.0f64;
            for (ai, &u) in active.iter().enumerate() {
                for &v in &active[ai + 1..] {
                    diam = diam.max(geom::dist(&g.pieces[u].a, &g.pieces[v].a));
                }
            }
            if diam > eps {
                segments.push(CoverSegment {
                    a: vec![o[0] + t0 * d[0], o[1] + t0 * d[1]],
                    b: vec![o[0] + t1 * d[0], o[1] + t1 * d[1]],
                    provenance: Provenance::Seam { component: Component::G, i, j },
                });
            }
        }
    }
    Ok(SegmentCover { segments, clipped })
}

/// Parameter interval (t0, t1, clipped-by-box) with the line origin and
/// direction.
type SeamInterval = ((f64, f64, bool), [f64; 2], [f64; 2]);

/// Interval of the seam line of pieces (i, j) where both attain the max of
/// `g`, clipped to the box. None when the seam is empty in the box.
fn active_interval_on_line(
    g: &MaxAffine,
    i: usize,
    j: usize,
    bbox: &BoundingBox,
) -> Option<SeamInterval> {
    let (pi, pj) = (&g.pieces[i], &g.pieces[j]);
    let line = canonical_line(&pi.a, pi.b, &pj.a, pj.b)?;
    let (o, d) = line.origin_dir();
    let params = arrangement::clip_params(&o, &d, bbox);
    if params.is_empty() {
        return None;
    }
    let (mut t0, mut t1) = (params[0], params[params.len() - 1]);
    let box_range = (t0, t1);
    for (k, pk) in g.pieces.iter().enumerate() {
        if k == i || k == j {
            continue;
        }
        // g_i(o + t d) >= g_k(o + t d): alpha t + beta >= 0
        let alpha = geom::dot(&pi.a, &d) - geom::dot(&pk.a, &d);
        let beta = geom::dot(&pi.a, &o) + pi.b - geom::dot(&pk.a, &o) - pk.b;
        if alpha.abs() < 1e-13 {
            if beta < -1e-11 * (1.0 + beta.abs()) {
                return None;
            }
            continue;
        }
        let root = -beta / alpha;
        if alpha > 0.0 {
            t0 = t0.max(root);
        } else {
            t1 = t1.min(root);
        }
        if t0 > t1 + 1e-12 {
            return None;
        }
    }
    if t0 > t1 {
        t1 = t0;
    }
    let clipped = t0 <= box_range.0 + 1e-12 || t1 >= box_range.1 - 1e-12;
    Some(((t0, t1, clipped), o, d))
}

fn canonical_line(a1: &[f64], b1: f64, a2: &[f64], b2: f64) -> Option<Line> {
    let n = [a1[0] - a2[0], a1[1] - a2[1]];
    let len = (n[0] * n[0] + n[1] * n[1]).sqrt();
    if len < 1e-14 {
        return None;
    }
    Some(Line { n: [n[0] / len, n[1] / len], c: (b2 - b1) / len })
}

/// Exact zero set of `f` intersected with the locus where the Clarke hull
/// has a vertex of norm above eps, covered by segments.
pub fn zero_set_large_subdiff_2d(
    f: &DCFunction,
    eps: f64,
    bbox: &BoundingBox,
) -> Result<SegmentCover> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    if eps <= 0.0 {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    let mut segments: Vec<CoverSegment> = Vec::new();
    let mut clipped = false;
    let zero_tol = |p: &[f64]| 1e-10 * (1.0 + f.g.eval(p).abs().max(f.h.eval(p).abs()));

    // (a) zero lines of certified full-dimensional cells
    for (i, gp) in f.g.pieces.iter().enumerate() {
        for (j, hp) in f.h.pieces.iter().enumerate() {
            let grad = geom::sub(&gp.a, &hp.a);
            let off = gp.b - hp.b;
            if geom::norm(&grad) <= eps {
                continue;
            }
            if !cell_full_dimensional(f, i, j, bbox)? {
                continue;
            }
            // clip {grad . x + off = 0} to the weak cell and box
            let Some(line) = canonical_line(&grad, off, &[0.0, 0.0], 0.0) else {
                continue;
            };
            let (o, d) = line.origin_dir();
            let params = arrangement::clip_params(&o, &d, bbox);
            if params.is_empty() {
                continue;
            }
            let (mut t0, mut t1) = (params[0], params[params.len() - 1]);
            let box_range = (t0, t1);
            let mut empty = false;
            let mut constrain = |a: &[f64], b_self: f64, a_other: &[f64], b_other: f64| {
                let alpha = geom::dot(a, &d) - geom::dot(a_other, &d);
                let beta = geom::dot(a, &o) + b_self - geom::dot(a_other, &o) - b_other;
                if alpha.abs() < 1e-13 {
                    if beta < -1e-11 * (1.0 + beta.abs()) {
                        empty = true;
                    }
                    return;
                }
                let root = -beta / alpha;
                if alpha > 0.0 {
                    t0 = t0.max(root);
                } else {
                    t1 = t1.min(root);
                }
            };
            for (k, gk) in f.g.pieces.iter().enumerate() {
                if k != i {
                    constrain(&gp.a, gp.b, &gk.a, gk.b);
                }
            }
            for (l, hl) in f.h.pieces.iter().enumerate() {
                if l != j {
                    constrain(&hp.a, hp.b, &hl.a, hl.b);
                }
            }
            if empty || t0 > t1 + 1e-12 {
                continue;
            }
            if t0 > t1 {
                t1 = t0;
            }
            clipped |= t0 <= box_range.0 + 1e-12 || t1 >= box_range.1 - 1e-12;
            segments.push(CoverSegment {
                a: vec![o[0] + t0 * d[0], o[1] + t0 * d[1]],
                b: vec![o[0] + t1 * d[0], o[1] + t1 * d[1]],
                provenance: Provenance::CellZero { g_piece: i, h_piece: j },
            });
        }
    }

    // (b) seam strata: zero parts of the one-dimensional restrictions
    let lines = arrangement::seam_lines(f);
    for (li, line) in lines.iter().enumerate() {
        let (o, d) = line.origin_dir();
        let params = arrangement::clip_params(&o, &d, bbox);
        if params.is_empty() {
            continue;
        }
        let (t_lo, t_hi) = (params[0], params[params.len() - 1]);
        let mut ts = vec![t_lo, t_hi];
        for other in &lines {
            if std::ptr::eq(line, other) {
                continue;
            }
            if let Some(p) = arrangement::line_intersection(line, other) {
                let t = (p[0] - o[0]) * d[0] + (p[1] - o[1]) * d[1];
                if t > t_lo && t < t_hi {
                    ts.push(t);
                }
            }
        }
        let pwa = arrangement::restrict_to_line(f, o.as_ref(), d.as_ref());
        ts.extend(pwa.breaks_within(t_lo, t_hi));
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * (1.0 + b.abs()));
        for w in ts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 < 1e-12 {
                continue;
            }
            let at = |t: f64| vec![o[0] + t * d[0], o[1] + t * d[1]];
            let (f0, f1) = (pwa.eval(t0), pwa.eval(t1));
            let tol0 = zero_tol(&at(t0));
            let mid = at(0.5 * (t0 + t1));
            if f0.abs() <= tol0 && f1.abs() <= zero_tol(&at(t1)) {
                // the whole stratum lies in the zero set
                if hull_has_large_vertex(f, &mid, eps)? {
                    segments.push(CoverSegment {
                        a: at(t0),
                        b: at(t1),
                        provenance: Provenance::Seam { component: Component::G, i: li, j: li },
                    });
                }
            } else {
                // isolated zero inside the stratum, if any
                let slope = (f1 - f0) / (t1 - t0);
                if slope.abs() > 1e-13 {
                    let t_star = t0 - f0 / slope;
                    if t_star > t0 + 1e-12 && t_star < t1 - 1e-12 {
                        let p = at(t_star);
                        if hull_has_large_vertex(f, &p, eps)? {
                            segments.push(CoverSegment {
                                a: p.clone(),
                                b: p,
                                provenance: Provenance::Seam {
                                    component: Component::G,
                                    i: li,
                                    j: li,
                                },
                            });
                        }
                    }
                }
            }
        }
    }

    // (c) arrangement vertices on the zero set
    for v in arrangement::vertices_in_box(&lines, bbox) {
        if f.value(&v).abs() <= zero_tol(&v) && hull_has_large_vertex(f, &v, eps)? {
            segments.push(CoverSegment {
                a: v.to_vec(),
                b: v.to_vec(),
                provenance: Provenance::Vertex,
            });
        }
    }

    Ok(SegmentCover { segments, clipped })
}

fn hull_has_large_vertex(f: &DCFunction, x: &[f64], eps: f64) -> Result<bool> {
    let sd = subdiff::subdiff(f, x, SubdiffMode::Clarke, subdiff::DEFAULT_TOL)?;
    Ok(sd.hull.vertices.iter().any(|v| geom::norm(v) > eps))
}

/// Is the open cell of the pair (i, j) full-dimensional anywhere in the box?
fn cell_full_dimensional(f: &DCFunction, i: usize, j: usize, bbox: &BoundingBox) -> Result<bool> {
    let mut strict = Vec::new();
    let gp = &f.g.pieces[i];
    for (k, gk) in f.g.pieces.iter().enumerate() {
        if k != i {
            strict.push(Constraint::new(geom::sub(&gk.a, &gp.a), gp.b - gk.b));
        }
    }
    let hp = &f.h.pieces[j];
    for (l, hl) in f.h.pieces.iter().enumerate() {
        if l != j {
            strict.push(Constraint::new(geom::sub(&hl.a, &hp.a), hp.b - hl.b));
        }
    }
    if strict.is_empty() {
        return Ok(true);
    }
    let weak = vec![
        Constraint::new(vec![1.0, 0.0], bbox.hi[0]),
        Constraint::new(vec![-1.0, 0.0], -bbox.lo[0]),
        Constraint::new(vec![0.0, 1.0], bbox.hi[1]),
        Constraint::new(vec![0.0, -1.0], -bbox.lo[1]),
    ];
    match lp::max_slack(&strict, &weak, 1.0) {
        Some(s) => Ok(s > subdiff::TOL_CELL),
        None => Ok(false),
    }
}

/// Report of the boundary-cover computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCoverReport {
    pub cover: SegmentCover,
    pub margin: f64,
    /// Worst distance from a traced near-boundary point to the cover.
    pub worst_trace_distance: f64,
    pub verified: bool,
}

/// Cover of the boundary of `{f <= 0}` for a verified aura: the zero-set
/// cover at threshold margin/2, cross-checked against a level trace at a
/// tiny positive level.
pub fn boundary_cover_2d(
    f: &DCFunction,
    plan: &SamplingPlan,
    grid: f64,
) -> Result<BoundaryCoverReport> {
    let bbox = plan.bbox();
    let report = crate::aura::check_weak_regularity(f, 0.0, 0.5, plan, 0.0)?;
    let margin = report.margin;
    if margin.is_nan() || margin <= 0.0 {
        return Err(Error::RegularityViolation {
            point: report.violations.first().cloned().unwrap_or_default(),
            norm: margin,
            required: f64::MIN_POSITIVE,
        });
    }
    let eps = if margin.is_finite() { 0.5 * margin } else { 0.5 };
    let cover = zero_set_large_subdiff_2d(f, eps, &bbox)?;
    // probe: boundary points found by the level tracer near zero
    let r_trace = 1e-6;
    let loops = crate::topology::level_loops_2d(f, r_trace, grid, &bbox)?;
    let mut worst = 0.0f64;
    for lp in &loops.loops {
        for p in lp {
            worst = worst.max(cover.distance_to(p));
        }
    }
    let verified = worst <= 10.0 * (2.0 * r_trace / eps.min(1.0)) + 1e-9;
    Ok(BoundaryCoverReport { cover, margin, worst_trace_distance: worst, verified })
}
