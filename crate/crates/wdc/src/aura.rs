//! Aura construction and weak-regularity verification.
//!
//! An aura is a nonnegative DC function whose zero set is the target set and
//! whose subgradients stay away from zero on a shell just outside it. The
//! constructors here stay inside the polyhedral world by using the sup and
//! l1 norms in place of the Euclidean one, so every margin can be computed
//! exactly in the plane by arrangement enumeration.

use serde::{Deserialize, Serialize};

use crate::arrangement;
use crate::dc::{self, AffineMap, DCFunction, MaxAffine};
use crate::error::{Error, Result};
use crate::geom::BoundingBox;
use crate::planar::OpenSectorSpec;
use crate::polytope::{self, VPolytope};
use crate::sample::SamplingPlan;
use crate::subdiff::{self, SubdiffMode};

/// Angular tolerance for the antipodal test, in radians.
pub const THETA_TOUCH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarginMode {
    ExactPwa2d,
    Sampled,
}

/// Verification report for a level of a DC function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AuraReport {
    pub level: f64,
    pub eps_probe: f64,
    /// Shell width actually used; smaller than requested when the probe box
    /// truncates the requested shell.
    pub eps_used: f64,
    /// Strata inspected (exact mode) or shell samples visited (sampled).
    pub samples: usize,
    /// Infimum of the min-norm Clarke subgradient over the shell.
    pub margin: f64,
    pub mode: MarginMode,
    /// Witness points whose local min-norm falls below the threshold.
    pub violations: Vec<Vec<f64>>,
    pub note: Option<String>,
}

/// Result of probing two auras for weakly touching normals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeakTouchReport {
    pub touched: bool,
    /// Point and unit direction with `v` normal to the first aura and `-v`
    /// normal to the second.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
    pub probes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolyNorm {
    Sup,
    L1,
}

/// Distance aura to an axis-aligned box carrier in a polyhedral norm.
///
/// The vertex list must span a coordinate box (every corner present); for
/// other carriers use an affine change of frame and compose. Degenerate
/// boxes (points, segments, rectangles of lower dimension) are fine.
pub fn aura_distance_polytope(p: &VPolytope, norm: PolyNorm) -> Result<DCFunction> {
    let d = p.dim();
    if d > 3 {
        return Err(Error::Unsupported(format!(
            "distance auras are polyhedral only up to dimension 3, got {d}"
        )));
    }
    let lo: Vec<f64> = (0..d)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    // the carrier must actually be the box spanned by the bounds
    let scale = 1.0 + p.radius();
    for corner in (BoundingBox { lo: lo.clone(), hi: hi.clone() }).corners() {
        let present = p
            .vertices
            .iter()
            .any(|v| crate::geom::dist(v, &corner) <= 1e-9 * scale);
        if !present {
            return Err(Error::Unsupported(
                "distance aura carrier must be an axis-aligned box given by its corners; \
                 use an affine frame for rotated carriers"
                    .into(),
            ));
        }
    }
    for v in &p.vertices {
        let on_box = (0..d).all(|i| v[i] >= lo[i] - 1e-9 * scale && v[i] <= hi[i] + 1e-9 * scale);
        if !on_box {
            return Err(Error::Internal("vertex escaped its own bounding box".into()));
        }
    }
    Ok(box_distance(&lo, &hi, norm))
}

/// Distance to the box `[lo, hi]` in the chosen polyhedral norm, as an
/// exact convex max-affine DC function.
pub fn box_distance(lo: &[f64], hi: &[f64], norm: PolyNorm) -> DCFunction {
    let d = lo.len();
    let coord = |i: usize| -> MaxAffine {
        // distance of x_i to [lo_i, hi_i]
        let mut e_pos = vec![0.0; d];
        e_pos[i] = 1.0;
        let mut e_neg = vec![0.0; d];
        e_neg[i] = -1.0;
        MaxAffine::new(vec![
            AffineMap::new(e_pos, -hi[i]),
            AffineMap::new(e_neg, lo[i]),
            AffineMap::constant(d, 0.0),
        ])
    };
    match norm {
        PolyNorm::Sup => {
            let mut pieces = vec![AffineMap::constant(d, 0.0)];
            for i in 0..d {
                pieces.extend(coord(i).pieces);
            }
            DCFunction::from_convex(MaxAffine::new(pieces))
        }
        PolyNorm::L1 => {
            let mut acc = coord(0);
            for i in 1..d {
                acc = acc.sum(&coord(i));
            }
            DCFunction::from_convex(acc)
        }
    }
}

/// Square aura used throughout the test shapes: sup-distance to the square
/// centered at `c` with half-side `r`.
pub fn square_aura(c: &[f64], r: f64) -> DCFunction {
    let lo: Vec<f64> = c.iter().map(|x| x - r).collect();
    let hi: Vec<f64> = c.iter().map(|x| x + r).collect();
    box_distance(&lo, &hi, PolyNorm::Sup)
}

/// Hypograph aura of a one-dimensional DC function: `max(y - phi(x), 0)`,
/// built as `max(y + h(x), g(x)) - g(x)` so every subgradient of a strictly
/// positive point has second coordinate exactly one.
pub fn aura_hypograph(phi: &DCFunction) -> Result<DCFunction> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: phi.dim() });
    }
    let lift_y = |m: &MaxAffine, y_coef: f64| -> MaxAffine {
        MaxAffine::new(
            m.pieces
                .iter()
                .map(|p| AffineMap::new(vec![p.a[0], y_coef], p.b))
                .collect(),
        )
    };
    let g2 = lift_y(&phi.g, 0.0);
    let h2_plus_y = lift_y(&phi.h, 1.0);
    Ok(DCFunction::new(h2_plus_y.max(&g2), g2))
}

/// Lift a one-dimensional DC function to the plane as `f(x)`.
pub fn lift_to_plane(f: &DCFunction) -> DCFunction {
    assert_eq!(f.dim(), 1);
    f.precompose(&[vec![1.0, 0.0]], &[0.0])
}

/// Clamp composition `f(max(x, 0))` for a one-dimensional DC function.
pub fn clamp_nonneg(f: &DCFunction) -> DCFunction {
    assert_eq!(f.dim(), 1);
    let term = |p: &AffineMap| -> DCFunction {
        // a * max(x, 0) + b
        let a = p.a[0];
        if a >= 0.0 {
            DCFunction::from_convex(MaxAffine::new(vec![
                AffineMap::new(vec![a], p.b),
                AffineMap::new(vec![0.0], p.b),
            ]))
        } else {
            DCFunction::new(
                MaxAffine::constant(1, p.b),
                MaxAffine::new(vec![
                    AffineMap::new(vec![-a], 0.0),
                    AffineMap::new(vec![0.0], 0.0),
                ]),
            )
        }
    };
    let compose = |m: &MaxAffine| -> DCFunction {
        let parts: Vec<DCFunction> = m.pieces.iter().map(term).collect();
        dc::max_of(&parts).expect("nonempty piece list")
    };
    let g = compose(&f.g);
    let h = compose(&f.h);
    g.add(&h.scale(-1.0)).expect("dimensions agree")
}

/// Aura of a degenerate sector in frame coordinates: zero set
/// `{x >= 0, g_lo(x) <= y <= h_hi(x)}`, with the off-sector branch measured
/// in the l1 norm. `frame` rotates the sector into world coordinates.
///
/// Requires `g_lo(0) = h_hi(0) = 0` and `g_lo <= h_hi` on the nonnegative
/// axis; the boundaries need not have zero slope at the apex.
pub fn aura_degenerate_sector(
    g_lo: &DCFunction,
    h_hi: &DCFunction,
    frame: f64,
) -> Result<DCFunction> {
    for f in [g_lo, h_hi] {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
        }
        if f.value(&[0.0]).abs() > 1e-9 {
            return Err(Error::Invalid("sector boundaries must vanish at the apex".into()));
        }
    }
    if let Some(x) = ordering_violation_nonneg(g_lo, h_hi) {
        return Err(Error::Invalid(format!(
            "ordering violated: lower boundary exceeds upper near x = {x}"
        )));
    }
    // clamp to freeze the boundaries at zero for x <= 0
    let lo_c = lift_to_plane(&clamp_nonneg(g_lo));
    let hi_c = lift_to_plane(&clamp_nonneg(h_hi));
    let y = DCFunction::affine(AffineMap::new(vec![0.0, 1.0], 0.0));
    let zero = DCFunction::constant(2, 0.0);
    let below = lo_c.add(&y.scale(-1.0))?;
    let above = y.add(&hi_c.scale(-1.0))?;
    let b = dc::max_of(&[below, above, zero])?;

    // l1 branch with a slope penalty that hands control to `b` for x >= 0
    let k = g_lo.lipschitz().max(h_hi.lipschitz());
    let abs_y = DCFunction::from_convex(MaxAffine::new(vec![
        AffineMap::new(vec![0.0, 1.0], 0.0),
        AffineMap::new(vec![0.0, -1.0], 0.0),
    ]));
    let x_aff = DCFunction::affine(AffineMap::new(vec![1.0, 0.0], 0.0));
    let penalty = DCFunction::from_convex(MaxAffine::new(vec![
        AffineMap::new(vec![k, 0.0], 0.0),
        AffineMap::constant(2, 0.0),
    ]));
    let a = abs_y.add(&x_aff.scale(-1.0))?.add(&penalty.scale(-1.0))?;

    let g0 = b.max(&a)?;
    Ok(g0.precompose_rotation2(-frame, &[0.0, 0.0]))
}

fn ordering_violation_nonneg(lower: &DCFunction, upper: &DCFunction) -> Option<f64> {
    let diff = crate::pwa1::Pwa1::from_dc(upper).sub(&crate::pwa1::Pwa1::from_dc(lower));
    let tol = 1e-10;
    let mut xs = vec![0.0];
    xs.extend(diff.breaks.iter().cloned().filter(|&b| b > 0.0));
    for &x in &xs {
        if diff.eval(x) < -tol {
            return Some(x);
        }
    }
    // tail slope decides behavior at infinity
    let last = *diff.lines.last().unwrap();
    if last.0 < -tol {
        return Some(xs.last().unwrap() + 1.0);
    }
    None
}

/// Aura whose zero set is the complement of a union of pairwise disjoint
/// open sectors: the max of per-sector hypograph auras in rotated frames.
pub fn aura_sector_complement(sectors: &[OpenSectorSpec]) -> Result<DCFunction> {
    if sectors.is_empty() {
        return Err(Error::EmptyInput("aura_sector_complement"));
    }
    for spec in sectors {
        let v = crate::planar::validate_open_sector(spec)?;
        if !v.pass {
            return Err(Error::Invalid(format!(
                "sector gauge not monotone at {:?}",
                v.violation_at
            )));
        }
    }
    if !crate::planar::sectors_pairwise_disjoint(sectors, 20_000)? {
        return Err(Error::Invalid("sectors overlap".into()));
    }
    let parts: Result<Vec<DCFunction>> = sectors
        .iter()
        .map(|spec| {
            let basic = aura_hypograph(&spec.boundary)?;
            Ok(basic.precompose_rotation2(-spec.rotation, &[0.0, 0.0]))
        })
        .collect();
    dc::max_of(&parts?)
}

/// Union of two aura zero sets through the pointwise min combination:
/// `min(f, g) = 0` exactly where `f = 0` or `g = 0`.
pub fn aura_union_min(f: &DCFunction, g: &DCFunction) -> Result<DCFunction> {
    f.min(g)
}

/// Sum of two auras, refused when they weakly touch. The zero set of the
/// sum is the intersection of the zero sets; on success the touch report
/// accompanies the combined aura as probe evidence.
pub fn aura_sum(
    f: &DCFunction,
    g: &DCFunction,
    plan: &SamplingPlan,
) -> Result<(DCFunction, WeakTouchReport)> {
    let report = weak_touch(f, g, plan)?;
    if report.touched {
        let (point, direction) = report.witness.clone().expect("touch carries a witness");
        return Err(Error::WeakTouch { point, direction });
    }
    Ok((f.add(g)?, report))
}

/// Probe two auras for weakly touching normals: a common zero point where
/// the normalized Clarke sets contain an antipodal pair. Untouched is a
/// semidecision; probes are the plan points plus, in the plane, all seam
/// arrangement vertices of both functions.
pub fn weak_touch(f: &DCFunction, g: &DCFunction, plan: &SamplingPlan) -> Result<WeakTouchReport> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: g.dim() });
    }
    let d = f.dim();
    let zero_tol = 1e-9;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if d == 2 {
        let mut lines = arrangement::seam_lines(f);
        lines.extend(arrangement::seam_lines(g));
        let bbox = plan.bbox();
        for v in arrangement::vertices_in_box(&lines, &bbox) {
            candidates.push(v.to_vec());
        }
    }
    candidates.extend(plan.points());

    let mut probes = 0usize;
    for x in &candidates {
        let fx = f.value(x);
        let gx = g.value(x);
        let scale = 1.0 + fx.abs().max(gx.abs());
        if fx.abs() > zero_tol * scale || gx.abs() > zero_tol * scale {
            continue;
        }
        probes += 1;
        if let Some(dir) = touch_at(f, g, x)? {
            return Ok(WeakTouchReport { touched: true, witness: Some((x.clone(), dir)), probes });
        }
    }
    Ok(WeakTouchReport { touched: false, witness: None, probes })
}

/// Antipodal-pair test of the normalized Clarke sets at a common zero.
fn touch_at(f: &DCFunction, g: &DCFunction, x: &[f64]) -> Result<Option<Vec<f64>>> {
    let d = f.dim();
    let pf = subdiff::subdiff(f, x, SubdiffMode::Clarke, subdiff::DEFAULT_TOL)?.hull;
    let pg = subdiff::subdiff(g, x, SubdiffMode::Clarke, subdiff::DEFAULT_TOL)?.hull;
    let tiny = 1e-10;
    if d == 2 {
        let af = polytope::angular_set_2d(&pf, tiny);
        let ag = polytope::angular_set_2d(&pg, tiny);
        if let Some(theta) = polytope::antipodal_witness(&af, &ag, THETA_TOUCH) {
            return Ok(Some(vec![theta.cos(), theta.sin()]));
        }
        return Ok(None);
    }
    // other dimensions: vertex-pair scan (semidecision)
    for u in &pf.vertices {
        let nu = crate::geom::norm(u);
        if nu <= tiny {
            continue;
        }
        for v in &pg.vertices {
            let nv = crate::geom::norm(v);
            if nv <= tiny {
                continue;
            }
            let cosang = crate::geom::dot(u, v) / (nu * nv);
            if cosang <= -(1.0 - 0.5 * THETA_TOUCH * THETA_TOUCH) {
                return Ok(Some(crate::geom::scale(u, 1.0 / nu)));
            }
        }
    }
    Ok(None)
}

/// Weak-regularity verification of the level `c` of `f`.
///
/// In the plane the margin is the exact infimum over the shell
/// `{c < f < c + eps}` by strata enumeration; in dimension 3 it is the
/// minimum over the shell samples of the plan. The sublevel set must be
/// nonempty and bounded inside the plan box.
pub fn check_weak_regularity(
    f: &DCFunction,
    c: f64,
    eps_probe: f64,
    plan: &SamplingPlan,
    violation_threshold: f64,
) -> Result<AuraReport> {
    if eps_probe <= 0.0 {
        return Err(Error::Invalid("eps_probe must be positive".into()));
    }
    let d = f.dim();
    let bbox = plan.bbox();
    if bbox.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: bbox.dim() });
    }
    match d {
        2 => {
            arrangement::require_bounded_sublevel(f, c, &bbox)?;
            let bmin = arrangement::boundary_min(f, &bbox);
            let mut eps_used = eps_probe;
            let mut note = None;
            if bmin <= c + eps_probe {
                eps_used = 0.5 * (bmin - c);
                note = Some(format!(
                    "shell truncated by the probe box: eps reduced to {eps_used}"
                ));
            }
            let minv = arrangement::min_in_box(f, &bbox);
            if minv >= c + eps_probe {
                // the whole band lies below the function range: an empty
                // shell is reported, not an error
                return Ok(AuraReport {
                    level: c,
                    eps_probe,
                    eps_used,
                    samples: 0,
                    margin: f64::INFINITY,
                    mode: MarginMode::ExactPwa2d,
                    violations: Vec::new(),
                    note: Some(format!("empty shell: inf f = {minv} exceeds c + eps")),
                });
            }
            if minv > c {
                return Err(Error::Invalid(format!("sublevel {{f <= {c}}} empty in the probe box")));
            }
            match arrangement::shell_margin_exact(f, c, eps_used, &bbox, subdiff::DEFAULT_TOL)? {
                Some((margin, witnesses, strata)) => {
                    let violations = witnesses
                        .iter()
                        .filter(|w| w.min_norm < violation_threshold && !w.point.is_empty())
                        .map(|w| w.point.clone())
                        .collect();
                    Ok(AuraReport {
                        level: c,
                        eps_probe,
                        eps_used,
                        samples: strata,
                        margin,
                        mode: MarginMode::ExactPwa2d,
                        violations,
                        note,
                    })
                }
                None => Ok(AuraReport {
                    level: c,
                    eps_probe,
                    eps_used,
                    samples: 0,
                    margin: f64::INFINITY,
                    mode: MarginMode::ExactPwa2d,
                    violations: Vec::new(),
                    note: Some("empty shell: no stratum between the levels".into()),
                }),
            }
        }
        3 => {
            // boundedness is probed on the box faces
            let face_plan = SamplingPlan::new(plan.seed ^ 0xface, bbox.clone(), 2048);
            for p in face_plan.points() {
                for i in 0..3 {
                    for &side in &[bbox.lo[i], bbox.hi[i]] {
                        let mut q = p.clone();
                        q[i] = side;
                        if f.value(&q) <= c {
                            return Err(Error::UnboundedSublevel { level: c });
                        }
                    }
                }
            }
            // sampled mode: min over shell samples with the deterministic plan
            let mut min_value = f64::INFINITY;
            let mut margin = f64::INFINITY;
            let mut samples = 0usize;
            let mut violations = Vec::new();
            for p in plan.points() {
                let v = f.value(&p);
                min_value = min_value.min(v);
                if v > c && v < c + eps_probe {
                    samples += 1;
                    let mn = subdiff::clarke_min_norm(f, &p, subdiff::DEFAULT_TOL)?;
                    if mn.norm < margin {
                        margin = mn.norm;
                    }
                    if mn.norm < violation_threshold {
                        violations.push(p.clone());
                    }
                }
            }
            if min_value >= c + eps_probe {
                return Ok(AuraReport {
                    level: c,
                    eps_probe,
                    eps_used: eps_probe,
                    samples: 0,
                    margin: f64::INFINITY,
                    mode: MarginMode::Sampled,
                    violations: Vec::new(),
                    note: Some(format!(
                        "empty shell: sampled inf f = {min_value} exceeds c + eps"
                    )),
                });
            }
            let note = if min_value > c {
                // thin sublevel sets are rarely hit by samples; report
                // rather than refuse
                "sampled mode: margin is an upper bound of the infimum; \
                 sublevel membership not witnessed by any sample"
            } else {
                "sampled mode: margin is an upper bound of the infimum"
            };
            Ok(AuraReport {
                level: c,
                eps_probe,
                eps_used: eps_probe,
                samples,
                margin,
                mode: MarginMode::Sampled,
                violations,
                note: Some(note.into()),
            })
        }
        other => Err(Error::Unsupported(format!(
            "weak-regularity checks cover dimensions 2 and 3, got {other}"
        ))),
    }
}

/// First probe point where the sign pattern of `f` disagrees with the
/// membership oracle (inside: f = 0, outside: f > 0). Points within
/// `band` of the zero level are skipped as boundary-ambiguous.
pub fn zero_set_disagreement(
    f: &DCFunction,
    is_member: impl Fn(&[f64]) -> bool,
    plan: &SamplingPlan,
    band: f64,
) -> Option<Vec<f64>> {
    for p in plan.points() {
        let v = f.value(&p);
        let inside = is_member(&p);
        if inside && v.abs() > band {
            return Some(p);
        }
        if !inside && v <= band {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dc::{l1_norm, sup_norm};

    fn unit_square_aura() -> DCFunction {
        square_aura(&[0.0, 0.0], 1.0)
    }

    #[test]
    fn square_sup_distance_values() {
        let f = unit_square_aura();
        assert_eq!(f.value(&[2.0, 0.0]), 1.0);
        assert_eq!(f.value(&[0.5, -0.5]), 0.0);
        assert_eq!(f.value(&[-3.0, 2.0]), 2.0);
    }

    #[test]
    fn point_aura_is_sup_norm() {
        let p = VPolytope::new(vec![vec![0.0, 0.0]]);
        let f = aura_distance_polytope(&p, PolyNorm::Sup).unwrap();
        let plan = SamplingPlan::new(3, BoundingBox::centered(2, 2.0), 500);
        let sup = sup_norm(2);
        for x in plan.points() {
            assert!((f.value(&x) - sup.value(&x)).abs() < 1e-12);
        }
    }

    #[test]
    fn segment_aura_l1_formula() {
        // conv{(0,0),(1,0)} with l1 distance: max(-x, x-1, 0) + |y|
        let p = VPolytope::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]);
        let f = aura_distance_polytope(&p, PolyNorm::L1).unwrap();
        let plan = SamplingPlan::new(5, BoundingBox::centered(2, 3.0), 10_000);
        for x in plan.points() {
            let want = (-x[0]).max(x[0] - 1.0).max(0.0) + x[1].abs();
            assert!((f.value(&x) - want).abs() < 1e-12, "at {x:?}");
            let on_segment = x[1] == 0.0 && (0.0..=1.0).contains(&x[0]);
            assert_eq!(f.value(&x) == 0.0, on_segment);
        }
        // exact zeros on the segment itself
        for t in [0.0, 0.25, 0.5, 1.0] {
            assert_eq!(f.value(&[t, 0.0]), 0.0);
        }
    }

    #[test]
    fn non_box_carrier_rejected() {
        let p = VPolytope::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(matches!(
            aura_distance_polytope(&p, PolyNorm::Sup),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn hypograph_values() {
        let f = aura_hypograph(&crate::dc::abs_1d()).unwrap();
        assert_eq!(f.value(&[0.0, 1.0]), 1.0);
        assert_eq!(f.value(&[0.0, -1.0]), 0.0);
    }

    #[test]
    fn hypograph_second_coordinate_exactly_one() {
        let f = aura_hypograph(&crate::dc::abs_1d()).unwrap();
        let plan = SamplingPlan::new(8, BoundingBox::centered(2, 3.0), 1000);
        for p in plan.points() {
            if f.value(&p) <= 1e-9 {
                continue;
            }
            let sd = subdiff::subdiff(&f, &p, SubdiffMode::Clarke, subdiff::DEFAULT_TOL).unwrap();
            for v in &sd.hull.vertices {
                assert_eq!(v[1], 1.0, "vertex {v:?} at {p:?}");
            }
        }
    }

    #[test]
    fn hypograph_clarke_at_apex_shell_point() {
        let f = aura_hypograph(&crate::dc::abs_1d()).unwrap();
        let sd = subdiff::subdiff(&f, &[0.0, 1.0], SubdiffMode::Clarke, subdiff::DEFAULT_TOL)
            .unwrap();
        let mut verts = sd.hull.vertices.clone();
        verts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(verts, vec![vec![-1.0, 1.0], vec![1.0, 1.0]]);
    }

    #[test]
    fn degenerate_sector_graph_case_is_l1_ray_distance() {
        let zero = DCFunction::constant(1, 0.0);
        let g = aura_degenerate_sector(&zero, &zero, 0.0).unwrap();
        let plan = SamplingPlan::new(4, BoundingBox::centered(2, 2.0), 4000);
        for p in plan.points() {
            let want = p[1].abs() + (-p[0]).max(0.0);
            assert!((g.value(&p) - want).abs() < 1e-12, "at {p:?}");
        }
        assert_eq!(g.value(&[-1.0, 0.0]), 1.0);
    }

    #[test]
    fn degenerate_sector_branch_values() {
        // g_lo = 0, h_hi = x
        let zero = DCFunction::constant(1, 0.0);
        let ident = DCFunction::affine(AffineMap::new(vec![1.0], 0.0));
        let g = aura_degenerate_sector(&zero, &ident, 0.0).unwrap();
        assert_eq!(g.value(&[1.0, 0.5]), 0.0);
        assert_eq!(g.value(&[1.0, 2.0]), 1.0);
        assert_eq!(g.value(&[1.0, -1.0]), 1.0);
    }

    #[test]
    fn degenerate_sector_ordering_rejected() {
        let zero = DCFunction::constant(1, 0.0);
        let neg = DCFunction::affine(AffineMap::new(vec![-1.0], 0.0));
        // lower = 0 > upper = -x for x > 0
        assert!(matches!(
            aura_degenerate_sector(&zero, &neg, 0.0),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn margin_of_sup_norm_exact() {
        let f = sup_norm(2);
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 4.0), 100);
        let rep = check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0).unwrap();
        assert_eq!(rep.mode, MarginMode::ExactPwa2d);
        assert!((rep.margin - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn sampled_margin_in_three_dimensions() {
        // d = 3 falls back to sampled mode over the plan shell points
        let f = sup_norm(3);
        let plan = SamplingPlan::new(9, BoundingBox::centered(3, 2.0), 8000);
        let rep = check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0).unwrap();
        assert_eq!(rep.mode, MarginMode::Sampled);
        assert!(rep.samples > 60, "only {} shell samples", rep.samples);
        // plan points are almost surely smooth, with unit gradients
        assert!((rep.margin - 1.0).abs() < 1e-9, "margin {}", rep.margin);
        // deterministic for a fixed seed
        let rep2 = check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0).unwrap();
        assert_eq!(rep.margin, rep2.margin);
        assert_eq!(rep.samples, rep2.samples);
        // dimensions above three are refused
        let f4 = sup_norm(4);
        let plan4 = SamplingPlan::new(9, BoundingBox::centered(4, 2.0), 100);
        assert!(matches!(
            check_weak_regularity(&f4, 0.0, 0.5, &plan4, 0.0),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn box_aura_in_three_dimensions() {
        let p = VPolytope::new(
            BoundingBox::new(vec![-1.0, 0.0, -0.5], vec![1.0, 2.0, 0.5]).corners(),
        );
        let f = aura_distance_polytope(&p, PolyNorm::Sup).unwrap();
        assert_eq!(f.value(&[0.0, 1.0, 0.0]), 0.0);
        assert_eq!(f.value(&[3.0, 1.0, 0.0]), 2.0);
        assert_eq!(f.value(&[0.0, 1.0, 2.0]), 1.5);
        // smooth-region subdifferential in 3d is a singleton
        let sd = subdiff::subdiff(&f, &[2.0, 2.5, 0.6], SubdiffMode::Clarke, subdiff::DEFAULT_TOL)
            .unwrap();
        assert_eq!(sd.hull.vertices, vec![vec![1.0, 0.0, 0.0]]);
        // the equidistant corner direction sees all three face gradients
        let sd = subdiff::subdiff(&f, &[2.0, 3.0, 1.5], SubdiffMode::Clarke, subdiff::DEFAULT_TOL)
            .unwrap();
        assert_eq!(sd.hull.vertices.len(), 3);
    }

    #[test]
    fn margin_of_capped_wedge_is_one() {
        // max(y - 3x, y + 3x, 0) capped by a steep l1 cone
        let wedge = dc::max_of(&[
            DCFunction::affine(AffineMap::new(vec![-3.0, 1.0], 0.0)),
            DCFunction::affine(AffineMap::new(vec![3.0, 1.0], 0.0)),
            DCFunction::constant(2, 0.0),
        ])
        .unwrap();
        let cap = l1_norm(2).scale(10.0).add(&DCFunction::constant(2, -100.0)).unwrap();
        let f = wedge.max(&cap).unwrap();
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 60.0), 100);
        let rep = check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0).unwrap();
        assert!((rep.margin - 1.0).abs() < 1e-12, "margin {}", rep.margin);
    }

    #[test]
    fn margin_of_sup_capped_wedge_hits_corner_seam() {
        // the sup-norm cap introduces corner seams with min-norm 3/sqrt(13)
        let wedge = dc::max_of(&[
            DCFunction::affine(AffineMap::new(vec![-3.0, 1.0], 0.0)),
            DCFunction::affine(AffineMap::new(vec![3.0, 1.0], 0.0)),
            DCFunction::constant(2, 0.0),
        ])
        .unwrap();
        let cap = sup_norm(2).add(&DCFunction::constant(2, -10.0)).unwrap();
        let f = wedge.max(&cap).unwrap();
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 20.0), 100);
        let rep = check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0).unwrap();
        let want = 3.0 / 13f64.sqrt();
        assert!((rep.margin - want).abs() < 1e-12, "margin {}", rep.margin);
    }

    #[test]
    fn unbounded_sublevel_rejected() {
        // f = max(y, 0): halfplane sublevel
        let f = dc::max_of(&[
            DCFunction::affine(AffineMap::new(vec![0.0, 1.0], 0.0)),
            DCFunction::constant(2, 0.0),
        ])
        .unwrap();
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 3.0), 100);
        assert!(matches!(
            check_weak_regularity(&f, 0.0, 0.5, &plan, 0.0),
            Err(Error::UnboundedSublevel { .. })
        ));
    }

    #[test]
    fn margin_monotone_in_eps() {
        let f = unit_square_aura();
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 5.0), 100);
        let wide = check_weak_regularity(&f, 0.0, 1.0, &plan, 0.0).unwrap();
        let narrow = check_weak_regularity(&f, 0.0, 0.25, &plan, 0.0).unwrap();
        assert!(narrow.margin >= wide.margin - 1e-15);
    }

    #[test]
    fn margin_scaling_covariance() {
        let f = unit_square_aura();
        let lam = 2.5;
        let scaled = f.scale(lam);
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 6.0), 100);
        let base = check_weak_regularity(&f, 0.0, 0.4, &plan, 0.0).unwrap();
        let cov = check_weak_regularity(&scaled, 0.0, lam * 0.4, &plan, 0.0).unwrap();
        assert!((cov.margin - lam * base.margin).abs() < 1e-12);
    }

    #[test]
    fn disjoint_squares_do_not_touch_and_sum() {
        let a = square_aura(&[-3.0, 0.0], 1.0);
        let b = square_aura(&[3.0, 0.0], 1.0);
        let plan = SamplingPlan::new(21, BoundingBox::centered(2, 6.0), 4000);
        let (sum, report) = aura_sum(&a, &b, &plan).unwrap();
        assert!(!report.touched);
        // the sum vanishes on the intersection of the zero sets, here empty
        let check = SamplingPlan::new(22, BoundingBox::centered(2, 6.0), 10_000);
        let disagreement = zero_set_disagreement(&sum, |_| false, &check, 1e-9);
        assert_eq!(disagreement, None);
        // the union of the squares comes from the min combination
        let union = aura_union_min(&a, &b).unwrap();
        let bad = zero_set_disagreement(
            &union,
            |p| {
                (p[0] + 3.0).abs().max(p[1].abs()) <= 1.0
                    || (p[0] - 3.0).abs().max(p[1].abs()) <= 1.0
            },
            &check,
            1e-9,
        );
        assert_eq!(bad, None);
    }

    #[test]
    fn touching_halfplane_style_auras_refused() {
        // f vanishes on {y <= 0}, g on {y >= 0}, both capped to stay proper;
        // they touch all along the interface with v = (0, 1).
        let upper = dc::max_of(&[
            DCFunction::affine(AffineMap::new(vec![0.0, 1.0], 0.0)),
            DCFunction::constant(2, 0.0),
        ])
        .unwrap();
        let cap = sup_norm(2).add(&DCFunction::constant(2, -5.0)).unwrap();
        let f = upper.max(&cap).unwrap();
        let lower = dc::max_of(&[
            DCFunction::affine(AffineMap::new(vec![0.0, -1.0], 0.0)),
            DCFunction::constant(2, 0.0),
        ])
        .unwrap();
        let g = lower.max(&cap).unwrap();
        let plan = SamplingPlan::new(23, BoundingBox::centered(2, 4.0), 4000);
        match aura_sum(&f, &g, &plan) {
            Err(Error::WeakTouch { direction, .. }) => {
                assert!((direction[1].abs() - 1.0).abs() < 1e-6);
            }
            other => panic!("expected weak touch, got {other:?}"),
        }
    }

    #[test]
    fn point_aura_touches_itself() {
        let f = sup_norm(2);
        let plan = SamplingPlan::new(24, BoundingBox::centered(2, 2.0), 2000);
        let rep = weak_touch(&f, &f, &plan).unwrap();
        assert!(rep.touched);
    }

    #[test]
    fn fat_square_aura_does_not_touch_itself() {
        // identical fat carriers have no antipodal normal pair: all
        // subgradients on the boundary point outward
        let f = unit_square_aura();
        let plan = SamplingPlan::new(25, BoundingBox::centered(2, 3.0), 2000);
        let rep = weak_touch(&f, &f, &plan).unwrap();
        assert!(!rep.touched);
    }

    #[test]
    fn localization_window_intersection() {
        // overlapping box window: the sum vanishes exactly on the overlap
        let a = square_aura(&[0.0, 0.0], 2.0);
        let window = box_distance(&[1.0, -1.0], &[3.0, 1.0], PolyNorm::Sup);
        let plan = SamplingPlan::new(26, BoundingBox::centered(2, 5.0), 4000);
        let (sum, _) = aura_sum(&a, &window, &plan).unwrap();
        let check = SamplingPlan::new(27, BoundingBox::centered(2, 5.0), 10_000);
        let bad = zero_set_disagreement(
            &sum,
            |p| {
                p[0].abs().max(p[1].abs()) <= 2.0
                    && (1.0..=3.0).contains(&p[0])
                    && p[1].abs() <= 1.0
            },
            &check,
            1e-9,
        );
        assert_eq!(bad, None);
    }

    #[test]
    fn sector_complement_two_quadrants() {
        let model = crate::planar::quadrant_pair_model();
        let sectors = match &model {
            crate::planar::PlanarLocalModel::ComplementOf { sectors, .. } => sectors.clone(),
            _ => unreachable!(),
        };
        let f = aura_sector_complement(&sectors).unwrap();
        // positive exactly on the open quadrants II and IV near 0
        let plan = SamplingPlan::new(28, BoundingBox::centered(2, 0.5), 10_000);
        for p in plan.points() {
            if (p[0] * p[1]).abs() < 1e-12 {
                continue;
            }
            let inside_complement = p[0] * p[1] < 0.0;
            assert_eq!(f.value(&p) > 1e-12, inside_complement, "at {p:?}");
        }
    }

    #[test]
    fn sector_complement_margin_capped() {
        let model = crate::planar::quadrant_pair_model();
        let sectors = match &model {
            crate::planar::PlanarLocalModel::ComplementOf { sectors, .. } => sectors.clone(),
            _ => unreachable!(),
        };
        let f = aura_sector_complement(&sectors).unwrap();
        let capped = f
            .max(&sup_norm(2).add(&DCFunction::constant(2, -5.0)).unwrap())
            .unwrap();
        let plan = SamplingPlan::new(29, BoundingBox::centered(2, 8.0), 100);
        let rep = check_weak_regularity(&capped, 0.0, 0.2, &plan, 0.0).unwrap();
        assert!(rep.margin >= 0.5, "margin {}", rep.margin);
        assert!((rep.margin - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn degenerate_graph_aura_margin_capped() {
        // ray aura capped to a ball: the cap corner seams set the exact
        // margin at 1/sqrt(2)
        let zero = DCFunction::constant(1, 0.0);
        let g = aura_degenerate_sector(&zero, &zero, 0.0).unwrap();
        let capped = g
            .max(&sup_norm(2).add(&DCFunction::constant(2, -2.0)).unwrap())
            .unwrap();
        let plan = SamplingPlan::new(30, BoundingBox::centered(2, 4.0), 100);
        let rep = check_weak_regularity(&capped, 0.0, 0.3, &plan, 0.0).unwrap();
        assert!(rep.margin >= 0.5f64.sqrt() - 1e-9, "margin {}", rep.margin);
        assert!((rep.margin - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn empty_shell_reported_not_error() {
        let f = unit_square_aura();
        let plan = SamplingPlan::new(1, BoundingBox::centered(2, 5.0), 100);
        // pick the level band inside the flat zero region: (c, c+eps) with
        // c just below 0 never contains values of f
        let rep = check_weak_regularity(&f, -0.5, 0.25, &plan, 0.0).unwrap();
        assert!(rep.margin.is_infinite());
        assert!(rep.note.is_some());
    }

    use crate::dc::AffineMap;
}
