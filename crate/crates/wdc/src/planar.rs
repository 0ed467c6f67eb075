//! Planar sector theory: sector validation, local models of planar sets,
//! directional type classification, local characterization of germs, and
//! constructive aura synthesis for every characterized model.

use serde::{Deserialize, Serialize};

use crate::dc::{DCFunction, Side};
use crate::error::{Error, Result};
use crate::pwa1::Pwa1;

/// Rigid frame at an apex: rotation carrying the positive x-axis to the
/// direction `v`, plus a cone half-slope and radius.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorFrame {
    pub apex: Vec<f64>,
    pub direction: Vec<f64>,
    pub half_slope: f64,
    pub radius: f64,
}

/// Basic open DC sector: the strict epigraph of a one-dimensional DC
/// boundary function inside a ball, rotated by `rotation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OpenSectorSpec {
    pub rotation: f64,
    pub radius: f64,
    pub boundary: DCFunction,
}

/// Degenerate closed DC sector: the strip between two one-sided boundary
/// functions over `[0, radius)`, rotated by `rotation`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerateSectorSpec {
    pub rotation: f64,
    pub radius: f64,
    pub lower: DCFunction,
    pub upper: DCFunction,
}

/// Local description of a planar set germ at a base point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum PlanarLocalModel {
    IsolatedPoint { base: Vec<f64> },
    Degenerate { base: Vec<f64>, sector: DegenerateSectorSpec },
    ComplementOf { base: Vec<f64>, sectors: Vec<OpenSectorSpec> },
}

impl PlanarLocalModel {
    pub fn base(&self) -> &[f64] {
        match self {
            PlanarLocalModel::IsolatedPoint { base } => base,
            PlanarLocalModel::Degenerate { base, .. } => base,
            PlanarLocalModel::ComplementOf { base, .. } => base,
        }
    }

    /// Radius within which the model describes the set.
    pub fn radius(&self) -> f64 {
        match self {
            PlanarLocalModel::IsolatedPoint { .. } => 1.0,
            PlanarLocalModel::Degenerate { sector, .. } => sector.radius,
            PlanarLocalModel::ComplementOf { sectors, .. } => sectors
                .iter()
                .map(|s| s.radius)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Exact membership for points within the model radius.
    pub fn contains(&self, p: &[f64]) -> bool {
        let base = self.base();
        let rel = [p[0] - base[0], p[1] - base[1]];
        match self {
            PlanarLocalModel::IsolatedPoint { .. } => rel[0] == 0.0 && rel[1] == 0.0,
            PlanarLocalModel::Degenerate { sector, .. } => sector.contains_rel(&rel),
            PlanarLocalModel::ComplementOf { sectors, .. } => {
                !sectors.iter().any(|s| s.contains_rel(&rel))
            }
        }
    }
}

impl OpenSectorSpec {
    /// Membership of a point given relative to the apex. The sector is
    /// open: points on the boundary graph stay outside, with a small
    /// tolerance band absorbing rotation roundoff.
    pub fn contains_rel(&self, rel: &[f64]) -> bool {
        let q = crate::geom::rotate2(rel, -self.rotation);
        if q[0] * q[0] + q[1] * q[1] >= self.radius * self.radius {
            return false;
        }
        let b = self.boundary.value(&[q[0]]);
        q[1] > b + 1e-12 * (1.0 + b.abs() + q[0].abs())
    }

    /// One-sided tangent angles of the boundary graph at the apex, in world
    /// coordinates: (right-branch angle, left-branch angle).
    pub fn tangent_angles(&self) -> Result<(f64, f64)> {
        let s_r = crate::dc::one_sided_slope_1d(&self.boundary, 0.0, Side::Right)?;
        let s_l = crate::dc::one_sided_slope_1d(&self.boundary, 0.0, Side::Left)?;
        Ok((
            normalize_angle(self.rotation + s_r.atan()),
            normalize_angle(self.rotation + std::f64::consts::PI + s_l.atan()),
        ))
    }
}

impl DegenerateSectorSpec {
    /// Closed membership with a roundoff band.
    pub fn contains_rel(&self, rel: &[f64]) -> bool {
        let q = crate::geom::rotate2(rel, -self.rotation);
        let tol = 1e-12 * (1.0 + q[0].abs() + q[1].abs());
        if q[0] < -tol || q[0] * q[0] + q[1] * q[1] >= self.radius * self.radius {
            return false;
        }
        let x = q[0].max(0.0);
        q[1] >= self.lower.value(&[x]) - tol && q[1] <= self.upper.value(&[x]) + tol
    }
}

pub fn normalize_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = a % tau;
    if x < 0.0 {
        x += tau;
    }
    if x >= tau - 1e-15 {
        x = 0.0;
    }
    x
}

/// Outcome of the radial-gauge monotonicity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorValidation {
    pub pass: bool,
    /// Abscissa in frame coordinates where the gauge first fails to be
    /// strictly monotone, if any.
    pub violation_at: Option<f64>,
    /// Abscissa where the ordering lower <= upper first fails, if any.
    pub ordering_violation_at: Option<f64>,
}

impl SectorValidation {
    fn ok() -> Self {
        SectorValidation { pass: true, violation_at: None, ordering_violation_at: None }
    }
}

/// Validate an open sector: the radial gauge `sqrt(x^2 + phi^2)` must be
/// strictly increasing on `[0, omega)` and strictly decreasing on
/// `(-omega, 0]` for some omega beyond the radius. Checked piece by piece:
/// on each affine piece of `phi` the squared gauge is a quadratic whose
/// derivative is linear, so its sign is settled at interval endpoints.
pub fn validate_open_sector(spec: &OpenSectorSpec) -> Result<SectorValidation> {
    if spec.boundary.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: spec.boundary.dim() });
    }
    if spec.boundary.value(&[0.0]).abs() > 1e-9 {
        return Err(Error::Invalid("sector boundary must vanish at the apex".into()));
    }
    let pwa = Pwa1::from_dc(&spec.boundary);
    for dir in [1, -1] {
        if let Some(x) = gauge_violation(&pwa, spec.radius, dir) {
            return Ok(SectorValidation {
                pass: false,
                violation_at: Some(x),
                ordering_violation_at: None,
            });
        }
    }
    Ok(SectorValidation::ok())
}

/// Validate a degenerate sector: gauges of both boundaries strictly
/// increasing on `[0, omega)`, ordering lower <= upper on `[0, radius]`,
/// both vanishing at the apex with zero right slope.
pub fn validate_degenerate_sector(spec: &DegenerateSectorSpec) -> Result<SectorValidation> {
    for f in [&spec.lower, &spec.upper] {
        if f.dim() != 1 {
            return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
        }
        if f.value(&[0.0]).abs() > 1e-9 {
            return Err(Error::Invalid(
                "degenerate sector boundary must vanish at the apex".into(),
            ));
        }
        if crate::dc::one_sided_slope_1d(f, 0.0, Side::Right)?.abs() > 1e-9 {
            return Err(Error::Invalid(
                "degenerate sector boundaries must have zero right slope at the apex".into(),
            ));
        }
    }
    for f in [&spec.lower, &spec.upper] {
        let pwa = Pwa1::from_dc(f);
        if let Some(x) = gauge_violation(&pwa, spec.radius, 1) {
            return Ok(SectorValidation {
                pass: false,
                violation_at: Some(x),
                ordering_violation_at: None,
            });
        }
    }
    if let Some(x) = ordering_violation(&spec.lower, &spec.upper, spec.radius) {
        return Ok(SectorValidation {
            pass: false,
            violation_at: None,
            ordering_violation_at: Some(x),
        });
    }
    Ok(SectorValidation::ok())
}

/// First abscissa (outward distance from 0) where the squared gauge stops
/// being strictly monotone on the given side, scanning pieces until the
/// gauge safely exceeds the radius. None when monotone throughout.
fn gauge_violation(pwa: &Pwa1, radius: f64, dir: i32) -> Option<f64> {
    // On each affine piece phi = s x + c, with t the outward distance
    // (x = dir * t), the derivative of the squared gauge in t is
    // 2 t + 2 (s_eff t + c) s_eff with s_eff = dir * s: linear, increasing.
    let mut cuts: Vec<f64> = pwa
        .breaks
        .iter()
        .map(|&b| if dir > 0 { b } else { -b })
        .filter(|&t| t > 0.0)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let limit = 4.0 * radius.max(1.0);
    let mut lo = 0.0f64;
    for idx in 0..=cuts.len() {
        let hi = if idx < cuts.len() { cuts[idx].min(limit) } else { limit };
        if hi <= lo {
            lo = hi;
            continue;
        }
        let mid = 0.5 * (lo + hi);
        let x_mid = if dir > 0 { mid } else { -mid };
        let (s, c) = line_at(pwa, x_mid, dir);
        let s_eff = dir as f64 * s;
        let deriv_lo = 2.0 * lo + 2.0 * (s_eff * lo + c) * s_eff;
        if deriv_lo < -1e-12 * (1.0 + lo.abs()) {
            return Some(if dir > 0 { lo } else { -lo });
        }
        let v = s_eff * hi + c;
        if hi * hi + v * v > 4.0 * radius * radius {
            return None;
        }
        lo = hi;
    }
    None
}

/// Line of the piece containing x on the side approached from 0.
fn line_at(pwa: &Pwa1, x: f64, dir: i32) -> (f64, f64) {
    let i = if dir > 0 {
        pwa.breaks.partition_point(|&b| b <= x)
    } else {
        pwa.breaks.partition_point(|&b| b < x)
    };
    pwa.lines[i.min(pwa.lines.len() - 1)]
}

/// First abscissa in [0, radius] where lower > upper, checked exactly at
/// breakpoints (the difference is affine in between).
fn ordering_violation(lower: &DCFunction, upper: &DCFunction, radius: f64) -> Option<f64> {
    let diff = Pwa1::from_dc(upper).sub(&Pwa1::from_dc(lower));
    let tol = 1e-10;
    let mut xs: Vec<f64> = vec![0.0, radius];
    xs.extend(diff.breaks_within(0.0, radius));
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.into_iter().find(|&x| diff.eval(x) < -tol)
}

/// Pairwise disjointness of open sectors, by a deterministic dense probe of
/// the common ball.
pub fn sectors_pairwise_disjoint(sectors: &[OpenSectorSpec], probes: usize) -> Result<bool> {
    for (i, a) in sectors.iter().enumerate() {
        for b in &sectors[i + 1..] {
            let r = a.radius.min(b.radius);
            let plan = crate::sample::SamplingPlan::new(
                0xd15c * (i as u64 + 1),
                crate::geom::BoundingBox::centered(2, r),
                probes,
            );
            for p in plan.points() {
                if a.contains_rel(&p) && b.contains_rel(&p) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------
// Branch localization: re-expressing boundary half-curves as graphs over
// a rotated frame axis, exactly, piece by piece.
// ---------------------------------------------------------------------

/// A boundary half-curve germ: the graph of `phi` over `t >= 0` in the
/// frame rotated by `frame`, walking away from the base point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfBranch {
    pub frame: f64,
    pub phi: DCFunction,
    pub side: SideLabel,
}

/// Which side of the half-curve (in its own frame) belongs to the set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SideLabel {
    SetBelow,
    SetAbove,
    SetOnCurve,
}

/// Raw germ data: boundary half-curves through a base point, each labeled
/// with the side the set occupies near that branch.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawGerm {
    pub base: Vec<f64>,
    pub radius: f64,
    pub branches: Vec<HalfBranch>,
}

impl HalfBranch {
    /// World tangent angle at the apex.
    pub fn tangent_angle(&self) -> Result<f64> {
        let s = crate::dc::one_sided_slope_1d(&self.phi, 0.0, Side::Right)?;
        Ok(normalize_angle(self.frame + s.atan()))
    }
}

/// Piecewise parameterization of a half-branch in world coordinates:
/// segments from the apex outward.
fn branch_chain(phi: &Pwa1, frame: f64, positive_side: bool) -> Vec<([f64; 2], [f64; 2], f64)> {
    // segments (start, direction per unit parameter, parameter length)
    let mut segs = Vec::new();
    if positive_side {
        let mut idx = phi.breaks.partition_point(|&b| b <= 0.0);
        let mut t = 0.0f64;
        loop {
            let (s, c) = phi.lines[idx.min(phi.lines.len() - 1)];
            let t_end = if idx < phi.breaks.len() { phi.breaks[idx] } else { f64::INFINITY };
            let start = crate::geom::rotate2(&[t, s * t + c], frame);
            let dir = crate::geom::rotate2(&[1.0, s], frame);
            segs.push(([start[0], start[1]], [dir[0], dir[1]], t_end - t));
            if idx >= phi.breaks.len() {
                break;
            }
            t = t_end;
            idx += 1;
        }
    } else {
        let mut idx = phi.breaks.partition_point(|&b| b < 0.0);
        let mut t = 0.0f64;
        loop {
            let (s, c) = phi.lines[idx.min(phi.lines.len() - 1)];
            let t_end = if idx > 0 { phi.breaks[idx - 1] } else { f64::NEG_INFINITY };
            let start = crate::geom::rotate2(&[t, s * t + c], frame);
            let dir = crate::geom::rotate2(&[-1.0, -s], frame);
            segs.push(([start[0], start[1]], [dir[0], dir[1]], t - t_end));
            if idx == 0 {
                break;
            }
            t = t_end;
            idx -= 1;
        }
    }
    segs
}

/// Result of localizing a half-branch into a target frame: a graph over
/// `[0, reach)` with value zero and the branch data at the apex.
#[derive(Debug, Clone)]
pub struct LocalizedBranch {
    pub graph: Pwa1,
    /// Extent of the graph domain actually covered.
    pub reach: f64,
    /// Gauge (distance from the apex) reached at the domain end.
    pub gauge_reach: f64,
}

/// Express a half-branch as a graph over the x-axis of the frame rotated
/// by `target`, walking outward until the gauge hits `rho` or the curve
/// stops being a graph (then the reach is shortened accordingly).
pub fn localize_branch(
    phi: &DCFunction,
    frame: f64,
    positive_side: bool,
    target: f64,
    rho: f64,
) -> Result<LocalizedBranch> {
    let pwa = Pwa1::from_dc(phi);
    let chain = branch_chain(&pwa, frame - target, positive_side);
    let mut breaks: Vec<f64> = Vec::new();
    let mut lines: Vec<(f64, f64)> = Vec::new();
    let mut x_cursor = 0.0f64;
    let mut gauge_reach = 0.0f64;
    for (start, dir, len) in chain {
        if dir[0] <= 1e-12 {
            if lines.is_empty() {
                return Err(Error::Invalid(
                    "vertical tangent: branch is not a graph in the target frame".into(),
                ));
            }
            break; // graph range ends where the curve turns back
        }
        let slope = dir[1] / dir[0];
        let intercept = start[1] - slope * start[0];
        if lines.is_empty() {
            lines.push((slope, intercept));
        } else {
            breaks.push(x_cursor);
            lines.push((slope, intercept));
        }
        // exit parameter: gauge hits rho or the piece ends
        let exit = segment_gauge_exit(&start, &dir, len, rho);
        let u_end = exit.unwrap_or(len);
        let x_end = start[0] + u_end * dir[0];
        let y_end = start[1] + u_end * dir[1];
        x_cursor = x_end;
        gauge_reach = (x_end * x_end + y_end * y_end).sqrt();
        if exit.is_some() {
            break;
        }
        if len.is_infinite() {
            // unbounded final piece always exits the gauge eventually
            gauge_reach = rho;
            x_cursor = x_cursor.max(rho);
            break;
        }
    }
    if lines.is_empty() {
        return Err(Error::Invalid("empty branch".into()));
    }
    Ok(LocalizedBranch {
        graph: Pwa1 { breaks, lines },
        reach: x_cursor,
        gauge_reach,
    })
}

/// Smallest parameter in (0, len] where `|start + u dir| = rho`, if any.
fn segment_gauge_exit(start: &[f64; 2], dir: &[f64; 2], len: f64, rho: f64) -> Option<f64> {
    let a = dir[0] * dir[0] + dir[1] * dir[1];
    let b = 2.0 * (start[0] * dir[0] + start[1] * dir[1]);
    let c = start[0] * start[0] + start[1] * start[1] - rho * rho;
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)].into_iter().find(|&root| root > 1e-15 && root <= len)
}

/// Re-express a full planar DC graph, given as `phi` in a rotated frame,
/// as a graph over the identity-frame axis inside `B(0, rho)`. The curve
/// must pass through the origin with a one-dimensional, non-vertical
/// tangent. Returns the function and its exact domain `(alpha, beta)`.
pub fn graph_localize(phi: &DCFunction, frame: f64, rho: f64) -> Result<(DCFunction, f64, f64)> {
    if phi.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: phi.dim() });
    }
    if phi.value(&[0.0]).abs() > 1e-9 {
        return Err(Error::Invalid("curve must pass through the origin".into()));
    }
    let sr = crate::dc::one_sided_slope_1d(phi, 0.0, Side::Right)?;
    let sl = crate::dc::one_sided_slope_1d(phi, 0.0, Side::Left)?;
    // walking directions of the two branches along the identity axis
    let kr = frame.cos() - sr * frame.sin();
    let kl = frame.cos() - sl * frame.sin();
    if kr.abs() < 1e-9 || kl.abs() < 1e-9 {
        return Err(Error::Invalid("vertical tangent in the target frame".into()));
    }
    if kr.signum() != kl.signum() {
        return Err(Error::Invalid(
            "the curve folds back at the origin: not a graph in the target frame".into(),
        ));
    }
    let (left_walk, right_walk) = if kr > 0.0 {
        // positive branch covers x > 0, negative branch mirrors onto x < 0
        let right = localize_branch(phi, frame, true, 0.0, rho)?;
        let left = localize_branch(phi, frame, false, std::f64::consts::PI, rho)?;
        (left, right)
    } else {
        let right = localize_branch(phi, frame, false, 0.0, rho)?;
        let left = localize_branch(phi, frame, true, std::f64::consts::PI, rho)?;
        (left, right)
    };
    let merged = glue_halves(&left_walk.graph, &right_walk.graph);
    Ok((merged.to_dc(), -left_walk.reach, right_walk.reach))
}

/// Combine two outward walks into one graph: `right` is a graph over
/// `[0, ..)` in the target frame, `left` a graph over `[0, ..)` in the
/// mirrored frame (target + pi), which lands on negative x as `-W(-x)`.
fn glue_halves(left: &Pwa1, right: &Pwa1) -> Pwa1 {
    let lm = left.reflect_domain().neg();
    let mut breaks: Vec<f64> = lm.breaks.clone();
    breaks.push(0.0);
    breaks.extend(right.breaks.iter().cloned());
    let mut lines: Vec<(f64, f64)> = lm.lines.clone();
    lines.extend(right.lines.iter().cloned());
    Pwa1 { breaks, lines }.simplified()
}

// ---------------------------------------------------------------------
// Direction classification
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TypeKind {
    T1,
    T2,
    T3,
    T4,
    T5,
}

/// Classification of a model at a direction, with the witnessing boundary
/// functions expressed in the direction frame and certified cone data.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TypeTag {
    pub kind: TypeKind,
    pub upper: Option<DCFunction>,
    pub lower: Option<DCFunction>,
    pub radius: f64,
    pub half_slope: f64,
}

fn same_direction(a: f64, b: f64) -> bool {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    !(1e-9..=std::f64::consts::TAU - 1e-9).contains(&d)
}

/// Circular membership of angle `x` in the open arc from `lo` ccw to `hi`.
fn in_open_arc(x: f64, lo: f64, hi: f64) -> bool {
    let span = (hi - lo).rem_euclid(std::f64::consts::TAU);
    let off = (x - lo).rem_euclid(std::f64::consts::TAU);
    off > 1e-9 && off < span - 1e-9
}

/// Classify the local intersection pattern of the model with shrinking
/// cones in direction `v`. Tangent directions resolve to T3/T4/T5 with
/// localized witnesses; all other directions are T1 or T2.
pub fn classify_direction(model: &PlanarLocalModel, v: &[f64]) -> Result<TypeTag> {
    let vn = crate::geom::norm(v);
    if vn < 1e-12 {
        return Err(Error::Invalid("direction must be nonzero".into()));
    }
    let psi = normalize_angle(v[1].atan2(v[0]));
    let model_r = model.radius();
    match model {
        PlanarLocalModel::IsolatedPoint { .. } => Ok(TypeTag {
            kind: TypeKind::T1,
            upper: None,
            lower: None,
            radius: cone_radius_cap(model_r, 1.0),
            half_slope: 1.0,
        }),
        PlanarLocalModel::Degenerate { sector, .. } => {
            let axis = normalize_angle(sector.rotation);
            if same_direction(psi, axis) {
                let upper = localize_branch(&sector.upper, sector.rotation, true, psi, sector.radius)?;
                let lower = localize_branch(&sector.lower, sector.rotation, true, psi, sector.radius)?;
                finish_tag(
                    model,
                    psi,
                    TypeKind::T5,
                    Some(upper),
                    Some(lower),
                    sector.radius,
                )
            } else {
                // the set hugs its tangent ray; any other cone is empty
                plain_tag(model, psi, TypeKind::T1)
            }
        }
        PlanarLocalModel::ComplementOf { sectors, .. } => {
            let mut right_of: Option<usize> = None;
            let mut left_of: Option<usize> = None;
            let mut inside = false;
            for (k, s) in sectors.iter().enumerate() {
                let (a, b) = s.tangent_angles()?;
                if same_direction(psi, a) {
                    right_of = Some(k);
                }
                if same_direction(psi, b) {
                    left_of = Some(k);
                }
                if in_open_arc(psi, a, b) {
                    inside = true;
                }
            }
            match (right_of, left_of) {
                (None, None) => {
                    let kind = if inside { TypeKind::T1 } else { TypeKind::T2 };
                    plain_tag(model, psi, kind)
                }
                (Some(i), None) => {
                    // sector i opens counterclockwise of v: the set is the
                    // hypograph of its right boundary branch
                    let u = localize_branch(&sectors[i].boundary, sectors[i].rotation, true, psi, sectors[i].radius)?;
                    finish_tag(model, psi, TypeKind::T3, Some(u), None, sectors[i].radius)
                }
                (None, Some(j)) => {
                    let l = localize_branch(&sectors[j].boundary, sectors[j].rotation, false, psi, sectors[j].radius)?;
                    finish_tag(model, psi, TypeKind::T4, None, Some(l), sectors[j].radius)
                }
                (Some(i), Some(j)) => {
                    let u = localize_branch(&sectors[i].boundary, sectors[i].rotation, true, psi, sectors[i].radius)?;
                    let l = localize_branch(&sectors[j].boundary, sectors[j].rotation, false, psi, sectors[j].radius)?;
                    let r = sectors[i].radius.min(sectors[j].radius);
                    finish_tag(model, psi, TypeKind::T5, Some(u), Some(l), r)
                }
            }
        }
    }
}

/// A boundary branch localized in its own tangent frame: the angular band
/// it occupies at radius r has half-width `atan(max_slope_ratio(r))`.
struct BranchBand {
    theta: f64,
    graph: Pwa1,
    reach: f64,
}

/// All boundary branches of the model as tangent-frame bands.
fn model_branch_bands(model: &PlanarLocalModel) -> Result<Vec<BranchBand>> {
    let mut out = Vec::new();
    match model {
        PlanarLocalModel::IsolatedPoint { .. } => {}
        PlanarLocalModel::Degenerate { sector, .. } => {
            let theta = normalize_angle(sector.rotation);
            for f in [&sector.lower, &sector.upper] {
                let local = localize_branch(f, sector.rotation, true, theta, sector.radius)?;
                out.push(BranchBand { theta, graph: local.graph, reach: local.reach });
            }
        }
        PlanarLocalModel::ComplementOf { sectors, .. } => {
            for s in sectors {
                let (a, b) = s.tangent_angles()?;
                let right = localize_branch(&s.boundary, s.rotation, true, a, s.radius)?;
                out.push(BranchBand { theta: a, graph: right.graph, reach: right.reach });
                let left = localize_branch(&s.boundary, s.rotation, false, b, s.radius)?;
                out.push(BranchBand { theta: b, graph: left.graph, reach: left.reach });
            }
        }
    }
    Ok(out)
}

fn circular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

/// Cone half-slope keeping all foreign tangent rays strictly outside the
/// doubled cone in direction psi.
fn cone_slope_away(bands: &[BranchBand], psi: f64) -> f64 {
    let mut gap = std::f64::consts::PI;
    for band in bands {
        if same_direction(band.theta, psi) {
            continue;
        }
        gap = gap.min(circular_distance(band.theta, psi));
    }
    ((0.4 * gap).tan() * 0.5).clamp(1e-3, 1.0)
}

/// Shrink the cone radius until every foreign branch band stays strictly
/// clear of the doubled cone. Curved boundaries widen their bands with
/// radius, so this realizes the germ limit at a concrete scale.
fn shrink_clear_of_bands(bands: &[BranchBand], psi: f64, u: f64, mut r: f64) -> Result<f64> {
    let cone_half = (2.0 * u).atan();
    'outer: for _ in 0..70 {
        for band in bands {
            if same_direction(band.theta, psi) {
                continue;
            }
            let extent = (1.5 * r).min(band.reach);
            let spread = band.graph.max_slope_ratio(extent).atan();
            if circular_distance(band.theta, psi) <= spread + cone_half + 1e-9 {
                r *= 0.5;
                continue 'outer;
            }
        }
        return Ok(r);
    }
    Err(Error::Internal("cone shrinking failed to clear foreign branches".into()))
}

/// Tag for directions away from every tangent: T1 or T2 at a cone small
/// enough that no boundary enters it.
fn plain_tag(model: &PlanarLocalModel, psi: f64, kind: TypeKind) -> Result<TypeTag> {
    let bands = model_branch_bands(model)?;
    let u = cone_slope_away(&bands, psi);
    let r0 = cone_radius_cap(model.radius(), u);
    let r = shrink_clear_of_bands(&bands, psi, u, r0)?;
    Ok(TypeTag { kind, upper: None, lower: None, radius: r, half_slope: u })
}

/// Assemble a witnessed tag: shrink the cone until the witness graphs fit
/// inside the half-slope cone and foreign branches stay out of the doubled
/// cone.
fn finish_tag(
    model: &PlanarLocalModel,
    psi: f64,
    kind: TypeKind,
    upper: Option<LocalizedBranch>,
    lower: Option<LocalizedBranch>,
    radius_cap: f64,
) -> Result<TypeTag> {
    let bands = model_branch_bands(model)?;
    let u_target = cone_slope_away(&bands, psi);
    let mut r = cone_radius_cap(radius_cap.min(model.radius()), u_target);
    if let Some(b) = &upper {
        r = r.min(b.reach);
    }
    if let Some(b) = &lower {
        r = r.min(b.reach);
    }
    r = shrink_clear_of_bands(&bands, psi, u_target, r)?;
    for _ in 0..60 {
        let mut fits = true;
        for b in [&upper, &lower].into_iter().flatten() {
            if b.graph.max_slope_ratio(r) > u_target {
                fits = false;
                break;
            }
        }
        if fits {
            return Ok(TypeTag {
                kind,
                upper: upper.map(|b| b.graph.to_dc()),
                lower: lower.map(|b| b.graph.to_dc()),
                radius: r,
                half_slope: u_target,
            });
        }
        r *= 0.5;
    }
    Err(Error::Internal("cone shrinking failed to stabilize the witnesses".into()))
}

/// Radius keeping the whole doubled cone inside the model ball.
fn cone_radius_cap(model_r: f64, u: f64) -> f64 {
    0.99 * model_r / (1.0 + 4.0 * u * u).sqrt()
}

/// Evaluate the defining predicate of `tag` on a deterministic probe of the
/// cone at scale (r, 2u): exact model membership against the witnesses.
pub fn type_predicate_holds(
    model: &PlanarLocalModel,
    v: &[f64],
    tag: &TypeTag,
    r: f64,
    u: f64,
    n_probes: usize,
) -> bool {
    let base = model.base();
    let psi = v[1].atan2(v[0]);
    let steps = (n_probes as f64).sqrt().ceil() as usize;
    let tol = 1e-9;
    for i in 0..steps {
        let x = r * (i as f64 + 0.5) / steps as f64;
        for j in 0..steps {
            let y = 2.0 * u * x * (2.0 * j as f64 / (steps - 1).max(1) as f64 - 1.0);
            let w = crate::geom::rotate2(&[x, y], psi);
            let p = [base[0] + w[0], base[1] + w[1]];
            let member = model.contains(&p);
            let expect = match tag.kind {
                TypeKind::T1 => false,
                TypeKind::T2 => true,
                TypeKind::T3 => {
                    let uu = tag.upper.as_ref().unwrap().value(&[x]);
                    if (y - uu).abs() < tol {
                        continue;
                    }
                    y < uu
                }
                TypeKind::T4 => {
                    let ll = tag.lower.as_ref().unwrap().value(&[x]);
                    if (y - ll).abs() < tol {
                        continue;
                    }
                    y > ll
                }
                TypeKind::T5 => {
                    let uu = tag.upper.as_ref().unwrap().value(&[x]);
                    let ll = tag.lower.as_ref().unwrap().value(&[x]);
                    if (y - uu).abs() < tol || (y - ll).abs() < tol {
                        continue;
                    }
                    y < uu && y > ll
                }
            };
            if member != expect {
                return false;
            }
        }
    }
    true
}

// ---------------------------------------------------------------------
// Local characterization: raw germ data to a validated model
// ---------------------------------------------------------------------

struct PlacedBranch {
    theta: f64,
    local: LocalizedBranch,
    side: SideLabel,
    frame: f64,
    phi: DCFunction,
}

/// Assemble a validated local model from labeled boundary half-curves.
pub fn characterize_local(germ: &RawGerm) -> Result<PlanarLocalModel> {
    if germ.branches.is_empty() {
        return Ok(PlanarLocalModel::IsolatedPoint { base: germ.base.clone() });
    }
    let mut placed: Vec<PlacedBranch> = Vec::new();
    for b in &germ.branches {
        let theta = b.tangent_angle()?;
        let local = localize_branch(&b.phi, b.frame, true, theta, germ.radius)?;
        placed.push(PlacedBranch { theta, local, side: b.side, frame: b.frame, phi: b.phi.clone() });
    }

    // group by tangent direction
    placed.sort_by(|a, b| a.theta.partial_cmp(&b.theta).unwrap());
    let mut groups: Vec<Vec<PlacedBranch>> = Vec::new();
    for pb in placed {
        match groups.last_mut() {
            Some(g) if same_direction(g[0].theta, pb.theta) => g.push(pb),
            _ => groups.push(vec![pb]),
        }
    }
    // wrap-around merge of the first and last groups
    if groups.len() > 1 {
        let first_theta = groups[0][0].theta;
        let last_theta = groups.last().unwrap()[0].theta;
        if same_direction(first_theta, last_theta) {
            let tail = groups.pop().unwrap();
            groups[0].extend(tail);
        }
    }

    // order branches within groups from bottom to top, merging duplicates
    let reach = germ.radius;
    for g in groups.iter_mut() {
        g.sort_by(|a, b| {
            let diff = a.local.graph.sub(&b.local.graph);
            match diff.sign_right_of_zero(reach) {
                -1 => std::cmp::Ordering::Less,
                1 => std::cmp::Ordering::Greater,
                _ => std::cmp::Ordering::Equal,
            }
        });
        // merge geometrically identical neighbors
        let mut merged: Vec<PlacedBranch> = Vec::new();
        for pb in g.drain(..) {
            match merged.last_mut() {
                Some(prev)
                    if prev.local.graph.sub(&pb.local.graph).sign_right_of_zero(reach) == 0 =>
                {
                    prev.side = merge_labels(prev.side, pb.side)?;
                }
                _ => merged.push(pb),
            }
        }
        *g = merged;
    }

    // wedge membership between consecutive groups, with consistency votes:
    // wedge idx sits counterclockwise of group idx
    let k = groups.len();
    let mut wedge_in = vec![false; k];
    for idx in 0..k {
        let top = groups[idx].last().unwrap();
        let next = &groups[(idx + 1) % k][0];
        let vote_ccw = match top.side {
            SideLabel::SetAbove => true,
            SideLabel::SetBelow | SideLabel::SetOnCurve => false,
        };
        let vote_cw = match next.side {
            SideLabel::SetBelow => true,
            SideLabel::SetAbove | SideLabel::SetOnCurve => false,
        };
        if vote_ccw != vote_cw {
            return Err(Error::InconsistentGerm(format!(
                "contradictory side labels across the wedge after direction {}",
                groups[idx][0].theta
            )));
        }
        wedge_in[idx] = vote_ccw && vote_cw;
    }

    // cusp wedges inside groups must be interior to the set
    for g in &groups {
        for pair in g.windows(2) {
            let lo_ok = pair[0].side == SideLabel::SetAbove;
            let hi_ok = pair[1].side == SideLabel::SetBelow;
            if !(lo_ok && hi_ok) {
                return Err(Error::InconsistentGerm(
                    "zero-width complement cusp is not representable by open sectors".into(),
                ));
            }
        }
    }

    // single group, wrap wedge OUT: degenerate sector
    if k == 1 && !wedge_in[0] {
        let g = &groups[0];
        let theta = g[0].theta;
        if g.len() > 2 {
            return Err(Error::InconsistentGerm(
                "more than two coincident-direction boundaries".into(),
            ));
        }
        let lower = &g[0];
        let upper = g.last().unwrap();
        let r = germ.radius.min(lower.local.reach).min(upper.local.reach);
        let sector = DegenerateSectorSpec {
            rotation: theta,
            radius: safe_radius_pair(&lower.local.graph, &upper.local.graph, r),
            lower: lower.local.graph.to_dc(),
            upper: upper.local.graph.to_dc(),
        };
        let v = validate_degenerate_sector(&sector)?;
        if !v.pass {
            return Err(Error::InconsistentGerm(format!("degenerate sector invalid: {v:?}")));
        }
        return Ok(PlanarLocalModel::Degenerate { base: germ.base.clone(), sector });
    }

    if wedge_in.iter().all(|&b| b) {
        return Err(Error::InconsistentGerm(
            "no complement near the base point: not a boundary germ".into(),
        ));
    }

    // Every complement wedge is bounded by the two facing branches of its
    // neighboring groups (boundary curves belong to the set, so complement
    // components never cross a group): one open sector per OUT wedge.
    let mut sectors = Vec::new();
    for start in (0..k).filter(|&i| !wedge_in[i]) {
        let cw_branch = groups[start].last().unwrap();
        let ccw_branch = &groups[(start + 1) % k][0];
        let theta_cw = cw_branch.theta;
        let theta_ccw = ccw_branch.theta;
        let mut span = (theta_ccw - theta_cw).rem_euclid(std::f64::consts::TAU);
        if span < 1e-12 {
            span = std::f64::consts::TAU;
        }
        let rot = normalize_angle(theta_cw + 0.5 * span - std::f64::consts::FRAC_PI_2);
        let right = localize_branch(&cw_branch.phi, cw_branch.frame, true, rot, germ.radius)?;
        // the ccw boundary walks leftward in the sector frame: localize it
        // in the mirrored frame and let the glue mirror it back
        let left = localize_branch(
            &ccw_branch.phi,
            ccw_branch.frame,
            true,
            rot + std::f64::consts::PI,
            germ.radius,
        )?;
        let merged = glue_halves(&left.graph, &right.graph);
        let boundary = merged.to_dc();
        let r_max = max_open_sector_radius(&boundary, germ.radius.min(right.gauge_reach).min(left.gauge_reach));
        let spec = OpenSectorSpec { rotation: rot, radius: r_max, boundary };
        let v = validate_open_sector(&spec)?;
        if !v.pass {
            return Err(Error::InconsistentGerm(format!(
                "assembled sector fails gauge validation at {:?}",
                v.violation_at
            )));
        }
        sectors.push(spec);
    }
    Ok(PlanarLocalModel::ComplementOf { base: germ.base.clone(), sectors })
}

/// Merge labels of identical user-supplied branches: the labels assert
/// which closed side carries the set, so mixed assertions contradict.
fn merge_labels(a: SideLabel, b: SideLabel) -> Result<SideLabel> {
    match (a, b) {
        (x, y) if x == y => Ok(x),
        _ => Err(Error::InconsistentGerm(
            "identical curve carries contradictory side labels".into(),
        )),
    }
}

/// Merge labels of a boundary shared by two sectors during extraction:
/// exclusion on both sides leaves only the curve in the set.
fn merge_extracted_labels(a: SideLabel, b: SideLabel) -> Result<SideLabel> {
    use SideLabel::{SetAbove, SetBelow, SetOnCurve};
    match (a, b) {
        (SetBelow, SetAbove) | (SetAbove, SetBelow) => Ok(SetOnCurve),
        (SetOnCurve, _) | (_, SetOnCurve) => Ok(SetOnCurve),
        _ => Err(Error::InconsistentGerm(
            "two sectors exclude the same side of a shared boundary".into(),
        )),
    }
}

/// Largest radius below `cap` at which the sector boundary keeps a strictly
/// monotone gauge on both sides.
fn max_open_sector_radius(boundary: &DCFunction, cap: f64) -> f64 {
    let mut r = cap;
    for _ in 0..60 {
        let spec = OpenSectorSpec { rotation: 0.0, radius: r, boundary: boundary.clone() };
        if matches!(validate_open_sector(&spec), Ok(v) if v.pass) {
            return r;
        }
        r *= 0.5;
    }
    r
}

fn safe_radius_pair(lower: &Pwa1, upper: &Pwa1, cap: f64) -> f64 {
    let mut r = cap;
    for _ in 0..60 {
        let spec = DegenerateSectorSpec {
            rotation: 0.0,
            radius: r,
            lower: lower.to_dc(),
            upper: upper.to_dc(),
        };
        if matches!(validate_degenerate_sector(&spec), Ok(v) if v.pass) {
            return r;
        }
        r *= 0.5;
    }
    r
}

// ---------------------------------------------------------------------
// Germ extraction from models (the inverse of characterize_local)
// ---------------------------------------------------------------------

/// Boundary half-curves of a model, labeled; shared sector boundaries
/// collapse to a single on-curve branch.
pub fn model_to_germ(model: &PlanarLocalModel) -> Result<RawGerm> {
    let base = model.base().to_vec();
    let radius = model.radius();
    let mut branches: Vec<HalfBranch> = Vec::new();
    match model {
        PlanarLocalModel::IsolatedPoint { .. } => {}
        PlanarLocalModel::Degenerate { sector, .. } => {
            let identical = Pwa1::from_dc(&sector.lower)
                .sub(&Pwa1::from_dc(&sector.upper))
                .sign_right_of_zero(sector.radius)
                == 0;
            if identical {
                branches.push(HalfBranch {
                    frame: sector.rotation,
                    phi: sector.lower.clone(),
                    side: SideLabel::SetOnCurve,
                });
            } else {
                branches.push(HalfBranch {
                    frame: sector.rotation,
                    phi: sector.lower.clone(),
                    side: SideLabel::SetAbove,
                });
                branches.push(HalfBranch {
                    frame: sector.rotation,
                    phi: sector.upper.clone(),
                    side: SideLabel::SetBelow,
                });
            }
        }
        PlanarLocalModel::ComplementOf { sectors, .. } => {
            for s in sectors {
                // right branch: t >= 0 of the boundary in the sector frame
                branches.push(HalfBranch {
                    frame: s.rotation,
                    phi: s.boundary.clone(),
                    side: SideLabel::SetBelow,
                });
                // left branch as its own half-curve in the mirrored frame
                let mirrored = Pwa1::from_dc(&s.boundary).reflect_domain().neg().to_dc();
                branches.push(HalfBranch {
                    frame: normalize_angle(s.rotation + std::f64::consts::PI),
                    phi: mirrored,
                    side: SideLabel::SetAbove,
                });
            }
            // collapse branches shared by two sectors
            branches = collapse_shared(branches, radius)?;
        }
    }
    Ok(RawGerm { base, radius, branches })
}

fn collapse_shared(branches: Vec<HalfBranch>, radius: f64) -> Result<Vec<HalfBranch>> {
    let mut placed: Vec<(HalfBranch, f64, LocalizedBranch)> = Vec::new();
    for b in branches {
        let theta = b.tangent_angle()?;
        let local = localize_branch(&b.phi, b.frame, true, theta, radius)?;
        placed.push((b, theta, local));
    }
    let mut out: Vec<(HalfBranch, f64, LocalizedBranch)> = Vec::new();
    'next: for (b, theta, local) in placed {
        for (ob, otheta, olocal) in out.iter_mut() {
            if same_direction(*otheta, theta)
                && olocal.graph.sub(&local.graph).sign_right_of_zero(radius) == 0
            {
                ob.side = merge_extracted_labels(ob.side, b.side)?;
                continue 'next;
            }
        }
        out.push((b, theta, local));
    }
    Ok(out.into_iter().map(|(b, _, _)| b).collect())
}

// ---------------------------------------------------------------------
// Aura synthesis for characterized models
// ---------------------------------------------------------------------

/// Build a polyhedral DC aura whose zero set matches the model inside its
/// ball, capped to keep the sublevel set compact; the exact margin report
/// is attached, and the zero set is cross-checked by a membership probe.
pub fn build_planar_aura(
    model: &PlanarLocalModel,
) -> Result<(DCFunction, crate::aura::AuraReport)> {
    let base = model.base();
    let rho = model.radius();
    let local = match model {
        PlanarLocalModel::IsolatedPoint { .. } => crate::dc::l1_norm(2),
        PlanarLocalModel::Degenerate { sector, .. } => {
            let v = validate_degenerate_sector(sector)?;
            if !v.pass {
                return Err(Error::Invalid(format!("model sector invalid: {v:?}")));
            }
            crate::aura::aura_degenerate_sector(&sector.lower, &sector.upper, sector.rotation)?
        }
        PlanarLocalModel::ComplementOf { sectors, .. } => {
            crate::aura::aura_sector_complement(sectors)?
        }
    };
    // cap to the model ball and translate to the base point
    let cap = crate::dc::sup_norm(2)
        .add(&DCFunction::constant(2, -rho))
        .expect("dimensions agree");
    let capped = local.max(&cap)?;
    let world = capped.precompose(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[-base[0], -base[1]]);

    // membership probe inside the model ball
    let probe_box = crate::geom::BoundingBox::new(
        vec![base[0] - 0.95 * rho, base[1] - 0.95 * rho],
        vec![base[0] + 0.95 * rho, base[1] + 0.95 * rho],
    );
    let plan = crate::sample::SamplingPlan::new(0xa07a, probe_box, 10_000);
    for p in plan.points() {
        if crate::geom::dist(&p, base) >= 0.95 * rho {
            continue;
        }
        let v = world.value(&p);
        let member = model.contains(&p);
        let band = 1e-9 * (1.0 + v.abs());
        if member && v.abs() > band {
            return Err(Error::Internal(format!(
                "aura positive at a model point {p:?}: {v}"
            )));
        }
        if !member && v <= band {
            // points within a hair of the boundary are ambiguous
            let d_boundary = boundary_gap(model, &p);
            if d_boundary > 1e-7 {
                return Err(Error::Internal(format!(
                    "aura vanishes off the model at {p:?}"
                )));
            }
        }
    }

    // exact margin over a thin shell
    let margin_box = crate::geom::BoundingBox::new(
        vec![base[0] - 3.0 * rho, base[1] - 3.0 * rho],
        vec![base[0] + 3.0 * rho, base[1] + 3.0 * rho],
    );
    let margin_plan = crate::sample::SamplingPlan::new(7, margin_box, 64);
    let report =
        crate::aura::check_weak_regularity(&world, 0.0, 0.05 * rho, &margin_plan, 0.0)?;
    if report.margin.is_nan() || report.margin <= 0.0 {
        return Err(Error::Internal("constructed aura has zero margin".into()));
    }
    Ok((world, report))
}

/// Polyline along a sector boundary in world coordinates, for plotting:
/// `n` samples per side out to the sector radius.
pub fn sector_boundary_polyline(spec: &OpenSectorSpec, n: usize) -> Vec<Vec<f64>> {
    let mut ts = Vec::with_capacity(2 * n + 1);
    for i in 0..=(2 * n) {
        ts.push(spec.radius * (i as f64 / n as f64 - 1.0));
    }
    let env = Pwa1::from_dc(&spec.boundary);
    for &b in &env.breaks {
        if b.abs() < spec.radius {
            ts.push(b);
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts.iter()
        .map(|&t| {
            let p = [t, env.eval(t)];
            let w = crate::geom::rotate2(&p, spec.rotation);
            vec![w[0], w[1]]
        })
        .collect()
}

/// Crude distance from a point to the model's boundary structure, used to
/// discard probe points that straddle the zero set numerically.
fn boundary_gap(model: &PlanarLocalModel, p: &[f64]) -> f64 {
    let base = model.base();
    let rel = [p[0] - base[0], p[1] - base[1]];
    match model {
        PlanarLocalModel::IsolatedPoint { .. } => crate::geom::norm(&rel),
        PlanarLocalModel::Degenerate { sector, .. } => {
            let q = crate::geom::rotate2(&rel, -sector.rotation);
            if q[0] < 0.0 {
                crate::geom::norm(&q)
            } else {
                (q[1] - sector.lower.value(&[q[0]]))
                    .abs()
                    .min((q[1] - sector.upper.value(&[q[0]])).abs())
                    .min(q[0].abs())
            }
        }
        PlanarLocalModel::ComplementOf { sectors, .. } => {
            let mut d = f64::INFINITY;
            for s in sectors {
                let q = crate::geom::rotate2(&rel, -s.rotation);
                d = d.min((q[1] - s.boundary.value(&[q[0]])).abs());
            }
            d
        }
    }
}

/// Complement-of-quadrants model shared by tests: open QII and QIV, so the
/// modeled set is `{xy >= 0}` near the origin.
#[cfg(test)]
pub(crate) fn quadrant_pair_model() -> PlanarLocalModel {
    // epi_S(|x|) spans directions (45, 135) degrees; rotating by 45
    // degrees covers quadrant II, by 225 degrees quadrant IV.
    let q2 = OpenSectorSpec {
        rotation: std::f64::consts::FRAC_PI_4,
        radius: 1.0,
        boundary: crate::dc::abs_1d(),
    };
    let q4 = OpenSectorSpec {
        rotation: std::f64::consts::FRAC_PI_4 + std::f64::consts::PI,
        radius: 1.0,
        boundary: crate::dc::abs_1d(),
    };
    PlanarLocalModel::ComplementOf { base: vec![0.0, 0.0], sectors: vec![q2, q4] }
}
