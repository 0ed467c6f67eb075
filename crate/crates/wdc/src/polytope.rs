//! Vertex-represented polytopes, Wolfe's min-norm-point algorithm, and the
//! angular direction sets used by the weak-touch test.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{dot, norm, solve_dense, sub};

/// Convex polytope given by (not necessarily extremal) generating points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VPolytope {
    pub vertices: Vec<Vec<f64>>,
}

impl VPolytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Self {
        assert!(!vertices.is_empty(), "polytope needs at least one vertex");
        let d = vertices[0].len();
        assert!(vertices.iter().all(|v| v.len() == d && v.iter().all(|x| x.is_finite())));
        VPolytope { vertices }
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn translate(&self, t: &[f64]) -> VPolytope {
        VPolytope::new(
            self.vertices
                .iter()
                .map(|v| v.iter().zip(t).map(|(a, b)| a + b).collect())
                .collect(),
        )
    }

    /// Largest vertex norm.
    pub fn radius(&self) -> f64 {
        self.vertices.iter().map(|v| norm(v)).fold(0.0, f64::max)
    }

    /// Diameter: max pairwise vertex distance.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, v) in self.vertices.iter().enumerate() {
            for w in &self.vertices[i + 1..] {
                d = d.max(crate::geom::dist(v, w));
            }
        }
        d
    }

    /// Euclidean distance from a point to the hull.
    pub fn distance_to(&self, x: &[f64]) -> f64 {
        let shifted = self.translate(&x.iter().map(|v| -v).collect::<Vec<_>>());
        min_norm_point(&shifted).map(|r| r.norm).unwrap_or(f64::INFINITY)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// Keep only the extreme points of the hull.
    pub fn pruned(&self) -> VPolytope {
        let scale = 1.0 + self.radius();
        let tol = 1e-10 * scale;
        let mut pts = self.vertices.clone();
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| crate::geom::dist(a, b) <= tol);
        let mut k = 0;
        while k < pts.len() && pts.len() > 1 {
            let cand = pts[k].clone();
            let others: Vec<Vec<f64>> =
                pts.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, v)| v.clone()).collect();
            let hull = VPolytope::new(others);
            if hull.distance_to(&cand) <= tol {
                pts.remove(k);
            } else {
                k += 1;
            }
        }
        VPolytope::new(pts)
    }

    /// Minkowski difference of vertex hulls: hull of pairwise differences.
    pub fn pairwise_difference(&self, other: &VPolytope) -> VPolytope {
        let mut pts = Vec::with_capacity(self.vertices.len() * other.vertices.len());
        for v in &self.vertices {
            for w in &other.vertices {
                pts.push(sub(v, w));
            }
        }
        VPolytope::new(pts).pruned()
    }
}

/// Output of the min-norm-point computation with its optimality certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinNormResult {
    pub point: Vec<f64>,
    pub norm: f64,
    /// max over vertices v of |p|^2 - <p, v>; <= tol at optimality.
    pub certificate_gap: f64,
}

const TOL_OPT: f64 = 1e-10;

/// Wolfe's min-norm-point algorithm over the convex hull of the vertices.
/// Deterministic: ties in the linear minimization break to the lowest index.
pub fn min_norm_point(p: &VPolytope) -> Result<MinNormResult> {
    if p.vertices.is_empty() {
        return Err(Error::EmptyInput("min_norm_point"));
    }
    let pts = &p.vertices;
    let scale = 1.0 + p.radius().powi(2);
    let tol = TOL_OPT * scale;

    // start from the smallest vertex
    let start = (0..pts.len())
        .min_by(|&i, &j| norm(&pts[i]).partial_cmp(&norm(&pts[j])).unwrap())
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let mut x = pts[start].clone();

    let max_major = 16 * pts.len() * pts.len() + 64;
    for _ in 0..max_major {
        // linear minimization oracle
        let j = (0..pts.len())
            .min_by(|&a, &b| dot(&x, &pts[a]).partial_cmp(&dot(&x, &pts[b])).unwrap())
            .unwrap();
        let xx = dot(&x, &x);
        if dot(&x, &pts[j]) >= xx - tol || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        // minor cycles: move to the affine minimizer, dropping vertices
        // whose weight would turn negative
        for _minor in 0..(4 * pts.len() + 16) {
            let mu = match affine_minimizer(pts, &corral) {
                Some(mu) => mu,
                None => {
                    corral.pop();
                    weights.pop();
                    break;
                }
            };
            if mu.iter().all(|&m| m > 1e-12) {
                weights = mu;
                break;
            }
            // largest step keeping all weights nonnegative
            let mut theta = 1.0f64;
            for (w, m) in weights.iter().zip(&mu) {
                if m < w {
                    theta = theta.min(w / (w - m));
                }
            }
            let mut next: Vec<f64> = weights
                .iter()
                .zip(&mu)
                .map(|(w, m)| (1.0 - theta) * w + theta * m)
                .collect();
            // drop zeroed vertices
            let mut keep_idx = Vec::new();
            for (i, &w) in next.iter().enumerate() {
                if w > 1e-12 {
                    keep_idx.push(i);
                }
            }
            if keep_idx.len() == next.len() {
                // numerical stall: keep the largest-weight subset
                let drop = next
                    .iter()
                    .enumerate()
                    .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .map(|(i, _)| i)
                    .unwrap();
                keep_idx.retain(|&i| i != drop);
            }
            corral = keep_idx.iter().map(|&i| corral[i]).collect();
            next = keep_idx.iter().map(|&i| next[i]).collect();
            let total: f64 = next.iter().sum();
            weights = next.iter().map(|w| w / total).collect();
            if corral.len() <= 1 {
                break;
            }
        }

        x = combine(pts, &corral, &weights);
    }

    let gap = pts
        .iter()
        .map(|v| dot(&x, &x) - dot(&x, v))
        .fold(f64::NEG_INFINITY, f64::max)
        .max(0.0);
    Ok(MinNormResult { norm: norm(&x), point: x, certificate_gap: gap })
}

fn combine(pts: &[Vec<f64>], corral: &[usize], weights: &[f64]) -> Vec<f64> {
    let d = pts[0].len();
    let mut x = vec![0.0; d];
    for (&i, &w) in corral.iter().zip(weights) {
        for (xj, pj) in x.iter_mut().zip(&pts[i]) {
            *xj += w * pj;
        }
    }
    x
}

/// Minimize |sum mu_i s_i| over the affine hull (sum mu = 1), by the KKT
/// system on the Gram matrix. None when the system is singular.
fn affine_minimizer(pts: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let m = corral.len();
    let mut a = vec![vec![0.0; m + 1]; m + 1];
    let mut b = vec![0.0; m + 1];
    b[0] = 1.0;
    for i in 0..m {
        a[0][i + 1] = 1.0;
        a[i + 1][0] = 1.0;
        for j in 0..m {
            a[i + 1][j + 1] = dot(&pts[corral[i]], &pts[corral[j]]);
        }
    }
    let sol = solve_dense(a, b)?;
    Some(sol[1..].to_vec())
}

/// A set of directions on the circle: the image of `P \ {0}` under
/// normalization, for a planar polytope `P`.
#[derive(Debug, Clone, PartialEq)]
pub enum AngularSet {
    Empty,
    Full,
    /// Closed arc from `lo` counterclockwise to `hi` (radians, hi >= lo,
    /// hi - lo <= pi + eps).
    Arc { lo: f64, hi: f64 },
}

/// Exact direction set of a planar polytope minus the origin. Vertices with
/// norm below `tol` are treated as the origin itself.
pub fn angular_set_2d(p: &VPolytope, tol: f64) -> AngularSet {
    assert_eq!(p.dim(), 2);
    let mut angles: Vec<f64> = p
        .vertices
        .iter()
        .filter(|v| norm(v) > tol)
        .map(|v| v[1].atan2(v[0]))
        .collect();
    if angles.is_empty() {
        return AngularSet::Empty;
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    angles.dedup();
    if angles.len() == 1 {
        return AngularSet::Arc { lo: angles[0], hi: angles[0] };
    }
    // widest circular gap between consecutive directions
    let two_pi = std::f64::consts::TAU;
    let mut best_gap = 0.0;
    let mut gap_start = 0usize;
    for i in 0..angles.len() {
        let next = angles[(i + 1) % angles.len()];
        let gap = if i + 1 == angles.len() {
            next + two_pi - angles[i]
        } else {
            next - angles[i]
        };
        if gap > best_gap {
            best_gap = gap;
            gap_start = i;
        }
    }
    if best_gap < std::f64::consts::PI - 1e-9 {
        // directions span more than a halfplane, so the hull surrounds 0
        return AngularSet::Full;
    }
    let lo = angles[(gap_start + 1) % angles.len()];
    let mut hi = angles[gap_start];
    if hi < lo {
        hi += two_pi;
    }
    AngularSet::Arc { lo, hi }
}

/// Does some direction of `a` oppose a direction of `b` within `tol_angle`?
/// Returns the witnessing direction from `a` when so.
pub fn antipodal_witness(a: &AngularSet, b: &AngularSet, tol_angle: f64) -> Option<f64> {
    let pi = std::f64::consts::PI;
    match (a, b) {
        (AngularSet::Empty, _) | (_, AngularSet::Empty) => None,
        (AngularSet::Full, AngularSet::Full) => Some(0.0),
        (AngularSet::Full, AngularSet::Arc { lo, .. }) => Some(lo + pi),
        (AngularSet::Arc { lo, .. }, AngularSet::Full) => Some(*lo),
        (AngularSet::Arc { lo: a0, hi: a1 }, AngularSet::Arc { lo: b0, hi: b1 }) => {
            // intersect [a0, a1] with [b0 + pi, b1 + pi] on the circle
            let (c0, c1) = (b0 + pi - tol_angle, b1 + pi + tol_angle);
            let (a0, a1) = (a0 - tol_angle, a1 + tol_angle);
            for shift in [-std::f64::consts::TAU, 0.0, std::f64::consts::TAU] {
                let lo = a0.max(c0 + shift);
                let hi = a1.min(c1 + shift);
                if lo <= hi {
                    return Some(0.5 * (lo + hi));
                }
            }
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact oracle for d <= 3: enumerate all vertex subsets of size <= d+1,
    /// project the origin on each simplex, and take the best feasible point.
    fn mnp_oracle(pts: &[Vec<f64>]) -> Vec<f64> {
        let n = pts.len();
        let d = pts[0].len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut consider = |subset: &[usize]| {
            if let Some(mu) = affine_minimizer(pts, subset) {
                if mu.iter().all(|&m| m >= -1e-9) {
                    let x = combine(pts, subset, &mu);
                    let nx = norm(&x);
                    if best.as_ref().is_none_or(|(bn, _)| nx < *bn) {
                        best = Some((nx, x));
                    }
                }
            }
        };
        // all subsets of size 1..=d+1
        for mask in 1u32..1 << n {
            let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            if subset.len() <= d + 1 {
                consider(&subset);
            }
        }
        best.unwrap().1
    }

    #[test]
    fn symmetric_segment() {
        let p = VPolytope::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = min_norm_point(&p).unwrap();
        assert!((r.point[0] - 0.5).abs() < 1e-10);
        assert!((r.point[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn one_dimensional_interval() {
        let p = VPolytope::new(vec![vec![2.0], vec![3.0]]);
        let r = min_norm_point(&p).unwrap();
        assert!((r.point[0] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn triangle_projection_matches_qp_oracle() {
        let pts = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![3.0, 0.0]];
        let p = VPolytope::new(pts.clone());
        let r = min_norm_point(&p).unwrap();
        let want = mnp_oracle(&pts);
        assert!(crate::geom::dist(&r.point, &want) < 1e-9);
        assert!((r.point[0] - 1.0).abs() < 1e-10 && r.point[1].abs() < 1e-10);
    }

    #[test]
    fn random_instances_match_oracle() {
        let plan = crate::sample::SamplingPlan::new(
            5,
            crate::geom::BoundingBox::centered(3, 2.0),
            60,
        );
        let pts: Vec<Vec<f64>> = plan.points().collect();
        for case in 0..10 {
            let vs: Vec<Vec<f64>> = pts[case * 6..case * 6 + 6].to_vec();
            let p = VPolytope::new(vs.clone());
            let r = min_norm_point(&p).unwrap();
            let want = mnp_oracle(&vs);
            assert!(
                (r.norm - norm(&want)).abs() <= 1e-8 * (1.0 + r.norm),
                "case {case}: {} vs {}",
                r.norm,
                norm(&want)
            );
        }
    }

    #[test]
    fn wolfe_certificate_holds() {
        let p = VPolytope::new(vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![3.0, 0.0]]);
        let r = min_norm_point(&p).unwrap();
        for v in &p.vertices {
            assert!(dot(&r.point, v) >= r.norm * r.norm - 1e-9);
        }
        assert!(r.certificate_gap <= 1e-9);
    }

    #[test]
    fn containment_when_origin_inside() {
        let p = VPolytope::new(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.5],
            vec![0.0, -1.0],
        ]);
        let r = min_norm_point(&p).unwrap();
        assert!(r.norm < 1e-9);
    }

    #[test]
    fn pruning_removes_interior_points() {
        let p = VPolytope::new(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![0.0, 2.0],
            vec![0.5, 0.5], // inside
            vec![1.0, 0.0], // on an edge
        ]);
        let pruned = p.pruned();
        assert_eq!(pruned.vertices.len(), 3);
    }

    #[test]
    fn angular_set_of_quarter_arc() {
        let p = VPolytope::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        match angular_set_2d(&p, 1e-12) {
            AngularSet::Arc { lo, hi } => {
                assert!(lo.abs() < 1e-12);
                assert!((hi - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn angular_set_detects_interior_origin() {
        let p = VPolytope::new(vec![
            vec![1.0, 0.1],
            vec![-1.0, 0.8],
            vec![0.1, -1.0],
        ]);
        assert_eq!(angular_set_2d(&p, 1e-12), AngularSet::Full);
    }

    #[test]
    fn antipodal_arcs_found() {
        let a = AngularSet::Arc { lo: 0.0, hi: 0.5 };
        let b = AngularSet::Arc {
            lo: std::f64::consts::PI,
            hi: std::f64::consts::PI + 0.2,
        };
        assert!(antipodal_witness(&a, &b, 1e-6).is_some());
        let c = AngularSet::Arc { lo: 1.0, hi: 1.2 };
        assert!(antipodal_witness(&a, &c, 1e-6).is_none());
    }
}
