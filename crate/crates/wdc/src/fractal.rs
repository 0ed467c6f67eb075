//! A self-similar planar set with a Lipschitz aura: the two-similarity
//! family parameterized by an opening angle, generated to finite depth and
//! certified numerically against its subgradient lower bound.
//!
//! This module deliberately steps outside the polyhedral core: the distance
//! function to the attractor is a Lipschitz aura, and its subgradients are
//! estimated through metric-projection fans onto the segment approximation.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;
use crate::polytope::{self, VPolytope};

/// Two-map iterated function system driven by the angle `alpha`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct IFSSpec {
    pub alpha: f64,
}

/// An indirect similarity `z -> p conj(z) + q` in complex form.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    p: (f64, f64),
    q: (f64, f64),
}

impl Similarity {
    pub fn apply(&self, z: &[f64]) -> Vec<f64> {
        // p * conj(z) + q
        let (px, py) = self.p;
        let (zx, zy) = (z[0], -z[1]);
        vec![px * zx - py * zy + self.q.0, px * zy + py * zx + self.q.1]
    }

    pub fn ratio(&self) -> f64 {
        (self.p.0 * self.p.0 + self.p.1 * self.p.1).sqrt()
    }

    /// The unique indirect similarity sending `a -> fa` and `b -> fb`.
    fn from_pairs(a: &[f64], fa: &[f64], b: &[f64], fb: &[f64]) -> Similarity {
        // p = (fa - fb) / conj(a - b)
        let num = (fa[0] - fb[0], fa[1] - fb[1]);
        let den = (a[0] - b[0], -(a[1] - b[1]));
        let d2 = den.0 * den.0 + den.1 * den.1;
        let p = (
            (num.0 * den.0 + num.1 * den.1) / d2,
            (num.1 * den.0 - num.0 * den.1) / d2,
        );
        // q = fa - p conj(a)
        let ca = (a[0], -a[1]);
        let pa = (p.0 * ca.0 - p.1 * ca.1, p.0 * ca.1 + p.1 * ca.0);
        Similarity { p, q: (fa[0] - pa.0, fa[1] - pa.1) }
    }
}

impl IFSSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < std::f64::consts::PI / 8.0) {
            return Err(Error::Invalid(format!(
                "alpha must lie in (0, pi/8), got {alpha}"
            )));
        }
        Ok(IFSSpec { alpha })
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    /// Contraction coefficient `1 / (2 cos alpha)`.
    pub fn ratio(&self) -> f64 {
        1.0 / (2.0 * self.alpha.cos())
    }

    /// The obtuse apex angle `pi - 4 alpha`.
    pub fn gamma(&self) -> f64 {
        std::f64::consts::PI - 4.0 * self.alpha
    }

    /// Base triangle vertices.
    pub fn v_minus(&self) -> Vec<f64> {
        vec![-0.5, 0.0]
    }

    pub fn v_plus(&self) -> Vec<f64> {
        vec![0.5, 0.0]
    }

    pub fn apex(&self) -> Vec<f64> {
        vec![0.0, 0.5 * self.alpha.tan()]
    }

    pub fn b_plus(&self) -> Vec<f64> {
        let c = self.alpha.cos();
        vec![0.5 - 1.0 / (4.0 * c * c), 0.0]
    }

    pub fn b_minus(&self) -> Vec<f64> {
        let b = self.b_plus();
        vec![-b[0], b[1]]
    }

    /// The two contractions: `phi_minus` fixes the left vertex and maps the
    /// base onto the left leg, `phi_plus` mirrors it on the right.
    pub fn maps(&self) -> (Similarity, Similarity) {
        let vm = self.v_minus();
        let vp = self.v_plus();
        let apex = self.apex();
        let minus = Similarity::from_pairs(&vm, &vm, &vp, &apex);
        let plus = Similarity::from_pairs(&vm, &apex, &vp, &vp);
        (minus, plus)
    }

    /// Hausdorff dimension `ln(1/2) / ln(a)`.
    pub fn hausdorff_dim(&self) -> f64 {
        0.5f64.ln() / self.ratio().ln()
    }
}

/// Depth-n polyline approximation of the attractor: `2^n` chained segments
/// from the left vertex to the right one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FractalApprox {
    pub depth: usize,
    pub points: Vec<Vec<f64>>,
    /// Certified Hausdorff distance bound to the attractor.
    pub hausdorff_bound: f64,
}

impl FractalApprox {
    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Vec<f64>, &Vec<f64>)> {
        self.points.windows(2).map(|w| (&w[0], &w[1]))
    }

    /// Distance to the segment family and the nearby projection fan: all
    /// unit vectors from `x` to nearest points on segments within
    /// `fan_tol` of the minimum distance.
    pub fn projection_fan(&self, x: &[f64], fan_tol: f64) -> (f64, Vec<Vec<f64>>) {
        let mut hits: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            let (d, y) = geom::point_segment_distance(x, a, b);
            best = best.min(d);
            hits.push((d, y));
        }
        let mut fan: Vec<Vec<f64>> = Vec::new();
        for (d, y) in hits {
            if d <= best + fan_tol && d > 1e-13 {
                let v = geom::sub(x, &y);
                let u = geom::scale(&v, 1.0 / geom::norm(&v));
                // adjacent collinear segments produce duplicate directions
                if fan.iter().all(|w| geom::dist(w, &u) > 1e-12) {
                    fan.push(u);
                }
            }
        }
        (best, fan)
    }
}

/// Generate the depth-n approximation. Depth 0 is the base segment.
pub fn ifs_generate(spec: &IFSSpec, depth: usize) -> Result<FractalApprox> {
    if depth > 20 {
        return Err(Error::Invalid(format!("depth {depth} exceeds the limit 20")));
    }
    let (minus, plus) = spec.maps();
    let mut points = vec![spec.v_minus(), spec.v_plus()];
    for _ in 0..depth {
        let left: Vec<Vec<f64>> = points.iter().map(|p| minus.apply(p)).collect();
        let right: Vec<Vec<f64>> = points.iter().map(|p| plus.apply(p)).collect();
        let mut next = left;
        next.extend(right.into_iter().skip(1));
        points = next;
    }
    let bound = spec.ratio().powi(depth as i32);
    Ok(FractalApprox { depth, points, hausdorff_bound: bound })
}

/// Numerical certification of the projection-fan lower bound over a grid
/// shell around the depth-n approximation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularityCheck {
    pub min_norm: f64,
    /// The theoretical bound `-cos gamma`.
    pub bound: f64,
    /// Discretization allowance subtracted from the bound.
    pub slack: f64,
    pub samples: usize,
    pub pass: bool,
    /// Grid point attaining the minimum.
    pub argmin: Vec<f64>,
}

/// Sweep a grid over the inflated base triangle; at every point whose
/// distance to the approximation lies in the shell, collect the projection
/// fan and its min-norm point. The reported minimum is compared against
/// `-cos gamma - slack` with a discretization slack from the depth bound
/// and the fan tolerance.
pub fn fractal_regularity_check(
    spec: &IFSSpec,
    depth: usize,
    grid: f64,
    shell: (f64, f64),
) -> Result<RegularityCheck> {
    let (d_min, d_max) = shell;
    if !(d_min > 0.0 && d_max > d_min) {
        return Err(Error::Invalid("shell bounds must satisfy 0 < d_min < d_max".into()));
    }
    let approx = ifs_generate(spec, depth)?;
    if d_min <= 2.0 * approx.hausdorff_bound {
        return Err(Error::Invalid(format!(
            "shell inner radius {d_min} incompatible with depth {depth}: needs > {}",
            2.0 * approx.hausdorff_bound
        )));
    }
    let fan_tol = grid / 10.0;
    // box: triangle extent inflated by the outer shell radius
    let top = spec.apex()[1];
    let lo = [-0.5 - d_max, -d_max];
    let hi = [0.5 + d_max, top + d_max];
    let nx = ((hi[0] - lo[0]) / grid).ceil() as usize;
    let ny = ((hi[1] - lo[1]) / grid).ceil() as usize;

    let rows: Vec<(f64, usize, Vec<f64>)> = (0..=ny)
        .into_par_iter()
        .map(|j| {
            let y = lo[1] + j as f64 * grid;
            let mut best = f64::INFINITY;
            let mut count = 0usize;
            let mut arg = Vec::new();
            for i in 0..=nx {
                let x = [lo[0] + i as f64 * grid, y];
                let (d, fan) = approx.projection_fan(&x, fan_tol);
                if d < d_min || d > d_max || fan.is_empty() {
                    continue;
                }
                count += 1;
                let mn = polytope::min_norm_point(&VPolytope::new(fan))
                    .map(|r| r.norm)
                    .unwrap_or(f64::INFINITY);
                if mn < best {
                    best = mn;
                    arg = x.to_vec();
                }
            }
            (best, count, arg)
        })
        .collect();

    let mut min_norm = f64::INFINITY;
    let mut samples = 0usize;
    let mut argmin = Vec::new();
    for (b, c, a) in rows {
        samples += c;
        if b < min_norm {
            min_norm = b;
            argmin = a;
        }
    }
    let bound = -spec.gamma().cos();
    // projection targets sit within the depth bound of the attractor and
    // the fan keeps segments within fan_tol of the minimum distance
    let slack = 2.0 * (approx.hausdorff_bound + fan_tol) / d_min;
    let pass = min_norm >= bound - slack;
    Ok(RegularityCheck { min_norm, bound, slack, samples, pass, argmin })
}
