//! Deformation retraction onto sublevel sets by min-norm-direction descent.
//!
//! The flow moves at speed two along the normalized min-norm Clarke
//! subgradient, recomputed each step. The Wolfe certificate of the min-norm
//! point guarantees a directional decrease rate of at least twice the local
//! min-norm, so the pseudo-time to reach the sublevel set is bounded by
//! `f(x0) / margin`.

use serde::{Deserialize, Serialize};

use crate::dc::DCFunction;
use crate::error::{Error, Result};
use crate::geom;
use crate::subdiff;

/// Flow parameters. `eps_reg` is the verified regularity margin of the
/// shell the flow crosses.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetractionConfig {
    pub eps_reg: f64,
    pub step: f64,
    pub tol_level: f64,
    pub max_iter: usize,
}

impl RetractionConfig {
    pub fn new(eps_reg: f64, f_start: f64) -> Self {
        assert!(eps_reg > 0.0);
        RetractionConfig {
            eps_reg,
            step: 0.01,
            tol_level: 1e-9 * (1.0 + f_start.abs()),
            max_iter: 1_000_000,
        }
    }
}

/// Time-stamped descent path.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RetractionTrace {
    /// (pseudo-time, point, f value) per accepted step.
    pub samples: Vec<(f64, Vec<f64>, f64)>,
    /// Lipschitz bound of `f` from piece gradients.
    pub lip_f: f64,
}

impl RetractionTrace {
    pub fn start(&self) -> &(f64, Vec<f64>, f64) {
        self.samples.first().expect("trace never empty")
    }

    pub fn end(&self) -> &(f64, Vec<f64>, f64) {
        self.samples.last().expect("trace never empty")
    }

    pub fn total_time(&self) -> f64 {
        self.end().0
    }

    /// CSV rows `t,x...,f` with a header.
    pub fn to_csv(&self) -> String {
        let d = self.start().1.len();
        let mut out = String::from("t");
        for i in 0..d {
            out.push_str(&format!(",x{i}"));
        }
        out.push_str(",f\n");
        for (t, x, fx) in &self.samples {
            out.push_str(&format!("{t}"));
            for xi in x {
                out.push_str(&format!(",{xi}"));
            }
            out.push_str(&format!(",{fx}\n"));
        }
        out
    }
}

/// Activity tolerance for subdifferentials along the flow: tighter than
/// the default so the flat zero region's gradient does not enter the hull
/// while the trace is still above its terminal level.
const FLOW_TOL: f64 = 1e-11;

/// Normalized min-norm subgradient direction at `x`. The Wolfe certificate
/// gives `<d, v> >= |p|` for every `v` in the Clarke hull, so `-d` is a
/// descent direction with rate at least `|p| >= eps_min`.
pub fn descent_direction(f: &DCFunction, x: &[f64], eps_min: f64) -> Result<(Vec<f64>, f64)> {
    let mn = subdiff::clarke_min_norm(f, x, FLOW_TOL)?;
    if mn.norm < eps_min {
        return Err(Error::RegularityViolation {
            point: x.to_vec(),
            norm: mn.norm,
            required: eps_min,
        });
    }
    Ok((geom::scale(&mn.point, 1.0 / mn.norm), mn.norm))
}

/// Fraction of the certified decrease rate a step must achieve.
const ARMIJO: f64 = 0.9;

/// Flow from `x0` down to the level `cfg.tol_level`, recording the path.
pub fn retract(f: &DCFunction, x0: &[f64], cfg: &RetractionConfig) -> Result<RetractionTrace> {
    let f0 = f.eval(x0)?;
    if f0 < 0.0 {
        return Err(Error::Invalid("flow starts below the zero level".into()));
    }
    let lip = f.lipschitz();
    let mut samples = vec![(0.0, x0.to_vec(), f0)];
    if f0 <= cfg.tol_level {
        return Ok(RetractionTrace { samples, lip_f: lip });
    }

    let mut x = x0.to_vec();
    let mut fx = f0;
    let mut t = 0.0;
    for _ in 0..cfg.max_iter {
        let (dir, p_norm) = descent_direction(f, &x, cfg.eps_reg)?;
        // speed-2 step with halving until the certified rate is achieved
        let mut dt = cfg.step;
        let (next, f_next, dt_used) = loop {
            let cand = step_point(&x, &dir, dt);
            let fc = f.value(&cand);
            if fc <= fx - ARMIJO * 2.0 * p_norm * dt {
                break (cand, fc, dt);
            }
            dt *= 0.5;
            if dt < 1e-15 * (1.0 + cfg.step) {
                return Err(Error::Internal(
                    "step collapsed without achieving the certified decrease".into(),
                ));
            }
        };
        if f_next <= cfg.tol_level {
            // resolve the crossing of the level by bisection on the segment
            let (xc, fc, frac) = bisect_crossing(f, &x, &dir, dt_used, cfg.tol_level);
            t += dt_used * frac;
            samples.push((t, xc, fc));
            return Ok(RetractionTrace { samples, lip_f: lip });
        }
        x = next;
        fx = f_next;
        t += dt_used;
        samples.push((t, x.clone(), fx));
    }
    Err(Error::MaxIterExceeded(cfg.max_iter))
}

fn step_point(x: &[f64], dir: &[f64], dt: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    geom::axpy(&mut y, -2.0 * dt, dir);
    y
}

/// Bisect along the last segment to land on `f <= level` within 1e-12 of
/// the level. Returns the point, its value, and the fraction of the step.
fn bisect_crossing(
    f: &DCFunction,
    x: &[f64],
    dir: &[f64],
    dt: f64,
    level: f64,
) -> (Vec<f64>, f64, f64) {
    let mut lo = 0.0f64; // f(lo) > level
    let mut hi = 1.0f64; // f(hi) <= level
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let p = step_point(x, dir, dt * mid);
        let fp = f.value(&p);
        if fp <= level {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let p = step_point(x, dir, dt * hi);
    let fp = f.value(&p);
    (p, fp, hi)
}

/// Pass/fail verification of the shell inequalities along a trace.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    /// min over samples of f(x_k) / ((eps/2) |x_k - x_end|); the shell
    /// inequality asks for >= 1.
    pub worst_distance_ratio: f64,
    /// f(z) against (eps/2) dist(z, M) from below, dist estimated by the
    /// endpoint and the best membership probe.
    pub start_lower_ratio: f64,
    /// f(z) against Lip f times the distance estimate from above.
    pub start_upper_ratio: f64,
    pub total_time: f64,
    pub time_bound: f64,
    pub pass: bool,
}

/// Check the distance inequalities at every sample against the endpoint,
/// and the start-point two-sided bound. `membership_probes` supplies extra
/// candidate zero-set points for the upper distance estimate.
pub fn verify_trace(
    trace: &RetractionTrace,
    cfg: &RetractionConfig,
    membership_probes: &[Vec<f64>],
    rel_slack: f64,
) -> TraceReport {
    let (_, end, _) = trace.end();
    let eps = cfg.eps_reg;
    let mut worst = f64::INFINITY;
    for (_, x, fx) in &trace.samples {
        let d = geom::dist(x, end);
        if d > 1e-12 {
            worst = worst.min(fx / (0.5 * eps * d));
        }
    }
    let (_, z, fz) = trace.start();
    let mut dist_est = geom::dist(z, end);
    for p in membership_probes {
        dist_est = dist_est.min(geom::dist(z, p));
    }
    let start_lower_ratio = if dist_est > 1e-12 {
        fz / (0.5 * eps * dist_est)
    } else {
        f64::INFINITY
    };
    let start_upper_ratio = if *fz > 1e-12 {
        trace.lip_f * dist_est / fz
    } else {
        f64::INFINITY
    };
    let total_time = trace.total_time();
    let time_bound = 1.1 * trace.start().2 / eps;
    let pass = worst >= 1.0 - rel_slack
        && start_lower_ratio >= 1.0 - rel_slack
        && start_upper_ratio >= 1.0 - rel_slack
        && total_time <= time_bound;
    TraceReport {
        worst_distance_ratio: worst,
        start_lower_ratio,
        start_upper_ratio,
        total_time,
        time_bound,
        pass,
    }
}

/// Report of a boundary-path shortening computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPathReport {
    pub output: Vec<Vec<f64>>,
    pub input_diameter: f64,
    pub output_diameter: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Retract every point of a curve and compare the output diameter with the
/// shortening bound `(6 / eps) * diam(input) + slack`.
pub fn boundary_path(
    f: &DCFunction,
    curve: &[Vec<f64>],
    cfg: &RetractionConfig,
) -> Result<BoundaryPathReport> {
    if curve.is_empty() {
        return Err(Error::EmptyInput("boundary_path"));
    }
    let mut output = Vec::with_capacity(curve.len());
    for p in curve {
        let trace = retract(f, p, cfg)?;
        output.push(trace.end().1.clone());
    }
    let diam = |pts: &[Vec<f64>]| -> f64 {
        let mut d = 0.0f64;
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                d = d.max(geom::dist(a, b));
            }
        }
        d
    };
    let input_diameter = diam(curve);
    let output_diameter = diam(&output);
    let bound = 6.0 / cfg.eps_reg * input_diameter + 1e-6;
    Ok(BoundaryPathReport {
        pass: output_diameter <= bound,
        output,
        input_diameter,
        output_diameter,
        bound,
    })
}
