//! Subdifferentials of polyhedral DC functions.
//!
//! Three modes are offered. The convex-part mode returns the subdifferential
//! of the convex component `g` alone. The outer mode returns the Minkowski
//! difference of the component subdifferentials, which always contains the
//! Clarke set. The clarke mode returns the exact convex hull of gradients of
//! neighboring full-dimensional linearity cells, each certified by a strict
//! linear feasibility test.

use serde::{Deserialize, Serialize};

use crate::dc::DCFunction;
use crate::error::{Error, Result};
use crate::geom::sub;
use crate::lp::{self, Constraint};
use crate::polytope::VPolytope;

/// Default activity tolerance for piece selection.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Minimum interior margin for a cell to count as full-dimensional.
pub const TOL_CELL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubdiffMode {
    ConvexPart,
    Outer,
    Clarke,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Exactness {
    ConvexExact,
    ClarkeExact,
    OuterEstimate,
}

/// A subdifferential carried as the convex hull of its vertex set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubdiffResult {
    pub hull: VPolytope,
    pub exactness: Exactness,
}

/// Subdifferential of `f` at `x` in the requested mode.
pub fn subdiff(f: &DCFunction, x: &[f64], mode: SubdiffMode, tol: f64) -> Result<SubdiffResult> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    if tol <= 0.0 {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    match mode {
        SubdiffMode::ConvexPart => {
            let active = f.g.active(x, tol);
            let verts: Vec<Vec<f64>> = active.iter().map(|&i| f.g.pieces[i].a.clone()).collect();
            Ok(SubdiffResult {
                hull: VPolytope::new(verts).pruned(),
                exactness: Exactness::ConvexExact,
            })
        }
        SubdiffMode::Outer => {
            let dg = convex_subdiff(&f.g, x, tol);
            let dh = convex_subdiff(&f.h, x, tol);
            Ok(SubdiffResult {
                hull: dg.pairwise_difference(&dh),
                exactness: Exactness::OuterEstimate,
            })
        }
        SubdiffMode::Clarke => {
            if f.dim() > 3 {
                return Err(Error::Unsupported(format!(
                    "clarke mode certifies cells only up to dimension 3, got {}",
                    f.dim()
                )));
            }
            let verts = clarke_vertices(f, x, tol)?;
            Ok(SubdiffResult {
                hull: VPolytope::new(verts).pruned(),
                exactness: Exactness::ClarkeExact,
            })
        }
    }
}

fn convex_subdiff(m: &crate::dc::MaxAffine, x: &[f64], tol: f64) -> VPolytope {
    let active = m.active(x, tol);
    VPolytope::new(active.iter().map(|&i| m.pieces[i].a.clone()).collect()).pruned()
}

/// Gradients `a_i - c_j` over certified active pairs.
fn clarke_vertices(f: &DCFunction, x: &[f64], tol: f64) -> Result<Vec<Vec<f64>>> {
    let ag = f.g.active(x, tol);
    let ah = f.h.active(x, tol);
    // Smooth fast path: a unique active pair is its own certificate.
    if ag.len() == 1 && ah.len() == 1 {
        return Ok(vec![sub(&f.g.pieces[ag[0]].a, &f.h.pieces[ah[0]].a)]);
    }
    let mut verts = Vec::new();
    for &i in &ag {
        for &j in &ah {
            if cell_is_full_dimensional(f, x, i, j)? {
                verts.push(sub(&f.g.pieces[i].a, &f.h.pieces[j].a));
            }
        }
    }
    if verts.is_empty() {
        // Certification can starve only through numerical degeneracy of the
        // activity pattern; fall back to the best active pair.
        verts.push(sub(&f.g.pieces[ag[0]].a, &f.h.pieces[ah[0]].a));
    }
    Ok(verts)
}

/// Is the joint strict-activity region of pieces (i, j) full-dimensional
/// with closure containing `x`? Weak activity at `x` settles the closure
/// half; the strict half maximizes the minimum slack near `x`.
fn cell_is_full_dimensional(f: &DCFunction, x: &[f64], i: usize, j: usize) -> Result<bool> {
    let d = f.dim();
    let mut strict = Vec::new();
    let gi = &f.g.pieces[i];
    for (k, gk) in f.g.pieces.iter().enumerate() {
        if k != i {
            strict.push(Constraint::new(sub(&gk.a, &gi.a), gi.b - gk.b));
        }
    }
    let hj = &f.h.pieces[j];
    for (l, hl) in f.h.pieces.iter().enumerate() {
        if l != j {
            strict.push(Constraint::new(sub(&hl.a, &hj.a), hj.b - hl.b));
        }
    }
    if strict.is_empty() {
        return Ok(true);
    }
    let mut weak = Vec::new();
    for m in 0..d {
        let mut e = vec![0.0; d];
        e[m] = 1.0;
        weak.push(Constraint::new(e.clone(), x[m] + 1.0));
        e[m] = -1.0;
        weak.push(Constraint::new(e, 1.0 - x[m]));
    }
    match lp::max_slack(&strict, &weak, 1.0) {
        Some(s) => Ok(s > TOL_CELL),
        None => Err(Error::Internal("cell certification box infeasible".into())),
    }
}

/// Clarke hull followed by its min-norm point; the canonical descent data.
pub fn clarke_min_norm(f: &DCFunction, x: &[f64], tol: f64) -> Result<crate::polytope::MinNormResult> {
    let sd = subdiff(f, x, SubdiffMode::Clarke, tol)?;
    crate::polytope::min_norm_point(&sd.hull)
}
