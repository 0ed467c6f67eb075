//! Polyhedral DC functions: pairs of max-of-affine convex components.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::dot;
use crate::lp::{self, Constraint};

/// An affine map `x -> a . x + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub a: Vec<f64>,
    pub b: f64,
}

impl AffineMap {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        assert!(!a.is_empty(), "gradient must have dimension >= 1");
        assert!(a.iter().all(|v| v.is_finite()) && b.is_finite());
        AffineMap { a, b }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        dot(&self.a, x) + self.b
    }

    /// Constant map of the given dimension.
    pub fn constant(dim: usize, b: f64) -> Self {
        AffineMap::new(vec![0.0; dim], b)
    }
}

/// Convex piecewise-affine function `x -> max_i (a_i . x + b_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxAffine {
    pub pieces: Vec<AffineMap>,
}

/// Piece count above which dominance pruning by LP kicks in.
const PRUNE_THRESHOLD: usize = 64;

impl MaxAffine {
    pub fn new(pieces: Vec<AffineMap>) -> Self {
        assert!(!pieces.is_empty(), "MaxAffine needs at least one piece");
        let d = pieces[0].dim();
        assert!(pieces.iter().all(|p| p.dim() == d));
        let mut m = MaxAffine { pieces };
        m.dedup();
        m
    }

    pub fn constant(dim: usize, b: f64) -> Self {
        MaxAffine::new(vec![AffineMap::constant(dim, b)])
    }

    pub fn dim(&self) -> usize {
        self.pieces[0].dim()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Indices of pieces active at `x` within `tol * (1 + |max|)`.
    pub fn active(&self, x: &[f64], tol: f64) -> Vec<usize> {
        let vals: Vec<f64> = self.pieces.iter().map(|p| p.eval(x)).collect();
        let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let slack = tol * (1.0 + m.abs());
        (0..vals.len()).filter(|&i| vals[i] >= m - slack).collect()
    }

    /// Largest gradient norm over the pieces; a Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| crate::geom::norm(&p.a))
            .fold(0.0, f64::max)
    }

    /// Piecewise sum: every pair of pieces, then pruning.
    pub fn sum(&self, other: &MaxAffine) -> MaxAffine {
        assert_eq!(self.dim(), other.dim());
        let mut pieces = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for p in &self.pieces {
            for q in &other.pieces {
                let a: Vec<f64> = p.a.iter().zip(&q.a).map(|(x, y)| x + y).collect();
                pieces.push(AffineMap::new(a, p.b + q.b));
            }
        }
        let mut m = MaxAffine::new(pieces);
        m.prune_dominated();
        m
    }

    /// Pointwise max: union of piece lists.
    pub fn max(&self, other: &MaxAffine) -> MaxAffine {
        assert_eq!(self.dim(), other.dim());
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        let mut m = MaxAffine::new(pieces);
        m.prune_dominated();
        m
    }

    /// Scale by a nonnegative factor.
    pub fn scale(&self, s: f64) -> MaxAffine {
        assert!(s >= 0.0);
        if s == 0.0 {
            return MaxAffine::constant(self.dim(), 0.0);
        }
        MaxAffine::new(
            self.pieces
                .iter()
                .map(|p| AffineMap::new(p.a.iter().map(|v| v * s).collect(), p.b * s))
                .collect(),
        )
    }

    /// Precompose with `x -> M x + t` where `M` has one row per output
    /// coordinate of the transform (i.e. per input coordinate of `self`).
    pub fn precompose(&self, m: &[Vec<f64>], t: &[f64]) -> MaxAffine {
        assert_eq!(m.len(), self.dim());
        assert_eq!(t.len(), self.dim());
        let n = m[0].len();
        MaxAffine::new(
            self.pieces
                .iter()
                .map(|p| {
                    let mut a = vec![0.0; n];
                    for (row, &coef) in m.iter().zip(&p.a) {
                        for (aj, rj) in a.iter_mut().zip(row) {
                            *aj += coef * rj;
                        }
                    }
                    AffineMap::new(a, dot(&p.a, t) + p.b)
                })
                .collect(),
        )
    }

    /// Remove exact duplicates and equal-gradient pieces with smaller offset.
    fn dedup(&mut self) {
        self.pieces.sort_by(|p, q| {
            p.a.partial_cmp(&q.a)
                .unwrap()
                .then(p.b.partial_cmp(&q.b).unwrap())
        });
        self.pieces.dedup_by(|next, prev| {
            if next.a == prev.a {
                prev.b = prev.b.max(next.b);
                true
            } else {
                false
            }
        });
    }

    /// Drop pieces that never attain the max, checked by a strict-feasibility
    /// LP over a large implicit box. Only runs past the size threshold, so
    /// values inside that box never change.
    pub fn prune_dominated(&mut self) {
        if self.pieces.len() <= PRUNE_THRESHOLD {
            return;
        }
        let mut pieces = std::mem::take(&mut self.pieces);
        let mut k = 0;
        while k < pieces.len() && pieces.len() > 1 {
            let cand = &pieces[k];
            let strict: Vec<Constraint> = pieces
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, other)| {
                    let a: Vec<f64> = other.a.iter().zip(&cand.a).map(|(o, c)| o - c).collect();
                    Constraint::new(a, cand.b - other.b)
                })
                .collect();
            // LP failure keeps the piece: extra pieces never change values.
            let dominated = matches!(lp::max_slack(&strict, &[], 1.0), Some(s) if s <= 1e-9);
            if dominated {
                pieces.remove(k);
            } else {
                k += 1;
            }
        }
        self.pieces = pieces;
    }
}

/// A polyhedral DC function `f = g - h` with both components max-affine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DCFunction {
    pub g: MaxAffine,
    pub h: MaxAffine,
}

impl DCFunction {
    pub fn new(g: MaxAffine, h: MaxAffine) -> Self {
        assert_eq!(g.dim(), h.dim(), "components must share dimension");
        DCFunction { g, h }
    }

    /// Convex function as a DC pair with zero concave part.
    pub fn from_convex(g: MaxAffine) -> Self {
        let d = g.dim();
        DCFunction::new(g, MaxAffine::constant(d, 0.0))
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        DCFunction::from_convex(MaxAffine::constant(dim, c))
    }

    /// The affine function `a . x + b` as a DC pair.
    pub fn affine(map: AffineMap) -> Self {
        DCFunction::from_convex(MaxAffine::new(vec![map]))
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    /// Unchecked evaluation for hot loops.
    pub fn value(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.g.eval(x) - self.h.eval(x)
    }

    /// Upper bound on the Lipschitz constant from piece gradients.
    pub fn lipschitz(&self) -> f64 {
        self.g.lipschitz() + self.h.lipschitz()
    }

    pub fn add(&self, other: &DCFunction) -> Result<DCFunction> {
        self.check_dim(other)?;
        Ok(DCFunction::new(self.g.sum(&other.g), self.h.sum(&other.h)))
    }

    /// Scale by any finite factor; negative factors swap the components,
    /// zero collapses to the zero function.
    pub fn scale(&self, s: f64) -> DCFunction {
        assert!(s.is_finite());
        if s == 0.0 {
            let d = self.dim();
            return DCFunction::new(MaxAffine::constant(d, 0.0), MaxAffine::constant(d, 0.0));
        }
        if s > 0.0 {
            DCFunction::new(self.g.scale(s), self.h.scale(s))
        } else {
            DCFunction::new(self.h.scale(-s), self.g.scale(-s))
        }
    }

    /// max(f1, f2) = max(g1 + h2, g2 + h1) - (h1 + h2).
    pub fn max(&self, other: &DCFunction) -> Result<DCFunction> {
        self.check_dim(other)?;
        let left = self.g.sum(&other.h);
        let right = other.g.sum(&self.h);
        Ok(DCFunction::new(left.max(&right), self.h.sum(&other.h)))
    }

    /// min(f1, f2) = (g1 + g2) - max(g1 + h2, g2 + h1).
    pub fn min(&self, other: &DCFunction) -> Result<DCFunction> {
        self.check_dim(other)?;
        let left = self.g.sum(&other.h);
        let right = other.g.sum(&self.h);
        Ok(DCFunction::new(self.g.sum(&other.g), left.max(&right)))
    }

    /// Precompose with the affine change of variables `x -> M x + t`.
    pub fn precompose(&self, m: &[Vec<f64>], t: &[f64]) -> DCFunction {
        DCFunction::new(self.g.precompose(m, t), self.h.precompose(m, t))
    }

    /// Precompose with a planar rotation by `theta` about `center`, i.e.
    /// evaluate `self` in the frame obtained by rotating coordinates.
    pub fn precompose_rotation2(&self, theta: f64, center: &[f64]) -> DCFunction {
        assert_eq!(self.dim(), 2);
        let (s, c) = theta.sin_cos();
        let m = vec![vec![c, -s], vec![s, c]];
        let t = vec![
            center[0] - (c * center[0] - s * center[1]),
            center[1] - (s * center[0] + c * center[1]),
        ];
        // f(R x + t) with t chosen so the center is fixed.
        self.precompose(&m, &t)
    }

    fn check_dim(&self, other: &DCFunction) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(())
    }
}

/// Fold a nonempty list with the pointwise max.
pub fn max_of(fs: &[DCFunction]) -> Result<DCFunction> {
    let (first, rest) = fs.split_first().ok_or(Error::EmptyInput("max_of"))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.max(f))
}

/// Fold a nonempty list with the pointwise min.
pub fn min_of(fs: &[DCFunction]) -> Result<DCFunction> {
    let (first, rest) = fs.split_first().ok_or(Error::EmptyInput("min_of"))?;
    rest.iter().try_fold(first.clone(), |acc, f| acc.min(f))
}

/// Lattice expression over affine leaves: max/min nodes with >= 2 children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LatticeExpr {
    Leaf(AffineMap),
    Max(Vec<LatticeExpr>),
    Min(Vec<LatticeExpr>),
}

impl LatticeExpr {
    pub fn dim(&self) -> Result<usize> {
        match self {
            LatticeExpr::Leaf(m) => Ok(m.dim()),
            LatticeExpr::Max(children) | LatticeExpr::Min(children) => {
                if children.len() < 2 {
                    return Err(Error::Invalid(
                        "lattice node needs at least two children".into(),
                    ));
                }
                let d = children[0].dim()?;
                for c in &children[1..] {
                    if c.dim()? != d {
                        return Err(Error::DimensionMismatch { expected: d, got: c.dim()? });
                    }
                }
                Ok(d)
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            LatticeExpr::Leaf(m) => m.eval(x),
            LatticeExpr::Max(children) => children
                .iter()
                .map(|c| c.eval(x))
                .fold(f64::NEG_INFINITY, f64::max),
            LatticeExpr::Min(children) => children
                .iter()
                .map(|c| c.eval(x))
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// Convert a max/min lattice over affine leaves into a DC pair. Piece counts
/// can grow combinatorially with nesting depth; pruning keeps them in check.
pub fn lattice_to_dc(expr: &LatticeExpr) -> Result<DCFunction> {
    expr.dim()?;
    fn go(expr: &LatticeExpr) -> Result<DCFunction> {
        match expr {
            LatticeExpr::Leaf(m) => Ok(DCFunction::affine(m.clone())),
            LatticeExpr::Max(children) => {
                let parts: Result<Vec<_>> = children.iter().map(go).collect();
                max_of(&parts?)
            }
            LatticeExpr::Min(children) => {
                let parts: Result<Vec<_>> = children.iter().map(go).collect();
                min_of(&parts?)
            }
        }
    }
    go(expr)
}

/// Exact one-sided slope of a one-dimensional DC function, from piece data.
pub fn one_sided_slope_1d(f: &DCFunction, x: f64, side: Side) -> Result<f64> {
    if f.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim() });
    }
    Ok(component_slope(&f.g, x, side) - component_slope(&f.h, x, side))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One-sided slope of a 1-d convex max-affine: extreme active slope.
fn component_slope(m: &MaxAffine, x: f64, side: Side) -> f64 {
    let vals: Vec<f64> = m.pieces.iter().map(|p| p.a[0] * x + p.b).collect();
    let top = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-12 * (1.0 + top.abs());
    let slopes = m
        .pieces
        .iter()
        .zip(&vals)
        .filter(|(_, v)| **v >= top - tol)
        .map(|(p, _)| p.a[0]);
    match side {
        Side::Right => slopes.fold(f64::NEG_INFINITY, f64::max),
        Side::Left => slopes.fold(f64::INFINITY, f64::min),
    }
}

/// Convenience constructor: |x| in one dimension.
pub fn abs_1d() -> DCFunction {
    DCFunction::from_convex(MaxAffine::new(vec![
        AffineMap::new(vec![1.0], 0.0),
        AffineMap::new(vec![-1.0], 0.0),
    ]))
}

/// The sup-norm in `dim` dimensions as a convex max-affine.
pub fn sup_norm(dim: usize) -> DCFunction {
    let mut pieces = Vec::new();
    for i in 0..dim {
        let mut a = vec![0.0; dim];
        a[i] = 1.0;
        pieces.push(AffineMap::new(a.clone(), 0.0));
        a[i] = -1.0;
        pieces.push(AffineMap::new(a, 0.0));
    }
    DCFunction::from_convex(MaxAffine::new(pieces))
}

/// The l1-norm in `dim` dimensions: max over sign patterns.
pub fn l1_norm(dim: usize) -> DCFunction {
    let mut pieces = Vec::new();
    for mask in 0..1usize << dim {
        let a: Vec<f64> = (0..dim)
            .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        pieces.push(AffineMap::new(a, 0.0));
    }
    DCFunction::from_convex(MaxAffine::new(pieces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample::SamplingPlan;
    use proptest::prelude::*;

    fn abs_x() -> DCFunction {
        abs_1d()
    }

    #[test]
    fn eval_abs() {
        assert_eq!(abs_x().eval(&[2.0]).unwrap(), 2.0);
        assert_eq!(abs_x().eval(&[-3.5]).unwrap(), 3.5);
    }

    #[test]
    fn eval_negated_abs() {
        // g = {0}, h = {x, -x}: f = -|x|
        let f = DCFunction::new(
            MaxAffine::constant(1, 0.0),
            MaxAffine::new(vec![
                AffineMap::new(vec![1.0], 0.0),
                AffineMap::new(vec![-1.0], 0.0),
            ]),
        );
        assert_eq!(f.eval(&[3.0]).unwrap(), -3.0);
    }

    #[test]
    fn identical_components_cancel() {
        let m = MaxAffine::new(vec![AffineMap::new(vec![1.0, 1.0], 0.0)]);
        let f = DCFunction::new(m.clone(), m);
        for x in [[0.3, -0.7], [10.0, 4.0], [0.0, 0.0]] {
            assert_eq!(f.eval(&x).unwrap(), 0.0);
        }
    }

    #[test]
    fn eval_dimension_mismatch() {
        assert!(matches!(
            abs_x().eval(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn max_of_abs_and_identity() {
        let id = DCFunction::affine(AffineMap::new(vec![1.0], 0.0));
        let m = abs_x().max(&id).unwrap();
        for x in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert!((m.eval(&[x]).unwrap() - x.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn min_is_idempotent() {
        let f = abs_x();
        let m = f.min(&f).unwrap();
        for x in [-2.0, -0.5, 0.0, 0.7, 3.0] {
            assert!((m.eval(&[x]).unwrap() - x.abs()).abs() < 1e-12);
        }
    }

    fn random_pwa_dc(seed: u64, dim: usize, pieces: usize) -> DCFunction {
        let plan = SamplingPlan::new(seed, crate::geom::BoundingBox::centered(dim, 2.0), 2 * pieces);
        let pts: Vec<Vec<f64>> = plan.points().collect();
        let mk = |chunk: &[Vec<f64>]| {
            MaxAffine::new(
                chunk
                    .iter()
                    .map(|p| AffineMap::new(p.clone(), p.iter().sum::<f64>() * 0.25))
                    .collect(),
            )
        };
        DCFunction::new(mk(&pts[..pieces]), mk(&pts[pieces..]))
    }

    #[test]
    fn max_combine_matches_pointwise_oracle() {
        // three random PWA DC functions in the plane, 10^4 probe points
        let fs: Vec<DCFunction> = (0..3).map(|i| random_pwa_dc(100 + i, 2, 4)).collect();
        let combined = max_of(&fs).unwrap();
        let plan = SamplingPlan::new(7, crate::geom::BoundingBox::centered(2, 5.0), 10_000);
        for x in plan.points() {
            let direct = fs
                .iter()
                .map(|f| f.value(&x))
                .fold(f64::NEG_INFINITY, f64::max);
            let got = combined.value(&x);
            assert!(
                (got - direct).abs() <= 1e-12 * (1.0 + direct.abs()),
                "mismatch at {x:?}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn lattice_min_of_lines_is_negated_abs() {
        let expr = LatticeExpr::Min(vec![
            LatticeExpr::Leaf(AffineMap::new(vec![1.0], 0.0)),
            LatticeExpr::Leaf(AffineMap::new(vec![-1.0], 0.0)),
        ]);
        let f = lattice_to_dc(&expr).unwrap();
        for x in [-1.5, -0.2, 0.0, 0.4, 2.0] {
            assert!((f.eval(&[x]).unwrap() + x.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_max_of_lines_is_abs() {
        let expr = LatticeExpr::Max(vec![
            LatticeExpr::Leaf(AffineMap::new(vec![1.0], 0.0)),
            LatticeExpr::Leaf(AffineMap::new(vec![-1.0], 0.0)),
        ]);
        let f = lattice_to_dc(&expr).unwrap();
        assert_eq!(f.h.pieces.len(), 1);
        for x in [-1.5, 0.0, 2.0] {
            assert!((f.eval(&[x]).unwrap() - x.abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn lattice_hypograph_gauge_matches_oracle() {
        // MAX(MIN(y - x, y + x), 0) == max(y - |x|, 0) on 10^4 points
        let y_minus_x = AffineMap::new(vec![-1.0, 1.0], 0.0);
        let y_plus_x = AffineMap::new(vec![1.0, 1.0], 0.0);
        let zero = AffineMap::constant(2, 0.0);
        let expr = LatticeExpr::Max(vec![
            LatticeExpr::Min(vec![
                LatticeExpr::Leaf(y_minus_x),
                LatticeExpr::Leaf(y_plus_x),
            ]),
            LatticeExpr::Leaf(zero),
        ]);
        let f = lattice_to_dc(&expr).unwrap();
        let plan = SamplingPlan::new(11, crate::geom::BoundingBox::centered(2, 3.0), 10_000);
        for p in plan.points() {
            let want = (p[1] - p[0].abs()).max(0.0);
            let got = f.value(&p);
            assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn malformed_lattice_rejected() {
        let expr = LatticeExpr::Max(vec![LatticeExpr::Leaf(AffineMap::new(vec![1.0], 0.0))]);
        assert!(lattice_to_dc(&expr).is_err());
    }

    #[test]
    fn one_sided_slopes_of_abs() {
        let f = abs_x();
        assert_eq!(one_sided_slope_1d(&f, 0.0, Side::Right).unwrap(), 1.0);
        assert_eq!(one_sided_slope_1d(&f, 0.0, Side::Left).unwrap(), -1.0);
    }

    #[test]
    fn one_sided_slopes_at_breakpoint_of_two_lines() {
        // f = max(x, 2x - 1), kink at x = 1
        let f = DCFunction::from_convex(MaxAffine::new(vec![
            AffineMap::new(vec![1.0], 0.0),
            AffineMap::new(vec![2.0], -1.0),
        ]));
        assert_eq!(one_sided_slope_1d(&f, 1.0, Side::Right).unwrap(), 2.0);
        assert_eq!(one_sided_slope_1d(&f, 1.0, Side::Left).unwrap(), 1.0);
    }

    #[test]
    fn slope_matches_difference_quotients() {
        // slope_right(x) equals lim (f(x+t)-f(x))/t for t = 2^-k
        let f = random_pwa_dc(42, 1, 5);
        for &x in &[-1.0, -0.3, 0.0, 0.52, 1.7] {
            let slope = one_sided_slope_1d(&f, x, Side::Right).unwrap();
            let t = 2f64.powi(-20);
            let quot = (f.value(&[x + t]) - f.value(&[x])) / t;
            assert!(
                (slope - quot).abs() < 1e-9 * (1.0 + slope.abs()),
                "slope {slope} vs quotient {quot} at {x}"
            );
        }
    }

    #[test]
    fn slope_right_limits_match_from_the_right() {
        // strict one-sided derivatives: slope_right at breakpoints equals the
        // limit of slope_right just to the right
        let f = DCFunction::from_convex(MaxAffine::new(vec![
            AffineMap::new(vec![1.0], 0.0),
            AffineMap::new(vec![2.0], -1.0),
            AffineMap::new(vec![-1.0], 0.0),
        ]));
        for &bp in &[0.0, 1.0] {
            let here = one_sided_slope_1d(&f, bp, Side::Right).unwrap();
            let near = one_sided_slope_1d(&f, bp + 1e-7, Side::Right).unwrap();
            assert_eq!(here, near);
        }
    }

    #[test]
    fn scale_swaps_components_for_negative_factors() {
        let f = abs_x();
        let neg = f.scale(-2.0);
        for x in [-1.0, 0.5, 2.0_f64] {
            assert!((neg.eval(&[x]).unwrap() + 2.0 * x.abs()).abs() < 1e-12);
        }
        let zero = f.scale(0.0);
        assert_eq!(zero.g.pieces.len(), 1);
        assert_eq!(zero.eval(&[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn dominance_pruning_preserves_values() {
        // Build a sum with > 64 pieces and compare against the unpruned value.
        let squares: Vec<DCFunction> = (0..3)
            .map(|i| {
                let c = i as f64 * 3.0;
                let shifted = sup_norm(2).precompose(
                    &[vec![1.0, 0.0], vec![0.0, 1.0]],
                    &[-c, 0.0],
                );
                shifted
                    .add(&DCFunction::constant(2, -1.0))
                    .unwrap()
                    .max(&DCFunction::constant(2, 0.0))
                    .unwrap()
            })
            .collect();
        let combined = min_of(&squares).unwrap();
        let plan = SamplingPlan::new(3, crate::geom::BoundingBox::centered(2, 8.0), 2_000);
        for p in plan.points() {
            let want = squares
                .iter()
                .map(|f| f.value(&p))
                .fold(f64::INFINITY, f64::min);
            let got = combined.value(&p);
            assert!(
                (got - want).abs() <= 1e-11 * (1.0 + want.abs()),
                "pruning changed value at {p:?}: {got} vs {want}"
            );
        }
    }

    proptest! {
        #[test]
        fn prop_max_identity(coeffs in proptest::collection::vec(-5.0f64..5.0, 8), x in -4.0f64..4.0, y in -4.0f64..4.0) {
            let f1 = DCFunction::new(
                MaxAffine::new(vec![
                    AffineMap::new(vec![coeffs[0], coeffs[1]], coeffs[2]),
                    AffineMap::new(vec![coeffs[3], coeffs[4]], 0.0),
                ]),
                MaxAffine::new(vec![AffineMap::new(vec![coeffs[5], coeffs[6]], coeffs[7])]),
            );
            let f2 = sup_norm(2);
            let m = f1.max(&f2).unwrap();
            let p = [x, y];
            let want = f1.value(&p).max(f2.value(&p));
            prop_assert!((m.value(&p) - want).abs() <= 1e-12 * (1.0 + want.abs()));
        }
    }
}
