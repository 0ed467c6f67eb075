//! Exact one-dimensional piecewise-affine machinery: upper envelopes of
//! line families, breakpoint structure of 1-d DC functions, and conversion
//! back to a DC pair.

use crate::dc::{AffineMap, DCFunction, MaxAffine};

/// A continuous piecewise-affine function on the whole line, stored as
/// `k` breakpoints and `k + 1` global lines `y = s x + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pwa1 {
    pub breaks: Vec<f64>,
    pub lines: Vec<(f64, f64)>,
}

impl Pwa1 {
    pub fn line(s: f64, c: f64) -> Self {
        Pwa1 { breaks: vec![], lines: vec![(s, c)] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (s, c) = self.lines[self.interval_right(x).min(self.lines.len() - 1)];
        // interval_right picks the piece valid on [x, next break); for
        // evaluation any piece containing x gives the same value.
        s * x + c
    }

    /// Index of the piece valid immediately to the right of `x`.
    fn interval_right(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b <= x)
    }

    /// Index of the piece valid immediately to the left of `x`.
    fn interval_left(&self, x: f64) -> usize {
        self.breaks.partition_point(|&b| b < x)
    }

    pub fn right_slope(&self, x: f64) -> f64 {
        self.lines[self.interval_right(x)].0
    }

    pub fn left_slope(&self, x: f64) -> f64 {
        self.lines[self.interval_left(x)].0
    }

    /// Upper envelope of a 1-d max-affine component.
    pub fn upper_envelope(m: &MaxAffine) -> Self {
        assert_eq!(m.dim(), 1);
        let mut lines: Vec<(f64, f64)> = m.pieces.iter().map(|p| (p.a[0], p.b)).collect();
        lines.sort_by(|l, r| l.partial_cmp(r).unwrap());
        lines.dedup_by(|next, prev| {
            if next.0 == prev.0 {
                prev.1 = prev.1.max(next.1);
                true
            } else {
                false
            }
        });
        // Convex-hull sweep over lines sorted by slope.
        let mut hull: Vec<(f64, f64)> = Vec::new();
        let mut breaks: Vec<f64> = Vec::new();
        for &(s, c) in &lines {
            loop {
                match hull.last() {
                    None => break,
                    Some(&(ps, pc)) => {
                        // intersection with the current top line
                        let x = (pc - c) / (s - ps);
                        if let Some(&last_break) = breaks.last() {
                            if x <= last_break {
                                hull.pop();
                                breaks.pop();
                                continue;
                            }
                        }
                        breaks.push(x);
                        break;
                    }
                }
            }
            hull.push((s, c));
        }
        Pwa1 { breaks, lines: hull }
    }

    /// Breakpoint structure of a 1-d DC function: envelope of `g` minus
    /// envelope of `h`, on the merged break set.
    pub fn from_dc(f: &DCFunction) -> Self {
        assert_eq!(f.dim(), 1);
        let g = Pwa1::upper_envelope(&f.g);
        let h = Pwa1::upper_envelope(&f.h);
        g.sub(&h)
    }

    pub fn neg(&self) -> Self {
        Pwa1 {
            breaks: self.breaks.clone(),
            lines: self.lines.iter().map(|&(s, c)| (-s, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Pwa1) -> Self {
        self.zip_with(other, |l, r| (l.0 - r.0, l.1 - r.1))
    }

    pub fn add(&self, other: &Pwa1) -> Self {
        self.zip_with(other, |l, r| (l.0 + r.0, l.1 + r.1))
    }

    fn zip_with(&self, other: &Pwa1, op: impl Fn((f64, f64), (f64, f64)) -> (f64, f64)) -> Pwa1 {
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .cloned()
            .collect();
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let mut lines = Vec::with_capacity(breaks.len() + 1);
        for i in 0..=breaks.len() {
            let probe = sample_point(&breaks, i);
            let li = self.lines[self.interval_right(probe).min(self.lines.len() - 1)];
            let ri = other.lines[other.interval_right(probe).min(other.lines.len() - 1)];
            lines.push(op(li, ri));
        }
        let mut out = Pwa1 { breaks, lines };
        out.simplify();
        out
    }

    /// Owned variant of the interval merge.
    pub fn simplified(mut self) -> Pwa1 {
        self.simplify();
        self
    }

    /// Merge adjacent intervals carrying the same line.
    fn simplify(&mut self) {
        let mut breaks = Vec::new();
        let mut lines = vec![self.lines[0]];
        for (i, &b) in self.breaks.iter().enumerate() {
            let next = self.lines[i + 1];
            let cur = *lines.last().unwrap();
            if (next.0 - cur.0).abs() > 0.0 || (next.1 - cur.1).abs() > 0.0 {
                breaks.push(b);
                lines.push(next);
            }
        }
        self.breaks = breaks;
        self.lines = lines;
    }

    /// Convert to a DC pair: split slope jumps by sign into the convex parts.
    pub fn to_dc(&self) -> DCFunction {
        let k = self.breaks.len();
        let mut g_slopes = vec![self.lines[0].0];
        let mut h_slopes = vec![0.0];
        for i in 0..k {
            let jump = self.lines[i + 1].0 - self.lines[i].0;
            g_slopes.push(g_slopes[i] + jump.max(0.0));
            h_slopes.push(h_slopes[i] + (-jump).max(0.0));
        }
        let anchor = self.breaks.first().map_or(0.0, |&b| b - 1.0);
        let h = convex_from_slopes(&self.breaks, &h_slopes, anchor, 0.0);
        let g_anchor_val = self.eval(anchor); // h(anchor) = 0 by construction
        let g = convex_from_slopes(&self.breaks, &g_slopes, anchor, g_anchor_val);
        DCFunction::new(g, h)
    }

    /// Sign of the function on a right neighborhood (0, delta) of zero,
    /// assuming `self(0) == 0` up to rounding. Returns 0 when identically
    /// zero on the inspected range.
    pub fn sign_right_of_zero(&self, delta: f64) -> i32 {
        let mut x = 0.0;
        let mut idx = self.interval_right(0.0);
        loop {
            let (s, c) = self.lines[idx];
            let next = if idx < self.breaks.len() { self.breaks[idx].min(delta) } else { delta };
            if next <= x {
                idx += 1;
                if idx >= self.lines.len() {
                    return 0;
                }
                continue;
            }
            let mid = 0.5 * (x + next);
            let v = s * mid + c;
            if v.abs() > 1e-12 * (1.0 + mid.abs()) {
                return if v > 0.0 { 1 } else { -1 };
            }
            let v_end = s * next + c;
            if v_end.abs() > 1e-12 * (1.0 + next.abs()) {
                return if v_end > 0.0 { 1 } else { -1 };
            }
            if next >= delta {
                return 0;
            }
            x = next;
            idx += 1;
            if idx >= self.lines.len() {
                return 0;
            }
        }
    }

    /// Breakpoints restricted to an open interval.
    pub fn breaks_within(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.breaks.iter().cloned().filter(|&b| b > lo && b < hi).collect()
    }

    /// Domain reflection `x -> f(-x)`.
    pub fn reflect_domain(&self) -> Pwa1 {
        Pwa1 {
            breaks: self.breaks.iter().rev().map(|b| -b).collect(),
            lines: self.lines.iter().rev().map(|&(s, c)| (-s, c)).collect(),
        }
    }

    /// Largest magnitude of `f(x) / x` over `(0, hi]`, with `f(0) = 0`:
    /// the angular half-width of the graph seen from the origin. Attained
    /// at a breakpoint or the endpoint since `f/x` is monotone per piece.
    pub fn max_slope_ratio(&self, hi: f64) -> f64 {
        let mut best = self.right_slope(0.0).abs();
        for &b in &self.breaks {
            if b > 0.0 && b <= hi {
                best = best.max((self.eval(b) / b).abs());
            }
        }
        best.max((self.eval(hi) / hi).abs())
    }
}

fn sample_point(breaks: &[f64], interval: usize) -> f64 {
    if breaks.is_empty() {
        return 0.0;
    }
    if interval == 0 {
        breaks[0] - 1.0
    } else if interval == breaks.len() {
        breaks[breaks.len() - 1] + 1.0
    } else {
        0.5 * (breaks[interval - 1] + breaks[interval])
    }
}

/// Build the max-affine with the given interval slopes, anchored so the
/// function takes `value` at `anchor`.
fn convex_from_slopes(breaks: &[f64], slopes: &[f64], anchor: f64, value: f64) -> MaxAffine {
    assert_eq!(slopes.len(), breaks.len() + 1);
    // Walk intervals accumulating the continuous offsets.
    let mut offsets = vec![0.0; slopes.len()];
    // anchor lies in interval `ai`
    let ai = breaks.partition_point(|&b| b <= anchor);
    offsets[ai] = value - slopes[ai] * anchor;
    for i in (0..ai).rev() {
        // continuity at breaks[i]
        let b = breaks[i];
        offsets[i] = slopes[i + 1] * b + offsets[i + 1] - slopes[i] * b;
    }
    for i in ai + 1..slopes.len() {
        let b = breaks[i - 1];
        offsets[i] = slopes[i - 1] * b + offsets[i - 1] - slopes[i] * b;
    }
    MaxAffine::new(
        slopes
            .iter()
            .zip(&offsets)
            .map(|(&s, &c)| AffineMap::new(vec![s], c))
            .collect(),
    )
}
