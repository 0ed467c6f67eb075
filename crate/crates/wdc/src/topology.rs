//! Euler characteristic of planar sublevel sets, two ways: the total
//! winding of the outward subgradient direction along the level loops, and
//! an independent cubical complex count.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::arrangement;
use crate::dc::DCFunction;
use crate::error::{Error, Result};
use crate::geom::{self, BoundingBox};
use crate::subdiff;

/// Closed level loops of `{f = r}`, oriented with the sublevel set on the
/// left (outer loops counterclockwise, holes clockwise).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelLoops {
    pub loops: Vec<Vec<Vec<f64>>>,
    pub level: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EulerMethod {
    Degree,
    Cubical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EulerResult {
    pub chi: i64,
    /// Winding number per loop (degree method) or the cell counts
    /// (vertices, edges, faces) of the cubical complex.
    pub per_loop_winding: Vec<i64>,
    pub cell_counts: Option<(usize, usize, usize)>,
    pub method: EulerMethod,
}

/// Marching-squares extraction of the level set `{f = r}`, with every
/// crossing refined along its grid edge until `|f - r| <= 1e-10`.
/// Deterministic for a fixed grid.
pub fn level_loops_2d(
    f: &DCFunction,
    r: f64,
    grid: f64,
    bbox: &BoundingBox,
) -> Result<LevelLoops> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    if grid <= 0.0 {
        return Err(Error::Invalid("grid spacing must be positive".into()));
    }
    arrangement::require_bounded_sublevel(f, r, bbox)?;

    let nx = ((bbox.hi[0] - bbox.lo[0]) / grid).ceil() as usize;
    let ny = ((bbox.hi[1] - bbox.lo[1]) / grid).ceil() as usize;
    let xat = |i: usize| bbox.lo[0] + i as f64 * grid;
    let yat = |j: usize| bbox.lo[1] + j as f64 * grid;

    // corner values
    let mut vals = vec![0.0f64; (nx + 1) * (ny + 1)];
    for j in 0..=ny {
        for i in 0..=nx {
            vals[j * (nx + 1) + i] = f.value(&[xat(i), yat(j)]);
        }
    }
    let inside = |i: usize, j: usize| vals[j * (nx + 1) + i] <= r;

    // refined crossing per grid edge, keyed by (i, j, horizontal?); shared
    // crossings make loop chaining exact
    let mut crossings: HashMap<(usize, usize, bool), Vec<f64>> = HashMap::new();
    let tol = 1e-10 * (1.0 + r.abs());
    #[derive(Clone, Copy)]
    enum E {
        B,
        T,
        L,
        R,
    }
    type EdgeKey = (usize, usize, bool);
    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let mut case = 0u8;
            if inside(i, j) {
                case |= 1;
            }
            if inside(i + 1, j) {
                case |= 2;
            }
            if inside(i + 1, j + 1) {
                case |= 4;
            }
            if inside(i, j + 1) {
                case |= 8;
            }
            if case == 0 || case == 15 {
                continue;
            }
            let ekey = |e: E| match e {
                E::B => (i, j, true),
                E::T => (i, j + 1, true),
                E::L => (i, j, false),
                E::R => (i + 1, j, false),
            };
            let mut put = |from: E, to: E| segments.push((ekey(from), ekey(to)));
            // directed so the sublevel set stays on the left
            match case {
                1 => put(E::B, E::L),
                2 => put(E::R, E::B),
                4 => put(E::T, E::R),
                8 => put(E::L, E::T),
                3 => put(E::R, E::L),
                6 => put(E::T, E::B),
                12 => put(E::L, E::R),
                9 => put(E::B, E::T),
                7 => put(E::T, E::L),
                14 => put(E::L, E::B),
                13 => put(E::B, E::R),
                11 => put(E::R, E::T),
                5 | 10 => {
                    let center = f.value(&[xat(i) + 0.5 * grid, yat(j) + 0.5 * grid]) <= r;
                    match (case, center) {
                        (5, true) => {
                            put(E::T, E::L);
                            put(E::B, E::R);
                        }
                        (5, false) => {
                            put(E::B, E::L);
                            put(E::T, E::R);
                        }
                        (10, true) => {
                            put(E::R, E::T);
                            put(E::L, E::B);
                        }
                        (10, false) => {
                            put(E::R, E::B);
                            put(E::L, E::T);
                        }
                        _ => unreachable!(),
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let mut resolve = |k: EdgeKey| -> Vec<f64> {
        if let Some(p) = crossings.get(&k) {
            return p.clone();
        }
        let (i, j, horiz) = k;
        let a = [xat(i), yat(j)];
        let b = if horiz { [xat(i + 1), yat(j)] } else { [xat(i), yat(j + 1)] };
        let p = refine_on_segment(f, r, &a, &b, tol);
        crossings.insert(k, p.clone());
        p
    };
    let segments: Vec<(Vec<f64>, Vec<f64>)> = segments
        .into_iter()
        .map(|(from, to)| (resolve(from), resolve(to)))
        .collect();

    if segments.is_empty() {
        return Ok(LevelLoops {
            loops: Vec::new(),
            level: r,
            note: Some("no level crossing found: empty or degenerate level set".into()),
        });
    }

    // chain head-to-tail; shared refined crossings make endpoints bit-equal
    let key = |p: &[f64]| (p[0].to_bits(), p[1].to_bits());
    let mut by_start: HashMap<(u64, u64), Vec<usize>> = HashMap::new();
    for (idx, (s, _)) in segments.iter().enumerate() {
        by_start.entry(key(s)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut loops = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        let mut idx = start;
        let mut polyline = vec![segments[start].0.clone()];
        loop {
            used[idx] = true;
            let end = &segments[idx].1;
            polyline.push(end.clone());
            let Some(candidates) = by_start.get(&key(end)) else {
                return Err(Error::Internal("open level polyline".into()));
            };
            let Some(&next) = candidates.iter().find(|&&c| !used[c]) else {
                break;
            };
            idx = next;
        }
        let first = polyline.first().unwrap().clone();
        let last = polyline.last().unwrap();
        if geom::dist(&first, last) > 1e-9 * (1.0 + geom::norm(&first)) {
            return Err(Error::Internal("level polyline failed to close".into()));
        }
        loops.push(polyline);
    }
    Ok(LevelLoops { loops, level: r, note: None })
}

/// Bisection along a segment whose endpoints straddle the level.
fn refine_on_segment(f: &DCFunction, r: f64, a: &[f64], b: &[f64], tol: f64) -> Vec<f64> {
    let fa = f.value(a);
    let point = |t: f64| -> Vec<f64> {
        vec![a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let below_at_lo = fa <= r;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let p = point(mid);
        let v = f.value(&p);
        if (v - r).abs() <= tol {
            return p;
        }
        if (v <= r) == below_at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    point(0.5 * (lo + hi))
}

/// Euler characteristic as the total winding of the outward subgradient
/// direction along the oriented level loops, with adaptive midpoint
/// insertion until every angular increment is below `refine_cap`.
pub fn euler_degree_2d(
    f: &DCFunction,
    r: f64,
    grid: f64,
    bbox: &BoundingBox,
    refine_cap: f64,
) -> Result<EulerResult> {
    let loops = level_loops_2d(f, r, grid, bbox)?;
    let mut windings = Vec::new();
    let mut chi = 0i64;
    for (li, polyline) in loops.loops.iter().enumerate() {
        let n = polyline.len() - 1; // closed: last == first
        let mut us = Vec::with_capacity(n);
        for k in 0..n {
            let tangent = geom::sub(&polyline[(k + 1) % n], &polyline[k]);
            us.push(direction_at(f, &polyline[k], &tangent)?);
        }
        let mut total = 0.0f64;
        for k in 0..n {
            let (p0, u0) = (&polyline[k], &us[k]);
            let (p1, u1) = (&polyline[(k + 1) % n], &us[(k + 1) % n]);
            total += refined_increment(f, r, p0, u0, p1, u1, refine_cap, 0)?;
        }
        let w = total / std::f64::consts::TAU;
        let rounded = w.round();
        if (w - rounded).abs() >= 0.1 {
            return Err(Error::RefinementFailure { loop_index: li, residual: (w - rounded).abs() });
        }
        windings.push(rounded as i64);
        chi += rounded as i64;
    }
    Ok(EulerResult {
        chi,
        per_loop_winding: windings,
        cell_counts: None,
        method: EulerMethod::Degree,
    })
}

/// Outward subgradient direction: the normalized min-norm Clarke point,
/// with seam samples nudged along the loop when the hull is not a
/// singleton.
fn direction_at(f: &DCFunction, x: &[f64], tangent: &[f64]) -> Result<Vec<f64>> {
    let sd = subdiff::subdiff(f, x, subdiff::SubdiffMode::Clarke, subdiff::DEFAULT_TOL)?;
    let hull = if sd.hull.vertices.len() > 1 {
        let tn = geom::norm(tangent);
        if tn > 0.0 {
            let eps = 1e-9 * (1.0 + geom::norm(x));
            let nudged: Vec<f64> = x
                .iter()
                .zip(tangent)
                .map(|(xi, ti)| xi + eps * ti / tn)
                .collect();
            let sd2 =
                subdiff::subdiff(f, &nudged, subdiff::SubdiffMode::Clarke, subdiff::DEFAULT_TOL)?;
            if sd2.hull.vertices.len() == 1 {
                sd2.hull
            } else {
                sd.hull
            }
        } else {
            sd.hull
        }
    } else {
        sd.hull
    };
    let mn = crate::polytope::min_norm_point(&hull)?;
    if mn.norm < 1e-12 {
        return Err(Error::RegularityViolation { point: x.to_vec(), norm: mn.norm, required: 1e-12 });
    }
    Ok(geom::scale(&mn.point, 1.0 / mn.norm))
}

#[allow(clippy::too_many_arguments)]
fn refined_increment(
    f: &DCFunction,
    r: f64,
    p0: &[f64],
    u0: &[f64],
    p1: &[f64],
    u1: &[f64],
    cap: f64,
    depth: usize,
) -> Result<f64> {
    let dtheta = geom::signed_angle(u0, u1);
    if dtheta.abs() < cap || depth >= 48 {
        return Ok(dtheta);
    }
    let mid_chord = vec![0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1])];
    let mid = project_to_level(f, r, &mid_chord)?;
    let tangent = geom::sub(p1, p0);
    let um = direction_at(f, &mid, &tangent)?;
    Ok(refined_increment(f, r, p0, u0, &mid, &um, cap, depth + 1)?
        + refined_increment(f, r, &mid, &um, p1, u1, cap, depth + 1)?)
}

/// Move a point onto the level set along its own subgradient direction.
fn project_to_level(f: &DCFunction, r: f64, x: &[f64]) -> Result<Vec<f64>> {
    let u = direction_at(f, x, &[0.0, 0.0])?;
    let v = f.value(x);
    // bracket the crossing along x + s u: f grows along u
    let mut lo;
    let mut hi;
    if v <= r {
        lo = 0.0;
        hi = 1e-6;
        let mut span: f64 = 1e-6;
        while f.value(&geom::add(x, &geom::scale(&u, hi))) <= r {
            span *= 2.0;
            hi += span;
            if hi > 1e6 {
                return Err(Error::Internal("level projection failed to bracket".into()));
            }
        }
    } else {
        hi = 0.0;
        lo = -1e-6;
        let mut span: f64 = 1e-6;
        while f.value(&geom::add(x, &geom::scale(&u, lo))) > r {
            span *= 2.0;
            lo -= span;
            if lo < -1e6 {
                return Err(Error::Internal("level projection failed to bracket".into()));
            }
        }
    }
    // bisect: f(x + lo u) <= r < f(x + hi u) or the mirrored case
    let tol = 1e-10 * (1.0 + r.abs());
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let p = geom::add(x, &geom::scale(&u, mid));
        let v = f.value(&p);
        if (v - r).abs() <= tol {
            return Ok(p);
        }
        if v <= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(geom::add(x, &geom::scale(&u, 0.5 * (lo + hi))))
}

/// Euler characteristic of the union of closed grid cells whose centers
/// satisfy `f <= r`: vertices minus edges plus faces.
pub fn euler_cubical(f: &DCFunction, r: f64, grid: f64, bbox: &BoundingBox) -> Result<EulerResult> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    arrangement::require_bounded_sublevel(f, r, bbox)?;
    let nx = ((bbox.hi[0] - bbox.lo[0]) / grid).ceil() as i64;
    let ny = ((bbox.hi[1] - bbox.lo[1]) / grid).ceil() as i64;
    let mut vertices: BTreeSet<(i64, i64)> = BTreeSet::new();
    let mut edges: BTreeSet<(i64, i64, bool)> = BTreeSet::new();
    let mut faces = 0usize;
    for j in 0..ny {
        for i in 0..nx {
            let cx = bbox.lo[0] + (i as f64 + 0.5) * grid;
            let cy = bbox.lo[1] + (j as f64 + 0.5) * grid;
            if f.value(&[cx, cy]) > r {
                continue;
            }
            faces += 1;
            for (vi, vj) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                vertices.insert((vi, vj));
            }
            edges.insert((i, j, true));
            edges.insert((i, j + 1, true));
            edges.insert((i, j, false));
            edges.insert((i + 1, j, false));
        }
    }
    let chi = vertices.len() as i64 - edges.len() as i64 + faces as i64;
    Ok(EulerResult {
        chi,
        per_loop_winding: Vec::new(),
        cell_counts: Some((vertices.len(), edges.len(), faces)),
        method: EulerMethod::Cubical,
    })
}

/// The standard test shapes reused across the suite.
pub mod shapes {
    use crate::aura::{aura_union_min, square_aura};
    use crate::dc::{self, DCFunction};

    /// Sup-distance aura of the unit square.
    pub fn square() -> DCFunction {
        square_aura(&[0.0, 0.0], 1.0)
    }

    /// Square annulus: zero set `{1 <= |x|_1 <= 2}`.
    pub fn square_annulus() -> DCFunction {
        let inner = dc::l1_norm(2).scale(-1.0).add(&DCFunction::constant(2, 1.0)).unwrap();
        let outer = dc::l1_norm(2).add(&DCFunction::constant(2, -2.0)).unwrap();
        dc::max_of(&[inner, outer, DCFunction::constant(2, 0.0)]).unwrap()
    }

    /// Two disjoint unit squares centered at (-3, 0) and (3, 0).
    pub fn two_squares() -> DCFunction {
        aura_union_min(&square_aura(&[-3.0, 0.0], 1.0), &square_aura(&[3.0, 0.0], 1.0)).unwrap()
    }

    /// Three disjoint unit squares along the axis.
    pub fn three_squares() -> DCFunction {
        let two = two_squares();
        aura_union_min(&two, &square_aura(&[0.0, 3.0], 1.0)).unwrap()
    }

    /// Big square with two square holes: Euler characteristic -1.
    pub fn square_with_two_holes() -> DCFunction {
        let outer = crate::aura::box_distance(&[-4.0, -4.0], &[4.0, 4.0], crate::aura::PolyNorm::Sup);
        let hole = |c: f64| {
            let shifted = dc::sup_norm(2).precompose(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[-c, 0.0]);
            DCFunction::constant(2, 1.0).add(&shifted.scale(-1.0)).unwrap()
        };
        dc::max_of(&[outer, hole(-2.0), hole(2.0), DCFunction::constant(2, 0.0)]).unwrap()
    }

    /// Point germ: the l1 norm, whose 0.25-sublevel is a diamond.
    pub fn point_germ() -> DCFunction {
        dc::l1_norm(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bbox6() -> BoundingBox {
        BoundingBox::centered(2, 6.0)
    }

    #[test]
    fn square_level_is_square() {
        let f = shapes::square();
        let loops = level_loops_2d(&f, 0.25, 0.1, &bbox6()).unwrap();
        assert_eq!(loops.loops.len(), 1);
        for p in &loops.loops[0] {
            let r = p[0].abs().max(p[1].abs());
            assert!((r - 1.25).abs() < 1e-8, "vertex {p:?}");
        }
    }

    #[test]
    fn annulus_has_two_loops() {
        let f = shapes::square_annulus();
        let loops = level_loops_2d(&f, 0.25, 0.08, &bbox6()).unwrap();
        assert_eq!(loops.loops.len(), 2);
        for lp in &loops.loops {
            for p in lp {
                let l1 = p[0].abs() + p[1].abs();
                assert!((l1 - 0.75).abs() < 1e-7 || (l1 - 2.25).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn empty_level_is_empty() {
        let f = shapes::square();
        // r below the range over the box less than 0
        let loops = level_loops_2d(&f, -0.5, 0.1, &bbox6());
        // bounded check: {f <= -0.5} is empty, boundary min is ~4.5 > -0.5
        let loops = loops.unwrap();
        assert!(loops.loops.is_empty());
        assert!(loops.note.is_some());
    }

    #[test]
    fn chi_square_is_one() {
        let f = shapes::square();
        let deg = euler_degree_2d(&f, 0.25, 0.1, &bbox6(), std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(deg.chi, 1);
        assert_eq!(deg.per_loop_winding, vec![1]);
        let cub = euler_cubical(&f, 0.25, 0.05, &bbox6()).unwrap();
        assert_eq!(cub.chi, 1);
    }

    #[test]
    fn chi_annulus_is_zero() {
        let f = shapes::square_annulus();
        let deg = euler_degree_2d(&f, 0.25, 0.08, &bbox6(), std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(deg.chi, 0);
        let mut w = deg.per_loop_winding.clone();
        w.sort();
        assert_eq!(w, vec![-1, 1]);
        let cub = euler_cubical(&f, 0.25, 0.02, &bbox6()).unwrap();
        assert_eq!(cub.chi, 0);
    }

    #[test]
    fn chi_two_squares_is_two() {
        let f = shapes::two_squares();
        let deg = euler_degree_2d(&f, 0.25, 0.1, &bbox6(), std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(deg.chi, 2);
        let cub = euler_cubical(&f, 0.25, 0.05, &bbox6()).unwrap();
        assert_eq!(cub.chi, 2);
    }

    #[test]
    fn chi_three_squares_cubical() {
        let f = shapes::three_squares();
        let cub = euler_cubical(&f, 0.25, 0.05, &bbox6()).unwrap();
        assert_eq!(cub.chi, 3);
    }

    #[test]
    fn chi_two_holes_is_minus_one() {
        let f = shapes::square_with_two_holes();
        let bbox = BoundingBox::centered(2, 7.0);
        let deg = euler_degree_2d(&f, 0.25, 0.1, &bbox, std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(deg.chi, -1);
        let cub = euler_cubical(&f, 0.25, 0.05, &bbox).unwrap();
        assert_eq!(cub.chi, -1);
    }

    #[test]
    fn orientation_reversal_negates_winding() {
        let f = shapes::square();
        let loops = level_loops_2d(&f, 0.25, 0.1, &bbox6()).unwrap();
        let forward = loop_winding(&f, 0.25, &loops.loops[0]).unwrap();
        let mut reversed = loops.loops[0].clone();
        reversed.reverse();
        let backward = loop_winding(&f, 0.25, &reversed).unwrap();
        assert_eq!(forward, -backward);
        assert_eq!(forward, 1);
    }

    fn loop_winding(f: &DCFunction, r: f64, polyline: &[Vec<f64>]) -> Result<i64> {
        let n = polyline.len() - 1;
        let mut us = Vec::with_capacity(n);
        for k in 0..n {
            let tangent = geom::sub(&polyline[(k + 1) % n], &polyline[k]);
            us.push(direction_at(f, &polyline[k], &tangent)?);
        }
        let mut total = 0.0;
        for k in 0..n {
            total += refined_increment(
                f,
                r,
                &polyline[k],
                &us[k],
                &polyline[(k + 1) % n],
                &us[(k + 1) % n],
                std::f64::consts::FRAC_PI_2,
                0,
            )?;
        }
        Ok((total / std::f64::consts::TAU).round() as i64)
    }

    #[test]
    fn level_invariance_on_square() {
        let f = shapes::square();
        for r in [0.1, 0.25, 0.4] {
            let deg = euler_degree_2d(&f, r, 0.1, &bbox6(), std::f64::consts::FRAC_PI_2).unwrap();
            assert_eq!(deg.chi, 1, "level {r}");
        }
    }
}
