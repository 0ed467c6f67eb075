//! Small dense vector helpers and planar primitives.

/// Dot product of two equal-length slices.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

pub fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// 2-d cross product `a.x * b.y - a.y * b.x`.
pub fn cross2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Counterclockwise rotation by `theta` applied to a 2-d point.
pub fn rotate2(p: &[f64], theta: f64) -> Vec<f64> {
    let (s, c) = theta.sin_cos();
    vec![c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

/// Signed angle from `a` to `b`, in (-pi, pi].
pub fn signed_angle(a: &[f64], b: &[f64]) -> f64 {
    cross2(a, b).atan2(dot(a, b))
}

/// Euclidean distance from `p` to the closed segment `[a, b]`, with the
/// nearest point returned alongside.
pub fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let ab = sub(b, a);
    let len2 = dot(&ab, &ab);
    if len2 <= 0.0 {
        return (dist(p, a), a.to_vec());
    }
    let t = (dot(&sub(p, a), &ab) / len2).clamp(0.0, 1.0);
    let q = add(a, &scale(&ab, t));
    (dist(p, &q), q)
}

/// Solve a small dense linear system in place by Gaussian elimination with
/// partial pivoting. Returns `None` when the matrix is numerically singular.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let f = a[row][col] / pivot_row[col];
            if f != 0.0 {
                for (av, pv) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *av -= f * pv;
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut s = b[row];
        for k in row + 1..n {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Axis-aligned box given by per-coordinate bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundingBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoundingBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        BoundingBox { lo, hi }
    }

    /// Square/cube centered at the origin with half-side `r`.
    pub fn centered(dim: usize, r: f64) -> Self {
        BoundingBox::new(vec![-r; dim], vec![r; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    /// Corner points, 2^d of them.
    pub fn corners(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|i| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_small_system() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve_dense(a, vec![5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn segment_distance_clamps_to_endpoints() {
        let (d, q) = point_segment_distance(&[2.0, 1.0], &[0.0, 0.0], &[1.0, 0.0]);
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(q, vec![1.0, 0.0]);
    }

    #[test]
    fn rotation_preserves_norm() {
        let p = rotate2(&[3.0, 4.0], 1.234);
        assert!((norm(&p) - 5.0).abs() < 1e-12);
    }
}
