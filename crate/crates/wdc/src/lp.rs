//! Small dense linear programs by incremental constraint insertion.
//!
//! Solves `maximize c.x subject to a_i.x <= b_i` in up to a handful of
//! variables, which is all the cell-certification and dominance checks need.
//! The recursion follows Seidel's scheme: start from the corner of a large
//! implicit box that favors the objective, and whenever a constraint is
//! violated, restrict to its boundary hyperplane and solve the lower
//! dimensional program over the constraints seen so far.

/// One inequality `a . x <= b`.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub a: Vec<f64>,
    pub b: f64,
}

impl Constraint {
    pub fn new(a: Vec<f64>, b: f64) -> Self {
        Constraint { a, b }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpResult {
    Optimal(Vec<f64>),
    Infeasible,
}

/// Implicit bound |x_i| <= BOUND keeping every subproblem bounded.
const BOUND: f64 = 1e7;
const FEAS_EPS: f64 = 1e-9;

/// Maximize `c . x` over the constraints, inside the implicit box.
pub fn maximize(c: &[f64], constraints: &[Constraint]) -> LpResult {
    let scaled: Vec<Constraint> = constraints.iter().map(|con| normalize(con.clone())).collect();
    solve(c, &scaled)
}

fn normalize(con: Constraint) -> Constraint {
    let m = con
        .a
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(con.b.abs() / BOUND);
    if m > 0.0 {
        Constraint::new(con.a.iter().map(|v| v / m).collect(), con.b / m)
    } else {
        con
    }
}

fn solve(c: &[f64], constraints: &[Constraint]) -> LpResult {
    let d = c.len();
    if d == 1 {
        return solve_1d(c[0], constraints);
    }

    // Corner of the implicit box that maximizes the objective.
    let mut x: Vec<f64> = c
        .iter()
        .map(|&ci| if ci >= 0.0 { BOUND } else { -BOUND })
        .collect();

    for (i, con) in constraints.iter().enumerate() {
        let val: f64 = con.a.iter().zip(&x).map(|(a, xi)| a * xi).sum();
        if val <= con.b + FEAS_EPS {
            continue;
        }
        // Optimum moves onto the boundary a.x = b. Eliminate the variable
        // with the largest coefficient and recurse over prior constraints.
        let k = (0..d)
            .max_by(|&p, &q| con.a[p].abs().partial_cmp(&con.a[q].abs()).unwrap())
            .unwrap();
        let ak = con.a[k];
        if ak.abs() < 1e-11 {
            // The row is numerically `0 . x <= b`; only a clearly negative
            // right side makes the program infeasible.
            if con.b < -FEAS_EPS {
                return LpResult::Infeasible;
            }
            continue;
        }

        let reduce_vec = |v: &[f64], vk: f64| -> Vec<f64> {
            (0..d)
                .filter(|&j| j != k)
                .map(|j| v[j] - vk * con.a[j] / ak)
                .collect()
        };

        let c_red = reduce_vec(c, c[k]);
        let mut reduced: Vec<Constraint> = constraints[..i]
            .iter()
            .map(|prev| {
                normalize(Constraint::new(
                    reduce_vec(&prev.a, prev.a[k]),
                    prev.b - prev.a[k] * con.b / ak,
                ))
            })
            .collect();
        // Keep the eliminated variable inside the implicit box.
        let mut ek = vec![0.0; d];
        ek[k] = 1.0;
        reduced.push(Constraint::new(reduce_vec(&ek, 1.0), BOUND - con.b / ak));
        ek[k] = -1.0;
        reduced.push(Constraint::new(reduce_vec(&ek, -1.0), BOUND + con.b / ak));

        match solve(&c_red, &reduced) {
            LpResult::Infeasible => return LpResult::Infeasible,
            LpResult::Optimal(y) => {
                let mut full = Vec::with_capacity(d);
                let mut it = y.into_iter();
                for j in 0..d {
                    if j == k {
                        full.push(0.0); // placeholder
                    } else {
                        full.push(it.next().unwrap());
                    }
                }
                let partial: f64 = con
                    .a
                    .iter()
                    .zip(&full)
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, (aj, fj))| aj * fj)
                    .sum();
                full[k] = (con.b - partial) / ak;
                x = full;
            }
        }
    }
    LpResult::Optimal(x)
}

fn solve_1d(c: f64, constraints: &[Constraint]) -> LpResult {
    let mut lo = -BOUND;
    let mut hi = BOUND;
    for con in constraints {
        let a = con.a[0];
        if a.abs() < 1e-12 {
            if con.b < -FEAS_EPS {
                return LpResult::Infeasible;
            }
            continue;
        }
        let bound = con.b / a;
        if a > 0.0 {
            hi = hi.min(bound);
        } else {
            lo = lo.max(bound);
        }
    }
    if lo > hi + FEAS_EPS {
        return LpResult::Infeasible;
    }
    let x = if c >= 0.0 { hi } else { lo };
    LpResult::Optimal(vec![x])
}

/// Maximize the joint slack `t` of a strict system `a_i . x + t <= b_i`,
/// subject to additional weak rows that carry no slack, with `t` capped at
/// `cap`. Returns the optimal slack (negative when the weak form of the
/// strict system is already infeasible within the implicit box), or `None`
/// when the weak rows themselves are infeasible.
pub fn max_slack(strict: &[Constraint], weak: &[Constraint], cap: f64) -> Option<f64> {
    let d = strict
        .first()
        .or_else(|| weak.first())
        .map(|c| c.a.len())?;
    let mut cons: Vec<Constraint> = strict
        .iter()
        .map(|c| {
            let mut a = c.a.clone();
            a.push(1.0);
            Constraint::new(a, c.b)
        })
        .collect();
    for c in weak {
        let mut a = c.a.clone();
        a.push(0.0);
        cons.push(Constraint::new(a, c.b));
    }
    let mut cap_row = vec![0.0; d + 1];
    cap_row[d] = 1.0;
    cons.push(Constraint::new(cap_row, cap));
    let mut obj = vec![0.0; d + 1];
    obj[d] = 1.0;
    match maximize(&obj, &cons) {
        LpResult::Optimal(x) => Some(x[d]),
        LpResult::Infeasible => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: enumerate candidate vertices from all d-subsets of
    /// constraints (plus box faces) and keep the feasible maximizer.
    fn oracle(c: &[f64], cons: &[Constraint]) -> Option<Vec<f64>> {
        let d = c.len();
        let mut rows: Vec<Constraint> = cons.to_vec();
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            rows.push(Constraint::new(e.clone(), BOUND));
            e[i] = -1.0;
            rows.push(Constraint::new(e, BOUND));
        }
        let n = rows.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut idx = vec![0usize; d];
        fn subsets(n: usize, k: usize, start: usize, idx: &mut Vec<usize>, pos: usize, out: &mut Vec<Vec<usize>>) {
            if pos == k {
                out.push(idx.clone());
                return;
            }
            for i in start..n {
                idx[pos] = i;
                subsets(n, k, i + 1, idx, pos + 1, out);
            }
        }
        let mut all = Vec::new();
        subsets(n, d, 0, &mut idx, 0, &mut all);
        for set in all {
            let a: Vec<Vec<f64>> = set.iter().map(|&i| rows[i].a.clone()).collect();
            let b: Vec<f64> = set.iter().map(|&i| rows[i].b).collect();
            if let Some(x) = crate::geom::solve_dense(a, b) {
                let feasible = rows.iter().all(|r| {
                    r.a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum::<f64>() <= r.b + 1e-6
                });
                if feasible {
                    let val = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum::<f64>();
                    if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                        best = Some((val, x));
                    }
                }
            }
        }
        best.map(|(_, x)| x)
    }

    #[test]
    fn triangle_in_plane() {
        // max x + y over x >= 0, y >= 0, x + y <= 1
        let cons = vec![
            Constraint::new(vec![-1.0, 0.0], 0.0),
            Constraint::new(vec![0.0, -1.0], 0.0),
            Constraint::new(vec![1.0, 1.0], 1.0),
        ];
        match maximize(&[1.0, 1.0], &cons) {
            LpResult::Optimal(x) => {
                assert!((x[0] + x[1] - 1.0).abs() < 1e-8);
            }
            _ => panic!("expected optimum"),
        }
    }

    #[test]
    fn infeasible_detected() {
        let cons = vec![
            Constraint::new(vec![1.0, 0.0], 0.0),
            Constraint::new(vec![-1.0, 0.0], -1.0),
        ];
        assert_eq!(maximize(&[1.0, 0.0], &cons), LpResult::Infeasible);
    }

    #[test]
    fn matches_vertex_enumeration_oracle() {
        // Deterministic pseudo-random instances in 2 and 3 variables.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for d in 2..=3 {
            for _case in 0..40 {
                let m = 4 + d;
                let cons: Vec<Constraint> = (0..m)
                    .map(|_| {
                        let a: Vec<f64> = (0..d).map(|_| next()).collect();
                        Constraint::new(a, next().abs() + 0.1)
                    })
                    .collect();
                let c: Vec<f64> = (0..d).map(|_| next()).collect();
                let got = maximize(&c, &cons);
                let want = oracle(&c, &cons);
                match (got, want) {
                    (LpResult::Optimal(x), Some(y)) => {
                        let vx: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                        let vy: f64 = c.iter().zip(&y).map(|(a, b)| a * b).sum();
                        assert!(
                            (vx - vy).abs() <= 1e-5 * (1.0 + vy.abs()),
                            "objective mismatch: {vx} vs {vy}"
                        );
                    }
                    (LpResult::Infeasible, None) => {}
                    (g, w) => panic!("disagreement: {g:?} vs {w:?}"),
                }
            }
        }
    }

    #[test]
    fn slack_of_open_quadrant_is_positive() {
        // x > 0, y > 0 near the origin: slack capped at 1.
        let strict = vec![
            Constraint::new(vec![-1.0, 0.0], 0.0),
            Constraint::new(vec![0.0, -1.0], 0.0),
        ];
        let s = max_slack(&strict, &[], 1.0).unwrap();
        assert!((s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn slack_of_empty_cell_is_negative() {
        // x > 0 and x < -1 cannot both hold.
        let strict = vec![
            Constraint::new(vec![-1.0], 0.0),
            Constraint::new(vec![1.0], -1.0),
        ];
        let s = max_slack(&strict, &[], 1.0).unwrap();
        assert!(s < -0.4, "slack {s}");
    }
}
