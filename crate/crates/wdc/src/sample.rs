//! Deterministic sampling plans: a named seed plus a low-discrepancy
//! sequence over a declared box, so every report is reproducible.

use serde::{Deserialize, Serialize};

use crate::geom::BoundingBox;

/// A reproducible point source over a box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub seed: u64,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub count: usize,
}

impl SamplingPlan {
    pub fn new(seed: u64, bbox: BoundingBox, count: usize) -> Self {
        SamplingPlan { seed, lo: bbox.lo, hi: bbox.hi, count }
    }

    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::new(self.lo.clone(), self.hi.clone())
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// The plan's points: an additive-recurrence low-discrepancy sequence
    /// with a seed-dependent offset (Cranley-Patterson rotation).
    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        let d = self.dim();
        let alphas = recurrence_alphas(d);
        let offsets: Vec<f64> = (0..d)
            .map(|i| {
                let bits = splitmix64(self.seed.wrapping_add(0x9e37 + i as u64));
                (bits >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect();
        (0..self.count).map(move |n| {
            (0..d)
                .map(|i| {
                    let u = (offsets[i] + alphas[i] * (n as f64 + 1.0)).fract();
                    self.lo[i] + u * (self.hi[i] - self.lo[i])
                })
                .collect()
        })
    }

    /// A scalar stream in [0, 1), useful for per-case jitter.
    pub fn unit_stream(&self) -> impl Iterator<Item = f64> + '_ {
        let mut state = splitmix64(self.seed ^ 0xd1b5_4a32_d192_ed03);
        (0..usize::MAX).map(move |_| {
            state = splitmix64(state);
            (state >> 11) as f64 / (1u64 << 53) as f64
        })
    }
}

/// Generalized golden-ratio constants for an R_d additive recurrence.
fn recurrence_alphas(d: usize) -> Vec<f64> {
    // phi_d is the unique positive root of x^(d+1) = x + 1.
    let mut phi = 1.5f64;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (d as f64 + 1.0));
    }
    (1..=d).map(|i| (1.0 / phi).powi(i as i32)).collect()
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let plan = SamplingPlan::new(42, BoundingBox::centered(2, 1.0), 16);
        let a: Vec<_> = plan.points().collect();
        let b: Vec<_> = plan.points().collect();
        assert_eq!(a, b);
    }

    #[test]
    fn points_stay_in_box() {
        let bbox = BoundingBox::new(vec![-2.0, 0.0], vec![1.0, 3.0]);
        let plan = SamplingPlan::new(7, bbox.clone(), 500);
        for p in plan.points() {
            assert!(bbox.contains(&p), "{p:?} outside box");
        }
    }

    #[test]
    fn different_seeds_differ() {
        let bbox = BoundingBox::centered(2, 1.0);
        let a: Vec<_> = SamplingPlan::new(1, bbox.clone(), 4).points().collect();
        let b: Vec<_> = SamplingPlan::new(2, bbox, 4).points().collect();
        assert_ne!(a, b);
    }
}
