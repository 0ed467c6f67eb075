//! Minimal SVG export for loops, covers, sector boundaries, and fractal
//! approximations. Output is deterministic for identical inputs.

/// A drawable collection of polylines with stroke colors.
#[derive(Debug, Default)]
pub struct SvgScene {
    polylines: Vec<(Vec<Vec<f64>>, &'static str)>,
}

impl SvgScene {
    pub fn new() -> Self {
        SvgScene::default()
    }

    pub fn polyline(&mut self, points: Vec<Vec<f64>>, color: &'static str) {
        if points.len() >= 2 {
            self.polylines.push((points, color));
        }
    }

    pub fn segment(&mut self, a: &[f64], b: &[f64], color: &'static str) {
        self.polylines.push((vec![a.to_vec(), b.to_vec()], color));
    }

    /// Render with a y-flip so the mathematical orientation reads upright.
    pub fn render(&self) -> String {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for (pts, _) in &self.polylines {
            for p in pts {
                for i in 0..2 {
                    lo[i] = lo[i].min(p[i]);
                    hi[i] = hi[i].max(p[i]);
                }
            }
        }
        if self.polylines.is_empty() {
            lo = [0.0, 0.0];
            hi = [1.0, 1.0];
        }
        let pad = 0.05 * ((hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9));
        let (x0, y0) = (lo[0] - pad, -(hi[1] + pad));
        let (w, h) = (hi[0] - lo[0] + 2.0 * pad, hi[1] - lo[1] + 2.0 * pad);
        let mut out = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0} {y0} {w} {h}\">\n"
        );
        let stroke_width = 0.002 * w.max(h);
        for (pts, color) in &self.polylines {
            out.push_str(&format!(
                "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke_width}\" points=\""
            ));
            for (i, p) in pts.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(&format!("{},{}", p[0], -p[1]));
            }
            out.push_str("\"/>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministically() {
        let mut scene = SvgScene::new();
        scene.polyline(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 0.0]], "black");
        scene.segment(&[0.0, 0.5], &[2.0, 0.5], "red");
        let a = scene.render();
        let b = scene.render();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.contains("polyline"));
    }
}
