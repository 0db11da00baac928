//! Minimal SVG scatter plots.

const SIZE: f64 = 1000.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Scatter of `pts` in a square viewport; the bounding square (padded by 5%)
/// maps onto `[0, 1000]^2` with y pointing up.
pub fn render(pts: &[[f64; 2]], crosshair: bool, title: &str) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pts {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    if crosshair {
        for k in 0..2 {
            lo[k] = lo[k].min(0.0);
            hi[k] = hi[k].max(0.0);
        }
    }
    if pts.is_empty() && !crosshair {
        lo = [0.0; 2];
        hi = [1.0; 2];
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300) * 1.1;
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let x0 = mid[0] - span / 2.0;
    let y0 = mid[1] - span / 2.0;
    let map = |p: [f64; 2]| [(p[0] - x0) / span * SIZE, SIZE - (p[1] - y0) / span * SIZE];
    let radius = 0.003 * SIZE;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {SIZE} {SIZE}\" width=\"{SIZE}\" height=\"{SIZE}\">\n"
    ));
    out.push_str(&format!(
        "<!-- unit square [0,1]^2 of the viewport = data square [{x0:.6e}, {:.6e}] x [{y0:.6e}, {:.6e}], y up -->\n",
        x0 + span,
        y0 + span
    ));
    out.push_str(&format!("<title>{}</title>\n", escape(title)));
    out.push_str(&format!("<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n"));
    out.push_str("<g fill=\"black\">\n");
    for &p in pts {
        let [x, y] = map(p);
        out.push_str(&format!("<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{radius}\"/>\n"));
    }
    out.push_str("</g>\n");
    if crosshair {
        let [x, y] = map([0.0, 0.0]);
        out.push_str(&format!(
            "<g stroke=\"red\" stroke-width=\"1\"><line x1=\"{:.3}\" y1=\"{y:.3}\" x2=\"{:.3}\" y2=\"{y:.3}\"/><line x1=\"{x:.3}\" y1=\"{:.3}\" x2=\"{x:.3}\" y2=\"{:.3}\"/></g>\n",
            x - 20.0,
            x + 20.0,
            y - 20.0,
            y + 20.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
