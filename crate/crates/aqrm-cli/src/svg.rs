//! Self-contained SVG 1.1 emitter for spectral-curve plots: axes, tick
//! labels, one polyline per level, dashed horizontal baselines, legend.
//! Fixed 800×600 viewBox, no external dependencies.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 120.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;

const COLORS: &[&str] = &[
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

pub struct CurvePlot<'a> {
    pub x: &'a [f64],
    /// One series per level: y[level][i] pairs with x[i].
    pub series: &'a [Vec<f64>],
    pub baselines: &'a [f64],
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub title: &'a str,
}

fn nice_ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = (hi - lo).max(1e-12);
    let raw = span / target as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64 * 1.2)
        .unwrap_or(mag * 10.0);
    let first = (lo / step).ceil() * step;
    let mut ticks = Vec::new();
    let mut t = first;
    while t <= hi + 1e-12 * span {
        ticks.push(t);
        t += step;
    }
    ticks
}

impl CurvePlot<'_> {
    pub fn render(&self) -> String {
        let (xlo, xhi) = bounds(self.x);
        let mut ylo = f64::INFINITY;
        let mut yhi = f64::NEG_INFINITY;
        for s in self.series {
            let (lo, hi) = bounds(s);
            ylo = ylo.min(lo);
            yhi = yhi.max(hi);
        }
        for &b in self.baselines {
            ylo = ylo.min(b);
            yhi = yhi.max(b);
        }
        let pad = 0.05 * (yhi - ylo).max(1e-9);
        ylo -= pad;
        yhi += pad;
        let sx = move |x: f64| MARGIN_L + (x - xlo) / (xhi - xlo).max(1e-12) * (WIDTH - MARGIN_L - MARGIN_R);
        let sy = move |y: f64| HEIGHT - MARGIN_B - (y - ylo) / (yhi - ylo).max(1e-12) * (HEIGHT - MARGIN_T - MARGIN_B);
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        out.push_str(&format!(
            "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
            MARGIN_L,
            xml_escape(self.title)
        ));
        // axes
        out.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
            l = MARGIN_L,
            r = WIDTH - MARGIN_R,
            t = MARGIN_T,
            b = HEIGHT - MARGIN_B
        ));
        for t in nice_ticks(xlo, xhi, 8) {
            let x = sx(t);
            out.push_str(&format!(
                "<line x1=\"{x:.2}\" y1=\"{y0}\" x2=\"{x:.2}\" y2=\"{y1}\" stroke=\"black\"/>\n<text x=\"{x:.2}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{t:.3}</text>\n",
                y0 = HEIGHT - MARGIN_B,
                y1 = HEIGHT - MARGIN_B + 5.0,
                yt = HEIGHT - MARGIN_B + 18.0
            ));
        }
        for t in nice_ticks(ylo, yhi, 8) {
            let y = sy(t);
            out.push_str(&format!(
                "<line x1=\"{x0}\" y1=\"{y:.2}\" x2=\"{x1}\" y2=\"{y:.2}\" stroke=\"black\"/>\n<text x=\"{xt}\" y=\"{yy:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{t:.3}</text>\n",
                x0 = MARGIN_L - 5.0,
                x1 = MARGIN_L,
                xt = MARGIN_L - 8.0,
                yy = y + 4.0
            ));
        }
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
            (MARGIN_L + WIDTH - MARGIN_R) / 2.0,
            HEIGHT - 10.0,
            xml_escape(self.x_label)
        ));
        out.push_str(&format!(
            "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            (MARGIN_T + HEIGHT - MARGIN_B) / 2.0,
            xml_escape(self.y_label)
        ));
        // baselines
        for &b in self.baselines {
            let y = sy(b);
            out.push_str(&format!(
                "<line x1=\"{x0}\" y1=\"{y:.2}\" x2=\"{x1}\" y2=\"{y:.2}\" stroke=\"#777777\" stroke-dasharray=\"6,4\"/>\n",
                x0 = MARGIN_L,
                x1 = WIDTH - MARGIN_R
            ));
        }
        // curves + legend
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = self
                .x
                .iter()
                .zip(s.iter())
                .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
            let ly = MARGIN_T + 16.0 * i as f64 + 10.0;
            out.push_str(&format!(
                "<line x1=\"{x0}\" y1=\"{ly}\" x2=\"{x1}\" y2=\"{ly}\" stroke=\"{color}\" stroke-width=\"2\"/>\n<text x=\"{xt}\" y=\"{yt}\" font-family=\"sans-serif\" font-size=\"11\">E{i}</text>\n",
                x0 = WIDTH - MARGIN_R + 10.0,
                x1 = WIDTH - MARGIN_R + 34.0,
                xt = WIDTH - MARGIN_R + 40.0,
                yt = ly + 4.0
            ));
        }
        out.push_str("</svg>\n");
        out
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
