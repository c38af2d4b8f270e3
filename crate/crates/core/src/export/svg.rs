//! Static SVG figures.

use std::fmt::Write as _;

use super::Stamp;
use crate::archetypoids::{AdaModel, Screeplot};
use crate::comparators::{CitationGraph, UnfoldingSolution};
use crate::error::{Error, Result};
use crate::hplot::HPlotEmbedding;

const TO_COLOUR: &str = "#1f77b4";
const FROM_COLOUR: &str = "#d62728";
const PANEL: f64 = 480.0;
const MARGIN: f64 = 40.0;

/// Escape text for use in element content and attribute values.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => {}
            c => out.push(c),
        }
    }
    out
}

struct Doc {
    body: String,
    width: f64,
    height: f64,
}

impl Doc {
    fn new(width: f64, height: f64) -> Self {
        Self {
            body: String::new(),
            width,
            height,
        }
    }

    fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, style: &str) {
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" {style}/>"#
        );
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="{r}" fill="{fill}"/>"#
        );
    }

    fn square(&mut self, x: f64, y: f64, half: f64, fill: &str) {
        let _ = writeln!(
            self.body,
            r#"<rect x="{:.2}" y="{:.2}" width="{w:.2}" height="{w:.2}" fill="{fill}"/>"#,
            x - half,
            y - half,
            w = 2.0 * half
        );
    }

    fn text(&mut self, x: f64, y: f64, s: &str, attrs: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" {attrs}>{}</text>"#,
            escape(s)
        );
    }

    fn finish(self, title: &str, stamp: &Stamp) -> String {
        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        let _ = writeln!(s, "<!-- {} -->", stamp.inline());
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">"#,
            w = self.width,
            h = self.height
        );
        let _ = writeln!(s, "<title>{}</title>", escape(title));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        s.push_str(&self.body);
        s.push_str("</svg>\n");
        s
    }
}

/// Affine map from a data box onto a square panel, equal scale on both axes.
struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
    cx: f64,
    cy: f64,
    left: f64,
    top: f64,
    side: f64,
}

impl Frame {
    fn fit(points: impl IntoIterator<Item = (f64, f64)>, left: f64, top: f64, side: f64) -> Self {
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for (x, y) in points {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
        if xmin > xmax {
            (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
        }
        let span = (xmax - xmin).max(ymax - ymin).max(1e-12);
        Self {
            x0: xmin,
            y0: ymin,
            scale: side / (span * 1.1),
            cx: (xmax - xmin) / 2.0,
            cy: (ymax - ymin) / 2.0,
            left,
            top,
            side,
        }
    }

    fn px(&self, x: f64, y: f64) -> (f64, f64) {
        let mid = self.side / 2.0;
        (
            self.left + mid + (x - self.x0 - self.cx) * self.scale,
            self.top + mid - (y - self.y0 - self.cy) * self.scale,
        )
    }

    fn axes(&self, doc: &mut Doc) {
        let style = r##"stroke="#bbbbbb" stroke-dasharray="4 3""##;
        let (ox, oy) = self.px(0.0, 0.0);
        let inside = |v: f64, lo: f64| v >= lo && v <= lo + self.side;
        if inside(oy, self.top) {
            doc.line(self.left, oy, self.left + self.side, oy, style);
        }
        if inside(ox, self.left) {
            doc.line(ox, self.top, ox, self.top + self.side, style);
        }
        let _ = writeln!(
            doc.body,
            r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#444444"/>"##,
            self.left, self.top, self.side, self.side
        );
    }
}

/// Scatter of the to- and from-profiles. Labels of the given archetypoids
/// are drawn in bold.
pub fn hplot_svg(emb: &HPlotEmbedding, archetypoids: Option<&[usize]>, stamp: &Stamp) -> Result<String> {
    if emb.dim() < 2 {
        return Err(Error::Dimension("the h-plot figure needs two dimensions".into()));
    }
    let n = emb.n();
    let c = emb.coords();
    let frame = Frame::fit((0..2 * n).map(|r| (c[(r, 0)], c[(r, 1)])), MARGIN, MARGIN, PANEL);
    let mut doc = Doc::new(PANEL + 2.0 * MARGIN, PANEL + 2.0 * MARGIN + 20.0);
    frame.axes(&mut doc);
    let bold = |j: usize| archetypoids.is_some_and(|a| a.contains(&j));
    for r in 0..2 * n {
        let j = r % n;
        let (x, y) = frame.px(c[(r, 0)], c[(r, 1)]);
        let weight = if bold(j) { r#" font-weight="bold""# } else { "" };
        if r < n {
            doc.circle(x, y, 3.5, TO_COLOUR);
            doc.text(
                x + 5.0,
                y - 4.0,
                &emb.labels()[j],
                &format!(r#"fill="{TO_COLOUR}"{weight}"#),
            );
        } else {
            doc.square(x, y, 3.5, FROM_COLOUR);
            doc.text(
                x + 5.0,
                y - 4.0,
                &emb.labels()[j],
                &format!(r#"fill="{FROM_COLOUR}"{weight}"#),
            );
        }
    }
    let base = PANEL + 2.0 * MARGIN;
    doc.circle(MARGIN + 6.0, base, 3.5, TO_COLOUR);
    doc.text(MARGIN + 14.0, base + 4.0, "to-profile (column)", "");
    doc.square(MARGIN + 166.0, base, 3.5, FROM_COLOUR);
    doc.text(MARGIN + 174.0, base + 4.0, "from-profile (row)", "");
    doc.text(MARGIN + 330.0, base + 4.0, &format!("gof = {:.3}", emb.gof()), "");
    Ok(doc.finish("h-plot", stamp))
}

/// RSS against k, with the suggested elbow circled.
pub fn screeplot_svg(scree: &Screeplot, stamp: &Stamp) -> String {
    let w = PANEL + 2.0 * MARGIN;
    let h = PANEL * 0.75 + 2.0 * MARGIN;
    let mut doc = Doc::new(w, h);
    let (kmin, kmax) = match (scree.points.first(), scree.points.last()) {
        (Some(a), Some(b)) => (a.k as f64, b.k as f64),
        _ => (0.0, 1.0),
    };
    let rmax = scree.points.iter().map(|p| p.rss).fold(0.0, f64::max).max(1e-12);
    let pw = w - 2.0 * MARGIN;
    let ph = h - 2.0 * MARGIN;
    let px = |k: f64| {
        MARGIN
            + if kmax > kmin {
                (k - kmin) / (kmax - kmin) * pw
            } else {
                pw / 2.0
            }
    };
    let py = |r: f64| MARGIN + ph - r / rmax * ph;
    doc.line(
        MARGIN,
        MARGIN + ph,
        MARGIN + pw,
        MARGIN + ph,
        r##"stroke="#444444""##,
    );
    doc.line(MARGIN, MARGIN, MARGIN, MARGIN + ph, r##"stroke="#444444""##);
    let mut path = String::new();
    for (i, p) in scree.points.iter().enumerate() {
        let _ = write!(
            path,
            "{}{:.2},{:.2} ",
            if i == 0 { "M" } else { "L" },
            px(p.k as f64),
            py(p.rss)
        );
    }
    let _ = writeln!(
        doc.body,
        r##"<path d="{}" fill="none" stroke="{TO_COLOUR}" stroke-width="1.5"/>"##,
        path.trim_end()
    );
    for p in &scree.points {
        let (x, y) = (px(p.k as f64), py(p.rss));
        doc.circle(x, y, 3.0, TO_COLOUR);
        doc.text(x - 3.0, MARGIN + ph + 16.0, &p.k.to_string(), "");
        if scree.elbow == Some(p.k) {
            let _ = writeln!(
                doc.body,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="8" fill="none" stroke="{FROM_COLOUR}" stroke-width="1.5"/>"#
            );
        }
    }
    doc.text(MARGIN + pw / 2.0 - 4.0, h - 6.0, "k", "");
    doc.text(6.0, MARGIN - 10.0, &format!("RSS (max {rmax:.4})"), "");
    doc.finish("screeplot", stamp)
}

/// Observations at their barycentric α coordinates over three archetypoids.
pub fn ternary_svg(model: &AdaModel, labels: &[String], stamp: &Stamp) -> Result<String> {
    if model.k() != 3 {
        return Err(Error::InvalidSelection(format!(
            "ternary plot needs k = 3, got k = {}",
            model.k()
        )));
    }
    let side = PANEL;
    let height = side * 3f64.sqrt() / 2.0;
    let corners = [
        (MARGIN, MARGIN + height),
        (MARGIN + side, MARGIN + height),
        (MARGIN + side / 2.0, MARGIN),
    ];
    let mut doc = Doc::new(side + 2.0 * MARGIN, height + 2.0 * MARGIN + 10.0);
    let _ = writeln!(
        doc.body,
        r##"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="none" stroke="#444444"/>"##,
        corners[0].0, corners[0].1, corners[1].0, corners[1].1, corners[2].0, corners[2].1
    );
    let offsets = [(-10.0, 18.0), (-10.0, 18.0), (-10.0, -8.0)];
    for (a, &idx) in model.archetypoid_indices.iter().enumerate() {
        let (x, y) = corners[a];
        doc.text(
            x + offsets[a].0,
            y + offsets[a].1,
            &labels[idx],
            r#"font-weight="bold""#,
        );
    }
    for (i, label) in labels.iter().enumerate().take(model.alpha.nrows()) {
        let w = [model.alpha[(i, 0)], model.alpha[(i, 1)], model.alpha[(i, 2)]];
        let x = w[0] * corners[0].0 + w[1] * corners[1].0 + w[2] * corners[2].0;
        let y = w[0] * corners[0].1 + w[1] * corners[1].1 + w[2] * corners[2].1;
        doc.circle(x, y, 3.0, TO_COLOUR);
        if !model.archetypoid_indices.contains(&i) {
            doc.text(x + 4.0, y - 4.0, label, "");
        }
    }
    Ok(doc.finish("ternary plot of mixture weights", stamp))
}

/// One panel per role order, individuals as circles and objects as squares.
pub fn unfolding_svg(solutions: &[UnfoldingSolution], stamp: &Stamp) -> String {
    let panels = solutions.len().max(1) as f64;
    let mut doc = Doc::new(panels * (PANEL + MARGIN) + MARGIN, PANEL + 2.0 * MARGIN);
    for (p, sol) in solutions.iter().enumerate() {
        let left = MARGIN + p as f64 * (PANEL + MARGIN);
        let pts = sol
            .x1
            .row_iter()
            .chain(sol.x2.row_iter())
            .map(|r| (r[0], r[1]))
            .collect::<Vec<_>>();
        let frame = Frame::fit(pts, left, MARGIN, PANEL);
        frame.axes(&mut doc);
        doc.text(
            left,
            MARGIN - 10.0,
            &format!("{} (stress {:.4})", sol.role_order.as_str(), sol.stress),
            "",
        );
        for (i, label) in sol.labels.iter().enumerate() {
            let (x, y) = frame.px(sol.x1[(i, 0)], sol.x1[(i, 1)]);
            doc.circle(x, y, 3.5, TO_COLOUR);
            doc.text(x + 5.0, y - 4.0, label, &format!(r#"fill="{TO_COLOUR}""#));
            let (x, y) = frame.px(sol.x2[(i, 0)], sol.x2[(i, 1)]);
            doc.square(x, y, 3.5, FROM_COLOUR);
            doc.text(x + 5.0, y - 4.0, label, &format!(r#"fill="{FROM_COLOUR}""#));
        }
    }
    doc.finish("unfolding", stamp)
}

/// Directed graph drawn at its layout positions; nodes outside the main
/// component are drawn hollow.
pub fn network_svg(graph: &CitationGraph, stamp: &Stamp) -> Result<String> {
    let layout = graph
        .layout
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("graph has no layout".into()))?;
    let mut doc = Doc::new(PANEL + 2.0 * MARGIN, PANEL + 2.0 * MARGIN);
    let _ = writeln!(
        doc.body,
        r##"<defs><marker id="arrow" viewBox="0 0 10 10" refX="14" refY="5" markerWidth="6" markerHeight="6" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#888888"/></marker></defs>"##
    );
    let px = |p: [f64; 2]| (MARGIN + p[0] * PANEL, MARGIN + (1.0 - p[1]) * PANEL);
    for e in graph.edges.iter().filter(|e| e.source != e.target) {
        let (x1, y1) = px(layout[e.source]);
        let (x2, y2) = px(layout[e.target]);
        doc.line(
            x1,
            y1,
            x2,
            y2,
            r##"stroke="#888888" stroke-opacity="0.6" marker-end="url(#arrow)""##,
        );
    }
    let isolated = graph.isolated_nodes();
    for (i, label) in graph.labels.iter().enumerate() {
        let (x, y) = px(layout[i]);
        if isolated.contains(&i) {
            let _ = writeln!(
                doc.body,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="5" fill="white" stroke="{FROM_COLOUR}" stroke-width="1.5"/>"#
            );
        } else {
            doc.circle(x, y, 5.0, TO_COLOUR);
        }
        doc.text(x + 6.0, y - 6.0, label, "");
    }
    Ok(doc.finish(&format!("citation network, threshold {}", graph.threshold), stamp))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape(r#"a<b>&"c'"#), "a&lt;b&gt;&amp;&quot;c&apos;");
        assert_eq!(escape("x\u{1}y"), "xy");
    }

    #[test]
    fn frame_keeps_points_inside_panel() {
        let f = Frame::fit([(-2.0, 5.0), (3.0, -1.0)], 10.0, 10.0, 100.0);
        for (x, y) in [(-2.0, 5.0), (3.0, -1.0)] {
            let (px, py) = f.px(x, y);
            assert!((10.0..=110.0).contains(&px) && (10.0..=110.0).contains(&py));
        }
    }
}
