//! Adams-style chart rendering: stems horizontal, filtration vertical, one
//! dot per basis element, a line per differential labelled by its page.
//! The picture is generated from the chart JSON only.

use std::collections::BTreeMap;
use std::fmt::Write;

use cobarforge::may_model::Chart;

const CELL: f64 = 40.0;
const MARGIN: f64 = 40.0;
const DOT: f64 = 3.5;

/// Renders the chart described by `json`.
pub fn render(json: &str) -> Result<String, serde_json::Error> {
    let chart: Chart = serde_json::from_str(json)?;
    Ok(render_chart(&chart))
}

fn dot_positions(chart: &Chart) -> BTreeMap<String, (f64, f64)> {
    let mut at = BTreeMap::new();
    for c in &chart.cells {
        for (k, g) in c.gens.iter().enumerate() {
            at.insert(g.clone(), position(c.stem, c.filt, k, c.dim));
        }
    }
    at
}

fn position(stem: i64, filt: i64, k: usize, dim: usize) -> (f64, f64) {
    let spread = (CELL * 0.6) / dim.max(1) as f64;
    let offset = (k as f64 - (dim as f64 - 1.0) / 2.0) * spread;
    (MARGIN + CELL * (stem as f64 + 0.5) + offset, MARGIN + CELL * (filt as f64 + 0.5))
}

fn render_chart(chart: &Chart) -> String {
    let cols = chart.window.max_stem.max(0) + 1;
    let rows = chart.window.max_filt.max(0) + 1;
    let (w, h) = (2.0 * MARGIN + CELL * cols as f64, 2.0 * MARGIN + CELL * rows as f64);
    // y grows downwards in SVG; flip so filtration grows upwards
    let flip = |y: f64| h - y;
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="monospace" font-size="9">"#
    )
    .unwrap();
    writeln!(s, r#"<title>page {} ({})</title>"#, chart.page, chart.conventions).unwrap();
    for x in 0..=cols {
        let px = MARGIN + CELL * x as f64;
        writeln!(s, r##"<line x1="{px}" y1="{}" x2="{px}" y2="{}" stroke="#ddd"/>"##, flip(MARGIN), flip(h - MARGIN)).unwrap();
        if x < cols {
            writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{x}</text>"#, px + CELL / 2.0, h - MARGIN / 2.0).unwrap();
        }
    }
    for y in 0..=rows {
        let py = flip(MARGIN + CELL * y as f64);
        writeln!(s, r##"<line x1="{MARGIN}" y1="{py}" x2="{}" y2="{py}" stroke="#ddd"/>"##, w - MARGIN).unwrap();
        if y < rows {
            writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{y}</text>"#, MARGIN / 2.0, py - CELL / 2.0 + 3.0).unwrap();
        }
    }
    let at = dot_positions(chart);
    for d in &chart.differentials {
        // a differential whose ends are not chart classes is drawn from and
        // to the cells it lives in
        let Some(&(x1, y1)) = at.get(&d.source) else { continue };
        let Some(&(x2, y2)) = at.get(&d.target) else { continue };
        writeln!(
            s,
            r##"<line class="differential" x1="{x1}" y1="{}" x2="{x2}" y2="{}" stroke="#c00"/><text x="{}" y="{}" fill="#c00">d{}</text>"##,
            flip(y1),
            flip(y2),
            (x1 + x2) / 2.0,
            flip((y1 + y2) / 2.0),
            d.page
        )
        .unwrap();
    }
    for c in &chart.cells {
        for (k, g) in c.gens.iter().enumerate() {
            let (x, y) = position(c.stem, c.filt, k, c.dim);
            writeln!(
                s,
                r#"<circle class="class" cx="{x}" cy="{}" r="{DOT}"><title>{}</title></circle>"#,
                flip(y),
                escape(g)
            )
            .unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;
    use cobarforge::may_model::{ChartCell, ChartDifferential, Window};

    fn chart() -> Chart {
        Chart {
            window: Window { max_stem: 3, max_filt: 2 },
            page: 2,
            cells: vec![
                ChartCell { stem: 0, filt: 1, dim: 1, gens: vec!["h0".into()] },
                ChartCell { stem: 1, filt: 1, dim: 1, gens: vec!["h1".into()] },
                ChartCell { stem: 0, filt: 2, dim: 1, gens: vec!["h0^2".into()] },
            ],
            differentials: vec![ChartDifferential { page: 2, source: "h1".into(), target: "h0^2".into() }],
            conventions: "abc".into(),
        }
    }

    #[test]
    fn one_dot_per_generator_and_one_line_per_differential() {
        let json = serde_json::to_string(&chart()).unwrap();
        let svg = render(&json).unwrap();
        assert_eq!(svg.matches(r#"class="class""#).count(), 3);
        assert_eq!(svg.matches(r#"class="differential""#).count(), 1);
        assert!(svg.contains(">d2<"));
    }
}
