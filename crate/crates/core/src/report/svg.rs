use std::collections::HashMap;
use std::fmt::Write;

use thiserror::Error;

use crate::tools::{ArrowKind, Endpoint, FillKind, Overlay};
use crate::workbook::{column_name, CellAddress, CellContent, Region, Workbook};

/// Largest grid the renderer will draw.
pub const MAX_RENDERED_CELLS: u64 = 10_000;

const COMPONENT_HUES: [&str; 8] = ["#8DD3C7", "#FFFFB3", "#BEBADA", "#FB8072", "#80B1D3", "#FDB462", "#B3DE69", "#FCCDE5"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvgOptions {
    pub cell_w: u32,
    pub cell_h: u32,
    pub margin: u32,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { cell_w: 80, cell_h: 20, margin: 40 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("REGION_TOO_LARGE: {region} has {cells} cells, the limit is {limit}")]
    RegionTooLarge { region: String, cells: u64, limit: u64 },
}

impl RenderError {
    pub fn code(&self) -> &'static str {
        "REGION_TOO_LARGE"
    }
}

pub fn fill_color(kind: FillKind) -> &'static str {
    match kind {
        FillKind::Input => "#C6EFCE",
        FillKind::Output => "#2E7D32",
        FillKind::Processing => "#D9D9D9",
        FillKind::Standalone => "#FFC7CE",
        FillKind::Selected => "#FFF2CC",
        FillKind::Component(k) => COMPONENT_HUES[k as usize % COMPONENT_HUES.len()],
    }
}

/// Draws the default sheet's used area with the overlay on top: one `rect`
/// per grid cell, one `line` per arrow, one badge per level. Endpoints on
/// other sheets are pinned to the top-left corner of the drawing.
pub fn to_svg(wb: &Workbook, overlay: &Overlay, options: &SvgOptions) -> Result<String, RenderError> {
    let sheet = wb.default_sheet();
    let mut covered: Vec<CellAddress> = wb.sheet(sheet).into_iter().flat_map(|s| s.cells()).map(|c| c.addr.clone()).collect();
    covered.extend(overlay.fills.iter().map(|f| f.cell.clone()));
    covered.extend(overlay.levels.iter().map(|l| l.cell.clone()));
    for arrow in &overlay.arrows {
        for end in [&arrow.from, &arrow.to] {
            if let Endpoint::Cell(a) = end {
                covered.push(a.clone());
            }
        }
    }
    for block in &overlay.blocks {
        covered.push(block.region.top_left().clone());
        covered.push(block.region.bottom_right().clone());
    }
    covered.retain(|a| &*a.sheet == sheet);
    let bounds = Region::bounding(&covered);
    if let Some(b) = &bounds {
        if b.cell_count() > MAX_RENDERED_CELLS {
            return Err(RenderError::RegionTooLarge {
                region: b.display_in(sheet),
                cells: b.cell_count(),
                limit: MAX_RENDERED_CELLS,
            });
        }
    }

    let (w, h, m) = (f64::from(options.cell_w), f64::from(options.cell_h), f64::from(options.margin));
    let (cols, rows) = bounds.as_ref().map_or((0, 0), |b| (b.width(), b.height()));
    let width = 2.0 * m + w * f64::from(cols);
    let height = 2.0 * m + h * f64::from(rows);
    let origin = bounds.as_ref().map_or((1, 1), |b| (b.top_left().col, b.top_left().row));
    let x_of = |col: u32| m + w * f64::from(col - origin.0);
    let y_of = |row: u32| m + h * f64::from(row - origin.1);
    let center = |a: &CellAddress| {
        if &*a.sheet == sheet {
            (x_of(a.col) + w / 2.0, y_of(a.row) + h / 2.0)
        } else {
            (m / 2.0, m / 2.0)
        }
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    out.push_str(r##"<defs><marker id="arrowhead" markerWidth="8" markerHeight="6" refX="8" refY="3" orient="auto"><path d="M0,0 L8,3 L0,6 z" fill="context-stroke"/></marker></defs>"##);
    out.push('\n');
    let _ = writeln!(
        out,
        r##"<rect class="frame" x="0" y="0" width="{width}" height="{height}" fill="#FFFFFF" stroke="#808080"/>"##
    );

    if let Some(b) = &bounds {
        for col in b.top_left().col..=b.bottom_right().col {
            let _ = writeln!(
                out,
                r#"<text class="header" x="{}" y="{}" text-anchor="middle">{}</text>"#,
                x_of(col) + w / 2.0,
                m - 6.0,
                column_name(col)
            );
        }
        for row in b.top_left().row..=b.bottom_right().row {
            let _ = writeln!(
                out,
                r#"<text class="header" x="{}" y="{}" text-anchor="end">{row}</text>"#,
                m - 6.0,
                y_of(row) + h / 2.0 + 4.0
            );
        }
        let fills: HashMap<&CellAddress, FillKind> = overlay.fills.iter().map(|f| (&f.cell, f.kind)).collect();
        for addr in b.cells() {
            let (x, y) = (x_of(addr.col), y_of(addr.row));
            let fill = fills.get(&addr).map_or("#FFFFFF", |k| fill_color(*k));
            let _ = writeln!(
                out,
                r##"<rect class="cell" data-ref="{}" x="{x}" y="{y}" width="{w}" height="{h}" fill="{fill}" stroke="#BFBFBF"/>"##,
                addr.a1()
            );
            if let Some(text) = wb.get(&addr).map(|c| cell_text(&c.content)) {
                let _ = writeln!(
                    out,
                    r#"<text class="value" x="{}" y="{}">{}</text>"#,
                    x + 3.0,
                    y + h / 2.0 + 4.0,
                    escape(&text)
                );
            }
        }
    }

    let mut block_centers = HashMap::new();
    for block in &overlay.blocks {
        let r = &block.region;
        if r.sheet() != sheet {
            block_centers.insert(block.id, (m / 2.0, m / 2.0));
            continue;
        }
        let (x0, y0) = (x_of(r.top_left().col), y_of(r.top_left().row));
        let (bw, bh) = (w * f64::from(r.width()), h * f64::from(r.height()));
        block_centers.insert(block.id, (x0 + bw / 2.0, y0 + bh / 2.0));
        let _ = writeln!(
            out,
            r##"<rect class="block" data-block="{}" x="{x0}" y="{y0}" width="{bw}" height="{bh}" fill="none" stroke="#C00000" stroke-width="2" stroke-dasharray="6 3"/>"##,
            block.id
        );
    }

    for arrow in &overlay.arrows {
        let point = |e: &Endpoint| match e {
            Endpoint::Cell(a) => center(a),
            Endpoint::Block(id) => block_centers.get(id).copied().unwrap_or((m / 2.0, m / 2.0)),
        };
        let ((x1, y1), (x2, y2)) = (point(&arrow.from), point(&arrow.to));
        let stroke = match (arrow.kind, arrow.component) {
            (_, Some(k)) => fill_color(FillKind::Component(k)),
            (ArrowKind::Block, None) => "#C00000",
            (ArrowKind::Cell, None) => "#1F4E79",
        };
        let _ = writeln!(
            out,
            r#"<line class="arrow" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}" stroke-width="1.5" marker-end="url(#arrowhead)"/>"#
        );
    }

    for level in &overlay.levels {
        let (x, y) = center(&level.cell);
        let _ = writeln!(
            out,
            r##"<text class="level" x="{}" y="{}" font-size="9" fill="#7030A0">{}</text>"##,
            x + w / 2.0 - 10.0,
            y - h / 2.0 + 8.0,
            level.level
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn cell_text(content: &CellContent) -> String {
    match content {
        CellContent::Text(t) => t.clone(),
        CellContent::Number(n) => n.to_string(),
        CellContent::Formula(f) => f.stored().map_or_else(|| f.source().to_string(), |v| v.to_string()),
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::{build_graph, Depth};
    use crate::tools::{classify, multi_precedents};
    use crate::workbook::{load_grid, parse_region};

    const PROFIT: &str = "Revenue,30000\nCost,20000\nProfit b/f Tax,=B1-B2\nTax,5000\nProfit after Tax,=B3-B4";

    fn count(svg: &str, class: &str) -> usize {
        svg.matches(&format!("class=\"{class}\"")).count()
    }

    #[test]
    fn profit_classify() {
        let wb = load_grid(PROFIT).unwrap();
        let g = build_graph(&wb);
        let svg = to_svg(&wb, &classify(&g, None).1, &SvgOptions::default()).unwrap();
        assert_eq!(count(&svg, "cell"), 10);
        assert_eq!(count(&svg, "arrow"), 0);
        assert_eq!(svg.matches("fill=\"#C6EFCE\"").count(), 3);
        assert_eq!(svg.matches("fill=\"#2E7D32\"").count(), 1);
        assert_eq!(svg.matches("fill=\"#D9D9D9\"").count(), 1);
        assert!(svg.contains("Profit b/f Tax"));
    }

    #[test]
    fn profit_arrows() {
        let wb = load_grid(PROFIT).unwrap();
        let g = build_graph(&wb);
        let region = parse_region("B5", "Sheet1").unwrap();
        let svg = to_svg(&wb, &multi_precedents(&g, &region, Depth::All), &SvgOptions::default()).unwrap();
        assert_eq!(count(&svg, "arrow"), 4);
        // B1 centre to B3 centre with the default geometry.
        assert!(svg.contains(r#"x1="160" y1="50" x2="160" y2="90""#));
    }

    #[test]
    fn empty_workbook_is_frame_only() {
        let wb = load_grid("").unwrap();
        let svg = to_svg(&wb, &Overlay::default(), &SvgOptions::default()).unwrap();
        assert_eq!(count(&svg, "frame"), 1);
        assert_eq!(count(&svg, "cell"), 0);
        assert!(svg.contains(r#"width="80" height="80""#));
    }

    #[test]
    fn too_large() {
        let mut text = String::from("1");
        text.push_str(&"\n".repeat(200));
        text.push_str(&",".repeat(60));
        text.push('2');
        let big = load_grid(&text).unwrap();
        let err = to_svg(&big, &Overlay::default(), &SvgOptions::default()).unwrap_err();
        assert_eq!(err.code(), "REGION_TOO_LARGE");
    }

    #[test]
    fn text_is_escaped() {
        let wb = load_grid("\"a<b & c\"").unwrap();
        let svg = to_svg(&wb, &Overlay::default(), &SvgOptions::default()).unwrap();
        assert!(svg.contains("a&lt;b &amp; c"));
    }
}
