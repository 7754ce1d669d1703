//! Report documents: canonical JSON and static SVG renditions of an
//! analysis result.

mod svg;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tools::{Arrow, ArrowKind, Block, Component, Diagnostic, Endpoint, Fill, LevelEntry, Overlay};
use crate::workbook::{parse_region, CellAddress};

pub use svg::{to_svg, RenderError, SvgOptions, MAX_RENDERED_CELLS};

pub const REPORT_VERSION: u32 = 1;

/// Parameters echoed into a report, already normalized.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Sheet that unqualified references in the report belong to.
    pub sheet: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub region: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub block: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub checks: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportDocument {
    pub tool: String,
    pub params: Params,
    /// Digest of the analysed workbook.
    pub digest: String,
    pub overlay: Overlay,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("invalid report JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid report: {0}")]
    Invalid(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Wire {
    version: u32,
    tool: String,
    params: Params,
    digest: String,
    fills: Vec<WireFill>,
    arrows: Vec<WireArrow>,
    blocks: Vec<WireBlock>,
    levels: Vec<WireLevel>,
    components: Vec<WireComponent>,
    diagnostics: Vec<WireDiagnostic>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireFill {
    #[serde(rename = "ref")]
    reference: String,
    class: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireArrow {
    from: String,
    to: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    component: Option<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireBlock {
    id: u32,
    region: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireLevel {
    #[serde(rename = "ref")]
    reference: String,
    level: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireComponent {
    id: u32,
    cells: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireDiagnostic {
    code: String,
    cells: Vec<String>,
    severity: String,
    message: String,
}

/// Canonical JSON: fixed key order, two-space indentation, references in
/// A1 text relative to `params.sheet`, trailing newline.
pub fn to_json(doc: &ReportDocument) -> String {
    let sheet = doc.params.sheet.as_str();
    let cell = |a: &CellAddress| a.display_in(sheet);
    let endpoint = |e: &Endpoint| match e {
        Endpoint::Cell(a) => cell(a),
        Endpoint::Block(id) => format!("#{id}"),
    };
    let o = &doc.overlay;
    let wire = Wire {
        version: REPORT_VERSION,
        tool: doc.tool.clone(),
        params: doc.params.clone(),
        digest: doc.digest.clone(),
        fills: o.fills.iter().map(|f| WireFill { reference: cell(&f.cell), class: f.kind.to_string() }).collect(),
        arrows: o
            .arrows
            .iter()
            .map(|a| WireArrow {
                from: endpoint(&a.from),
                to: endpoint(&a.to),
                kind: a.kind.as_str().to_string(),
                component: a.component,
            })
            .collect(),
        blocks: o.blocks.iter().map(|b| WireBlock { id: b.id, region: b.region.display_in(sheet) }).collect(),
        levels: o.levels.iter().map(|l| WireLevel { reference: cell(&l.cell), level: l.level }).collect(),
        components: o
            .components
            .iter()
            .map(|c| WireComponent { id: c.id, cells: c.cells.iter().map(cell).collect() })
            .collect(),
        diagnostics: doc
            .diagnostics
            .iter()
            .map(|d| WireDiagnostic {
                code: d.code.as_str().to_string(),
                cells: d.cells.iter().map(cell).collect(),
                severity: d.severity.as_str().to_string(),
                message: d.message.clone(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&wire).expect("report serialization cannot fail");
    text.push('\n');
    text
}

/// Parses a report produced by [`to_json`].
pub fn from_json(text: &str) -> Result<ReportDocument, ReportError> {
    let wire: Wire = serde_json::from_str(text)?;
    if wire.version != REPORT_VERSION {
        return Err(ReportError::Invalid(format!("unsupported report version {}", wire.version)));
    }
    let sheet = wire.params.sheet.clone();
    let cell = |text: &str| CellAddress::parse(text, &sheet).map_err(|e| ReportError::Invalid(e.to_string()));
    let endpoint = |text: &str| match text.strip_prefix('#') {
        Some(id) => id
            .parse()
            .map(Endpoint::Block)
            .map_err(|_| ReportError::Invalid(format!("bad block endpoint `{text}`"))),
        None => cell(text).map(Endpoint::Cell),
    };
    let invalid = ReportError::Invalid;

    let mut overlay = Overlay::default();
    for f in &wire.fills {
        overlay.fills.push(Fill { cell: cell(&f.reference)?, kind: f.class.parse().map_err(invalid)? });
    }
    for a in &wire.arrows {
        let kind = match a.kind.as_str() {
            "cell" => ArrowKind::Cell,
            "block" => ArrowKind::Block,
            other => return Err(invalid(format!("unknown arrow kind `{other}`"))),
        };
        overlay.arrows.push(Arrow { from: endpoint(&a.from)?, to: endpoint(&a.to)?, kind, component: a.component });
    }
    for b in &wire.blocks {
        let region = parse_region(&b.region, &sheet).map_err(|e| invalid(e.to_string()))?;
        overlay.blocks.push(Block { id: b.id, region });
    }
    for l in &wire.levels {
        overlay.levels.push(LevelEntry { cell: cell(&l.reference)?, level: l.level });
    }
    for c in &wire.components {
        let cells = c.cells.iter().map(|t| cell(t)).collect::<Result<_, _>>()?;
        overlay.components.push(Component { id: c.id, cells });
    }
    let mut diagnostics = Vec::new();
    for d in &wire.diagnostics {
        let cells: Vec<CellAddress> = d.cells.iter().map(|t| cell(t)).collect::<Result<_, _>>()?;
        if cells.is_empty() {
            return Err(invalid(format!("{} diagnostic without cells", d.code)));
        }
        diagnostics.push(Diagnostic {
            code: d.code.parse().map_err(invalid)?,
            cells,
            severity: d.severity.parse().map_err(invalid)?,
            message: d.message.clone(),
        });
    }
    Ok(ReportDocument { tool: wire.tool, params: wire.params, digest: wire.digest, overlay, diagnostics })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::depgraph::{build_graph, Depth};
    use crate::tools::{block_precedents, classify, lint_broken_links, separated_blocks, LintConfig};
    use crate::workbook::{load_grid, Region};

    const PROFIT: &str = "Revenue,30000\nCost,20000\nProfit b/f Tax,=B1-B2\nTax,5000\nProfit after Tax,=B3-B4";

    fn doc(tool: &str, overlay: Overlay, diagnostics: Vec<Diagnostic>) -> ReportDocument {
        let params = Params { sheet: "Sheet1".into(), ..Params::default() };
        ReportDocument { tool: tool.into(), params, digest: "00".into(), overlay, diagnostics }
    }

    #[test]
    fn empty_report_layout() {
        let text = to_json(&doc("classify", Overlay::default(), Vec::new()));
        let compact: String = text.split_whitespace().collect();
        assert_eq!(
            compact,
            r#"{"version":1,"tool":"classify","params":{"sheet":"Sheet1"},"digest":"00","fills":[],"arrows":[],"blocks":[],"levels":[],"components":[],"diagnostics":[]}"#
        );
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn classify_fills_in_order() {
        let g = build_graph(&load_grid(PROFIT).unwrap());
        let text = to_json(&doc("classify", classify(&g, None).1, Vec::new()));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["fills"][0], serde_json::json!({"ref": "B1", "class": "input"}));
        assert_eq!(v["fills"][2], serde_json::json!({"ref": "B3", "class": "processing"}));
        assert_eq!(v["fills"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn round_trips() {
        let wb = load_grid(&format!("{PROFIT}\n## sheet:Other\n7,=Sheet1!B5+A1")).unwrap();
        let g = build_graph(&wb);
        let region = Region::single(crate::workbook::CellAddress::new("Sheet1", 2, 5));
        let overlays = [
            classify(&g, None).1,
            separated_blocks(&g, None),
            block_precedents(&g, &region, Depth::All),
        ];
        let diags = lint_broken_links(&wb, &g, &LintConfig::default());
        for overlay in overlays {
            let mut d = doc("x", overlay, diags.clone());
            d.params.depth = Some("all".into());
            d.params.checks = Some(vec!["broken".into()]);
            let text = to_json(&d);
            assert_eq!(from_json(&text).unwrap(), d);
            assert_eq!(to_json(&from_json(&text).unwrap()), text);
        }
    }

    #[test]
    fn rejects_foreign_documents() {
        assert!(from_json("{}").is_err());
        let text = to_json(&doc("x", Overlay::default(), Vec::new())).replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(from_json(&text), Err(ReportError::Invalid(_))));
    }
}
