use std::collections::HashSet;

use super::{cell_list, Arrow, Component, Diagnostic, DiagnosticCode, Fill, FillKind, LevelEntry, Overlay, Severity};
use crate::depgraph::{DepGraph, Label};
use crate::workbook::Region;

/// Colours each weakly connected component of `scope` and tags the arrows
/// inside it with the component id.
pub fn separated_blocks(g: &DepGraph, scope: Option<&Region>) -> Overlay {
    let mut overlay = Overlay::default();
    let mut component_of = vec![None; g.node_count()];
    for (k, members) in g.components(scope).into_iter().enumerate() {
        let k = k as u32;
        for &id in &members {
            component_of[id.index()] = Some(k);
            overlay.fills.push(Fill { cell: g.address(id).clone(), kind: FillKind::Component(k) });
        }
        overlay.components.push(Component { id: k, cells: g.addresses(&members) });
    }
    for edge in g.edges() {
        if let (Some(k), Some(_)) = (component_of[edge.from.index()], component_of[edge.to.index()]) {
            let mut arrow = Arrow::cell(g.address(edge.from).clone(), g.address(edge.to).clone());
            arrow.component = Some(k);
            overlay.arrows.push(arrow);
        }
    }
    overlay.sort();
    overlay
}

/// Level badges for `region` (every node when `None`). Cells that sit on or
/// below a reference cycle get no badge; each cycle is reported as a CYCLE
/// error instead, plus one more for the cells downstream of cycles.
pub fn level_overlay(g: &DepGraph, region: Option<&Region>) -> (Overlay, Vec<Diagnostic>) {
    let labels = g.level_labels(region);
    let mut overlay = Overlay::default();
    for (id, label) in labels.iter() {
        if let Label::Level(level) = label {
            overlay.levels.push(LevelEntry { cell: g.address(id).clone(), level });
        }
    }
    overlay.sort();

    let mut diagnostics = Vec::new();
    if labels.has_cycle() {
        let sheet = g.default_sheet();
        let cycles = g.cycles_within(&g.scope_mask(region));
        let on_cycle: HashSet<_> = cycles.iter().flatten().copied().collect();
        for cycle in &cycles {
            let cells = g.addresses(cycle);
            diagnostics.push(Diagnostic {
                code: DiagnosticCode::Cycle,
                message: format!("reference cycle through {}", cell_list(&cells, sheet)),
                cells,
                severity: Severity::Error,
            });
        }
        let downstream: Vec<_> = labels
            .iter()
            .filter(|(id, label)| *label == Label::InCycle && !on_cycle.contains(id))
            .map(|(id, _)| g.address(id).clone())
            .collect();
        if !downstream.is_empty() {
            diagnostics.push(Diagnostic {
                code: DiagnosticCode::Cycle,
                message: format!("no level for {}: downstream of a reference cycle", cell_list(&downstream, sheet)),
                cells: downstream,
                severity: Severity::Error,
            });
        }
        super::sort_diagnostics(&mut diagnostics);
    }
    (overlay, diagnostics)
}
