use std::collections::BTreeMap;

use super::{Fill, FillKind, Overlay};
use crate::depgraph::{DepGraph, NodeKind};
use crate::workbook::{CellAddress, Region};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellKind {
    Input,
    Output,
    Processing,
    Standalone { is_text: bool },
}

impl CellKind {
    /// Kind from in-degree (precedents) and out-degree (dependents).
    pub fn from_degrees(precedents: usize, dependents: usize, is_text: bool) -> Self {
        match (precedents > 0, dependents > 0) {
            (false, true) => CellKind::Input,
            (true, false) => CellKind::Output,
            (true, true) => CellKind::Processing,
            (false, false) => CellKind::Standalone { is_text },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Classification {
    pub kinds: BTreeMap<CellAddress, CellKind>,
}

impl Classification {
    pub fn get(&self, addr: &CellAddress) -> Option<CellKind> {
        self.kinds.get(addr).copied()
    }

    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kinds.is_empty()
    }
}

/// Classifies every node in `region` (all nodes when `None`) by its degree
/// in the whole graph. Standalone text cells get no fill.
pub fn classify(g: &DepGraph, region: Option<&Region>) -> (Classification, Overlay) {
    let mut classification = Classification::default();
    let mut overlay = Overlay::default();
    for id in g.nodes_in(region) {
        let is_text = g.kind(id) == NodeKind::Text;
        let kind = CellKind::from_degrees(g.precedents_of(id).len(), g.dependents_of(id).len(), is_text);
        let addr = g.address(id).clone();
        let fill = match kind {
            CellKind::Input => Some(FillKind::Input),
            CellKind::Output => Some(FillKind::Output),
            CellKind::Processing => Some(FillKind::Processing),
            CellKind::Standalone { is_text: false } => Some(FillKind::Standalone),
            CellKind::Standalone { is_text: true } => None,
        };
        if let Some(kind) = fill {
            overlay.fills.push(Fill { cell: addr.clone(), kind });
        }
        classification.kinds.insert(addr, kind);
    }
    overlay.sort();
    (classification, overlay)
}
