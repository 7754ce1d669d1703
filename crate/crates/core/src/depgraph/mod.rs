//! The cell dependency graph: one node per non-empty cell (plus phantom
//! nodes for referenced empty cells) and one edge per precedent to
//! dependent link.

mod closure;
mod components;
mod levels;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::formula::extract_references_capped;
use crate::workbook::{CellAddress, CellContent, Region, Workbook};

pub use closure::Reach;
pub use levels::{Label, LevelMap};

/// Index of a node. Ids follow address order, so sorting ids sorts cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Text,
    Number,
    Formula,
    /// An empty cell that some formula references.
    Phantom,
}

/// Precedent `from` feeds dependent `to`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
}

/// How far a closure walks: a fixed number of steps or to the fixpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Depth {
    Steps(u32),
    All,
}

impl Depth {
    fn allows(self, steps_taken: u32) -> bool {
        match self {
            Depth::Steps(limit) => steps_taken < limit,
            Depth::All => true,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Steps(n) => write!(f, "{n}"),
            Depth::All => f.write_str("all"),
        }
    }
}

impl FromStr for Depth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(Depth::All);
        }
        match s.parse::<u32>() {
            Ok(n) if n >= 1 => Ok(Depth::Steps(n)),
            _ => Err(format!("depth must be a positive integer or `all`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DepGraph {
    default_sheet: Arc<str>,
    nodes: Vec<CellAddress>,
    kinds: Vec<NodeKind>,
    index: HashMap<CellAddress, NodeId>,
    preds: Vec<Vec<NodeId>>,
    succs: Vec<Vec<NodeId>>,
    edge_count: usize,
}

/// Builds the graph from every formula's references. Node and adjacency
/// order is address order.
pub fn build_graph(wb: &Workbook) -> DepGraph {
    let mut refs = Vec::new();
    let mut addresses: BTreeSet<CellAddress> = BTreeSet::new();
    for cell in wb.cells() {
        addresses.insert(cell.addr.clone());
        if let CellContent::Formula(f) = &cell.content {
            // Ranges were checked against the cap when the workbook loaded.
            let set = extract_references_capped(f.ast(), &cell.addr, usize::MAX).expect("uncapped extraction");
            addresses.extend(set.cells().cloned());
            refs.push((cell.addr.clone(), set));
        }
    }

    let nodes: Vec<CellAddress> = addresses.into_iter().collect();
    let index: HashMap<CellAddress, NodeId> =
        nodes.iter().enumerate().map(|(i, a)| (a.clone(), NodeId(i as u32))).collect();
    let kinds = nodes
        .iter()
        .map(|a| match wb.get(a).map(|c| &c.content) {
            None => NodeKind::Phantom,
            Some(CellContent::Text(_)) => NodeKind::Text,
            Some(CellContent::Number(_)) => NodeKind::Number,
            Some(CellContent::Formula(_)) => NodeKind::Formula,
        })
        .collect();

    let mut preds = vec![Vec::new(); nodes.len()];
    let mut succs = vec![Vec::new(); nodes.len()];
    let mut edge_count = 0;
    // `refs` is in dependent order and each set in precedent order, so both
    // adjacency lists come out sorted.
    for (dependent, set) in &refs {
        let d = index[dependent];
        for precedent in set.cells() {
            let p = index[precedent];
            preds[d.index()].push(p);
            succs[p.index()].push(d);
            edge_count += 1;
        }
    }

    DepGraph {
        default_sheet: Arc::from(wb.default_sheet()),
        nodes,
        kinds,
        index,
        preds,
        succs,
        edge_count,
    }
}

impl DepGraph {
    pub fn default_sheet(&self) -> &str {
        &self.default_sheet
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn node(&self, addr: &CellAddress) -> Option<NodeId> {
        self.index.get(addr).copied()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn address(&self, id: NodeId) -> &CellAddress {
        &self.nodes[id.index()]
    }

    pub fn kind(&self, id: NodeId) -> NodeKind {
        self.kinds[id.index()]
    }

    /// Cells `id`'s formula reads, in address order.
    pub fn precedents_of(&self, id: NodeId) -> &[NodeId] {
        &self.preds[id.index()]
    }

    /// Cells whose formulas read `id`, in address order.
    pub fn dependents_of(&self, id: NodeId) -> &[NodeId] {
        &self.succs[id.index()]
    }

    /// All edges, ordered by (precedent, dependent).
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges: Vec<Edge> = self
            .succs
            .iter()
            .enumerate()
            .flat_map(|(p, ds)| ds.iter().map(move |&d| Edge { from: NodeId(p as u32), to: d }))
            .collect();
        edges.sort();
        edges
    }

    /// Nodes inside `scope` (every node when `None`), in address order.
    pub fn nodes_in(&self, scope: Option<&Region>) -> Vec<NodeId> {
        match scope {
            None => self.node_ids().collect(),
            Some(region) => self.node_ids().filter(|&id| region.contains(self.address(id))).collect(),
        }
    }

    pub(crate) fn scope_mask(&self, scope: Option<&Region>) -> Vec<bool> {
        match scope {
            None => vec![true; self.nodes.len()],
            Some(region) => self.nodes.iter().map(|a| region.contains(a)).collect(),
        }
    }

    pub fn addresses<'a>(&'a self, ids: impl IntoIterator<Item = &'a NodeId>) -> Vec<CellAddress> {
        ids.into_iter().map(|&id| self.address(id).clone()).collect()
    }

    /// A1 text of a node relative to the default sheet.
    pub fn a1(&self, id: NodeId) -> String {
        self.address(id).display_in(&self.default_sheet)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbook::load_grid;

    pub(crate) fn profit() -> Workbook {
        load_grid("Revenue,30000\nCost,20000\nProfit b/f Tax,=B1-B2\nTax,5000\nProfit after Tax,=B3-B4").unwrap()
    }

    fn edge_names(g: &DepGraph, edges: &[Edge]) -> Vec<String> {
        edges.iter().map(|e| format!("{}->{}", g.a1(e.from), g.a1(e.to))).collect()
    }

    #[test]
    fn profit_edges() {
        let g = build_graph(&profit());
        assert_eq!(g.node_count(), 10);
        assert_eq!(edge_names(&g, &g.edges()), ["B1->B3", "B2->B3", "B3->B5", "B4->B5"]);
    }

    #[test]
    fn constants_only() {
        let g = build_graph(&load_grid("1,2,3\nx,4").unwrap());
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 5);
    }

    #[test]
    fn range_edges_and_phantoms() {
        let g = build_graph(&load_grid("1\n2\n\n=SUM(A1:A3)").unwrap());
        assert_eq!(edge_names(&g, &g.edges()), ["A1->A4", "A2->A4", "A3->A4"]);
        let a3 = g.node(&CellAddress::new("Sheet1", 1, 3)).unwrap();
        assert_eq!(g.kind(a3), NodeKind::Phantom);
    }

    #[test]
    fn self_reference_is_a_loop() {
        let g = build_graph(&load_grid("=A1+1").unwrap());
        assert_eq!(edge_names(&g, &g.edges()), ["A1->A1"]);
    }

    #[test]
    fn depth_parsing() {
        assert_eq!("all".parse::<Depth>(), Ok(Depth::All));
        assert_eq!("ALL".parse::<Depth>(), Ok(Depth::All));
        assert_eq!("3".parse::<Depth>(), Ok(Depth::Steps(3)));
        assert!("0".parse::<Depth>().is_err());
        assert!("-1".parse::<Depth>().is_err());
        assert!("x".parse::<Depth>().is_err());
    }
}
