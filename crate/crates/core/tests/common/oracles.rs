//! Brute-force reference implementations, built straight from the
//! workbook's formulas without the library's graph.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use sheetlens::formula::extract_references;
use sheetlens::workbook::{CellAddress, Workbook};

pub type Cell = CellAddress;

/// Edges as (precedent, dependent) plus every node (cells and referenced
/// empty cells).
pub struct Naive {
    pub nodes: BTreeSet<Cell>,
    pub edges: BTreeSet<(Cell, Cell)>,
}

impl Naive {
    pub fn new(wb: &Workbook) -> Self {
        let mut nodes = BTreeSet::new();
        let mut edges = BTreeSet::new();
        for cell in wb.cells() {
            nodes.insert(cell.addr.clone());
            if let Some(f) = cell.formula() {
                for p in extract_references(f.ast(), &cell.addr).unwrap().cells() {
                    nodes.insert(p.clone());
                    edges.insert((p.clone(), cell.addr.clone()));
                }
            }
        }
        Naive { nodes, edges }
    }

    pub fn preds(&self, v: &Cell) -> Vec<Cell> {
        self.edges.iter().filter(|(_, d)| d == v).map(|(p, _)| p.clone()).collect()
    }

    pub fn succs(&self, v: &Cell) -> Vec<Cell> {
        self.edges.iter().filter(|(p, _)| p == v).map(|(_, d)| d.clone()).collect()
    }

    /// Recursive depth-first closure over precedents (`backward`) or
    /// dependents. Seeds are included only when some path returns to them.
    pub fn closure(&self, seeds: &[Cell], backward: bool) -> BTreeSet<Cell> {
        fn visit(n: &Naive, v: &Cell, backward: bool, seen: &mut BTreeSet<Cell>) {
            let next = if backward { n.preds(v) } else { n.succs(v) };
            for w in next {
                if seen.insert(w.clone()) {
                    visit(n, &w, backward, seen);
                }
            }
        }
        let mut seen = BTreeSet::new();
        for s in seeds {
            visit(self, s, backward, &mut seen);
        }
        seen
    }

    /// Cells reached by walks of 1..=k precedent steps, and the edges used.
    pub fn bounded_precedents(&self, seeds: &[Cell], k: u32) -> (BTreeSet<Cell>, BTreeSet<(Cell, Cell)>) {
        let mut layer: BTreeSet<Cell> = seeds.iter().cloned().collect();
        let mut expanded = BTreeSet::new();
        let mut cells = BTreeSet::new();
        for _ in 0..k {
            expanded.extend(layer.iter().cloned());
            let next: BTreeSet<Cell> = layer.iter().flat_map(|v| self.preds(v)).collect();
            cells.extend(next.iter().cloned());
            layer = next;
        }
        let arrows = self.edges.iter().filter(|(_, d)| expanded.contains(d)).cloned().collect();
        (cells, arrows)
    }

    /// Union-find over undirected edges restricted to `keep`.
    pub fn components(&self, keep: impl Fn(&Cell) -> bool) -> BTreeSet<BTreeSet<Cell>> {
        let nodes: Vec<&Cell> = self.nodes.iter().filter(|c| keep(c)).collect();
        let index: BTreeMap<&Cell, usize> = nodes.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (p, d) in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(p), index.get(d)) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut groups: BTreeMap<usize, BTreeSet<Cell>> = BTreeMap::new();
        for (i, c) in nodes.iter().enumerate() {
            let root = find(&mut parent, i);
            groups.entry(root).or_default().insert((*c).clone());
        }
        groups.into_values().collect()
    }

    /// Longest path from a source, counting sources as level 1, for cells
    /// with at least one edge. Assumes no cycles.
    pub fn levels(&self) -> BTreeMap<Cell, u32> {
        fn level(n: &Naive, v: &Cell, memo: &mut BTreeMap<Cell, u32>) -> u32 {
            if let Some(&l) = memo.get(v) {
                return l;
            }
            let l = 1 + n.preds(v).iter().map(|p| level(n, p, memo)).max().unwrap_or(0);
            memo.insert(v.clone(), l);
            l
        }
        let mut memo = BTreeMap::new();
        let connected: Vec<Cell> = self.nodes.iter().filter(|v| self.edges.iter().any(|(p, d)| p == *v || d == *v)).cloned().collect();
        for v in &connected {
            level(self, v, &mut memo);
        }
        memo.retain(|k, _| connected.contains(k));
        memo
    }
}
