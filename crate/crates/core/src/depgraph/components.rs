use std::collections::VecDeque;

use super::{DepGraph, NodeId};
use crate::workbook::Region;

impl DepGraph {
    /// Weakly connected components of the subgraph induced on `scope`.
    /// Components are ordered by their smallest member; members are in
    /// address order. Isolated cells form singleton components.
    pub fn components(&self, scope: Option<&Region>) -> Vec<Vec<NodeId>> {
        let mask = self.scope_mask(scope);
        let mut seen = vec![false; self.node_count()];
        let mut out = Vec::new();
        for start in self.node_ids() {
            if !mask[start.index()] || seen[start.index()] {
                continue;
            }
            seen[start.index()] = true;
            let mut members = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for &w in self.precedents_of(v).iter().chain(self.dependents_of(v)) {
                    if mask[w.index()] && !seen[w.index()] {
                        seen[w.index()] = true;
                        members.push(w);
                        queue.push_back(w);
                    }
                }
            }
            members.sort();
            out.push(members);
        }
        out
    }

    /// Reference cycles: every strongly connected component with two or
    /// more cells, plus every self-referencing cell. Each cycle is listed in
    /// address order; cycles are ordered by their first cell.
    pub fn detect_cycles(&self) -> Vec<Vec<NodeId>> {
        self.cycles_within(&vec![true; self.node_count()])
    }

    pub(crate) fn cycles_within(&self, mask: &[bool]) -> Vec<Vec<NodeId>> {
        let mut cycles: Vec<Vec<NodeId>> = strongly_connected(self, mask)
            .into_iter()
            .filter(|scc| scc.len() > 1 || self.dependents_of(scc[0]).contains(&scc[0]))
            .map(|mut scc| {
                scc.sort();
                scc
            })
            .collect();
        cycles.sort();
        cycles
    }
}

/// Tarjan's algorithm over the nodes selected by `mask`, without recursion.
fn strongly_connected(g: &DepGraph, mask: &[bool]) -> Vec<Vec<NodeId>> {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<NodeId> = Vec::new();
    let mut next_index = 0u32;
    let mut out = Vec::new();

    for root in g.node_ids() {
        if !mask[root.index()] || index[root.index()] != UNVISITED {
            continue;
        }
        let mut calls: Vec<(NodeId, usize)> = vec![(root, 0)];
        index[root.index()] = next_index;
        low[root.index()] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root.index()] = true;

        while let Some(&mut (v, ref mut child)) = calls.last_mut() {
            let succs = g.dependents_of(v);
            if *child < succs.len() {
                let w = succs[*child];
                *child += 1;
                if !mask[w.index()] {
                    continue;
                }
                if index[w.index()] == UNVISITED {
                    index[w.index()] = next_index;
                    low[w.index()] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w.index()] = true;
                    calls.push((w, 0));
                } else if on_stack[w.index()] {
                    low[v.index()] = low[v.index()].min(index[w.index()]);
                }
                continue;
            }
            calls.pop();
            if low[v.index()] == index[v.index()] {
                let mut scc = Vec::new();
                loop {
                    let w = stack.pop().expect("scc root is on the stack");
                    on_stack[w.index()] = false;
                    scc.push(w);
                    if w == v {
                        break;
                    }
                }
                out.push(scc);
            }
            if let Some(&(parent, _)) = calls.last() {
                low[parent.index()] = low[parent.index()].min(low[v.index()]);
            }
        }
    }
    out
}
