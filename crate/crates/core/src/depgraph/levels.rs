use std::collections::{BTreeMap, VecDeque};

use super::{DepGraph, NodeId};
use crate::workbook::Region;

/// Level label of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    /// Longest distance from an input cell, counting inputs as 1.
    Level(u32),
    /// No precedents and no dependents.
    Unleveled,
    /// On a reference cycle or downstream of one.
    InCycle,
}

/// Labels for every node of the analysed scope, keyed in address order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelMap {
    labels: BTreeMap<NodeId, Label>,
}

impl LevelMap {
    pub fn get(&self, id: NodeId) -> Option<Label> {
        self.labels.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, Label)> + '_ {
        self.labels.iter().map(|(&id, &label)| (id, label))
    }

    pub fn level(&self, id: NodeId) -> Option<u32> {
        match self.get(id) {
            Some(Label::Level(n)) => Some(n),
            _ => None,
        }
    }

    pub fn has_cycle(&self) -> bool {
        self.labels.values().any(|l| *l == Label::InCycle)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl DepGraph {
    /// Longest-path levels on the subgraph induced by `scope`. Cells with no
    /// precedents but some dependent are level 1; every other connected cell
    /// sits one above its highest precedent. Longest paths are undefined
    /// through cycles, so cycle members and everything downstream of them
    /// are labelled [`Label::InCycle`].
    pub fn level_labels(&self, scope: Option<&Region>) -> LevelMap {
        let mask = self.scope_mask(scope);
        let inside = |id: &&NodeId| mask[id.index()];

        let mut in_cycle = vec![false; self.node_count()];
        let mut queue: VecDeque<NodeId> = self.cycles_within(&mask).into_iter().flatten().collect();
        for id in &queue {
            in_cycle[id.index()] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &w in self.dependents_of(v).iter().filter(inside) {
                if !in_cycle[w.index()] {
                    in_cycle[w.index()] = true;
                    queue.push_back(w);
                }
            }
        }

        // Kahn's order over the acyclic remainder. Downstream closure of the
        // cyclic part means no remaining node has an in-cycle precedent.
        let mut pending = vec![0usize; self.node_count()];
        let mut level = vec![0u32; self.node_count()];
        let mut ready = VecDeque::new();
        for id in self.node_ids().filter(|id| mask[id.index()] && !in_cycle[id.index()]) {
            pending[id.index()] = self.precedents_of(id).iter().filter(inside).count();
            if pending[id.index()] == 0 {
                ready.push_back(id);
            }
        }
        while let Some(v) = ready.pop_front() {
            let below = self.precedents_of(v).iter().filter(inside).map(|p| level[p.index()]).max();
            level[v.index()] = below.map_or(1, |l| l + 1);
            for &w in self.dependents_of(v).iter().filter(inside).filter(|w| !in_cycle[w.index()]) {
                pending[w.index()] -= 1;
                if pending[w.index()] == 0 {
                    ready.push_back(w);
                }
            }
        }

        let labels = self
            .node_ids()
            .filter(|id| mask[id.index()])
            .map(|id| {
                let label = if in_cycle[id.index()] {
                    Label::InCycle
                } else {
                    let connected = self.precedents_of(id).iter().chain(self.dependents_of(id)).any(|n| mask[n.index()]);
                    if connected {
                        Label::Level(level[id.index()])
                    } else {
                        Label::Unleveled
                    }
                };
                (id, label)
            })
            .collect();
        LevelMap { labels }
    }
}
