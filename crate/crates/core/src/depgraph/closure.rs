use std::collections::VecDeque;

use super::{DepGraph, Depth, Edge, NodeId};

/// Cells reached by a closure walk and the edges it traversed, both in
/// address order. Seeds appear in `cells` only when reached through an edge.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Reach {
    pub cells: Vec<NodeId>,
    pub arrows: Vec<Edge>,
}

#[derive(Clone, Copy)]
enum Direction {
    Backward,
    Forward,
}

impl DepGraph {
    /// Everything reachable by walking edges backwards at most `depth`
    /// steps from any seed.
    pub fn precedents(&self, seeds: &[NodeId], depth: Depth) -> Reach {
        self.walk(seeds, depth, Direction::Backward)
    }

    /// Mirror of [`DepGraph::precedents`] along forward edges.
    pub fn dependents(&self, seeds: &[NodeId], depth: Depth) -> Reach {
        self.walk(seeds, depth, Direction::Forward)
    }

    fn walk(&self, seeds: &[NodeId], depth: Depth, direction: Direction) -> Reach {
        let n = self.node_count();
        let mut dist: Vec<Option<u32>> = vec![None; n];
        let mut reached = vec![false; n];
        let mut arrows = Vec::new();
        let mut queue = VecDeque::new();
        for &seed in seeds {
            if dist[seed.index()].is_none() {
                dist[seed.index()] = Some(0);
                queue.push_back(seed);
            }
        }
        // Breadth-first, so each node is expanded once at its shortest
        // distance and each edge is recorded once.
        while let Some(v) = queue.pop_front() {
            let d = dist[v.index()].expect("queued nodes have a distance");
            if !depth.allows(d) {
                continue;
            }
            let next = match direction {
                Direction::Backward => self.precedents_of(v),
                Direction::Forward => self.dependents_of(v),
            };
            for &w in next {
                arrows.push(match direction {
                    Direction::Backward => Edge { from: w, to: v },
                    Direction::Forward => Edge { from: v, to: w },
                });
                reached[w.index()] = true;
                if dist[w.index()].is_none() {
                    dist[w.index()] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        arrows.sort();
        let cells = self.node_ids().filter(|id| reached[id.index()]).collect();
        Reach { cells, arrows }
    }
}
