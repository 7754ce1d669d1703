use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{Arrow, ArrowKind, Block, Endpoint, Fill, FillKind, Overlay};
use crate::depgraph::{DepGraph, Depth, NodeId, Reach};
use crate::workbook::Region;

/// Arrows of the precedent closure of every cell in `block`; the block's
/// cells are filled as the selection.
pub fn multi_precedents(g: &DepGraph, block: &Region, depth: Depth) -> Overlay {
    let seeds = g.nodes_in(Some(block));
    let reach = g.precedents(&seeds, depth);
    reach_overlay(g, &seeds, &reach)
}

/// Mirror of [`multi_precedents`] along dependent edges.
pub fn multi_dependents(g: &DepGraph, block: &Region, depth: Depth) -> Overlay {
    let seeds = g.nodes_in(Some(block));
    let reach = g.dependents(&seeds, depth);
    reach_overlay(g, &seeds, &reach)
}

fn reach_overlay(g: &DepGraph, seeds: &[NodeId], reach: &Reach) -> Overlay {
    let mut overlay = Overlay {
        fills: seeds.iter().map(|&id| Fill { cell: g.address(id).clone(), kind: FillKind::Selected }).collect(),
        arrows: reach.arrows.iter().map(|e| Arrow::cell(g.address(e.from).clone(), g.address(e.to).clone())).collect(),
        ..Overlay::default()
    };
    overlay.sort();
    overlay
}

/// Edges with both ends inside `region`.
pub fn in_block_links(g: &DepGraph, region: &Region) -> Overlay {
    let mut overlay = Overlay::default();
    for edge in g.edges() {
        let (from, to) = (g.address(edge.from), g.address(edge.to));
        if region.contains(from) && region.contains(to) {
            overlay.arrows.push(Arrow::cell(from.clone(), to.clone()));
        }
    }
    overlay.sort();
    overlay
}

/// Block-level precedents. The selection is declared as block 0. Each step
/// takes the direct precedents of the newest blocks, splits them into
/// 8-adjacent clusters, declares each cluster's bounding box as a block and
/// draws one arrow from it to the block it feeds. A cluster equal to an
/// already declared block reuses that block.
pub fn block_precedents(g: &DepGraph, block: &Region, depth: Depth) -> Overlay {
    let mut overlay = Overlay::default();
    let selection: BTreeSet<NodeId> = g.nodes_in(Some(block)).into_iter().collect();
    let mut members: Vec<BTreeSet<NodeId>> = vec![selection.clone()];
    let mut known: HashMap<BTreeSet<NodeId>, u32> = HashMap::from([(selection, 0)]);
    overlay.blocks.push(Block { id: 0, region: block.clone() });

    let mut arrows = BTreeSet::new();
    let mut frontier = vec![0u32];
    let mut step = 0u32;
    // Every step either declares a new block or ends, so the node count
    // bounds an unbounded walk as well.
    let max_steps = match depth {
        Depth::Steps(n) => n,
        Depth::All => g.node_count() as u32 + 1,
    };
    while step < max_steps && !frontier.is_empty() {
        let mut next = Vec::new();
        for &target in &frontier {
            let own = &members[target as usize];
            let precedents: BTreeSet<NodeId> = own
                .iter()
                .flat_map(|&id| g.precedents_of(id).iter().copied())
                .filter(|id| !own.contains(id))
                .collect();
            for cluster in adjacency_clusters(g, &precedents) {
                let id = match known.get(&cluster) {
                    Some(&id) => id,
                    None => {
                        let id = members.len() as u32;
                        let region = Region::bounding(cluster.iter().map(|&n| g.address(n)))
                            .expect("clusters are non-empty and on one sheet");
                        overlay.blocks.push(Block { id, region });
                        known.insert(cluster.clone(), id);
                        members.push(cluster);
                        next.push(id);
                        id
                    }
                };
                arrows.insert((id, target));
            }
        }
        frontier = next;
        step += 1;
    }
    overlay.arrows = arrows
        .into_iter()
        .map(|(from, to)| Arrow {
            from: Endpoint::Block(from),
            to: Endpoint::Block(to),
            kind: ArrowKind::Block,
            component: None,
        })
        .collect();
    overlay.sort();
    overlay
}

/// Splits `cells` into groups connected through horizontally, vertically or
/// diagonally neighbouring cells on the same sheet. Groups are ordered by
/// their first cell.
pub(crate) fn adjacency_clusters(g: &DepGraph, cells: &BTreeSet<NodeId>) -> Vec<BTreeSet<NodeId>> {
    let by_position: HashMap<(&str, u32, u32), NodeId> =
        cells.iter().map(|&id| { let a = g.address(id); ((&*a.sheet, a.row, a.col), id) }).collect();
    let mut seen: HashSet<NodeId> = HashSet::new();
    let mut clusters = Vec::new();
    for &start in cells {
        if !seen.insert(start) {
            continue;
        }
        let mut cluster = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let a = g.address(v);
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    let (row, col) = (a.row as i64 + dr, a.col as i64 + dc);
                    if (dr, dc) == (0, 0) || row < 1 || col < 1 {
                        continue;
                    }
                    if let Some(&w) = by_position.get(&(&*a.sheet, row as u32, col as u32)) {
                        if seen.insert(w) {
                            cluster.insert(w);
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        clusters.push(cluster);
    }
    clusters
}
