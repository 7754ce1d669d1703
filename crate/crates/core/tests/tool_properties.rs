mod common {
    pub mod oracles;
}

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use common::oracles::{Cell, Naive};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sheetlens::depgraph::{build_graph, Depth, NodeKind};
use sheetlens::synth::{random_workbook, SynthConfig};
use sheetlens::tools::{
    block_precedents, classify, in_block_links, level_overlay, lint_broken_links, lint_irregular, lint_recompute,
    multi_dependents, multi_precedents, separated_blocks, CellKind, DiagnosticCode, Endpoint, LintConfig,
};
use sheetlens::workbook::{CellAddress, Region, Workbook};

fn random_region(rng: &mut impl Rng) -> Region {
    let a = CellAddress::new("Sheet1", rng.gen_range(1..=10), rng.gen_range(1..=15));
    let b = CellAddress::new("Sheet1", rng.gen_range(1..=10), rng.gen_range(1..=15));
    Region::new(a, b).unwrap()
}

#[test]
fn classification_is_a_degree_partition() {
    let mut rng = StdRng::seed_from_u64(21);
    for _ in 0..100 {
        let wb = random_workbook(&mut rng, &SynthConfig::default());
        let g = build_graph(&wb);
        let naive = Naive::new(&wb);
        let (c, overlay) = classify(&g, None);
        assert_eq!(c.len(), naive.nodes.len());
        let mut counts = [0usize; 4];
        for (addr, kind) in &c.kinds {
            let text = g.node(addr).map(|id| g.kind(id)) == Some(NodeKind::Text);
            let expected = CellKind::from_degrees(naive.preds(addr).len(), naive.succs(addr).len(), text);
            assert_eq!(*kind, expected, "{addr}");
            let slot = match kind {
                CellKind::Input => 0,
                CellKind::Output => 1,
                CellKind::Processing => 2,
                CellKind::Standalone { .. } => 3,
            };
            counts[slot] += 1;
        }
        assert_eq!(counts.iter().sum::<usize>(), naive.nodes.len());
        assert!(overlay.fills.windows(2).all(|w| w[0].cell < w[1].cell));

        let region = random_region(&mut rng);
        let (scoped, _) = classify(&g, Some(&region));
        for (addr, kind) in &scoped.kinds {
            assert!(region.contains(addr));
            assert_eq!(c.get(addr), Some(*kind));
        }
    }
}

#[test]
fn in_block_links_lie_inside_the_closures() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..100 {
        let g = build_graph(&random_workbook(&mut rng, &SynthConfig::default()));
        let region = random_region(&mut rng);
        let inside = in_block_links(&g, &region);
        let mut closure: BTreeSet<_> = multi_precedents(&g, &region, Depth::All).arrows.into_iter().collect();
        closure.extend(multi_dependents(&g, &region, Depth::All).arrows);
        for arrow in &inside.arrows {
            assert!(closure.contains(arrow));
        }
        inside.validate(&g).unwrap();
    }
}

/// 8-connected groups of `cells`, each as its set of members.
fn clusters(cells: &BTreeSet<Cell>) -> Vec<BTreeSet<Cell>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for start in cells {
        if !seen.insert(start.clone()) {
            continue;
        }
        let mut group = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start.clone()]);
        while let Some(v) = queue.pop_front() {
            for w in cells {
                let near = w.sheet == v.sheet && w.row.abs_diff(v.row) <= 1 && w.col.abs_diff(v.col) <= 1;
                if near && seen.insert(w.clone()) {
                    group.insert(w.clone());
                    queue.push_back(w.clone());
                }
            }
        }
        out.push(group);
    }
    out
}

#[test]
fn block_precedents_cover_direct_precedents() {
    let mut rng = StdRng::seed_from_u64(23);
    for _ in 0..100 {
        let wb = random_workbook(&mut rng, &SynthConfig::default());
        let g = build_graph(&wb);
        let naive = Naive::new(&wb);
        let region = random_region(&mut rng);
        let overlay = block_precedents(&g, &region, Depth::Steps(1));
        overlay.validate(&g).unwrap();

        let members: Vec<Cell> = naive.nodes.iter().filter(|c| region.contains(c)).cloned().collect();
        let direct: BTreeSet<Cell> =
            members.iter().flat_map(|m| naive.preds(m)).filter(|p| !members.contains(p)).collect();
        let expected: BTreeSet<Region> =
            clusters(&direct).iter().map(|c| Region::bounding(c).unwrap()).collect();
        let emitted: BTreeSet<Region> = overlay.blocks.iter().filter(|b| b.id != 0).map(|b| b.region.clone()).collect();
        assert_eq!(emitted, expected);
        for cell in &direct {
            assert!(overlay.blocks.iter().any(|b| b.region.contains(cell)));
        }
        assert_eq!(overlay.arrows.len(), overlay.blocks.len() - 1);
        assert!(overlay.arrows.iter().all(|a| a.to == Endpoint::Block(0)));
    }
}

#[test]
fn deeper_block_precedents_stay_valid() {
    let mut rng = StdRng::seed_from_u64(24);
    for _ in 0..50 {
        let g = build_graph(&random_workbook(&mut rng, &SynthConfig::default()));
        let region = random_region(&mut rng);
        let all = block_precedents(&g, &region, Depth::All);
        all.validate(&g).unwrap();
        let ids: Vec<u32> = all.blocks.iter().map(|b| b.id).collect();
        assert_eq!(ids, (0..all.blocks.len() as u32).collect::<Vec<_>>());
    }
}

fn shift(a: &Cell, dc: u32, dr: u32) -> Cell {
    CellAddress::new(a.sheet.clone(), a.col + dc, a.row + dr)
}

fn lint_codes(wb: &Workbook, dc: u32, dr: u32) -> BTreeSet<(DiagnosticCode, Vec<Cell>)> {
    let g = build_graph(wb);
    let config = LintConfig::default();
    let used = wb.sheets()[0].used_region();
    let mut diags = lint_broken_links(wb, &g, &config);
    diags.extend(lint_recompute(wb, &config));
    if let Some(region) = used {
        diags.extend(lint_irregular(wb, &region, &config));
    }
    diags.into_iter().map(|d| (d.code, d.cells.iter().map(|c| shift(c, dc, dr)).collect())).collect()
}

#[test]
fn translation_changes_nothing() {
    let mut rng = StdRng::seed_from_u64(25);
    for _ in 0..50 {
        let wb = random_workbook(&mut rng, &SynthConfig::default());
        let (dc, dr) = (rng.gen_range(0..20u32), rng.gen_range(0..50u32));
        let moved = wb.translated(i64::from(dc), i64::from(dr)).unwrap();
        let (g, h) = (build_graph(&wb), build_graph(&moved));

        let kinds: BTreeMap<Cell, CellKind> =
            classify(&g, None).0.kinds.into_iter().map(|(a, k)| (shift(&a, dc, dr), k)).collect();
        assert_eq!(kinds, classify(&h, None).0.kinds);

        let levels: Vec<(Cell, u32)> =
            level_overlay(&g, None).0.levels.iter().map(|l| (shift(&l.cell, dc, dr), l.level)).collect();
        let moved_levels: Vec<(Cell, u32)> = level_overlay(&h, None).0.levels.iter().map(|l| (l.cell.clone(), l.level)).collect();
        assert_eq!(levels, moved_levels);

        assert_eq!(separated_blocks(&g, None).components.len(), separated_blocks(&h, None).components.len());
        assert_eq!(lint_codes(&wb, dc, dr), lint_codes(&moved, 0, 0));
    }
}
