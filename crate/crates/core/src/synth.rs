//! Random acyclic workbooks for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::formula::{BinaryOp, CellRef, Expr, RangeRef, RefCoord, DEFAULT_RANGE_CAP};
use crate::workbook::{CellAddress, CellContent, Formula, Sheet, Workbook, DEFAULT_SHEET};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthConfig {
    pub max_cells: usize,
    pub max_edges: usize,
    pub rows: u32,
    pub cols: u32,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig { max_cells: 100, max_edges: 300, rows: 15, cols: 10 }
    }
}

/// A workbook on one sheet whose formulas only read cells placed earlier in
/// a random order (or empty cells), so the graph is acyclic. Formulas carry
/// no stored values.
pub fn random_workbook(rng: &mut impl Rng, config: &SynthConfig) -> Workbook {
    let capacity = (config.rows * config.cols) as usize;
    let n = rng.gen_range(1..=config.max_cells.min(capacity));
    let mut slots: Vec<(u32, u32)> =
        (1..=config.rows).flat_map(|r| (1..=config.cols).map(move |c| (c, r))).collect();
    slots.shuffle(rng);
    let order = &slots[..n];
    let free = &slots[n..];

    let mut rank = vec![None; capacity];
    let slot = |col: u32, row: u32| ((row - 1) * config.cols + (col - 1)) as usize;
    for (i, &(c, r)) in order.iter().enumerate() {
        rank[slot(c, r)] = Some(i);
    }

    let mut sheet = Sheet::new(DEFAULT_SHEET);
    let mut edges = 0usize;
    for (i, &(col, row)) in order.iter().enumerate() {
        let host = CellAddress::new(DEFAULT_SHEET, col, row);
        let budget = config.max_edges - edges;
        let content = if i > 0 && budget > 0 && rng.gen_bool(0.6) {
            let (ast, used) = random_formula(rng, order, free, i, budget, |c, r| rank[slot(c, r)], config);
            edges += used;
            let formula = Formula::new(&ast.to_source(), None, &host, DEFAULT_RANGE_CAP)
                .expect("generated formulas parse");
            CellContent::Formula(formula)
        } else if rng.gen_bool(0.1) {
            CellContent::Text(format!("label{i}"))
        } else {
            CellContent::Number(f64::from(rng.gen_range(0..1000)))
        };
        sheet.insert(content, col, row).expect("slots are distinct");
    }
    Workbook::new(vec![sheet]).expect("one named sheet")
}

/// Returns the formula and the number of distinct cells it reads.
fn random_formula(
    rng: &mut impl Rng,
    order: &[(u32, u32)],
    free: &[(u32, u32)],
    position: usize,
    budget: usize,
    rank_of: impl Fn(u32, u32) -> Option<usize>,
    config: &SynthConfig,
) -> (Expr, usize) {
    let mut terms = Vec::new();
    let mut read = std::collections::BTreeSet::new();
    let wanted = rng.gen_range(1..=4usize).min(budget);

    // A range is usable when every non-empty cell it covers comes earlier.
    if wanted >= 2 && rng.gen_bool(0.2) {
        let (c0, r0) = order[rng.gen_range(0..position)];
        let (c1, r1) = (rng.gen_range(c0..=config.cols.min(c0 + 2)), rng.gen_range(r0..=config.rows.min(r0 + 2)));
        let cells: Vec<(u32, u32)> = (r0..=r1).flat_map(|r| (c0..=c1).map(move |c| (c, r))).collect();
        let earlier = cells.iter().all(|&(c, r)| rank_of(c, r).is_none_or(|k| k < position));
        if earlier && cells.len() <= wanted {
            read.extend(cells.iter().copied());
            let range = RangeRef { sheet: None, start: coord(rng, c0, r0), end: coord(rng, c1, r1) };
            terms.push(Expr::Call { name: "SUM".into(), args: vec![Expr::Range(range)] });
        }
    }
    while read.len() < wanted {
        let (c, r) = if !free.is_empty() && rng.gen_bool(0.05) {
            free[rng.gen_range(0..free.len())]
        } else {
            order[rng.gen_range(0..position)]
        };
        if read.insert((c, r)) {
            terms.push(Expr::Ref(CellRef { sheet: None, coord: coord(rng, c, r) }));
        }
    }
    if rng.gen_bool(0.2) {
        terms.push(Expr::Number(f64::from(rng.gen_range(1..100))));
    }

    let mut expr = terms.remove(0);
    for term in terms {
        let op = [BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul][rng.gen_range(0..3)];
        expr = Expr::binary(op, expr, term);
    }
    (expr, read.len())
}

fn coord(rng: &mut impl Rng, col: u32, row: u32) -> RefCoord {
    RefCoord { col, row, col_absolute: rng.gen_bool(0.15), row_absolute: rng.gen_bool(0.15) }
}
