use std::collections::{BTreeMap, BTreeSet};

use super::{cell_list, sort_diagnostics, Diagnostic, DiagnosticCode, Severity};
use crate::depgraph::{DepGraph, NodeKind};
use crate::formula::{evaluate, extract_references, normalize_pattern, Pattern};
use crate::workbook::{Cell, CellAddress, CellContent, Region, Workbook};

/// Thresholds of the lint rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LintConfig {
    /// A Pattern must cover strictly more than this share of a block's
    /// formulas to count as the majority.
    pub majority: f64,
    /// Shortest run of adjacent non-empty cells considered for pattern breaks.
    pub min_run: usize,
    /// Minimum share of formulas in such a run.
    pub min_formula_share: f64,
    pub abs_tolerance: f64,
    pub rel_tolerance: f64,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig { majority: 0.5, min_run: 3, min_formula_share: 0.6, abs_tolerance: 1e-9, rel_tolerance: 1e-6 }
    }
}

/// Ratios are compared with a little slack so that 3 of 5 meets 60%.
const SHARE_EPSILON: f64 = 1e-12;

/// Values typed where a formula belongs: standalone numbers, numbers
/// breaking a run of copied formulas, and formulas reading empty cells.
pub fn lint_broken_links(wb: &Workbook, g: &DepGraph, config: &LintConfig) -> Vec<Diagnostic> {
    let sheet = g.default_sheet();
    let mut out = Vec::new();

    for id in g.node_ids() {
        if g.kind(id) == NodeKind::Number && g.precedents_of(id).is_empty() && g.dependents_of(id).is_empty() {
            let cell = g.address(id).clone();
            out.push(Diagnostic {
                code: DiagnosticCode::StandaloneValue,
                message: format!("{} holds a value that no formula reads", cell.display_in(sheet)),
                cells: vec![cell],
                severity: Severity::Warning,
            });
        }
    }

    let flagged: BTreeSet<CellAddress> = runs(wb).iter().flat_map(|run| pattern_breaks(run, config)).collect();
    for cell in flagged {
        out.push(Diagnostic {
            code: DiagnosticCode::PatternBreak,
            message: format!("{} holds a value inside a run of copied formulas", cell.display_in(sheet)),
            cells: vec![cell],
            severity: Severity::Warning,
        });
    }

    for cell in wb.cells() {
        let Some(formula) = cell.formula() else { continue };
        let refs = extract_references(formula.ast(), &cell.addr).expect("uncapped extraction");
        // Ranges spanning blank cells are ordinary; only direct references
        // to empty cells are suspicious.
        let empty: Vec<CellAddress> = refs
            .cells()
            .filter(|a| refs.via_range(a) == Some(false) && wb.get(a).is_none())
            .cloned()
            .collect();
        if !empty.is_empty() {
            let message = format!(
                "{} references empty {} {}",
                cell.addr.display_in(sheet),
                if empty.len() == 1 { "cell" } else { "cells" },
                cell_list(&empty, sheet)
            );
            let mut cells = vec![cell.addr.clone()];
            cells.extend(empty);
            out.push(Diagnostic { code: DiagnosticCode::DanglingRef, cells, severity: Severity::Warning, message });
        }
    }

    sort_diagnostics(&mut out);
    out
}

/// Maximal runs of vertically or horizontally adjacent non-empty cells.
fn runs(wb: &Workbook) -> Vec<Vec<&Cell>> {
    let mut out = Vec::new();
    for sheet in wb.sheets() {
        let mut columns: BTreeMap<u32, Vec<&Cell>> = BTreeMap::new();
        let mut rows: BTreeMap<u32, Vec<&Cell>> = BTreeMap::new();
        for cell in sheet.cells() {
            columns.entry(cell.addr.col).or_default().push(cell);
            rows.entry(cell.addr.row).or_default().push(cell);
        }
        for mut line in columns.into_values() {
            line.sort_by_key(|c| c.addr.row);
            split_runs(line, |c| c.addr.row, &mut out);
        }
        for line in rows.into_values() {
            split_runs(line, |c| c.addr.col, &mut out);
        }
    }
    out
}

fn split_runs<'a>(line: Vec<&'a Cell>, pos: impl Fn(&Cell) -> u32, out: &mut Vec<Vec<&'a Cell>>) {
    let mut current: Vec<&Cell> = Vec::new();
    for cell in line {
        if current.last().is_some_and(|last| pos(last) + 1 != pos(cell)) {
            out.push(std::mem::take(&mut current));
        }
        current.push(cell);
    }
    if !current.is_empty() {
        out.push(current);
    }
}

fn pattern_breaks(run: &[&Cell], config: &LintConfig) -> Vec<CellAddress> {
    if run.len() < config.min_run {
        return Vec::new();
    }
    let patterns: BTreeSet<Pattern> =
        run.iter().filter_map(|c| c.formula().map(|f| normalize_pattern(f.ast(), &c.addr))).collect();
    let share = patterns_count(run) as f64 / run.len() as f64;
    if patterns.len() != 1 || share + SHARE_EPSILON < config.min_formula_share {
        return Vec::new();
    }
    run[1..run.len() - 1].iter().filter(|c| c.is_number()).map(|c| c.addr.clone()).collect()
}

fn patterns_count(run: &[&Cell]) -> usize {
    run.iter().filter(|c| c.formula().is_some()).count()
}

/// Formulas in `block` whose Pattern differs from the majority Pattern.
/// With fewer than three formulas, or no strict majority, the result is a
/// single AMBIGUOUS_MAJORITY warning instead.
pub fn lint_irregular(wb: &Workbook, block: &Region, config: &LintConfig) -> Vec<Diagnostic> {
    let sheet = wb.default_sheet();
    let formulas: Vec<(&Cell, Pattern)> = wb
        .cells()
        .filter(|c| block.contains(&c.addr))
        .filter_map(|c| c.formula().map(|f| (c, normalize_pattern(f.ast(), &c.addr))))
        .collect();

    let mut counts: BTreeMap<&Pattern, usize> = BTreeMap::new();
    for (_, p) in &formulas {
        *counts.entry(p).or_default() += 1;
    }
    let majority = counts
        .iter()
        .max_by_key(|(_, &n)| n)
        .filter(|(_, &n)| formulas.len() >= 3 && n as f64 / formulas.len() as f64 > config.majority + SHARE_EPSILON)
        .map(|(p, _)| (*p).clone());

    let block_text = block.display_in(sheet);
    let Some(majority) = majority else {
        let cells: Vec<CellAddress> = if formulas.is_empty() {
            vec![block.top_left().clone()]
        } else {
            formulas.iter().map(|(c, _)| c.addr.clone()).collect()
        };
        return vec![Diagnostic {
            code: DiagnosticCode::AmbiguousMajority,
            message: format!(
                "no formula pattern holds a majority in {block_text} ({} formulas: {})",
                formulas.len(),
                if formulas.is_empty() { block.top_left().display_in(sheet) } else { cell_list(&cells, sheet) }
            ),
            cells,
            severity: Severity::Warning,
        }];
    };

    let shared = counts[&majority];
    let mut out: Vec<Diagnostic> = formulas
        .iter()
        .filter(|(_, p)| *p != majority)
        .map(|(c, p)| Diagnostic {
            code: DiagnosticCode::IrregularPattern,
            message: format!(
                "{} has pattern {p}, unlike {shared} of {} formulas in {block_text} ({majority})",
                c.addr.display_in(sheet),
                formulas.len()
            ),
            cells: vec![c.addr.clone()],
            severity: Severity::Warning,
        })
        .collect();
    sort_diagnostics(&mut out);
    out
}

/// Formulas whose stored value disagrees with a fresh evaluation against
/// the stored values of their precedents. Formulas that cannot be evaluated
/// are skipped.
pub fn lint_recompute(wb: &Workbook, config: &LintConfig) -> Vec<Diagnostic> {
    let sheet = wb.default_sheet();
    let lookup = |a: &CellAddress| wb.value_of(a);
    let mut out = Vec::new();
    for cell in wb.cells() {
        let CellContent::Formula(f) = &cell.content else { continue };
        let Some(stored) = f.stored() else { continue };
        let Ok(value) = evaluate(f.ast(), &cell.addr, &lookup) else { continue };
        if (stored - value).abs() > config.abs_tolerance.max(config.rel_tolerance * value.abs()) {
            out.push(Diagnostic {
                code: DiagnosticCode::ValueMismatch,
                message: format!(
                    "{} stores {stored} but {} evaluates to {value}",
                    cell.addr.display_in(sheet),
                    f.source()
                ),
                cells: vec![cell.addr.clone()],
                severity: Severity::Error,
            });
        }
    }
    sort_diagnostics(&mut out);
    out
}
