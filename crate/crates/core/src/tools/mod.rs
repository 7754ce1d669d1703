//! The auditing tools. Each one turns a [`DepGraph`] query into an
//! [`Overlay`] (fills, arrows, blocks, levels, components) or a list of
//! [`Diagnostic`]s.
//!
//! [`DepGraph`]: crate::depgraph::DepGraph

mod arrows;
mod classify;
mod lint;
mod strata;

use std::fmt;
use std::str::FromStr;

use crate::depgraph::DepGraph;
use crate::workbook::{CellAddress, Region};

pub use arrows::{block_precedents, in_block_links, multi_dependents, multi_precedents};
pub use classify::{classify, CellKind, Classification};
pub use lint::{lint_broken_links, lint_irregular, lint_recompute, LintConfig};
pub use strata::{level_overlay, separated_blocks};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FillKind {
    Input,
    Output,
    Processing,
    Standalone,
    /// Seed cells of a precedent/dependent query.
    Selected,
    Component(u32),
}

impl fmt::Display for FillKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FillKind::Input => f.write_str("input"),
            FillKind::Output => f.write_str("output"),
            FillKind::Processing => f.write_str("processing"),
            FillKind::Standalone => f.write_str("standalone"),
            FillKind::Selected => f.write_str("selected"),
            FillKind::Component(k) => write!(f, "component-{k}"),
        }
    }
}

impl FromStr for FillKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "input" => FillKind::Input,
            "output" => FillKind::Output,
            "processing" => FillKind::Processing,
            "standalone" => FillKind::Standalone,
            "selected" => FillKind::Selected,
            _ => {
                let k = s.strip_prefix("component-").and_then(|k| k.parse().ok());
                FillKind::Component(k.ok_or_else(|| format!("unknown fill class `{s}`"))?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fill {
    pub cell: CellAddress,
    pub kind: FillKind,
}

/// Arrow endpoint: a cell, or a block declared in the same overlay.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Cell(CellAddress),
    Block(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrowKind {
    Cell,
    Block,
}

impl ArrowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ArrowKind::Cell => "cell",
            ArrowKind::Block => "block",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub from: Endpoint,
    pub to: Endpoint,
    pub kind: ArrowKind,
    /// Component id, set by the separated-blocks tool.
    pub component: Option<u32>,
}

impl Arrow {
    pub fn cell(from: CellAddress, to: CellAddress) -> Self {
        Arrow { from: Endpoint::Cell(from), to: Endpoint::Cell(to), kind: ArrowKind::Cell, component: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    pub id: u32,
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelEntry {
    pub cell: CellAddress,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Component {
    pub id: u32,
    pub cells: Vec<CellAddress>,
}

/// A renderable analysis result. Fills, arrows and levels are kept in
/// address order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Overlay {
    pub fills: Vec<Fill>,
    pub arrows: Vec<Arrow>,
    pub blocks: Vec<Block>,
    pub levels: Vec<LevelEntry>,
    pub components: Vec<Component>,
}

impl Overlay {
    /// Checks that every arrow endpoint is a graph node or a declared block.
    pub fn validate(&self, g: &DepGraph) -> Result<(), String> {
        for arrow in &self.arrows {
            for end in [&arrow.from, &arrow.to] {
                match end {
                    Endpoint::Cell(addr) if g.node(addr).is_none() => {
                        return Err(format!("arrow endpoint {addr} is not a cell of the workbook"));
                    }
                    Endpoint::Block(id) if !self.blocks.iter().any(|b| b.id == *id) => {
                        return Err(format!("arrow endpoint #{id} is not a declared block"));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn sort(&mut self) {
        self.fills.sort();
        self.arrows.sort();
        self.levels.sort_by(|a, b| a.cell.cmp(&b.cell));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiagnosticCode {
    StandaloneValue,
    PatternBreak,
    IrregularPattern,
    AmbiguousMajority,
    ValueMismatch,
    Cycle,
    DanglingRef,
}

impl DiagnosticCode {
    pub const ALL: [DiagnosticCode; 7] = [
        DiagnosticCode::StandaloneValue,
        DiagnosticCode::PatternBreak,
        DiagnosticCode::IrregularPattern,
        DiagnosticCode::AmbiguousMajority,
        DiagnosticCode::ValueMismatch,
        DiagnosticCode::Cycle,
        DiagnosticCode::DanglingRef,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::StandaloneValue => "STANDALONE_VALUE",
            DiagnosticCode::PatternBreak => "PATTERN_BREAK",
            DiagnosticCode::IrregularPattern => "IRREGULAR_PATTERN",
            DiagnosticCode::AmbiguousMajority => "AMBIGUOUS_MAJORITY",
            DiagnosticCode::ValueMismatch => "VALUE_MISMATCH",
            DiagnosticCode::Cycle => "CYCLE",
            DiagnosticCode::DanglingRef => "DANGLING_REF",
        }
    }
}

impl FromStr for DiagnosticCode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DiagnosticCode::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown diagnostic code `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        }
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "warning" => Ok(Severity::Warning),
            "error" => Ok(Severity::Error),
            _ => Err(format!("unknown severity `{s}`")),
        }
    }
}

/// A lint finding. `cells` is never empty and `message` names every cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub cells: Vec<CellAddress>,
    pub severity: Severity,
    pub message: String,
}

pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| (&a.cells[0], a.code).cmp(&(&b.cells[0], b.code)));
}

/// `B1, B2` for messages.
pub(crate) fn cell_list(cells: &[CellAddress], default_sheet: &str) -> String {
    cells.iter().map(|c| c.display_in(default_sheet)).collect::<Vec<_>>().join(", ")
}
