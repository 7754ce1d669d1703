//! Sparse cell model and the two workbook file formats.
//!
//! A [`Workbook`] is immutable once loaded. Every formula cell carries its
//! parsed AST, and every range inside it has been checked against the
//! expansion cap, so downstream analyses never see a malformed cell.

mod address;
mod grid;
mod json;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::formula::{self, Expr, ParseError, RefError};

pub use address::{column_index, column_name, parse_region, CellAddress, Region, MAX_COLS, MAX_ROWS};
pub use grid::{load_grid, to_grid};
pub use json::{cell_records, load_json, to_json, CellRecord};

pub const DEFAULT_SHEET: &str = "Sheet1";

/// Malformed input: bad grid/JSON syntax, a formula that does not parse, an
/// address outside the grid, and so on.
#[derive(Debug, Clone, PartialEq)]
pub struct FormatError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    /// Cell the error belongs to, in A1 text, when known.
    pub cell: Option<String>,
    pub reason: String,
    /// Underlying formula error for formula cells.
    pub formula: Option<ParseError>,
}

impl FormatError {
    pub(crate) fn bare(reason: impl Into<String>) -> Self {
        FormatError { line: None, column: None, cell: None, reason: reason.into(), formula: None }
    }

    pub(crate) fn at(line: usize, column: usize, reason: impl Into<String>) -> Self {
        FormatError { line: Some(line), column: Some(column), ..FormatError::bare(reason) }
    }
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(line), Some(col)) => write!(f, "line {line}, column {col}: ")?,
            (Some(line), None) => write!(f, "line {line}: ")?,
            _ => {}
        }
        if let Some(cell) = &self.cell {
            write!(f, "cell {cell}: ")?;
        }
        f.write_str(&self.reason)
    }
}

impl std::error::Error for FormatError {}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkbookError {
    #[error("FORMAT_ERROR: {0}")]
    Format(#[from] FormatError),
    #[error("DUPLICATE_CELL: {cell} appears twice in sheet `{sheet}`")]
    DuplicateCell { sheet: String, cell: String },
}

impl WorkbookError {
    pub fn code(&self) -> &'static str {
        match self {
            WorkbookError::Format(_) => "FORMAT_ERROR",
            WorkbookError::DuplicateCell { .. } => "DUPLICATE_CELL",
        }
    }
}

/// A formula cell: its source text, parsed tree, and the value last stored
/// for it (absent for grid input).
#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    source: String,
    ast: Expr,
    stored: Option<f64>,
}

impl Formula {
    /// Parses `source` and checks every range in it against `range_cap`,
    /// resolving sheet-less references against `host`.
    pub fn new(
        source: &str,
        stored: Option<f64>,
        host: &CellAddress,
        range_cap: usize,
    ) -> Result<Self, FormulaCellError> {
        let ast = formula::parse_formula(source)?;
        formula::extract_references_capped(&ast, host, range_cap)?;
        Ok(Formula { source: source.to_string(), ast, stored })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn stored(&self) -> Option<f64> {
        self.stored
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormulaCellError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Range(#[from] RefError),
}

impl FormulaCellError {
    fn into_format(self, line: Option<usize>, column: Option<usize>, cell: &CellAddress) -> FormatError {
        let (reason, formula) = match self {
            FormulaCellError::Parse(e) => (format!("formula does not parse: {e}"), Some(e)),
            FormulaCellError::Range(e) => (e.to_string(), None),
        };
        FormatError { line, column, cell: Some(cell.a1()), reason, formula }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellContent {
    Text(String),
    Number(f64),
    Formula(Formula),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub addr: CellAddress,
    pub content: CellContent,
}

impl Cell {
    pub fn formula(&self) -> Option<&Formula> {
        match &self.content {
            CellContent::Formula(f) => Some(f),
            _ => None,
        }
    }

    pub fn is_text(&self) -> bool {
        matches!(self.content, CellContent::Text(_))
    }

    pub fn is_number(&self) -> bool {
        matches!(self.content, CellContent::Number(_))
    }
}

/// What a formula sees when it reads a cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellValue {
    Number(f64),
    /// Empty or text.
    Blank,
    /// A formula without a stored value.
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sheet {
    name: Arc<str>,
    cells: BTreeMap<CellAddress, Cell>,
}

impl Sheet {
    pub fn new(name: impl Into<Arc<str>>) -> Self {
        Sheet { name: name.into(), cells: BTreeMap::new() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.cells.values()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Bounding box of the non-empty cells.
    pub fn used_region(&self) -> Option<Region> {
        Region::bounding(self.cells.keys())
    }

    /// Inserts a cell, rejecting a second cell at the same address.
    pub fn insert(&mut self, content: CellContent, col: u32, row: u32) -> Result<(), WorkbookError> {
        let addr = CellAddress::checked(self.name.clone(), col, row).ok_or_else(|| {
            FormatError::bare(format!("cell at column {col}, row {row} is outside the grid"))
        })?;
        self.insert_cell(Cell { addr, content })
    }

    fn insert_cell(&mut self, cell: Cell) -> Result<(), WorkbookError> {
        debug_assert_eq!(cell.addr.sheet, self.name);
        if self.cells.contains_key(&cell.addr) {
            return Err(WorkbookError::DuplicateCell { sheet: self.name.to_string(), cell: cell.addr.a1() });
        }
        self.cells.insert(cell.addr.clone(), cell);
        Ok(())
    }
}

/// Ordered list of uniquely named sheets; never empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Workbook {
    sheets: Vec<Sheet>,
}

impl Workbook {
    pub fn new(sheets: Vec<Sheet>) -> Result<Self, WorkbookError> {
        if sheets.is_empty() {
            return Err(FormatError::bare("a workbook needs at least one sheet").into());
        }
        for (i, sheet) in sheets.iter().enumerate() {
            if sheet.name.is_empty() {
                return Err(FormatError::bare("empty sheet name").into());
            }
            if sheets[..i].iter().any(|s| s.name == sheet.name) {
                return Err(FormatError::bare(format!("duplicate sheet name `{}`", sheet.name)).into());
            }
        }
        Ok(Workbook { sheets })
    }

    pub fn sheets(&self) -> &[Sheet] {
        &self.sheets
    }

    pub fn sheet(&self, name: &str) -> Option<&Sheet> {
        self.sheets.iter().find(|s| &*s.name == name)
    }

    /// The first sheet's name; unqualified references resolve against it.
    pub fn default_sheet(&self) -> &str {
        &self.sheets[0].name
    }

    pub fn get(&self, addr: &CellAddress) -> Option<&Cell> {
        self.sheet(&addr.sheet)?.cells.get(addr)
    }

    /// All cells in address order.
    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        let mut order: Vec<&Sheet> = self.sheets.iter().collect();
        order.sort_by(|a, b| a.name.cmp(&b.name));
        order.into_iter().flat_map(|s| s.cells.values())
    }

    pub fn len(&self) -> usize {
        self.sheets.iter().map(Sheet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value_of(&self, addr: &CellAddress) -> CellValue {
        match self.get(addr).map(|c| &c.content) {
            Some(CellContent::Number(n)) => CellValue::Number(*n),
            Some(CellContent::Formula(f)) => f.stored.map_or(CellValue::Unknown, CellValue::Number),
            Some(CellContent::Text(_)) | None => CellValue::Blank,
        }
    }

    /// The same workbook moved by `(d_col, d_row)` on every sheet, with all
    /// references (absolute ones included) rewritten to follow their
    /// targets. `None` when something would leave the grid.
    pub fn translated(&self, d_col: i64, d_row: i64) -> Option<Workbook> {
        let mut sheets = Vec::with_capacity(self.sheets.len());
        for sheet in &self.sheets {
            let mut moved = Sheet::new(sheet.name.clone());
            for cell in sheet.cells.values() {
                let addr = cell.addr.offset(d_col, d_row)?;
                let content = match &cell.content {
                    CellContent::Formula(f) => {
                        let ast = f.ast.shifted(d_col, d_row, true)?;
                        CellContent::Formula(Formula { source: ast.to_source(), ast, stored: f.stored })
                    }
                    other => other.clone(),
                };
                moved.insert_cell(Cell { addr, content }).ok()?;
            }
            sheets.push(moved);
        }
        Workbook::new(sheets).ok()
    }

    /// SHA-256 over the canonical JSON form, hex encoded.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(to_json(self).as_bytes()))
    }
}

/// Numeric field syntax: optional sign, digits with optional decimal point,
/// optional exponent, optional trailing `%` (which divides by 100).
pub fn parse_number(text: &str) -> Option<f64> {
    let text = text.trim();
    let (body, percent) = match text.strip_suffix('%') {
        Some(body) => (body, true),
        None => (text, false),
    };
    let bytes = body.as_bytes();
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+' | b'-')) {
        i += 1;
    }
    let int_start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
        i += 1;
        if i < bytes.len() && matches!(bytes[i], b'+' | b'-') {
            i += 1;
        }
        let exp_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == exp_start {
            return None;
        }
    }
    if i != bytes.len() {
        return None;
    }
    let value: f64 = body.parse().ok()?;
    let value = if percent { value / 100.0 } else { value };
    value.is_finite().then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_syntax() {
        assert_eq!(parse_number("30000"), Some(30000.0));
        assert_eq!(parse_number("-4.5"), Some(-4.5));
        assert_eq!(parse_number("+.5"), Some(0.5));
        assert_eq!(parse_number("16.2%"), Some(0.162));
        assert_eq!(parse_number("1e3"), Some(1000.0));
        assert_eq!(parse_number("2.5E-2"), Some(0.025));
        for text in ["", "2,105,165", "(438,150)", "$5", "inf", "NaN", "1e", "1.2.3", "%", "-", "5 %x", "1e999"] {
            assert_eq!(parse_number(text), None, "{text:?}");
        }
    }

    #[test]
    fn workbook_invariants() {
        assert!(Workbook::new(vec![]).is_err());
        assert!(Workbook::new(vec![Sheet::new("A"), Sheet::new("A")]).is_err());
        let mut sheet = Sheet::new("A");
        sheet.insert(CellContent::Number(1.0), 1, 1).unwrap();
        let err = sheet.insert(CellContent::Number(2.0), 1, 1).unwrap_err();
        assert_eq!(err.code(), "DUPLICATE_CELL");
        assert!(sheet.insert(CellContent::Number(1.0), MAX_COLS + 1, 1).is_err());
    }

    #[test]
    fn cells_iterate_in_address_order() {
        let mut b = Sheet::new("B");
        b.insert(CellContent::Number(1.0), 1, 1).unwrap();
        let mut a = Sheet::new("A");
        a.insert(CellContent::Number(1.0), 2, 1).unwrap();
        a.insert(CellContent::Number(1.0), 1, 2).unwrap();
        let wb = Workbook::new(vec![b, a]).unwrap();
        let order: Vec<String> = wb.cells().map(|c| c.addr.to_string()).collect();
        assert_eq!(order, ["A!B1", "A!A2", "B!A1"]);
        assert_eq!(wb.default_sheet(), "B");
    }

    #[test]
    fn digest_tracks_content() {
        let wb1 = load_grid("1,2\n=A1+B1").unwrap();
        let wb2 = load_grid("1,2\n=A1+B1").unwrap();
        let wb3 = load_grid("1,3\n=A1+B1").unwrap();
        assert_eq!(wb1.digest(), wb2.digest());
        assert_ne!(wb1.digest(), wb3.digest());
        assert_eq!(wb1.digest().len(), 64);
    }
}
