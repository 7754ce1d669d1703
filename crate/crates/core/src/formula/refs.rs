use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{Expr, RefCoord};
use crate::workbook::CellAddress;

/// Largest number of cells a single range may expand to.
pub const DEFAULT_RANGE_CAP: usize = 65_536;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RefError {
    #[error("RANGE_TOO_LARGE: range {range} covers {cells} cells (limit {cap})")]
    RangeTooLarge { range: String, cells: u64, cap: usize },
}

/// Precedent addresses of one formula, ranges expanded, in address order.
/// Each address remembers whether any occurrence came from a range.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RefSet {
    cells: BTreeMap<CellAddress, bool>,
}

impl RefSet {
    pub fn cells(&self) -> impl Iterator<Item = &CellAddress> {
        self.cells.keys()
    }

    pub fn via_range(&self, addr: &CellAddress) -> Option<bool> {
        self.cells.get(addr).copied()
    }

    pub fn contains(&self, addr: &CellAddress) -> bool {
        self.cells.contains_key(addr)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn add(&mut self, addr: CellAddress, via_range: bool) {
        *self.cells.entry(addr).or_insert(false) |= via_range;
    }
}

pub fn extract_references(ast: &Expr, host: &CellAddress) -> Result<RefSet, RefError> {
    extract_references_capped(ast, host, DEFAULT_RANGE_CAP)
}

/// Resolves every reference of `ast` to an absolute address. Sheet-less
/// references live on the host's sheet; `$` markers play no role here.
pub fn extract_references_capped(ast: &Expr, host: &CellAddress, cap: usize) -> Result<RefSet, RefError> {
    let mut set = RefSet::default();
    let mut error = None;
    let sheet_of = |name: &Option<String>| -> Arc<str> {
        match name {
            Some(name) => Arc::from(name.as_str()),
            None => host.sheet.clone(),
        }
    };
    ast.walk(&mut |node| match node {
        Expr::Ref(r) => set.add(CellAddress::new(sheet_of(&r.sheet), r.coord.col, r.coord.row), false),
        Expr::Range(r) if error.is_none() => {
            let (c0, c1) = (r.start.col.min(r.end.col), r.start.col.max(r.end.col));
            let (r0, r1) = (r.start.row.min(r.end.row), r.start.row.max(r.end.row));
            let cells = u64::from(c1 - c0 + 1) * u64::from(r1 - r0 + 1);
            if cells > cap as u64 {
                let mut text = String::new();
                super::print::write_expr(node, &mut text, &mut super::print::write_a1);
                error = Some(RefError::RangeTooLarge { range: text, cells, cap });
                return;
            }
            let sheet = sheet_of(&r.sheet);
            for row in r0..=r1 {
                for col in c0..=c1 {
                    set.add(CellAddress::new(sheet.clone(), col, row), true);
                }
            }
        }
        _ => {}
    });
    match error {
        Some(e) => Err(e),
        None => Ok(set),
    }
}

/// Shifts one coordinate; `None` when it would leave the grid.
pub(crate) fn shift_coord(coord: RefCoord, d_col: i64, d_row: i64, shift_absolute: bool) -> Option<RefCoord> {
    let col = if coord.col_absolute && !shift_absolute { coord.col as i64 } else { coord.col as i64 + d_col };
    let row = if coord.row_absolute && !shift_absolute { coord.row as i64 } else { coord.row as i64 + d_row };
    let probe = CellAddress::checked("_", u32::try_from(col).ok()?, u32::try_from(row).ok()?)?;
    Some(RefCoord { col: probe.col, row: probe.row, ..coord })
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    fn refs(src: &str, host: &str) -> Vec<(String, bool)> {
        let host = CellAddress::parse(host, "S").unwrap();
        let set = extract_references(&parse_formula(src).unwrap(), &host).unwrap();
        set.cells().map(|a| (a.display_in("S"), set.via_range(a).unwrap())).collect()
    }

    #[test]
    fn direct_references() {
        assert_eq!(refs("=B3-B4", "B5"), [("B3".into(), false), ("B4".into(), false)]);
    }

    #[test]
    fn no_references() {
        assert!(refs("=7+1", "A1").is_empty());
    }

    #[test]
    fn range_expansion() {
        let got = refs("=SUM(B5:B9)", "B10");
        let names: Vec<&str> = got.iter().map(|(a, _)| a.as_str()).collect();
        assert_eq!(names, ["B5", "B6", "B7", "B8", "B9"]);
        assert!(got.iter().all(|(_, via)| *via));
    }

    #[test]
    fn duplicates_collapse_and_self_reference_kept() {
        let got = refs("=A1+$A$1+SUM(A1:A2)+C1+Other!A1", "C1");
        assert_eq!(
            got,
            [("Other!A1".into(), false), ("A1".into(), true), ("C1".into(), false), ("A2".into(), true)]
        );
    }

    #[test]
    fn inverted_range_corners() {
        let names: Vec<String> = refs("=SUM(B2:A1)", "C3").into_iter().map(|(a, _)| a).collect();
        assert_eq!(names, ["A1", "B1", "A2", "B2"]);
    }

    #[test]
    fn range_cap() {
        let host = CellAddress::new("S", 1, 1);
        let ast = parse_formula("=SUM(A1:J10)").unwrap();
        assert!(extract_references_capped(&ast, &host, 100).is_ok());
        let err = extract_references_capped(&ast, &host, 99).unwrap_err();
        assert_eq!(err, RefError::RangeTooLarge { range: "A1:J10".into(), cells: 100, cap: 99 });
    }
}
