use std::fmt;
use std::fmt::Write as _;

use super::print::write_expr;
use super::Expr;
use crate::workbook::CellAddress;

/// Formula text with every relative axis rewritten as an offset from the
/// host cell (`R[-1]C[0]`) and every absolute axis as a fixed index
/// (`R{1}C{1}`). Copy-filled formulas share one pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(String);

impl Pattern {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn normalize_pattern(ast: &Expr, host: &CellAddress) -> Pattern {
    let mut out = String::new();
    write_expr(ast, &mut out, &mut |out, coord| {
        if coord.row_absolute {
            let _ = write!(out, "R{{{}}}", coord.row);
        } else {
            let _ = write!(out, "R[{}]", i64::from(coord.row) - i64::from(host.row));
        }
        if coord.col_absolute {
            let _ = write!(out, "C{{{}}}", coord.col);
        } else {
            let _ = write!(out, "C[{}]", i64::from(coord.col) - i64::from(host.col));
        }
    });
    Pattern(out)
}
