//! A1-notation formulas: parsing, canonical printing, precedent extraction,
//! offset patterns and a small evaluator.
//!
//! Grammar, with precedence `%` > unary `-` > `^` (right associative) >
//! `* /` > `+ -`:
//!
//! ```text
//! formula = "=" expr
//! expr    = term {("+"|"-") term}
//! term    = factor {("*"|"/") factor}
//! factor  = ["-"] base ["%"] ["^" factor]
//! base    = number | ref | range | call | "(" expr ")"
//! call    = ident "(" [expr {"," expr}] ")"
//! ref     = [ident "!"] ["$"] letters ["$"] digits
//! range   = ref ":" ref
//! ```

mod eval;
mod parser;
mod pattern;
mod print;
mod refs;

use std::fmt;

pub use eval::{evaluate, EvalError};
pub use parser::{parse_formula, ParseError};
pub use pattern::{normalize_pattern, Pattern};
pub use refs::{extract_references, extract_references_capped, RefError, RefSet, DEFAULT_RANGE_CAP};

/// Coordinates of a reference as written, with its `$` markers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RefCoord {
    pub col: u32,
    pub row: u32,
    pub col_absolute: bool,
    pub row_absolute: bool,
}

impl RefCoord {
    pub fn relative(col: u32, row: u32) -> Self {
        RefCoord { col, row, col_absolute: false, row_absolute: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CellRef {
    pub sheet: Option<String>,
    pub coord: RefCoord,
}

/// `start:end` on a single sheet; endpoints are kept as written.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RangeRef {
    pub sheet: Option<String>,
    pub start: RefCoord,
    pub end: RefCoord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

/// Formula expression tree. Number literals are finite and non-negative;
/// a leading minus is always a [`Expr::Neg`] node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Ref(CellRef),
    Range(RangeRef),
    /// Function names are stored uppercased.
    Call { name: String, args: Vec<Expr> },
    Neg(Box<Expr>),
    Percent(Box<Expr>),
    Binary { op: BinaryOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

/// The parsed form of a formula cell.
pub type FormulaAst = Expr;

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }

    /// Canonical source text, including the leading `=`.
    pub fn to_source(&self) -> String {
        let mut out = String::from("=");
        print::write_expr(self, &mut out, &mut print::write_a1);
        out
    }

    /// Visits every node, parents before children, left to right.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Expr)) {
        visit(self);
        match self {
            Expr::Number(_) | Expr::Ref(_) | Expr::Range(_) => {}
            Expr::Call { args, .. } => args.iter().for_each(|a| a.walk(visit)),
            Expr::Neg(inner) | Expr::Percent(inner) => inner.walk(visit),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(visit);
                rhs.walk(visit);
            }
        }
    }

    /// Applies `f` to every reference coordinate (both ends of ranges).
    pub fn map_coords(&self, f: &mut impl FnMut(RefCoord) -> RefCoord) -> Expr {
        match self {
            Expr::Number(n) => Expr::Number(*n),
            Expr::Ref(r) => Expr::Ref(CellRef { sheet: r.sheet.clone(), coord: f(r.coord) }),
            Expr::Range(r) => Expr::Range(RangeRef { sheet: r.sheet.clone(), start: f(r.start), end: f(r.end) }),
            Expr::Call { name, args } => {
                Expr::Call { name: name.clone(), args: args.iter().map(|a| a.map_coords(f)).collect() }
            }
            Expr::Neg(inner) => Expr::Neg(Box::new(inner.map_coords(f))),
            Expr::Percent(inner) => Expr::Percent(Box::new(inner.map_coords(f))),
            Expr::Binary { op, lhs, rhs } => Expr::binary(*op, lhs.map_coords(f), rhs.map_coords(f)),
        }
    }

    /// Moves every reference by `(d_col, d_row)`, as copy-fill does. `$`
    /// coordinates stay put unless `shift_absolute` is set. `None` when a
    /// reference would leave the grid.
    pub fn shifted(&self, d_col: i64, d_row: i64, shift_absolute: bool) -> Option<Expr> {
        let mut fits = true;
        let moved = self.map_coords(&mut |c| {
            refs::shift_coord(c, d_col, d_row, shift_absolute).unwrap_or_else(|| {
                fits = false;
                c
            })
        });
        fits.then_some(moved)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_source())
    }
}
