use std::fmt::Write as _;

use super::{BinaryOp, Expr, RefCoord};
use crate::workbook::column_name;

/// Binding strength of the printed form of a node; higher binds tighter.
fn strength(expr: &Expr) -> u8 {
    match expr {
        Expr::Number(_) | Expr::Ref(_) | Expr::Range(_) | Expr::Call { .. } => 4,
        Expr::Neg(_) | Expr::Percent(_) => 3,
        Expr::Binary { op: BinaryOp::Pow, .. } => 2,
        Expr::Binary { op: BinaryOp::Mul | BinaryOp::Div, .. } => 1,
        Expr::Binary { op: BinaryOp::Add | BinaryOp::Sub, .. } => 0,
    }
}

/// Prints `expr` with the fewest parentheses that reparse to the same tree.
/// `coord` renders one reference endpoint; sheet prefixes are handled here.
pub(crate) fn write_expr(expr: &Expr, out: &mut String, coord: &mut impl FnMut(&mut String, &RefCoord)) {
    match expr {
        Expr::Number(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Ref(r) => {
            if let Some(sheet) = &r.sheet {
                let _ = write!(out, "{sheet}!");
            }
            coord(out, &r.coord);
        }
        Expr::Range(r) => {
            if let Some(sheet) = &r.sheet {
                let _ = write!(out, "{sheet}!");
            }
            coord(out, &r.start);
            out.push(':');
            coord(out, &r.end);
        }
        Expr::Call { name, args } => {
            out.push_str(name);
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_expr(arg, out, coord);
            }
            out.push(')');
        }
        Expr::Percent(inner) => {
            write_operand(inner, 4, out, coord);
            out.push('%');
        }
        Expr::Neg(inner) => {
            out.push('-');
            // Only a base or a percent may follow a unary minus.
            if matches!(**inner, Expr::Percent(_)) {
                write_expr(inner, out, coord);
            } else {
                write_operand(inner, 4, out, coord);
            }
        }
        Expr::Binary { op, lhs, rhs } => {
            let (lhs_min, rhs_min) = match op {
                BinaryOp::Add | BinaryOp::Sub => (0, 1),
                BinaryOp::Mul | BinaryOp::Div => (1, 2),
                BinaryOp::Pow => (3, 2),
            };
            write_operand(lhs, lhs_min, out, coord);
            out.push(op.symbol());
            write_operand(rhs, rhs_min, out, coord);
        }
    }
}

fn write_operand(expr: &Expr, min: u8, out: &mut String, coord: &mut impl FnMut(&mut String, &RefCoord)) {
    if strength(expr) >= min {
        write_expr(expr, out, coord);
    } else {
        out.push('(');
        write_expr(expr, out, coord);
        out.push(')');
    }
}

pub(crate) fn write_a1(out: &mut String, coord: &RefCoord) {
    if coord.col_absolute {
        out.push('$');
    }
    out.push_str(&column_name(coord.col));
    if coord.row_absolute {
        out.push('$');
    }
    let _ = write!(out, "{}", coord.row);
}

#[cfg(test)]
mod tests {
    use super::super::parse_formula;
    use super::*;

    #[test]
    fn parenthesizes_only_where_needed() {
        let n = |v: f64| Expr::Number(v);
        let neg = |e: Expr| Expr::Neg(Box::new(e));
        let pct = |e: Expr| Expr::Percent(Box::new(e));
        let cases = [
            (neg(neg(n(1.0))), "=-(-1)"),
            (pct(pct(n(1.0))), "=(1%)%"),
            (pct(neg(n(1.0))), "=(-1)%"),
            (neg(pct(n(5.0))), "=-5%"),
            (Expr::binary(BinaryOp::Pow, Expr::binary(BinaryOp::Pow, n(2.0), n(3.0)), n(4.0)), "=(2^3)^4"),
            (neg(Expr::binary(BinaryOp::Pow, n(2.0), n(2.0))), "=-(2^2)"),
            (Expr::binary(BinaryOp::Mul, n(2.0), neg(n(3.0))), "=2*-3"),
            (Expr::binary(BinaryOp::Div, n(1.0), Expr::binary(BinaryOp::Mul, n(2.0), n(3.0))), "=1/(2*3)"),
            (Expr::Number(1e-7), "=0.0000001"),
        ];
        for (ast, text) in cases {
            assert_eq!(ast.to_source(), text);
            assert_eq!(parse_formula(text).unwrap(), ast, "{text}");
        }
    }
}
