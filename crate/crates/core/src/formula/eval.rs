use std::sync::Arc;

use thiserror::Error;

use super::{BinaryOp, CellRef, Expr, RangeRef};
use crate::workbook::{CellAddress, CellValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("UNSUPPORTED_FUNCTION: {0}")]
    UnsupportedFunction(String),
    #[error("UNSUPPORTED_FUNCTION: a bare range has no single value")]
    BareRange,
    #[error("MISSING_VALUE: {0} has no numeric value")]
    MissingValue(CellAddress),
    #[error("DIV_BY_ZERO")]
    DivByZero,
}

/// Evaluates `+ - * / ^`, unary minus, percent and `SUM`. Referenced
/// formula cells contribute their stored values; nothing is recomputed
/// recursively. Inside `SUM`, empty and text cells count as zero.
pub fn evaluate(ast: &Expr, host: &CellAddress, lookup: &impl Fn(&CellAddress) -> CellValue) -> Result<f64, EvalError> {
    Evaluator { host_sheet: host.sheet.clone(), lookup }.eval(ast)
}

struct Evaluator<'a, F> {
    host_sheet: Arc<str>,
    lookup: &'a F,
}

impl<F: Fn(&CellAddress) -> CellValue> Evaluator<'_, F> {
    fn sheet(&self, name: &Option<String>) -> Arc<str> {
        name.as_deref().map_or_else(|| self.host_sheet.clone(), Arc::from)
    }

    fn eval(&self, expr: &Expr) -> Result<f64, EvalError> {
        match expr {
            Expr::Number(n) => Ok(*n),
            Expr::Ref(r) => {
                let addr = self.address(r);
                match (self.lookup)(&addr) {
                    CellValue::Number(n) => Ok(n),
                    CellValue::Blank | CellValue::Unknown => Err(EvalError::MissingValue(addr)),
                }
            }
            Expr::Range(_) => Err(EvalError::BareRange),
            Expr::Call { name, args } if name == "SUM" => {
                let mut total = 0.0;
                for arg in args {
                    total += match arg {
                        Expr::Range(r) => self.sum_range(r)?,
                        Expr::Ref(r) => self.lenient(self.address(r))?,
                        other => self.eval(other)?,
                    };
                }
                Ok(total)
            }
            Expr::Call { name, .. } => Err(EvalError::UnsupportedFunction(name.clone())),
            Expr::Neg(inner) => Ok(-self.eval(inner)?),
            Expr::Percent(inner) => Ok(self.eval(inner)? / 100.0),
            Expr::Binary { op, lhs, rhs } => {
                let (a, b) = (self.eval(lhs)?, self.eval(rhs)?);
                match op {
                    BinaryOp::Add => Ok(a + b),
                    BinaryOp::Sub => Ok(a - b),
                    BinaryOp::Mul => Ok(a * b),
                    BinaryOp::Div if b == 0.0 => Err(EvalError::DivByZero),
                    BinaryOp::Div => Ok(a / b),
                    BinaryOp::Pow => Ok(a.powf(b)),
                }
            }
        }
    }

    fn address(&self, r: &CellRef) -> CellAddress {
        CellAddress::new(self.sheet(&r.sheet), r.coord.col, r.coord.row)
    }

    fn lenient(&self, addr: CellAddress) -> Result<f64, EvalError> {
        match (self.lookup)(&addr) {
            CellValue::Number(n) => Ok(n),
            CellValue::Blank => Ok(0.0),
            CellValue::Unknown => Err(EvalError::MissingValue(addr)),
        }
    }

    fn sum_range(&self, r: &RangeRef) -> Result<f64, EvalError> {
        let sheet = self.sheet(&r.sheet);
        let mut total = 0.0;
        for row in r.start.row.min(r.end.row)..=r.start.row.max(r.end.row) {
            for col in r.start.col.min(r.end.col)..=r.start.col.max(r.end.col) {
                total += self.lenient(CellAddress::new(sheet.clone(), col, row))?;
            }
        }
        Ok(total)
    }
}
