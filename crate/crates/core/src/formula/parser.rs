use std::fmt;

use super::{BinaryOp, CellRef, Expr, RangeRef, RefCoord};
use crate::workbook::{column_index, MAX_ROWS};

/// Syntax error at a character offset into the formula source (0-based,
/// counting the leading `=`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PARSE_ERROR at position {}: expected {}", self.position, self.expected)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_formula(source: &str) -> Result<Expr, ParseError> {
    let chars: Vec<char> = source.chars().collect();
    let mut p = Parser { chars, pos: 0 };
    if p.peek() != Some('=') {
        return Err(p.error("`=` at start of formula"));
    }
    p.pos += 1;
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("operator or end of formula"));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError { position: self.pos, expected: expected.to_string() }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinaryOp::Add
            } else if self.eat('-') {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = if self.eat('*') {
                BinaryOp::Mul
            } else if self.eat('/') {
                BinaryOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let negate = self.eat('-');
        let mut value = self.base()?;
        if self.eat('%') {
            value = Expr::Percent(Box::new(value));
        }
        if negate {
            value = Expr::Neg(Box::new(value));
        }
        if self.eat('^') {
            let exponent = self.factor()?;
            value = Expr::binary(BinaryOp::Pow, value, exponent);
        }
        Ok(value)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("`)`"));
                }
                Ok(inner)
            }
            Some('$') => self.reference(None),
            Some(c) if is_ident_start(c) => {
                let start = self.pos;
                while self.peek().is_some_and(is_ident_char) {
                    self.pos += 1;
                }
                let ident: String = self.chars[start..self.pos].iter().collect();
                if self.peek() == Some('!') {
                    self.pos += 1;
                    return self.reference(Some(ident));
                }
                let after_ident = self.pos;
                self.skip_ws();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    return self.call(ident.to_ascii_uppercase());
                }
                self.pos = after_ident;
                // Not a call or sheet prefix: re-read the text as a cell reference.
                self.pos = start;
                self.reference(None)
            }
            _ => Err(self.error("number, reference, function call or `(`")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            let s = p.pos;
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error("digits"));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Number(v)),
            _ => Err(ParseError { position: start, expected: "finite number".into() }),
        }
    }

    fn call(&mut self, name: String) -> Result<Expr, ParseError> {
        let mut args = Vec::new();
        if self.eat(')') {
            return Ok(Expr::Call { name, args });
        }
        loop {
            args.push(self.expr()?);
            if self.eat(',') {
                continue;
            }
            if self.eat(')') {
                return Ok(Expr::Call { name, args });
            }
            return Err(self.error("`,` or `)`"));
        }
    }

    /// `["$"] letters ["$"] digits`, optionally followed by `:` and a second
    /// endpoint, which may repeat the same sheet prefix.
    fn reference(&mut self, sheet: Option<String>) -> Result<Expr, ParseError> {
        let start = self.coord()?;
        let mark = self.pos;
        self.skip_ws();
        if self.peek() != Some(':') {
            self.pos = mark;
            return Ok(Expr::Ref(CellRef { sheet, coord: start }));
        }
        self.pos += 1;
        self.skip_ws();
        let at_end = self.pos;
        let end_sheet = self.optional_sheet_prefix();
        if let Some(end_sheet) = end_sheet {
            if sheet.as_deref() != Some(end_sheet.as_str()) {
                return Err(ParseError { position: at_end, expected: "range endpoints on the same sheet".into() });
            }
        }
        let end = self.coord()?;
        Ok(Expr::Range(RangeRef { sheet, start, end }))
    }

    fn optional_sheet_prefix(&mut self) -> Option<String> {
        let start = self.pos;
        if !self.peek().is_some_and(is_ident_start) {
            return None;
        }
        while self.peek().is_some_and(is_ident_char) {
            self.pos += 1;
        }
        if self.peek() == Some('!') {
            let name = self.chars[start..self.pos].iter().collect();
            self.pos += 1;
            Some(name)
        } else {
            self.pos = start;
            None
        }
    }

    fn coord(&mut self) -> Result<RefCoord, ParseError> {
        let start = self.pos;
        let col_absolute = self.peek() == Some('$');
        if col_absolute {
            self.pos += 1;
        }
        let letters_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        let letters: String = self.chars[letters_start..self.pos].iter().collect();
        let row_absolute = self.peek() == Some('$');
        if row_absolute {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let digits: String = self.chars[digits_start..self.pos].iter().collect();
        if letters.is_empty() || digits.is_empty() || self.peek().is_some_and(is_ident_char) {
            return Err(ParseError { position: start, expected: "cell reference".into() });
        }
        let col = column_index(&letters);
        let row = digits.parse::<u32>().ok().filter(|r| (1..=MAX_ROWS).contains(r));
        match (col, row) {
            (Some(col), Some(row)) => Ok(RefCoord { col, row, col_absolute, row_absolute }),
            _ => Err(ParseError { position: start, expected: "reference inside grid bounds".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(col: u32, row: u32) -> Expr {
        Expr::Ref(CellRef { sheet: None, coord: RefCoord::relative(col, row) })
    }

    #[test]
    fn subtraction_of_two_refs() {
        assert_eq!(parse_formula("=B1-B2").unwrap(), Expr::binary(BinaryOp::Sub, r(2, 1), r(2, 2)));
    }

    #[test]
    fn literal() {
        assert_eq!(parse_formula("=3").unwrap(), Expr::Number(3.0));
        assert_eq!(parse_formula("= 2.5e2 ").unwrap(), Expr::Number(250.0));
    }

    #[test]
    fn mixed_absolute_product_chain() {
        let ast = parse_formula("=$E6 * F9 * A5 * C4").unwrap();
        let e6 = Expr::Ref(CellRef {
            sheet: None,
            coord: RefCoord { col: 5, row: 6, col_absolute: true, row_absolute: false },
        });
        let expected = Expr::binary(
            BinaryOp::Mul,
            Expr::binary(BinaryOp::Mul, Expr::binary(BinaryOp::Mul, e6, r(6, 9)), r(1, 5)),
            r(3, 4),
        );
        assert_eq!(ast, expected);
        assert_eq!(ast.to_source(), "=$E6*F9*A5*C4");
    }

    #[test]
    fn precedence() {
        // -2^2 squares the negated base; 2^3^2 is right associative.
        assert_eq!(
            parse_formula("=-2^2").unwrap(),
            Expr::binary(BinaryOp::Pow, Expr::Neg(Box::new(Expr::Number(2.0))), Expr::Number(2.0))
        );
        assert_eq!(
            parse_formula("=2^3^2").unwrap(),
            Expr::binary(
                BinaryOp::Pow,
                Expr::Number(2.0),
                Expr::binary(BinaryOp::Pow, Expr::Number(3.0), Expr::Number(2.0))
            )
        );
        assert_eq!(
            parse_formula("=-5%").unwrap(),
            Expr::Neg(Box::new(Expr::Percent(Box::new(Expr::Number(5.0)))))
        );
        assert_eq!(parse_formula("=1+2*3").unwrap().to_source(), "=1+2*3");
        assert_eq!(parse_formula("=(1+2)*3").unwrap().to_source(), "=(1+2)*3");
        assert_eq!(parse_formula("=1-(2-3)").unwrap().to_source(), "=1-(2-3)");
        assert_eq!(parse_formula("=2^-3").unwrap().to_source(), "=2^-3");
    }

    #[test]
    fn calls_ranges_and_sheets() {
        let ast = parse_formula("=sum(b5:B9, Data!a1:$C$3, 2)").unwrap();
        assert_eq!(ast.to_source(), "=SUM(B5:B9,Data!A1:$C$3,2)");
        let Expr::Call { name, args } = &ast else { panic!() };
        assert_eq!(name, "SUM");
        assert_eq!(args.len(), 3);
        assert_eq!(parse_formula("=NPV(0.1,A1:A3)").unwrap().to_source(), "=NPV(0.1,A1:A3)");
        assert_eq!(parse_formula("=PI()").unwrap().to_source(), "=PI()");
        assert_eq!(parse_formula("=S!A1:S!B2").unwrap().to_source(), "=S!A1:B2");
        assert_eq!(parse_formula("=LOG10(A1)").unwrap().to_source(), "=LOG10(A1)");
    }

    #[test]
    fn errors() {
        let cases = [
            ("B1", 0),
            ("=", 1),
            ("=B1-", 4),
            ("=(B1", 4),
            ("=B1 B2", 4),
            ("=--A1", 2),
            ("=SUM(A1;A2)", 7),
            ("=A0", 1),
            ("=XFE1", 1),
            ("=A1:B", 4),
            ("=S!A1:T!B2", 6),
            ("=A1B", 1),
            ("=#REF!", 1),
        ];
        for (src, pos) in cases {
            let err = parse_formula(src).unwrap_err();
            assert_eq!(err.position, pos, "{src}: {err}");
        }
    }
}
