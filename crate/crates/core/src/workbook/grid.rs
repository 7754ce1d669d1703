//! Comma-separated grid format.
//!
//! One line per row, RFC-4180 quoting, `## sheet:NAME` starts a new sheet.
//! A field beginning with `=` is a formula, a field that reads as a number
//! is a number, anything else is text. A leading `'` forces text and is
//! dropped, which lets the writer round-trip text such as `'42`.

use std::fmt::Write as _;

use super::{
    parse_number, CellAddress, CellContent, FormatError, Formula, Sheet, Workbook, WorkbookError, DEFAULT_SHEET, MAX_COLS,
    MAX_ROWS,
};
use crate::formula::DEFAULT_RANGE_CAP;

const DIRECTIVE: &str = "## sheet:";

enum Record {
    Directive { name: String, line: usize },
    Fields { fields: Vec<Field>, line: usize },
}

struct Field {
    text: String,
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Reader<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
        }
        Some(c)
    }

    /// Consumes `\n`, `\r\n` or a lone `\r`. Returns false at end of input.
    fn eat_line_end(&mut self) -> bool {
        match self.peek() {
            Some('\n') => {
                self.bump();
                true
            }
            Some('\r') => {
                self.bump();
                if self.peek() == Some('\n') {
                    self.bump();
                } else {
                    self.line += 1;
                }
                true
            }
            _ => false,
        }
    }

    fn next_record(&mut self) -> Result<Option<Record>, FormatError> {
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let line = self.line;
        if self.src[self.pos..].starts_with(DIRECTIVE) {
            let rest = &self.src[self.pos + DIRECTIVE.len()..];
            let end = rest.find(['\n', '\r']).unwrap_or(rest.len());
            let name = rest[..end].trim().to_string();
            self.pos += DIRECTIVE.len() + end;
            self.eat_line_end();
            if name.is_empty() {
                return Err(FormatError::at(line, 1, "sheet directive without a name"));
            }
            return Ok(Some(Record::Directive { name, line }));
        }

        let mut fields = Vec::new();
        loop {
            let field_no = fields.len() + 1;
            let field = if self.peek() == Some('"') {
                self.quoted_field(field_no)?
            } else {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if matches!(c, ',' | '\n' | '\r') {
                        break;
                    }
                    self.bump();
                }
                Field { text: self.src[start..self.pos].to_string() }
            };
            fields.push(field);
            if self.peek() == Some(',') {
                self.bump();
                continue;
            }
            self.eat_line_end();
            break;
        }
        Ok(Some(Record::Fields { fields, line }))
    }

    fn quoted_field(&mut self, field_no: usize) -> Result<Field, FormatError> {
        let open_line = self.line;
        self.bump();
        let mut text = String::new();
        loop {
            match self.bump() {
                None => return Err(FormatError::at(open_line, field_no, "unbalanced quote")),
                Some('"') if self.peek() == Some('"') => {
                    self.bump();
                    text.push('"');
                }
                Some('"') => break,
                Some(c) => text.push(c),
            }
        }
        match self.peek() {
            None | Some(',' | '\n' | '\r') => Ok(Field { text }),
            Some(c) => Err(FormatError::at(self.line, field_no, format!("unexpected `{c}` after closing quote"))),
        }
    }
}

/// Reads a grid document. Rows and columns follow line and field position;
/// every non-empty field becomes one cell.
pub fn load_grid(text: &str) -> Result<Workbook, WorkbookError> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    let mut reader = Reader { src: text, pos: 0, line: 1 };
    let mut sheets = vec![Sheet::new(DEFAULT_SHEET)];
    // The implicit first sheet is renamed by a directive that precedes any row.
    let mut renameable = true;
    let mut row: u32 = 0;

    while let Some(record) = reader.next_record()? {
        match record {
            Record::Directive { name, line } => {
                if renameable && row == 0 {
                    sheets[0] = Sheet::new(name);
                } else if sheets.iter().any(|s| s.name() == name) {
                    return Err(FormatError::at(line, 1, format!("duplicate sheet name `{name}`")).into());
                } else {
                    sheets.push(Sheet::new(name));
                }
                renameable = false;
                row = 0;
            }
            Record::Fields { fields, line } => {
                row += 1;
                let sheet = sheets.last_mut().expect("at least one sheet");
                for (i, field) in fields.into_iter().enumerate() {
                    let col = i + 1;
                    if field_is_blank(&field) {
                        continue;
                    }
                    if col > MAX_COLS as usize || row > MAX_ROWS {
                        return Err(FormatError::at(line, col, "cell lies outside the grid bounds").into());
                    }
                    let content = field_content(&field, line, col as u32, sheet.name(), row)?;
                    sheet.insert(content, col as u32, row)?;
                }
            }
        }
    }
    Workbook::new(sheets)
}

fn field_is_blank(field: &Field) -> bool {
    !field.text.starts_with('\'') && field.text.trim().is_empty()
}

fn field_content(field: &Field, line: usize, col: u32, sheet: &str, row: u32) -> Result<CellContent, FormatError> {
    if let Some(text) = field.text.strip_prefix('\'') {
        return Ok(CellContent::Text(text.to_string()));
    }
    let trimmed = field.text.trim();
    if trimmed.starts_with('=') {
        let host = CellAddress::new(sheet, col, row);
        let formula = Formula::new(trimmed, None, &host, DEFAULT_RANGE_CAP)
            .map_err(|e| e.into_format(Some(line), Some(col as usize), &host))?;
        return Ok(CellContent::Formula(formula));
    }
    Ok(match parse_number(trimmed) {
        Some(n) => CellContent::Number(n),
        None => CellContent::Text(field.text.clone()),
    })
}

/// Writes a workbook in grid form. Stored formula values are not part of
/// the grid format and are dropped.
pub fn to_grid(wb: &Workbook) -> String {
    let mut out = String::new();
    for (i, sheet) in wb.sheets().iter().enumerate() {
        if i > 0 || sheet.name() != DEFAULT_SHEET || wb.sheets().len() > 1 {
            let _ = writeln!(out, "{DIRECTIVE}{}", sheet.name());
        }
        let Some(used) = sheet.used_region() else { continue };
        let mut cells = sheet.cells().peekable();
        for row in 1..=used.bottom_right().row {
            let mut line = Vec::new();
            while let Some(cell) = cells.next_if(|c| c.addr.row == row) {
                while line.len() + 1 < cell.addr.col as usize {
                    line.push(String::new());
                }
                line.push(render_field(&cell.content, cell.addr.col == 1));
            }
            out.push_str(&line.join(","));
            out.push('\n');
        }
    }
    out
}

fn render_field(content: &CellContent, first_col: bool) -> String {
    let raw = match content {
        CellContent::Number(n) => return format!("{n}"),
        CellContent::Formula(f) => f.source().to_string(),
        CellContent::Text(t) => {
            let trimmed = t.trim();
            let ambiguous = trimmed.is_empty()
                || t.starts_with('\'')
                || trimmed.starts_with('=')
                || parse_number(trimmed).is_some()
                || (first_col && t.starts_with(DIRECTIVE));
            if ambiguous {
                format!("'{t}")
            } else {
                t.clone()
            }
        }
    };
    if raw.contains([',', '"', '\n', '\r']) || raw.starts_with('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}
