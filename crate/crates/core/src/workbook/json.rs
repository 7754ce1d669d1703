//! JSON workbook format:
//! `{"sheets":[{"name":..,"cells":[{"ref":"A1","text":..} | {"ref":..,"value":n} | {"ref":..,"formula":"=..","value":n?}]}]}`

use serde::{Deserialize, Serialize};

use super::{CellAddress, CellContent, FormatError, Formula, Sheet, Workbook, WorkbookError};
use crate::formula::DEFAULT_RANGE_CAP;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkbookDoc {
    sheets: Vec<SheetDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetDoc {
    name: String,
    cells: Vec<CellRecord>,
}

/// One cell in wire form. `sheet` is only used where cells from several
/// sheets share one list (the service's cell listing).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellRecord {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sheet: Option<String>,
    #[serde(rename = "ref")]
    pub reference: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
}

impl CellRecord {
    pub fn from_content(reference: String, content: &CellContent) -> Self {
        let mut record = CellRecord { sheet: None, reference, text: None, formula: None, value: None };
        match content {
            CellContent::Text(t) => record.text = Some(t.clone()),
            CellContent::Number(n) => record.value = Some(*n),
            CellContent::Formula(f) => {
                record.formula = Some(f.source().to_string());
                record.value = f.stored();
            }
        }
        record
    }
}

pub fn load_json(text: &str) -> Result<Workbook, WorkbookError> {
    let doc: WorkbookDoc = serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        FormatError::at(line, e.column(), format!("invalid workbook JSON: {e}"))
    })?;
    let mut sheets = Vec::with_capacity(doc.sheets.len());
    for sheet_doc in doc.sheets {
        let mut sheet = Sheet::new(sheet_doc.name.as_str());
        for record in sheet_doc.cells {
            let addr = CellAddress::parse(&record.reference, &sheet_doc.name)?;
            if *addr.sheet != *sheet_doc.name {
                return Err(FormatError::bare(format!(
                    "cell `{}` does not belong to sheet `{}`",
                    record.reference, sheet_doc.name
                ))
                .into());
            }
            if record.sheet.is_some() {
                return Err(FormatError::bare("per-cell `sheet` is not allowed inside a sheet").into());
            }
            let content = match (&record.text, &record.formula, record.value) {
                (Some(text), None, None) => CellContent::Text(text.clone()),
                (None, None, Some(value)) => CellContent::Number(value),
                (None, Some(source), stored) => {
                    if !source.starts_with('=') {
                        return Err(FormatError {
                            cell: Some(addr.a1()),
                            ..FormatError::bare("formula must start with `=`")
                        }
                        .into());
                    }
                    let formula = Formula::new(source, stored, &addr, DEFAULT_RANGE_CAP)
                        .map_err(|e| e.into_format(None, None, &addr))?;
                    CellContent::Formula(formula)
                }
                _ => {
                    return Err(FormatError {
                        cell: Some(addr.a1()),
                        ..FormatError::bare("cell needs exactly one of `text`, `value`, or `formula` (+ optional `value`)")
                    }
                    .into())
                }
            };
            sheet.insert(content, addr.col, addr.row)?;
        }
        sheets.push(sheet);
    }
    Workbook::new(sheets)
}

/// Canonical JSON form: sheets in workbook order, cells in address order.
pub fn to_json(wb: &Workbook) -> String {
    let doc = WorkbookDoc {
        sheets: wb
            .sheets()
            .iter()
            .map(|sheet| SheetDoc {
                name: sheet.name().to_string(),
                cells: sheet.cells().map(|c| CellRecord::from_content(c.addr.a1(), &c.content)).collect(),
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("workbook serializes")
}

/// Every cell of every sheet, sheet-tagged, in address order.
pub fn cell_records(wb: &Workbook) -> Vec<CellRecord> {
    wb.cells()
        .map(|c| CellRecord { sheet: Some(c.addr.sheet.to_string()), ..CellRecord::from_content(c.addr.a1(), &c.content) })
        .collect()
}
