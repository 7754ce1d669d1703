use std::fmt;
use std::sync::Arc;

use super::FormatError;

/// Largest column index accepted anywhere (column `XFD`).
pub const MAX_COLS: u32 = 16_384;
/// Largest row index accepted anywhere.
pub const MAX_ROWS: u32 = 1_048_576;

/// A sheet-qualified cell coordinate. Columns and rows are 1-based.
///
/// Ordering is `(sheet, row, col)`, which is the order every analysis uses
/// when it lists cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellAddress {
    pub sheet: Arc<str>,
    pub row: u32,
    pub col: u32,
}

impl CellAddress {
    /// Panics if `col` or `row` is outside the grid bounds; use
    /// [`CellAddress::checked`] for untrusted input.
    pub fn new(sheet: impl Into<Arc<str>>, col: u32, row: u32) -> Self {
        Self::checked(sheet, col, row).expect("cell coordinate out of bounds")
    }

    pub fn checked(sheet: impl Into<Arc<str>>, col: u32, row: u32) -> Option<Self> {
        if (1..=MAX_COLS).contains(&col) && (1..=MAX_ROWS).contains(&row) {
            Some(CellAddress { sheet: sheet.into(), row, col })
        } else {
            None
        }
    }

    /// Parses `B3`, `$B$3` or `Sheet2!B3`. Dollar markers are accepted and
    /// dropped; column letters are case-insensitive.
    pub fn parse(text: &str, default_sheet: &str) -> Result<Self, FormatError> {
        let text = text.trim();
        let (sheet, local) = match text.rsplit_once('!') {
            Some((sheet, local)) if !sheet.is_empty() => (sheet, local),
            Some(_) => return Err(FormatError::bare(format!("missing sheet name in `{text}`"))),
            None => (default_sheet, text),
        };
        let (col, row) = parse_a1(local)
            .ok_or_else(|| FormatError::bare(format!("malformed cell reference `{text}`")))?;
        CellAddress::checked(sheet, col, row)
            .ok_or_else(|| FormatError::bare(format!("cell reference `{text}` outside grid bounds")))
    }

    /// `B3`, without sheet.
    pub fn a1(&self) -> String {
        format!("{}{}", column_name(self.col), self.row)
    }

    /// `B3` when on `default_sheet`, `Other!B3` otherwise.
    pub fn display_in(&self, default_sheet: &str) -> String {
        if &*self.sheet == default_sheet {
            self.a1()
        } else {
            format!("{}!{}", self.sheet, self.a1())
        }
    }

    pub fn offset(&self, d_col: i64, d_row: i64) -> Option<Self> {
        let col = u32::try_from(self.col as i64 + d_col).ok()?;
        let row = u32::try_from(self.row as i64 + d_row).ok()?;
        CellAddress::checked(self.sheet.clone(), col, row)
    }

    pub fn with_sheet(&self, sheet: impl Into<Arc<str>>) -> Self {
        CellAddress { sheet: sheet.into(), row: self.row, col: self.col }
    }
}

impl fmt::Display for CellAddress {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}", self.sheet, self.a1())
    }
}

/// Column index to letters: 1 -> A, 27 -> AA.
pub fn column_name(mut col: u32) -> String {
    let mut out = Vec::new();
    while col > 0 {
        let rem = (col - 1) % 26;
        out.push(b'A' + rem as u8);
        col = (col - 1) / 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

/// Letters to column index, case-insensitive. `None` for empty or
/// non-alphabetic input, or overflow past [`MAX_COLS`].
pub fn column_index(letters: &str) -> Option<u32> {
    if letters.is_empty() || letters.len() > 3 {
        return None;
    }
    let mut col = 0u32;
    for b in letters.bytes() {
        if !b.is_ascii_alphabetic() {
            return None;
        }
        col = col * 26 + u32::from(b.to_ascii_uppercase() - b'A' + 1);
    }
    (col <= MAX_COLS).then_some(col)
}

/// Splits `$B$12` style text into `(col, row)`, ignoring `$` markers.
fn parse_a1(text: &str) -> Option<(u32, u32)> {
    let text = text.strip_prefix('$').unwrap_or(text);
    let split = text.find(|c: char| !c.is_ascii_alphabetic())?;
    let (letters, rest) = text.split_at(split);
    let digits = rest.strip_prefix('$').unwrap_or(rest);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.len() > 7 {
        return None;
    }
    let row: u32 = digits.parse().ok()?;
    Some((column_index(letters)?, row))
}

/// Rectangular selection on one sheet, corners normalized so that
/// `top_left` is not right of or below `bottom_right`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    top_left: CellAddress,
    bottom_right: CellAddress,
}

impl Region {
    /// Builds the bounding rectangle of two corners on the same sheet.
    pub fn new(a: CellAddress, b: CellAddress) -> Result<Self, FormatError> {
        if a.sheet != b.sheet {
            return Err(FormatError::bare(format!(
                "region corners on different sheets ({} and {})",
                a.sheet, b.sheet
            )));
        }
        let top_left = CellAddress { sheet: a.sheet.clone(), row: a.row.min(b.row), col: a.col.min(b.col) };
        let bottom_right = CellAddress { sheet: a.sheet, row: a.row.max(b.row), col: a.col.max(b.col) };
        Ok(Region { top_left, bottom_right })
    }

    pub fn single(addr: CellAddress) -> Self {
        Region { top_left: addr.clone(), bottom_right: addr }
    }

    pub fn top_left(&self) -> &CellAddress {
        &self.top_left
    }

    pub fn bottom_right(&self) -> &CellAddress {
        &self.bottom_right
    }

    pub fn sheet(&self) -> &str {
        &self.top_left.sheet
    }

    pub fn width(&self) -> u32 {
        self.bottom_right.col - self.top_left.col + 1
    }

    pub fn height(&self) -> u32 {
        self.bottom_right.row - self.top_left.row + 1
    }

    pub fn cell_count(&self) -> u64 {
        u64::from(self.width()) * u64::from(self.height())
    }

    pub fn contains(&self, addr: &CellAddress) -> bool {
        *addr.sheet == *self.top_left.sheet
            && (self.top_left.row..=self.bottom_right.row).contains(&addr.row)
            && (self.top_left.col..=self.bottom_right.col).contains(&addr.col)
    }

    /// All coordinates in the rectangle, in address order.
    pub fn cells(&self) -> impl Iterator<Item = CellAddress> + '_ {
        let sheet = self.top_left.sheet.clone();
        (self.top_left.row..=self.bottom_right.row).flat_map(move |row| {
            let sheet = sheet.clone();
            (self.top_left.col..=self.bottom_right.col)
                .map(move |col| CellAddress { sheet: sheet.clone(), row, col })
        })
    }

    /// Smallest region covering all `cells`; `None` for an empty iterator or
    /// cells spread over several sheets.
    pub fn bounding<'a>(cells: impl IntoIterator<Item = &'a CellAddress>) -> Option<Self> {
        let mut iter = cells.into_iter();
        let first = iter.next()?;
        let (mut r0, mut c0, mut r1, mut c1) = (first.row, first.col, first.row, first.col);
        for addr in iter {
            if addr.sheet != first.sheet {
                return None;
            }
            r0 = r0.min(addr.row);
            c0 = c0.min(addr.col);
            r1 = r1.max(addr.row);
            c1 = c1.max(addr.col);
        }
        Some(Region {
            top_left: CellAddress { sheet: first.sheet.clone(), row: r0, col: c0 },
            bottom_right: CellAddress { sheet: first.sheet.clone(), row: r1, col: c1 },
        })
    }

    /// `B20:G20`, or `B3` for a single cell; sheet prefix only when the
    /// region is not on `default_sheet`.
    pub fn display_in(&self, default_sheet: &str) -> String {
        let prefix = if self.sheet() == default_sheet { String::new() } else { format!("{}!", self.sheet()) };
        if self.top_left == self.bottom_right {
            format!("{prefix}{}", self.top_left.a1())
        } else {
            format!("{prefix}{}:{}", self.top_left.a1(), self.bottom_right.a1())
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}!{}:{}", self.sheet(), self.top_left.a1(), self.bottom_right.a1())
    }
}

/// Parses `B20:G20`, `G20:B20` (normalized), a single `B3`, or any of these
/// with a `Sheet!` prefix.
pub fn parse_region(text: &str, default_sheet: &str) -> Result<Region, FormatError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(FormatError::bare("empty region"));
    }
    match text.split_once(':') {
        None => Ok(Region::single(CellAddress::parse(text, default_sheet)?)),
        Some((start, end)) => {
            let start = CellAddress::parse(start, default_sheet)?;
            // The end corner inherits the start corner's sheet.
            let end = CellAddress::parse(end, &start.sheet)?;
            Region::new(start, end)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn column_letters() {
        assert_eq!(column_name(1), "A");
        assert_eq!(column_name(26), "Z");
        assert_eq!(column_name(27), "AA");
        assert_eq!(column_name(MAX_COLS), "XFD");
        assert_eq!(column_index("xfd"), Some(MAX_COLS));
        assert_eq!(column_index("XFE"), None);
        assert_eq!(column_index("A1"), None);
    }

    #[test]
    fn parse_addresses() {
        let a = CellAddress::parse("b3", "S").unwrap();
        assert_eq!((a.col, a.row, &*a.sheet), (2, 3, "S"));
        assert_eq!(CellAddress::parse("$B$3", "S").unwrap(), a);
        let other = CellAddress::parse("Data!AA10", "S").unwrap();
        assert_eq!((&*other.sheet, other.col), ("Data", 27));
        assert!(CellAddress::parse("B0", "S").is_err());
        assert!(CellAddress::parse("3B", "S").is_err());
        assert!(CellAddress::parse("A1048577", "S").is_err());
        assert!(CellAddress::parse("!A1", "S").is_err());
    }

    #[test]
    fn region_examples() {
        let r = parse_region("B20:G20", "S").unwrap();
        assert_eq!(r.top_left().a1(), "B20");
        assert_eq!(r.bottom_right().a1(), "G20");
        assert_eq!(r.width(), 6);

        let single = parse_region("B3", "S").unwrap();
        assert_eq!(single.top_left(), single.bottom_right());
        assert_eq!(single.cell_count(), 1);

        assert_eq!(parse_region("G20:B20", "S").unwrap(), r);
        assert_eq!(parse_region("G21:B20", "S").unwrap().display_in("S"), "B20:G21");
        assert_eq!(parse_region("X!A1:B2", "S").unwrap().display_in("S"), "X!A1:B2");
    }

    #[test]
    fn malformed_regions() {
        for bad in ["", ":", "A1:", "A1:B", "A1:Other!B2", "hello", "A1:B2:C3"] {
            assert!(parse_region(bad, "S").is_err(), "{bad} should fail");
        }
    }

    #[test]
    fn region_membership_and_iteration() {
        let r = parse_region("B2:C3", "S").unwrap();
        let cells: Vec<String> = r.cells().map(|c| c.a1()).collect();
        assert_eq!(cells, ["B2", "C2", "B3", "C3"]);
        assert!(r.contains(&CellAddress::new("S", 3, 3)));
        assert!(!r.contains(&CellAddress::new("T", 3, 3)));
        assert!(!r.contains(&CellAddress::new("S", 4, 3)));
    }

    #[test]
    fn address_order_is_sheet_row_col() {
        let mut v = [
            CellAddress::new("S", 1, 2),
            CellAddress::new("S", 2, 1),
            CellAddress::new("R", 5, 5),
        ];
        v.sort();
        let text: Vec<String> = v.iter().map(|a| a.to_string()).collect();
        assert_eq!(text, ["R!E5", "S!B1", "S!A2"]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn a1_round_trip(col in 1..=MAX_COLS, row in 1..=MAX_ROWS, lower in any::<bool>()) {
                let addr = CellAddress::new("Sheet1", col, row);
                let text = if lower { addr.a1().to_lowercase() } else { addr.a1() };
                prop_assert_eq!(CellAddress::parse(&text, "Sheet1").unwrap(), addr);
            }
        }
    }
}
