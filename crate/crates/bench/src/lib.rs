//! Workbooks for the benchmarks.

use std::fmt::Write;

use rand::rngs::StdRng;
use rand::SeedableRng;
use sheetlens::synth::{random_workbook, SynthConfig};
use sheetlens::workbook::{load_grid, Workbook};

/// A running ledger: `rows` rows of ten columns, each formula reading its
/// left neighbour and the cell above, with column totals underneath.
pub fn ledger(rows: u32) -> Workbook {
    let mut text = String::new();
    for r in 1..=rows {
        let _ = write!(text, "{}", r * 10);
        for c in ['B', 'C', 'D', 'E', 'F', 'G', 'H', 'I', 'J'] {
            let left = (c as u8 - 1) as char;
            if r == 1 {
                let _ = write!(text, ",={left}{r}*2");
            } else {
                let _ = write!(text, ",={left}{r}+{c}{}", r - 1);
            }
        }
        text.push('\n');
    }
    let totals: Vec<String> = ('A'..='J').map(|c| format!("=SUM({c}1:{c}{rows})")).collect();
    text.push_str(&totals.join(","));
    load_grid(&text).expect("ledger grid")
}

/// A scattered acyclic workbook of up to `cells` cells.
pub fn scattered(cells: usize, seed: u64) -> Workbook {
    let side = (cells as f64).sqrt().ceil() as u32 * 2;
    let config = SynthConfig { max_cells: cells, max_edges: cells * 3, rows: side, cols: side };
    random_workbook(&mut StdRng::seed_from_u64(seed), &config)
}
