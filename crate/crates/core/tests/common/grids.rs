//! The three published intercoder grids (15 items, 4 coders, `-` = missing).

use epiaudit::agreement::LabelMatrix;
use epiaudit::pipeline::labels::load_matrix;

/// Printed alpha per grid.
pub const PRINTED: [f64; 3] = [0.982, 0.904, 0.959];

/// Frozen from an independent coincidence-matrix script (Python, textbook
/// formulas) run over the same grid files.
pub const ORACLE_NOMINAL: [f64; 3] = [0.9577874818049491, 0.9226078799249531, 0.9531880548829701];
pub const ORACLE_INTERVAL: [f64; 3] = [0.9847689075630252, 0.9010044707658363, 0.9607445008460237];

pub fn grid(i: usize) -> LabelMatrix {
    load_matrix(&super::fixtures().join(format!("agreement/grid{i}.csv"))).expect("grid fixture")
}

pub fn grids() -> [LabelMatrix; 3] {
    [grid(1), grid(2), grid(3)]
}
