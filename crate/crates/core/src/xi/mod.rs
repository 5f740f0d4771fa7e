//! Alternating-quantifier decision problems on `{0,1}` matrices: tuple
//! codecs, lazily queried oracles, bounded-quantifier cells and the nested
//! height-`m` tower.

mod codec;
mod instances;
mod oracle;
mod tower;

pub use codec::{Pairing, TupleCodec};
pub use instances::{delayed, threshold_random, witness_at, OracleSpec, ThresholdBase};
pub use oracle::{embed_thresholded, embed_universal, xi_exact, MatrixOracle, OracleKind, ThresholdTable};
pub use tower::{run_xi_tower, xi_tower_cell, CellTable, XiSchedule, XiTowerResult, XiTraceRow, MAX_XI_CELLS};
