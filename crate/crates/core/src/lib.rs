//! Balancing Gale-Berlekamp light boards and cubes.
//!
//! * [`rect`]: row/column switches bringing any `m x n` board with `n` even
//!   and `m ≤ n` to imbalance 0 or 2, built from an exact null-space
//!   rounding step ([`linalg`]), a one-column repair and a greedy sign pass.
//! * [`cube`]: plane switches on `2 x 2 x 2` and `4 x 4 x 4` cubes, the
//!   mod-4/mod-8 invariants behind their lower bounds, and a solver that
//!   always reaches imbalance at most 4.
//! * [`oracle`]: exhaustive minimum-imbalance search used to check both.
//! * [`io`]: text formats, the JSON result document and seeded generators.

pub mod cube;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod packed;
pub mod rect;

pub use error::{Error, Result};
pub use model::{
    apply_plane_switches, imbalance_cube, imbalance_rect, Axis, BalanceOutcome, PlaneSwitch,
    PlaneSwitches, SignCube, SignMatrix, SwitchPair,
};
pub use oracle::{cube_min_imbalance, rect_min_imbalance, OracleResult};
pub use rect::balance;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
