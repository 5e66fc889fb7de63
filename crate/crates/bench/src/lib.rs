//! Shared inputs for the benchmarks.

use lightswitch_core::io::{random_board, random_cube};
use lightswitch_core::{SignCube, SignMatrix};

/// `count` seeded `m x n` boards.
pub fn boards(m: usize, n: usize, count: u64) -> Vec<SignMatrix> {
    (0..count).map(|s| random_board(m, n, s)).collect()
}

/// `count` seeded cubes of side 4.
pub fn cubes(count: u64) -> Vec<SignCube> {
    (0..count).map(|s| random_cube(4, s)).collect()
}
