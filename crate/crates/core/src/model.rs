//! Boards, cubes, switch assignments and the imbalance functional.
//!
//! Every light is stored as a sign: `+1` for on, `-1` for off. A switch is a
//! `±1` multiplier on a whole line (2D) or plane (3D); only its net parity
//! matters, so pressing a switch twice is the identity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) fn check_signs(values: &[i8], what: &str) -> Result<()> {
    match values.iter().position(|&v| v != 1 && v != -1) {
        Some(p) => Err(Error::Domain(format!(
            "{what}[{p}] = {} is not a sign (expected -1 or +1)",
            values[p]
        ))),
        None => Ok(()),
    }
}

/// An `m x n` board of `±1` lights, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i8>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape(format!(
                "board must be non-empty, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} board needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        check_signs(&entries, "entry")?;
        Ok(SignMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn from_rows<R: AsRef<[i8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::Shape(format!("row {bad} is ragged")));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        SignMatrix::new(rows.len(), cols, entries)
    }

    /// Board with every light on.
    pub fn all_on(rows: usize, cols: usize) -> Result<Self> {
        SignMatrix::new(rows, cols, vec![1; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// Row sums of `A·x` for a column sign vector `x`.
    pub fn row_sums(&self, x: &[i8]) -> Vec<i64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .map(|(&a, &s)| i64::from(a * s))
                    .sum()
            })
            .collect()
    }

    pub fn transpose(&self) -> SignMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j));
            }
        }
        SignMatrix {
            rows: self.cols,
            cols: self.rows,
            entries,
        }
    }

    /// The board as it looks after pressing the switches in `s`.
    pub fn switched(&self, s: &SwitchPair) -> Result<SignMatrix> {
        self.check_switches(s)?;
        let mut out = self.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.entries[i * self.cols + j] *= s.y[i] * s.x[j];
            }
        }
        Ok(out)
    }

    fn check_switches(&self, s: &SwitchPair) -> Result<()> {
        if s.x.len() != self.cols || s.y.len() != self.rows {
            return Err(Error::Shape(format!(
                "switches (x: {}, y: {}) do not fit a {}x{} board",
                s.x.len(),
                s.y.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(())
    }
}

/// Column switches `x` (length `n`) and row switches `y` (length `m`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SwitchPair {
    x: Vec<i8>,
    y: Vec<i8>,
}

impl SwitchPair {
    pub fn new(x: Vec<i8>, y: Vec<i8>) -> Result<Self> {
        check_signs(&x, "x")?;
        check_signs(&y, "y")?;
        Ok(SwitchPair { x, y })
    }

    /// No switch pressed.
    pub fn identity(rows: usize, cols: usize) -> Self {
        SwitchPair {
            x: vec![1; cols],
            y: vec![1; rows],
        }
    }

    pub fn x(&self) -> &[i8] {
        &self.x
    }

    pub fn y(&self) -> &[i8] {
        &self.y
    }
}

/// Signed imbalance `Σ y_i a_ij x_j`. The imbalance proper is its absolute value.
pub fn imbalance_rect(a: &SignMatrix, s: &SwitchPair) -> Result<i64> {
    a.check_switches(s)?;
    Ok(a.row_sums(&s.x)
        .iter()
        .zip(&s.y)
        .map(|(&r, &y)| r * i64::from(y))
        .sum())
}

/// An `n x n x n` cube of `±1` lights indexed by `(i, j, k)`.
///
/// Entry `(i, j, k)` lives at `(i * n + j) * n + k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignCube {
    side: usize,
    entries: Vec<i8>,
}

impl SignCube {
    pub fn new(side: usize, entries: Vec<i8>) -> Result<Self> {
        if side == 0 {
            return Err(Error::Shape("cube side must be positive".into()));
        }
        if entries.len() != side * side * side {
            return Err(Error::Shape(format!(
                "cube of side {side} needs {} entries, got {}",
                side * side * side,
                entries.len()
            )));
        }
        check_signs(&entries, "entry")?;
        Ok(SignCube { side, entries })
    }

    pub fn all_on(side: usize) -> Result<Self> {
        SignCube::new(side, vec![1; side * side * side])
    }

    /// Builds a cube from a closure over `(i, j, k)`.
    pub fn from_fn(side: usize, mut f: impl FnMut(usize, usize, usize) -> i8) -> Result<Self> {
        let mut entries = Vec::with_capacity(side * side * side);
        for i in 0..side {
            for j in 0..side {
                for k in 0..side {
                    entries.push(f(i, j, k));
                }
            }
        }
        SignCube::new(side, entries)
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn entries(&self) -> &[i8] {
        &self.entries
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.side + j) * self.side + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> i8 {
        self.entries[self.index(i, j, k)]
    }

    /// Returns a copy with the light at `(i, j, k)` toggled.
    pub fn toggled(&self, i: usize, j: usize, k: usize) -> SignCube {
        let mut out = self.clone();
        let idx = self.index(i, j, k);
        out.entries[idx] = -out.entries[idx];
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// One press of a single plane switch: `x_i`, `y_j` or `z_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlaneSwitch {
    pub axis: Axis,
    pub index: usize,
}

impl PlaneSwitch {
    pub fn new(axis: Axis, index: usize) -> Self {
        PlaneSwitch { axis, index }
    }
}

/// The three families of plane switches of a cube.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlaneSwitches {
    sx: Vec<i8>,
    sy: Vec<i8>,
    sz: Vec<i8>,
}

impl PlaneSwitches {
    pub fn new(sx: Vec<i8>, sy: Vec<i8>, sz: Vec<i8>) -> Result<Self> {
        if sx.len() != sy.len() || sy.len() != sz.len() {
            return Err(Error::Shape(format!(
                "plane switch families have lengths {}, {}, {}",
                sx.len(),
                sy.len(),
                sz.len()
            )));
        }
        check_signs(&sx, "sx")?;
        check_signs(&sy, "sy")?;
        check_signs(&sz, "sz")?;
        Ok(PlaneSwitches { sx, sy, sz })
    }

    pub fn identity(side: usize) -> Self {
        PlaneSwitches {
            sx: vec![1; side],
            sy: vec![1; side],
            sz: vec![1; side],
        }
    }

    pub fn side(&self) -> usize {
        self.sx.len()
    }

    pub fn sx(&self) -> &[i8] {
        &self.sx
    }

    pub fn sy(&self) -> &[i8] {
        &self.sy
    }

    pub fn sz(&self) -> &[i8] {
        &self.sz
    }
}

pub fn apply_plane_switches(c: &SignCube, s: &PlaneSwitches) -> Result<SignCube> {
    if s.side() != c.side {
        return Err(Error::Shape(format!(
            "switches for side {} applied to cube of side {}",
            s.side(),
            c.side
        )));
    }
    SignCube::from_fn(c.side, |i, j, k| {
        s.sx[i] * s.sy[j] * s.sz[k] * c.get(i, j, k)
    })
}

/// `(S, |S|)` where `S` is the sum of all entries.
pub fn imbalance_cube(c: &SignCube) -> (i64, u64) {
    let s: i64 = c.entries.iter().map(|&v| i64::from(v)).sum();
    (s, s.unsigned_abs())
}

/// Result of balancing a board.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceOutcome {
    pub switches: SwitchPair,
    pub signed_sum: i64,
    pub imbalance: u64,
}
