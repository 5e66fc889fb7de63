//! Exhaustive minimum-imbalance search, the ground truth every constructive
//! routine is checked against.
//!
//! Both searches fix one switch to "not pressed": negating every switch of
//! one family negates the signed total, so this loses nothing. Ties are
//! broken by the smallest assignment mask, which keeps results independent
//! of how the range is split between workers.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{PlaneSwitches, SignCube, SignMatrix, SwitchPair};
use crate::packed::{PackedCube, PlaneMasks};

/// Default bound on `m + n - 1`, the number of free switches of a board.
pub const DEFAULT_RECT_CAP: usize = 28;

/// Assignments per worker chunk in the board search.
const CHUNK_BITS: u32 = 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub minimum: u64,
    pub witness: W,
    pub states_examined: u64,
}

/// Incremental state of a Gray-code walk over board switch assignments.
///
/// Assignment bit `j < n` presses column `j`; bit `n + t` presses row `t + 1`.
/// Row 0 is never pressed.
struct RectWalk<'a> {
    a: &'a SignMatrix,
    x: Vec<i64>,
    y: Vec<i64>,
    /// `Σ_j a_ij x_j`
    rows: Vec<i64>,
    /// `Σ_i y_i a_ij`
    cols: Vec<i64>,
    sum: i64,
}

impl<'a> RectWalk<'a> {
    fn at(a: &'a SignMatrix, assignment: u64) -> Self {
        let (m, n) = (a.rows(), a.cols());
        let sign = |bit: usize| if assignment >> bit & 1 == 1 { -1 } else { 1 };
        let x: Vec<i64> = (0..n).map(sign).collect();
        let y: Vec<i64> = (0..m)
            .map(|i| if i == 0 { 1 } else { sign(n + i - 1) })
            .collect();
        let rows: Vec<i64> = (0..m)
            .map(|i| (0..n).map(|j| i64::from(a.get(i, j)) * x[j]).sum())
            .collect();
        let cols: Vec<i64> = (0..n)
            .map(|j| (0..m).map(|i| i64::from(a.get(i, j)) * y[i]).sum())
            .collect();
        let sum = rows.iter().zip(&y).map(|(r, y)| r * y).sum();
        RectWalk {
            a,
            x,
            y,
            rows,
            cols,
            sum,
        }
    }

    #[inline]
    fn press(&mut self, bit: usize) {
        let n = self.a.cols();
        if bit < n {
            let j = bit;
            self.sum -= 2 * self.x[j] * self.cols[j];
            for (i, r) in self.rows.iter_mut().enumerate() {
                *r -= 2 * i64::from(self.a.get(i, j)) * self.x[j];
            }
            self.x[j] = -self.x[j];
        } else {
            let i = bit - n + 1;
            self.sum -= 2 * self.y[i] * self.rows[i];
            for (j, c) in self.cols.iter_mut().enumerate() {
                *c -= 2 * i64::from(self.a.get(i, j)) * self.y[i];
            }
            self.y[i] = -self.y[i];
        }
    }
}

#[inline]
fn gray(t: u64) -> u64 {
    t ^ (t >> 1)
}

/// Walks Gray-code steps `start..end`, reporting `(assignment, signed sum)`.
pub(crate) fn walk_rect(a: &SignMatrix, start: u64, end: u64, mut visit: impl FnMut(u64, i64)) {
    if start >= end {
        return;
    }
    let mut walk = RectWalk::at(a, gray(start));
    visit(gray(start), walk.sum);
    for t in start + 1..end {
        walk.press(t.trailing_zeros() as usize);
        visit(gray(t), walk.sum);
    }
}

fn switch_pair_of(a: &SignMatrix, assignment: u64) -> SwitchPair {
    let n = a.cols();
    let sign = |bit: usize| if assignment >> bit & 1 == 1 { -1 } else { 1 };
    let x = (0..n).map(sign).collect();
    let y = (0..a.rows())
        .map(|i| if i == 0 { 1 } else { sign(n + i - 1) })
        .collect();
    SwitchPair::new(x, y).expect("signs")
}

pub fn rect_min_imbalance(a: &SignMatrix) -> Result<OracleResult<SwitchPair>> {
    rect_min_imbalance_with_cap(a, DEFAULT_RECT_CAP)
}

/// Minimum of `|Σ y_i a_ij x_j|` over all switch assignments, with `m + n - 1 ≤ cap`.
pub fn rect_min_imbalance_with_cap(a: &SignMatrix, cap: usize) -> Result<OracleResult<SwitchPair>> {
    let free = a.rows() + a.cols() - 1;
    if free > cap || free > 62 {
        return Err(Error::Resource {
            what: format!(
                "exhaustive search over a {}x{} board (free switches)",
                a.rows(),
                a.cols()
            ),
            required: free as u64,
            cap: cap.min(62) as u64,
        });
    }
    let total = 1u64 << free;
    let chunk = 1u64 << CHUNK_BITS.min(free as u32);
    let best = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut best = (u64::MAX, u64::MAX);
            walk_rect(a, c * chunk, (c + 1) * chunk, |mask, sum| {
                let cand = (sum.unsigned_abs(), mask);
                if cand < best {
                    best = cand;
                }
            });
            best
        })
        .min()
        .expect("at least one chunk");
    Ok(OracleResult {
        minimum: best.0,
        witness: switch_pair_of(a, best.1),
        states_examined: total,
    })
}

/// Smallest `|total|` over plane switch assignments with `x_0` unpressed,
/// as `(minimum, assignment)`.
pub(crate) fn packed_min(p: PackedCube, masks: &PlaneMasks) -> (u64, u32) {
    let n = masks.side();
    let xy: Vec<u64> = (0..1u32 << (2 * n)).map(|a| masks.switch_mask(a)).collect();
    let z: Vec<u64> = (0..1u32 << n)
        .map(|a| masks.switch_mask(a << (2 * n)))
        .collect();
    let mut best = (u64::MAX, u32::MAX);
    for (zi, &zm) in z.iter().enumerate() {
        for (xyi, &xym) in xy.iter().enumerate().step_by(2) {
            let v = p.flipped(xym ^ zm).signed_total().unsigned_abs();
            let assignment = (zi << (2 * n) | xyi) as u32;
            if (v, assignment) < best {
                best = (v, assignment);
            }
        }
    }
    best
}

/// Minimum imbalance of a cube of side 2 or 4 over all plane switches.
pub fn cube_min_imbalance(c: &SignCube) -> Result<OracleResult<PlaneSwitches>> {
    let masks = PlaneMasks::new(c.side())?;
    let p = PackedCube::from_cube(c)?;
    let (minimum, assignment) = packed_min(p, &masks);
    Ok(OracleResult {
        minimum,
        witness: masks.switches_of(assignment),
        states_examined: 1 << (3 * c.side() - 1),
    })
}
