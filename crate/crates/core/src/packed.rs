//! Bit-packed cubes for the exhaustive sweeps.
//!
//! A cube of side 2 or 4 fits in one `u64`: bit `(i * n + j) * n + k` is set
//! when the light at `(i, j, k)` is on. Plane switches become XOR masks and
//! the signed total is `2·popcount − n³`.

use crate::error::{Error, Result};
use crate::model::{Axis, PlaneSwitches, SignCube};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PackedCube {
    side: usize,
    bits: u64,
}

fn check_side(side: usize) -> Result<()> {
    match side {
        2 | 4 => Ok(()),
        _ => Err(Error::Shape(format!(
            "packed cubes have side 2 or 4, got {side}"
        ))),
    }
}

fn volume_mask(side: usize) -> u64 {
    match side * side * side {
        64 => u64::MAX,
        v => (1u64 << v) - 1,
    }
}

impl PackedCube {
    pub fn from_bits(side: usize, bits: u64) -> Result<Self> {
        check_side(side)?;
        if bits & !volume_mask(side) != 0 {
            return Err(Error::Domain(format!("bits beyond a cube of side {side}")));
        }
        Ok(PackedCube { side, bits })
    }

    pub fn from_cube(c: &SignCube) -> Result<Self> {
        check_side(c.side())?;
        let bits = c
            .entries()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 1)
            .fold(0u64, |acc, (b, _)| acc | 1 << b);
        Ok(PackedCube {
            side: c.side(),
            bits,
        })
    }

    pub fn to_cube(&self) -> SignCube {
        let n3 = self.side * self.side * self.side;
        let entries = (0..n3)
            .map(|b| if self.bits >> b & 1 == 1 { 1 } else { -1 })
            .collect();
        SignCube::new(self.side, entries).expect("packed cube has a valid shape")
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn signed_total(&self) -> i64 {
        2 * i64::from(self.bits.count_ones()) - (self.side * self.side * self.side) as i64
    }

    #[inline]
    pub fn flipped(&self, mask: u64) -> PackedCube {
        PackedCube {
            side: self.side,
            bits: self.bits ^ mask,
        }
    }

    /// Sum over the plane `axis = index`.
    #[inline]
    pub fn plane_sum(&self, masks: &PlaneMasks, axis: Axis, index: usize) -> i64 {
        let m = masks.plane(axis, index);
        2 * i64::from((self.bits & m).count_ones()) - (self.side * self.side) as i64
    }
}

/// XOR masks of every plane of a cube of side 2 or 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneMasks {
    side: usize,
    x: Vec<u64>,
    y: Vec<u64>,
    z: Vec<u64>,
}

impl PlaneMasks {
    #[allow(clippy::needless_range_loop)] // one bit lands in three masks
    pub fn new(side: usize) -> Result<Self> {
        check_side(side)?;
        let n = side;
        let mut x = vec![0u64; n];
        let mut y = vec![0u64; n];
        let mut z = vec![0u64; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let bit = 1u64 << ((i * n + j) * n + k);
                    x[i] |= bit;
                    y[j] |= bit;
                    z[k] |= bit;
                }
            }
        }
        Ok(PlaneMasks { side, x, y, z })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn plane(&self, axis: Axis, index: usize) -> u64 {
        match axis {
            Axis::X => self.x[index],
            Axis::Y => self.y[index],
            Axis::Z => self.z[index],
        }
    }

    /// Combined flip mask of a switch assignment encoded as `3n` bits:
    /// bits `0..n` press `x`, `n..2n` press `y`, `2n..3n` press `z`.
    pub fn switch_mask(&self, assignment: u32) -> u64 {
        let n = self.side;
        let mut mask = 0;
        for t in 0..n {
            if assignment >> t & 1 == 1 {
                mask ^= self.x[t];
            }
            if assignment >> (n + t) & 1 == 1 {
                mask ^= self.y[t];
            }
            if assignment >> (2 * n + t) & 1 == 1 {
                mask ^= self.z[t];
            }
        }
        mask
    }

    pub fn switches_of(&self, assignment: u32) -> PlaneSwitches {
        let n = self.side;
        let family = |off: usize| -> Vec<i8> {
            (0..n)
                .map(|t| {
                    if assignment >> (off + t) & 1 == 1 {
                        -1
                    } else {
                        1
                    }
                })
                .collect()
        };
        PlaneSwitches::new(family(0), family(n), family(2 * n)).expect("valid switch families")
    }

    pub fn assignment_of(&self, s: &PlaneSwitches) -> Result<u32> {
        if s.side() != self.side {
            return Err(Error::Shape(format!(
                "switches for side {} against masks for side {}",
                s.side(),
                self.side
            )));
        }
        let n = self.side;
        let mut a = 0u32;
        for t in 0..n {
            a |= u32::from(s.sx()[t] == -1) << t;
            a |= u32::from(s.sy()[t] == -1) << (n + t);
            a |= u32::from(s.sz()[t] == -1) << (2 * n + t);
        }
        Ok(a)
    }
}
