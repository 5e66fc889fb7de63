//! Plane sums, mod-4/mod-8 invariants, Z-profile feasibility and the
//! `4 x 4 x 4` solver.
//!
//! Notation: `X_i`, `Y_j`, `Z_k` are the signed sums of the planes
//! `i = const`, `j = const`, `k = const`. Pressing `z_k` negates `Z_k` and
//! moves the cube total by `-2·Z_k`; pressing `x_i` or `y_j` flips one line
//! of four lights inside every `Z` plane.

use std::sync::OnceLock;

use num_rational::Ratio;
use rand::RngCore;

use crate::error::{Error, Result};
use crate::io::{seeded_rng, Stream};
use crate::model::{Axis, PlaneSwitch, PlaneSwitches, SignCube};
use crate::oracle::packed_min;
use crate::packed::{PackedCube, PlaneMasks};
use crate::rect::greedy_with_slack;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneSums {
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    pub z: Vec<i64>,
}

impl PlaneSums {
    pub fn family(&self, axis: Axis) -> &[i64] {
        match axis {
            Axis::X => &self.x,
            Axis::Y => &self.y,
            Axis::Z => &self.z,
        }
    }

    pub fn total(&self) -> i64 {
        self.x.iter().sum()
    }
}

pub fn plane_sums(c: &SignCube) -> PlaneSums {
    let n = c.side();
    let mut sums = PlaneSums {
        x: vec![0; n],
        y: vec![0; n],
        z: vec![0; n],
    };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = i64::from(c.get(i, j, k));
                sums.x[i] += v;
                sums.y[j] += v;
                sums.z[k] += v;
            }
        }
    }
    sums
}

/// Change of a plane sum when one of its four-light lines, holding
/// `minus_count` lights off, is flipped.
pub fn line_flip_delta(minus_count: u32) -> Result<i64> {
    if minus_count > 4 {
        return Err(Error::Domain(format!(
            "a line of four lights has at most 4 off, got {minus_count}"
        )));
    }
    Ok(4 * i64::from(minus_count) - 8)
}

fn require_side4(c: &SignCube) -> Result<()> {
    if c.side() != 4 {
        return Err(Error::Shape(format!(
            "expected a 4x4x4 cube, got side {}",
            c.side()
        )));
    }
    Ok(())
}

struct Tables {
    masks: PlaneMasks,
    /// Flip masks for every `(sx, sy)` assignment (8 bits).
    xy: Vec<u64>,
    /// Flip masks for every `sz` assignment (4 bits).
    z: Vec<u64>,
}

fn tables() -> &'static Tables {
    static TABLES: OnceLock<Tables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let masks = PlaneMasks::new(4).expect("side 4 is supported");
        let xy = (0..256).map(|a| masks.switch_mask(a)).collect();
        let z = (0..16).map(|a| masks.switch_mask(a << 8)).collect();
        Tables { masks, xy, z }
    })
}

fn packed_property_three(p: PackedCube) -> bool {
    let masks = &tables().masks;
    [Axis::X, Axis::Y, Axis::Z]
        .iter()
        .all(|&axis| (0..4).all(|t| p.plane_sum(masks, axis, t) % 4 == 0))
}

/// Every one of the twelve plane sums of a `4 x 4 x 4` cube is divisible by 4.
pub fn property_three(c: &SignCube) -> Result<bool> {
    require_side4(c)?;
    Ok(packed_property_three(PackedCube::from_cube(c)?))
}

/// Presses `seq` one switch at a time on a cube with all plane sums
/// divisible by 4, and reports whether the total stays fixed mod 8 and the
/// divisibility survives every step.
pub fn lemma5_check(c: &SignCube, seq: &[PlaneSwitch]) -> Result<bool> {
    require_side4(c)?;
    let mut p = PackedCube::from_cube(c)?;
    if !packed_property_three(p) {
        return Err(Error::Domain(
            "cube does not have all plane sums divisible by 4".into(),
        ));
    }
    if let Some(s) = seq.iter().find(|s| s.index >= 4) {
        return Err(Error::Domain(format!(
            "plane index {} out of range",
            s.index
        )));
    }
    let masks = &tables().masks;
    let residue = p.signed_total().rem_euclid(8);
    for s in seq {
        p = p.flipped(masks.plane(s.axis, s.index));
        if p.signed_total().rem_euclid(8) != residue || !packed_property_three(p) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sorted absolute `Z` sums `[Z_0 ≤ Z_1 ≤ Z_2 ≤ Z_3]` of a `4 x 4 x 4` cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ZProfile([i64; 4]);

impl ZProfile {
    pub fn new(values: [i64; 4]) -> Result<Self> {
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain(format!("profile {values:?} is not sorted")));
        }
        if values.iter().any(|&v| !(0..=16).contains(&v) || v % 2 != 0) {
            return Err(Error::Domain(format!(
                "profile {values:?} needs even entries in 0..=16"
            )));
        }
        Ok(ZProfile(values))
    }

    /// Profile of signed `Z` sums, with `perm[t]` the layer in position `t`.
    pub fn from_sums(z: &[i64]) -> Result<(Self, [usize; 4])> {
        if z.len() != 4 {
            return Err(Error::Shape(format!("expected 4 Z sums, got {}", z.len())));
        }
        let mut perm = [0, 1, 2, 3];
        perm.sort_by_key(|&k| z[k].abs());
        let zp = ZProfile::new(perm.map(|k| z[k].abs()))?;
        Ok((zp, perm))
    }

    pub fn values(&self) -> [i64; 4] {
        self.0
    }

    /// All 495 sorted profiles with even entries in `0..=16`.
    pub fn all() -> impl Iterator<Item = ZProfile> {
        let evens = || (0..=16).step_by(2);
        evens().flat_map(move |a| {
            evens().filter(move |&b| b >= a).flat_map(move |b| {
                evens().filter(move |&c| c >= b).flat_map(move |c| {
                    evens()
                        .filter(move |&d| d >= c)
                        .map(move |d| ZProfile([a, b, c, d]))
                })
            })
        })
    }
}

/// Backward greedy signs over the profile with slack 4. When
/// `Z_0 ≤ 4, Z_1 ≤ Z_0 + 4, Z_2 ≤ Z_0 + Z_1 + 4, Z_3 ≤ Z_0 + Z_1 + Z_2 + 4`
/// the achieved `|sum|` is at most 4.
pub fn greedy_z(zp: ZProfile) -> ([i8; 4], u64) {
    let t = greedy_with_slack(&zp.0, 4);
    ([t.y[0], t.y[1], t.y[2], t.y[3]], t.total().unsigned_abs())
}

/// `min |±Z_0 ± Z_1 ± Z_2 ± Z_3|` over all 16 sign patterns.
pub fn zprofile_min(zp: ZProfile) -> u64 {
    (0..16u32)
        .map(|mask| {
            zp.0.iter()
                .enumerate()
                .map(|(t, &v)| if mask >> t & 1 == 1 { -v } else { v })
                .sum::<i64>()
                .unsigned_abs()
        })
        .min()
        .expect("16 patterns")
}

/// Whether `z` switches alone reach imbalance at most 4.
pub fn zprofile_feasible(zp: ZProfile) -> bool {
    zprofile_min(zp) <= 4
}

/// Which exclusion list [`lemma4c_predicate`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ExclusionList {
    /// Six excluded profiles.
    #[default]
    Full,
    /// Three excluded profiles, after `[0,0,0,6]`, `[0,0,0,8]` and
    /// `[0,0,2,8]` have been dealt with by an extra line switch.
    Reduced,
}

const FULL_EXCLUSIONS: [[i64; 4]; 6] = [
    [0, 0, 0, 6],
    [0, 0, 0, 8],
    [0, 0, 2, 8],
    [0, 6, 8, 8],
    [0, 8, 8, 8],
    [2, 8, 8, 8],
];

const REDUCED_EXCLUSIONS: [[i64; 4]; 3] = [[0, 6, 8, 8], [0, 8, 8, 8], [2, 8, 8, 8]];

/// The sufficient condition for `z`-only feasibility: every entry at most 8,
/// at most two entries in `{2, 6}`, and the profile not on the exclusion list.
pub fn lemma4c_predicate(zp: ZProfile, list: ExclusionList) -> bool {
    let v = zp.0;
    let excluded: &[[i64; 4]] = match list {
        ExclusionList::Full => &FULL_EXCLUSIONS,
        ExclusionList::Reduced => &REDUCED_EXCLUSIONS,
    };
    v.iter().all(|&z| z <= 8)
        && v.iter().filter(|&&z| z == 2 || z == 6).count() <= 2
        && !excluded.contains(&v)
}

const CASES: [[i64; 4]; 10] = [
    [0, 0, 0, 8],
    [0, 0, 2, 8],
    [0, 0, 0, 14],
    [0, 0, 0, 12],
    [0, 0, 2, 12],
    [0, 0, 0, 6],
    [0, 0, 0, 10],
    [0, 0, 4, 10],
    [0, 0, 2, 10],
    [0, 2, 2, 10],
];

/// Number (1..=10) of the hand-analysed case a profile belongs to, if any.
/// Diagnostic only; the solver does not branch on it.
pub fn case_classify(zp: ZProfile) -> Option<u8> {
    CASES.iter().position(|c| *c == zp.0).map(|p| p as u8 + 1)
}

/// Minimum imbalance of one `2 x 2 x 2` start state (bit `b` on means light `b` on).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct P2Entry {
    pub state: u8,
    pub signed_total: i64,
    pub minimum: u64,
}

/// All 256 start states of the `2 x 2 x 2` cube with their exact minima.
pub fn p2_table() -> Vec<P2Entry> {
    let masks = PlaneMasks::new(2).expect("side 2 is supported");
    (0..=255u8)
        .map(|state| {
            let p = PackedCube::from_bits(2, u64::from(state)).expect("8-bit state");
            P2Entry {
                state,
                signed_total: p.signed_total(),
                minimum: packed_min(p, &masks).0,
            }
        })
        .collect()
}

/// Largest minimum imbalance over every `2 x 2 x 2` start state, after
/// checking that the total's residue mod 4 decides the minimum.
pub fn verify_p2() -> Result<u64> {
    let masks = PlaneMasks::new(2)?;
    let table = p2_table();
    for e in &table {
        let p = PackedCube::from_bits(2, u64::from(e.state))?;
        let residue = e.signed_total.rem_euclid(4);
        for a in 0..64 {
            if p.flipped(masks.switch_mask(a)).signed_total().rem_euclid(4) != residue {
                return Err(Error::Invariant(format!(
                    "state {:#04x}: plane switches changed the total mod 4",
                    e.state
                )));
            }
        }
        let expected = if residue == 2 { 2 } else { 0 };
        if e.minimum != expected {
            return Err(Error::Invariant(format!(
                "state {:#04x} with total {} has minimum {}, expected {expected}",
                e.state, e.signed_total, e.minimum
            )));
        }
    }
    Ok(table.iter().map(|e| e.minimum).max().unwrap_or(0))
}

/// `Σ |imbalance|` of a `4 x 4` board (bit `4r + c` on means light on) over
/// all 256 row/column switch combinations.
pub fn layer_imbalance_total(board: u16) -> u64 {
    const ROW: [u16; 4] = [0x000F, 0x00F0, 0x0F00, 0xF000];
    const COL: [u16; 4] = [0x1111, 0x2222, 0x4444, 0x8888];
    let fold = |masks: &[u16; 4], bits: u32| {
        (0..4)
            .filter(|t| bits >> t & 1 == 1)
            .fold(0u16, |acc, t| acc ^ masks[t])
    };
    let mut total = 0;
    for rows in 0..16 {
        let rm = fold(&ROW, rows);
        for cols in 0..16 {
            let on = (board ^ rm ^ fold(&COL, cols)).count_ones() as i64;
            total += (2 * on - 16).unsigned_abs();
        }
    }
    total
}

/// Average imbalance of a `4 x 4` board over its 256 switch combinations.
pub fn layer_average(board: u16) -> Ratio<u64> {
    Ratio::new(layer_imbalance_total(board), 256)
}

/// Largest [`layer_average`] over all 65 536 boards.
pub fn max_layer_average() -> Ratio<u64> {
    use rayon::prelude::*;
    let best = (0..=u16::MAX)
        .into_par_iter()
        .map(layer_imbalance_total)
        .max()
        .expect("non-empty");
    Ratio::new(best, 256)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStage {
    /// `x`/`y` choice minimizing `Σ|Z_k|`, then greedy `z` signs.
    Greedy,
    /// Greedy overshot; exhaustive search over all plane switches.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube4Solution {
    pub switches: PlaneSwitches,
    pub signed_sum: i64,
    pub imbalance: u64,
    pub stage: SolveStage,
    /// `Σ|Z_k|` after the first stage.
    pub z_abs_sum: i64,
}

/// Solves a packed `4 x 4 x 4` cube, returning `(assignment, total, stage, Σ|Z|)`.
fn solve_packed4(p: PackedCube) -> Result<(u32, i64, SolveStage, i64)> {
    let t = tables();
    let z_sums =
        |q: PackedCube| -> [i64; 4] { [0, 1, 2, 3].map(|k| q.plane_sum(&t.masks, Axis::Z, k)) };

    let mut best = (i64::MAX, 0u32);
    for (a, &m) in t.xy.iter().enumerate() {
        let cost: i64 = z_sums(p.flipped(m)).iter().map(|z| z.abs()).sum();
        if cost < best.0 {
            best = (cost, a as u32);
        }
    }
    let (z_abs_sum, xy) = best;
    if z_abs_sum > 14 {
        return Err(Error::Invariant(format!(
            "best x/y choice leaves Σ|Z| = {z_abs_sum} > 14"
        )));
    }

    let z = z_sums(p.flipped(t.xy[xy as usize]));
    let (zp, perm) = ZProfile::from_sums(&z)?;
    let (signs, _) = greedy_z(zp);
    let mut zbits = 0u32;
    for (pos, &k) in perm.iter().enumerate() {
        let sign = if z[k] < 0 { -signs[pos] } else { signs[pos] };
        if sign < 0 {
            zbits |= 1 << k;
        }
    }
    let assignment = zbits << 8 | xy;
    let total = p
        .flipped(t.xy[xy as usize] ^ t.z[zbits as usize])
        .signed_total();
    if total.abs() <= 4 {
        return Ok((assignment, total, SolveStage::Greedy, z_abs_sum));
    }

    let (min, assignment) = packed_min(p, &t.masks);
    if min > 4 {
        return Err(Error::Invariant(format!(
            "cube {:#018x} cannot be brought below {min}",
            p.bits()
        )));
    }
    let total = p.flipped(t.masks.switch_mask(assignment)).signed_total();
    Ok((assignment, total, SolveStage::Exhaustive, z_abs_sum))
}

/// Plane switches bringing a `4 x 4 x 4` cube to imbalance at most 4.
pub fn solve_cube4(c: &SignCube) -> Result<Cube4Solution> {
    require_side4(c)?;
    let p = PackedCube::from_cube(c)?;
    let (assignment, signed_sum, stage, z_abs_sum) = solve_packed4(p)?;
    let switches = tables().masks.switches_of(assignment);
    Ok(Cube4Solution {
        switches,
        signed_sum,
        imbalance: signed_sum.unsigned_abs(),
        stage,
        z_abs_sum,
    })
}

/// Uniform random `4 x 4 x 4` cube conditioned on all plane sums being
/// divisible by 4, by rejection.
pub fn random_property_three_cube(rng: &mut impl RngCore, budget: u64) -> Result<SignCube> {
    for _ in 0..budget {
        let p = PackedCube::from_bits(4, rng.next_u64())?;
        if packed_property_three(p) {
            return Ok(p.to_cube());
        }
    }
    Err(Error::Resource {
        what: "rejection sampling for a cube with plane sums divisible by 4".into(),
        required: budget + 1,
        cap: budget,
    })
}

/// Searches for a cube with all plane sums divisible by 4 and total
/// `≡ 4 (mod 8)`, and certifies by exhaustive search that its minimum
/// imbalance is exactly 4.
pub fn find_extremal_cube4(seed: u64, budget: u64) -> Result<SignCube> {
    let mut rng = seeded_rng(seed, Stream::ExtremalSearch);
    let masks = &tables().masks;
    for _ in 0..budget {
        let p = PackedCube::from_bits(4, rng.next_u64())?;
        if p.signed_total().rem_euclid(8) != 4 || !packed_property_three(p) {
            continue;
        }
        let (min, _) = packed_min(p, masks);
        if min != 4 {
            return Err(Error::Invariant(format!(
                "candidate {:#018x} has minimum {min}, expected 4",
                p.bits()
            )));
        }
        return Ok(p.to_cube());
    }
    Err(Error::Resource {
        what: "search for an extremal 4x4x4 cube".into(),
        required: budget + 1,
        cap: budget,
    })
}

/// Default candidate budget for [`find_extremal_cube4`].
pub const DEFAULT_EXTREMAL_BUDGET: u64 = 1 << 24;
