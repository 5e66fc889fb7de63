//! Constructive balancing of `m x n` boards (`n` even, `m ≤ n`) to
//! imbalance at most 2.
//!
//! The pipeline has three stages:
//!
//! 1. [`lemma1_column_switches`] rounds a fractional column assignment to
//!    signs, one null-space step at a time, so that row `i` (1-based) of the
//!    padded square board sums to at most `2(i-1)` in absolute value.
//! 2. [`lemma2_property_two`] sorts the rows by absolute sum and, if needed,
//!    flips one column so the sums satisfy the prefix bound
//!    `s_1 ≤ 2, s_i ≤ s_1 + … + s_{i-1} + 2`.
//! 3. [`greedy_sign`] picks row signs backwards so the signed total of those
//!    sums lands in `[-2, 2]`.
//!
//! [`balance`] composes the stages, folds every intermediate flip into a
//! single [`SwitchPair`] and re-checks the result from scratch.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{null_direction_in, ExactInt, Rational, RationalVector};
use crate::model::{imbalance_rect, BalanceOutcome, SignMatrix, SwitchPair};

/// Pads `a` with all-on rows below the originals until it is square.
pub fn augment_to_square(a: &SignMatrix) -> Result<SignMatrix> {
    let (m, n) = (a.rows(), a.cols());
    if m > n {
        return Err(Error::Shape(format!(
            "cannot pad a {m}x{n} board to square: more rows than columns"
        )));
    }
    let mut entries = a.entries().to_vec();
    entries.resize(n * n, 1);
    SignMatrix::new(n, n, entries)
}

/// A point of `[-1, 1]^n` together with its floating (non-`±1`) indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloatingAssignment {
    x: RationalVector,
    floating: Vec<usize>,
}

impl FloatingAssignment {
    /// The origin: everything floating.
    pub fn origin(n: usize) -> Self {
        FloatingAssignment {
            x: vec![Rational::zero(); n],
            floating: (0..n).collect(),
        }
    }

    pub fn x(&self) -> &[Rational] {
        &self.x
    }

    /// Floating indices, ascending.
    pub fn floating(&self) -> &[usize] {
        &self.floating
    }
}

/// Outcome of the column-rounding stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundingRun {
    pub x: Vec<i8>,
    /// Row sums of `A·x`.
    pub row_sums: Vec<i64>,
    /// Number of floating components before each step and after the last.
    pub floating_counts: Vec<usize>,
}

impl RoundingRun {
    pub fn iterations(&self) -> usize {
        self.floating_counts.len() - 1
    }
}

fn check_rounding_shape(a: &SignMatrix) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::Shape(format!(
            "column rounding needs a square board, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.cols() % 2 == 1 {
        return Err(Error::Unsupported(format!(
            "column rounding needs an even side, got {}",
            a.cols()
        )));
    }
    Ok(())
}

/// The point `num / den` of `[-1, 1]^n`, `den > 0`, kept in lowest terms.
struct ScaledPoint<T> {
    num: Vec<T>,
    den: T,
}

impl<T: ExactInt> ScaledPoint<T> {
    fn is_fixed(&self, j: usize) -> Option<bool> {
        Some(self.num[j].abs()? == self.den)
    }

    fn to_state(&self, floating: &[usize]) -> FloatingAssignment {
        let den = self.den.to_bigint();
        FloatingAssignment {
            x: self
                .num
                .iter()
                .map(|v| Rational::new(v.to_bigint(), den.clone()))
                .collect(),
            floating: floating.to_vec(),
        }
    }
}

/// The rounding loop in integer type `T`; `None` if `T` overflowed.
///
/// Each step moves `x` along a null direction `d` by the largest `λ` that
/// stays in the box. With `x = N / D` and `λ = a / (b·D)` this is
/// `N ← b·N + a·d`, `D ← b·D`, followed by a gcd reduction.
fn round_columns_in<T: ExactInt>(
    a: &SignMatrix,
    dir_scale: i64,
    mut trace: Option<&mut Vec<FloatingAssignment>>,
) -> Option<Result<RoundingRun>> {
    let n = a.cols();
    let zero = T::from_i64(0);
    let scale = T::from_i64(dir_scale);
    let mut p = ScaledPoint {
        num: vec![zero.clone(); n],
        den: T::from_i64(1),
    };
    let mut floating: Vec<usize> = (0..n).collect();
    let mut counts = vec![n];
    if let Some(t) = trace.as_deref_mut() {
        t.push(p.to_state(&floating));
    }

    while !floating.is_empty() {
        let k = floating.len();
        if k == 1 {
            // Row 1 sums to zero with n-1 signs and one fraction: impossible for even n.
            return Some(Err(Error::Invariant(
                "column rounding stalled with a single floating component".into(),
            )));
        }
        let rows = k - 1;
        let mut m = Vec::with_capacity(rows * k);
        for i in 0..rows {
            m.extend(floating.iter().map(|&j| i64::from(a.get(i, j))));
        }
        let dir = match null_direction_in::<T>(rows, k, &m)? {
            Ok(d) => d,
            Err(e) => return Some(Err(e)),
        };
        let mut d = Vec::with_capacity(k);
        for v in &dir {
            d.push(v.mul(&scale)?);
        }

        // λ·D = a_j / b_j for each moving component; keep the smallest.
        let mut best: Option<(T, T)> = None;
        for (&j, dj) in floating.iter().zip(&d) {
            if dj.is_zero() {
                continue;
            }
            let gap = if dj.is_negative() {
                p.den.add(&p.num[j])?
            } else {
                p.den.sub(&p.num[j])?
            };
            let step = dj.abs()?;
            let smaller = match &best {
                None => true,
                Some((ba, bb)) => gap.mul(bb)?.abs_cmp(&ba.mul(&step)?) == Ordering::Less,
            };
            if smaller {
                best = Some((gap, step));
            }
        }
        let Some((ga, gb)) = best else {
            return Some(Err(Error::Invariant("null-space direction is zero".into())));
        };

        for v in p.num.iter_mut() {
            *v = v.mul(&gb)?;
        }
        for (&j, dj) in floating.iter().zip(&d) {
            p.num[j] = p.num[j].add(&ga.mul(dj)?)?;
        }
        p.den = p.den.mul(&gb)?;
        let g = p.num.iter().fold(p.den.clone(), |g, v| g.gcd(v));
        for v in p.num.iter_mut() {
            *v = v.div_exact(&g)?;
        }
        p.den = p.den.div_exact(&g)?;

        let mut next = Vec::with_capacity(k);
        for &j in &floating {
            if !p.is_fixed(j)? {
                next.push(j);
            }
        }
        if next.len() >= k {
            return Some(Err(Error::Invariant(
                "rounding step fixed no component".into(),
            )));
        }
        floating = next;
        counts.push(floating.len());
        if let Some(t) = trace.as_deref_mut() {
            t.push(p.to_state(&floating));
        }
    }

    let x: Option<Vec<i8>> = p
        .num
        .iter()
        .map(|v| (v.abs()? == p.den).then(|| if v.is_negative() { -1 } else { 1 }))
        .collect();
    let Some(x) = x else {
        return Some(Err(Error::Invariant(
            "rounded assignment is not a sign vector".into(),
        )));
    };
    Some(finish_rounding(a, x, counts))
}

fn finish_rounding(a: &SignMatrix, x: Vec<i8>, counts: Vec<usize>) -> Result<RoundingRun> {
    let row_sums = a.row_sums(&x);
    for (i, &r) in row_sums.iter().enumerate() {
        if r % 2 != 0 || r.unsigned_abs() > 2 * i as u64 {
            return Err(Error::Invariant(format!(
                "row {} sums to {r}, outside ±{}",
                i + 1,
                2 * i
            )));
        }
    }
    Ok(RoundingRun {
        x,
        row_sums,
        floating_counts: counts,
    })
}

/// Runs the rounding loop, recording every intermediate state into `trace`.
/// `dir_scale` multiplies each null-space direction (must be positive).
///
/// Arithmetic runs in checked `i128` and restarts in `BigInt` on overflow;
/// both give the same result.
pub(crate) fn round_columns_with(
    a: &SignMatrix,
    dir_scale: i64,
    mut trace: Option<&mut Vec<FloatingAssignment>>,
) -> Result<RoundingRun> {
    check_rounding_shape(a)?;
    debug_assert!(dir_scale > 0);
    if let Some(run) = round_columns_in::<i128>(a, dir_scale, trace.as_deref_mut()) {
        return run;
    }
    if let Some(t) = trace.as_deref_mut() {
        t.clear();
    }
    round_columns_in::<BigInt>(a, dir_scale, trace)
        .unwrap_or_else(|| Err(Error::Invariant("unbounded integer overflowed".into())))
}

/// Column signs for a square board of even side with `|r_i| ≤ 2(i-1)`.
pub fn lemma1_column_switches(a: &SignMatrix) -> Result<Vec<i8>> {
    Ok(round_columns(a)?.x)
}

pub fn round_columns(a: &SignMatrix) -> Result<RoundingRun> {
    round_columns_with(a, 1, None)
}

/// Every intermediate fractional assignment of the rounding loop, origin first.
pub fn rounding_states(a: &SignMatrix) -> Result<Vec<FloatingAssignment>> {
    let mut states = Vec::new();
    round_columns_with(a, 1, Some(&mut states))?;
    Ok(states)
}

/// `0 ≤ r_i ≤ 2(i-1)` for every (1-based) `i`.
pub fn has_property_one(r: &[i64]) -> bool {
    r.iter()
        .enumerate()
        .all(|(i, &v)| v >= 0 && v <= 2 * i as i64)
}

fn satisfies_chain(s: &[i64], slack: i64) -> bool {
    let mut prefix = 0;
    for &v in s {
        if v < 0 || v > prefix + slack {
            return false;
        }
        prefix += v;
    }
    true
}

/// `s` nonnegative with `s_1 ≤ 2` and `s_i ≤ s_1 + … + s_{i-1} + 2`.
pub fn has_property_two(s: &[i64]) -> bool {
    satisfies_chain(s, 2)
}

/// Row sums prepared for the greedy sign stage.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowProfile {
    /// Row sums of `A·x` before any normalization, original row order.
    pub row_sums: Vec<i64>,
    /// `perm[t]` is the original index of the row in position `t`.
    pub perm: Vec<usize>,
    /// Net row switch per original row making its final sum nonnegative.
    pub row_flips: Vec<i8>,
    /// Column flipped on top of `x`, if any.
    pub col_flip: Option<usize>,
    /// Absolute row sums after all flips, in `perm` order.
    pub s: Vec<i64>,
}

/// Reorders rows and flips at most one column so the absolute row sums of
/// `A·x` satisfy the prefix bound consumed by [`greedy_sign`].
///
/// Sums already satisfying the bound are returned unchanged; otherwise a
/// column is flipped, chosen as the first one where the rows summing to 2
/// hold no more `-1`s than `+1`s.
pub fn lemma2_property_two(a: &SignMatrix, x: &[i8]) -> Result<RowProfile> {
    if x.len() != a.cols() {
        return Err(Error::Shape(format!(
            "{} column signs for a board with {} columns",
            x.len(),
            a.cols()
        )));
    }
    let (m, n) = (a.rows(), a.cols());
    let row_sums = a.row_sums(x);
    let mut row_flips: Vec<i8> = row_sums
        .iter()
        .map(|&r| if r < 0 { -1 } else { 1 })
        .collect();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.sort_by_key(|&i| row_sums[i].abs());
    let sorted: Vec<i64> = perm.iter().map(|&i| row_sums[i].abs()).collect();
    if !has_property_one(&sorted) {
        return Err(Error::Invariant(format!(
            "sorted row sums {sorted:?} violate 0 ≤ r_i ≤ 2(i-1)"
        )));
    }
    if has_property_two(&sorted) {
        return Ok(RowProfile {
            row_sums,
            perm,
            row_flips,
            col_flip: None,
            s: sorted,
        });
    }

    let twos: Vec<usize> = (0..m).filter(|&i| row_sums[i].abs() == 2).collect();
    if 2 * twos.len() >= n {
        return Err(Error::Invariant(format!(
            "{} rows sum to 2 with {n} columns, yet the prefix bound fails",
            twos.len()
        )));
    }
    let sign_flips = row_flips.clone();
    let transformed = |i: usize, j: usize| i64::from(sign_flips[i] * a.get(i, j) * x[j]);
    let col = (0..n)
        .find(|&j| twos.iter().map(|&i| transformed(i, j)).sum::<i64>() >= 0)
        .ok_or_else(|| {
            Error::Invariant("no column is balanced over the rows summing to 2".into())
        })?;

    let mut flipped = vec![0i64; m];
    for i in 0..m {
        let r = row_sums[i].abs() - 2 * transformed(i, col);
        if r < 0 {
            row_flips[i] = -row_flips[i];
        }
        flipped[i] = r.abs();
    }
    let s: Vec<i64> = perm.iter().map(|&i| flipped[i]).collect();
    if !has_property_two(&s) {
        return Err(Error::Invariant(format!(
            "row sums {s:?} after flipping column {col} violate the prefix bound"
        )));
    }
    Ok(RowProfile {
        row_sums,
        perm,
        row_flips,
        col_flip: Some(col),
        s,
    })
}

/// Backward greedy sign choice over a nonnegative sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace {
    /// `prefix[i] = s_1 + … + s_i`, `prefix[0] = 0`.
    pub prefix: Vec<i64>,
    /// `sigma[i-1] = y_i s_i + … + y_m s_m`.
    pub sigma: Vec<i64>,
    pub y: Vec<i8>,
    /// Whether the input met the chain condition, i.e. whether `|σ_1| ≤ slack` is promised.
    pub guaranteed: bool,
    pub slack: i64,
}

impl GreedyTrace {
    /// `y_1 s_1 + … + y_m s_m`.
    pub fn total(&self) -> i64 {
        self.sigma.first().copied().unwrap_or(0)
    }

    /// `|σ_i| ≤ S_{i-1} + slack` at every step.
    pub fn bound_holds(&self) -> bool {
        self.sigma
            .iter()
            .enumerate()
            .all(|(i, &sg)| sg.abs() <= self.prefix[i] + self.slack)
    }
}

pub(crate) fn greedy_with_slack(s: &[i64], slack: i64) -> GreedyTrace {
    let m = s.len();
    let mut prefix = Vec::with_capacity(m + 1);
    prefix.push(0);
    for &v in s {
        prefix.push(prefix.last().unwrap() + v);
    }
    let mut sigma = vec![0; m];
    let mut y = vec![1i8; m];
    if let Some(&last) = s.last() {
        sigma[m - 1] = last;
        for i in (1..m).rev() {
            if sigma[i] >= 0 {
                y[i - 1] = -1;
                sigma[i - 1] = sigma[i] - s[i - 1];
            } else {
                sigma[i - 1] = sigma[i] + s[i - 1];
            }
        }
    }
    GreedyTrace {
        prefix,
        sigma,
        y,
        guaranteed: satisfies_chain(s, slack),
        slack,
    }
}

/// Signs `y` with `|Σ y_i s_i| ≤ 2` whenever `s` satisfies the prefix bound.
///
/// The recurrence runs on any input; `guaranteed` reports whether the bound
/// is promised.
pub fn greedy_sign(s: &[i64]) -> GreedyTrace {
    greedy_with_slack(s, 2)
}

/// Row and column switches bringing the imbalance of `a` to 0 or 2.
///
/// Requires an even number of columns and no more rows than columns.
pub fn balance(a: &SignMatrix) -> Result<BalanceOutcome> {
    let (m, n) = (a.rows(), a.cols());
    if n % 2 != 0 {
        return Err(Error::Unsupported(format!(
            "balancing needs an even number of columns, got {m}x{n}"
        )));
    }
    if m > n {
        return Err(Error::Unsupported(format!(
            "balancing needs rows ≤ columns, got {m}x{n}"
        )));
    }
    let square = augment_to_square(a)?;
    let mut x = lemma1_column_switches(&square)?;
    // Padding rows are dropped here; the original rows keep their prefix bounds.
    let profile = lemma2_property_two(a, &x)?;
    let trace = greedy_sign(&profile.s);
    if !trace.guaranteed || !trace.bound_holds() {
        return Err(Error::Invariant(format!(
            "greedy stage got sums {:?} without its precondition",
            profile.s
        )));
    }

    if let Some(j) = profile.col_flip {
        x[j] = -x[j];
    }
    let mut y = vec![1i8; m];
    for (t, &i) in profile.perm.iter().enumerate() {
        y[i] = trace.y[t] * profile.row_flips[i];
    }
    let switches = SwitchPair::new(x, y)?;
    let signed_sum = imbalance_rect(a, &switches)?;
    if signed_sum != trace.total() || signed_sum.abs() > 2 {
        return Err(Error::Invariant(format!(
            "balanced board sums to {signed_sum}, greedy predicted {}",
            trace.total()
        )));
    }
    Ok(BalanceOutcome {
        switches,
        signed_sum,
        imbalance: signed_sum.unsigned_abs(),
    })
}
