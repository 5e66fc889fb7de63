//! Exact null-space extraction and the box-constrained step used by the
//! floating-component rounding procedure.
//!
//! Elimination runs fraction-free (Bareiss) over integers: first in checked
//! `i128`, falling back to `BigInt` when an intermediate minor overflows.
//! The returned direction is always the same vector: the first column that
//! depends on the columns before it gets coefficient 1 (before scaling),
//! every later column gets 0. That vector is unique given the matrix, so
//! pivot order only affects speed.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type RationalVector = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self> {
        if cols == 0 {
            return Err(Error::Shape("matrix needs at least one column".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(RationalMatrix { rows, cols, data })
    }

    pub fn from_integer_rows<R: AsRef<[i64]>>(cols: usize, rows: &[R]) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.as_ref().len() != cols) {
            return Err(Error::Shape(format!(
                "row {bad} does not have {cols} columns"
            )));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().map(|&v| Rational::from_integer(v.into())))
            .collect();
        RationalMatrix::new(rows.len(), cols, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "vector of length {} against {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).fold(Rational::zero(), |acc, j| acc + self.get(i, j) * &v[j]))
            .collect())
    }
}

/// Integer arithmetic the elimination needs. `None` means overflow (or an
/// inexact division, which would be a bug).
pub(crate) trait ExactInt: Clone + Sized + PartialEq {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn abs_cmp(&self, other: &Self) -> Ordering;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn div_exact(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn to_bigint(&self) -> BigInt;

    fn abs(&self) -> Option<Self> {
        if self.is_negative() {
            self.neg()
        } else {
            Some(self.clone())
        }
    }
}

impl ExactInt for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.unsigned_abs().cmp(&other.unsigned_abs())
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        self.checked_mul(*o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        self.checked_add(*o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        self.checked_sub(*o)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        // Exactness holds by construction; callers verify their final result.
        let q = self.checked_div(*o)?;
        debug_assert_eq!(q.wrapping_mul(*o), *self);
        Some(q)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl ExactInt for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
    fn abs_cmp(&self, other: &Self) -> Ordering {
        self.magnitude().cmp(other.magnitude())
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn div_exact(&self, o: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(o);
        Zero::is_zero(&r).then_some(q)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn to_bigint(&self) -> BigInt {
        self.clone()
    }
}

/// Primitive integer null vector of a `rows x cols` integer matrix
/// (`rows < cols`), with the first dependent column's coefficient positive.
fn null_direction<T: ExactInt>(rows: usize, cols: usize, mut e: Vec<T>) -> Option<Vec<T>> {
    let zero = T::from_i64(0);
    let mut prev = T::from_i64(1);
    let mut free = cols;
    for t in 0..cols {
        if t == rows {
            free = t;
            break;
        }
        // Partial pivoting: largest magnitude, first one on ties.
        let mut pivot = None;
        for i in t..rows {
            let v = &e[i * cols + t];
            if !v.is_zero()
                && pivot.is_none_or(|p: usize| v.abs_cmp(&e[p * cols + t]) == Ordering::Greater)
            {
                pivot = Some(i);
            }
        }
        let Some(p) = pivot else {
            free = t;
            break;
        };
        if p != t {
            for j in 0..cols {
                e.swap(p * cols + j, t * cols + j);
            }
        }
        let head = e[t * cols + t].clone();
        for i in t + 1..rows {
            let lead = e[i * cols + t].clone();
            for j in t + 1..cols {
                let v = head
                    .mul(&e[i * cols + j])?
                    .sub(&lead.mul(&e[t * cols + j])?)?
                    .div_exact(&prev)?;
                e[i * cols + j] = v;
            }
            e[i * cols + t] = zero.clone();
        }
        prev = head;
    }
    debug_assert!(free < cols, "rows < cols leaves a free column");

    let mut w = vec![zero.clone(); cols];
    w[free] = if free == 0 {
        T::from_i64(1)
    } else {
        let d = e[(free - 1) * cols + (free - 1)].clone();
        if d.is_negative() {
            d.neg()?
        } else {
            d
        }
    };
    for t in (0..free).rev() {
        let mut acc = zero.clone();
        for j in t + 1..=free {
            acc = acc.add(&e[t * cols + j].mul(&w[j])?)?;
        }
        w[t] = acc.div_exact(&e[t * cols + t])?.neg()?;
    }

    let g = w.iter().fold(zero.clone(), |g, v| g.gcd(v));
    if !g.is_zero() {
        for v in w.iter_mut() {
            *v = v.div_exact(&g)?;
        }
    }
    Some(w)
}

fn check_null<T: ExactInt>(rows: usize, cols: usize, m: &[T], w: &[T]) -> Option<bool> {
    for i in 0..rows {
        let mut acc = T::from_i64(0);
        for j in 0..cols {
            acc = acc.add(&m[i * cols + j].mul(&w[j])?)?;
        }
        if !acc.is_zero() {
            return Some(false);
        }
    }
    Some(true)
}

/// Null direction computed in `T`; `None` on overflow.
pub(crate) fn integer_null<T: ExactInt>(
    rows: usize,
    cols: usize,
    m: Vec<T>,
) -> Option<Result<Vec<T>>> {
    let w = null_direction(rows, cols, m.clone())?;
    match check_null(rows, cols, &m, &w)? {
        true => Some(Ok(w)),
        false => Some(Err(Error::Invariant(
            "null-space vector does not annihilate the matrix".into(),
        ))),
    }
}

/// Null-space direction of a `rows x cols` small-integer matrix as a
/// primitive vector in `T`. `None` means `T` overflowed.
pub(crate) fn null_direction_in<T: ExactInt>(
    rows: usize,
    cols: usize,
    m: &[i64],
) -> Option<Result<Vec<T>>> {
    if rows >= cols {
        return Some(Err(Error::Domain(format!(
            "null-space extraction needs fewer rows than columns, got {rows}x{cols}"
        ))));
    }
    integer_null(rows, cols, m.iter().map(|&v| T::from_i64(v)).collect())
}

/// A nonzero `v` with `M·v = 0` exactly, for `M` with fewer rows than columns.
///
/// The lowest-index free column gets coefficient 1 and later free columns 0.
pub fn nullspace_vector(m: &RationalMatrix) -> Result<RationalVector> {
    if m.rows >= m.cols {
        return Err(Error::Domain(format!(
            "null-space extraction needs fewer rows than columns, got {}x{}",
            m.rows, m.cols
        )));
    }
    // Clear denominators row by row; the null space is unchanged.
    let mut ints = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        let row = &m.data[i * m.cols..(i + 1) * m.cols];
        let l = row.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
        ints.extend(row.iter().map(|q| q.numer() * (&l / q.denom())));
    }
    let w = integer_null(m.rows, m.cols, ints).unwrap_or_else(|| {
        Err(Error::Invariant(
            "inexact division during elimination".into(),
        ))
    })?;
    let free = w
        .iter()
        .rposition(|v| !Zero::is_zero(v))
        .ok_or_else(|| Error::Invariant("elimination produced a zero vector".into()))?;
    let scale = w[free].clone();
    let v: RationalVector = w
        .into_iter()
        .map(|x| Rational::new(x, scale.clone()))
        .collect();
    if m.mul_vec(&v)?.iter().any(|r| !r.is_zero()) {
        return Err(Error::Invariant(
            "null-space vector does not annihilate the matrix".into(),
        ));
    }
    Ok(v)
}

fn in_box(q: &Rational) -> bool {
    q.numer().magnitude() <= q.denom().magnitude()
}

pub(crate) fn is_unit(q: &Rational) -> bool {
    q.denom().is_one() && q.numer().magnitude().is_one()
}

/// Largest `λ ≥ 0` keeping `x + λ·d` inside `[-1, 1]^n`, and the moved point.
///
/// Components already at `±1` must not move. Every component that lands on
/// the boundary at the optimal `λ` is exactly `±1` in the result.
pub fn max_step(x: &[Rational], d: &[Rational]) -> Result<(Rational, RationalVector)> {
    if x.len() != d.len() {
        return Err(Error::Shape(format!(
            "point has {} components, direction {}",
            x.len(),
            d.len()
        )));
    }
    if let Some(p) = x.iter().position(|q| !in_box(q)) {
        return Err(Error::Domain(format!(
            "x[{p}] = {} lies outside [-1, 1]",
            x[p]
        )));
    }
    if d.iter().all(Zero::is_zero) {
        return Err(Error::Domain(
            "zero direction leaves the step unbounded".into(),
        ));
    }
    if let Some(p) = (0..x.len()).find(|&p| is_unit(&x[p]) && !d[p].is_zero()) {
        return Err(Error::Domain(format!(
            "direction moves fixed component {p}"
        )));
    }
    let lambda = x
        .iter()
        .zip(d)
        .filter(|(_, di)| !di.is_zero())
        .map(|(xi, di)| {
            let target = if di.is_positive() {
                Rational::one()
            } else {
                -Rational::one()
            };
            (target - xi) / di
        })
        .min()
        .expect("direction has a nonzero component");
    let moved = x
        .iter()
        .zip(d)
        .map(|(xi, di)| {
            if di.is_zero() {
                xi.clone()
            } else {
                xi + &lambda * di
            }
        })
        .collect();
    Ok((lambda, moved))
}
