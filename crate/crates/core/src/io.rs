//! Text formats for boards and cubes, the JSON result document, and the
//! seeded generators.
//!
//! Board text:
//!
//! ```text
//! 2 3
//! ++-
//! -+-
//! ```
//!
//! Cube text is a side length followed by one block per `k` layer
//! (`k = 0, 1, …`), blocks separated by one blank line; block lines are rows
//! `i`, characters are columns `j`.
//!
//! Parsers also accept `1`/`0` for `+`/`-`; serializers always write `+`/`-`.
//!
//! A switch script is a whitespace- or comma-separated list of plane
//! presses such as `x0 y2 z3`.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Axis, BalanceOutcome, PlaneSwitch, PlaneSwitches, SignCube, SignMatrix};

/// Name of the generator behind [`random_board`] and friends: ChaCha with
/// 8 rounds, keyed by `seed_from_u64(seed)`, one stream per purpose.
pub const GENERATOR: &str = "chacha8/seed_from_u64";

/// Independent ChaCha streams, so that e.g. boards and cubes drawn from the
/// same seed are unrelated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Board = 1,
    Cube = 2,
    ExtremalSearch = 3,
    PropertyThree = 4,
    SwitchScript = 5,
}

pub fn seeded_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// `count` fair signs, 64 per drawn word, least significant bit first.
pub fn random_signs(rng: &mut impl RngCore, count: usize) -> Vec<i8> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let word = rng.next_u64();
        let take = (count - out.len()).min(64);
        out.extend((0..take).map(|b| if word >> b & 1 == 1 { 1 } else { -1 }));
    }
    out
}

/// Uniform random `m x n` board. Panics if either dimension is zero.
pub fn random_board(m: usize, n: usize, seed: u64) -> SignMatrix {
    assert!(m >= 1 && n >= 1, "board dimensions must be positive");
    let mut rng = seeded_rng(seed, Stream::Board);
    SignMatrix::new(m, n, random_signs(&mut rng, m * n)).expect("generated board is valid")
}

/// Uniform random cube of side `n`. Panics if `n` is zero.
pub fn random_cube(n: usize, seed: u64) -> SignCube {
    assert!(n >= 1, "cube side must be positive");
    let mut rng = seeded_rng(seed, Stream::Cube);
    SignCube::new(n, random_signs(&mut rng, n * n * n)).expect("generated cube is valid")
}

fn sign_of(c: char) -> Option<i8> {
    match c {
        '+' | '1' => Some(1),
        '-' | '0' => Some(-1),
        _ => None,
    }
}

fn sign_char(v: i8) -> char {
    if v > 0 {
        '+'
    } else {
        '-'
    }
}

/// Lines with terminators stripped, numbered from 1.
fn numbered_lines(text: &str) -> Vec<(usize, &str)> {
    let mut lines: Vec<(usize, &str)> = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .collect();
    while lines.last().is_some_and(|(_, l)| l.is_empty()) {
        lines.pop();
    }
    lines
}

fn parse_dims(line: usize, text: &str, count: usize) -> Result<Vec<usize>> {
    let mut dims = Vec::with_capacity(count);
    let mut col = 1;
    for field in text.split(' ') {
        if field.is_empty() {
            col += 1;
            continue;
        }
        let v: usize = field.parse().map_err(|_| {
            Error::parse(line, col, format!("expected a dimension, found {field:?}"))
        })?;
        if v == 0 {
            return Err(Error::parse(line, col, "dimensions must be positive"));
        }
        dims.push(v);
        col += field.chars().count() + 1;
    }
    if dims.len() != count {
        return Err(Error::parse(
            line,
            1,
            format!("header needs {count} dimension(s), found {}", dims.len()),
        ));
    }
    Ok(dims)
}

fn parse_sign_row(line: usize, text: &str, width: usize, out: &mut Vec<i8>) -> Result<()> {
    let mut seen = 0;
    for (c, ch) in text.chars().enumerate() {
        if c >= width {
            return Err(Error::parse(
                line,
                c + 1,
                format!("row longer than {width}"),
            ));
        }
        let v = sign_of(ch)
            .ok_or_else(|| Error::parse(line, c + 1, format!("illegal character {ch:?}")))?;
        out.push(v);
        seen += 1;
    }
    if seen < width {
        return Err(Error::parse(
            line,
            seen + 1,
            format!("row has {seen} characters, expected {width}"),
        ));
    }
    Ok(())
}

pub fn parse_board(text: &str) -> Result<SignMatrix> {
    let lines = numbered_lines(text);
    let (_, header) = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let dims = parse_dims(1, header, 2)?;
    let (m, n) = (dims[0], dims[1]);
    let mut entries = Vec::with_capacity(m * n);
    for r in 0..m {
        let (no, row) = lines
            .get(1 + r)
            .copied()
            .ok_or_else(|| Error::parse(2 + r, 1, format!("expected {m} rows, found {r}")))?;
        parse_sign_row(no, row, n, &mut entries)?;
    }
    if let Some((no, _)) = lines.get(1 + m) {
        return Err(Error::parse(*no, 1, "trailing content after the last row"));
    }
    SignMatrix::new(m, n, entries)
}

pub fn serialize_board(a: &SignMatrix) -> String {
    let mut out = format!("{} {}\n", a.rows(), a.cols());
    for i in 0..a.rows() {
        out.extend(a.row(i).iter().map(|&v| sign_char(v)));
        out.push('\n');
    }
    out
}

pub fn parse_cube(text: &str) -> Result<SignCube> {
    let lines = numbered_lines(text);
    let (_, header) = lines
        .first()
        .ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let n = parse_dims(1, header, 1)?[0];
    // Layer blocks are collected as block[k][i][j], then re-laid out as (i, j, k).
    let mut layers: Vec<Vec<i8>> = Vec::with_capacity(n);
    let mut cursor = 1;
    for k in 0..n {
        if k > 0 {
            match lines.get(cursor) {
                Some((_, "")) => cursor += 1,
                Some((no, _)) => {
                    return Err(Error::parse(
                        *no,
                        1,
                        format!("expected a blank line before layer {k}"),
                    ))
                }
                None => {
                    return Err(Error::parse(
                        cursor + 1,
                        1,
                        format!("expected {n} layers, found {k}"),
                    ))
                }
            }
        }
        let mut layer = Vec::with_capacity(n * n);
        for i in 0..n {
            let (no, row) = lines.get(cursor).copied().ok_or_else(|| {
                Error::parse(
                    cursor + 1,
                    1,
                    format!("layer {k} has {i} rows, expected {n}"),
                )
            })?;
            if row.is_empty() {
                return Err(Error::parse(
                    no,
                    1,
                    format!("layer {k} has {i} rows, expected {n}"),
                ));
            }
            parse_sign_row(no, row, n, &mut layer)?;
            cursor += 1;
        }
        layers.push(layer);
    }
    if let Some((no, _)) = lines.get(cursor) {
        return Err(Error::parse(
            *no,
            1,
            "trailing content after the last layer",
        ));
    }
    SignCube::from_fn(n, |i, j, k| layers[k][i * n + j])
}

pub fn serialize_cube(c: &SignCube) -> String {
    let n = c.side();
    let mut out = format!("{n}\n");
    for k in 0..n {
        if k > 0 {
            out.push('\n');
        }
        for i in 0..n {
            out.extend((0..n).map(|j| sign_char(c.get(i, j, k))));
            out.push('\n');
        }
    }
    out
}

/// Parses a switch script (`x0 y2, z3`), one plane press per token.
pub fn parse_switch_script(text: &str) -> Result<Vec<PlaneSwitch>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let mut col = 0;
        for token in line.split(|c: char| c.is_whitespace() || c == ',') {
            col += 1;
            if token.is_empty() {
                continue;
            }
            let start = col;
            col += token.chars().count();
            let mut chars = token.chars();
            let axis = match chars.next().map(|c| c.to_ascii_lowercase()) {
                Some('x') => Axis::X,
                Some('y') => Axis::Y,
                Some('z') => Axis::Z,
                _ => {
                    return Err(Error::parse(
                        no + 1,
                        start,
                        format!("`{token}` does not start with x, y or z"),
                    ))
                }
            };
            let index = chars.as_str().parse().map_err(|_| {
                Error::parse(no + 1, start + 1, format!("`{token}` lacks a plane index"))
            })?;
            out.push(PlaneSwitch::new(axis, index));
        }
    }
    Ok(out)
}

pub fn format_switch_script(seq: &[PlaneSwitch]) -> String {
    let names: Vec<String> = seq
        .iter()
        .map(|s| {
            let axis = match s.axis {
                Axis::X => 'x',
                Axis::Y => 'y',
                Axis::Z => 'z',
            };
            format!("{axis}{}", s.index)
        })
        .collect();
    names.join(" ")
}

/// `len` uniformly random plane presses on a cube of side `side`.
pub fn random_switch_script(rng: &mut impl RngCore, side: usize, len: usize) -> Vec<PlaneSwitch> {
    (0..len)
        .map(|_| {
            let r = rng.next_u64();
            let axis = [Axis::X, Axis::Y, Axis::Z][(r % 3) as usize];
            PlaneSwitch::new(axis, ((r >> 32) % side as u64) as usize)
        })
        .collect()
}

/// Machine-readable result of one CLI invocation.
///
/// Boards fill `m`, `n`, `x`, `y`; cubes fill `n` (the side) and
/// `sx`, `sy`, `sz`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sx: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sy: Option<Vec<i8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sz: Option<Vec<i8>>,
    pub signed_sum: i64,
    pub imbalance: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_min: Option<u64>,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ResultDocument {
    fn blank(n: usize, signed_sum: i64) -> Self {
        ResultDocument {
            m: None,
            n,
            x: None,
            y: None,
            sx: None,
            sy: None,
            sz: None,
            signed_sum,
            imbalance: signed_sum.unsigned_abs(),
            oracle_min: None,
            version: crate::VERSION.to_string(),
            generator: None,
            seed: None,
        }
    }

    pub fn for_board(a: &SignMatrix, outcome: &BalanceOutcome) -> Self {
        ResultDocument {
            m: Some(a.rows()),
            x: Some(outcome.switches.x().to_vec()),
            y: Some(outcome.switches.y().to_vec()),
            ..ResultDocument::blank(a.cols(), outcome.signed_sum)
        }
    }

    pub fn for_cube(c: &SignCube, switches: &PlaneSwitches, signed_sum: i64) -> Self {
        ResultDocument {
            sx: Some(switches.sx().to_vec()),
            sy: Some(switches.sy().to_vec()),
            sz: Some(switches.sz().to_vec()),
            ..ResultDocument::blank(c.side(), signed_sum)
        }
    }

    /// Records the seed a random input was drawn from.
    pub fn with_seed(mut self, seed: Option<u64>) -> Self {
        self.generator = seed.map(|_| GENERATOR.to_string());
        self.seed = seed;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ResultDocument = serde_json::from_str(text)
            .map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))?;
        if doc.imbalance != doc.signed_sum.unsigned_abs() {
            return Err(Error::parse(
                1,
                1,
                format!("imbalance {} is not |{}|", doc.imbalance, doc.signed_sum),
            ));
        }
        Ok(doc)
    }
}
