//! `(0, *, ∘, •)` matrices: the deformation patterns.
//!
//! A star marks a free complex entry, a circle a free real entry and a bullet
//! a free purely imaginary entry. [`assemble_pattern`] lays out the pattern of
//! the simplest miniversal deformation of a canonical matrix block by block.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::canonical::{close, CanonicalBlock, CanonicalSpec, ComplexMatrix, C64, SCALAR_EQ_TOL};
use crate::error::{rejected, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Entry {
    Zero,
    Star,
    Circle,
    Bullet,
}

impl Entry {
    /// Real parameters carried by one entry.
    pub fn params(self) -> usize {
        match self {
            Entry::Zero => 0,
            Entry::Star => 2,
            Entry::Circle | Entry::Bullet => 1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Entry::Zero => '.',
            Entry::Star => '*',
            Entry::Circle => 'o',
            Entry::Bullet => '!',
        }
    }

    /// Whether the real unit `E_ij` lies in the span of this entry.
    pub fn has_real(self) -> bool {
        matches!(self, Entry::Star | Entry::Circle)
    }

    /// Whether the imaginary unit `iE_ij` lies in the span of this entry.
    pub fn has_imag(self) -> bool {
        matches!(self, Entry::Star | Entry::Bullet)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    rows: usize,
    cols: usize,
    entries: Vec<Entry>,
    partition: Option<Vec<usize>>,
}

impl Pattern {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Entry::Zero; rows * cols],
            partition: None,
        }
    }

    pub fn filled(rows: usize, cols: usize, entry: Entry) -> Self {
        Self {
            rows,
            cols,
            entries: vec![entry; rows * cols],
            partition: None,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Entry>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(rejected("pattern must have positive dimensions"));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(rejected("pattern rows must have equal length"));
        }
        Ok(Self {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
            partition: None,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn partition(&self) -> Option<&[usize]> {
        self.partition.as_deref()
    }

    pub fn with_partition(mut self, partition: Vec<usize>) -> Result<Self> {
        let total: usize = partition.iter().sum();
        if self.rows != self.cols || total != self.rows {
            return Err(rejected(format!(
                "partition sums to {total}, pattern is {}x{}",
                self.rows, self.cols
            )));
        }
        self.partition = Some(partition);
        Ok(self)
    }

    pub fn get(&self, i: usize, j: usize) -> Entry {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, e: Entry) {
        self.entries[i * self.cols + j] = e;
    }

    /// Non-zero positions with their entries, row-major.
    pub fn support(&self) -> impl Iterator<Item = ((usize, usize), Entry)> + '_ {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != Entry::Zero)
            .map(move |(k, e)| ((k / self.cols, k % self.cols), *e))
    }

    pub fn count(&self, e: Entry) -> usize {
        self.entries.iter().filter(|x| **x == e).count()
    }

    /// Copies `sub` into this pattern with its top-left corner at `(r0, c0)`.
    fn place(&mut self, sub: &Pattern, r0: usize, c0: usize) {
        for i in 0..sub.rows {
            for j in 0..sub.cols {
                self.set(r0 + i, c0 + j, sub.get(i, j));
            }
        }
    }

    /// Entry-wise union; non-zero entries of `other` win.
    fn overlay(mut self, other: &Pattern) -> Pattern {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (dst, src) in self.entries.iter_mut().zip(&other.entries) {
            if *src != Entry::Zero {
                *dst = *src;
            }
        }
        self
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 1));
        for i in 0..self.rows {
            if i > 0 {
                out.push('\n');
            }
            out.extend((0..self.cols).map(|j| self.get(i, j).symbol()));
        }
        out
    }

    /// Parses the ASCII rendering produced by [`Pattern::to_ascii`].
    pub fn from_ascii(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.is_empty())
            .map(|line| {
                line.chars()
                    .map(|ch| match ch {
                        '.' => Ok(Entry::Zero),
                        '*' => Ok(Entry::Star),
                        'o' => Ok(Entry::Circle),
                        '!' => Ok(Entry::Bullet),
                        other => Err(rejected(format!("unknown pattern symbol {other:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Pattern::from_rows(rows)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ascii())
    }
}

#[derive(Serialize, Deserialize)]
struct PatternJson {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Entry>>,
}

impl Serialize for Pattern {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PatternJson {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .chunks(self.cols)
                .map(<[Entry]>::to_vec)
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pattern {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PatternJson::deserialize(d)?;
        let p = Pattern::from_rows(raw.entries).map_err(serde::de::Error::custom)?;
        if (p.rows, p.cols) != (raw.rows, raw.cols) {
            return Err(serde::de::Error::custom("pattern dimensions disagree with entries"));
        }
        Ok(p)
    }
}

/// Building blocks of the block patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrimitiveKind {
    /// `0^↙`: a full first column or a full last row, whichever is shorter.
    SwArrow,
    /// `0^⌐`: every other entry of the first column (from the bottom) or of
    /// the last row (from the left).
    SwVdash,
    /// Diagonal stars followed by a circle when the size is odd.
    Spoon,
    /// Diagonal stars followed by a bullet when the size is odd.
    FilledSpoon,
    /// `0^↕`: a full bottom row.
    UpDown,
    /// `P_mn`: stars at the end of the bottom row, `n - m - 1` of them.
    Pstrip,
}

pub fn primitive(kind: PrimitiveKind, m: usize, n: usize) -> Result<Pattern> {
    if m == 0 || n == 0 {
        return Err(rejected("primitive dimensions must be positive"));
    }
    let mut p = Pattern::zeros(m, n);
    match kind {
        PrimitiveKind::SwArrow => {
            if m <= n {
                (0..m).for_each(|i| p.set(i, 0, Entry::Star));
            } else {
                (0..n).for_each(|j| p.set(m - 1, j, Entry::Star));
            }
        }
        PrimitiveKind::SwVdash => {
            if m <= n {
                (0..m).rev().step_by(2).for_each(|i| p.set(i, 0, Entry::Star));
            } else {
                (0..n).step_by(2).for_each(|j| p.set(m - 1, j, Entry::Star));
            }
        }
        PrimitiveKind::Spoon | PrimitiveKind::FilledSpoon => {
            if m != n {
                return Err(rejected(format!("spoon patterns are square, got {m}x{n}")));
            }
            let k = n / 2;
            (0..k).for_each(|i| p.set(i, i, Entry::Star));
            if n % 2 == 1 {
                let odd = if kind == PrimitiveKind::Spoon {
                    Entry::Circle
                } else {
                    Entry::Bullet
                };
                p.set(k, k, odd);
            }
        }
        PrimitiveKind::UpDown => {
            (0..n).for_each(|j| p.set(m - 1, j, Entry::Star));
        }
        PrimitiveKind::Pstrip => {
            if m > n {
                return Err(rejected(format!("P strip needs m <= n, got {m}x{n}")));
            }
            (m + 1..n).for_each(|j| p.set(m - 1, j, Entry::Star));
        }
    }
    Ok(p)
}

/// Rotates the grid clockwise by `quarter_turns · 90°`.
pub fn rotate_cw(p: &Pattern, quarter_turns: i64) -> Pattern {
    let mut out = Pattern {
        partition: None,
        ..p.clone()
    };
    for _ in 0..quarter_turns.rem_euclid(4) {
        let (r, c) = (out.rows, out.cols);
        let mut next = Pattern::zeros(c, r);
        for i in 0..c {
            for j in 0..r {
                next.set(i, j, out.get(r - 1 - j, i));
            }
        }
        out = next;
    }
    out
}

/// `0^↖` of size `rows × cols`.
fn nw_arrow(rows: usize, cols: usize) -> Pattern {
    rotate_cw(&sw(cols, rows), 1)
}

/// `0^↗` of size `rows × cols`.
fn ne_arrow(rows: usize, cols: usize) -> Pattern {
    rotate_cw(&sw(rows, cols), 2)
}

fn sw(rows: usize, cols: usize) -> Pattern {
    primitive(PrimitiveKind::SwArrow, rows, cols).expect("positive dimensions")
}

fn vdash(rows: usize, cols: usize) -> Pattern {
    primitive(PrimitiveKind::SwVdash, rows, cols).expect("positive dimensions")
}

fn is_real(z: C64) -> bool {
    z.im.abs() <= SCALAR_EQ_TOL
}

pub fn diagonal_block_pattern(b: &CanonicalBlock) -> Result<Pattern> {
    let b = b.validated()?;
    Ok(match b {
        CanonicalBlock::H { size, .. } => {
            let mut p = Pattern::zeros(2 * size, 2 * size);
            p.place(&sw(size, size), size, 0);
            p
        }
        CanonicalBlock::Delta { size, mu } => {
            let kind = if is_real(mu) {
                PrimitiveKind::FilledSpoon
            } else {
                PrimitiveKind::Spoon
            };
            primitive(kind, size, size)?
        }
        CanonicalBlock::Jordan { size } => vdash(size, size),
    })
}

/// Patterns `(D_ji, D_ij)` for an ordered pair of blocks `b_i`, `b_j` with `i < j`.
///
/// `D_ji` is `dim(b_j) × dim(b_i)` and `D_ij` is `dim(b_i) × dim(b_j)`.
pub fn offdiagonal_pair_pattern(
    b_i: &CanonicalBlock,
    b_j: &CanonicalBlock,
) -> Result<(Pattern, Pattern)> {
    let b_i = b_i.validated()?;
    let b_j = b_j.validated()?;
    if b_i.kind_rank() > b_j.kind_rank() {
        return Err(rejected(
            "pair order must be H before Delta before Jordan",
        ));
    }
    let (di, dj) = (b_i.dim(), b_j.dim());
    let zero_pair = || (Pattern::zeros(dj, di), Pattern::zeros(di, dj));
    use CanonicalBlock::*;
    Ok(match (b_i, b_j) {
        (H { size: m, lambda: l1 }, H { size: n, lambda: l2 }) => {
            if close(l1, l2) {
                let mut lower = Pattern::zeros(2 * n, 2 * m);
                lower.place(&ne_arrow(n, m), 0, m);
                lower.place(&sw(n, m), n, 0);
                (lower, Pattern::zeros(di, dj))
            } else {
                zero_pair()
            }
        }
        (Delta { size: m, mu: u1 }, Delta { size: n, mu: u2 }) => {
            if close(u1, u2) || close(u1, -u2) {
                (nw_arrow(n, m), Pattern::zeros(m, n))
            } else {
                zero_pair()
            }
        }
        (Jordan { size: m }, Jordan { size: n }) => {
            if m < n {
                return Err(rejected(format!(
                    "Jordan pair needs the larger block first, got J_{m} before J_{n}"
                )));
            }
            let upper = vdash(m, n);
            let mut lower = vdash(n, m);
            if n % 2 == 1 {
                lower = lower.overlay(&primitive(PrimitiveKind::Pstrip, n, m)?);
            }
            (lower, upper)
        }
        (H { .. }, Delta { .. }) => zero_pair(),
        (H { .. } | Delta { .. }, Jordan { size: n }) => {
            if n % 2 == 1 {
                (primitive(PrimitiveKind::UpDown, dj, di)?, Pattern::zeros(di, dj))
            } else {
                zero_pair()
            }
        }
        _ => unreachable!("kind order checked above"),
    })
}

/// The full pattern `D` of the simplest miniversal deformation of the canonical matrix.
pub fn assemble_pattern(spec: &CanonicalSpec) -> Result<Pattern> {
    let n = spec.dim();
    let blocks = spec.blocks();
    let offsets = spec.offsets();
    let mut p = Pattern::zeros(n, n);
    for (i, (bi, &oi)) in blocks.iter().zip(&offsets).enumerate() {
        p.place(&diagonal_block_pattern(bi)?, oi, oi);
        for (bj, &oj) in blocks.iter().zip(&offsets).skip(i + 1) {
            let (lower, upper) = offdiagonal_pair_pattern(bi, bj)?;
            p.place(&lower, oj, oi);
            p.place(&upper, oi, oj);
        }
    }
    p.with_partition(spec.partition())
}

/// Real codimension carried by the pattern: twice the stars plus circles plus bullets.
pub fn codim(p: &Pattern) -> usize {
    p.entries.iter().map(|e| e.params()).sum()
}

/// Real parameters `(ε_ij, ε'_ij)` keyed by 0-based grid position.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParameterAssignment(pub BTreeMap<(usize, usize), (f64, f64)>);

impl ParameterAssignment {
    /// All-zero parameters for every non-zero position of `p`.
    pub fn zeros_for(p: &Pattern) -> Self {
        Self(p.support().map(|(pos, _)| (pos, (0.0, 0.0))).collect())
    }
}

/// Replaces stars by `ε + iε'`, circles by `ε`, bullets by `iε'`.
pub fn instantiate(p: &Pattern, params: &ParameterAssignment) -> Result<ComplexMatrix> {
    let support: Vec<_> = p.support().collect();
    if support.len() != params.0.len() {
        return Err(rejected(format!(
            "pattern has {} free positions, got {} parameters",
            support.len(),
            params.0.len()
        )));
    }
    let mut out = ComplexMatrix::zeros(p.rows, p.cols);
    for ((i, j), e) in support {
        let &(re, im) = params
            .0
            .get(&(i, j))
            .ok_or_else(|| rejected(format!("missing parameter for position ({i}, {j})")))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(rejected(format!("parameter at ({i}, {j}) is not finite")));
        }
        out[(i, j)] = match e {
            Entry::Star => C64::new(re, im),
            Entry::Circle => C64::new(re, 0.0),
            Entry::Bullet => C64::new(0.0, im),
            Entry::Zero => unreachable!(),
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn stars(p: &Pattern) -> Vec<(usize, usize)> {
        p.support()
            .filter(|(_, e)| *e == Entry::Star)
            .map(|(pos, _)| pos)
            .collect()
    }

    fn spec(blocks: Vec<CanonicalBlock>) -> CanonicalSpec {
        CanonicalSpec::new(blocks).unwrap()
    }

    #[test]
    fn sw_arrow_wide() {
        let p = primitive(PrimitiveKind::SwArrow, 2, 3).unwrap();
        assert_eq!(stars(&p), vec![(0, 0), (1, 0)]);
        let tall = primitive(PrimitiveKind::SwArrow, 3, 2).unwrap();
        assert_eq!(stars(&tall), vec![(2, 0), (2, 1)]);
    }

    #[test]
    fn sw_vdash_square_uses_column() {
        let p = primitive(PrimitiveKind::SwVdash, 3, 3).unwrap();
        assert_eq!(stars(&p), vec![(0, 0), (2, 0)]);
        let tall = primitive(PrimitiveKind::SwVdash, 4, 3).unwrap();
        assert_eq!(stars(&tall), vec![(3, 0), (3, 2)]);
        let wide = primitive(PrimitiveKind::SwVdash, 4, 6).unwrap();
        assert_eq!(stars(&wide), vec![(1, 0), (3, 0)]);
    }

    #[test]
    fn spoons() {
        let p = primitive(PrimitiveKind::Spoon, 3, 3).unwrap();
        assert_eq!(p.to_ascii(), "*..\n.o.\n...");
        let f = primitive(PrimitiveKind::FilledSpoon, 3, 3).unwrap();
        assert_eq!(f.to_ascii(), "*..\n.!.\n...");
        let even = primitive(PrimitiveKind::Spoon, 4, 4).unwrap();
        assert_eq!(even.to_ascii(), "*...\n.*..\n....\n....");
        assert!(primitive(PrimitiveKind::Spoon, 2, 3).is_err());
    }

    #[test]
    fn p_strip() {
        assert_eq!(stars(&primitive(PrimitiveKind::Pstrip, 1, 3).unwrap()), vec![(0, 2)]);
        assert_eq!(
            stars(&primitive(PrimitiveKind::Pstrip, 2, 5).unwrap()),
            vec![(1, 3), (1, 4)]
        );
        assert!(stars(&primitive(PrimitiveKind::Pstrip, 2, 3).unwrap()).is_empty());
        assert!(primitive(PrimitiveKind::Pstrip, 3, 2).is_err());
    }

    #[test]
    fn up_down_is_bottom_row() {
        let p = primitive(PrimitiveKind::UpDown, 2, 3).unwrap();
        assert_eq!(p.to_ascii(), "...\n***");
    }

    #[test]
    fn rotations() {
        let p = primitive(PrimitiveKind::SwArrow, 2, 2).unwrap();
        assert_eq!(rotate_cw(&p, 0), p);
        assert_eq!(rotate_cw(&p, 4), p);
        assert_eq!(rotate_cw(&p, -1), rotate_cw(&p, 3));
        let strip = primitive(PrimitiveKind::SwArrow, 1, 2).unwrap();
        assert_eq!(strip.to_ascii(), "*.");
        assert_eq!(rotate_cw(&strip, 2).to_ascii(), ".*");
        // clockwise: the first column becomes the top row
        let col = primitive(PrimitiveKind::SwArrow, 2, 3).unwrap();
        assert_eq!(rotate_cw(&col, 1).to_ascii(), "**\n..\n..");
    }

    #[test]
    fn corner_arrows() {
        assert_eq!(nw_arrow(2, 3).to_ascii(), "*..\n*..");
        assert_eq!(nw_arrow(3, 2).to_ascii(), "**\n..\n..");
        assert_eq!(nw_arrow(3, 3).to_ascii(), "***\n...\n...");
        assert_eq!(ne_arrow(2, 3).to_ascii(), "..*\n..*");
        assert_eq!(ne_arrow(3, 2).to_ascii(), "**\n..\n..");
    }

    #[test]
    fn diagonal_patterns() {
        let h = diagonal_block_pattern(&CanonicalBlock::h(1, c(2., 0.)).unwrap()).unwrap();
        assert_eq!(h.to_ascii(), "..\n*.");
        let d = diagonal_block_pattern(&CanonicalBlock::delta(3, c(0., 1.)).unwrap()).unwrap();
        assert_eq!(d.to_ascii(), "*..\n.o.\n...");
        let d1 = diagonal_block_pattern(&CanonicalBlock::delta(1, c(1., 0.)).unwrap()).unwrap();
        assert_eq!(d1.to_ascii(), "!");
        let generic = CanonicalBlock::delta(1, c(0.6, 0.8)).unwrap();
        assert_eq!(diagonal_block_pattern(&generic).unwrap().to_ascii(), "o");
        let j = diagonal_block_pattern(&CanonicalBlock::jordan(2).unwrap()).unwrap();
        assert_eq!(j.to_ascii(), "..\n*.");
    }

    #[test]
    fn pair_h_distinct_lambda() {
        let (lo, up) = offdiagonal_pair_pattern(
            &CanonicalBlock::h(1, c(2., 0.)).unwrap(),
            &CanonicalBlock::h(1, c(3., 0.)).unwrap(),
        )
        .unwrap();
        assert_eq!(codim(&lo) + codim(&up), 0);
        assert_eq!((lo.rows(), lo.cols()), (2, 2));
    }

    #[test]
    fn pair_h_equal_lambda() {
        let (lo, up) = offdiagonal_pair_pattern(
            &CanonicalBlock::h(2, c(2., 0.)).unwrap(),
            &CanonicalBlock::h(1, c(2., 0.)).unwrap(),
        )
        .unwrap();
        assert_eq!((lo.rows(), lo.cols()), (2, 4));
        assert_eq!(lo.to_ascii(), "...*\n*...");
        assert_eq!(codim(&up), 0);
    }

    #[test]
    fn pair_delta_opposite_mu() {
        let (lo, up) = offdiagonal_pair_pattern(
            &CanonicalBlock::delta(1, c(1., 0.)).unwrap(),
            &CanonicalBlock::delta(1, c(-1., 0.)).unwrap(),
        )
        .unwrap();
        assert_eq!(lo.to_ascii(), "*");
        assert_eq!(up.to_ascii(), ".");
    }

    #[test]
    fn pair_jordan_three_one() {
        let (lo, up) = offdiagonal_pair_pattern(
            &CanonicalBlock::jordan(3).unwrap(),
            &CanonicalBlock::jordan(1).unwrap(),
        )
        .unwrap();
        assert_eq!(lo.to_ascii(), "*.*");
        assert_eq!(up.to_ascii(), ".\n.\n*");
        assert!(offdiagonal_pair_pattern(
            &CanonicalBlock::jordan(1).unwrap(),
            &CanonicalBlock::jordan(3).unwrap()
        )
        .is_err());
    }

    #[test]
    fn pair_h_jordan_odd() {
        let (lo, up) = offdiagonal_pair_pattern(
            &CanonicalBlock::h(1, c(2., 0.)).unwrap(),
            &CanonicalBlock::jordan(1).unwrap(),
        )
        .unwrap();
        assert_eq!(lo.to_ascii(), "**");
        assert_eq!(up.to_ascii(), ".\n.");
        assert!(offdiagonal_pair_pattern(
            &CanonicalBlock::jordan(1).unwrap(),
            &CanonicalBlock::h(1, c(2., 0.)).unwrap()
        )
        .is_err());
    }

    #[test]
    fn assembled_patterns() {
        let p = assemble_pattern(&spec(vec![CanonicalBlock::jordan(1).unwrap()])).unwrap();
        assert_eq!(p.to_ascii(), "*");
        let p = assemble_pattern(&spec(vec![
            CanonicalBlock::h(1, c(2., 0.)).unwrap(),
            CanonicalBlock::jordan(1).unwrap(),
        ]))
        .unwrap();
        assert_eq!(p.to_ascii(), "...\n*..\n***");
        assert_eq!(p.partition(), Some(&[2, 1][..]));
    }

    #[test]
    fn codim_counts() {
        assert_eq!(codim(&Pattern::zeros(2, 2)), 0);
        let d3 = assemble_pattern(&spec(vec![CanonicalBlock::delta(3, c(0., 1.)).unwrap()])).unwrap();
        assert_eq!(codim(&d3), 3);
        let j3 = assemble_pattern(&spec(vec![CanonicalBlock::jordan(3).unwrap()])).unwrap();
        assert_eq!(codim(&j3), 4);
    }

    #[test]
    fn instantiate_spoon() {
        let p = primitive(PrimitiveKind::Spoon, 3, 3).unwrap();
        let mut params = ParameterAssignment::default();
        params.0.insert((0, 0), (1.0, 2.0));
        params.0.insert((1, 1), (3.0, 7.0));
        let m = instantiate(&p, &params).unwrap();
        assert_eq!(m[(0, 0)], c(1., 2.));
        assert_eq!(m[(1, 1)], c(3., 0.));
        assert_eq!(m[(2, 2)], c(0., 0.));
    }

    #[test]
    fn instantiate_bullet_and_zero() {
        let p = Pattern::filled(1, 1, Entry::Bullet);
        let mut params = ParameterAssignment::default();
        params.0.insert((0, 0), (9.0, 5.0));
        assert_eq!(instantiate(&p, &params).unwrap()[(0, 0)], c(0., 5.));
        let full = Pattern::filled(2, 2, Entry::Star);
        let z = instantiate(&full, &ParameterAssignment::zeros_for(&full)).unwrap();
        assert_eq!(z, ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn instantiate_key_mismatch() {
        let p = Pattern::filled(1, 2, Entry::Star);
        let mut params = ParameterAssignment::default();
        params.0.insert((0, 0), (1.0, 0.0));
        assert!(instantiate(&p, &params).is_err());
        params.0.insert((5, 5), (1.0, 0.0));
        assert!(instantiate(&p, &params).is_err());
    }

    #[test]
    fn delta_pair_sign_symmetry() {
        let a = spec(vec![
            CanonicalBlock::delta(2, c(0., 1.)).unwrap(),
            CanonicalBlock::delta(3, c(0., -1.)).unwrap(),
        ]);
        let b = spec(vec![
            CanonicalBlock::delta(3, c(0., -1.)).unwrap(),
            CanonicalBlock::delta(2, c(0., 1.)).unwrap(),
        ]);
        let pa = assemble_pattern(&a).unwrap();
        let pb = assemble_pattern(&b).unwrap();
        assert_eq!(pa.count(Entry::Star), pb.count(Entry::Star));
        assert_eq!(codim(&pa), codim(&pb));
    }

    #[test]
    fn ascii_and_json_round_trip() {
        let p = assemble_pattern(&spec(vec![
            CanonicalBlock::delta(3, c(0., 1.)).unwrap(),
            CanonicalBlock::jordan(1).unwrap(),
        ]))
        .unwrap();
        let back = Pattern::from_ascii(&p.to_ascii()).unwrap();
        assert_eq!(back.to_ascii(), p.to_ascii());
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.starts_with(r#"{"rows":4,"cols":4,"entries":[["star","zero""#));
        let parsed: Pattern = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed.to_ascii(), p.to_ascii());
    }

    fn arb_pattern() -> impl Strategy<Value = Pattern> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(
                prop_oneof![
                    Just(Entry::Zero),
                    Just(Entry::Star),
                    Just(Entry::Circle),
                    Just(Entry::Bullet)
                ],
                r * c,
            )
            .prop_map(move |entries| Pattern {
                rows: r,
                cols: c,
                entries,
                partition: None,
            })
        })
    }

    proptest! {
        #[test]
        fn rotation_preserves_entry_multiset(p in arb_pattern(), k in -8i64..8) {
            let q = rotate_cw(&p, k);
            for e in [Entry::Zero, Entry::Star, Entry::Circle, Entry::Bullet] {
                prop_assert_eq!(q.count(e), p.count(e));
            }
            prop_assert_eq!(rotate_cw(&q, 4 - k.rem_euclid(4)), p);
        }
    }
}
