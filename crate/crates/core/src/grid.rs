//! Dyadic decomposition of the unit square.
//!
//! A level-`m` cell is addressed either by a word `w = w1..wm` over
//! `{1,2,3,4}` (the composition `F_w1 ∘ … ∘ F_wm` of the corner maps
//! `F_i(x) = (x + q_i)/2` with `q1=(0,0)`, `q2=(1,0)`, `q3=(1,1)`,
//! `q4=(0,1)`) or by integer coordinates `(i, j)` with `0 <= i, j < 2^m`,
//! column `i` along x and row `j` along y. Storage is dense and row-major
//! in `(i, j)`; words are only a view.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::quadrature::GaussLegendre;
use crate::stencil::{neighbor_offsets, StencilPair};

/// Default quadrature order: exact through degree 23 in each variable.
pub const DEFAULT_QUAD_ORDER: usize = 12;

/// Finest level accepted by grid constructors (4^10 ≈ 10^6 cells).
pub const MAX_LEVEL: u32 = 10;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CellAddress {
    word: Vec<u8>,
}

impl CellAddress {
    pub fn new(word: Vec<u8>) -> Result<Self> {
        if let Some(&d) = word.iter().find(|d| !(1..=4).contains(*d)) {
            return Err(Error::InvalidDigit(d));
        }
        Ok(CellAddress { word })
    }

    pub fn root() -> Self {
        CellAddress { word: Vec::new() }
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn level(&self) -> u32 {
        self.word.len() as u32
    }

    /// Column and row of the cell at its level.
    pub fn coords(&self) -> (usize, usize) {
        self.word.iter().fold((0, 0), |(i, j), &d| {
            (2 * i + usize::from(d == 2 || d == 3), 2 * j + usize::from(d >= 3))
        })
    }

    pub fn from_coords(level: u32, i: usize, j: usize) -> Result<Self> {
        let n = 1usize << level;
        if i >= n || j >= n {
            return Err(Error::InvalidArgument(format!(
                "cell ({i},{j}) outside the level-{level} grid"
            )));
        }
        let word = (0..level)
            .rev()
            .map(|bit| {
                let (bi, bj) = ((i >> bit) & 1, (j >> bit) & 1);
                match (bi, bj) {
                    (0, 0) => 1,
                    (1, 0) => 2,
                    (1, 1) => 3,
                    _ => 4,
                }
            })
            .collect();
        Ok(CellAddress { word })
    }

    pub fn side(&self) -> f64 {
        side_at(self.level())
    }
}

const CORNERS: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

/// Center `F_w(1/2, 1/2)` and side `2^-m` of the cell with word `w`.
pub fn word_to_cell(w: &CellAddress) -> ([f64; 2], f64) {
    let center = w.word.iter().rev().fold([0.5, 0.5], |p, &d| {
        let q = CORNERS[(d - 1) as usize];
        [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0]
    });
    (center, w.side())
}

pub fn side_at(level: u32) -> f64 {
    (-(level as f64)).exp2()
}

pub fn center_of(level: u32, i: usize, j: usize) -> [f64; 2] {
    let l = side_at(level);
    [(i as f64 + 0.5) * l, (j as f64 + 0.5) * l]
}

/// Averages of one function over every cell of a single level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelGrid {
    level: u32,
    values: Vec<f64>,
}

impl LevelGrid {
    pub fn from_values(level: u32, values: Vec<f64>) -> Result<Self> {
        let n = 1usize << level;
        if values.len() != n * n {
            return Err(Error::InvalidArgument(format!(
                "level {level} needs {} values, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(LevelGrid { level, values })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Cells per side, `2^m`.
    pub fn width(&self) -> usize {
        1 << self.level
    }

    pub fn side(&self) -> f64 {
        side_at(self.level)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width() + i]
    }

    /// Value at `(i + di, j + dj)` if that cell exists.
    pub fn offset(&self, i: usize, j: usize, di: i64, dj: i64) -> Option<f64> {
        let n = self.width() as i64;
        let (a, b) = (i as i64 + di, j as i64 + dj);
        ((0..n).contains(&a) && (0..n).contains(&b)).then(|| self.get(a as usize, b as usize))
    }

    /// Row-major values, row `j` at `j * width ..`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Parent level: each parent is the mean of its four children.
    pub fn coarsen(&self) -> Option<LevelGrid> {
        if self.level == 0 {
            return None;
        }
        let n = self.width();
        let half = n / 2;
        let values = (0..half * half)
            .map(|k| {
                let (pi, pj) = (k % half, k / half);
                let (i, j) = (2 * pi, 2 * pj);
                ((self.get(i, j) + self.get(i + 1, j)) + (self.get(i, j + 1) + self.get(i + 1, j + 1)))
                    / 4.0
            })
            .collect();
        Some(LevelGrid {
            level: self.level - 1,
            values,
        })
    }
}

/// Averages at a finest level `m` and every coarser level down to 0.
#[derive(Clone, Debug, PartialEq)]
pub struct CellAverages {
    quad_order: usize,
    /// `levels[k]` holds level `k`.
    levels: Vec<LevelGrid>,
}

impl CellAverages {
    pub fn level(&self) -> u32 {
        self.finest().level
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn finest(&self) -> &LevelGrid {
        self.levels.last().expect("at least level 0")
    }

    pub fn at(&self, level: u32) -> Option<&LevelGrid> {
        self.levels.get(level as usize)
    }

    pub fn levels(&self) -> &[LevelGrid] {
        &self.levels
    }
}

/// Quadrature averages on every level-`m` cell, plus the coarser levels by
/// aggregation.
pub fn grid_averages(f: &Expr, m: u32, q: usize) -> Result<CellAverages> {
    if m > MAX_LEVEL {
        return Err(Error::InvalidArgument(format!(
            "level {m} exceeds the maximum of {MAX_LEVEL}"
        )));
    }
    let rule = GaussLegendre::<f64>::new(q)?;
    let n = 1usize << m;
    let l = side_at(m);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| rule.average(f, center_of(m, i, j), &l))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let finest = LevelGrid {
        level: m,
        values: rows.concat(),
    };
    let mut levels = vec![finest];
    while let Some(parent) = levels.last().and_then(LevelGrid::coarsen) {
        levels.push(parent);
    }
    levels.reverse();
    Ok(CellAverages {
        quad_order: q,
        levels,
    })
}

/// `I_p(f, x, l)`: sum of the averages over the `8 c_p` p-neighbors of the
/// `l`-square centered at `center`.
pub fn neighbor_average_sum(
    f: &Expr,
    center: [f64; 2],
    side: f64,
    p: StencilPair,
    q: usize,
) -> Result<f64> {
    let rule = GaussLegendre::<f64>::new(q)?;
    neighbor_offsets(p)
        .into_iter()
        .map(|(d1, d2)| {
            rule.average(
                f,
                [center[0] + d1 as f64 * side, center[1] + d2 as f64 * side],
                &side,
            )
        })
        .sum()
}

/// Cells of a level whose every stencil neighbor lies inside the square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorMask {
    level: u32,
    pairs: Vec<StencilPair>,
    flags: Vec<bool>,
}

impl InteriorMask {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn pairs(&self) -> &[StencilPair] {
        &self.pairs
    }

    pub fn width(&self) -> usize {
        1 << self.level
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.flags[j * self.width() + i]
    }

    pub fn count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Interior cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.width();
        self.flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(k, _)| (k % n, k / n))
    }
}

pub fn interior_mask(m: u32, pairs: &[StencilPair]) -> InteriorMask {
    let n = 1i64 << m;
    let offsets: Vec<(i64, i64)> = pairs.iter().flat_map(|p| neighbor_offsets(*p)).collect();
    let flags = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            offsets
                .iter()
                .all(|(di, dj)| (0..n).contains(&(i + di)) && (0..n).contains(&(j + dj)))
        })
        .collect();
    InteriorMask {
        level: m,
        pairs: pairs.to_vec(),
        flags,
    }
}
