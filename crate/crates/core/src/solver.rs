//! Exact solution of the moment system
//! `sum_p A_p T_p^(k) = T_theta^(k)` for `k = 0..N-1`.
//!
//! Rows are scaled to integers and reduced by fraction-free (Bareiss)
//! elimination, so every intermediate stays an exact integer minor. The
//! solution set is then read off in rationals and checked by substitution.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::stencil::{mean_value_level, t_pk, validate_pairs, MeanValueLevel, StencilPair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    Unique,
    AffineFamily,
    Infeasible,
}

/// Solution set of the level-`N` moment system.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSet {
    pub kind: SolutionKind,
    pub pairs: Vec<StencilPair>,
    /// Particular solution with every free coefficient set to zero.
    pub particular: Option<Vec<Rational>>,
    /// Basis of the homogeneous solutions; empty unless `kind` is
    /// [`SolutionKind::AffineFamily`].
    pub null_basis: Vec<Vec<Rational>>,
    pub target_level: u32,
    /// Mean value level actually realized by `particular`.
    pub realized_level: Option<MeanValueLevel>,
}

/// Solution of an exact linear system `M x = b`.
#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution {
    Inconsistent,
    Solved {
        particular: Vec<Rational>,
        null_basis: Vec<Vec<Rational>>,
    },
}

/// Solves `matrix * x = rhs` exactly. `matrix` is row-major with every row of
/// equal length.
pub fn solve_exact(matrix: &[Vec<Rational>], rhs: &[Rational]) -> LinearSolution {
    let cols = matrix.first().map_or(0, Vec::len);
    // Augmented integer rows: clear each row's denominators.
    let mut rows: Vec<Vec<BigInt>> = matrix
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let lcm = row
                .iter()
                .chain(std::iter::once(b))
                .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
            row.iter()
                .chain(std::iter::once(b))
                .map(|r| r.numer() * (&lcm / r.denom()))
                .collect()
        })
        .collect();

    let pivots = bareiss_echelon(&mut rows, cols);

    let rank = pivots.len();
    if rows[rank..].iter().any(|row| !row[cols].is_zero()) {
        return LinearSolution::Inconsistent;
    }

    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();

    let zeros = vec![Rational::zero(); cols];
    let particular = back_substitute(&rows, &pivots, zeros.clone(), Rational::one());
    let null_basis = free_cols
        .iter()
        .map(|&f| {
            let mut seed = zeros.clone();
            seed[f] = Rational::one();
            back_substitute(&rows, &pivots, seed, Rational::zero())
        })
        .collect();

    LinearSolution::Solved {
        particular,
        null_basis,
    }
}

/// Fraction-free forward elimination to row echelon form. Returns the
/// `(row, column)` of each pivot. Columns are scanned in input order; a
/// zero candidate pivot is replaced by row exchange, never divided by.
fn bareiss_echelon(rows: &mut [Vec<BigInt>], cols: usize) -> Vec<(usize, usize)> {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(swap) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, swap);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c].clone();
            for j in c + 1..=cols {
                let v = &pivot_row[c] * &row[j] - &factor * &pivot_row[j];
                debug_assert!((&v % &prev).is_zero());
                row[j] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        // Rows above the pivot keep their scale; only the trailing block is
        // a minor of the pivot columns.
        prev = rows[r][c].clone();
        pivots.push((r, c));
        r += 1;
    }
    pivots
}

/// Reads one solution off the echelon form. `x` arrives holding the values
/// of the free columns (pivot entries are overwritten); the right-hand side
/// is scaled by `rhs_scale`, which is 0 for null-space vectors.
fn back_substitute(
    rows: &[Vec<BigInt>],
    pivots: &[(usize, usize)],
    mut x: Vec<Rational>,
    rhs_scale: Rational,
) -> Vec<Rational> {
    let cols = x.len();
    for &(r, c) in pivots.iter().rev() {
        let row = &rows[r];
        let mut acc = Rational::from_integer(row[cols].clone()) * &rhs_scale;
        for j in c + 1..cols {
            if !row[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[c] = acc / Rational::from_integer(row[c].clone());
    }
    x
}

/// Rows of the level-`n` moment system: `(T_p^(k))_p` and `T_theta^(k)`.
pub fn moment_system(pairs: &[StencilPair], n: u32) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    (0..n)
        .map(|k| {
            let row = pairs.iter().map(|p| t_pk(*p, k)).collect();
            (row, t_pk(StencilPair::THETA, k))
        })
        .unzip()
}

fn residual_is_zero(matrix: &[Vec<Rational>], rhs: &[Rational], x: &[Rational], homogeneous: bool) -> bool {
    matrix.iter().zip(rhs).all(|(row, b)| {
        let lhs = row
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (m, v)| acc + m * v);
        if homogeneous {
            lhs.is_zero()
        } else {
            &lhs == b
        }
    })
}

/// Solves for coefficients `{A_p}` achieving mean value level at least `n`.
pub fn solve_level(pairs: &[StencilPair], n: u32) -> Result<SolutionSet> {
    validate_pairs(pairs)?;
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("at least one stencil pair is required".into()));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("target level must be at least 1".into()));
    }
    let (matrix, rhs) = moment_system(pairs, n);
    let set = match solve_exact(&matrix, &rhs) {
        LinearSolution::Inconsistent => SolutionSet {
            kind: SolutionKind::Infeasible,
            pairs: pairs.to_vec(),
            particular: None,
            null_basis: Vec::new(),
            target_level: n,
            realized_level: None,
        },
        LinearSolution::Solved {
            particular,
            null_basis,
        } => {
            assert!(
                residual_is_zero(&matrix, &rhs, &particular, false)
                    && null_basis
                        .iter()
                        .all(|v| residual_is_zero(&matrix, &rhs, v, true)),
                "exact back-substitution left a nonzero residual"
            );
            let kind = if null_basis.is_empty() {
                SolutionKind::Unique
            } else {
                SolutionKind::AffineFamily
            };
            let realized = mean_value_level(pairs, &particular, (n + 2).max(crate::stencil::DEFAULT_K_MAX));
            SolutionSet {
                kind,
                pairs: pairs.to_vec(),
                particular: Some(particular),
                null_basis,
                target_level: n,
                realized_level: Some(realized),
            }
        }
    };
    Ok(set)
}

/// Largest `N <= n_cap` for which the level-`N` system is feasible, or 0 if
/// none is.
pub fn max_level(pairs: &[StencilPair], n_cap: u32) -> Result<u32> {
    validate_pairs(pairs)?;
    let mut best = 0;
    for n in 1..=n_cap {
        // Feasibility is monotone: the level-n system contains the level-(n-1) one.
        match solve_level(pairs, n)?.kind {
            SolutionKind::Infeasible => break,
            _ => best = n,
        }
    }
    Ok(best)
}

impl SolutionSet {
    pub fn is_feasible(&self) -> bool {
        self.kind != SolutionKind::Infeasible
    }

    /// `particular + sum_i t_i null_basis[i]`.
    pub fn member(&self, params: &[Rational]) -> Option<Vec<Rational>> {
        let base = self.particular.as_ref()?;
        if params.len() != self.null_basis.len() {
            return None;
        }
        let mut x = base.clone();
        for (t, v) in params.iter().zip(&self.null_basis) {
            for (xi, vi) in x.iter_mut().zip(v) {
                *xi += t * vi;
            }
        }
        Some(x)
    }

    /// The member of the solution set with least Euclidean norm, exactly.
    pub fn min_norm_member(&self) -> Option<Vec<Rational>> {
        let base = self.particular.as_ref()?;
        if self.null_basis.is_empty() {
            return Some(base.clone());
        }
        // Project out the null-space component: solve G t = -V^T x0.
        let dot = |a: &[Rational], b: &[Rational]| {
            a.iter()
                .zip(b)
                .fold(Rational::zero(), |acc, (u, v)| acc + u * v)
        };
        let gram: Vec<Vec<Rational>> = self
            .null_basis
            .iter()
            .map(|u| self.null_basis.iter().map(|v| dot(u, v)).collect())
            .collect();
        let rhs: Vec<Rational> = self.null_basis.iter().map(|v| -dot(v, base)).collect();
        match solve_exact(&gram, &rhs) {
            LinearSolution::Solved { particular, .. } => self.member(&particular),
            LinearSolution::Inconsistent => None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&SolutionFile::from(self))?)
    }
}

/// JSON form of a [`SolutionSet`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub kind: SolutionKind,
    pub pairs: Vec<[u32; 2]>,
    pub target_level: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub particular: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub null_basis: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_norm: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renorm: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub realized_level: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub realized_level_is_lower_bound: bool,
}

impl From<&SolutionSet> for SolutionFile {
    fn from(s: &SolutionSet) -> Self {
        let texts = |v: &[Rational]| v.iter().map(rational::to_text).collect::<Vec<_>>();
        let renorm = s
            .particular
            .as_ref()
            .and_then(|x| crate::stencil::renorm_constant(&s.pairs, x).ok())
            .map(|r| rational::to_text(&r));
        SolutionFile {
            kind: s.kind,
            pairs: s.pairs.iter().map(|p| [p.p1(), p.p2()]).collect(),
            target_level: s.target_level,
            particular: s.particular.as_deref().map(texts),
            null_basis: s.null_basis.iter().map(|v| texts(v)).collect(),
            min_norm: (s.kind == SolutionKind::AffineFamily)
                .then(|| s.min_norm_member())
                .flatten()
                .map(|v| texts(&v)),
            renorm,
            realized_level: s.realized_level.map(MeanValueLevel::lower_bound),
            realized_level_is_lower_bound: matches!(
                s.realized_level,
                Some(MeanValueLevel::AtLeast(_))
            ),
        }
    }
}
