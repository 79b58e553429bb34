//! Discrete energy, discrete Laplacian and gradient-norm recovery from cell
//! averages, plus continuum reference values.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{eval_jet2, Expr};
use crate::grid::{center_of, interior_mask, InteriorMask, LevelGrid};
use crate::quadrature::GaussLegendre;
use crate::rational;
use crate::stencil::{neighbor_offsets, StencilFamily};

/// Sub-cells per side of the composite rule behind [`dirichlet_reference`].
pub const REFERENCE_SUBDIVISIONS: usize = 32;

/// Recursive pairwise summation. Deterministic for a given slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Offsets with `d1 > 0`, or `d1 == 0 && d2 > 0`: one representative of each
/// `{d, -d}`, so every unordered neighbor pair is visited once.
fn half_offsets(family: &StencilFamily) -> Vec<((i64, i64), f64)> {
    family
        .pairs()
        .iter()
        .zip(family.coefficients())
        .flat_map(|(p, a)| {
            let w = rational::to_f64(a);
            neighbor_offsets(*p)
                .into_iter()
                .filter(|&(d1, d2)| d1 > 0 || (d1 == 0 && d2 > 0))
                .map(move |d| (d, w))
        })
        .collect()
}

fn check_levels(a: &LevelGrid, b: &LevelGrid) -> Result<()> {
    if a.level() != b.level() {
        return Err(Error::LevelMismatch {
            left: a.level(),
            right: b.level(),
        });
    }
    Ok(())
}

/// `E_m(f, g) = M_P sum_p A_p sum_{w ~p w'} (B_w'(f) - B_w(f)) (B_w'(g) - B_w(g))`,
/// each unordered adjacent pair of level-`m` cells counted once.
pub fn energy(avg_f: &LevelGrid, avg_g: &LevelGrid, stencil: &StencilFamily) -> Result<f64> {
    check_levels(avg_f, avg_g)?;
    let offsets = half_offsets(stencil);
    let n = avg_f.width();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..n {
                let (bf, bg) = (avg_f.get(i, j), avg_g.get(i, j));
                for &((di, dj), w) in &offsets {
                    if let (Some(nf), Some(ng)) =
                        (avg_f.offset(i, j, di, dj), avg_g.offset(i, j, di, dj))
                    {
                        acc += w * (nf - bf) * (ng - bg);
                    }
                }
            }
            acc
        })
        .collect();
    Ok(rational::to_f64(stencil.renorm()) * pairwise_sum(&rows))
}

/// `∫_S ∇f·∇g dμ` by a composite `q x q` Gauss–Legendre rule on a
/// `REFERENCE_SUBDIVISIONS`² sub-grid, gradients from [`eval_jet2`].
pub fn dirichlet_reference(f: &Expr, g: &Expr, q: usize) -> Result<f64> {
    dirichlet_reference_with(f, g, q, REFERENCE_SUBDIVISIONS)
}

pub fn dirichlet_reference_with(f: &Expr, g: &Expr, q: usize, subdivisions: usize) -> Result<f64> {
    let rule = GaussLegendre::<f64>::new(q)?;
    let h = 1.0 / subdivisions as f64;
    let cells: Vec<f64> = (0..subdivisions * subdivisions)
        .into_par_iter()
        .map(|k| {
            let c = [(k % subdivisions) as f64 * h + 0.5 * h, (k / subdivisions) as f64 * h + 0.5 * h];
            let mut cell = 0.0;
            for (ty, wy) in rule.nodes.iter().zip(&rule.weights) {
                let mut row = 0.0;
                for (tx, wx) in rule.nodes.iter().zip(&rule.weights) {
                    let pt = [c[0] + 0.5 * h * tx, c[1] + 0.5 * h * ty];
                    let (jf, jg) = (eval_jet2(f, pt)?, eval_jet2(g, pt)?);
                    row += wx * (jf.grad[0] * jg.grad[0] + jf.grad[1] * jg.grad[1]);
                }
                cell += wy * row;
            }
            Ok(cell / 4.0)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&cells) * h * h)
}

/// `Δ_m f` on the interior cells of one level; `None` elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplacianField {
    level: u32,
    values: Vec<Option<f64>>,
}

impl LaplacianField {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn width(&self) -> usize {
        1 << self.level
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.values[j * self.width() + i]
    }

    /// `(i, j, value)` for every interior cell, row-major.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.width();
        self.values
            .iter()
            .enumerate()
            .filter_map(move |(k, v)| v.map(|v| (k % n, k / n, v)))
    }
}

/// `Δ_m f(x_w) = M_P 4^m (sum_p A_p sum_{w' ~p w} B_w' - B_w)` on every
/// interior cell.
///
/// Evaluated in the equivalent zero-sum form `sum_p A_p sum (B_w' - B_w)`,
/// which holds because `8 sum_p c_p A_p = 1`.
pub fn discrete_laplacian(avg: &LevelGrid, stencil: &StencilFamily) -> Result<LaplacianField> {
    let m = avg.level();
    let mask = interior_mask(m, stencil.pairs());
    if mask.count() == 0 {
        return Err(Error::EmptyInterior { level: m });
    }
    let offsets = stencil.weighted_offsets();
    let scale = rational::to_f64(stencil.renorm()) * 4f64.powi(m as i32);
    let n = avg.width();
    let rows: Vec<Vec<Option<f64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..n)
                .map(|i| {
                    mask.contains(i, j).then(|| {
                        let b = avg.get(i, j);
                        let s: f64 = offsets
                            .iter()
                            .map(|&((di, dj), w)| {
                                w * (avg.get((i as i64 + di) as usize, (j as i64 + dj) as usize) - b)
                            })
                            .sum();
                        scale * s
                    })
                })
                .collect()
        })
        .collect();
    Ok(LaplacianField {
        level: m,
        values: rows.concat(),
    })
}

/// `(1/2) M_P l^-2 sum_p A_p sum_{w' ~p w} (B_w' - B_w)^2` at one interior
/// cell: the pre-limit estimate of `|∇f|^2` at its center.
pub fn gradient_norm_estimate(
    avg: &LevelGrid,
    cell: (usize, usize),
    stencil: &StencilFamily,
    mask: Option<&InteriorMask>,
) -> Result<f64> {
    let (i, j) = cell;
    let m = avg.level();
    let owned;
    let mask = match mask {
        Some(mk) if mk.level() == m => mk,
        _ => {
            owned = interior_mask(m, stencil.pairs());
            &owned
        }
    };
    if i >= avg.width() || j >= avg.width() || !mask.contains(i, j) {
        return Err(Error::BoundaryCell { level: m, i, j });
    }
    let b = avg.get(i, j);
    let s: f64 = stencil
        .weighted_offsets()
        .iter()
        .map(|&((di, dj), w)| {
            let d = avg.get((i as i64 + di) as usize, (j as i64 + dj) as usize) - b;
            w * d * d
        })
        .sum();
    let l = avg.side();
    Ok(0.5 * rational::to_f64(stencil.renorm()) * s / (l * l))
}

/// Maximum over interior cells of `|Δ_m f(x_w) - Δf(x_w)|`, with the
/// reference Laplacian from [`eval_jet2`] at each cell center.
pub fn laplacian_max_error(field: &LaplacianField, f: &Expr) -> Result<f64> {
    let m = field.level();
    field
        .interior()
        .map(|(i, j, v)| Ok((v - eval_jet2(f, center_of(m, i, j))?.laplacian()).abs()))
        .try_fold(0.0f64, |acc, e: Result<f64>| Ok(acc.max(e?)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::grid::grid_averages;
    use crate::rational::rat;
    use crate::stencil::StencilPair;

    fn axis_stencil() -> StencilFamily {
        StencilFamily::new(vec![StencilPair::new(0, 1)], vec![rat(1, 4)]).unwrap()
    }

    #[test]
    fn constant_has_no_energy() {
        let g = grid_averages(&parse("3").unwrap(), 3, 2).unwrap();
        assert_eq!(energy(g.finest(), g.finest(), &axis_stencil()).unwrap(), 0.0);
    }

    #[test]
    fn level_mismatch() {
        let a = grid_averages(&parse("x").unwrap(), 3, 2).unwrap();
        assert!(matches!(
            energy(a.finest(), a.at(2).unwrap(), &axis_stencil()),
            Err(Error::LevelMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn empty_interior() {
        let a = grid_averages(&parse("x").unwrap(), 1, 2).unwrap();
        assert!(matches!(
            discrete_laplacian(a.finest(), &axis_stencil()),
            Err(Error::EmptyInterior { level: 1 })
        ));
    }

    #[test]
    fn gradient_estimates() {
        let s = axis_stencil();
        let a = grid_averages(&parse("x").unwrap(), 3, 2).unwrap();
        assert!((gradient_norm_estimate(a.finest(), (3, 4), &s, None).unwrap() - 1.0).abs() < 1e-12);
        let b = grid_averages(&parse("x+y").unwrap(), 3, 2).unwrap();
        assert!((gradient_norm_estimate(b.finest(), (3, 4), &s, None).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(
            gradient_norm_estimate(a.finest(), (0, 4), &s, None),
            Err(Error::BoundaryCell { .. })
        ));
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|k| k as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }
}
