//! Gauss–Legendre rules and tensor-product cell averages.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::real::Real;

pub const MIN_ORDER: usize = 1;
pub const MAX_ORDER: usize = 64;

/// A `q`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes are stored in increasing order and are exactly antisymmetric
/// (`nodes[i] == -nodes[q-1-i]`), with matching symmetric weights.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T: Real = f64> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

/// `(P_q(x), P_q'(x))` by the three-term recurrence.
fn legendre<T: Real>(q: usize, x: &T) -> (T, T) {
    let mut p_prev = T::one();
    let mut p = x.clone();
    for k in 1..q {
        let kf = T::from_f64(k as f64);
        let two_k1 = T::from_f64((2 * k + 1) as f64);
        let next = two_k1
            .mul(x)
            .mul(&p)
            .sub(&kf.mul(&p_prev))
            .div(&T::from_f64((k + 1) as f64));
        p_prev = p;
        p = next;
    }
    // P_q'(x) = q (x P_q - P_{q-1}) / (x^2 - 1)
    let qf = T::from_f64(q as f64);
    let dp = qf
        .mul(&x.mul(&p).sub(&p_prev))
        .div(&x.mul(x).sub(&T::one()));
    (p, dp)
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(q: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&q) {
            return Err(Error::InvalidArgument(format!(
                "quadrature order {q} outside [{MIN_ORDER}, {MAX_ORDER}]"
            )));
        }
        if T::EPSILON > 1e-20 {
            // Narrow types get the wide rule rounded once, so nodes and
            // weights are correctly rounded.
            let wide = GaussLegendre::<crate::real::Extended>::new(q)?;
            return Ok(GaussLegendre {
                nodes: wide.nodes.iter().map(|t| T::from_f64(t.to_f64())).collect(),
                weights: wide.weights.iter().map(|w| T::from_f64(w.to_f64())).collect(),
            });
        }
        if q == 1 {
            return Ok(GaussLegendre {
                nodes: vec![T::zero()],
                weights: vec![T::from_f64(2.0)],
            });
        }
        // Newton iteration per positive root, seeded from the f64 asymptotic
        // guess.
        let iterations = 12;
        let half = q / 2;
        let mut pos_nodes = Vec::with_capacity(half);
        let mut pos_weights = Vec::with_capacity(half);
        for i in 0..half {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
            let mut x = T::from_f64(guess);
            let mut dp = T::one();
            for _ in 0..iterations {
                let (p, d) = legendre(q, &x);
                let step = p.div(&d);
                x = x.sub(&step);
                dp = d;
                if step.is_zero() {
                    break;
                }
            }
            let (_, d) = legendre(q, &x);
            dp = if d.is_zero() { dp } else { d };
            let one_minus = T::one().sub(&x.mul(&x));
            let w = T::from_f64(2.0).div(&one_minus.mul(&dp).mul(&dp));
            pos_nodes.push(x);
            pos_weights.push(w);
        }
        let mut nodes = Vec::with_capacity(q);
        let mut weights = Vec::with_capacity(q);
        for i in 0..half {
            nodes.push(pos_nodes[i].neg());
            weights.push(pos_weights[i].clone());
        }
        if q % 2 == 1 {
            let (_, d) = legendre(q, &T::zero());
            nodes.push(T::zero());
            weights.push(T::from_f64(2.0).div(&d.mul(&d)));
        }
        for i in (0..half).rev() {
            nodes.push(pos_nodes[i].clone());
            weights.push(pos_weights[i].clone());
        }
        Ok(GaussLegendre { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Mean of `f` over the axis-aligned square with the given center and
    /// side: `(1/4) sum_ij w_i w_j f(c + (side/2) (t_i, t_j))`.
    pub fn average(&self, f: &Expr, center: [T; 2], side: &T) -> Result<T> {
        let half = side.div(&T::from_f64(2.0));
        let xs: Vec<T> = self
            .nodes
            .iter()
            .map(|t| center[0].add(&half.mul(t)))
            .collect();
        let ys: Vec<T> = self
            .nodes
            .iter()
            .map(|t| center[1].add(&half.mul(t)))
            .collect();
        let mut total = T::zero();
        for (yj, wj) in ys.iter().zip(&self.weights) {
            let mut row = T::zero();
            for (xi, wi) in xs.iter().zip(&self.weights) {
                row = row.add(&wi.mul(&f.eval_in(xi, yj)?));
            }
            total = total.add(&wj.mul(&row));
        }
        Ok(total.div(&T::from_f64(4.0)))
    }
}

/// `I(f, x, l)`: the mean of `f` over the `l`-square centered at `center`,
/// by a `q x q` tensor Gauss–Legendre rule.
pub fn cell_average(f: &Expr, center: [f64; 2], side: f64, q: usize) -> Result<f64> {
    GaussLegendre::<f64>::new(q)?.average(f, center, &side)
}
