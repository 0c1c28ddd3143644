//! Adaptive tensor-product Gauss–Legendre cubature for d ≤ 3.
//!
//! Every cell carries a 16-point tensor estimate and an error indicator
//! `|Q16 - Q8|`. The cells holding the largest share of the indicated
//! error are bisected along every axis until the indicated total drops
//! below the tolerance. Children are evaluated in parallel, but the cell
//! list and the compensated sum always run in the same order, so results
//! do not depend on the thread count.

use super::gauss_legendre::{gl16, gl8, Rule};
use crate::error::{Error, Result};
use rayon::prelude::*;

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy)]
struct Cell {
    lo: [f64; MAX_DIM],
    hi: [f64; MAX_DIM],
    value: f64,
    error: f64,
}

/// Kahan–Babuška compensated sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::default();
        iter.into_iter().for_each(|v| s.add(v));
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubatureResult {
    pub value: f64,
    pub error: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct CubatureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Initial cells per axis.
    pub initial: usize,
    pub max_cells: usize,
}

fn tensor_rule<F: Fn(&[f64]) -> f64>(f: &F, d: usize, lo: &[f64], hi: &[f64], rule: &Rule) -> f64 {
    let m = rule.nodes.len();
    let mut half = [0.0; MAX_DIM];
    let mut mid = [0.0; MAX_DIM];
    for k in 0..d {
        half[k] = 0.5 * (hi[k] - lo[k]);
        mid[k] = 0.5 * (hi[k] + lo[k]);
    }
    let total = m.pow(d as u32);
    let mut acc = CompensatedSum::default();
    let mut x = [0.0; MAX_DIM];
    for idx in 0..total {
        let mut rem = idx;
        let mut w = 1.0;
        for k in 0..d {
            let i = rem % m;
            rem /= m;
            x[k] = mid[k] + half[k] * rule.nodes[i];
            w *= rule.weights[i];
        }
        let v = f(&x[..d]);
        if v != 0.0 {
            acc.add(w * v);
        }
    }
    let vol: f64 = half[..d].iter().product();
    acc.value() * vol
}

fn eval_cell<F: Fn(&[f64]) -> f64>(f: &F, d: usize, lo: [f64; MAX_DIM], hi: [f64; MAX_DIM]) -> Cell {
    let value = tensor_rule(f, d, &lo[..d], &hi[..d], gl16());
    let coarse = tensor_rule(f, d, &lo[..d], &hi[..d], gl8());
    Cell {
        lo,
        hi,
        value,
        error: (value - coarse).abs(),
    }
}

fn split(cell: &Cell, d: usize) -> Vec<([f64; MAX_DIM], [f64; MAX_DIM])> {
    (0..1usize << d)
        .map(|mask| {
            let mut lo = cell.lo;
            let mut hi = cell.hi;
            for k in 0..d {
                let m = 0.5 * (cell.lo[k] + cell.hi[k]);
                if mask >> k & 1 == 0 {
                    hi[k] = m;
                } else {
                    lo[k] = m;
                }
            }
            (lo, hi)
        })
        .collect()
}

/// Integrates `f` over the box `[lo, hi]`.
pub fn integrate_box<F>(f: &F, lo: &[f64], hi: &[f64], opts: CubatureOptions) -> Result<CubatureResult>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let d = lo.len();
    if d == 0 || d != hi.len() {
        return Err(Error::DimensionMismatch {
            expected: d.max(1),
            got: hi.len(),
        });
    }
    if d > MAX_DIM {
        return Err(Error::DimensionTooLarge(d));
    }
    let per_axis = opts.initial.max(1);
    let mut boxes = Vec::with_capacity(per_axis.pow(d as u32));
    for idx in 0..per_axis.pow(d as u32) {
        let mut rem = idx;
        let mut blo = [0.0; MAX_DIM];
        let mut bhi = [0.0; MAX_DIM];
        for k in 0..d {
            let i = rem % per_axis;
            rem /= per_axis;
            let w = (hi[k] - lo[k]) / per_axis as f64;
            blo[k] = lo[k] + w * i as f64;
            bhi[k] = if i + 1 == per_axis { hi[k] } else { lo[k] + w * (i + 1) as f64 };
        }
        boxes.push((blo, bhi));
    }
    let mut cells: Vec<Cell> = boxes.par_iter().map(|&(l, h)| eval_cell(f, d, l, h)).collect();

    loop {
        let value = cells.iter().map(|c| c.value).collect::<CompensatedSum>().value();
        let error = cells.iter().map(|c| c.error).collect::<CompensatedSum>().value();
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol);
        if error <= target {
            return Ok(CubatureResult {
                value,
                error,
                cells: cells.len(),
            });
        }
        if cells.len() >= opts.max_cells || !error.is_finite() {
            return Err(Error::NoConvergence {
                estimate: value,
                error,
                cells: cells.len(),
            });
        }

        // bisect the worst cells until they cover half the indicated error
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[b].error.total_cmp(&cells[a].error).then(a.cmp(&b)));
        let budget = (opts.max_cells - cells.len()) / ((1 << d) - 1).max(1);
        let mut chosen = vec![false; cells.len()];
        let mut covered = 0.0;
        for &i in order.iter().take(budget.max(1)) {
            chosen[i] = true;
            covered += cells[i].error;
            if covered >= 0.5 * error {
                break;
            }
        }
        let children: Vec<_> = cells
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| c)
            .flat_map(|(cell, _)| split(cell, d))
            .collect();
        let fresh: Vec<Cell> = children.par_iter().map(|&(l, h)| eval_cell(f, d, l, h)).collect();
        let mut next: Vec<Cell> = cells
            .iter()
            .zip(&chosen)
            .filter(|(_, &c)| !c)
            .map(|(cell, _)| *cell)
            .collect();
        next.extend(fresh);
        cells = next;
    }
}
