//! Vertex enumeration of the transportation polytope `cpl(π1, π2)`.
//!
//! Every vertex has a forest support, and every forest has a leaf line
//! (a row or column with a single support cell) whose cell carries the
//! full residual of that line, i.e. `min(row residual, column residual)`.
//! Removing the saturated line(s) leaves a vertex of the smaller residual
//! problem. So the "pick a cell, saturate it, recurse" search below visits
//! every vertex, and every plan it builds is acyclic, hence a vertex.

use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;

use super::{Coupling, Distribution, LpError};
use crate::rational::Rational;

pub const DEFAULT_VERTEX_BOUND: usize = 4;

/// Largest support size accepted by the bounded entry point; supports are
/// packed into a 64-bit cell mask.
const HARD_LIMIT: usize = 8;

pub fn enumerate_transport_vertices(left: &Distribution, right: &Distribution) -> Result<Vec<Coupling>, LpError> {
    enumerate_transport_vertices_bounded(left, right, DEFAULT_VERTEX_BOUND)
}

/// All vertices, sorted and free of duplicates. Fails when either support
/// is larger than `bound` (itself capped at 8).
pub fn enumerate_transport_vertices_bounded(
    left: &Distribution,
    right: &Distribution,
    bound: usize,
) -> Result<Vec<Coupling>, LpError> {
    let bound = bound.min(HARD_LIMIT);
    if left.len() > bound || right.len() > bound {
        return Err(LpError::SupportTooLarge {
            left: left.len(),
            right: right.len(),
            bound,
        });
    }
    if left.is_empty() || right.is_empty() {
        return Err(LpError::MarginalInvalid("empty distribution".into()));
    }
    let rows = left.support();
    let cols = right.support();
    let a: Vec<Rational> = rows.iter().map(|&x| left.prob(x)).collect();
    let b: Vec<Rational> = cols.iter().map(|&y| right.prob(y)).collect();

    let mut search = Search {
        m: rows.len(),
        n: cols.len(),
        memo: HashMap::new(),
    };
    let full_rows = (1u32 << rows.len()) - 1;
    let full_cols = (1u32 << cols.len()) - 1;
    let supports = search.run(full_rows, full_cols, &a, &b);

    let mut out: Vec<Coupling> = supports
        .iter()
        .map(|&mask| {
            let plan = plan_from_support(mask, &a, &b, cols.len());
            Coupling::new(plan.into_iter().map(|((i, j), v)| ((rows[i], cols[j]), v)))
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

type Key = (u32, u32, Vec<Rational>);

struct Search {
    m: usize,
    n: usize,
    memo: HashMap<Key, BTreeSet<u64>>,
}

impl Search {
    /// Supports of all vertices of the residual problem on the active rows
    /// and columns; `a` and `b` hold residuals for every line.
    fn run(&mut self, rows: u32, cols: u32, a: &[Rational], b: &[Rational]) -> BTreeSet<u64> {
        if rows == 0 || cols == 0 {
            debug_assert!(rows == 0 && cols == 0, "residual masses must balance");
            return BTreeSet::from([0]);
        }
        let key: Key = (
            rows,
            cols,
            active(rows, self.m)
                .map(|i| a[i].clone())
                .chain(active(cols, self.n).map(|j| b[j].clone()))
                .collect(),
        );
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut result = BTreeSet::new();
        for i in active(rows, self.m) {
            for j in active(cols, self.n) {
                let x = a[i].clone().min(b[j].clone());
                let mut a2 = a.to_vec();
                let mut b2 = b.to_vec();
                a2[i] -= &x;
                b2[j] -= &x;
                let mut rows2 = rows;
                let mut cols2 = cols;
                if a2[i].is_zero() {
                    rows2 &= !(1 << i);
                }
                if b2[j].is_zero() {
                    cols2 &= !(1 << j);
                }
                let cell = 1u64 << (i * self.n + j);
                for sub in self.run(rows2, cols2, &a2, &b2) {
                    result.insert(sub | cell);
                }
            }
        }
        self.memo.insert(key, result.clone());
        result
    }
}

fn active(mask: u32, len: usize) -> impl Iterator<Item = usize> {
    (0..len).filter(move |i| mask & (1 << i) != 0)
}

/// Recovers the unique plan on an acyclic support by peeling leaf lines.
fn plan_from_support(mask: u64, a: &[Rational], b: &[Rational], n: usize) -> Vec<((usize, usize), Rational)> {
    let mut cells: Vec<(usize, usize)> = (0..64)
        .filter(|bit| mask & (1u64 << bit) != 0)
        .map(|bit| (bit as usize / n, bit as usize % n))
        .collect();
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut plan = Vec::with_capacity(cells.len());
    while !cells.is_empty() {
        let pos = cells
            .iter()
            .position(|&(i, j)| {
                cells.iter().filter(|c| c.0 == i).count() == 1 || cells.iter().filter(|c| c.1 == j).count() == 1
            })
            .expect("forest supports always have a leaf line");
        let (i, j) = cells.swap_remove(pos);
        let row_leaf = cells.iter().all(|c| c.0 != i);
        let v = if row_leaf { a[i].clone() } else { b[j].clone() };
        a[i] -= &v;
        b[j] -= &v;
        plan.push(((i, j), v));
    }
    plan
}
