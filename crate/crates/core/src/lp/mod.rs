//! Exact linear programming for the two liftings of a ground pseudometric
//! to distributions, plus vertex enumeration of transportation polytopes.

mod kantorovich;
pub mod simplex;
mod transport;
mod vertices;

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::model::SuccessorRow;
use crate::rational::Rational;

pub use kantorovich::{solve_kantorovich_max, Potential};
pub use transport::solve_transport_min;
pub use vertices::{enumerate_transport_vertices, enumerate_transport_vertices_bounded, DEFAULT_VERTEX_BOUND};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("invalid marginal: {0}")]
    MarginalInvalid(String),
    #[error("supports {left}x{right} exceed the vertex enumeration bound {bound}")]
    SupportTooLarge { left: usize, right: usize, bound: usize },
}

/// A finitely supported probability distribution over point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Distribution {
    entries: BTreeMap<usize, Rational>,
}

impl Distribution {
    /// Builds a distribution; zero entries are dropped, negative entries or a
    /// total other than 1 are rejected.
    pub fn new<I: IntoIterator<Item = (usize, Rational)>>(entries: I) -> Result<Self, LpError> {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (x, p) in entries {
            if p.is_negative() {
                return Err(LpError::MarginalInvalid(format!("negative mass {p} at point {x}")));
            }
            *map.entry(x).or_insert_with(Rational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(LpError::MarginalInvalid(format!("total mass {total} is not 1")));
        }
        Ok(Self { entries: map })
    }

    pub fn point(x: usize) -> Self {
        Self {
            entries: BTreeMap::from([(x, Rational::one())]),
        }
    }

    /// `None` for a blocking row.
    pub fn from_row(row: &SuccessorRow) -> Option<Self> {
        if row.is_blocking() {
            None
        } else {
            Some(Self {
                entries: row.iter().map(|(t, p)| (t, p.clone())).collect(),
            })
        }
    }

    pub fn prob(&self, x: usize) -> Rational {
        self.entries.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(x, p)| (*x, p))
    }

    pub fn support(&self) -> Vec<usize> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_point(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }
}

/// Square table of rationals indexed by point pairs, used for ground costs
/// and pairwise distances.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairTable {
    n: usize,
    values: Vec<Rational>,
}

impl PairTable {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            values: vec![Rational::zero(); n * n],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Rational>(n: usize, mut f: F) -> Self {
        let mut values = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                values.push(f(i, j));
            }
        }
        Self { n, values }
    }

    /// 0 on the diagonal, 1 elsewhere.
    pub fn discrete(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { Rational::zero() } else { Rational::one() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.values[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.values[i * self.n + j] = v;
    }

    pub fn set_symmetric(&mut self, i: usize, j: usize, v: Rational) {
        self.values[j * self.n + i] = v.clone();
        self.values[i * self.n + j] = v;
    }

    pub fn covers(&self, d: &Distribution) -> bool {
        d.max_point().is_none_or(|x| x < self.n)
    }
}

/// A sparse joint distribution on point pairs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coupling {
    entries: BTreeMap<(usize, usize), Rational>,
}

impl Coupling {
    pub fn new<I: IntoIterator<Item = ((usize, usize), Rational)>>(entries: I) -> Self {
        let mut map: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (k, p) in entries {
            *map.entry(k).or_insert_with(Rational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        Self { entries: map }
    }

    pub fn get(&self, x: usize, y: usize) -> Rational {
        self.entries.get(&(x, y)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        self.entries.iter().map(|(k, p)| (*k, p))
    }

    pub fn support(&self) -> Vec<(usize, usize)> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `E_μ(f)`.
    pub fn expect<F: FnMut(usize, usize) -> Rational>(&self, mut f: F) -> Rational {
        self.entries.iter().map(|(&(x, y), p)| p * f(x, y)).sum()
    }

    pub fn cost(&self, ground: &PairTable) -> Rational {
        self.expect(|x, y| ground.get(x, y).clone())
    }

    /// Whether both marginals match exactly and all masses are positive.
    pub fn has_marginals(&self, left: &Distribution, right: &Distribution) -> bool {
        let mut l: BTreeMap<usize, Rational> = BTreeMap::new();
        let mut r: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&(x, y), p) in &self.entries {
            if !p.is_positive() {
                return false;
            }
            *l.entry(x).or_insert_with(Rational::zero) += p;
            *r.entry(y).or_insert_with(Rational::zero) += p;
        }
        l == left.entries && r == right.entries
    }
}

fn check_inputs(ground: &PairTable, left: &Distribution, right: &Distribution) -> Result<(), LpError> {
    for d in [left, right] {
        if d.is_empty() {
            return Err(LpError::MarginalInvalid("empty distribution".into()));
        }
        if !ground.covers(d) {
            return Err(LpError::MarginalInvalid(format!(
                "point outside the {}-point cost table",
                ground.size()
            )));
        }
    }
    Ok(())
}

/// Lifts `ground` to successor rows: 0 if both rows are blocking, 1 if
/// exactly one is, the optimal transport cost otherwise.
pub fn lift_with_blocking(ground: &PairTable, left: &SuccessorRow, right: &SuccessorRow) -> Rational {
    match (Distribution::from_row(left), Distribution::from_row(right)) {
        (None, None) => Rational::zero(),
        (None, Some(_)) | (Some(_), None) => Rational::one(),
        (Some(l), Some(r)) => {
            solve_transport_min(ground, &l, &r)
                .expect("validated rows are proper distributions")
                .0
        }
    }
}

/// Weak duality between one feasible coupling and one feasible potential:
/// the potential's gap never exceeds the coupling's cost.
pub fn weak_duality_holds(
    ground: &PairTable,
    left: &Distribution,
    right: &Distribution,
    coupling: &Coupling,
    potential: &Potential,
) -> bool {
    let gap = (potential.expect(left) - potential.expect(right)).abs();
    gap <= coupling.cost(ground)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).is_ok());
        assert!(matches!(
            Distribution::new([(0, ratio(1, 2))]),
            Err(LpError::MarginalInvalid(_))
        ));
        assert!(matches!(
            Distribution::new([(0, ratio(3, 2)), (1, ratio(-1, 2))]),
            Err(LpError::MarginalInvalid(_))
        ));
        let d = Distribution::new([(0, ratio(1, 1)), (1, ratio(0, 1))]).unwrap();
        assert_eq!(d.support(), vec![0]);
    }

    #[test]
    fn blocking_lift_conventions() {
        let ground = PairTable::discrete(2);
        let blocking = SuccessorRow::blocking();
        let row = SuccessorRow::from_entries([(0, ratio(1, 1))]);
        assert_eq!(lift_with_blocking(&ground, &blocking, &blocking), ratio(0, 1));
        assert_eq!(lift_with_blocking(&ground, &blocking, &row), ratio(1, 1));
        assert_eq!(lift_with_blocking(&ground, &row, &blocking), ratio(1, 1));
        assert_eq!(lift_with_blocking(&ground, &row, &row), ratio(0, 1));
    }

    #[test]
    fn coupling_marginal_check() {
        let l = Distribution::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        let r = Distribution::point(0);
        let good = Coupling::new([((0, 0), ratio(1, 2)), ((1, 0), ratio(1, 2))]);
        let bad = Coupling::new([((0, 0), ratio(1, 1))]);
        assert!(good.has_marginals(&l, &r));
        assert!(!bad.has_marginals(&l, &r));
    }
}
