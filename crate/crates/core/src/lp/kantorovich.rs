use std::collections::BTreeMap;

use num_traits::Zero;

use super::simplex::{LinearProgram, LpOutcome, Relation, Sense};
use super::{check_inputs, Distribution, LpError, PairTable};
use crate::rational::{abs_diff, one, Rational};

/// A `[0,1]`-valued function on a finite set of points.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Potential {
    values: BTreeMap<usize, Rational>,
}

impl Potential {
    pub fn new<I: IntoIterator<Item = (usize, Rational)>>(values: I) -> Self {
        Self {
            values: values.into_iter().collect(),
        }
    }

    pub fn get(&self, x: usize) -> Option<&Rational> {
        self.values.get(&x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.values.iter().map(|(x, v)| (*x, v))
    }

    pub fn domain(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    /// `E_π(f)`; points of `π` outside the domain count as 0.
    pub fn expect(&self, d: &Distribution) -> Rational {
        d.iter()
            .map(|(x, p)| p * self.values.get(&x).cloned().unwrap_or_else(Rational::zero))
            .sum()
    }

    /// `|f(x) - f(y)| ≤ d(x,y)` on the domain and `0 ≤ f ≤ 1`.
    pub fn is_nonexpansive(&self, ground: &PairTable) -> bool {
        self.values.values().all(crate::rational::in_unit_interval)
            && self.values.iter().all(|(&x, fx)| {
                self.values
                    .iter()
                    .all(|(&y, fy)| abs_diff(fx, fy) <= *ground.get(x, y))
            })
    }

    /// Truncated McShane extension `f̃(z) = min(1, min_x f(x) + d(x,z))`
    /// to all points of the ground table. Agrees with `f` on its domain
    /// and stays non-expansive when `ground` is a pseudometric.
    pub fn extend(&self, ground: &PairTable) -> Vec<Rational> {
        (0..ground.size())
            .map(|z| {
                self.values
                    .iter()
                    .map(|(&x, fx)| fx + ground.get(x, z))
                    .chain(std::iter::once(one()))
                    .min()
                    .expect("chain is non-empty")
            })
            .collect()
    }
}

/// Maximum of `|E_left(f) - E_right(f)|` over non-expansive `[0,1]`-valued
/// potentials on the union of supports, with an optimal potential.
pub fn solve_kantorovich_max(
    ground: &PairTable,
    left: &Distribution,
    right: &Distribution,
) -> Result<(Rational, Potential), LpError> {
    check_inputs(ground, left, right)?;
    let mut points = left.support();
    points.extend(right.support());
    points.sort_unstable();
    points.dedup();

    let mut best: Option<(Rational, Potential)> = None;
    for orientation in [one(), -one()] {
        let objective = points
            .iter()
            .map(|&z| &orientation * (left.prob(z) - right.prob(z)))
            .collect();
        let mut lp = LinearProgram::new(points.len(), Sense::Maximize, objective);
        for i in 0..points.len() {
            lp.add_sparse(&[(i, one())], Relation::Le, one());
        }
        for (i, &x) in points.iter().enumerate() {
            for (j, &y) in points.iter().enumerate() {
                if i != j {
                    lp.add_sparse(&[(i, one()), (j, -one())], Relation::Le, ground.get(x, y).clone());
                }
            }
        }
        match lp.solve() {
            LpOutcome::Optimal { value, x } => {
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, Potential::new(points.iter().copied().zip(x))));
                }
            }
            other => unreachable!("potential LPs are feasible and bounded: {other:?}"),
        }
    }
    let (value, potential) = best.expect("two orientations solved");
    Ok((value, potential))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use crate::rational::ratio;

    #[test]
    fn two_point_instance() {
        let ground = PairTable::discrete(2);
        let left = Distribution::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        let right = Distribution::point(0);
        let (value, f) = solve_kantorovich_max(&ground, &left, &right).unwrap();
        assert_eq!(value, ratio(1, 2));
        assert!(f.is_nonexpansive(&ground));
        assert_eq!((f.expect(&left) - f.expect(&right)).abs(), ratio(1, 2));
    }

    #[test]
    fn identical_marginals() {
        let ground = PairTable::discrete(2);
        let d = Distribution::new([(0, ratio(1, 4)), (1, ratio(3, 4))]).unwrap();
        assert_eq!(solve_kantorovich_max(&ground, &d, &d).unwrap().0, ratio(0, 1));
    }

    #[test]
    fn extension_keeps_domain_values() {
        let mut ground = PairTable::discrete(3);
        ground.set_symmetric(0, 2, ratio(1, 4));
        ground.set_symmetric(1, 2, ratio(1, 2));
        let f = Potential::new([(0, ratio(0, 1)), (1, ratio(1, 2))]);
        let ext = f.extend(&ground);
        assert_eq!(ext, vec![ratio(0, 1), ratio(1, 2), ratio(1, 4)]);
        let full = Potential::new(ext.into_iter().enumerate());
        assert!(full.is_nonexpansive(&ground));
    }
}
