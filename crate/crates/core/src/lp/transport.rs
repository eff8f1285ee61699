use num_traits::Zero;

use super::simplex::{LinearProgram, LpOutcome, Relation, Sense};
use super::{check_inputs, Coupling, Distribution, LpError, PairTable};
use crate::rational::{one, Rational};

/// Minimum expected ground cost over couplings of `left` and `right`,
/// with an optimal coupling.
pub fn solve_transport_min(
    ground: &PairTable,
    left: &Distribution,
    right: &Distribution,
) -> Result<(Rational, Coupling), LpError> {
    check_inputs(ground, left, right)?;
    let rows = left.support();
    let cols = right.support();
    let n = cols.len();
    let var = |i: usize, j: usize| i * n + j;
    let objective = rows
        .iter()
        .flat_map(|&x| cols.iter().map(move |&y| ground.get(x, y).clone()))
        .collect();
    let mut lp = LinearProgram::new(rows.len() * n, Sense::Minimize, objective);
    for (i, &x) in rows.iter().enumerate() {
        let terms: Vec<_> = (0..n).map(|j| (var(i, j), one())).collect();
        lp.add_sparse(&terms, Relation::Eq, left.prob(x));
    }
    for (j, &y) in cols.iter().enumerate() {
        let terms: Vec<_> = (0..rows.len())
            .map(|i| (var(i, j), one()))
            .collect();
        lp.add_sparse(&terms, Relation::Eq, right.prob(y));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => {
            let coupling = Coupling::new(
                rows.iter()
                    .enumerate()
                    .flat_map(|(i, &a)| cols.iter().enumerate().map(move |(j, &b)| ((i, a), (j, b))))
                    .filter_map(|((i, a), (j, b))| {
                        let v = &x[var(i, j)];
                        (!v.is_zero()).then(|| ((a, b), v.clone()))
                    }),
            );
            Ok((value, coupling))
        }
        other => unreachable!("transport LPs with equal masses are feasible and bounded: {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn two_point_instance() {
        let ground = PairTable::discrete(2);
        let left = Distribution::new([(0, ratio(1, 2)), (1, ratio(1, 2))]).unwrap();
        let right = Distribution::point(0);
        let (value, coupling) = solve_transport_min(&ground, &left, &right).unwrap();
        assert_eq!(value, ratio(1, 2));
        assert_eq!(
            coupling,
            Coupling::new([((0, 0), ratio(1, 2)), ((1, 0), ratio(1, 2))])
        );
    }

    #[test]
    fn identical_marginals_cost_nothing() {
        let ground = PairTable::discrete(3);
        let d = Distribution::new([(0, ratio(1, 3)), (2, ratio(2, 3))]).unwrap();
        let (value, coupling) = solve_transport_min(&ground, &d, &d).unwrap();
        assert_eq!(value, ratio(0, 1));
        assert!(coupling.iter().all(|((x, y), _)| x == y));
    }

    #[test]
    fn rejects_points_outside_table() {
        let ground = PairTable::discrete(1);
        let d = Distribution::point(3);
        assert!(matches!(
            solve_transport_min(&ground, &d, &d),
            Err(LpError::MarginalInvalid(_))
        ));
    }
}
