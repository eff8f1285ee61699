use std::collections::BTreeMap;
use std::sync::Arc;

use super::{DistanceTable, Method};
use crate::lp::PairTable;
use crate::logic::{Concept, ConceptEnumerator};
use crate::model::{Model, StateId};
use crate::rational::{abs_diff, ratio, Rational};
use crate::semantics::eval_concept;

/// Best separating concept found for each pair, alongside the table.
#[derive(Debug, Clone)]
pub struct LogicalBound {
    pub table: DistanceTable,
    pub witnesses: BTreeMap<(StateId, StateId), Arc<Concept>>,
    pub concepts_tried: usize,
}

/// Constants `0, 1/4, 1/2, 3/4, 1`.
pub fn default_grid() -> Vec<Rational> {
    (0..=4).map(|k| ratio(k, 4)).collect()
}

/// Lower bound on `d_n` from every enumerated concept of rank ≤ n with at
/// most `max_size` nodes (and at most `budget` concepts in total).
pub fn logical_lb_table(model: &Model, n: usize, max_size: usize, budget: usize, grid: &[Rational]) -> LogicalBound {
    let atoms: Vec<String> = model.atom_names().map(str::to_string).collect();
    let roles: Vec<String> = model.role_names().map(str::to_string).collect();
    let size = model.num_states();
    let mut values = PairTable::zeros(size);
    let mut witnesses = BTreeMap::new();
    let mut tried = 0;
    for c in ConceptEnumerator::new(&atoms, &roles, n, max_size, grid).take(budget) {
        tried += 1;
        let v = eval_concept(model, &c).expect("enumerated from the model's own vocabulary");
        for a in 0..size {
            for b in a + 1..size {
                let gap = abs_diff(&v[a], &v[b]);
                if gap > *values.get(a, b) {
                    values.set_symmetric(a, b, gap);
                    witnesses.insert((a, b), c.clone());
                }
            }
        }
    }
    LogicalBound {
        table: DistanceTable::new(n, Method::LogicalLB, values),
        witnesses,
        concepts_tried: tried,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::wasserstein_table;
    use crate::model::tests::m1;

    #[test]
    fn m1_depth_one() {
        let m = m1();
        let lb = logical_lb_table(&m, 1, 3, 10_000, &default_grid());
        assert_eq!(*lb.table.get(0, 2), ratio(3, 10));
        assert_eq!(lb.witnesses[&(0, 2)].to_string(), "A");
        assert_eq!(*lb.table.get(1, 2), ratio(1, 1));
        assert_eq!(lb.witnesses[&(1, 2)].rank(), 1);
    }

    #[test]
    fn bounded_by_distance() {
        let m = m1();
        for n in 0..=2 {
            let lb = logical_lb_table(&m, n, 4, 20_000, &default_grid());
            assert_eq!(lb.table.first_exceeding(&wasserstein_table(&m, n)), None);
        }
        assert_eq!(*logical_lb_table(&m, 2, 3, 20_000, &default_grid()).table.get(0, 2), ratio(1, 2));
    }
}
