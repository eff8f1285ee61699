use std::collections::VecDeque;

use super::{Model, ModelError, StateId};

/// Breadth-first distances from `a` in the Gaifman graph (undirected support
/// edges of every role). `None` marks unreachable states.
pub fn gaifman_distances_from(model: &Model, a: StateId) -> Vec<Option<usize>> {
    let adj = model.undirected_neighbours();
    let mut dist = vec![None; model.num_states()];
    dist[a] = Some(0);
    let mut queue = VecDeque::from([a]);
    while let Some(s) = queue.pop_front() {
        let d = dist[s].expect("queued states have a distance");
        for &t in &adj[s] {
            if dist[t].is_none() {
                dist[t] = Some(d + 1);
                queue.push_back(t);
            }
        }
    }
    dist
}

/// Gaifman distance between two states; `Ok(None)` means infinite.
pub fn gaifman_distance(model: &Model, a: StateId, b: StateId) -> Result<Option<usize>, ModelError> {
    for s in [a, b] {
        if s >= model.num_states() {
            return Err(ModelError::UnknownState(format!("#{s}")));
        }
    }
    Ok(gaifman_distances_from(model, a)[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::m1;
    use crate::random::{random_model, seeded_rng, ModelShape};

    #[test]
    fn m1_distances() {
        let m = m1();
        let id = |n| m.state_index(n).unwrap();
        assert_eq!(gaifman_distance(&m, id("a"), id("b")).unwrap(), Some(1));
        assert_eq!(gaifman_distance(&m, id("b"), id("c")).unwrap(), Some(2));
        assert_eq!(gaifman_distance(&m, id("a"), id("a")).unwrap(), Some(0));
        assert!(gaifman_distance(&m, 0, 7).is_err());
    }

    #[test]
    fn metric_axioms_on_random_models() {
        let shape = ModelShape { max_states: 8, ..ModelShape::default() };
        let mut rng = seeded_rng(11);
        for _ in 0..40 {
            let m = random_model(&mut rng, &shape);
            let all: Vec<_> = m.state_ids().map(|s| gaifman_distances_from(&m, s)).collect();
            for x in m.state_ids() {
                for y in m.state_ids() {
                    assert_eq!(all[x][y], all[y][x]);
                    for z in m.state_ids() {
                        if let (Some(xy), Some(yz)) = (all[x][y], all[y][z]) {
                            assert!(all[x][z].unwrap() <= xy + yz);
                        }
                    }
                }
            }
        }
    }
}
