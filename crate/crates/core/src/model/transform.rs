//! Structural transforms: disjoint union, neighbourhood restriction and
//! depth-bounded unravelling.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use super::{gaifman_distances_from, Model, ModelError, StateId, SuccessorRow};
use crate::rational::Rational;

/// A disjoint union together with the embedding of each summand.
#[derive(Debug, Clone)]
pub struct DisjointUnion {
    pub model: Model,
    /// `injections[k][s]` is the union state of state `s` of model `k`.
    pub injections: Vec<Vec<StateId>>,
}

/// Disjoint union of one or more models. State `s` of the `k`-th model is
/// renamed `"s#k"`. Atoms or roles missing from a summand read as zero /
/// blocking there.
pub fn disjoint_union(models: &[&Model]) -> Result<DisjointUnion, ModelError> {
    if models.is_empty() {
        return Err(ModelError::EmptyUnion);
    }
    let mut states = Vec::new();
    let mut injections = Vec::with_capacity(models.len());
    for (k, m) in models.iter().enumerate() {
        let offset = states.len();
        injections.push((0..m.num_states()).map(|s| offset + s).collect::<Vec<_>>());
        states.extend(m.states().iter().map(|s| format!("{s}#{k}")));
    }
    let total = states.len();

    let mut atoms: BTreeMap<String, Vec<Rational>> = BTreeMap::new();
    let mut roles: BTreeMap<String, Vec<SuccessorRow>> = BTreeMap::new();
    for m in models {
        for name in m.atom_names() {
            atoms.entry(name.to_string()).or_insert_with(|| vec![Rational::zero(); total]);
        }
        for name in m.role_names() {
            roles.entry(name.to_string()).or_insert_with(|| vec![SuccessorRow::blocking(); total]);
        }
    }
    for (m, inj) in models.iter().zip(&injections) {
        for (name, values) in m.atoms() {
            let column = atoms.get_mut(name).expect("atom registered");
            for (s, v) in values.iter().enumerate() {
                column[inj[s]] = v.clone();
            }
        }
        for (name, rows) in m.roles() {
            let column = roles.get_mut(name).expect("role registered");
            for (s, row) in rows.iter().enumerate() {
                column[inj[s]] = row.map_targets(|t| inj[t]);
            }
        }
    }
    let model = Model::from_parts(states, atoms, roles)?;
    Ok(DisjointUnion { model, injections })
}

/// Restriction to the radius-`k` Gaifman neighbourhood of `a`. States at
/// distance exactly `k` become blocking; state names are kept.
pub fn restrict(model: &Model, a: StateId, k: usize) -> Result<Model, ModelError> {
    if a >= model.num_states() {
        return Err(ModelError::UnknownState(format!("#{a}")));
    }
    let dist = gaifman_distances_from(model, a);
    let kept: Vec<StateId> = model
        .state_ids()
        .filter(|&s| matches!(dist[s], Some(d) if d <= k))
        .collect();
    let new_index: HashMap<StateId, StateId> = kept.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    let states = kept.iter().map(|&s| model.state_name(s).to_string()).collect();
    let atoms = model
        .atoms()
        .map(|(name, values)| (name.to_string(), kept.iter().map(|&s| values[s].clone()).collect()))
        .collect();
    let roles = model
        .roles()
        .map(|(name, rows)| {
            let rows = kept
                .iter()
                .map(|&s| match dist[s] {
                    Some(d) if d < k => rows[s].map_targets(|t| new_index[&t]),
                    _ => SuccessorRow::blocking(),
                })
                .collect();
            (name.to_string(), rows)
        })
        .collect();
    Model::from_parts(states, atoms, roles)
}

/// A depth-bounded unravelling: the tree of paths from the root.
#[derive(Debug, Clone)]
pub struct Unravelling {
    pub model: Model,
    pub root: StateId,
    /// `paths[s]` is the path of original states represented by tree state `s`.
    pub paths: Vec<Vec<StateId>>,
}

/// Unravels `model` from `a` up to `k` transitions. Tree states are named by
/// their paths joined with `'.'`; paths of length `k` are blocking leaves.
/// Every role contributes edges; a path's rows copy those of its last state.
pub fn unravel(model: &Model, a: StateId, k: usize) -> Result<Unravelling, ModelError> {
    if a >= model.num_states() {
        return Err(ModelError::UnknownState(format!("#{a}")));
    }
    let mut paths: Vec<Vec<StateId>> = vec![vec![a]];
    let mut path_index: HashMap<Vec<StateId>, StateId> = HashMap::from([(vec![a], 0)]);
    let mut frontier = vec![0];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in frontier {
            let last = *paths[p].last().expect("paths are non-empty");
            for (_, rows) in model.roles() {
                for t in rows[last].support() {
                    let mut child = paths[p].clone();
                    child.push(t);
                    if !path_index.contains_key(&child) {
                        path_index.insert(child.clone(), paths.len());
                        next.push(paths.len());
                        paths.push(child);
                    }
                }
            }
        }
        frontier = next;
    }

    let mut names = HashMap::new();
    let mut states = Vec::with_capacity(paths.len());
    for path in &paths {
        let name = path
            .iter()
            .map(|&s| model.state_name(s))
            .collect::<Vec<_>>()
            .join(".");
        if names.insert(name.clone(), ()).is_some() {
            return Err(ModelError::NameCollision(name));
        }
        states.push(name);
    }
    let atoms = model
        .atoms()
        .map(|(name, values)| {
            let column = paths.iter().map(|p| values[*p.last().unwrap()].clone()).collect();
            (name.to_string(), column)
        })
        .collect();
    let roles = model
        .roles()
        .map(|(name, rows)| {
            let column = paths
                .iter()
                .map(|p| {
                    if p.len() > k {
                        return SuccessorRow::blocking();
                    }
                    let last = *p.last().unwrap();
                    SuccessorRow::from_entries(rows[last].iter().map(|(t, prob)| {
                        let mut child = p.clone();
                        child.push(t);
                        (path_index[&child], prob.clone())
                    }))
                })
                .collect();
            (name.to_string(), column)
        })
        .collect();
    let model = Model::from_parts(states, atoms, roles)?;
    Ok(Unravelling {
        model,
        root: 0,
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::m1;
    use crate::model::{gaifman_distance, DEFAULT_ROLE};

    #[test]
    fn union_of_two_copies_is_tagged() {
        let m = m1();
        let u = disjoint_union(&[&m, &m]).unwrap();
        assert_eq!(u.model.num_states(), 6);
        let a0 = u.model.state_index("a#0").unwrap();
        let rows = u.model.role(DEFAULT_ROLE).unwrap();
        for t in rows[a0].support() {
            assert!(u.model.state_name(t).ends_with("#0"));
        }
        assert_eq!(u.injections[1][0], u.model.state_index("a#1").unwrap());
    }

    #[test]
    fn union_of_one_is_a_renaming() {
        let m = m1();
        let u = disjoint_union(&[&m]).unwrap();
        assert_eq!(u.model.num_states(), 3);
        for s in m.state_ids() {
            let t = u.injections[0][s];
            assert_eq!(u.model.atom("A").unwrap()[t], m.atom("A").unwrap()[s]);
            let row = &u.model.role("r").unwrap()[t];
            assert_eq!(row.map_targets(|x| x), m.role("r").unwrap()[s].map_targets(|x| u.injections[0][x]));
        }
        assert!(matches!(disjoint_union(&[]), Err(ModelError::EmptyUnion)));
    }

    #[test]
    fn restrict_radius_one_blocks_the_frontier() {
        let m = m1();
        let a = m.state_index("a").unwrap();
        let r = restrict(&m, a, 1).unwrap();
        assert_eq!(r.states(), &["a", "b", "c"]);
        let rows = r.role("r").unwrap();
        assert_eq!(rows[0], m.role("r").unwrap()[0]);
        assert!(rows[1].is_blocking() && rows[2].is_blocking());
    }

    #[test]
    fn restrict_radius_zero_is_one_blocking_state() {
        let m = m1();
        let r = restrict(&m, 0, 0).unwrap();
        assert_eq!(r.states(), &["a"]);
        assert!(r.role("r").unwrap()[0].is_blocking());
        assert!(restrict(&m, 9, 1).is_err());
    }

    #[test]
    fn restrict_drops_unreachable_component() {
        let m = Model::from_json_str(
            r#"{"states":["a","b","z"],"roles":{"r":{"a":{"b":"1"},"b":{"a":"1"},"z":{"z":"1"}}}}"#,
        )
        .unwrap();
        let r = restrict(&m, 0, 5).unwrap();
        assert_eq!(r.states(), &["a", "b"]);
        assert_eq!(gaifman_distance(&m, 0, 2).unwrap(), None);
    }

    #[test]
    fn unravel_m1_depth_two() {
        let m = m1();
        let u = unravel(&m, 0, 2).unwrap();
        assert_eq!(u.model.states(), &["a", "a.b", "a.c", "a.c.c"]);
        let rows = u.model.role("r").unwrap();
        let idx = |n: &str| u.model.state_index(n).unwrap();
        assert!(rows[idx("a.b")].is_blocking());
        assert!(rows[idx("a.c.c")].is_blocking());
        assert!(!rows[idx("a.c")].is_blocking());
        assert_eq!(u.model.atom("A").unwrap()[idx("a.b")], m.atom("A").unwrap()[1]);
    }

    #[test]
    fn unravel_depth_zero_is_a_blocking_root() {
        let u = unravel(&m1(), 0, 0).unwrap();
        assert_eq!(u.model.num_states(), 1);
        assert!(u.model.role("r").unwrap()[0].is_blocking());
    }
}
