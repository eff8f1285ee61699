//! Game values computed from coupling vertices only; this path never calls
//! the simplex, so it is an independent check on the LP engines.

use std::collections::HashMap;

use num_traits::Zero;

use super::{DistanceTable, Method};
use crate::lp::{enumerate_transport_vertices_bounded, Coupling, Distribution, LpError, PairTable, DEFAULT_VERTEX_BOUND};
use crate::model::{Model, StateId};
use crate::rational::{one, Rational};

/// Lazily computes game value tables `V_0, V_1, ...` and caches the
/// coupling vertices of every role/pair it touches.
pub struct GameEngine<'m> {
    model: &'m Model,
    bound: usize,
    vertices: HashMap<(String, StateId, StateId), Vec<Coupling>>,
    values: Vec<PairTable>,
}

impl<'m> GameEngine<'m> {
    pub fn new(model: &'m Model) -> Self {
        Self::with_bound(model, DEFAULT_VERTEX_BOUND)
    }

    pub fn with_bound(model: &'m Model, bound: usize) -> Self {
        Self {
            model,
            bound,
            vertices: HashMap::new(),
            values: vec![PairTable::zeros(model.num_states())],
        }
    }

    pub fn model(&self) -> &'m Model {
        self.model
    }

    /// Vertices of `cpl(row_a, row_b)` for `role`; `None` if either row is
    /// blocking.
    pub fn vertices(&mut self, role: &str, a: StateId, b: StateId) -> Result<Option<&[Coupling]>, LpError> {
        let rows = self.model.role(role).expect("role comes from the model");
        let (Some(l), Some(r)) = (Distribution::from_row(&rows[a]), Distribution::from_row(&rows[b])) else {
            return Ok(None);
        };
        let key = (role.to_string(), a, b);
        if !self.vertices.contains_key(&key) {
            let vs = enumerate_transport_vertices_bounded(&l, &r, self.bound)?;
            self.vertices.insert(key.clone(), vs);
        }
        Ok(Some(&self.vertices[&key]))
    }

    /// `V_k` as a pair table.
    pub fn values_at(&mut self, k: usize) -> Result<&PairTable, LpError> {
        while self.values.len() <= k {
            let next = self.next_table()?;
            self.values.push(next);
        }
        Ok(&self.values[k])
    }

    pub fn table(&mut self, k: usize) -> Result<DistanceTable, LpError> {
        Ok(DistanceTable::new(k, Method::Game, self.values_at(k)?.clone()))
    }

    pub fn value(&mut self, k: usize, a: StateId, b: StateId) -> Result<Rational, LpError> {
        Ok(self.values_at(k)?.get(a, b).clone())
    }

    /// The role contribution to the value of a round: 1 if exactly one row
    /// is blocking, 0 if both are, else the best vertex for Duplicator,
    /// which is returned alongside.
    pub fn role_value(
        &mut self,
        role: &str,
        child: &PairTable,
        a: StateId,
        b: StateId,
    ) -> Result<(Rational, Option<Coupling>), LpError> {
        let rows = self.model.role(role).expect("role comes from the model");
        match (rows[a].is_blocking(), rows[b].is_blocking()) {
            (true, true) => return Ok((Rational::zero(), None)),
            (true, false) | (false, true) => return Ok((one(), None)),
            (false, false) => {}
        }
        let vs = self.vertices(role, a, b)?.expect("both rows are proper");
        let mut best: Option<(Rational, &Coupling)> = None;
        for mu in vs {
            let v = mu.expect(|x, y| child.get(x, y).clone());
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, mu));
            }
        }
        let (v, mu) = best.expect("transportation polytopes are non-empty");
        Ok((v, Some(mu.clone())))
    }

    fn next_table(&mut self) -> Result<PairTable, LpError> {
        let prev = self.values.last().expect("V_0 is present").clone();
        let n = self.model.num_states();
        let roles: Vec<String> = self.model.role_names().map(str::to_string).collect();
        let mut next = PairTable::zeros(n);
        for a in 0..n {
            for b in a..n {
                let mut v = self.model.atom_deviation(a, b);
                for role in &roles {
                    let (r, _) = self.role_value(role, &prev, a, b)?;
                    if r > v {
                        v = r;
                    }
                }
                next.set_symmetric(a, b, v);
            }
        }
        Ok(next)
    }
}

/// Value of the `n`-round game at `(a, b)`.
pub fn game_value(model: &Model, n: usize, a: StateId, b: StateId) -> Result<Rational, LpError> {
    GameEngine::new(model).value(n, a, b)
}

pub fn game_table(model: &Model, n: usize) -> Result<DistanceTable, LpError> {
    GameEngine::new(model).table(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::wasserstein_table;
    use crate::model::tests::m1;
    use crate::random::{random_model, seeded_rng, ModelShape};
    use crate::rational::ratio;

    #[test]
    fn m1_values() {
        let m = m1();
        assert_eq!(game_value(&m, 2, 0, 2).unwrap(), ratio(1, 2));
        assert_eq!(game_value(&m, 1, 1, 2).unwrap(), ratio(1, 1));
        assert_eq!(game_value(&m, 0, 0, 1).unwrap(), ratio(0, 1));
    }

    #[test]
    fn agrees_with_wasserstein_on_small_random_models() {
        let mut rng = seeded_rng(11);
        let shape = ModelShape {
            max_states: 4,
            ..ModelShape::default()
        };
        for _ in 0..15 {
            let m = random_model(&mut rng, &shape);
            let mut engine = GameEngine::new(&m);
            for n in 0..=3 {
                assert!(engine.table(n).unwrap().same_values(&wasserstein_table(&m, n)));
            }
        }
    }

    #[test]
    fn support_bound_is_reported() {
        let m = Model::from_json_str(
            r#"{"states":["a","b","c","d","e"],
                "roles":{"r":{"a":{"a":"1/5","b":"1/5","c":"1/5","d":"1/5","e":"1/5"}}}}"#,
        )
        .unwrap();
        assert!(matches!(
            game_value(&m, 1, 0, 0),
            Err(LpError::SupportTooLarge { .. })
        ));
        assert_eq!(GameEngine::with_bound(&m, 5).value(1, 0, 0).unwrap(), ratio(0, 1));
    }
}
