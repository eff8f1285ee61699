//! The model file format.
//!
//! ```json
//! {"states":["a","b","c"],
//!  "atoms":{"A":{"a":"3/10","b":"1","c":"0"}},
//!  "roles":{"r":{"a":{"b":"1/2","c":"1/2"},"b":{},"c":{"c":"1"}}}}
//! ```
//!
//! Omitted atom entries are `"0"`; an omitted row is blocking.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Model, ModelError, SuccessorRow, Violation};
use crate::rational::{format_rational, parse_rational, Rational};

/// Successor row as it appears in the file: target name → probability text.
pub type RawRow = BTreeMap<String, String>;

/// Unvalidated model data, exactly as read from JSON.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    pub states: Vec<String>,
    #[serde(default)]
    pub atoms: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub roles: BTreeMap<String, BTreeMap<String, RawRow>>,
}

impl RawModel {
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn from_json_slice(bytes: &[u8]) -> Result<Self, ModelError> {
        serde_json::from_slice(bytes).map_err(|e| ModelError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    /// Checks the raw data and produces a canonical [`Model`], or every
    /// violation found.
    pub fn validate(&self) -> Result<Model, ModelError> {
        let mut violations = Vec::new();
        let mut index = BTreeMap::new();
        for (i, s) in self.states.iter().enumerate() {
            index.entry(s.as_str()).or_insert(i);
        }
        let n = self.states.len();
        let read = |location: String, text: &str, violations: &mut Vec<Violation>| match parse_rational(text) {
            Ok(q) => Some(q),
            Err(_) => {
                violations.push(Violation::BadRational {
                    location,
                    text: text.to_string(),
                });
                None
            }
        };

        let mut atoms = BTreeMap::new();
        for (atom, entries) in &self.atoms {
            let mut values = vec![Rational::zero(); n];
            for (state, text) in entries {
                let location = format!("atom {atom} at {state:?}");
                let Some(q) = read(location.clone(), text, &mut violations) else { continue };
                match index.get(state.as_str()) {
                    Some(&s) => values[s] = q,
                    None => violations.push(Violation::UnknownState {
                        context: format!("atom {atom}"),
                        state: state.clone(),
                    }),
                }
            }
            atoms.insert(atom.clone(), values);
        }

        let mut roles = BTreeMap::new();
        for (role, rows) in &self.roles {
            let mut out = vec![SuccessorRow::blocking(); n];
            for (source, raw_row) in rows {
                let Some(&s) = index.get(source.as_str()) else {
                    violations.push(Violation::UnknownState {
                        context: format!("role {role}"),
                        state: source.clone(),
                    });
                    continue;
                };
                let mut entries = Vec::new();
                for (target, text) in raw_row {
                    let location = format!("role {role}, row of {source:?}");
                    let Some(q) = read(location, text, &mut violations) else { continue };
                    match index.get(target.as_str()) {
                        Some(&t) => entries.push((t, q)),
                        None => violations.push(Violation::UnknownTarget {
                            role: role.clone(),
                            state: source.clone(),
                            target: target.clone(),
                        }),
                    }
                }
                out[s] = SuccessorRow::from_entries(entries);
            }
            roles.insert(role.clone(), out);
        }

        match Model::from_parts(self.states.clone(), atoms, roles) {
            Ok(model) if violations.is_empty() => Ok(model),
            Ok(_) => Err(ModelError::Invalid(violations)),
            Err(ModelError::Invalid(mut more)) => {
                violations.append(&mut more);
                Err(ModelError::Invalid(violations))
            }
            Err(e) => Err(e),
        }
    }

    /// Canonical raw form: every atom value and every row written out.
    pub fn from_model(model: &Model) -> Self {
        let name = |s: usize| model.state_name(s).to_string();
        let atoms = model
            .atoms()
            .map(|(atom, values)| {
                let entries = values
                    .iter()
                    .enumerate()
                    .map(|(s, v)| (name(s), format_rational(v)))
                    .collect();
                (atom.to_string(), entries)
            })
            .collect();
        let roles = model
            .roles()
            .map(|(role, rows)| {
                let rows = rows
                    .iter()
                    .enumerate()
                    .map(|(s, row)| {
                        let entries = row.iter().map(|(t, p)| (name(t), format_rational(p))).collect();
                        (name(s), entries)
                    })
                    .collect();
                (role.to_string(), rows)
            })
            .collect();
        Self {
            states: model.states().to_vec(),
            atoms,
            roles,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::{m1, M1};
    use proptest::prelude::*;

    #[test]
    fn serialize_then_validate_is_identity_on_m1() {
        let m = m1();
        let again = Model::from_json_str(&m.to_json_string()).unwrap();
        assert_eq!(m, again);
        assert_eq!(RawModel::from_json_str(M1).unwrap().validate().unwrap(), m);
    }

    #[test]
    fn omitted_entries_default() {
        let m = Model::from_json_str(r#"{"states":["x","y"],"atoms":{"A":{"x":"1"}},"roles":{"r":{}}}"#).unwrap();
        assert_eq!(m.atom("A").unwrap()[1], Rational::zero());
        assert!(m.role("r").unwrap().iter().all(SuccessorRow::is_blocking));
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(matches!(
            Model::from_json_str(r#"{"states":[],"extra":1}"#),
            Err(ModelError::Json { .. })
        ));
    }

    proptest! {
        #[test]
        fn round_trip_random_models(seed in any::<u64>()) {
            let m = crate::random::random_model(&mut crate::random::seeded_rng(seed), &crate::random::ModelShape::default());
            let back = Model::from_json_str(&m.to_json_string()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
