use crate::logic::Formula;
use crate::model::{restrict, Model, StateId};
use crate::rational::Rational;
use crate::semantics::{eval_formula, Environment, EvalError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityReport {
    pub full: Rational,
    pub restricted: Rational,
}

impl LocalityReport {
    pub fn equal(&self) -> bool {
        self.full == self.restricted
    }
}

/// Evaluates a formula with one free variable at `a` in `model` and in the
/// radius-`k` neighbourhood of `a`.
pub fn locality_check(model: &Model, a: StateId, phi: &Formula, k: usize) -> Result<LocalityReport, EvalError> {
    let bind = |s: StateId| -> Environment { phi.free_vars().into_iter().map(|v| (v, s)).collect() };
    let full = eval_formula(model, phi, &bind(a))?;
    let local = restrict(model, a, k).expect("state index comes from the model");
    let centre = local
        .state_index(model.state_name(a))
        .expect("restriction keeps state names");
    let restricted = eval_formula(&local, phi, &bind(centre))?;
    Ok(LocalityReport { full, restricted })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_concept, parse_formula, standard_translation};
    use crate::model::tests::m1;
    use crate::rational::ratio;

    #[test]
    fn modal_formula_is_local() {
        let phi = standard_translation(&parse_concept("<r> A").unwrap(), "x");
        let r = locality_check(&m1(), 0, &phi, 2).unwrap();
        assert_eq!(r, LocalityReport { full: ratio(1, 2), restricted: ratio(1, 2) });
        assert!(r.equal());
    }

    #[test]
    fn unrestricted_existential_is_not() {
        let phi = parse_formula("E y. A(y)").unwrap();
        let r = locality_check(&m1(), 2, &phi, 1).unwrap();
        assert_eq!(r.full, ratio(1, 1));
        assert_eq!(r.restricted, ratio(3, 10));
        assert!(!r.equal());
    }

    #[test]
    fn constants_are_local() {
        let phi = parse_formula("1/4").unwrap();
        for k in 0..3 {
            assert!(locality_check(&m1(), 1, &phi, k).unwrap().equal());
        }
    }
}
