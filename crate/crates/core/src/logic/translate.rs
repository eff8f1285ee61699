use super::{Concept, Formula};

fn other_var(x: &str) -> &'static str {
    if x == "y" {
        "x"
    } else {
        "y"
    }
}

/// Standard translation into the first-order language, with `x` naming the
/// current state. Only two variables are used: each diamond rebinds the one
/// not currently in focus. Disjunction is rendered as `¬(¬φ ∧ ¬ψ)`.
///
/// Only the designated role's diamonds have a first-order counterpart; the
/// role name of a diamond is dropped.
pub fn standard_translation(c: &Concept, x: &str) -> Formula {
    match c {
        Concept::Const(q) => Formula::Const(q.clone()),
        Concept::Atom(a) => Formula::atom(a, x),
        Concept::TruncSub(inner, q) => Formula::trunc_sub(standard_translation(inner, x), q.clone()),
        Concept::Neg(inner) => Formula::neg(standard_translation(inner, x)),
        Concept::And(l, r) => Formula::and(standard_translation(l, x), standard_translation(r, x)),
        Concept::Or(l, r) => Formula::or(standard_translation(l, x), standard_translation(r, x)),
        Concept::Dia(_, inner) => {
            let y = other_var(x);
            Formula::dia_bind(x, y, standard_translation(inner, y))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_concept;
    use crate::random::{random_concept, seeded_rng};
    use std::collections::BTreeSet;

    #[test]
    fn atoms_and_diamonds() {
        assert_eq!(standard_translation(&Concept::Atom("A".into()), "x"), Formula::atom("A", "x"));
        let c = parse_concept("<r> A").unwrap();
        assert_eq!(
            standard_translation(&c, "x"),
            Formula::dia_bind("x", "y", Formula::atom("A", "y"))
        );
        let c = parse_concept("<r> <r> A").unwrap();
        assert_eq!(
            standard_translation(&c, "x").to_string(),
            "P x y. P y x. A(x)"
        );
    }

    #[test]
    fn one_free_variable_and_rank_preserved() {
        let mut rng = seeded_rng(17);
        let atoms = vec!["A".to_string(), "B".to_string()];
        for _ in 0..300 {
            let c = random_concept(&mut rng, &atoms, "r", 3, 6, 10);
            let f = standard_translation(&c, "x");
            assert_eq!(f.qrank(), c.rank());
            assert!(f.free_vars().is_subset(&BTreeSet::from(["x".to_string()])));
        }
    }
}
