//! Exhaustive enumeration of small concepts, by increasing node count.

use std::sync::Arc;

use super::Concept;
use crate::rational::Rational;

struct Entry {
    concept: Arc<Concept>,
    rank: usize,
    key: String,
}

/// Lazily enumerates every concept with rank ≤ `max_rank`, node count
/// ≤ `max_size` and constants from the grid, once each up to commutativity
/// of `∧`/`∨` (arguments ordered by printed text). Recreate it to restart.
pub struct ConceptEnumerator {
    atoms: Vec<String>,
    roles: Vec<String>,
    grid: Vec<Rational>,
    max_rank: usize,
    max_size: usize,
    levels: Vec<Vec<Entry>>,
    cursor: usize,
}

impl ConceptEnumerator {
    pub fn new(atoms: &[String], roles: &[String], max_rank: usize, max_size: usize, grid: &[Rational]) -> Self {
        let mut grid = grid.to_vec();
        grid.sort();
        grid.dedup();
        let mut atoms = atoms.to_vec();
        atoms.sort();
        atoms.dedup();
        Self {
            atoms,
            roles: roles.to_vec(),
            grid,
            max_rank,
            max_size,
            // levels[0] is the (empty) size-0 level
            levels: vec![Vec::new()],
            cursor: 0,
        }
    }

    fn push(&self, out: &mut Vec<Entry>, concept: Arc<Concept>, rank: usize) {
        if rank <= self.max_rank {
            let key = concept.to_string();
            out.push(Entry { concept, rank, key });
        }
    }

    fn build_level(&self, size: usize) -> Vec<Entry> {
        let mut out = Vec::new();
        if size == 1 {
            for q in &self.grid {
                self.push(&mut out, Concept::constant(q.clone()), 0);
            }
            for a in &self.atoms {
                self.push(&mut out, Concept::atom(a), 1);
            }
            return out;
        }
        for e in &self.levels[size - 1] {
            self.push(&mut out, Concept::neg(e.concept.clone()), e.rank);
            for q in &self.grid {
                self.push(&mut out, Concept::trunc_sub(e.concept.clone(), q.clone()), e.rank);
            }
            for role in &self.roles {
                self.push(&mut out, Concept::dia(role, e.concept.clone()), e.rank + 1);
            }
        }
        for left_size in 1..size - 1 {
            let right_size = size - 1 - left_size;
            for l in &self.levels[left_size] {
                for r in &self.levels[right_size] {
                    if l.key <= r.key {
                        let rank = l.rank.max(r.rank);
                        self.push(&mut out, Concept::and(l.concept.clone(), r.concept.clone()), rank);
                        self.push(&mut out, Concept::or(l.concept.clone(), r.concept.clone()), rank);
                    }
                }
            }
        }
        out
    }
}

impl Iterator for ConceptEnumerator {
    type Item = Arc<Concept>;

    fn next(&mut self) -> Option<Arc<Concept>> {
        loop {
            let size = self.levels.len() - 1;
            if let Some(e) = self.levels[size].get(self.cursor) {
                self.cursor += 1;
                return Some(e.concept.clone());
            }
            if size >= self.max_size {
                return None;
            }
            let next = self.build_level(size + 1);
            self.levels.push(next);
            self.cursor = 0;
        }
    }
}

pub fn enumerate_concepts(
    atoms: &[String],
    roles: &[String],
    max_rank: usize,
    max_size: usize,
    grid: &[Rational],
) -> ConceptEnumerator {
    ConceptEnumerator::new(atoms, roles, max_rank, max_size, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{one, ratio, zero};
    use std::collections::HashSet;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn size_one_rank_one() {
        let got: Vec<String> = enumerate_concepts(&names(&["A", "B"]), &names(&["r"]), 1, 1, &[zero(), one()])
            .map(|c| c.to_string())
            .collect();
        assert_eq!(got, vec!["0", "1", "A", "B"]);
    }

    #[test]
    fn rank_zero_concepts_are_constant_combinations() {
        let all: Vec<_> = enumerate_concepts(&names(&["A"]), &names(&["r"]), 0, 4, &[zero(), ratio(1, 2)]).collect();
        assert!(!all.is_empty());
        for c in &all {
            assert_eq!(c.rank(), 0);
            assert!(c.atoms_used().is_empty() && c.roles_used().is_empty());
        }
    }

    #[test]
    fn respects_rank_and_has_no_duplicates() {
        let grid = [zero(), ratio(1, 2), one()];
        let mut seen = HashSet::new();
        for c in enumerate_concepts(&names(&["A"]), &names(&["r"]), 2, 5, &grid) {
            assert!(c.rank() <= 2);
            assert!(c.tree_size() <= 5);
            assert!(seen.insert(c.to_string()), "duplicate {c}");
        }
        assert!(seen.contains("<r> A"));
        assert!(seen.contains("<r> 1 & A"));
        assert!(!seen.contains("A & <r> 1"));
    }

    #[test]
    fn restartable() {
        let grid = [zero(), one()];
        let first: Vec<_> = enumerate_concepts(&names(&["A"]), &names(&["r"]), 2, 4, &grid).collect();
        let second: Vec<_> = enumerate_concepts(&names(&["A"]), &names(&["r"]), 2, 4, &grid).collect();
        assert_eq!(first, second);
    }
}
