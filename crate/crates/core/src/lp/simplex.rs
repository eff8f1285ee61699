//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! All variables are non-negative. Instances in this crate are tiny (a few
//! dozen variables), so a dense tableau is sufficient.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `sense  objective·x  subject to  constraints,  x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub objective: Vec<Rational>,
    pub sense: Sense,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rational, x: Vec<Rational> },
    Infeasible,
    Unbounded,
}

impl LinearProgram {
    pub fn new(num_vars: usize, sense: Sense, objective: Vec<Rational>) -> Self {
        assert_eq!(objective.len(), num_vars, "objective length must match variable count");
        Self {
            num_vars,
            objective,
            sense,
            constraints: Vec::new(),
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coeffs.len(), self.num_vars, "constraint length must match variable count");
        self.constraints.push(Constraint { coeffs, relation, rhs });
    }

    /// Sparse helper: `terms` lists `(variable, coefficient)`.
    pub fn add_sparse(&mut self, terms: &[(usize, Rational)], relation: Relation, rhs: Rational) {
        let mut coeffs = vec![Rational::zero(); self.num_vars];
        for (v, c) in terms {
            coeffs[*v] += c;
        }
        self.add_constraint(coeffs, relation, rhs);
    }

    pub fn is_feasible(&self, x: &[Rational]) -> bool {
        x.len() == self.num_vars
            && x.iter().all(|v| !v.is_negative())
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coeffs.iter().zip(x).map(|(a, b)| a * b).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    pub fn objective_at(&self, x: &[Rational]) -> Rational {
        self.objective.iter().zip(x).map(|(a, b)| a * b).sum()
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    /// Constraint rows; the last entry of each row is the right-hand side.
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// Columns `>= first_artificial` are phase-one artificials.
    first_artificial: usize,
    width: usize,
}

enum Phase {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars;
        let m = lp.constraints.len();
        // normalise so every right-hand side is non-negative
        let normalised: Vec<(Vec<Rational>, Relation, Rational)> = lp
            .constraints
            .iter()
            .map(|c| {
                if c.rhs.is_negative() {
                    let rel = match c.relation {
                        Relation::Le => Relation::Ge,
                        Relation::Ge => Relation::Le,
                        Relation::Eq => Relation::Eq,
                    };
                    (c.coeffs.iter().map(|v| -v).collect(), rel, -c.rhs.clone())
                } else {
                    (c.coeffs.clone(), c.relation, c.rhs.clone())
                }
            })
            .collect();
        let num_slack = normalised.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let num_art = normalised.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let first_artificial = n + num_slack;
        let width = first_artificial + num_art;

        let mut rows = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let (mut slack, mut art) = (n, first_artificial);
        for (coeffs, rel, rhs) in normalised {
            let mut row = vec![Rational::zero(); width + 1];
            row[..n].clone_from_slice(&coeffs);
            row[width] = rhs;
            match rel {
                Relation::Le => {
                    row[slack] = Rational::one();
                    basis.push(slack);
                    slack += 1;
                }
                Relation::Ge => {
                    row[slack] = -Rational::one();
                    slack += 1;
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
                Relation::Eq => {
                    row[art] = Rational::one();
                    basis.push(art);
                    art += 1;
                }
            }
            rows.push(row);
        }
        Self {
            rows,
            basis,
            first_artificial,
            width,
        }
    }

    fn pivot(&mut self, obj: &mut [Rational], r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for v in self.rows[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.rows[r].clone();
        let eliminate = |row: &mut [Rational]| {
            let factor = row[c].clone();
            if factor.is_zero() {
                return;
            }
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= &factor * p;
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                eliminate(row);
            }
        }
        eliminate(obj);
        self.basis[r] = c;
    }

    /// Maximises with objective row `obj` (entries are negated reduced
    /// costs, last entry is the current value), over columns `< limit`.
    fn run(&mut self, obj: &mut [Rational], limit: usize) -> Phase {
        loop {
            // Bland: lowest-index improving column
            let Some(c) = (0..limit).find(|&j| obj[j].is_negative()) else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, Rational)> = None;
            for (i, row) in self.rows.iter().enumerate() {
                if row[c].is_positive() {
                    let ratio = &row[self.width] / &row[c];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = best else {
                return Phase::Unbounded;
            };
            self.pivot(obj, r, c);
        }
    }

    fn objective_row(&self, costs: &[Rational]) -> Vec<Rational> {
        let mut obj = vec![Rational::zero(); self.width + 1];
        for (j, c) in costs.iter().enumerate() {
            obj[j] = -c;
        }
        for (i, &b) in self.basis.iter().enumerate() {
            let factor = obj[b].clone();
            if !factor.is_zero() {
                for (v, p) in obj.iter_mut().zip(&self.rows[i]) {
                    *v -= &factor * p;
                }
            }
        }
        obj
    }

    fn solve(mut self, lp: &LinearProgram) -> LpOutcome {
        if self.first_artificial < self.width {
            let mut costs = vec![Rational::zero(); self.width];
            for c in costs.iter_mut().skip(self.first_artificial) {
                *c = -Rational::one();
            }
            let mut obj = self.objective_row(&costs);
            let width = self.width;
            if let Phase::Unbounded = self.run(&mut obj, width) {
                unreachable!("phase one is bounded by zero");
            }
            if obj[self.width].is_negative() {
                return LpOutcome::Infeasible;
            }
            self.drive_out_artificials(&mut obj);
        }

        let mut costs = vec![Rational::zero(); self.width];
        for (j, c) in lp.objective.iter().enumerate() {
            costs[j] = match lp.sense {
                Sense::Maximize => c.clone(),
                Sense::Minimize => -c,
            };
        }
        let mut obj = self.objective_row(&costs);
        let limit = self.first_artificial;
        if let Phase::Unbounded = self.run(&mut obj, limit) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Rational::zero(); lp.num_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.num_vars {
                x[b] = self.rows[i][self.width].clone();
            }
        }
        let value = lp.objective_at(&x);
        LpOutcome::Optimal { value, x }
    }

    /// Pivots zero-level artificials out of the basis; rows where that is
    /// impossible are linearly dependent and are dropped.
    fn drive_out_artificials(&mut self, obj: &mut [Rational]) {
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.first_artificial {
                match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                    Some(c) => self.pivot(obj, i, c),
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
        // artificial columns may now be ignored: they are never basic and
        // phase two only scans columns below `first_artificial`
    }
}
