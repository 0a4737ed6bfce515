//! Two-phase primal simplex on a dense exact tableau, Bland's rule.
//!
//! Column layout of the standard form: split structural columns (one per
//! nonnegative variable, two per free variable), then one slack per
//! inequality row, then one artificial per row. Rows are negated where needed
//! so every right-hand side starts nonnegative. Artificial columns never
//! re-enter the basis; they stay in the tableau so that `B^-1` (and hence the
//! row multipliers) can be read off at the end of either phase.

use num_traits::{One, Signed, Zero};

use super::{LinearProgram, LpOutcome, Relation};
use crate::error::{check_cap, Result};
use crate::exec::Caps;
use crate::model::Rational;

/// Solves with the default tableau-cell guard.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    solve_lp_capped(lp, Caps::default().lp_cells)
}

pub fn solve_lp_capped(lp: &LinearProgram, max_cells: u128) -> Result<LpOutcome> {
    let mut std = StandardForm::new(lp);
    let cells = (std.rows() as u128) * (std.cols() as u128 + 1);
    check_cap("lp_cells", cells, max_cells)?;
    Ok(std.solve(lp))
}

struct StandardForm {
    /// Column index of x_j^+ and (for free variables) x_j^-.
    plus: Vec<usize>,
    minus: Vec<Option<usize>>,
    first_artificial: usize,
    /// Row sign flips applied to make rhs >= 0.
    flip: Vec<bool>,
    tab: Tableau,
}

struct Tableau {
    a: Vec<Vec<Rational>>,
    b: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs.
    d: Vec<Rational>,
    /// Negated objective value of the current basis.
    neg_z: Rational,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl StandardForm {
    fn new(lp: &LinearProgram) -> Self {
        let mut plus = Vec::with_capacity(lp.num_vars());
        let mut minus = Vec::with_capacity(lp.num_vars());
        let mut next = 0;
        for &nn in lp.nonneg() {
            plus.push(next);
            next += 1;
            if nn {
                minus.push(None);
            } else {
                minus.push(Some(next));
                next += 1;
            }
        }
        let m = lp.rows().len();
        let num_slacks = lp
            .rows()
            .iter()
            .filter(|r| r.relation != Relation::Eq)
            .count();
        let first_artificial = next + num_slacks;
        let n = first_artificial + m;

        let mut a = Vec::with_capacity(m);
        let mut b = Vec::with_capacity(m);
        let mut flip = Vec::with_capacity(m);
        let mut slack = next;
        for (i, row) in lp.rows().iter().enumerate() {
            let mut dense = vec![Rational::zero(); n];
            for (j, coef) in &row.coeffs {
                dense[plus[*j]] += coef;
                if let Some(mj) = minus[*j] {
                    dense[mj] -= coef;
                }
            }
            match row.relation {
                Relation::Le => {
                    dense[slack] = Rational::one();
                    slack += 1;
                }
                Relation::Ge => {
                    dense[slack] = -Rational::one();
                    slack += 1;
                }
                Relation::Eq => {}
            }
            let negate = row.rhs.is_negative();
            let mut rhs = row.rhs.clone();
            if negate {
                for v in dense.iter_mut() {
                    if !v.is_zero() {
                        *v = -v.clone();
                    }
                }
                rhs = -rhs;
            }
            dense[first_artificial + i] = Rational::one();
            a.push(dense);
            b.push(rhs);
            flip.push(negate);
        }
        let basis = (0..m).map(|i| first_artificial + i).collect();
        StandardForm {
            plus,
            minus,
            first_artificial,
            flip,
            tab: Tableau {
                a,
                b,
                basis,
                d: vec![Rational::zero(); n],
                neg_z: Rational::zero(),
            },
        }
    }

    fn rows(&self) -> usize {
        self.tab.a.len()
    }

    fn cols(&self) -> usize {
        self.tab.d.len()
    }

    fn solve(&mut self, lp: &LinearProgram) -> LpOutcome {
        let n = self.cols();
        let first_art = self.first_artificial;

        // Phase 1: minimize the sum of artificials.
        let mut phase1 = vec![Rational::zero(); n];
        for c in phase1.iter_mut().skip(first_art) {
            *c = Rational::one();
        }
        self.tab.price(&phase1);
        match self.tab.run(first_art) {
            Step::Optimal => {}
            Step::Unbounded(_) => unreachable!("phase 1 objective is bounded below by 0"),
        }
        if self.tab.neg_z.is_negative() {
            // y'_i = 1 - d_art_i is a Farkas certificate of the flipped system.
            let farkas = (0..self.rows())
                .map(|i| {
                    let y = Rational::one() - &self.tab.d[first_art + i];
                    if self.flip[i] {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            return LpOutcome::Infeasible { farkas };
        }

        // Drive zero-level artificials out of the basis where possible; a row
        // with no structural nonzero is redundant and keeps its artificial.
        for p in 0..self.rows() {
            if self.tab.basis[p] >= first_art {
                if let Some(q) = (0..first_art).find(|&j| !self.tab.a[p][j].is_zero()) {
                    self.tab.pivot(p, q);
                }
            }
        }

        // Phase 2.
        let mut cost = vec![Rational::zero(); n];
        for (j, c) in lp.objective().iter().enumerate() {
            cost[self.plus[j]] = c.clone();
            if let Some(mj) = self.minus[j] {
                cost[mj] = -c.clone();
            }
        }
        self.tab.price(&cost);
        match self.tab.run(first_art) {
            Step::Optimal => {
                let primal = self.primal();
                let value = lp.objective_value(&primal);
                let dual = (0..self.rows())
                    .map(|i| {
                        let y = -self.tab.d[first_art + i].clone();
                        if self.flip[i] {
                            -y
                        } else {
                            y
                        }
                    })
                    .collect();
                LpOutcome::Optimal {
                    value,
                    primal,
                    dual,
                }
            }
            Step::Unbounded(q) => {
                let point = self.primal();
                let mut dir = vec![Rational::zero(); n];
                dir[q] = Rational::one();
                for (i, &bv) in self.tab.basis.iter().enumerate() {
                    if !self.tab.a[i][q].is_zero() {
                        dir[bv] = -self.tab.a[i][q].clone();
                    }
                }
                let ray = self.to_original(&dir);
                LpOutcome::Unbounded { point, ray }
            }
        }
    }

    fn primal(&self) -> Vec<Rational> {
        let mut std = vec![Rational::zero(); self.cols()];
        for (i, &bv) in self.tab.basis.iter().enumerate() {
            std[bv] = self.tab.b[i].clone();
        }
        self.to_original(&std)
    }

    fn to_original(&self, std: &[Rational]) -> Vec<Rational> {
        self.plus
            .iter()
            .zip(&self.minus)
            .map(|(&p, m)| match m {
                Some(mj) => &std[p] - &std[*mj],
                None => std[p].clone(),
            })
            .collect()
    }
}

impl Tableau {
    /// Sets reduced costs and objective for cost vector `c` under the
    /// current basis.
    fn price(&mut self, c: &[Rational]) {
        self.d = c.to_vec();
        self.neg_z = Rational::zero();
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = &c[bv];
            if cb.is_zero() {
                continue;
            }
            for (dj, aij) in self.d.iter_mut().zip(&self.a[i]) {
                if !aij.is_zero() {
                    *dj -= cb * aij;
                }
            }
            self.neg_z -= cb * &self.b[i];
        }
    }

    /// Bland's rule iterations over entering columns `< limit`.
    fn run(&mut self, limit: usize) -> Step {
        loop {
            let Some(q) = (0..limit).find(|&j| self.d[j].is_negative()) else {
                return Step::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.a.len() {
                let aiq = &self.a[i][q];
                if !aiq.is_positive() {
                    continue;
                }
                let ratio = &self.b[i] / aiq;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => {
                        ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return Step::Unbounded(q),
                Some((p, _)) => self.pivot(p, q),
            }
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let piv = self.a[p][q].clone();
        if !piv.is_one() {
            for v in self.a[p].iter_mut() {
                if !v.is_zero() {
                    *v /= &piv;
                }
            }
            self.b[p] /= &piv;
        }
        let prow: Vec<(usize, Rational)> = self.a[p]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        let pb = self.b[p].clone();
        for i in 0..self.a.len() {
            if i == p {
                continue;
            }
            let f = self.a[i][q].clone();
            if f.is_zero() {
                continue;
            }
            let row = &mut self.a[i];
            for (j, v) in &prow {
                row[*j] -= &f * v;
            }
            self.b[i] -= &f * &pb;
        }
        let f = self.d[q].clone();
        if !f.is_zero() {
            for (j, v) in &prow {
                self.d[*j] -= &f * v;
            }
            self.neg_z -= &f * &pb;
        }
        self.basis[p] = q;
    }
}
