//! Exact rational linear programming with checkable certificates.
//!
//! [`solve_lp`] runs a two-phase dense-tableau simplex with Bland's rule and
//! returns one of three certified outcomes. [`verify_outcome`] re-checks any
//! outcome from scratch, using only the program data and exact arithmetic.
//!
//! Sign conventions for a row multiplier `y_i`, shared by the dual solution
//! and the Farkas certificate: `y_i <= 0` on `<=` rows, `y_i >= 0` on `>=`
//! rows, free on `=` rows.

mod simplex;

use std::fmt::Write as _;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{format_rational, Rational};

pub use simplex::{solve_lp, solve_lp_capped};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

/// One constraint row, stored sparsely as `(variable, coefficient)` pairs
/// with distinct variables and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Row {
    pub fn dot(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }
}

/// `minimize objective·x + constant` subject to the rows, with per-variable
/// nonnegativity flags (unflagged variables are free).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearProgram {
    num_vars: usize,
    objective: Vec<Rational>,
    constant: Rational,
    rows: Vec<Row>,
    nonneg: Vec<bool>,
}

impl LinearProgram {
    /// All variables nonnegative, zero objective, no rows.
    pub fn new(num_vars: usize) -> Self {
        LinearProgram {
            num_vars,
            objective: vec![Rational::zero(); num_vars],
            constant: Rational::zero(),
            rows: Vec::new(),
            nonneg: vec![true; num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn objective(&self) -> &[Rational] {
        &self.objective
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn nonneg(&self) -> &[bool] {
        &self.nonneg
    }

    pub fn set_objective(&mut self, j: usize, c: Rational) {
        self.objective[j] = c;
    }

    pub fn set_constant(&mut self, c: Rational) {
        self.constant = c;
    }

    pub fn set_free(&mut self, j: usize) {
        self.nonneg[j] = false;
    }

    /// Adds a sparse row; repeated variables are summed, zeros dropped.
    pub fn add_row<I>(&mut self, coeffs: I, relation: Relation, rhs: Rational) -> Result<usize>
    where
        I: IntoIterator<Item = (usize, Rational)>,
    {
        let mut merged: std::collections::BTreeMap<usize, Rational> = Default::default();
        for (j, a) in coeffs {
            if j >= self.num_vars {
                return Err(Error::VariableOutOfRange {
                    index: j,
                    num_vars: self.num_vars,
                });
            }
            *merged.entry(j).or_insert_with(Rational::zero) += a;
        }
        let coeffs = merged.into_iter().filter(|(_, a)| !a.is_zero()).collect();
        self.rows.push(Row {
            coeffs,
            relation,
            rhs,
        });
        Ok(self.rows.len() - 1)
    }

    /// Adds a dense row of length `num_vars`.
    pub fn add_dense_row(
        &mut self,
        coeffs: &[Rational],
        relation: Relation,
        rhs: Rational,
    ) -> Result<usize> {
        if coeffs.len() != self.num_vars {
            return Err(Error::Invalid(format!(
                "row has {} coefficients, program has {} variables",
                coeffs.len(),
                self.num_vars
            )));
        }
        self.add_row(coeffs.iter().cloned().enumerate(), relation, rhs)
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(self.constant.clone(), |acc, (c, v)| acc + c * v)
    }

    /// Line-based text dump: header, nonnegativity flags, objective, then
    /// one dense row per line with `p/q` literals.
    pub fn to_text(&self) -> String {
        let fmt_dense = |sparse: &[(usize, Rational)]| {
            let mut dense = vec![Rational::zero(); self.num_vars];
            for (j, a) in sparse {
                dense[*j] = a.clone();
            }
            dense
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "lp vars {} rows {}", self.num_vars, self.rows.len());
        let flags: Vec<&str> = self
            .nonneg
            .iter()
            .map(|&n| if n { "+" } else { "free" })
            .collect();
        let _ = writeln!(out, "bounds {}", flags.join(" "));
        let _ = writeln!(
            out,
            "minimize {} const {}",
            self.objective
                .iter()
                .map(format_rational)
                .collect::<Vec<_>>()
                .join(" "),
            format_rational(&self.constant)
        );
        for row in &self.rows {
            let _ = writeln!(
                out,
                "row {} {} {}",
                fmt_dense(&row.coeffs),
                row.relation.symbol(),
                format_rational(&row.rhs)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal {
        value: Rational,
        primal: Vec<Rational>,
        dual: Vec<Rational>,
    },
    Infeasible {
        farkas: Vec<Rational>,
    },
    /// `point` is feasible and `ray` is a recession direction along which
    /// the objective strictly decreases.
    Unbounded {
        point: Vec<Rational>,
        ray: Vec<Rational>,
    },
}

impl LpOutcome {
    pub fn is_optimal(&self) -> bool {
        matches!(self, LpOutcome::Optimal { .. })
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible { .. })
    }

    pub fn value(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { value, .. } => Some(value),
            _ => None,
        }
    }
}

fn multiplier_sign_ok(rel: Relation, y: &Rational) -> bool {
    match rel {
        Relation::Le => !y.is_positive(),
        Relation::Ge => !y.is_negative(),
        Relation::Eq => true,
    }
}

fn primal_feasible(lp: &LinearProgram, x: &[Rational]) -> bool {
    if x.len() != lp.num_vars {
        return false;
    }
    if lp
        .nonneg
        .iter()
        .zip(x)
        .any(|(&nn, v)| nn && v.is_negative())
    {
        return false;
    }
    lp.rows.iter().all(|row| {
        let lhs = row.dot(x);
        match row.relation {
            Relation::Le => lhs <= row.rhs,
            Relation::Eq => lhs == row.rhs,
            Relation::Ge => lhs >= row.rhs,
        }
    })
}

/// `Σ_i y_i a_ij` for every column `j`.
fn transpose_times(lp: &LinearProgram, y: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); lp.num_vars];
    for (row, yi) in lp.rows.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (j, a) in &row.coeffs {
            out[*j] += a * yi;
        }
    }
    out
}

fn rhs_dot(lp: &LinearProgram, y: &[Rational]) -> Rational {
    lp.rows
        .iter()
        .zip(y)
        .fold(Rational::zero(), |acc, (row, yi)| acc + &row.rhs * yi)
}

/// Independently re-checks an outcome against `lp`.
pub fn verify_outcome(lp: &LinearProgram, out: &LpOutcome) -> bool {
    match out {
        LpOutcome::Optimal {
            value,
            primal,
            dual,
        } => {
            if !primal_feasible(lp, primal) || dual.len() != lp.rows.len() {
                return false;
            }
            if !lp
                .rows
                .iter()
                .zip(dual)
                .all(|(row, y)| multiplier_sign_ok(row.relation, y))
            {
                return false;
            }
            let aty = transpose_times(lp, dual);
            let dual_feasible = (0..lp.num_vars).all(|j| {
                let reduced = &lp.objective[j] - &aty[j];
                if lp.nonneg[j] {
                    !reduced.is_negative()
                } else {
                    reduced.is_zero()
                }
            });
            let primal_obj = lp.objective_value(primal);
            let dual_obj = rhs_dot(lp, dual) + &lp.constant;
            dual_feasible && &primal_obj == value && &dual_obj == value
        }
        LpOutcome::Infeasible { farkas } => {
            if farkas.len() != lp.rows.len() {
                return false;
            }
            if !lp
                .rows
                .iter()
                .zip(farkas)
                .all(|(row, y)| multiplier_sign_ok(row.relation, y))
            {
                return false;
            }
            let aty = transpose_times(lp, farkas);
            let combination_ok = (0..lp.num_vars).all(|j| {
                if lp.nonneg[j] {
                    !aty[j].is_positive()
                } else {
                    aty[j].is_zero()
                }
            });
            combination_ok && rhs_dot(lp, farkas).is_positive()
        }
        LpOutcome::Unbounded { point, ray } => {
            if !primal_feasible(lp, point) || ray.len() != lp.num_vars {
                return false;
            }
            if lp
                .nonneg
                .iter()
                .zip(ray)
                .any(|(&nn, d)| nn && d.is_negative())
            {
                return false;
            }
            let rows_ok = lp.rows.iter().all(|row| {
                let ad = row.dot(ray);
                match row.relation {
                    Relation::Le => !ad.is_positive(),
                    Relation::Eq => ad.is_zero(),
                    Relation::Ge => !ad.is_negative(),
                }
            });
            let slope = lp
                .objective
                .iter()
                .zip(ray)
                .fold(Rational::zero(), |acc, (c, d)| acc + c * d);
            rows_ok && slope.is_negative()
        }
    }
}
