//! The basic LP relaxation and the certified solving pipeline.
//!
//! LP variable layout: all `μ_t(x)` first (constraint order, then `dom f_t`
//! in lexicographic order), followed by `α_v(a)` at `offset + v·k + a`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactlp::{solve_lp_capped, LinearProgram, LpOutcome, Relation};
use crate::exec::{self, Config};
use crate::feasibility::{one_infty_minimize_with, Backtracking, MinimalInstance};
use crate::model::{evaluate, Assignment, ExtRat, Instance, Label, Language, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlpProgram {
    pub lp: LinearProgram,
    /// Per constraint, the dom tuples carrying a `μ` variable (in order).
    pub mu_tuples: Vec<Vec<Vec<Label>>>,
    /// Per constraint, index of its first `μ` variable.
    pub mu_offset: Vec<usize>,
    pub alpha_offset: usize,
    /// LP column of `α_v(a)`, if that variable is present.
    pub alpha_index: Vec<Vec<Option<usize>>>,
    pub domain_size: usize,
    pub num_vars: usize,
    /// First constraint with no `μ` variable; its simplex row `Σ μ_t = 1`
    /// is then unsatisfiable, so the program is infeasible by construction.
    pub empty_dom: Option<usize>,
}

impl BlpProgram {
    pub fn alpha_var(&self, v: usize, a: Label) -> Option<usize> {
        self.alpha_index[v][a]
    }
}

/// The relaxation exactly as written: one `μ` per dom tuple, one `α` per
/// variable and label, one marginal row per constraint position and label.
pub fn build_blp(lang: &Language, inst: &Instance) -> Result<BlpProgram> {
    build(lang, inst, false)
}

/// An equivalent, smaller relaxation. Labels that some constraint on `v`
/// never uses at `v`'s position force `α_v(a) = 0` through a marginal row,
/// which in turn forces every `μ` on a tuple using that label to zero. Those
/// variables and rows are removed, repeating until nothing changes.
pub fn build_blp_reduced(lang: &Language, inst: &Instance) -> Result<BlpProgram> {
    build(lang, inst, true)
}

fn build(lang: &Language, inst: &Instance, reduce: bool) -> Result<BlpProgram> {
    let resolved = inst.resolve(lang)?;
    let k = lang.domain_size();
    let n = inst.num_vars();

    let mut allowed = vec![vec![true; k]; n];
    let mut kept: Vec<Vec<Vec<Label>>> = resolved
        .iter()
        .map(|(f, _)| f.dom().cloned().collect())
        .collect();
    if reduce {
        loop {
            for ((_, scope), tuples) in resolved.iter().zip(kept.iter_mut()) {
                tuples.retain(|x| scope.iter().zip(x).all(|(&v, &a)| allowed[v][a]));
            }
            let mut next = allowed.clone();
            for ((_, scope), tuples) in resolved.iter().zip(&kept) {
                for (pos, &v) in scope.iter().enumerate() {
                    let mut used = vec![false; k];
                    for x in tuples {
                        used[x[pos]] = true;
                    }
                    for a in 0..k {
                        next[v][a] &= used[a];
                    }
                }
            }
            if next == allowed {
                break;
            }
            allowed = next;
        }
    }

    let mut mu_offset = Vec::with_capacity(resolved.len());
    let mut next = 0;
    for tuples in &kept {
        mu_offset.push(next);
        next += tuples.len();
    }
    let alpha_offset = next;
    let alpha_index: Vec<Vec<Option<usize>>> = allowed
        .iter()
        .map(|labels| {
            labels
                .iter()
                .map(|&ok| {
                    ok.then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        })
        .collect();

    let mut lp = LinearProgram::new(next);
    let mut program = BlpProgram {
        lp: LinearProgram::new(0),
        mu_tuples: kept,
        mu_offset,
        alpha_offset,
        alpha_index,
        domain_size: k,
        num_vars: n,
        empty_dom: None,
    };

    for (t, (f, scope)) in resolved.iter().enumerate() {
        let base = program.mu_offset[t];
        let tuples = &program.mu_tuples[t];
        for (i, x) in tuples.iter().enumerate() {
            let cost = f.finite_value(x).expect("dom tuple has a finite value");
            lp.set_objective(base + i, cost.clone());
        }
        for (pos, &v) in scope.iter().enumerate() {
            for a in 0..k {
                let Some(alpha) = program.alpha_var(v, a) else {
                    continue;
                };
                let mut coeffs: Vec<(usize, Rational)> = tuples
                    .iter()
                    .enumerate()
                    .filter(|(_, x)| x[pos] == a)
                    .map(|(i, _)| (base + i, Rational::one()))
                    .collect();
                coeffs.push((alpha, -Rational::one()));
                lp.add_row(coeffs, Relation::Eq, Rational::zero())?;
            }
        }
    }
    for (t, tuples) in program.mu_tuples.iter().enumerate() {
        let base = program.mu_offset[t];
        if tuples.is_empty() && program.empty_dom.is_none() {
            program.empty_dom = Some(t);
        }
        lp.add_row(
            (0..tuples.len()).map(|i| (base + i, Rational::one())),
            Relation::Eq,
            Rational::one(),
        )?;
    }
    for v in 0..n {
        lp.add_row(
            (0..k)
                .filter_map(|a| program.alpha_var(v, a))
                .map(|j| (j, Rational::one())),
            Relation::Eq,
            Rational::one(),
        )?;
    }
    program.lp = lp;
    Ok(program)
}

/// A feasible point of the relaxation, read back from the LP primal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlpSolution {
    pub value: Rational,
    pub alpha: Vec<Vec<Rational>>,
    /// Per constraint, `(x, μ_t(x))` over `dom f_t`.
    pub mu: Vec<Vec<(Vec<Label>, Rational)>>,
}

impl BlpSolution {
    /// Re-checks simplices, support, marginal consistency and the objective
    /// directly against the instance, without the LP.
    pub fn verify(&self, lang: &Language, inst: &Instance) -> bool {
        let Ok(resolved) = inst.resolve(lang) else {
            return false;
        };
        let k = lang.domain_size();
        let is_dist = |ps: &mut dyn Iterator<Item = &Rational>| {
            let mut total = Rational::zero();
            for p in ps {
                if p.is_negative() {
                    return false;
                }
                total += p;
            }
            total.is_one()
        };
        if self.alpha.len() != inst.num_vars() || self.mu.len() != resolved.len() {
            return false;
        }
        if !self
            .alpha
            .iter()
            .all(|a| a.len() == k && is_dist(&mut a.iter()))
        {
            return false;
        }
        let mut value = Rational::zero();
        for ((f, scope), mu) in resolved.iter().zip(&self.mu) {
            if !is_dist(&mut mu.iter().map(|(_, p)| p)) {
                return false;
            }
            for (x, p) in mu {
                match f.finite_value(x) {
                    Some(c) => value += c * p,
                    None if p.is_zero() => {}
                    None => return false,
                }
            }
            for (pos, &v) in scope.iter().enumerate() {
                let mut marginal = vec![Rational::zero(); k];
                for (x, p) in mu {
                    marginal[x[pos]] += p;
                }
                if marginal != self.alpha[v] {
                    return false;
                }
            }
        }
        value == self.value
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlpResult {
    pub value: ExtRat,
    pub solution: Option<BlpSolution>,
    /// The program actually solved (the reduced form) and its outcome.
    pub lp: LinearProgram,
    pub outcome: LpOutcome,
}

pub fn blp_value(lang: &Language, inst: &Instance) -> Result<BlpResult> {
    blp_value_with(lang, inst, &Config::default())
}

pub fn blp_value_with(lang: &Language, inst: &Instance, cfg: &Config) -> Result<BlpResult> {
    let program = build_blp_reduced(lang, inst)?;
    let outcome = solve_lp_capped(&program.lp, cfg.caps.lp_cells)?;
    match &outcome {
        LpOutcome::Infeasible { .. } => Ok(BlpResult {
            value: ExtRat::Infinity,
            solution: None,
            lp: program.lp.clone(),
            outcome,
        }),
        LpOutcome::Optimal { value, primal, .. } => {
            let k = program.domain_size;
            let read = |j: Option<usize>| j.map_or_else(Rational::zero, |j| primal[j].clone());
            let alpha = (0..program.num_vars)
                .map(|v| (0..k).map(|a| read(program.alpha_var(v, a))).collect())
                .collect();
            let resolved = inst.resolve(lang)?;
            let mu = resolved
                .iter()
                .enumerate()
                .map(|(t, (f, _))| {
                    let base = program.mu_offset[t];
                    let kept = &program.mu_tuples[t];
                    f.dom()
                        .map(|x| {
                            let j = kept.iter().position(|y| y == x).map(|i| base + i);
                            (x.clone(), read(j))
                        })
                        .collect()
                })
                .collect();
            Ok(BlpResult {
                value: ExtRat::Finite(value.clone()),
                solution: Some(BlpSolution {
                    value: value.clone(),
                    alpha,
                    mu,
                }),
                lp: program.lp.clone(),
                outcome,
            })
        }
        LpOutcome::Unbounded { .. } => Err(Error::Invalid(
            "basic LP relaxation reported unbounded; every variable lies in a simplex".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VcspSolution {
    /// `BLP(Ī)`.
    pub value: ExtRat,
    pub assignment: Option<Assignment>,
    /// True iff the assignment evaluates exactly to `value` on the original
    /// instance (or both are infinite with no assignment).
    pub certified: bool,
    pub minimal: MinimalInstance,
    pub diagnostics: Vec<String>,
}

pub fn solve_vcsp(lang: &Language, inst: &Instance) -> Result<VcspSolution> {
    solve_vcsp_with(lang, inst, &Config::default())
}

/// (1,∞)-minimalize, take `v* = BLP(Ī)`, then self-reduce: for each
/// variable in order, pin the first label of `D_v` that keeps the BLP
/// optimum at `v*`.
pub fn solve_vcsp_with(lang: &Language, inst: &Instance, cfg: &Config) -> Result<VcspSolution> {
    let minimal = one_infty_minimize_with(&Backtracking, lang, inst, cfg)?;
    let target = blp_value_with(&minimal.lang, &minimal.inst, cfg)?.value;
    if target.is_infinite() {
        return Ok(VcspSolution {
            value: ExtRat::Infinity,
            assignment: None,
            certified: true,
            minimal,
            diagnostics: Vec::new(),
        });
    }

    let mut cur_lang = minimal.lang.clone();
    let mut cur = minimal.inst.clone();
    let mut labels = Vec::with_capacity(inst.num_vars());
    let mut diagnostics = Vec::new();
    for v in 0..inst.num_vars() {
        let candidates = minimal.supported.labels(v);
        let mut pinned: Vec<(Language, Instance)> = Vec::with_capacity(candidates.len());
        for &d in candidates {
            let mut l = cur_lang.clone();
            let name = l.ensure_unary_subset(&[d])?;
            let i = cur.clone().with(name, vec![v])?;
            pinned.push((l, i));
        }
        let accepted = if candidates.len() == 1 {
            // u_{D_v} = u_d is already present: pinning changes nothing.
            Some(0)
        } else if cfg.exec.is_parallel() {
            let values = exec::map_vec(cfg.exec, pinned.iter().collect(), |(l, i)| {
                blp_value_with(l, i, cfg).map(|r| r.value)
            });
            let mut hit = None;
            for (idx, val) in values.into_iter().enumerate() {
                if val? == target {
                    hit = Some(idx);
                    break;
                }
            }
            hit
        } else {
            let mut hit = None;
            for (idx, (l, i)) in pinned.iter().enumerate() {
                if blp_value_with(l, i, cfg)?.value == target {
                    hit = Some(idx);
                    break;
                }
            }
            hit
        };
        match accepted {
            Some(idx) => {
                labels.push(candidates[idx]);
                let (l, i) = pinned.swap_remove(idx);
                cur_lang = l;
                cur = i;
            }
            None => {
                diagnostics.push(format!(
                    "self-reduction dead end at variable {v}: no label in {candidates:?} keeps the relaxation value {target}"
                ));
                return Ok(VcspSolution {
                    value: target,
                    assignment: None,
                    certified: false,
                    minimal,
                    diagnostics,
                });
            }
        }
    }
    let assignment = Assignment(labels);
    let achieved = evaluate(lang, inst, &assignment)?;
    let certified = achieved == target;
    if !certified {
        diagnostics.push(format!(
            "assignment evaluates to {achieved}, relaxation value is {target}"
        ));
    }
    Ok(VcspSolution {
        value: target,
        assignment: Some(assignment),
        certified,
        minimal,
        diagnostics,
    })
}
