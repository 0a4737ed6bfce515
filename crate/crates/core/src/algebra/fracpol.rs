//! LP-based search for fractional polymorphisms of a class.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, Ordering};

use num_traits::{One, Signed, Zero};

use super::{FracOp, OpClass, Operation, Orbits};
use crate::error::{check_cap, Error, Result};
use crate::exactlp::{solve_lp_capped, verify_outcome, LinearProgram, LpOutcome, Relation};
use crate::exec::{map_range, map_vec, Config};
use crate::model::{Label, Language, Rational};
use crate::tuple;

/// Result of a fractional-polymorphism search. `fracop` is `None` exactly
/// when the LP is infeasible, in which case `outcome` carries a Farkas
/// certificate for `lp`.
#[derive(Clone, Debug)]
pub struct FracpolReport {
    pub arity: usize,
    pub class: OpClass,
    /// Class operations that are polymorphisms of the feasibility language,
    /// indexing the LP variables.
    pub candidates: Vec<Operation>,
    pub lp: LinearProgram,
    pub outcome: LpOutcome,
    pub fracop: Option<FracOp>,
}

impl FracpolReport {
    pub fn certificate(&self) -> Option<&[Rational]> {
        match &self.outcome {
            LpOutcome::Infeasible { farkas } => Some(farkas),
            _ => None,
        }
    }

    /// Re-checks the LP outcome (primal/dual or Farkas) independently.
    pub fn outcome_verified(&self) -> bool {
        verify_outcome(&self.lp, &self.outcome)
    }
}

struct Check {
    function: usize,
    columns: Vec<usize>,
}

/// All operations of the class preserving every `dom f`, in lexicographic
/// order of their orbit-representative values. Uses a backtracking search
/// that checks each tuple family as soon as its image is determined.
pub fn class_polymorphisms(
    lang: &Language,
    m: usize,
    class: OpClass,
    cfg: &Config,
) -> Result<Vec<Operation>> {
    let k = lang.domain_size();
    if m == 0 {
        return Err(Error::Invalid("arity must be >= 1".into()));
    }
    check_cap("ops", tuple::count_u128(k, m), cfg.caps.ops)?;
    let orbits = Orbits::new(k, m, class)?;
    let functions: Vec<_> = lang.functions().collect();

    let raw: u128 = functions
        .iter()
        .map(|f| (f.dom_size() as u128).saturating_pow(m as u32))
        .fold(0u128, u128::saturating_add);
    check_cap(
        "fracpol_rows",
        raw,
        cfg.caps.fracpol_rows.saturating_mul(class.group_order(m)),
    )?;

    let mut seen: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); functions.len()];
    let mut checks: Vec<Vec<Check>> = (0..orbits.reps.len()).map(|_| Vec::new()).collect();
    for (fi, f) in functions.iter().enumerate() {
        let dom: Vec<&[Label]> = f.dom().map(|t| t.as_slice()).collect();
        let mut col = vec![0; m];
        tuple::for_each_family(dom.len(), m, |fam| {
            if !class.is_canonical(fam) {
                return;
            }
            let columns: Vec<usize> = (0..f.arity())
                .map(|j| {
                    for (c, &i) in col.iter_mut().zip(fam) {
                        *c = dom[i][j];
                    }
                    orbits.rep_of[tuple::rank(&col, k)]
                })
                .collect();
            if seen[fi].insert(columns.clone()) {
                let last = *columns.iter().max().expect("arity >= 1");
                checks[last].push(Check {
                    function: fi,
                    columns,
                });
            }
        });
    }

    let nodes = AtomicU64::new(0);
    let node_cap = cfg.caps.brute_evals;
    let var_cap = cfg.caps.fracpol_vars;
    let reps = orbits.reps.len();

    let search = |first: Label| -> Result<Vec<Vec<Label>>> {
        let mut values = vec![0; reps];
        let mut found = Vec::new();
        let mut image = Vec::new();
        let consistent = |values: &[Label], i: usize, image: &mut Vec<Label>| {
            checks[i].iter().all(|c| {
                image.clear();
                image.extend(c.columns.iter().map(|&r| values[r]));
                functions[c.function].in_dom(image)
            })
        };
        values[0] = first;
        if !consistent(&values, 0, &mut image) {
            return Ok(found);
        }
        if reps == 1 {
            found.push(values);
            return Ok(found);
        }
        let mut depth = 1;
        values[1] = 0;
        loop {
            let visited = nodes.fetch_add(1, Ordering::Relaxed) as u128 + 1;
            check_cap("brute_evals", visited, node_cap)?;
            let ok = consistent(&values, depth, &mut image);
            if ok && depth + 1 == reps {
                found.push(values.clone());
                check_cap("fracpol_vars", found.len() as u128, var_cap)?;
            }
            if ok && depth + 1 < reps {
                depth += 1;
                values[depth] = 0;
                continue;
            }
            loop {
                if values[depth] + 1 < k {
                    values[depth] += 1;
                    break;
                }
                depth -= 1;
                if depth == 0 {
                    return Ok(found);
                }
            }
        }
    };

    let parts = map_range(cfg.exec, k, search);
    let mut out = Vec::new();
    for part in parts {
        for values in part? {
            out.push(orbits.operation(k, m, &values));
        }
    }
    check_cap("fracpol_vars", out.len() as u128, var_cap)?;
    Ok(out)
}

/// Builds the LP over class polymorphisms: `sum w = 1` and, for each
/// function and each class-canonical family of `m` dom tuples,
/// `m * sum_g w(g) f(g(x)) <= sum_i f(x^i)`. Rows implied by the simplex
/// row are omitted.
pub(crate) fn fracpol_lp(
    lang: &Language,
    m: usize,
    class: OpClass,
    cfg: &Config,
) -> Result<(Vec<Operation>, LinearProgram)> {
    let candidates = class_polymorphisms(lang, m, class, cfg)?;
    let n = candidates.len();
    let mut lp = LinearProgram::new(n);
    lp.add_row(
        (0..n).map(|j| (j, Rational::one())),
        Relation::Eq,
        Rational::one(),
    )?;
    if n == 0 {
        return Ok((candidates, lp));
    }

    let functions: Vec<_> = lang.functions().collect();
    let mut families: Vec<(usize, Vec<usize>)> = Vec::new();
    for (fi, f) in functions.iter().enumerate() {
        tuple::for_each_family(f.dom_size(), m, |fam| {
            if class.is_canonical(fam) {
                families.push((fi, fam.to_vec()));
            }
        });
        check_cap(
            "fracpol_rows",
            families.len() as u128,
            cfg.caps.fracpol_rows,
        )?;
    }
    let doms: Vec<Vec<&[Label]>> = functions
        .iter()
        .map(|f| f.dom().map(|t| t.as_slice()).collect())
        .collect();
    let m_rat = Rational::from_integer(m.into());

    let rows = map_vec(cfg.exec, families, |(fi, fam)| {
        let f = functions[fi];
        let xs: Vec<&[Label]> = fam.iter().map(|&i| doms[fi][i]).collect();
        let rhs: Rational = xs.iter().map(|x| f.finite_value(x).expect("in dom")).sum();
        let coeffs: Vec<Rational> = candidates
            .iter()
            .map(|g| {
                f.finite_value(&g.apply_columns(&xs))
                    .expect("polymorphism keeps dom")
                    * &m_rat
            })
            .collect();
        if coeffs.iter().all(|c| *c <= rhs) {
            None
        } else {
            Some((coeffs, rhs))
        }
    });
    for (coeffs, rhs) in rows.into_iter().flatten() {
        lp.add_row(coeffs.into_iter().enumerate(), Relation::Le, rhs)?;
    }
    Ok((candidates, lp))
}

fn fracop_from_primal(candidates: &[Operation], primal: &[Rational]) -> Result<FracOp> {
    FracOp::new(
        candidates
            .iter()
            .zip(primal)
            .filter(|(_, w)| w.is_positive())
            .map(|(g, w)| (g.clone(), w.clone())),
    )
}

pub fn find_fracpol(
    lang: &Language,
    m: usize,
    class: OpClass,
    target: Option<&Operation>,
) -> Result<FracpolReport> {
    find_fracpol_with(lang, m, class, target, &Config::default())
}

/// Searches for a fractional polymorphism of arity `m` supported on class
/// operations. When `target` is given the weight on it is maximized.
pub fn find_fracpol_with(
    lang: &Language,
    m: usize,
    class: OpClass,
    target: Option<&Operation>,
    cfg: &Config,
) -> Result<FracpolReport> {
    let (candidates, mut lp) = fracpol_lp(lang, m, class, cfg)?;
    if let Some(j) = target.and_then(|t| candidates.iter().position(|g| g == t)) {
        lp.set_objective(j, -Rational::one());
    }
    let outcome = solve_lp_capped(&lp, cfg.caps.lp_cells)?;
    let fracop = match &outcome {
        LpOutcome::Optimal { primal, .. } => Some(fracop_from_primal(&candidates, primal)?),
        LpOutcome::Infeasible { .. } => None,
        LpOutcome::Unbounded { .. } => {
            return Err(Error::Hypothesis(
                "fractional polymorphism LP is bounded".into(),
            ))
        }
    };
    Ok(FracpolReport {
        arity: m,
        class,
        candidates,
        lp,
        outcome,
        fracop,
    })
}

pub fn unary_polplus_member(g: &Operation, lang: &Language) -> Result<bool> {
    unary_polplus_member_with(g, lang, &Config::default())
}

/// Whether some arity-1 fractional polymorphism gives `g` positive weight.
pub fn unary_polplus_member_with(g: &Operation, lang: &Language, cfg: &Config) -> Result<bool> {
    if g.arity() != 1 || g.domain_size() != lang.domain_size() {
        return Err(Error::Invalid(
            "expected a unary operation on the language's domain".into(),
        ));
    }
    let report = find_fracpol_with(lang, 1, OpClass::All, Some(g), cfg)?;
    Ok(report.fracop.is_some_and(|w| !w.weight(g).is_zero()))
}
