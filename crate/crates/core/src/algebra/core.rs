use num_traits::{One, Signed, Zero};

use super::fracpol::fracpol_lp;
use super::{OpClass, Operation};
use crate::error::{check_cap, Error, Result};
use crate::exactlp::{solve_lp_capped, LpOutcome};
use crate::exec::Config;
use crate::model::{unary_subset_name, Label, Language, Rational, RESERVED_PREFIX};
use crate::tuple;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RigidCore {
    /// Image of the chosen unary operation, in increasing order. Label `i`
    /// of the core language stands for `subdomain[i]`.
    pub subdomain: Vec<Label>,
    pub map: Operation,
    /// Unary operations in the support of some arity-1 fractional
    /// polymorphism, in lexicographic order.
    pub members: Vec<Operation>,
    pub lang: Language,
}

pub fn rigid_core(lang: &Language) -> Result<RigidCore> {
    rigid_core_with(lang, &Config::default())
}

/// Collects every unary operation admitted by an arity-1 fractional
/// polymorphism, picks one with the fewest image points (lexicographically
/// least table on ties), restricts the language to its image and adds all
/// singleton unary functions.
pub fn rigid_core_with(lang: &Language, cfg: &Config) -> Result<RigidCore> {
    let k = lang.domain_size();
    check_cap("ops", tuple::count_u128(k, k), cfg.caps.ops)?;
    let (candidates, base) = fracpol_lp(lang, 1, OpClass::All, cfg)?;

    let mut known = vec![false; candidates.len()];
    loop {
        let open: Vec<usize> = (0..candidates.len()).filter(|&j| !known[j]).collect();
        if open.is_empty() {
            break;
        }
        let mut lp = base.clone();
        for &j in &open {
            lp.set_objective(j, -Rational::one());
        }
        match solve_lp_capped(&lp, cfg.caps.lp_cells)? {
            LpOutcome::Optimal { value, primal, .. } => {
                if value.is_zero() {
                    break;
                }
                for j in open {
                    if primal[j].is_positive() {
                        known[j] = true;
                    }
                }
            }
            _ => {
                return Err(Error::Hypothesis(
                    "the identity is always an arity-1 fractional polymorphism".into(),
                ))
            }
        }
    }
    let members: Vec<Operation> = candidates
        .into_iter()
        .zip(known)
        .filter_map(|(g, keep)| keep.then_some(g))
        .collect();
    let map = members
        .iter()
        .min_by(|a, b| (a.image().len(), a.table()).cmp(&(b.image().len(), b.table())))
        .cloned()
        .ok_or_else(|| Error::Hypothesis("no unary fractional polymorphism found".into()))?;
    let subdomain = map.image();

    let mut core = Language::new(subdomain.len())?;
    for f in lang.functions() {
        let mut r = f.restricted(&subdomain);
        if r.name().starts_with(RESERVED_PREFIX) && r.arity() == 1 && r.is_crisp() {
            let labels: Vec<Label> = r.dom().map(|t| t[0]).collect();
            r = r.renamed(unary_subset_name(&labels));
        }
        core.ensure(r)?;
    }
    for d in 0..subdomain.len() {
        core.ensure_unary_subset(&[d])?;
    }
    Ok(RigidCore {
        subdomain,
        map,
        members,
        lang: core,
    })
}
