//! Block-finite lifting of an instance: every variable gets its own copy of
//! its supported labels, and every constraint is specialised to the blocks
//! of its scope.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::algebra::{FracOp, OpClass, Operation};
use crate::error::{Error, Result};
use crate::feasibility::{Backtracking, CspEngine, SupportedLabels};
use crate::model::{
    dom_fn, equality_name, feas_language, CostFn, ExtRat, Instance, Label, Language,
    RESERVED_PREFIX,
};
use crate::tuple;

/// Bijection between lifted labels and pairs `(variable, original label)`.
/// Blocks follow variable order; labels ascend within a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedDomain {
    pairs: Vec<(usize, Label)>,
    index: BTreeMap<(usize, Label), Label>,
    blocks: Vec<Vec<Label>>,
}

impl LiftedDomain {
    pub fn new(supported: &SupportedLabels) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut index = BTreeMap::new();
        let mut blocks = Vec::with_capacity(supported.num_vars());
        for v in 0..supported.num_vars() {
            let labels = supported.labels(v);
            if labels.is_empty() {
                return Err(Error::EmptySupport(v));
            }
            let mut block = Vec::with_capacity(labels.len());
            for &a in labels {
                index.insert((v, a), pairs.len());
                block.push(pairs.len());
                pairs.push((v, a));
            }
            blocks.push(block);
        }
        Ok(LiftedDomain {
            pairs,
            index,
            blocks,
        })
    }

    pub fn size(&self) -> usize {
        self.pairs.len()
    }

    pub fn lift(&self, v: usize, a: Label) -> Option<Label> {
        self.index.get(&(v, a)).copied()
    }

    pub fn unlift(&self, lifted: Label) -> (usize, Label) {
        self.pairs[lifted]
    }

    pub fn block_of(&self, lifted: Label) -> usize {
        self.pairs[lifted].0
    }

    /// Lifted labels of each variable's block.
    pub fn blocks(&self) -> &[Vec<Label>] {
        &self.blocks
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (l, (v, a)) in self.pairs.iter().enumerate() {
            writeln!(out, "{l} = ({v}, {a})").expect("string write");
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lifted {
    pub lang: Language,
    pub inst: Instance,
    pub domain: LiftedDomain,
}

pub fn block_name(v: usize) -> String {
    format!("{RESERVED_PREFIX}blk{{{v}}}")
}

fn lifted_name(f: &str, scope: &[usize]) -> String {
    let vars: Vec<String> = scope.iter().map(ToString::to_string).collect();
    format!("{f}<{}>", vars.join(","))
}

fn dom_name(lifted: &str) -> String {
    format!("{RESERVED_PREFIX}dom{{{lifted}}}")
}

/// Builds the lifted language and instance from `inst` and its supported
/// labels. For constraint `f(x_{v1}, ..., x_{vn})` the lifted function is
/// `f` on tuples `((v1, a1), ..., (vn, an))` and infinite elsewhere; its
/// dom, one block unary per variable and equality on the lifted domain are
/// added, and the instance gains the block unary on every variable.
pub fn lift_instance(
    lang: &Language,
    inst: &Instance,
    supported: &SupportedLabels,
) -> Result<Lifted> {
    if supported.num_vars() != inst.num_vars() {
        return Err(Error::Invalid(format!(
            "supported labels cover {} variables, instance has {}",
            supported.num_vars(),
            inst.num_vars()
        )));
    }
    let domain = LiftedDomain::new(supported)?;
    let kp = domain.size();
    let mut lifted_lang = Language::new(kp)?;
    let mut lifted_inst = Instance::new(inst.num_vars());

    for (f, scope) in inst.resolve(lang)? {
        let name = lifted_name(f.name(), scope);
        let entries: Vec<(Vec<Label>, ExtRat)> = f
            .entries()
            .filter_map(|(x, c)| {
                let y: Option<Vec<Label>> = scope
                    .iter()
                    .zip(x)
                    .map(|(&v, &a)| domain.lift(v, a))
                    .collect();
                y.map(|y| (y, ExtRat::Finite(c.clone())))
            })
            .collect();
        let g = CostFn::new(name.clone(), f.arity(), kp, entries)?;
        let d = dom_fn(&g).renamed(dom_name(&name));
        lifted_lang.ensure(g)?;
        lifted_lang.ensure(d)?;
        lifted_inst.add(name, scope.to_vec())?;
    }
    for (v, block) in domain.blocks().iter().enumerate() {
        let name = lifted_lang.ensure(CostFn::unary_subset(block_name(v), kp, block)?)?;
        lifted_inst.add(name, vec![v])?;
    }
    lifted_lang.ensure(CostFn::equality(equality_name(), kp)?)?;
    Ok(Lifted {
        lang: lifted_lang,
        inst: lifted_inst,
        domain,
    })
}

/// For every lifted label `(v, d)`, a feasible solution `σ` of `inst` with
/// `σ(v) = d` gives the unary map `(v', d') -> (v', σ(v'))`, constant on
/// block `v`. Duplicates are removed.
pub fn block_witnesses(
    lang: &Language,
    inst: &Instance,
    domain: &LiftedDomain,
) -> Result<Vec<Operation>> {
    let feas = feas_language(lang);
    let kp = domain.size();
    let mut out: Vec<Operation> = Vec::new();
    for lifted in 0..kp {
        let (v, d) = domain.unlift(lifted);
        let sigma = Backtracking.solve(&feas, inst, &[(v, d)])?.ok_or_else(|| {
            Error::Hypothesis(format!("label {d} of variable {v} is not supported"))
        })?;
        let table = (0..kp)
            .map(|l| {
                let w = domain.block_of(l);
                domain.lift(w, sigma[w]).ok_or_else(|| {
                    Error::Hypothesis(format!("solution uses unsupported label at variable {w}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let g = Operation::new(kp, 1, table)?;
        if !out.contains(&g) {
            out.push(g);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockFiniteReport {
    /// Every element has a unary polymorphism of the feasibility language
    /// that is constant on its block with that value.
    pub constant_maps: bool,
    /// Every dom and equality belong to the language.
    pub doms_and_equality: bool,
    /// Every non-equality dom lies inside a product of blocks.
    pub confined: bool,
    pub failures: Vec<String>,
}

impl BlockFiniteReport {
    pub fn holds(&self) -> bool {
        self.constant_maps && self.doms_and_equality && self.confined
    }
}

pub fn is_block_finite(
    lang: &Language,
    blocks: &[Vec<Label>],
    witnesses: &[Operation],
) -> Result<bool> {
    Ok(check_block_finite(lang, blocks, witnesses)?.holds())
}

/// Checks the three block-finiteness conditions. For the constant-map
/// condition, supplied `witnesses` are tried first; otherwise a unary
/// polymorphism of `Feas(lang)` with the required values is searched for as
/// a CSP whose variables are the domain elements.
pub fn check_block_finite(
    lang: &Language,
    blocks: &[Vec<Label>],
    witnesses: &[Operation],
) -> Result<BlockFiniteReport> {
    let k = lang.domain_size();
    let mut block_of = vec![None; k];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(Error::Invalid(format!("block {b} is empty")));
        }
        for &a in block {
            if a >= k {
                return Err(Error::LabelOutOfRange {
                    label: a,
                    domain_size: k,
                });
            }
            if block_of[a].replace(b).is_some() {
                return Err(Error::Invalid(format!("label {a} lies in two blocks")));
            }
        }
    }
    if let Some(a) = block_of.iter().position(Option::is_none) {
        return Err(Error::Invalid(format!("label {a} lies in no block")));
    }
    let block_of: Vec<usize> = block_of.into_iter().map(|b| b.expect("checked")).collect();

    let mut failures = Vec::new();
    let equality = CostFn::equality(equality_name(), k)?;

    let mut doms_and_equality = true;
    if !lang.contains_table(&equality) {
        doms_and_equality = false;
        failures.push("equality relation missing".to_string());
    }
    for f in lang.functions() {
        if !lang.contains_table(&dom_fn(f)) {
            doms_and_equality = false;
            failures.push(format!("dom of `{}` missing", f.name()));
        }
    }

    let mut confined = true;
    for f in lang.functions().filter(|f| !f.same_table(&equality)) {
        let ok = (0..f.arity()).all(|pos| {
            let mut it = f.dom().map(|x| block_of[x[pos]]);
            match it.next() {
                Some(b) => it.all(|c| c == b),
                None => true,
            }
        });
        if !ok {
            confined = false;
            failures.push(format!("dom of `{}` straddles blocks", f.name()));
        }
    }

    let feas = feas_language(lang);
    let preserves: Vec<bool> = witnesses
        .iter()
        .map(|g| {
            g.arity() == 1 && g.domain_size() == k && crate::algebra::is_polymorphism(g, &feas)
        })
        .collect();
    let mut hom: Option<Instance> = None;
    let mut constant_maps = true;
    for block in blocks {
        for &a in block {
            let witnessed = witnesses
                .iter()
                .zip(&preserves)
                .any(|(g, &ok)| ok && block.iter().all(|&b| g.apply(&[b]) == a));
            if witnessed {
                continue;
            }
            let inst = match &hom {
                Some(i) => i,
                None => hom.insert(homomorphism_instance(&feas)?),
            };
            let pins: Vec<(usize, Label)> = block.iter().map(|&b| (b, a)).collect();
            if Backtracking.solve(&feas, inst, &pins)?.is_none() {
                constant_maps = false;
                failures.push(format!("no unary polymorphism sends block of {a} to {a}"));
            }
        }
    }

    Ok(BlockFiniteReport {
        constant_maps,
        doms_and_equality,
        confined,
        failures,
    })
}

/// CSP whose solutions are exactly the unary polymorphisms of a crisp
/// language: one variable per domain element, and for each relation and
/// each tuple in it, the relation applied to that tuple of variables.
fn homomorphism_instance(feas: &Language) -> Result<Instance> {
    let mut inst = Instance::new(feas.domain_size());
    for f in feas.functions() {
        for x in f.dom() {
            inst.add(f.name(), x.clone())?;
        }
    }
    Ok(inst)
}

/// Lifts a cyclic fractional operation: each `g` becomes `g'` acting as
/// `g` inside a single block and as the constant `fallback` (default: the
/// least lifted label) on arguments from several blocks.
pub fn lift_fracop(
    omega: &FracOp,
    domain: &LiftedDomain,
    fallback: Option<Label>,
) -> Result<FracOp> {
    let m = omega.arity();
    if m < 2 || !omega.is_in_class(OpClass::Cyclic) {
        return Err(Error::Invalid(
            "lifting needs a cyclic fractional operation of arity >= 2".into(),
        ));
    }
    let kp = domain.size();
    let fallback = fallback.unwrap_or(0);
    if fallback >= kp {
        return Err(Error::LabelOutOfRange {
            label: fallback,
            domain_size: kp,
        });
    }
    let mut lifted = Vec::with_capacity(omega.len());
    for (g, w) in omega.support() {
        let mut hat = vec![0; m];
        let table = tuple::all(kp, m)
            .iter()
            .map(|x| {
                let v = domain.block_of(x[0]);
                if x.iter().any(|&l| domain.block_of(l) != v) {
                    return Ok(fallback);
                }
                for (h, &l) in hat.iter_mut().zip(x) {
                    *h = domain.unlift(l).1;
                }
                let image = g.apply(&hat);
                domain.lift(v, image).ok_or_else(|| {
                    Error::Hypothesis(format!(
                        "image {image} leaves the supported labels of variable {v}"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        lifted.push((Operation::new(kp, m, table)?, w.clone()));
    }
    FracOp::new(lifted)
}
