//! Feasibility: the crisp instance `Feas(I)`, a complete CSP engine,
//! supported labels and the (1,∞)-minimal instance.

use std::collections::VecDeque;

use crate::error::Result;
use crate::exec::{self, Config};
use crate::model::{feas_language, Assignment, Instance, Label, Language};

/// `Feas(I)`: same scopes, every function replaced by its dom.
pub fn feas_instance(lang: &Language, inst: &Instance) -> Result<(Language, Instance)> {
    inst.validate(lang)?;
    Ok((feas_language(lang), inst.clone()))
}

/// A complete decision procedure for the crisp part of an instance.
///
/// Implementations must treat every constraint as its relation `dom f` and
/// honour `pins` as unary constraints `u_d(x_v)`.
pub trait CspEngine: Sync {
    fn solve(
        &self,
        lang: &Language,
        inst: &Instance,
        pins: &[(usize, Label)],
    ) -> Result<Option<Assignment>>;
}

/// Backtracking over variables in index order and labels ascending, with
/// generalized arc consistency on the constraint tables after every
/// decision. Pruning only removes labels that occur in no solution, so the
/// first solution found is the lexicographically least one.
#[derive(Debug, Clone, Copy, Default)]
pub struct Backtracking;

impl CspEngine for Backtracking {
    fn solve(
        &self,
        lang: &Language,
        inst: &Instance,
        pins: &[(usize, Label)],
    ) -> Result<Option<Assignment>> {
        let model = CspModel::new(lang, inst)?;
        let mut doms = vec![vec![true; model.k]; model.n];
        for &(v, d) in pins {
            if v >= model.n || d >= model.k {
                return Ok(None);
            }
            let keep = doms[v][d];
            doms[v].iter_mut().for_each(|b| *b = false);
            doms[v][d] = keep;
            if !keep {
                return Ok(None);
            }
        }
        let all: Vec<usize> = (0..model.cons.len()).collect();
        if !model.propagate(&mut doms, all) {
            return Ok(None);
        }
        Ok(model.search(doms).map(Assignment))
    }
}

struct CspConstraint {
    scope: Vec<usize>,
    allowed: Vec<Vec<Label>>,
}

struct CspModel {
    k: usize,
    n: usize,
    cons: Vec<CspConstraint>,
    by_var: Vec<Vec<usize>>,
}

impl CspModel {
    fn new(lang: &Language, inst: &Instance) -> Result<Self> {
        let resolved = inst.resolve(lang)?;
        let n = inst.num_vars();
        let mut by_var = vec![Vec::new(); n];
        let cons = resolved
            .into_iter()
            .enumerate()
            .map(|(ci, (f, scope))| {
                let mut vars = scope.to_vec();
                vars.sort_unstable();
                vars.dedup();
                for v in vars {
                    by_var[v].push(ci);
                }
                CspConstraint {
                    scope: scope.to_vec(),
                    allowed: f.dom().cloned().collect(),
                }
            })
            .collect();
        Ok(CspModel {
            k: lang.domain_size(),
            n,
            cons,
            by_var,
        })
    }

    /// Enforces GAC starting from `queue`; false on a wipe-out.
    fn propagate(&self, doms: &mut [Vec<bool>], queue: Vec<usize>) -> bool {
        let mut queue: VecDeque<usize> = queue.into();
        let mut queued = vec![false; self.cons.len()];
        for &c in &queue {
            queued[c] = true;
        }
        while let Some(ci) = queue.pop_front() {
            queued[ci] = false;
            let c = &self.cons[ci];
            let arity = c.scope.len();
            let mut support = vec![vec![false; self.k]; arity];
            for t in &c.allowed {
                let valid = (0..arity).all(|i| {
                    let v = c.scope[i];
                    doms[v][t[i]] && (0..i).all(|j| c.scope[j] != v || t[j] == t[i])
                });
                if valid {
                    for (i, &d) in t.iter().enumerate() {
                        support[i][d] = true;
                    }
                }
            }
            for (i, &v) in c.scope.iter().enumerate() {
                let mut changed = false;
                for d in 0..self.k {
                    if doms[v][d] && !support[i][d] {
                        doms[v][d] = false;
                        changed = true;
                    }
                }
                if changed {
                    if !doms[v].iter().any(|&b| b) {
                        return false;
                    }
                    for &other in &self.by_var[v] {
                        if other != ci && !queued[other] {
                            queued[other] = true;
                            queue.push_back(other);
                        }
                    }
                }
            }
        }
        true
    }

    fn search(&self, doms: Vec<Vec<bool>>) -> Option<Vec<Label>> {
        let branch = (0..self.n).find(|&v| doms[v].iter().filter(|&&b| b).count() > 1);
        let Some(v) = branch else {
            return Some(
                doms.iter()
                    .map(|d| d.iter().position(|&b| b).expect("nonempty domain"))
                    .collect(),
            );
        };
        for d in 0..self.k {
            if !doms[v][d] {
                continue;
            }
            let mut next = doms.clone();
            next[v].iter_mut().for_each(|b| *b = false);
            next[v][d] = true;
            if self.propagate(&mut next, self.by_var[v].clone()) {
                if let Some(sol) = self.search(next) {
                    return Some(sol);
                }
            }
        }
        None
    }
}

/// Lexicographically least feasible assignment of `Feas(I)`, if any.
pub fn solve_csp(lang: &Language, inst: &Instance) -> Result<Option<Assignment>> {
    Backtracking.solve(lang, inst, &[])
}

/// `D_v` for every variable: labels taken by some feasible assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SupportedLabels(pub Vec<Vec<Label>>);

impl SupportedLabels {
    pub fn labels(&self, v: usize) -> &[Label] {
        &self.0[v]
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    /// First variable with no supported label.
    pub fn first_empty(&self) -> Option<usize> {
        self.0.iter().position(Vec::is_empty)
    }
}

pub fn supported_labels(lang: &Language, inst: &Instance) -> Result<SupportedLabels> {
    supported_labels_with(&Backtracking, lang, inst, &Config::default())
}

/// Probes every `(v, d)` by solving `Feas(I) + u_d(x_v)`. Probes run
/// independently (concurrently when enabled) and are merged in index order.
pub fn supported_labels_with(
    engine: &dyn CspEngine,
    lang: &Language,
    inst: &Instance,
    cfg: &Config,
) -> Result<SupportedLabels> {
    inst.validate(lang)?;
    let n = inst.num_vars();
    let k = lang.domain_size();
    let probes = exec::map_range(cfg.exec, n * k, |i| {
        let (v, d) = (i / k, i % k);
        engine.solve(lang, inst, &[(v, d)]).map(|s| s.is_some())
    });
    let mut out = vec![Vec::new(); n];
    for (i, ok) in probes.into_iter().enumerate() {
        if ok? {
            out[i / k].push(i % k);
        }
    }
    Ok(SupportedLabels(out))
}

/// `Ī` together with the language extended by the `u_{D_v}` it uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalInstance {
    pub lang: Language,
    pub inst: Instance,
    pub supported: SupportedLabels,
}

pub fn one_infty_minimize(lang: &Language, inst: &Instance) -> Result<MinimalInstance> {
    one_infty_minimize_with(&Backtracking, lang, inst, &Config::default())
}

/// Appends `u_{D_v}(x_v)` for every variable, in variable order. An empty
/// `D_v` yields the empty-dom unary function.
pub fn one_infty_minimize_with(
    engine: &dyn CspEngine,
    lang: &Language,
    inst: &Instance,
    cfg: &Config,
) -> Result<MinimalInstance> {
    let supported = supported_labels_with(engine, lang, inst, cfg)?;
    let mut lang = lang.clone();
    let mut out = inst.clone();
    for v in 0..inst.num_vars() {
        let name = lang.ensure_unary_subset(supported.labels(v))?;
        out.add(name, vec![v])?;
    }
    Ok(MinimalInstance {
        lang,
        inst: out,
        supported,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CostFn, ExtRat};
    use crate::oracle::{brute_opt, brute_solutions};

    fn parity() -> (Language, Instance) {
        let eq = CostFn::crisp("xor0", 2, 2, [vec![0, 0], vec![1, 1]]).unwrap();
        let ne = CostFn::crisp("xor1", 2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
        let lang = Language::from_functions(2, [eq, ne]).unwrap();
        let inst = Instance::new(3)
            .with("xor0", vec![0, 1])
            .unwrap()
            .with("xor0", vec![1, 2])
            .unwrap()
            .with("xor1", vec![0, 2])
            .unwrap();
        (lang, inst)
    }

    #[test]
    fn feas_instance_examples() {
        let (lang, inst) = parity();
        let (fl, fi) = feas_instance(&lang, &inst).unwrap();
        assert_eq!(fl, lang);
        assert_eq!(fi, inst);

        let sub = CostFn::from_fn("s", 2, 2, |t| ExtRat::from((t[0] + t[1]) as i64)).unwrap();
        let lang = Language::from_functions(2, [sub]).unwrap();
        let inst = Instance::new(2).with("s", vec![0, 1]).unwrap();
        let (fl, _) = feas_instance(&lang, &inst).unwrap();
        assert!(fl.functions().all(|f| f.is_crisp() && f.is_finite_valued()));

        let horn = CostFn::from_fn("h", 2, 2, |t| {
            if t == [1, 0] {
                ExtRat::Infinity
            } else {
                ExtRat::from(1)
            }
        })
        .unwrap();
        let lang = Language::from_functions(2, [horn]).unwrap();
        let inst = Instance::new(2).with("h", vec![0, 1]).unwrap();
        let (fl, _) = feas_instance(&lang, &inst).unwrap();
        let h = fl.get("h").unwrap();
        assert_eq!(
            h.dom().cloned().collect::<Vec<_>>(),
            vec![vec![0, 0], vec![0, 1], vec![1, 1]]
        );
    }

    #[test]
    fn solve_csp_examples() {
        let lang = Language::new(2).unwrap();
        assert_eq!(
            solve_csp(&lang, &Instance::new(2)).unwrap(),
            Some(Assignment(vec![0, 0]))
        );

        let ne = CostFn::crisp("ne", 2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
        let lang = Language::from_functions(2, [ne]).unwrap();
        let inst = Instance::new(2).with("ne", vec![0, 1]).unwrap();
        assert_eq!(
            solve_csp(&lang, &inst).unwrap(),
            Some(Assignment(vec![0, 1]))
        );

        let (lang, inst) = parity();
        assert_eq!(solve_csp(&lang, &inst).unwrap(), None);
    }

    #[test]
    fn supported_labels_examples() {
        let lang =
            Language::from_functions(2, [CostFn::unary_subset("u1", 2, &[1]).unwrap()]).unwrap();
        let free = supported_labels(&lang, &Instance::new(2)).unwrap();
        assert_eq!(free.0, vec![vec![0, 1], vec![0, 1]]);

        let pinned = Instance::new(2).with("u1", vec![0]).unwrap();
        let s = supported_labels(&lang, &pinned).unwrap();
        assert_eq!(s.labels(0), &[1]);
        assert_eq!(s.labels(1), &[0, 1]);

        let (lang, inst) = parity();
        let s = supported_labels(&lang, &inst).unwrap();
        assert!(s.0.iter().all(Vec::is_empty));
        assert_eq!(s.first_empty(), Some(0));
    }

    #[test]
    fn minimize_examples() {
        let lang = Language::new(2).unwrap();
        let m = one_infty_minimize(&lang, &Instance::new(2)).unwrap();
        assert_eq!(m.inst.constraints().len(), 2);
        assert!(m.inst.constraints().iter().all(|c| c.function == "@u{0,1}"));
        assert_eq!(brute_opt(&m.lang, &m.inst).unwrap().value, ExtRat::zero());

        let (lang, inst) = parity();
        let m = one_infty_minimize(&lang, &inst).unwrap();
        assert_eq!(m.lang.get("@u{}").unwrap().dom_size(), 0);
        assert_eq!(brute_opt(&m.lang, &m.inst).unwrap().value, ExtRat::Infinity);
    }

    #[test]
    fn repeated_variable_in_scope() {
        // ne(x0, x0) is unsatisfiable; eq(x0, x0) is not.
        let ne = CostFn::crisp("ne", 2, 2, [vec![0, 1], vec![1, 0]]).unwrap();
        let lang = Language::from_functions(2, [ne]).unwrap();
        let inst = Instance::new(1).with("ne", vec![0, 0]).unwrap();
        assert_eq!(solve_csp(&lang, &inst).unwrap(), None);
        let sols = brute_solutions(&lang, &inst, &Config::default()).unwrap();
        assert!(sols.is_empty());
    }
}
