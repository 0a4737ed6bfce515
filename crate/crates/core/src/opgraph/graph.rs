use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_traits::{One, Signed, Zero};

use super::{GenFracOp, GenOp};
use crate::error::{check_cap, Error, Result};
use crate::exactlp::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::model::{format_rational, CostFn, Label, Rational};
use crate::tuple;

/// Closure of the identity under `g -> 1^s ∘ g` for the generators `1^s`,
/// with its strongly connected components. Node 0 is the identity and
/// nodes are numbered in breadth-first discovery order.
#[derive(Clone, Debug)]
pub struct OpGraph {
    domain_size: usize,
    arity: usize,
    nodes: Vec<GenOp>,
    index: HashMap<GenOp, usize>,
    generators: Vec<(GenOp, Rational)>,
    /// `succ[g][s]` is the node `1^s ∘ g`.
    succ: Vec<Vec<usize>>,
    component: Vec<usize>,
    components: Vec<Vec<usize>>,
    sink: Vec<bool>,
}

pub fn build_graph(generators: &GenFracOp, cap: u128) -> Result<OpGraph> {
    let (k, m) = (generators.domain_size(), generators.arity());
    let gens: Vec<(GenOp, Rational)> = generators
        .support()
        .map(|(g, w)| (g.clone(), w.clone()))
        .collect();
    let identity = GenOp::identity(k, m)?;
    let mut nodes = vec![identity.clone()];
    let mut index = HashMap::from([(identity, 0usize)]);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(g) = queue.pop_front() {
        let mut row = Vec::with_capacity(gens.len());
        for (s, _) in &gens {
            let h = GenOp::compose(s, &nodes[g])?;
            let id = match index.get(&h) {
                Some(&id) => id,
                None => {
                    check_cap("graph_nodes", nodes.len() as u128 + 1, cap)?;
                    let id = nodes.len();
                    index.insert(h.clone(), id);
                    nodes.push(h);
                    queue.push_back(id);
                    id
                }
            };
            row.push(id);
        }
        succ.push(row);
    }
    let (component, components) = tarjan(&succ);
    let sink = (0..components.len())
        .map(|c| {
            components[c]
                .iter()
                .all(|&g| succ[g].iter().all(|&h| component[h] == c))
        })
        .collect();
    Ok(OpGraph {
        domain_size: k,
        arity: m,
        nodes,
        index,
        generators: gens,
        succ,
        component,
        components,
        sink,
    })
}

/// Iterative Tarjan. Components are listed in the order they complete
/// (reverse topological order); nodes within a component ascend.
fn tarjan(succ: &[Vec<usize>]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = succ.len();
    const UNSEEN: usize = usize::MAX;
    let mut order = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component = vec![UNSEEN; n];
    let mut components = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if order[root] != UNSEEN {
            continue;
        }
        let mut frames: Vec<(usize, usize)> = vec![(root, 0)];
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut next)) = frames.last_mut() {
            if *next < succ[v].len() {
                let w = succ[v][*next];
                *next += 1;
                if order[w] == UNSEEN {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(order[w]);
                }
                continue;
            }
            frames.pop();
            if let Some(&(parent, _)) = frames.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == order[v] {
                let id = components.len();
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("nonempty");
                    on_stack[w] = false;
                    component[w] = id;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                components.push(members);
            }
        }
    }
    (component, components)
}

/// Trace of the support-expansion procedure.
#[derive(Clone, Debug)]
pub struct Expansion {
    /// Every distribution visited, starting with the point mass on the
    /// identity.
    pub trace: Vec<GenFracOp>,
    pub result: GenFracOp,
    /// Updates needed before the support covered the target.
    pub growth_steps: usize,
    /// Mass left outside the target.
    pub residual: Rational,
}

/// A stationary distribution on the sink nodes.
#[derive(Clone, Debug)]
pub struct Stationary {
    pub nodes: Vec<usize>,
    pub lambda: Vec<Rational>,
    pub lp: LinearProgram,
    pub outcome: LpOutcome,
}

impl Stationary {
    pub fn weight_of(&self, node: usize) -> Rational {
        self.nodes
            .iter()
            .position(|&g| g == node)
            .map_or_else(Rational::zero, |i| self.lambda[i].clone())
    }
}

impl OpGraph {
    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, i: usize) -> &GenOp {
        &self.nodes[i]
    }

    pub fn index_of(&self, g: &GenOp) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn generators(&self) -> &[(GenOp, Rational)] {
        &self.generators
    }

    /// `w(g, h) = sum of generator weights with 1^s ∘ g = h`.
    pub fn weights(&self, g: usize) -> BTreeMap<usize, Rational> {
        let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&h, (_, w)) in self.succ[g].iter().zip(&self.generators) {
            *out.entry(h).or_insert_with(Rational::zero) += w;
        }
        out
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn component_of(&self, g: usize) -> usize {
        self.component[g]
    }

    pub fn is_sink_component(&self, c: usize) -> bool {
        self.sink[c]
    }

    pub fn sink_components(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| self.sink[c])
            .collect()
    }

    /// Union of the sink components, ascending.
    pub fn sink_nodes(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&g| self.sink[self.component[g]])
            .collect()
    }

    pub fn to_fracop(&self, masses: &[Rational]) -> Result<GenFracOp> {
        GenFracOp::new(
            masses
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(g, w)| (self.nodes[g].clone(), w.clone())),
        )
    }

    /// Line-based dump: header, generators, nodes with component and sink
    /// flag, then edges with generator index and weight.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let w = &mut out;
        writeln!(
            w,
            "graph k {} m {} nodes {} generators {} components {}",
            self.domain_size,
            self.arity,
            self.len(),
            self.generators.len(),
            self.components.len()
        )
        .expect("string write");
        for (s, (g, weight)) in self.generators.iter().enumerate() {
            writeln!(
                w,
                "generator {s} weight {} map {}",
                format_rational(weight),
                map_text(g)
            )
            .expect("string write");
        }
        for (i, g) in self.nodes.iter().enumerate() {
            let c = self.component[i];
            writeln!(
                w,
                "node {i} scc {c} sink {} map {}",
                self.sink[c],
                map_text(g)
            )
            .expect("string write");
        }
        for (i, row) in self.succ.iter().enumerate() {
            for (s, &j) in row.iter().enumerate() {
                writeln!(
                    w,
                    "edge {i} {j} generator {s} weight {}",
                    format_rational(&self.generators[s].1)
                )
                .expect("string write");
            }
        }
        out
    }

    /// For all nodes `g, h`: `h ∘ g` is a node, and lies in `g`'s component
    /// whenever that component is a sink.
    pub fn check_closure(&self) -> bool {
        self.nodes.iter().enumerate().all(|(gi, g)| {
            self.nodes.iter().all(|h| {
                let Ok(hg) = GenOp::compose(h, g) else {
                    return false;
                };
                match self.index_of(&hg) {
                    None => false,
                    Some(j) => {
                        !self.sink[self.component[gi]] || self.component[j] == self.component[gi]
                    }
                }
            })
        })
    }

    /// `Range_n` of the sink nodes, with labelings stored as `n` column ranks.
    pub fn sink_range(&self, n: usize) -> Result<BTreeSet<Vec<usize>>> {
        let cols = tuple::count(self.domain_size, self.arity).expect("graph exists");
        let total = tuple::count(cols, n)
            .ok_or_else(|| Error::Invalid("labeling space too large".into()))?;
        let mut out = BTreeSet::new();
        let mut y = vec![0; n];
        for g in self.sink_nodes() {
            for r in 0..total {
                for (j, c) in tuple::unrank(r, cols, n).into_iter().enumerate() {
                    y[j] = self.nodes[g].map_rank(c);
                }
                out.insert(y.clone());
            }
        }
        Ok(out)
    }

    fn fixes(&self, g: usize, x: &[usize]) -> bool {
        x.iter().all(|&c| self.nodes[g].map_rank(c) == c)
    }

    /// Every labeling in `Range_n` of the sinks is fixed by some node of
    /// every sink component.
    pub fn check_fixed_points(&self, n: usize) -> Result<bool> {
        let range = self.sink_range(n)?;
        let sinks = self.sink_components();
        Ok(range.iter().all(|x| {
            sinks
                .iter()
                .all(|&c| self.components[c].iter().any(|&g| self.fixes(g, x)))
        }))
    }

    fn rows_of(&self, x: &[usize]) -> Vec<Vec<Label>> {
        let mut rows = vec![vec![0; x.len()]; self.arity];
        for (j, &c) in x.iter().enumerate() {
            for (row, v) in rows
                .iter_mut()
                .zip(tuple::unrank(c, self.domain_size, self.arity))
            {
                row[j] = v;
            }
        }
        rows
    }

    fn m_sum(f: &CostFn, rows: &[Vec<Label>]) -> Option<Rational> {
        let mut total = Rational::zero();
        for r in rows {
            total += f.finite_value(r)?;
        }
        Some(total)
    }

    /// For labelings `x` in `Range_n(sinks)` whose rows all lie in `dom f`
    /// (`n` = arity of `f`), `f^m(g(x)) = f^m(x)` for every node `g`.
    /// Returns the number of labelings checked, or `None` on a violation.
    pub fn check_plateau(&self, f: &CostFn) -> Result<Option<usize>> {
        let mut checked = 0;
        for x in self.sink_range(f.arity())? {
            let rows = self.rows_of(&x);
            let Some(base) = Self::m_sum(f, &rows) else {
                continue;
            };
            checked += 1;
            for g in 0..self.len() {
                let y: Vec<usize> = x.iter().map(|&c| self.nodes[g].map_rank(c)).collect();
                if Self::m_sum(f, &self.rows_of(&y)) != Some(base.clone()) {
                    return Ok(None);
                }
            }
        }
        Ok(Some(checked))
    }

    /// Starting from the point mass on the identity, applies
    /// `rho <- rho + (rho(g)/2)(-chi_g + sum_s w(s) chi_{g^s})`: first to
    /// support nodes in discovery order until the support covers `target`,
    /// then for `rounds` rounds to every off-target node with mass, farthest
    /// from the target first.
    pub fn expand_support(&self, target: &BTreeSet<usize>, rounds: usize) -> Result<Expansion> {
        let n = self.len();
        if let Some(&bad) = target.iter().find(|&&g| g >= n) {
            return Err(Error::Invalid(format!(
                "target node {bad} is not in the graph"
            )));
        }
        let mut dist = vec![usize::MAX; n];
        let mut pred: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (g, row) in self.succ.iter().enumerate() {
            for &h in row {
                pred[h].push(g);
            }
        }
        let mut queue: VecDeque<usize> = target.iter().copied().collect();
        for &t in target {
            dist[t] = 0;
        }
        while let Some(h) = queue.pop_front() {
            for &g in &pred[h] {
                if dist[g] == usize::MAX {
                    dist[g] = dist[h] + 1;
                    queue.push_back(g);
                }
            }
        }
        if let Some(g) = dist.iter().position(|&d| d == usize::MAX) {
            return Err(Error::Hypothesis(format!(
                "node {g} has no path to the target set"
            )));
        }

        let mut rho = vec![Rational::zero(); n];
        rho[0] = Rational::one();
        let mut trace = vec![self.to_fracop(&rho)?];
        let mut expanded = vec![false; n];
        let mut growth_steps = 0;
        while !target.iter().all(|&t| rho[t].is_positive()) {
            let g = (0..n)
                .find(|&g| rho[g].is_positive() && !expanded[g])
                .ok_or_else(|| {
                    Error::Hypothesis("support stopped growing before covering the target".into())
                })?;
            expanded[g] = true;
            self.update(&mut rho, g);
            growth_steps += 1;
            trace.push(self.to_fracop(&rho)?);
        }

        let mut off: Vec<usize> = (0..n).filter(|g| !target.contains(g)).collect();
        off.sort_by_key(|&g| (std::cmp::Reverse(dist[g]), g));
        for _ in 0..rounds {
            for &g in &off {
                if rho[g].is_positive() {
                    self.update(&mut rho, g);
                    trace.push(self.to_fracop(&rho)?);
                }
            }
        }
        let residual = off.iter().map(|&g| &rho[g]).sum();
        Ok(Expansion {
            result: self.to_fracop(&rho)?,
            trace,
            growth_steps,
            residual,
        })
    }

    fn update(&self, rho: &mut [Rational], g: usize) {
        let half = &rho[g] / Rational::from_integer(2.into());
        rho[g] -= &half;
        for (&h, (_, w)) in self.succ[g].iter().zip(&self.generators) {
            rho[h] += &half * w;
        }
    }

    /// Solves `sum_{g -> h} w(g, h) λ_g = λ_h` on the sink nodes with
    /// `sum λ = 1`, `λ >= 0`.
    pub fn stationary_lambda(&self) -> Result<Stationary> {
        let nodes = self.sink_nodes();
        let pos: HashMap<usize, usize> = nodes.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut lp = LinearProgram::new(nodes.len());
        let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); nodes.len()];
        for (i, &g) in nodes.iter().enumerate() {
            for (h, w) in self.weights(g) {
                let j = *pos.get(&h).expect("sink components have no outgoing edges");
                *rows[j].entry(i).or_insert_with(Rational::zero) += w;
            }
        }
        for (j, mut row) in rows.into_iter().enumerate() {
            *row.entry(j).or_insert_with(Rational::zero) -= Rational::one();
            lp.add_row(row, Relation::Eq, Rational::zero())?;
        }
        lp.add_row(
            (0..nodes.len()).map(|i| (i, Rational::one())),
            Relation::Eq,
            Rational::one(),
        )?;
        let outcome = solve_lp(&lp)?;
        let LpOutcome::Optimal { primal, .. } = &outcome else {
            return Err(Error::Hypothesis(
                "the stationarity system always has a solution".into(),
            ));
        };
        Ok(Stationary {
            nodes,
            lambda: primal.clone(),
            lp,
            outcome,
        })
    }

    /// `sum_{g -> h} w(g, h) λ_g - λ_h` for every sink node `h`.
    pub fn stationarity_residual(&self, st: &Stationary) -> Vec<Rational> {
        let mut res: Vec<Rational> = st.lambda.iter().map(|l| -l.clone()).collect();
        for (i, &g) in st.nodes.iter().enumerate() {
            for (h, w) in self.weights(g) {
                if let Some(j) = st.nodes.iter().position(|&x| x == h) {
                    res[j] += &w * &st.lambda[i];
                }
            }
        }
        res
    }

    /// For labelings in `Range_n(sinks) ∩ [dom f]^m`, the averages
    /// `sum_g λ_g f(x^{g i})` agree for all `i`. Returns the number of
    /// labelings checked, or `None` on a violation.
    pub fn check_lambda_balanced(&self, st: &Stationary, f: &CostFn) -> Result<Option<usize>> {
        let mut checked = 0;
        for x in self.sink_range(f.arity())? {
            if Self::m_sum(f, &self.rows_of(&x)).is_none() {
                continue;
            }
            checked += 1;
            let mut per_row = vec![Rational::zero(); self.arity];
            for (&g, l) in st.nodes.iter().zip(&st.lambda) {
                if l.is_zero() {
                    continue;
                }
                let y: Vec<usize> = x.iter().map(|&c| self.nodes[g].map_rank(c)).collect();
                for (acc, row) in per_row.iter_mut().zip(self.rows_of(&y)) {
                    match f.finite_value(&row) {
                        Some(v) => *acc += l * v,
                        None => return Ok(None),
                    }
                }
            }
            if per_row.windows(2).any(|p| p[0] != p[1]) {
                return Ok(None);
            }
        }
        Ok(Some(checked))
    }
}

fn map_text(g: &GenOp) -> String {
    let n = tuple::count(g.domain_size(), g.arity()).expect("exists");
    (0..n)
        .map(|r| g.map_rank(r).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{FracOp, Operation};
    use crate::exactlp::verify_outcome;
    use crate::model::{int, rat, ExtRat, Language};
    use crate::opgraph::{generators_from_symmetric, min_max_generators, verify_gen_fracpol};

    fn submodular() -> Language {
        let f = CostFn::new(
            "f",
            2,
            2,
            [
                (vec![0, 0], 0),
                (vec![0, 1], 3),
                (vec![1, 0], 1),
                (vec![1, 1], 2),
            ]
            .map(|(t, v)| (t, ExtRat::Finite(int(v)))),
        )
        .unwrap();
        Language::from_functions(2, [f]).unwrap()
    }

    #[test]
    fn identity_generator_gives_one_node() {
        let gens = GenFracOp::point_mass(GenOp::identity(2, 2).unwrap());
        let g = build_graph(&gens, 100).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.successors(0), &[0]);
        assert_eq!(g.sink_nodes(), vec![0]);
        let st = g.stationary_lambda().unwrap();
        assert_eq!(st.lambda, vec![int(1)]);
    }

    #[test]
    fn min_max_graph_properties() {
        let gens = min_max_generators(2).unwrap();
        let g = build_graph(&gens, 1000).unwrap();
        assert!(g.len() >= 2);
        assert!(!g.sink_nodes().is_empty());
        assert!(g.check_closure());
        for n in 1..=2 {
            assert!(g.check_fixed_points(n).unwrap());
        }
        assert!(g
            .check_plateau(submodular().get("f").unwrap())
            .unwrap()
            .is_some());
        for i in 0..g.len() {
            let total: Rational = g.weights(i).values().sum();
            assert_eq!(total, int(1));
        }
        let text = g.to_text();
        assert!(text.starts_with("graph k 2 m 2"));
        assert_eq!(
            text.lines().filter(|l| l.starts_with("edge")).count(),
            2 * g.len()
        );
    }

    #[test]
    fn idempotent_generator_is_in_a_sink() {
        let lo = Operation::min(2, 2).unwrap();
        let s = GenOp::from_components(&[lo.clone(), lo]).unwrap();
        assert_eq!(GenOp::compose(&s, &s).unwrap(), s);
        let g = build_graph(&GenFracOp::point_mass(s.clone()), 100).unwrap();
        let i = g.index_of(&s).unwrap();
        assert!(g.is_sink_component(g.component_of(i)));
        assert!(!g.is_sink_component(g.component_of(0)));

        let ex = g.expand_support(&BTreeSet::from([i]), 4).unwrap();
        assert_eq!(ex.growth_steps, 1);
        assert_eq!(ex.residual, rat(1, 32));
        assert_eq!(ex.result.weight(&s), rat(31, 32));
    }

    #[test]
    fn expansion_to_all_nodes() {
        let g = build_graph(&min_max_generators(2).unwrap(), 1000).unwrap();
        let all: BTreeSet<usize> = (0..g.len()).collect();
        let ex = g.expand_support(&all, 0).unwrap();
        assert!(ex.growth_steps < g.len());
        assert_eq!(ex.result.len(), g.len());
        let lang = submodular();
        for rho in &ex.trace {
            assert_eq!(rho.total(), int(1));
            assert!(verify_gen_fracpol(rho, &lang));
        }
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let lo = Operation::min(2, 2).unwrap();
        let s = GenOp::from_components(&[lo.clone(), lo]).unwrap();
        let g = build_graph(&GenFracOp::point_mass(s), 100).unwrap();
        assert!(matches!(
            g.expand_support(&BTreeSet::from([0]), 1),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn swap_cycle_has_uniform_lambda() {
        let id = FracOp::point_mass(Operation::identity(2));
        let gens = generators_from_symmetric(&id).unwrap();
        let g = build_graph(&gens, 100).unwrap();
        assert_eq!(g.len(), 2);
        let st = g.stationary_lambda().unwrap();
        assert_eq!(st.lambda, vec![rat(1, 2), rat(1, 2)]);
        assert!(g.stationarity_residual(&st).iter().all(Zero::is_zero));
        assert!(verify_outcome(&st.lp, &st.outcome));
    }

    #[test]
    fn symmetric_generators_balance_rows() {
        let half = FracOp::new([
            (Operation::min(2, 2).unwrap(), rat(1, 2)),
            (Operation::max(2, 2).unwrap(), rat(1, 2)),
        ])
        .unwrap();
        let gens = generators_from_symmetric(&half).unwrap();
        let g = build_graph(&gens, 20_000).unwrap();
        let st = g.stationary_lambda().unwrap();
        assert!(g.stationarity_residual(&st).iter().all(Zero::is_zero));
        let f = submodular();
        let f = f.get("f").unwrap();
        assert!(g.check_lambda_balanced(&st, f).unwrap().is_some());
        assert!(g.check_plateau(f).unwrap().is_some());
    }

    #[test]
    fn cap_is_enforced() {
        let gens = min_max_generators(2).unwrap();
        assert!(matches!(
            build_graph(&gens, 1),
            Err(Error::CapExceeded {
                guard: "graph_nodes",
                ..
            })
        ));
    }
}
