//! Exhaustive ground truth: optimum, argmin set and expressed functions.
//!
//! The scan is a depth-first enumeration in lexicographic order that only
//! cuts a branch once some fully assigned constraint is already infinite.
//! The `brute_evals` guard bounds the number of search nodes visited.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exec::{self, Config};
use crate::model::{Assignment, CostFn, ExtRat, Instance, Language, Rational};
use crate::tuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OptReport {
    pub value: ExtRat,
    /// Every optimal assignment, lexicographically ordered; empty iff the
    /// value is infinite.
    pub argmin: Vec<Assignment>,
}

struct Scan<'a> {
    k: usize,
    n: usize,
    /// Constraints grouped by the largest variable of their scope, so each is
    /// checked as soon as it is fully assigned.
    closing: Vec<Vec<(&'a CostFn, &'a [usize])>>,
    /// Constraints with an empty scope cannot exist (arity >= 1), but an
    /// instance with zero variables still has an empty assignment.
    evals: AtomicU64,
    cap: u128,
    aborted: AtomicBool,
}

impl<'a> Scan<'a> {
    fn new(lang: &'a Language, inst: &'a Instance, cap: u128) -> Result<Self> {
        let resolved = inst.resolve(lang)?;
        let n = inst.num_vars();
        let mut closing = vec![Vec::new(); n];
        for (f, scope) in resolved {
            let last = *scope.iter().max().expect("arity >= 1");
            closing[last].push((f, scope));
        }
        Ok(Scan {
            k: lang.domain_size(),
            n,
            closing,
            evals: AtomicU64::new(0),
            cap,
            aborted: AtomicBool::new(false),
        })
    }

    fn tick(&self) -> bool {
        let used = self.evals.fetch_add(1, Ordering::Relaxed) as u128 + 1;
        if used > self.cap {
            self.aborted.store(true, Ordering::Relaxed);
            false
        } else {
            !self.aborted.load(Ordering::Relaxed)
        }
    }

    /// Cost added by constraints closed at variable `v`, or `None` if one of
    /// them is infinite.
    fn closing_cost(&self, v: usize, x: &[usize], buf: &mut Vec<usize>) -> Option<Rational> {
        let mut add = Rational::zero();
        for (f, scope) in &self.closing[v] {
            buf.clear();
            buf.extend(scope.iter().map(|&u| x[u]));
            add += f.finite_value(buf)?;
        }
        Some(add)
    }

    /// Visits every finite complete assignment extending `x[..depth]`.
    fn visit<F: FnMut(&[usize], &Rational)>(
        &self,
        x: &mut Vec<usize>,
        cost: &Rational,
        buf: &mut Vec<usize>,
        leaf: &mut F,
    ) {
        let depth = x.len();
        if depth == self.n {
            leaf(x, cost);
            return;
        }
        for d in 0..self.k {
            if !self.tick() {
                return;
            }
            x.push(d);
            if let Some(add) = self.closing_cost(depth, x, buf) {
                let next = cost + add;
                self.visit(x, &next, buf, leaf);
            }
            x.pop();
        }
    }

    fn finish<T>(&self, value: T) -> Result<T> {
        if self.aborted.load(Ordering::Relaxed) {
            Err(Error::CapExceeded {
                guard: "brute_evals",
                requested: self.evals.load(Ordering::Relaxed) as u128,
                cap: self.cap,
            })
        } else {
            Ok(value)
        }
    }
}

#[derive(Default)]
struct Best {
    value: Option<Rational>,
    argmin: Vec<Assignment>,
}

impl Best {
    fn offer(&mut self, x: &[usize], cost: &Rational) {
        match &self.value {
            Some(v) if cost > v => {}
            Some(v) if cost == v => self.argmin.push(Assignment(x.to_vec())),
            _ => {
                self.value = Some(cost.clone());
                self.argmin.clear();
                self.argmin.push(Assignment(x.to_vec()));
            }
        }
    }

    fn merge(mut self, other: Best) -> Best {
        match (&self.value, &other.value) {
            (_, None) => self,
            (None, Some(_)) => other,
            (Some(a), Some(b)) if b < a => other,
            (Some(a), Some(b)) if a == b => {
                self.argmin.extend(other.argmin);
                self
            }
            _ => self,
        }
    }
}

/// Exact optimum by exhaustive search, default settings.
pub fn brute_opt(lang: &Language, inst: &Instance) -> Result<OptReport> {
    brute_opt_with(lang, inst, &Config::default())
}

pub fn brute_opt_with(lang: &Language, inst: &Instance, cfg: &Config) -> Result<OptReport> {
    let scan = Scan::new(lang, inst, cfg.caps.brute_evals)?;
    let best = if scan.n == 0 {
        let mut b = Best::default();
        b.offer(&[], &Rational::zero());
        b
    } else {
        // One branch per label of variable 0, merged in label order.
        let parts = exec::map_range(cfg.exec, scan.k, |d| {
            let mut best = Best::default();
            if !scan.tick() {
                return best;
            }
            let mut x = vec![d];
            let mut buf = Vec::new();
            if let Some(c0) = scan.closing_cost(0, &x, &mut buf) {
                scan.visit(&mut x, &c0, &mut buf, &mut |x, c| best.offer(x, c));
            }
            best
        });
        parts.into_iter().fold(Best::default(), Best::merge)
    };
    let report = match best.value {
        Some(v) => OptReport {
            value: ExtRat::Finite(v),
            argmin: best.argmin,
        },
        None => OptReport {
            value: ExtRat::Infinity,
            argmin: Vec::new(),
        },
    };
    scan.finish(report)
}

/// Feasibility by exhaustive search: the lexicographically least finite
/// assignment, if any.
pub fn brute_feasible(
    lang: &Language,
    inst: &Instance,
    cfg: &Config,
) -> Result<Option<Assignment>> {
    let scan = Scan::new(lang, inst, cfg.caps.brute_evals)?;
    let mut found: Option<Assignment> = None;
    if scan.n == 0 {
        return Ok(Some(Assignment(Vec::new())));
    }
    let mut x = Vec::new();
    let mut buf = Vec::new();
    // Sequential so that the first hit is the least one.
    scan.visit(&mut x, &Rational::zero(), &mut buf, &mut |x, _| {
        if found.is_none() {
            found = Some(Assignment(x.to_vec()));
            scan.aborted.store(true, Ordering::Relaxed);
        }
    });
    if found.is_some() {
        return Ok(found);
    }
    scan.finish(None)
}

/// Every feasible assignment in lexicographic order.
pub fn brute_solutions(lang: &Language, inst: &Instance, cfg: &Config) -> Result<Vec<Assignment>> {
    let scan = Scan::new(lang, inst, cfg.caps.brute_evals)?;
    if scan.n == 0 {
        return Ok(vec![Assignment(Vec::new())]);
    }
    let mut all = Vec::new();
    let mut x = Vec::new();
    let mut buf = Vec::new();
    scan.visit(&mut x, &Rational::zero(), &mut buf, &mut |x, _| {
        all.push(Assignment(x.to_vec()))
    });
    scan.finish(all)
}

/// The function `(x_1..x_kept) -> min over the remaining variables` of the
/// instance objective, tabulated densely over the kept prefix.
///
/// With `kept_vars = 0` the result is unary over a dummy variable pinned to
/// label 0, whose single finite entry (if any) is the optimum.
pub fn express(lang: &Language, inst: &Instance, kept_vars: usize, cfg: &Config) -> Result<CostFn> {
    if kept_vars > inst.num_vars() {
        return Err(Error::Invalid(format!(
            "cannot keep {kept_vars} of {} variables",
            inst.num_vars()
        )));
    }
    let k = lang.domain_size();
    if kept_vars == 0 {
        let opt = brute_opt_with(lang, inst, cfg)?;
        return CostFn::new("expressed", 1, k, [(vec![0], opt.value)]);
    }
    let size = tuple::count(k, kept_vars).ok_or_else(|| Error::CapExceeded {
        guard: "brute_evals",
        requested: tuple::count_u128(k, kept_vars),
        cap: cfg.caps.brute_evals,
    })?;
    let scan = Scan::new(lang, inst, cfg.caps.brute_evals)?;
    let mut table: Vec<Option<Rational>> = vec![None; size];
    let mut x = Vec::new();
    let mut buf = Vec::new();
    scan.visit(&mut x, &Rational::zero(), &mut buf, &mut |x, c| {
        let slot = &mut table[tuple::rank(&x[..kept_vars], k)];
        match slot {
            Some(v) if *v <= *c => {}
            _ => *slot = Some(c.clone()),
        }
    });
    let table = scan.finish(table)?;
    CostFn::new(
        "expressed",
        kept_vars,
        k,
        table.into_iter().enumerate().map(|(i, v)| {
            (
                tuple::unrank(i, k, kept_vars),
                v.map(ExtRat::Finite).unwrap_or(ExtRat::Infinity),
            )
        }),
    )
}
