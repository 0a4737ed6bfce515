//! Generalized operations `D^m -> D^m`, their fractional versions, and the
//! graph obtained by closing the identity under a set of generators.

mod graph;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::algebra::{FracOp, OpClass, Operation};
use crate::error::{Error, Result};
use crate::exec::{all_range, Config};
use crate::model::{format_rational, Label, Language, Rational};
use crate::tuple;

pub use graph::{build_graph, Expansion, OpGraph, Stationary};

/// A map `D^m -> D^m`, stored as the image rank of every tuple rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GenOp {
    domain_size: usize,
    arity: usize,
    map: Vec<usize>,
}

impl GenOp {
    pub fn identity(domain_size: usize, arity: usize) -> Result<Self> {
        let n = tuple::count(domain_size, arity).ok_or_else(|| {
            Error::Invalid(format!("{domain_size}^{arity} tuples do not fit in memory"))
        })?;
        Ok(GenOp {
            domain_size,
            arity,
            map: (0..n).collect(),
        })
    }

    /// The map `x -> (g_1(x), ..., g_m(x))`.
    pub fn from_components(components: &[Operation]) -> Result<Self> {
        let m = components.len();
        let first = components.first().ok_or_else(|| {
            Error::Invalid("a generalized operation needs at least one component".into())
        })?;
        let k = first.domain_size();
        if components
            .iter()
            .any(|g| g.arity() != m || g.domain_size() != k)
        {
            return Err(Error::Invalid(format!(
                "components must all be {m}-ary operations on a domain of size {k}"
            )));
        }
        let mut image = vec![0; m];
        let map = tuple::all(k, m)
            .iter()
            .map(|x| {
                for (y, g) in image.iter_mut().zip(components) {
                    *y = g.apply(x);
                }
                tuple::rank(&image, k)
            })
            .collect();
        Ok(GenOp {
            domain_size: k,
            arity: m,
            map,
        })
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Image rank of tuple rank `r`.
    pub fn map_rank(&self, r: usize) -> usize {
        self.map[r]
    }

    pub fn apply(&self, x: &[Label]) -> Vec<Label> {
        tuple::unrank(
            self.map[tuple::rank(x, self.domain_size)],
            self.domain_size,
            self.arity,
        )
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: &GenOp, inner: &GenOp) -> Result<GenOp> {
        if outer.domain_size != inner.domain_size || outer.arity != inner.arity {
            return Err(Error::Invalid(
                "composed generalized operations must share (k, m)".into(),
            ));
        }
        Ok(GenOp {
            domain_size: outer.domain_size,
            arity: outer.arity,
            map: inner.map.iter().map(|&r| outer.map[r]).collect(),
        })
    }

    pub fn components(&self) -> Vec<Operation> {
        let (k, m) = (self.domain_size, self.arity);
        let images: Vec<Vec<Label>> = self.map.iter().map(|&r| tuple::unrank(r, k, m)).collect();
        (0..m)
            .map(|i| {
                Operation::new(k, m, images.iter().map(|y| y[i]).collect())
                    .expect("labels in range")
            })
            .collect()
    }

    /// Applies the map to each column of the `m` labelings `rows`.
    pub fn apply_labelings(&self, rows: &[&[Label]]) -> Vec<Vec<Label>> {
        let n = rows.first().map_or(0, |r| r.len());
        let mut out = vec![vec![0; n]; self.arity];
        let mut col = vec![0; self.arity];
        for j in 0..n {
            for (c, r) in col.iter_mut().zip(rows) {
                *c = r[j];
            }
            let y = self.apply(&col);
            for (row, v) in out.iter_mut().zip(y) {
                row[j] = v;
            }
        }
        out
    }
}

impl fmt::Display for GenOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.components().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A probability distribution on generalized operations of one shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenFracOp {
    domain_size: usize,
    arity: usize,
    support: BTreeMap<GenOp, Rational>,
}

impl GenFracOp {
    pub fn new<I: IntoIterator<Item = (GenOp, Rational)>>(entries: I) -> Result<Self> {
        let mut support: BTreeMap<GenOp, Rational> = BTreeMap::new();
        let mut shape = None;
        for (g, w) in entries {
            if w.is_negative() {
                return Err(Error::Invalid(format!(
                    "negative weight {}",
                    format_rational(&w)
                )));
            }
            let s = (g.domain_size, g.arity);
            if *shape.get_or_insert(s) != s {
                return Err(Error::Invalid(
                    "generalized operations must share (k, m)".into(),
                ));
            }
            *support.entry(g).or_insert_with(Rational::zero) += w;
        }
        support.retain(|_, w| !w.is_zero());
        let (domain_size, arity) =
            shape.ok_or_else(|| Error::Invalid("empty distribution".into()))?;
        let total: Rational = support.values().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!(
                "weights sum to {}, expected 1",
                format_rational(&total)
            )));
        }
        Ok(GenFracOp {
            domain_size,
            arity,
            support,
        })
    }

    pub fn point_mass(g: GenOp) -> Self {
        GenFracOp::new([(g, Rational::one())]).expect("unit weight")
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> impl Iterator<Item = (&GenOp, &Rational)> {
        self.support.iter()
    }

    pub fn weight(&self, g: &GenOp) -> Rational {
        self.support.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.support.values().sum()
    }
}

impl fmt::Display for GenFracOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, w) in &self.support {
            writeln!(f, "{} {}", format_rational(w), g)?;
        }
        Ok(())
    }
}

/// `1^{(min,max)}` and `1^{(max,min)}` with weight 1/2 each (`m = 2`).
pub fn min_max_generators(domain_size: usize) -> Result<GenFracOp> {
    let lo = Operation::min(domain_size, 2)?;
    let hi = Operation::max(domain_size, 2)?;
    GenFracOp::new([
        (
            GenOp::from_components(&[lo.clone(), hi.clone()])?,
            Rational::new(1.into(), 2.into()),
        ),
        (
            GenOp::from_components(&[hi, lo])?,
            Rational::new(1.into(), 2.into()),
        ),
    ])
}

/// From a symmetric fractional operation of arity `m - 1`, the generators
/// `1^s(x) = (s(x_{-1}), ..., s(x_{-m}))` where `x_{-i}` drops coordinate `i`.
pub fn generators_from_symmetric(omega: &FracOp) -> Result<GenFracOp> {
    if !omega.is_in_class(OpClass::Symmetric) {
        return Err(Error::Invalid(
            "generators need a symmetric fractional operation".into(),
        ));
    }
    let k = omega.domain_size();
    let m = omega.arity() + 1;
    let mut entries = Vec::with_capacity(omega.len());
    for (s, w) in omega.support() {
        let components = (0..m)
            .map(|i| {
                Operation::from_fn(k, m, |x| {
                    let rest: Vec<Label> = x
                        .iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, &v)| v)
                        .collect();
                    s.apply(&rest)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.push((GenOp::from_components(&components)?, w.clone()));
    }
    GenFracOp::new(entries)
}

fn sum_over<'a>(
    f: &crate::model::CostFn,
    rows: impl IntoIterator<Item = &'a [Label]>,
) -> Option<Rational> {
    let mut total = Rational::zero();
    for r in rows {
        total += f.finite_value(r)?;
    }
    Some(total)
}

pub fn verify_gen_fracpol(rho: &GenFracOp, lang: &Language) -> bool {
    verify_gen_fracpol_with(rho, lang, &Config::default())
}

/// Exact check of `sum_g rho(g) f^m(g(x)) <= f^m(x)` for every function and
/// every `x` in `[dom f]^m`.
pub fn verify_gen_fracpol_with(rho: &GenFracOp, lang: &Language, cfg: &Config) -> bool {
    if rho.domain_size() != lang.domain_size() {
        return false;
    }
    let m = rho.arity();
    lang.functions().all(|f| {
        let dom: Vec<&[Label]> = f.dom().map(|t| t.as_slice()).collect();
        all_range(cfg.exec, dom.len(), |first| {
            let mut ok = true;
            let mut rows: Vec<&[Label]> = Vec::with_capacity(m);
            tuple::for_each_family(dom.len(), m - 1, |rest| {
                if !ok {
                    return;
                }
                rows.clear();
                rows.push(dom[first]);
                rows.extend(rest.iter().map(|&i| dom[i]));
                let rhs = sum_over(f, rows.iter().copied()).expect("in dom");
                let mut lhs = Rational::zero();
                for (g, w) in rho.support() {
                    let image = g.apply_labelings(&rows);
                    match sum_over(f, image.iter().map(Vec::as_slice)) {
                        Some(v) => lhs += w * v,
                        None => {
                            ok = false;
                            return;
                        }
                    }
                }
                ok = lhs <= rhs;
            });
            ok
        })
    })
}

/// The stronger per-coordinate condition on generators: for every `x` in
/// `[dom f]^m` and every `i`, `sum_s w(s) f(x^{1^s i}) <= f^{m-1}(x_{-i})`.
pub fn verify_generators_strong(generators: &GenFracOp, lang: &Language) -> bool {
    let m = generators.arity();
    if m < 2 || generators.domain_size() != lang.domain_size() {
        return false;
    }
    let m1 = Rational::from_integer((m - 1).into());
    lang.functions().all(|f| {
        let dom: Vec<&[Label]> = f.dom().map(|t| t.as_slice()).collect();
        let mut ok = true;
        let mut rows: Vec<&[Label]> = Vec::with_capacity(m);
        tuple::for_each_family(dom.len(), m, |fam| {
            if !ok {
                return;
            }
            rows.clear();
            rows.extend(fam.iter().map(|&i| dom[i]));
            let images: Vec<(Vec<Vec<Label>>, &Rational)> = generators
                .support()
                .map(|(g, w)| (g.apply_labelings(&rows), w))
                .collect();
            for i in 0..m {
                let rhs = sum_over(
                    f,
                    rows.iter()
                        .enumerate()
                        .filter(|&(j, _)| j != i)
                        .map(|(_, r)| *r),
                )
                .expect("in dom");
                let mut lhs = Rational::zero();
                for (image, w) in &images {
                    match f.finite_value(&image[i]) {
                        Some(v) => lhs += *w * v,
                        None => {
                            ok = false;
                            return;
                        }
                    }
                }
                if lhs * &m1 > rhs {
                    ok = false;
                    return;
                }
            }
        });
        ok
    })
}

/// `sum_g rho(g) (1/m)(chi_{g_1} + ... + chi_{g_m})`.
pub fn to_fracop(rho: &GenFracOp) -> Result<FracOp> {
    let m = Rational::from_integer(rho.arity().into());
    FracOp::new(rho.support().flat_map(|(g, w)| {
        let share = w / &m;
        g.components().into_iter().map(move |c| (c, share.clone()))
    }))
}
