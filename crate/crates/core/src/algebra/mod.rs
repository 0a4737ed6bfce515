//! Operations on a finite domain, polymorphisms and fractional polymorphisms.

mod core;
mod fracpol;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{check_cap, Error, Result};
use crate::exec::{all_range, Caps, Config};
use crate::model::{format_rational, CostFn, Label, Language, Rational};
use crate::tuple;

pub use self::core::{rigid_core, rigid_core_with, RigidCore};
pub use self::fracpol::{
    class_polymorphisms, find_fracpol, find_fracpol_with, unary_polplus_member,
    unary_polplus_member_with, FracpolReport,
};

/// A total map `D^m -> D`, tabulated in tuple rank order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Operation {
    domain_size: usize,
    arity: usize,
    table: Vec<Label>,
}

impl Operation {
    pub fn new(domain_size: usize, arity: usize, table: Vec<Label>) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Invalid("operations have arity >= 1".into()));
        }
        let size = tuple::count(domain_size, arity).ok_or_else(|| {
            Error::Invalid(format!("operation table {domain_size}^{arity} too large"))
        })?;
        if table.len() != size {
            return Err(Error::Invalid(format!(
                "operation table has {} entries, expected {size}",
                table.len()
            )));
        }
        if let Some(&label) = table.iter().find(|&&v| v >= domain_size) {
            return Err(Error::LabelOutOfRange { label, domain_size });
        }
        Ok(Operation {
            domain_size,
            arity,
            table,
        })
    }

    pub fn from_fn<F: FnMut(&[Label]) -> Label>(
        domain_size: usize,
        arity: usize,
        mut f: F,
    ) -> Result<Self> {
        let table = tuple::all(domain_size, arity)
            .iter()
            .map(|x| f(x))
            .collect();
        Operation::new(domain_size, arity, table)
    }

    pub fn projection(domain_size: usize, arity: usize, i: usize) -> Result<Self> {
        if i >= arity {
            return Err(Error::Invalid(format!(
                "projection index {i} >= arity {arity}"
            )));
        }
        Operation::from_fn(domain_size, arity, |x| x[i])
    }

    pub fn identity(domain_size: usize) -> Self {
        Operation::projection(domain_size, 1, 0).expect("valid")
    }

    pub fn constant(domain_size: usize, arity: usize, c: Label) -> Result<Self> {
        Operation::from_fn(domain_size, arity, |_| c)
    }

    pub fn min(domain_size: usize, arity: usize) -> Result<Self> {
        Operation::from_fn(domain_size, arity, |x| *x.iter().min().expect("arity >= 1"))
    }

    pub fn max(domain_size: usize, arity: usize) -> Result<Self> {
        Operation::from_fn(domain_size, arity, |x| *x.iter().max().expect("arity >= 1"))
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[Label] {
        &self.table
    }

    pub fn apply(&self, x: &[Label]) -> Label {
        self.table[tuple::rank(x, self.domain_size)]
    }

    /// Applies the operation to each column of the `m` rows `xs`.
    pub fn apply_columns(&self, xs: &[&[Label]]) -> Vec<Label> {
        let r = xs.first().map_or(0, |x| x.len());
        let mut col = vec![0; xs.len()];
        (0..r)
            .map(|j| {
                for (c, x) in col.iter_mut().zip(xs) {
                    *c = x[j];
                }
                self.apply(&col)
            })
            .collect()
    }

    /// Sorted set of values taken by the operation.
    pub fn image(&self) -> Vec<Label> {
        let mut seen = vec![false; self.domain_size];
        for &v in &self.table {
            seen[v] = true;
        }
        (0..self.domain_size).filter(|&d| seen[d]).collect()
    }

    pub fn flags(&self) -> OpFlags {
        let k = self.domain_size;
        let idempotent = (0..k).all(|a| self.apply(&vec![a; self.arity]) == a);
        let all = tuple::all(k, self.arity);
        let cyclic = all.iter().all(|x| {
            let mut y = x.clone();
            y.rotate_left(1);
            self.apply(x) == self.apply(&y)
        });
        let symmetric = all.iter().all(|x| {
            let mut y = x.clone();
            y.sort_unstable();
            self.apply(x) == self.apply(&y)
        });
        OpFlags {
            idempotent,
            cyclic,
            symmetric,
        }
    }

    pub fn is_in_class(&self, class: OpClass) -> bool {
        let flags = self.flags();
        match class {
            OpClass::All => true,
            OpClass::Cyclic => flags.cyclic,
            OpClass::Symmetric => flags.symmetric,
        }
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OpFlags {
    pub idempotent: bool,
    pub cyclic: bool,
    pub symmetric: bool,
}

pub fn check_idempotent_cyclic_symmetric(g: &Operation) -> OpFlags {
    g.flags()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OpClass {
    All,
    Cyclic,
    Symmetric,
}

impl OpClass {
    /// Canonical representative of the orbit of `x` under the class's
    /// permutation group on positions.
    pub fn canonical(self, x: &[usize]) -> Vec<usize> {
        match self {
            OpClass::All => x.to_vec(),
            OpClass::Cyclic => {
                let mut best = x.to_vec();
                let mut y = x.to_vec();
                for _ in 1..x.len() {
                    y.rotate_left(1);
                    if y < best {
                        best.clone_from(&y);
                    }
                }
                best
            }
            OpClass::Symmetric => {
                let mut y = x.to_vec();
                y.sort_unstable();
                y
            }
        }
    }

    pub fn is_canonical(self, x: &[usize]) -> bool {
        match self {
            OpClass::All => true,
            OpClass::Symmetric => x.windows(2).all(|w| w[0] <= w[1]),
            OpClass::Cyclic => self.canonical(x) == x,
        }
    }

    pub fn group_order(self, m: usize) -> u128 {
        match self {
            OpClass::All => 1,
            OpClass::Cyclic => m as u128,
            OpClass::Symmetric => (1..=m as u128).product(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OpClass::All => "all",
            OpClass::Cyclic => "cyclic",
            OpClass::Symmetric => "symmetric",
        }
    }
}

impl fmt::Display for OpClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OpClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(OpClass::All),
            "cyclic" => Ok(OpClass::Cyclic),
            "symmetric" => Ok(OpClass::Symmetric),
            other => Err(Error::Invalid(format!("unknown operation class `{other}`"))),
        }
    }
}

/// Orbit representatives of `D^m` under the class group, and for each tuple
/// rank the index of its representative.
pub(crate) struct Orbits {
    pub reps: Vec<Vec<Label>>,
    pub rep_of: Vec<usize>,
}

impl Orbits {
    pub fn new(k: usize, m: usize, class: OpClass) -> Result<Self> {
        let size = tuple::count(k, m).ok_or_else(|| Error::CapExceeded {
            guard: "ops",
            requested: tuple::count_u128(k, m),
            cap: usize::MAX as u128,
        })?;
        let mut reps = Vec::new();
        let mut index_of_rep = BTreeMap::new();
        for r in 0..size {
            let x = tuple::unrank(r, k, m);
            if class.is_canonical(&x) {
                index_of_rep.insert(r, reps.len());
                reps.push(x);
            }
        }
        let rep_of = (0..size)
            .map(|r| {
                let c = class.canonical(&tuple::unrank(r, k, m));
                index_of_rep[&tuple::rank(&c, k)]
            })
            .collect();
        Ok(Orbits { reps, rep_of })
    }

    pub fn operation(&self, k: usize, m: usize, values: &[Label]) -> Operation {
        let table = self.rep_of.iter().map(|&i| values[i]).collect();
        Operation::new(k, m, table).expect("values in range")
    }
}

fn pow_saturating(k: usize, e: usize) -> u128 {
    (0..e).fold(1u128, |acc, _| acc.saturating_mul(k as u128))
}

/// All operations of the class, one per assignment of values to orbit
/// representatives, in lexicographic order of those values.
pub fn enumerate_ops(k: usize, m: usize, class: OpClass, caps: &Caps) -> Result<Vec<Operation>> {
    if m == 0 || k == 0 {
        return Err(Error::Invalid(
            "enumerate_ops needs k >= 1 and m >= 1".into(),
        ));
    }
    check_cap("ops", tuple::count_u128(k, m), caps.ops)?;
    let orbits = Orbits::new(k, m, class)?;
    check_cap("ops", pow_saturating(k, orbits.reps.len()), caps.ops)?;
    let mut values = vec![0; orbits.reps.len()];
    let mut out = Vec::new();
    loop {
        out.push(orbits.operation(k, m, &values));
        if !tuple::advance(&mut values, k) {
            break;
        }
    }
    Ok(out)
}

fn dom_tuples(f: &CostFn) -> Vec<&[Label]> {
    f.dom().map(|t| t.as_slice()).collect()
}

/// Whether `g` preserves every `dom f` of the language.
pub fn is_polymorphism(g: &Operation, lang: &Language) -> bool {
    if g.domain_size() != lang.domain_size() {
        return false;
    }
    let m = g.arity();
    lang.functions().all(|f| {
        let dom = dom_tuples(f);
        let mut ok = true;
        let mut rows: Vec<&[Label]> = Vec::with_capacity(m);
        tuple::for_each_family(dom.len(), m, |fam| {
            if !ok {
                return;
            }
            rows.clear();
            rows.extend(fam.iter().map(|&i| dom[i]));
            ok = f.in_dom(&g.apply_columns(&rows));
        });
        ok
    })
}

/// A probability distribution on operations of one arity and domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FracOp {
    domain_size: usize,
    arity: usize,
    support: BTreeMap<Operation, Rational>,
}

impl FracOp {
    /// Builds from weighted operations; repeated operations are merged and
    /// zero weights dropped. Weights must be nonnegative and sum to one.
    pub fn new<I: IntoIterator<Item = (Operation, Rational)>>(entries: I) -> Result<Self> {
        let mut support: BTreeMap<Operation, Rational> = BTreeMap::new();
        let mut shape: Option<(usize, usize)> = None;
        for (g, w) in entries {
            if w.is_negative() {
                return Err(Error::Invalid(format!(
                    "negative weight {}",
                    format_rational(&w)
                )));
            }
            let s = (g.domain_size(), g.arity());
            match shape {
                None => shape = Some(s),
                Some(prev) if prev != s => {
                    return Err(Error::Invalid(
                        "operations in a fractional operation must share arity and domain".into(),
                    ))
                }
                _ => {}
            }
            *support.entry(g).or_insert_with(Rational::zero) += w;
        }
        support.retain(|_, w| !w.is_zero());
        let (domain_size, arity) =
            shape.ok_or_else(|| Error::Invalid("empty fractional operation".into()))?;
        let total: Rational = support.values().sum();
        if !total.is_one() {
            return Err(Error::Invalid(format!(
                "weights sum to {}, expected 1",
                format_rational(&total)
            )));
        }
        Ok(FracOp {
            domain_size,
            arity,
            support,
        })
    }

    pub fn point_mass(g: Operation) -> Self {
        FracOp::new([(g, Rational::one())]).expect("unit weight")
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn support(&self) -> impl Iterator<Item = (&Operation, &Rational)> {
        self.support.iter()
    }

    pub fn weight(&self, g: &Operation) -> Rational {
        self.support.get(g).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn contains(&self, g: &Operation) -> bool {
        self.support.contains_key(g)
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mixture(&self, other: &FracOp, lambda: &Rational) -> Result<FracOp> {
        if lambda.is_negative() || *lambda > Rational::one() {
            return Err(Error::Invalid("mixture weight must lie in [0, 1]".into()));
        }
        let rest = Rational::one() - lambda;
        FracOp::new(
            self.support
                .iter()
                .map(|(g, w)| (g.clone(), w * lambda))
                .chain(other.support.iter().map(|(g, w)| (g.clone(), w * &rest))),
        )
    }

    pub fn is_in_class(&self, class: OpClass) -> bool {
        self.support.keys().all(|g| g.is_in_class(class))
    }
}

impl fmt::Display for FracOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (g, w) in &self.support {
            writeln!(f, "{} {}", format_rational(w), g)?;
        }
        Ok(())
    }
}

pub fn verify_fracpol(omega: &FracOp, lang: &Language) -> bool {
    verify_fracpol_with(omega, lang, &Config::default())
}

/// Checks the averaged inequality for every function and every family of
/// `m` tuples from its dom, exactly. Work is split over the first tuple of
/// each family.
pub fn verify_fracpol_with(omega: &FracOp, lang: &Language, cfg: &Config) -> bool {
    if omega.domain_size() != lang.domain_size() {
        return false;
    }
    let m = omega.arity();
    let m_rat = Rational::from_integer(m.into());
    lang.functions().all(|f| {
        let dom = dom_tuples(f);
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
                let rhs: Rational = rows
                    .iter()
                    .map(|x| f.finite_value(x).expect("in dom"))
                    .sum();
                let mut lhs = Rational::zero();
                for (g, w) in omega.support() {
                    match f.finite_value(&g.apply_columns(&rows)) {
                        Some(v) => lhs += w * v,
                        None => {
                            ok = false;
                            return;
                        }
                    }
                }
                ok = &lhs * &m_rat <= rhs;
            });
            ok
        })
    })
}
