//! Cost functions, languages, instances and objective evaluation.

mod value;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;

pub use value::{
    format_rational, int, is_nonneg, one, parse_rational, rat, sum_rationals, ExtRat,
    ParseExtRatError, Rational,
};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::tuple;

pub type Label = usize;

/// Prefix of function names synthesized by the toolkit (pinning functions,
/// lifted tables, equality). User files may use it too, but a clash with a
/// different table is an error.
pub const RESERVED_PREFIX: char = '@';

/// A finite table `D^n -> Q ∪ {inf}`. Only finite entries are stored; every
/// tuple absent from the table has value `inf`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CostFn {
    name: String,
    arity: usize,
    domain_size: usize,
    table: BTreeMap<Vec<Label>, Rational>,
}

impl CostFn {
    /// Builds a function from explicit entries. Entries equal to `inf` are
    /// dropped; a tuple listed twice is an error.
    pub fn new<I>(
        name: impl Into<String>,
        arity: usize,
        domain_size: usize,
        entries: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<Label>, ExtRat)>,
    {
        let name = name.into();
        if arity == 0 {
            return Err(Error::Invalid(format!(
                "function `{name}` must have arity >= 1"
            )));
        }
        if domain_size == 0 {
            return Err(Error::Invalid("domain size must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut table = BTreeMap::new();
        for (t, v) in entries {
            if t.len() != arity {
                return Err(Error::ArityMismatch {
                    name,
                    expected: arity,
                    got: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&d| d >= domain_size) {
                return Err(Error::LabelOutOfRange {
                    label: bad,
                    domain_size,
                });
            }
            if !seen.insert(t.clone()) {
                return Err(Error::Invalid(format!(
                    "function `{name}` lists tuple {t:?} twice"
                )));
            }
            if let ExtRat::Finite(r) = v {
                table.insert(t, r);
            }
        }
        Ok(CostFn {
            name,
            arity,
            domain_size,
            table,
        })
    }

    /// Tabulates `f` over every tuple of `[0, k)^arity`.
    pub fn from_fn(
        name: impl Into<String>,
        arity: usize,
        domain_size: usize,
        f: impl Fn(&[Label]) -> ExtRat,
    ) -> Result<Self> {
        let entries = tuple::all(domain_size, arity).into_iter().map(|t| {
            let v = f(&t);
            (t, v)
        });
        CostFn::new(name, arity, domain_size, entries)
    }

    /// `{0, inf}`-valued function that is 0 exactly on `allowed`.
    pub fn crisp<I>(
        name: impl Into<String>,
        arity: usize,
        domain_size: usize,
        allowed: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<Label>>,
    {
        CostFn::new(
            name,
            arity,
            domain_size,
            allowed.into_iter().map(|t| (t, ExtRat::zero())),
        )
    }

    /// `u_S`: unary, 0 on `labels`, `inf` elsewhere.
    pub fn unary_subset(
        name: impl Into<String>,
        domain_size: usize,
        labels: &[Label],
    ) -> Result<Self> {
        let mut sorted: Vec<Label> = labels.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        CostFn::crisp(name, 1, domain_size, sorted.into_iter().map(|d| vec![d]))
    }

    /// The binary equality relation `=_D`.
    pub fn equality(name: impl Into<String>, domain_size: usize) -> Result<Self> {
        CostFn::crisp(name, 2, domain_size, (0..domain_size).map(|d| vec![d, d]))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn value(&self, x: &[Label]) -> ExtRat {
        match self.table.get(x) {
            Some(r) => ExtRat::Finite(r.clone()),
            None => ExtRat::Infinity,
        }
    }

    pub fn finite_value(&self, x: &[Label]) -> Option<&Rational> {
        self.table.get(x)
    }

    pub fn in_dom(&self, x: &[Label]) -> bool {
        self.table.contains_key(x)
    }

    /// Finite entries in lexicographic tuple order.
    pub fn entries(&self) -> impl Iterator<Item = (&Vec<Label>, &Rational)> {
        self.table.iter()
    }

    /// `dom f` in lexicographic order.
    pub fn dom(&self) -> impl Iterator<Item = &Vec<Label>> {
        self.table.keys()
    }

    pub fn dom_size(&self) -> usize {
        self.table.len()
    }

    pub fn is_crisp(&self) -> bool {
        self.table.values().all(Zero::is_zero)
    }

    /// Complete table with every value finite.
    pub fn is_finite_valued(&self) -> bool {
        tuple::count(self.domain_size, self.arity) == Some(self.table.len())
    }

    /// Table identity, ignoring names.
    pub fn same_table(&self, other: &CostFn) -> bool {
        self.arity == other.arity
            && self.domain_size == other.domain_size
            && self.table == other.table
    }

    pub fn renamed(&self, name: impl Into<String>) -> CostFn {
        CostFn {
            name: name.into(),
            ..self.clone()
        }
    }

    /// Restricts to labels in `subdomain` (sorted, distinct), relabeling the
    /// i-th kept label to `i`.
    pub fn restricted(&self, subdomain: &[Label]) -> CostFn {
        let mut index = vec![None; self.domain_size];
        for (i, &d) in subdomain.iter().enumerate() {
            index[d] = Some(i);
        }
        let table = self
            .table
            .iter()
            .filter_map(|(t, v)| {
                let mapped: Option<Vec<Label>> = t.iter().map(|&d| index[d]).collect();
                mapped.map(|m| (m, v.clone()))
            })
            .collect();
        CostFn {
            name: self.name.clone(),
            arity: self.arity,
            domain_size: subdomain.len(),
            table,
        }
    }
}

/// `dom f` as a `{0, inf}`-valued function with the same name.
pub fn dom_fn(f: &CostFn) -> CostFn {
    CostFn {
        name: f.name.clone(),
        arity: f.arity,
        domain_size: f.domain_size,
        table: f
            .table
            .keys()
            .map(|t| (t.clone(), Rational::zero()))
            .collect(),
    }
}

/// Canonical reserved name of `u_S`.
pub fn unary_subset_name(labels: &[Label]) -> String {
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let body: Vec<String> = sorted.iter().map(ToString::to_string).collect();
    format!("{RESERVED_PREFIX}u{{{}}}", body.join(","))
}

pub fn equality_name() -> String {
    format!("{RESERVED_PREFIX}eq")
}

/// A finite set of cost functions over a shared domain `[0, k)`, keyed by name.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Language {
    domain_size: usize,
    functions: BTreeMap<String, CostFn>,
}

impl Language {
    pub fn new(domain_size: usize) -> Result<Self> {
        if domain_size == 0 {
            return Err(Error::Invalid("domain size must be >= 1".into()));
        }
        Ok(Language {
            domain_size,
            functions: BTreeMap::new(),
        })
    }

    pub fn from_functions<I: IntoIterator<Item = CostFn>>(
        domain_size: usize,
        fs: I,
    ) -> Result<Self> {
        let mut lang = Language::new(domain_size)?;
        for f in fs {
            lang.insert(f)?;
        }
        Ok(lang)
    }

    pub fn domain_size(&self) -> usize {
        self.domain_size
    }

    pub fn insert(&mut self, f: CostFn) -> Result<()> {
        if f.domain_size != self.domain_size {
            return Err(Error::DomainMismatch(f.domain_size, self.domain_size));
        }
        if self.functions.contains_key(&f.name) {
            return Err(Error::DuplicateFunction(f.name));
        }
        self.functions.insert(f.name.clone(), f);
        Ok(())
    }

    /// Inserts `f` unless an identical table is already stored under its
    /// name. Returns the name.
    pub fn ensure(&mut self, f: CostFn) -> Result<String> {
        match self.functions.get(&f.name) {
            Some(existing) if existing.same_table(&f) => Ok(f.name),
            Some(_) => Err(Error::DuplicateFunction(f.name)),
            None => {
                let name = f.name.clone();
                self.insert(f)?;
                Ok(name)
            }
        }
    }

    /// Ensures the reserved `u_S` is present and returns its name.
    pub fn ensure_unary_subset(&mut self, labels: &[Label]) -> Result<String> {
        let f = CostFn::unary_subset(unary_subset_name(labels), self.domain_size, labels)?;
        self.ensure(f)
    }

    pub fn get(&self, name: &str) -> Result<&CostFn> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    pub fn functions(&self) -> impl Iterator<Item = &CostFn> {
        self.functions.values()
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn contains_table(&self, f: &CostFn) -> bool {
        self.functions.values().any(|g| g.same_table(f))
    }

    pub fn is_crisp(&self) -> bool {
        self.functions.values().all(CostFn::is_crisp)
    }
}

/// `Feas(Γ)`: every function replaced by its dom, names preserved.
pub fn feas_language(lang: &Language) -> Language {
    Language {
        domain_size: lang.domain_size,
        functions: lang
            .functions
            .iter()
            .map(|(n, f)| (n.clone(), dom_fn(f)))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub function: String,
    pub scope: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    num_vars: usize,
    constraints: Vec<Constraint>,
}

impl Instance {
    pub fn new(num_vars: usize) -> Self {
        Instance {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Appends a constraint. Names and arities are checked by
    /// [`Instance::validate`], variable indices here.
    pub fn add(&mut self, function: impl Into<String>, scope: Vec<usize>) -> Result<()> {
        if let Some(&bad) = scope.iter().find(|&&v| v >= self.num_vars) {
            return Err(Error::VariableOutOfRange {
                index: bad,
                num_vars: self.num_vars,
            });
        }
        self.constraints.push(Constraint {
            function: function.into(),
            scope,
        });
        Ok(())
    }

    pub fn with(mut self, function: impl Into<String>, scope: Vec<usize>) -> Result<Self> {
        self.add(function, scope)?;
        Ok(self)
    }

    pub fn validate(&self, lang: &Language) -> Result<()> {
        for c in &self.constraints {
            let f = lang.get(&c.function)?;
            if f.arity() != c.scope.len() {
                return Err(Error::ArityMismatch {
                    name: c.function.clone(),
                    expected: f.arity(),
                    got: c.scope.len(),
                });
            }
            if let Some(&bad) = c.scope.iter().find(|&&v| v >= self.num_vars) {
                return Err(Error::VariableOutOfRange {
                    index: bad,
                    num_vars: self.num_vars,
                });
            }
        }
        Ok(())
    }

    /// Resolves every constraint to its function.
    pub fn resolve<'a>(&'a self, lang: &'a Language) -> Result<Vec<(&'a CostFn, &'a [usize])>> {
        self.validate(lang)?;
        self.constraints
            .iter()
            .map(|c| Ok((lang.get(&c.function)?, c.scope.as_slice())))
            .collect()
    }
}

/// A total labeling `V -> D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment(pub Vec<Label>);

impl Deref for Assignment {
    type Target = [Label];

    fn deref(&self) -> &[Label] {
        &self.0
    }
}

impl From<Vec<Label>> for Assignment {
    fn from(v: Vec<Label>) -> Self {
        Assignment(v)
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Objective value `Σ_t f_t(x|scope_t)`.
pub fn evaluate(lang: &Language, inst: &Instance, x: &Assignment) -> Result<ExtRat> {
    let resolved = inst.resolve(lang)?;
    if x.len() != inst.num_vars {
        return Err(Error::AssignmentLength {
            expected: inst.num_vars,
            got: x.len(),
        });
    }
    if let Some(&bad) = x.iter().find(|&&d| d >= lang.domain_size) {
        return Err(Error::LabelOutOfRange {
            label: bad,
            domain_size: lang.domain_size,
        });
    }
    let mut total = Rational::zero();
    let mut buf = Vec::new();
    for (f, scope) in resolved {
        buf.clear();
        buf.extend(scope.iter().map(|&v| x[v]));
        match f.finite_value(&buf) {
            Some(r) => total += r,
            None => return Ok(ExtRat::Infinity),
        }
    }
    Ok(ExtRat::Finite(total))
}
