//! Execution settings shared by every module: resource guards and the
//! data-parallel strategy.
//!
//! With the `parallel` feature (on by default) the helpers here fan work out
//! over the rayon pool. Without it, or with [`Exec::Sequential`], the same
//! closures run on the calling thread. Results are always merged in input
//! order, so output never depends on the strategy.

use crate::error::{Error, Result};

/// Resource guards. Exceeding one aborts with [`Error::CapExceeded`]; nothing
/// is ever silently sampled or truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Simplex tableau cells (rows x columns).
    pub lp_cells: u128,
    /// LP variables generated by fractional-polymorphism searches.
    pub fracpol_vars: u128,
    /// LP rows generated by fractional-polymorphism searches.
    pub fracpol_rows: u128,
    /// Operations enumerated for a class (also bounds the k^k unary space).
    pub ops: u128,
    /// Nodes in an operation graph.
    pub graph_nodes: u128,
    /// Search-tree nodes visited by the brute-force oracle.
    pub brute_evals: u128,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            lp_cells: 200_000,
            fracpol_vars: 100_000,
            fracpol_rows: 500_000,
            ops: 100_000,
            graph_nodes: 20_000,
            brute_evals: 1 << 24,
        }
    }
}

impl Caps {
    /// Parses overrides of the form `name=value,name=value`.
    ///
    /// Recognized names: `lp_cells`, `fracpol_vars`, `fracpol_rows`, `ops`,
    /// `graph_nodes`, `brute_evals`.
    pub fn with_overrides(mut self, overrides: &str) -> Result<Self> {
        for item in overrides
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            let (name, value) = item.split_once('=').ok_or_else(|| {
                Error::Invalid(format!("cap override `{item}` is not name=value"))
            })?;
            let value: u128 =
                value.trim().replace('_', "").parse().map_err(|_| {
                    Error::Invalid(format!("cap override `{item}` has a bad value"))
                })?;
            let slot = match name.trim() {
                "lp_cells" => &mut self.lp_cells,
                "fracpol_vars" => &mut self.fracpol_vars,
                "fracpol_rows" => &mut self.fracpol_rows,
                "ops" => &mut self.ops,
                "graph_nodes" => &mut self.graph_nodes,
                "brute_evals" => &mut self.brute_evals,
                other => return Err(Error::Invalid(format!("unknown cap `{other}`"))),
            };
            *slot = value;
        }
        Ok(self)
    }

    /// Defaults, overridden by the `VCSP_CAPS` environment variable if set.
    pub fn from_env() -> Result<Self> {
        match std::env::var("VCSP_CAPS") {
            Ok(list) => Caps::default().with_overrides(&list),
            Err(_) => Ok(Caps::default()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Config {
    pub caps: Caps,
    pub exec: Exec,
}

impl Config {
    pub fn sequential() -> Self {
        Config {
            caps: Caps::default(),
            exec: Exec::Sequential,
        }
    }

    pub fn with_caps(caps: Caps) -> Self {
        Config {
            caps,
            exec: Exec::default(),
        }
    }
}

/// Maps `f` over `items`, preserving order.
pub fn map_vec<T, R, F>(exec: Exec, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.into_par_iter().map(f).collect();
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(exec: Exec, n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// True iff `pred` holds for every index in `0..n`.
pub fn all_range<F>(exec: Exec, n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().all(pred);
    }
    let _ = exec;
    (0..n).all(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let caps = Caps::default()
            .with_overrides("lp_cells=5, brute_evals=1_000")
            .unwrap();
        assert_eq!(caps.lp_cells, 5);
        assert_eq!(caps.brute_evals, 1000);
        assert_eq!(caps.ops, Caps::default().ops);
        assert!(Caps::default().with_overrides("nope=1").is_err());
        assert!(Caps::default().with_overrides("lp_cells").is_err());
    }

    #[test]
    fn strategies_agree() {
        let seq = map_range(Exec::Sequential, 100, |i| i * i);
        let par = map_range(Exec::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        assert!(all_range(Exec::Parallel, 10, |i| i < 10));
        assert!(!all_range(Exec::Sequential, 10, |i| i < 9));
    }
}
