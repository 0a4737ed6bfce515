use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),

    #[error("function `{name}` has arity {expected}, got a scope/tuple of length {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("label {label} out of range for domain size {domain_size}")]
    LabelOutOfRange { label: usize, domain_size: usize },

    #[error("variable index {index} out of range ({num_vars} variables)")]
    VariableOutOfRange { index: usize, num_vars: usize },

    #[error("assignment has {got} labels, instance has {expected} variables")]
    AssignmentLength { expected: usize, got: usize },

    #[error("domain size mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),

    #[error("duplicate function name `{0}`")]
    DuplicateFunction(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("resource guard `{guard}` exceeded: needed {requested}, cap is {cap}")]
    CapExceeded {
        guard: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("variable {0} has no supported label (instance infeasible)")]
    EmptySupport(usize),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(guard: &'static str, requested: u128, cap: u128) -> Result<()> {
    if requested > cap {
        Err(Error::CapExceeded {
            guard,
            requested,
            cap,
        })
    } else {
        Ok(())
    }
}
