//! Named finite variables and assignment indexing.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// A named finite variable. Everything in this crate is binary, but the arity
/// is kept explicit so invariants stay checkable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub arity: u32,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, arity: u32) -> Result<Self> {
        let name = name.into();
        if arity < 2 {
            return Err(Error::Signature(format!(
                "variable `{name}` must have arity >= 2, got {arity}"
            )));
        }
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Signature(format!("invalid variable name `{name}`")));
        }
        Ok(Self { name, arity })
    }

    /// Binary variable, the common case here.
    pub fn bit(name: impl Into<String>) -> Self {
        Self::new(name, 2).expect("valid bit name")
    }
}

/// Checks that names are unique across a set of variable groups.
pub fn check_unique_names<'a>(groups: impl IntoIterator<Item = &'a [VariableSpec]>) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for group in groups {
        for v in group {
            if !seen.insert(v.name.as_str()) {
                return Err(Error::DuplicateVariable(v.name.clone()));
            }
        }
    }
    Ok(())
}

/// Index space over an ordered list of variables. The first variable is the
/// most significant digit, so iterating indices enumerates assignments in
/// lexicographic order of the declared variable order.
pub fn space_size(vars: &[VariableSpec]) -> usize {
    vars.iter().map(|v| v.arity as usize).product()
}

pub fn index_of(vars: &[VariableSpec], values: &[u8]) -> usize {
    debug_assert_eq!(vars.len(), values.len());
    let mut idx = 0usize;
    for (v, &val) in vars.iter().zip(values) {
        debug_assert!((val as u32) < v.arity);
        idx = idx * v.arity as usize + val as usize;
    }
    idx
}

pub fn values_of(vars: &[VariableSpec], mut idx: usize) -> Vec<u8> {
    let mut out = vec![0u8; vars.len()];
    for (slot, v) in out.iter_mut().rev().zip(vars.iter().rev()) {
        *slot = (idx % v.arity as usize) as u8;
        idx /= v.arity as usize;
    }
    out
}

/// Position of a named variable within a group.
pub fn position(vars: &[VariableSpec], name: &str) -> Result<usize> {
    vars.iter()
        .position(|v| v.name == name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_invariant() {
        assert!(VariableSpec::new("x", 1).is_err());
        assert!(VariableSpec::new("x", 2).is_ok());
        assert!(VariableSpec::new("", 2).is_err());
        assert!(VariableSpec::new("a b", 2).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let vars = vec![VariableSpec::bit("x"), VariableSpec::bit("y"), VariableSpec::bit("z")];
        for idx in 0..space_size(&vars) {
            let vals = values_of(&vars, idx);
            assert_eq!(index_of(&vars, &vals), idx);
        }
        // first variable most significant
        assert_eq!(values_of(&vars, 4), vec![1, 0, 0]);
    }

    #[test]
    fn unique_names() {
        let a = [VariableSpec::bit("x")];
        let b = [VariableSpec::bit("x")];
        assert!(check_unique_names([&a[..], &b[..]]).is_err());
    }
}
