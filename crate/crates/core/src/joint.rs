//! Exact joint probability tables over named binary variables: the substrate
//! for the entropy and guessed-information computations.

use crate::rational::{q, q0, Rational};
use crate::vars::{index_of, position, space_size, values_of, VariableSpec};
use crate::{Error, Result};
use num::{One, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    vars: Vec<VariableSpec>,
    probs: Vec<Rational>,
}

impl JointDistribution {
    pub fn new(vars: Vec<VariableSpec>, probs: Vec<Rational>) -> Result<Self> {
        crate::vars::check_unique_names([&vars[..]])?;
        if probs.len() != space_size(&vars) {
            return Err(Error::InvalidDistribution(format!(
                "expected {} cells, got {}",
                space_size(&vars),
                probs.len()
            )));
        }
        let mut sum = q0();
        for p in &probs {
            if p < &q0() {
                return Err(Error::InvalidDistribution("negative probability".into()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        Ok(Self { vars, probs })
    }

    /// Accumulates weighted atoms; useful when several generation paths land
    /// on the same cell.
    pub fn from_atoms(
        vars: Vec<VariableSpec>,
        atoms: impl IntoIterator<Item = (Vec<u8>, Rational)>,
    ) -> Result<Self> {
        let mut probs = vec![q0(); space_size(&vars)];
        for (vals, p) in atoms {
            let idx = index_of(&vars, &vals);
            probs[idx] += p;
        }
        Self::new(vars, probs)
    }

    pub fn vars(&self) -> &[VariableSpec] {
        &self.vars
    }

    pub fn var_names(&self) -> Vec<&str> {
        self.vars.iter().map(|v| v.name.as_str()).collect()
    }

    pub fn probs(&self) -> &[Rational] {
        &self.probs
    }

    /// Iterates (assignment values, probability) over the support.
    pub fn support(&self) -> impl Iterator<Item = (Vec<u8>, &Rational)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(i, p)| (values_of(&self.vars, i), p))
    }

    /// Marginal over the named subset (declared order follows `names`).
    pub fn marginal(&self, names: &[&str]) -> Result<JointDistribution> {
        let positions: Vec<usize> = names
            .iter()
            .map(|n| position(&self.vars, n))
            .collect::<Result<_>>()?;
        let new_vars: Vec<VariableSpec> = positions.iter().map(|&i| self.vars[i].clone()).collect();
        let mut probs = vec![q0(); space_size(&new_vars)];
        for (idx, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let vals = values_of(&self.vars, idx);
            let sub: Vec<u8> = positions.iter().map(|&i| vals[i]).collect();
            probs[index_of(&new_vars, &sub)] += p;
        }
        JointDistribution::new(new_vars, probs)
    }

    /// Conditions on an assignment of some variables, dropping them.
    /// `None` when the event has probability zero.
    pub fn condition(&self, fixed: &[(&str, u8)]) -> Result<Option<JointDistribution>> {
        let fixed_pos: Vec<(usize, u8)> = fixed
            .iter()
            .map(|(n, v)| position(&self.vars, n).map(|p| (p, *v)))
            .collect::<Result<_>>()?;
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|i| !fixed_pos.iter().any(|(p, _)| p == i))
            .collect();
        let new_vars: Vec<VariableSpec> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut probs = vec![q0(); space_size(&new_vars)];
        let mut total = q0();
        for (idx, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let vals = values_of(&self.vars, idx);
            if fixed_pos.iter().all(|&(pos, v)| vals[pos] == v) {
                let sub: Vec<u8> = keep.iter().map(|&i| vals[i]).collect();
                probs[index_of(&new_vars, &sub)] += p;
                total += p;
            }
        }
        if total.is_zero() {
            return Ok(None);
        }
        for p in &mut probs {
            *p = p.clone() / total.clone();
        }
        Ok(Some(JointDistribution::new(new_vars, probs)?))
    }

    /// Appends a derived variable equal to the XOR of existing binary ones.
    pub fn with_xor_column(&self, name: &str, of: &[&str]) -> Result<JointDistribution> {
        let positions: Vec<usize> = of
            .iter()
            .map(|n| position(&self.vars, n))
            .collect::<Result<_>>()?;
        for &i in &positions {
            if self.vars[i].arity != 2 {
                return Err(Error::Signature(format!(
                    "xor requires binary variables, `{}` has arity {}",
                    self.vars[i].name, self.vars[i].arity
                )));
            }
        }
        let mut new_vars = self.vars.clone();
        new_vars.push(VariableSpec::new(name, 2)?);
        crate::vars::check_unique_names([&new_vars[..]])?;
        let mut probs = vec![q0(); space_size(&new_vars)];
        for (idx, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut vals = values_of(&self.vars, idx);
            let x = positions.iter().fold(0u8, |acc, &i| acc ^ vals[i]);
            vals.push(x);
            probs[index_of(&new_vars, &vals)] += p;
        }
        JointDistribution::new(new_vars, probs)
    }

    /// Probability of a partial assignment event.
    pub fn prob_of(&self, event: &[(&str, u8)]) -> Result<Rational> {
        let pos: Vec<(usize, u8)> = event
            .iter()
            .map(|(n, v)| position(&self.vars, n).map(|p| (p, *v)))
            .collect::<Result<_>>()?;
        let mut total = q0();
        for (idx, p) in self.probs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let vals = values_of(&self.vars, idx);
            if pos.iter().all(|&(i, v)| vals[i] == v) {
                total += p;
            }
        }
        Ok(total)
    }

    /// Exact check that the listed groups of variables are mutually
    /// independent: the joint marginal factorizes into the product.
    pub fn mutually_independent(&self, groups: &[&[&str]]) -> Result<bool> {
        let flat: Vec<&str> = groups.iter().flat_map(|g| g.iter().copied()).collect();
        let joint = self.marginal(&flat)?;
        let margs: Vec<JointDistribution> = groups
            .iter()
            .map(|g| self.marginal(g))
            .collect::<Result<_>>()?;
        for (idx, p) in joint.probs.iter().enumerate() {
            let vals = values_of(&joint.vars, idx);
            let mut prod = q(1, 1);
            let mut offset = 0;
            for (g, marg) in groups.iter().zip(&margs) {
                let sub = &vals[offset..offset + g.len()];
                prod *= marg.probs[index_of(&marg.vars, sub)].clone();
                offset += g.len();
            }
            if *p != prod {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::half;

    fn coin_pair() -> JointDistribution {
        // two independent fair bits u, v
        JointDistribution::new(
            vec![VariableSpec::bit("u"), VariableSpec::bit("v")],
            vec![q(1, 4), q(1, 4), q(1, 4), q(1, 4)],
        )
        .unwrap()
    }

    #[test]
    fn marginal_and_condition() {
        let d = coin_pair();
        let m = d.marginal(&["u"]).unwrap();
        assert_eq!(m.probs(), &[half(), half()]);
        let c = d.condition(&[("u", 1)]).unwrap().unwrap();
        assert_eq!(c.var_names(), vec!["v"]);
        assert_eq!(c.probs(), &[half(), half()]);
    }

    #[test]
    fn xor_column() {
        let d = coin_pair().with_xor_column("w", &["u", "v"]).unwrap();
        assert_eq!(d.prob_of(&[("w", 0)]).unwrap(), half());
        // w = u ^ v deterministically
        let c = d.condition(&[("u", 1), ("v", 1)]).unwrap().unwrap();
        assert_eq!(c.prob_of(&[("w", 0)]).unwrap(), q(1, 1));
    }

    #[test]
    fn independence_check() {
        let d = coin_pair();
        assert!(d.mutually_independent(&[&["u"], &["v"]]).unwrap());
        let d = d.with_xor_column("w", &["u", "v"]).unwrap();
        assert!(!d.mutually_independent(&[&["u", "v"], &["w"]]).unwrap());
        assert!(d.mutually_independent(&[&["u"], &["w"]]).unwrap());
    }

    #[test]
    fn zero_probability_condition() {
        let d = JointDistribution::new(
            vec![VariableSpec::bit("u"), VariableSpec::bit("v")],
            vec![half(), q0(), q0(), half()],
        )
        .unwrap();
        let c = d.condition(&[("u", 0)]).unwrap().unwrap();
        assert_eq!(c.prob_of(&[("v", 0)]).unwrap(), q(1, 1));
        // conditioning on a null event
        let d2 = JointDistribution::new(
            vec![VariableSpec::bit("u")],
            vec![q(1, 1), q0()],
        )
        .unwrap();
        assert!(d2.condition(&[("u", 1)]).unwrap().is_none());
    }
}
