//! Classical channels with explicit flag variables, pattern classification,
//! and exact postprocessing-feasibility checks.

use crate::joint::JointDistribution;
use crate::rational::{fmt_frac, half, q, q0, q1, Rational};
use crate::vars::{space_size, values_of, VariableSpec};
use crate::{Error, Result};
use num::{One, Zero};
use serde::Serialize;

/// Conditional distribution p(content, flags | input). Output symbols are
/// indexed content-major: symbol = content * n_flag_assignments + flag_index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalChannel {
    input: VariableSpec,
    content: VariableSpec,
    flags: Vec<VariableSpec>,
    table: Vec<Vec<Rational>>,
}

impl ClassicalChannel {
    pub fn new(
        input: VariableSpec,
        content: VariableSpec,
        flags: Vec<VariableSpec>,
        table: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n_sym = content.arity as usize * space_size(&flags);
        if table.len() != input.arity as usize {
            return Err(Error::InvalidDistribution(format!(
                "channel needs {} input rows, got {}",
                input.arity,
                table.len()
            )));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n_sym {
                return Err(Error::InvalidDistribution(format!(
                    "row {i}: {} symbols, expected {n_sym}",
                    row.len()
                )));
            }
            let mut sum = q0();
            for p in row {
                if p < &q0() {
                    return Err(Error::InvalidDistribution("negative probability".into()));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidDistribution(format!(
                    "channel row {i} sums to {sum}"
                )));
            }
        }
        Ok(Self {
            input,
            content,
            flags,
            table,
        })
    }

    pub fn input(&self) -> &VariableSpec {
        &self.input
    }
    pub fn content(&self) -> &VariableSpec {
        &self.content
    }
    pub fn flags(&self) -> &[VariableSpec] {
        &self.flags
    }
    pub fn table(&self) -> &[Vec<Rational>] {
        &self.table
    }

    pub fn n_symbols(&self) -> usize {
        self.content.arity as usize * space_size(&self.flags)
    }

    pub fn n_flag_assignments(&self) -> usize {
        space_size(&self.flags)
    }

    pub fn prob(&self, input: u8, content: u8, flag_idx: usize) -> &Rational {
        &self.table[input as usize][content as usize * self.n_flag_assignments() + flag_idx]
    }

    /// Extracts p(content, flags | input) from a joint distribution.
    pub fn from_joint(
        d: &JointDistribution,
        input: &str,
        content: &str,
        flags: &[&str],
    ) -> Result<Self> {
        let all: Vec<&str> = std::iter::once(input)
            .chain(std::iter::once(content))
            .chain(flags.iter().copied())
            .collect();
        let m = d.marginal(&all)?;
        let in_spec = m.vars()[0].clone();
        let content_spec = m.vars()[1].clone();
        let flag_specs: Vec<VariableSpec> = m.vars()[2..].to_vec();
        let n_flag = space_size(&flag_specs);
        let n_sym = content_spec.arity as usize * n_flag;
        let mut table = vec![vec![q0(); n_sym]; in_spec.arity as usize];
        let mut in_mass = vec![q0(); in_spec.arity as usize];
        for (vals, p) in m.support() {
            let (zi, c) = (vals[0] as usize, vals[1] as usize);
            let flag_idx = crate::vars::index_of(&flag_specs, &vals[2..]);
            table[zi][c * n_flag + flag_idx] += p;
            in_mass[zi] += p;
        }
        for (zi, mass) in in_mass.iter().enumerate() {
            if mass.is_zero() {
                return Err(Error::Precondition(format!(
                    "input value {zi} has zero probability; channel undefined"
                )));
            }
            for entry in &mut table[zi] {
                *entry = entry.clone() / mass.clone();
            }
        }
        Self::new(in_spec, content_spec, flag_specs, table)
    }

    /// Joint over (input, content, flags) for a given input distribution.
    pub fn to_joint(&self, input_dist: &[Rational]) -> Result<JointDistribution> {
        if input_dist.len() != self.input.arity as usize {
            return Err(Error::Signature("input distribution arity mismatch".into()));
        }
        let mut vars = vec![self.input.clone(), self.content.clone()];
        vars.extend(self.flags.iter().cloned());
        let n_flag = self.n_flag_assignments();
        let mut atoms = Vec::new();
        for (zi, pz) in input_dist.iter().enumerate() {
            for sym in 0..self.n_symbols() {
                let p = &self.table[zi][sym];
                if p.is_zero() || pz.is_zero() {
                    continue;
                }
                let c = (sym / n_flag) as u8;
                let flag_vals = values_of(&self.flags, sym % n_flag);
                let mut vals = vec![zi as u8, c];
                vals.extend(flag_vals);
                atoms.push((vals, pz.clone() * p.clone()));
            }
        }
        JointDistribution::from_atoms(vars, atoms)
    }

    /// I(input : content, flags) in bits under a uniform input.
    pub fn uniform_mutual_information(&self) -> Result<f64> {
        let n = self.input.arity as i64;
        let d = self.to_joint(&vec![q(1, n); n as usize])?;
        let flag_names: Vec<&str> = self.flags.iter().map(|f| f.name.as_str()).collect();
        let view: Vec<&str> = std::iter::once(self.content.name.as_str())
            .chain(flag_names)
            .collect();
        crate::info::mutual_information(&d, &[self.input.name.as_str()], &view, &[])
    }

    /// Applies a stochastic map on the output symbols. `map[s][o]` is the
    /// probability of relabeling symbol `s` to the target symbol `o`.
    pub fn postprocess(
        &self,
        target_content: VariableSpec,
        target_flags: Vec<VariableSpec>,
        map: &[Vec<Rational>],
    ) -> Result<ClassicalChannel> {
        let n_sym = self.n_symbols();
        let n_target = target_content.arity as usize * space_size(&target_flags);
        if map.len() != n_sym {
            return Err(Error::Signature(format!(
                "map needs {n_sym} rows, got {}",
                map.len()
            )));
        }
        for row in map {
            if row.len() != n_target {
                return Err(Error::Signature("map column count mismatch".into()));
            }
            let mut sum = q0();
            for p in row {
                if p < &q0() {
                    return Err(Error::InvalidDistribution("negative map entry".into()));
                }
                sum += p;
            }
            if !sum.is_one() {
                return Err(Error::InvalidDistribution(
                    "map rows must be stochastic".into(),
                ));
            }
        }
        let mut table = vec![vec![q0(); n_target]; self.input.arity as usize];
        for zi in 0..self.input.arity as usize {
            for s in 0..n_sym {
                let p = &self.table[zi][s];
                if p.is_zero() {
                    continue;
                }
                for o in 0..n_target {
                    if !map[s][o].is_zero() {
                        table[zi][o] += p.clone() * map[s][o].clone();
                    }
                }
            }
        }
        ClassicalChannel::new(self.input.clone(), target_content, target_flags, table)
    }

    /// Branch decomposition: (flag weight, 2x2 matrix p(content|input, flag)).
    /// `None` when some flag's weight depends on the input.
    fn branches(&self) -> Option<Vec<(Rational, Vec<Vec<Rational>>)>> {
        let n_in = self.input.arity as usize;
        let n_flag = self.n_flag_assignments();
        let n_content = self.content.arity as usize;
        let mut out = Vec::new();
        for f in 0..n_flag {
            let mut weight: Option<Rational> = None;
            for zi in 0..n_in {
                let w: Rational = (0..n_content)
                    .map(|c| self.table[zi][c * n_flag + f].clone())
                    .fold(q0(), |acc, p| acc + p);
                match &weight {
                    None => weight = Some(w),
                    Some(prev) if *prev != w => return None,
                    _ => {}
                }
            }
            let w = weight.unwrap();
            if w.is_zero() {
                continue;
            }
            // matrix[z][c]
            let matrix: Vec<Vec<Rational>> = (0..n_in)
                .map(|zi| {
                    (0..n_content)
                        .map(|c| self.table[zi][c * n_flag + f].clone() / w.clone())
                        .collect()
                })
                .collect();
            out.push((w, matrix));
        }
        Some(out)
    }
}

impl std::fmt::Display for ClassicalChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let n_flag = self.n_flag_assignments();
        writeln!(
            f,
            "channel {} -> ({}; flags {})",
            self.input.name,
            self.content.name,
            self.flags
                .iter()
                .map(|v| v.name.clone())
                .collect::<Vec<_>>()
                .join(",")
        )?;
        for zi in 0..self.input.arity as usize {
            let mut parts = Vec::new();
            for sym in 0..self.n_symbols() {
                let p = &self.table[zi][sym];
                if p.is_zero() {
                    continue;
                }
                let c = sym / n_flag;
                let flag_vals = values_of(&self.flags, sym % n_flag);
                let flag_str: Vec<String> = self
                    .flags
                    .iter()
                    .zip(&flag_vals)
                    .map(|(v, val)| format!("{}={}", v.name, val))
                    .collect();
                parts.push(format!(
                    "{}={} {}: {}",
                    self.content.name,
                    c,
                    flag_str.join(" "),
                    fmt_frac(p)
                ));
            }
            writeln!(f, "  {}={} -> {}", self.input.name, zi, parts.join(", "))?;
        }
        Ok(())
    }
}

// --- canonical channels ------------------------------------------------------

/// Erasure channel with explicit flag: flag 0 (prob 1-eps) delivers the input
/// intact; flag 1 (prob eps) outputs an uninformative uniform bit.
pub fn erasure(eps: &Rational) -> Result<ClassicalChannel> {
    if eps < &q0() || eps > &q1() {
        return Err(Error::Precondition(format!(
            "erasure probability must lie in [0,1], got {eps}"
        )));
    }
    let keep = q1() - eps.clone();
    let z = VariableSpec::bit("z");
    let w = VariableSpec::bit("w");
    let g = VariableSpec::bit("g");
    // symbol = w * 2 + g
    let mut table = vec![vec![q0(); 4]; 2];
    for zi in 0..2usize {
        table[zi][zi * 2] = keep.clone();
        table[zi][1] += eps.clone() * half();
        table[zi][3] += eps.clone() * half();
    }
    ClassicalChannel::new(z, w, vec![g], table)
}

/// The amplitude-damping channel of the deterministic-strategy analysis:
/// flag 0: input 0 passes surely, input 1 randomized; flag 1: mirrored.
pub fn table_ii_amplitude_damping() -> ClassicalChannel {
    let z = VariableSpec::bit("z");
    let w = VariableSpec::bit("w");
    let g = VariableSpec::bit("g");
    // symbol = w * 2 + g; flags equally weighted
    let mut table = vec![vec![q0(); 4]; 2];
    // flag 0: 0 -> 0 surely; 1 -> uniform
    table[0][0] = half(); // z=0: w=0,g=0 with the branch weight 1/2
    table[1][0] = q(1, 4);
    table[1][2] = q(1, 4);
    // flag 1: 1 -> 1 surely; 0 -> uniform
    table[1][3] += half();
    table[0][1] = q(1, 4);
    table[0][3] = q(1, 4);
    ClassicalChannel::new(z, w, vec![g], table).expect("valid amplitude damping table")
}

/// Depolarizing channel: input delivered with probability `deliver`, uniform
/// noise otherwise; flag uninformative uniform.
pub fn depolarizing(deliver: &Rational) -> Result<ClassicalChannel> {
    if deliver < &q0() || deliver > &q1() {
        return Err(Error::Precondition("deliver probability out of range".into()));
    }
    let z = VariableSpec::bit("z");
    let w = VariableSpec::bit("w");
    let g = VariableSpec::bit("g");
    let p_same = deliver.clone() + (q1() - deliver.clone()) * half();
    let p_flip = q1() - p_same.clone();
    let mut table = vec![vec![q0(); 4]; 2];
    for zi in 0..2usize {
        for w_val in 0..2usize {
            let p = if w_val == zi { p_same.clone() } else { p_flip.clone() };
            table[zi][w_val * 2] = p.clone() * half();
            table[zi][w_val * 2 + 1] = p * half();
        }
    }
    ClassicalChannel::new(z, w, vec![g], table)
}

/// The flag-relabeling postprocessing that turns the 1/2-erasure channel into
/// the two equally weighted amplitude-damping branches: on the intact flag,
/// re-flag uniformly and keep the content; on the erased flag, draw a fresh
/// uniform flag and output the flag value itself as content.
pub fn erasure_to_amplitude_damping_map() -> Vec<Vec<Rational>> {
    // erasure symbols: (w, g) with symbol = w*2+g; targets likewise
    let mut map = vec![vec![q0(); 4]; 4];
    for w in 0..2usize {
        // intact symbol (w, g=0): keep w, uniform new flag
        map[w * 2][w * 2] = half();
        map[w * 2][w * 2 + 1] = half();
        // erased symbol (w, g=1): new flag g'' uniform, content = g''
        map[w * 2 + 1][0] = half(); // (0, 0)
        map[w * 2 + 1][3] = half(); // (1, 1)
    }
    map
}

// --- classification ----------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ChannelKind {
    Erasure,
    AmplitudeDamping,
    Depolarizing,
    ZeroCapacity,
    Other,
}

impl std::fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ChannelKind::Erasure => "erasure",
            ChannelKind::AmplitudeDamping => "amplitude_damping",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::ZeroCapacity => "zero_capacity",
            ChannelKind::Other => "other",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelClass {
    pub kind: ChannelKind,
    pub parameter: Rational,
}

impl std::fmt::Display for ChannelClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            ChannelKind::ZeroCapacity | ChannelKind::Other => write!(f, "{}", self.kind),
            _ => write!(f, "{}({})", self.kind, fmt_frac(&self.parameter)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BranchKind {
    Noise,
    Reveal,
    AmpDamp,
    Bsc, // nontrivial symmetric crossover
    Mixed,
}

/// Kind of a single flag branch, bit-flip invariant. Returns the BSC
/// crossover (canonicalized <= 1/2) when applicable.
fn branch_kind(m: &[Vec<Rational>]) -> (BranchKind, Option<Rational>) {
    let c0 = &m[0];
    let c1 = &m[1];
    if c0 == c1 {
        return (BranchKind::Noise, None);
    }
    let is_delta = |c: &Vec<Rational>| -> Option<u8> {
        if c[0].is_one() {
            Some(0)
        } else if c[1].is_one() {
            Some(1)
        } else {
            None
        }
    };
    let uniform = |c: &Vec<Rational>| c[0] == half() && c[1] == half();
    match (is_delta(c0), is_delta(c1)) {
        (Some(_), Some(_)) => return (BranchKind::Reveal, None), // distinct deltas (equal handled above)
        (Some(_), None) if uniform(c1) => return (BranchKind::AmpDamp, None),
        (None, Some(_)) if uniform(c0) => return (BranchKind::AmpDamp, None),
        _ => {}
    }
    // symmetric crossover: c0 = (1-l, l), c1 = (l, 1-l)
    if c0[0] == c1[1] && c0[1] == c1[0] {
        let lambda = std::cmp::min(c0[1].clone(), c0[0].clone());
        return (BranchKind::Bsc, Some(lambda));
    }
    (BranchKind::Mixed, None)
}

/// Exact pattern classification after canonicalization (flag branches with
/// identical conditional matrices are merged, order-insensitive).
pub fn classify_channel(ch: &ClassicalChannel) -> ChannelClass {
    if ch.input.arity != 2 || ch.content.arity != 2 {
        return ChannelClass {
            kind: ChannelKind::Other,
            parameter: q0(),
        };
    }
    let Some(raw) = ch.branches() else {
        // flag statistics depend on the input: no flag-conditioned pattern
        return ChannelClass {
            kind: ChannelKind::Other,
            parameter: q0(),
        };
    };
    // merge duplicate matrices
    let mut merged: Vec<(Rational, Vec<Vec<Rational>>)> = Vec::new();
    for (w, m) in raw {
        if let Some(slot) = merged.iter_mut().find(|(_, mm)| *mm == m) {
            slot.0 += w;
        } else {
            merged.push((w, m));
        }
    }
    let kinds: Vec<(Rational, BranchKind, Option<Rational>)> = merged
        .iter()
        .map(|(w, m)| {
            let (k, l) = branch_kind(m);
            (w.clone(), k, l)
        })
        .collect();
    if kinds.iter().all(|(_, k, _)| *k == BranchKind::Noise) {
        return ChannelClass {
            kind: ChannelKind::ZeroCapacity,
            parameter: q0(),
        };
    }
    if kinds
        .iter()
        .all(|(_, k, _)| matches!(k, BranchKind::Noise | BranchKind::Reveal))
    {
        let eps: Rational = kinds
            .iter()
            .filter(|(_, k, _)| *k == BranchKind::Noise)
            .fold(q0(), |acc, (w, _, _)| acc + w.clone());
        return ChannelClass {
            kind: ChannelKind::Erasure,
            parameter: eps,
        };
    }
    if kinds
        .iter()
        .all(|(_, k, _)| matches!(k, BranchKind::Noise | BranchKind::Reveal | BranchKind::AmpDamp))
        && kinds.iter().any(|(_, k, _)| *k == BranchKind::AmpDamp)
    {
        return ChannelClass {
            kind: ChannelKind::AmplitudeDamping,
            parameter: half(),
        };
    }
    if kinds.iter().all(|(_, k, _)| *k == BranchKind::Bsc) {
        let lambda = kinds[0].2.clone().unwrap();
        if kinds.iter().all(|(_, _, l)| l.as_ref() == Some(&lambda)) {
            return ChannelClass {
                kind: ChannelKind::Depolarizing,
                parameter: q1() - q(2, 1) * lambda,
            };
        }
    }
    ChannelClass {
        kind: ChannelKind::Other,
        parameter: q0(),
    }
}

// --- postprocessing feasibility ----------------------------------------------

/// Can `ch` be written as a postprocessing T of Erasure(eps)? Binary-input
/// channels only. Decided exactly: eliminating T reduces feasibility to
/// sum_o min_z p(o|z) >= eps. A witness map is reconstructed and re-verified
/// by exact composition, so a `true` answer is always certified.
pub fn is_postprocessing_of_erasure(ch: &ClassicalChannel, eps: &Rational) -> Result<bool> {
    Ok(erasure_postprocessing_witness(ch, eps)?.is_some())
}

/// The certifying witness: rows indexed by the erasure symbols (w, g) of
/// `erasure(eps)`, columns by `ch`'s output symbols.
pub fn erasure_postprocessing_witness(
    ch: &ClassicalChannel,
    eps: &Rational,
) -> Result<Option<Vec<Vec<Rational>>>> {
    if ch.input.arity != 2 {
        return Err(Error::Signature(
            "erasure postprocessing check needs a binary-input channel".into(),
        ));
    }
    if eps < &q0() || eps > &q1() {
        return Err(Error::Precondition("eps out of range".into()));
    }
    let n_sym = ch.n_symbols();
    let mins: Vec<Rational> = (0..n_sym)
        .map(|o| std::cmp::min(ch.table[0][o].clone(), ch.table[1][o].clone()))
        .collect();
    let total: Rational = mins.iter().fold(q0(), |acc, m| acc + m.clone());
    if total < *eps {
        return Ok(None);
    }
    // q(o) = share of the erased symbol routed to o; q <= min/eps, sum 1
    let erased_row: Vec<Rational> = if eps.is_zero() {
        // unused row; any distribution works
        let mut row = vec![q0(); n_sym];
        row[0] = q1();
        row
    } else if total.is_zero() {
        unreachable!("total >= eps > 0")
    } else {
        mins.iter().map(|m| m.clone() / total.clone()).collect()
    };
    let keep = q1() - eps.clone();
    let mut witness = vec![vec![q0(); n_sym]; 4];
    for (zi, row) in [0usize, 1].iter().map(|&zi| (zi, zi * 2)) {
        for o in 0..n_sym {
            let num = ch.table[zi][o].clone() - eps.clone() * erased_row[o].clone();
            debug_assert!(num >= q0());
            witness[row][o] = if keep.is_zero() {
                if o == 0 {
                    q1()
                } else {
                    q0()
                }
            } else {
                num / keep.clone()
            };
        }
    }
    // both erased symbols (w=0,g=1) and (w=1,g=1) route identically
    witness[1] = erased_row.clone();
    witness[3] = erased_row;
    // certify: composing the map with the erasure channel reproduces ch exactly
    let base = erasure(eps)?;
    let rebuilt = base.postprocess(ch.content.clone(), ch.flags.clone(), &witness)?;
    if rebuilt.table != ch.table {
        return Err(Error::InvalidDistribution(
            "internal: reconstructed witness failed certification".into(),
        ));
    }
    Ok(Some(witness))
}

/// General exact feasibility: does a row-stochastic T with ch = T ∘ base
/// exist? Solved by an exact-rational phase-1 simplex (Bland's rule).
pub fn is_postprocessing_of(ch: &ClassicalChannel, base: &ClassicalChannel) -> Result<bool> {
    if ch.input.arity != base.input.arity {
        return Err(Error::Signature("input arities differ".into()));
    }
    let n_in = ch.input.arity as usize;
    let ns = base.n_symbols();
    let no = ch.n_symbols();
    // variables t[s][o] flattened s*no + o
    let n_vars = ns * no;
    let mut a: Vec<Vec<Rational>> = Vec::new();
    let mut b: Vec<Rational> = Vec::new();
    for zi in 0..n_in {
        for o in 0..no {
            let mut row = vec![q0(); n_vars];
            for s in 0..ns {
                row[s * no + o] = base.table[zi][s].clone();
            }
            a.push(row);
            b.push(ch.table[zi][o].clone());
        }
    }
    for s in 0..ns {
        let mut row = vec![q0(); n_vars];
        for o in 0..no {
            row[s * no + o] = q1();
        }
        a.push(row);
        b.push(q1());
    }
    Ok(lp_feasible(a, b))
}

/// Exact phase-1 simplex feasibility for A x = b, x >= 0 (b >= 0 assumed
/// after sign normalization). Bland's rule, so it terminates.
fn lp_feasible(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> bool {
    let m = a.len();
    let n = if m > 0 { a[0].len() } else { 0 };
    for i in 0..m {
        if b[i] < q0() {
            b[i] = -b[i].clone();
            for v in &mut a[i] {
                *v = -v.clone();
            }
        }
    }
    // tableau columns: n structural + m artificial + rhs
    let width = n + m + 1;
    let mut t: Vec<Vec<Rational>> = (0..m)
        .map(|i| {
            let mut row = vec![q0(); width];
            row[..n].clone_from_slice(&a[i]);
            row[n + i] = q1();
            row[width - 1] = b[i].clone();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..m).map(|i| n + i).collect();
    loop {
        // reduced cost of column j (phase-1): sum over rows with artificial
        // cost 1 in basis minus own cost
        let mut entering: Option<usize> = None;
        'cols: for j in 0..n + m {
            if basis.contains(&j) {
                continue;
            }
            let mut red = q0();
            for i in 0..m {
                if basis[i] >= n {
                    red += t[i][j].clone();
                }
            }
            let own_cost = if j >= n { q1() } else { q0() };
            if red > own_cost {
                entering = Some(j);
                break 'cols; // Bland: lowest index
            }
        }
        let Some(j) = entering else {
            // optimal: feasible iff no artificial remains with positive value
            return (0..m).all(|i| basis[i] < n || t[i][width - 1].is_zero());
        };
        // ratio test with Bland tie-breaking on basis index
        let mut leave: Option<usize> = None;
        let mut best: Option<Rational> = None;
        for i in 0..m {
            if t[i][j] > q0() {
                let ratio = t[i][width - 1].clone() / t[i][j].clone();
                let better = match &best {
                    None => true,
                    Some(bst) => {
                        ratio < *bst || (ratio == *bst && basis[i] < basis[leave.unwrap()])
                    }
                };
                if better {
                    best = Some(ratio);
                    leave = Some(i);
                }
            }
        }
        let Some(r) = leave else {
            // unbounded phase-1 cannot happen; treat as infeasible defensively
            return false;
        };
        // pivot on (r, j)
        let piv = t[r][j].clone();
        for v in &mut t[r] {
            *v = v.clone() / piv.clone();
        }
        for i in 0..m {
            if i != r && !t[i][j].is_zero() {
                let factor = t[i][j].clone();
                for k in 0..width {
                    let delta = factor.clone() * t[r][k].clone();
                    t[i][k] -= delta;
                }
            }
        }
        basis[r] = j;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_channel() -> ClassicalChannel {
        let z = VariableSpec::bit("z");
        let w = VariableSpec::bit("w");
        let g = VariableSpec::bit("g");
        let mut table = vec![vec![q0(); 4]; 2];
        table[0][0] = q1(); // w=0, g=0
        table[1][2] = q1(); // w=1, g=0
        ClassicalChannel::new(z, w, vec![g], table).unwrap()
    }

    fn constant_channel() -> ClassicalChannel {
        let z = VariableSpec::bit("z");
        let w = VariableSpec::bit("w");
        let mut table = vec![vec![q0(); 2]; 2];
        table[0][0] = q1();
        table[1][0] = q1();
        ClassicalChannel::new(z, w, vec![], table).unwrap()
    }

    #[test]
    fn classify_canonical_channels() {
        let e = erasure(&half()).unwrap();
        let c = classify_channel(&e);
        assert_eq!(c.kind, ChannelKind::Erasure);
        assert_eq!(c.parameter, half());

        let ad = table_ii_amplitude_damping();
        assert_eq!(classify_channel(&ad).kind, ChannelKind::AmplitudeDamping);

        let dp = depolarizing(&half()).unwrap();
        let c = classify_channel(&dp);
        assert_eq!(c.kind, ChannelKind::Depolarizing);
        assert_eq!(c.parameter, half());

        assert_eq!(classify_channel(&constant_channel()).kind, ChannelKind::ZeroCapacity);
        let c = classify_channel(&identity_channel());
        assert_eq!(c.kind, ChannelKind::Erasure);
        assert_eq!(c.parameter, q0());
    }

    #[test]
    fn erasure_postprocessing_closed_form() {
        let e = erasure(&half()).unwrap();
        assert!(is_postprocessing_of_erasure(&e, &half()).unwrap());
        // amplitude damping obtainable from the 1/2 erasure channel
        assert!(is_postprocessing_of_erasure(&table_ii_amplitude_damping(), &half()).unwrap());
        // depolarizing(1/2) likewise
        assert!(is_postprocessing_of_erasure(&depolarizing(&half()).unwrap(), &half()).unwrap());
        // the identity channel has capacity 1 > 1/2: infeasible
        assert!(!is_postprocessing_of_erasure(&identity_channel(), &half()).unwrap());
        // zero capacity always feasible
        assert!(is_postprocessing_of_erasure(&constant_channel(), &half()).unwrap());
    }

    #[test]
    fn erasure_monotonicity() {
        // erasure(eps) is a postprocessing of erasure(eps') for eps >= eps'
        let e34 = erasure(&q(3, 4)).unwrap();
        assert!(is_postprocessing_of_erasure(&e34, &half()).unwrap());
        let e14 = erasure(&q(1, 4)).unwrap();
        assert!(!is_postprocessing_of_erasure(&e14, &half()).unwrap());
    }

    #[test]
    fn closed_form_matches_simplex() {
        let base = erasure(&half()).unwrap();
        for ch in [
            erasure(&q(1, 4)).unwrap(),
            erasure(&q(3, 4)).unwrap(),
            table_ii_amplitude_damping(),
            depolarizing(&half()).unwrap(),
            depolarizing(&q(3, 4)).unwrap(),
            identity_channel(),
            constant_channel(),
        ] {
            let closed = is_postprocessing_of_erasure(&ch, &half()).unwrap();
            let lp = is_postprocessing_of(&ch, &base).unwrap();
            assert_eq!(closed, lp, "disagreement on {ch}");
        }
    }

    #[test]
    fn relabeling_construction_reproduces_amplitude_damping() {
        let e = erasure(&half()).unwrap();
        let map = erasure_to_amplitude_damping_map();
        let rebuilt = e
            .postprocess(VariableSpec::bit("w"), vec![VariableSpec::bit("g")], &map)
            .unwrap();
        assert_eq!(rebuilt.table(), table_ii_amplitude_damping().table());
    }

    #[test]
    fn capacity_cross_check() {
        // every channel accepted at eps = 1/2 has uniform-input MI <= 1/2
        for ch in [
            erasure(&half()).unwrap(),
            erasure(&q(3, 4)).unwrap(),
            table_ii_amplitude_damping(),
            depolarizing(&half()).unwrap(),
            constant_channel(),
        ] {
            assert!(is_postprocessing_of_erasure(&ch, &half()).unwrap());
            let mi = ch.uniform_mutual_information().unwrap();
            assert!(mi <= 0.5 + 1e-12, "MI {mi} for {ch}");
        }
    }

    #[test]
    fn erasure_mi_is_one_half() {
        let e = erasure(&half()).unwrap();
        let mi = e.uniform_mutual_information().unwrap();
        assert!((mi - 0.5).abs() < 1e-12);
    }
}
