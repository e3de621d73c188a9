//! Shannon quantities over exact joints and the information-theoretic
//! verifications: guessed information, the CHSH rephrasing, the single-wire
//! tripartite bound and the 1/2-bit message bound.
//!
//! Probability algebra stays exact; floating point enters only at the log.

use crate::joint::JointDistribution;
use crate::rational::{q, to_f64, Rational};
use crate::{Error, Result};
use num::Zero;
use serde::Serialize;

pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// One verified quantity against its bound.
#[derive(Debug, Clone, Serialize)]
pub struct InfoReport {
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

impl InfoReport {
    fn upper_bound(quantity: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            bound,
            satisfied: value <= bound + tol,
            slack: bound - value,
        }
    }
}

impl std::fmt::Display for InfoReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: value={:.12} bound={:.12} slack={:.3e} [{}]",
            self.quantity,
            self.value,
            self.bound,
            self.slack,
            if self.satisfied { "ok" } else { "VIOLATED" }
        )
    }
}

fn h_of_marginal(d: &JointDistribution, vars: &[&str]) -> Result<f64> {
    if vars.is_empty() {
        return Ok(0.0);
    }
    let m = d.marginal(vars)?;
    let mut h = 0.0;
    for p in m.probs() {
        if !p.is_zero() {
            let p = to_f64(p);
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// H(vars | given) in bits, 0 log 0 = 0.
pub fn entropy(d: &JointDistribution, vars: &[&str], given: &[&str]) -> Result<f64> {
    check_disjoint(&[vars, given])?;
    let both: Vec<&str> = vars.iter().chain(given).copied().collect();
    Ok(h_of_marginal(d, &both)? - h_of_marginal(d, given)?)
}

/// I(s : t | given) in bits.
pub fn mutual_information(
    d: &JointDistribution,
    s: &[&str],
    t: &[&str],
    given: &[&str],
) -> Result<f64> {
    check_disjoint(&[s, t, given])?;
    Ok(entropy(d, s, given)? + entropy(d, t, given)? - entropy(d, &union(s, t), given)?)
}

/// I(s : t : u | given) = H(s|g) + H(t|g) + H(u|g) - H(stu|g).
pub fn tripartite_information(
    d: &JointDistribution,
    s: &[&str],
    t: &[&str],
    u: &[&str],
    given: &[&str],
) -> Result<f64> {
    check_disjoint(&[s, t, u, given])?;
    let stu = union(&union(s, t), u);
    Ok(entropy(d, s, given)? + entropy(d, t, given)? + entropy(d, u, given)?
        - entropy(d, &stu, given)?)
}

/// Guessed information J(from -> to): the expected maximal posterior
/// probability of guessing `to` after seeing `from`. Exact:
/// J = sum_i max_j p(from = i, to = j).
pub fn guessed_information(
    d: &JointDistribution,
    from: &[&str],
    to: &[&str],
) -> Result<Rational> {
    check_disjoint(&[from, to])?;
    let all: Vec<&str> = from.iter().chain(to).copied().collect();
    let m = d.marginal(&all)?;
    let n_to: usize = to
        .iter()
        .map(|n| {
            let p = crate::vars::position(m.vars(), n).expect("var present");
            m.vars()[p].arity as usize
        })
        .product();
    let n_from = m.probs().len() / n_to.max(1);
    let mut j = q(0, 1);
    for i in 0..n_from {
        let mut best = q(0, 1);
        for k in 0..n_to {
            let p = &m.probs()[i * n_to + k];
            if *p > best {
                best = p.clone();
            }
        }
        j += best;
    }
    Ok(j)
}

fn union<'a>(a: &[&'a str], b: &[&'a str]) -> Vec<&'a str> {
    a.iter().chain(b).copied().collect()
}

fn check_disjoint(groups: &[&[&str]]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for g in groups {
        for n in *g {
            if !seen.insert(*n) {
                return Err(Error::Signature(format!(
                    "variable sets must be disjoint, `{n}` repeated"
                )));
            }
        }
    }
    Ok(())
}

/// CHSH rephrased through guessed information, unconditioned form:
/// 1/2 J(view -> a) + 1/2 J(view -> a XOR x) <= 3/4.
/// The joint must contain `a` and `x`; `view` is the guесser's knowledge.
pub fn chsh_guessed(d: &JointDistribution, view: &[&str]) -> Result<(Rational, InfoReport)> {
    let with_ax = d.with_xor_column("__ax", &["a", "x"])?;
    let j_a = guessed_information(&with_ax, view, &["a"])?;
    let j_ax = guessed_information(&with_ax, view, &["__ax"])?;
    let lhs = (j_a + j_ax) / q(2, 1);
    let report = InfoReport::upper_bound(
        format!("chsh_guessed({})", view.join(",")),
        to_f64(&lhs),
        0.75,
        0.0,
    );
    Ok((lhs, report))
}

/// CHSH rephrased with the guesses conditioned on Bob's setting:
/// 1/2 J(view | y=0 -> a) + 1/2 J(view | y=1 -> a XOR x) <= 3/4.
pub fn chsh_guessed_conditioned(
    d: &JointDistribution,
    view: &[&str],
) -> Result<(Rational, InfoReport)> {
    let d0 = d
        .condition(&[("y", 0)])?
        .ok_or_else(|| Error::Precondition("p(y=0) = 0".into()))?;
    let d1 = d
        .condition(&[("y", 1)])?
        .ok_or_else(|| Error::Precondition("p(y=1) = 0".into()))?;
    let j_a = guessed_information(&d0, view, &["a"])?;
    let d1 = d1.with_xor_column("__ax", &["a", "x"])?;
    let j_ax = guessed_information(&d1, view, &["__ax"])?;
    let lhs = (j_a + j_ax) / q(2, 1);
    let report = InfoReport::upper_bound(
        format!("chsh_guessed_conditioned({})", view.join(",")),
        to_f64(&lhs),
        0.75,
        0.0,
    );
    Ok((lhs, report))
}

/// Perfect-guessing equalities forced by perfect PR-correlations:
///   I(bt : a XOR x | yt, s, y = 1) = H(a XOR x | yt, s, y = 1)
///   I(bt : a       | yt, s, y = 0) = H(a       | yt, s, y = 0)
/// `bt`/`yt` name Bob's box output and box input; `s` the shared variable
/// (may be absent). Reports slack; equality checked to 1e-12.
#[derive(Debug, Clone, Serialize)]
pub struct PerfectGuessReport {
    pub y1_mutual: f64,
    pub y1_entropy: f64,
    pub y0_mutual: f64,
    pub y0_entropy: f64,
    pub holds: bool,
    pub max_gap: f64,
}

pub fn verify_lemma4(
    d: &JointDistribution,
    bt: &str,
    yt: &str,
    s_vars: &[&str],
) -> Result<PerfectGuessReport> {
    let d1 = d
        .condition(&[("y", 1)])?
        .ok_or_else(|| Error::Precondition("p(y=1) = 0".into()))?
        .with_xor_column("__ax", &["a", "x"])?;
    let given: Vec<&str> = std::iter::once(yt).chain(s_vars.iter().copied()).collect();
    let y1_mutual = mutual_information(&d1, &[bt], &["__ax"], &given)?;
    let y1_entropy = entropy(&d1, &["__ax"], &given)?;
    let d0 = d
        .condition(&[("y", 0)])?
        .ok_or_else(|| Error::Precondition("p(y=0) = 0".into()))?;
    let y0_mutual = mutual_information(&d0, &[bt], &["a"], &given)?;
    let y0_entropy = entropy(&d0, &["a"], &given)?;
    let gap1 = (y1_mutual - y1_entropy).abs();
    let gap0 = (y0_mutual - y0_entropy).abs();
    Ok(PerfectGuessReport {
        y1_mutual,
        y1_entropy,
        y0_mutual,
        y0_entropy,
        holds: gap1 <= IDENTITY_TOLERANCE && gap0 <= IDENTITY_TOLERANCE,
        max_gap: gap1.max(gap0),
    })
}

/// Single-bit-wire bound: I(S:T|V) + I(T:U|V) <= I(S:U|V) + I(T:SU|V),
/// together with the strong-subadditivity form it rests on,
/// H(STU|V) + H(T|V) <= H(ST|V) + H(TU|V).
pub fn verify_lemma5(
    d: &JointDistribution,
    s: &[&str],
    t: &[&str],
    u: &[&str],
    v: &[&str],
) -> Result<(InfoReport, InfoReport)> {
    check_disjoint(&[s, t, u, v])?;
    let lhs = mutual_information(d, s, t, v)? + mutual_information(d, t, u, v)?;
    let rhs = mutual_information(d, s, u, v)? + mutual_information(d, t, &union(s, u), v)?;
    let ineq = InfoReport::upper_bound("I(S:T|V)+I(T:U|V) <= I(S:U|V)+I(T:SU|V)", lhs, rhs, IDENTITY_TOLERANCE);
    let ssa_lhs = entropy(d, &union(&union(s, t), u), v)? + entropy(d, t, v)?;
    let ssa_rhs = entropy(d, &union(s, t), v)? + entropy(d, &union(t, u), v)?;
    let ssa = InfoReport::upper_bound("H(STU|V)+H(T|V) <= H(ST|V)+H(TU|V)", ssa_lhs, ssa_rhs, IDENTITY_TOLERANCE);
    Ok((ineq, ssa))
}

/// Also asserts the identity in the tripartite definition:
/// I(S:U|V) + I(T:SU|V) = I(S:T:U|V).
pub fn tripartite_identity_gap(
    d: &JointDistribution,
    s: &[&str],
    t: &[&str],
    u: &[&str],
    v: &[&str],
) -> Result<f64> {
    let a = mutual_information(d, s, u, v)? + mutual_information(d, t, &union(s, u), v)?;
    let b = tripartite_information(d, s, t, u, v)?;
    Ok((a - b).abs())
}

/// The correlation/communication trade-off inequality:
/// 1/2 I(a^x : bt | yt,s,y=1) + 1/2 I(a : bt | yt,s,y=0) + I(z : bt | yt,s,y)
///   <= 1/2 I(a : a^x : z | yt,s) + H(bt | yt,s,y).
/// Precondition: x, z, y, s mutually independent.
pub fn verify_theorem4(
    d: &JointDistribution,
    bt: &str,
    yt: &str,
    s_vars: &[&str],
) -> Result<InfoReport> {
    let mut indep_groups: Vec<&[&str]> = vec![&["x"], &["z"], &["y"]];
    let s_group: Vec<&str> = s_vars.to_vec();
    if !s_group.is_empty() {
        indep_groups.push(&s_group);
    }
    if !d.mutually_independent(&indep_groups)? {
        return Err(Error::Precondition(
            "x, z, y, s must be mutually independent".into(),
        ));
    }
    let dx = d.with_xor_column("__ax", &["a", "x"])?;
    let given: Vec<&str> = std::iter::once(yt).chain(s_vars.iter().copied()).collect();
    let given_y: Vec<&str> = given.iter().copied().chain(["y"]).collect();

    let d1 = dx
        .condition(&[("y", 1)])?
        .ok_or_else(|| Error::Precondition("p(y=1) = 0".into()))?;
    let d0 = dx
        .condition(&[("y", 0)])?
        .ok_or_else(|| Error::Precondition("p(y=0) = 0".into()))?;
    let p1 = to_f64(&dx.prob_of(&[("y", 1)])?);
    let p0 = 1.0 - p1;

    let lhs = 0.5 * mutual_information(&d1, &["__ax"], &[bt], &given)?
        + 0.5 * mutual_information(&d0, &["a"], &[bt], &given)?
        + mutual_information(&dx, &["z"], &[bt], &given_y)?;
    let rhs = 0.5 * tripartite_information(&dx, &["a"], &["__ax"], &["z"], &given)?
        + entropy(&dx, &[bt], &given_y)?;
    let _ = (p0, p1);
    Ok(InfoReport::upper_bound("theorem4_dependence", lhs, rhs, IDENTITY_TOLERANCE))
}

/// The message bound I(z : bt, yt, y, s) for a single strategy joint.
pub fn theorem3_information(
    d: &JointDistribution,
    bt: &str,
    yt: &str,
    s_vars: &[&str],
) -> Result<f64> {
    let view: Vec<&str> = [bt, yt, "y"]
        .into_iter()
        .chain(s_vars.iter().copied())
        .collect();
    mutual_information(d, &["z"], &view, &[])
}

/// Proof-step trace for the message bound: each intermediate quantity the
/// chain-rule argument touches, for auditing a single joint.
pub fn theorem3_trace(
    d: &JointDistribution,
    bt: &str,
    yt: &str,
    s_vars: &[&str],
) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    let s_disp = if s_vars.is_empty() { String::new() } else { format!(",{}", s_vars.join(",")) };
    let view: Vec<&str> = [bt, yt, "y"].into_iter().chain(s_vars.iter().copied()).collect();
    out.push((format!("I(z:{bt},{yt},y{s_disp})"), mutual_information(d, &["z"], &view, &[])?));
    let yys: Vec<&str> = [yt, "y"].into_iter().chain(s_vars.iter().copied()).collect();
    out.push((format!("I(z:y,{yt}{s_disp})"), mutual_information(d, &["z"], &yys, &[])?));
    let given: Vec<&str> = [yt, "y"].into_iter().chain(s_vars.iter().copied()).collect();
    out.push((
        format!("I(z:{bt}|{yt}{s_disp},y)"),
        mutual_information(d, &["z"], &[bt], &given)?,
    ));
    let s_only: Vec<&str> = s_vars.to_vec();
    out.push(("H(z|s)".to_string(), entropy(d, &["z"], &s_only)?));
    out.push(("H(z)".to_string(), entropy(d, &["z"], &[])?));
    Ok(out)
}

/// Exhaustive check of the guessed-information CHSH bound over the no-box
/// classical deterministic strategies: a = f(x, s) with a two-valued shared
/// s, Bob guessing from s alone. All 16 maps must satisfy LHS <= 3/4 and the
/// bound is attained.
#[derive(Debug, Clone, Serialize)]
pub struct ChshFamilyReport {
    pub strategies: usize,
    pub all_within_bound: bool,
    pub max_lhs: String,
    pub attained: bool,
}

pub fn verify_chsh_no_box_family() -> Result<ChshFamilyReport> {
    use crate::vars::VariableSpec;
    let vars = vec![
        VariableSpec::bit("x"),
        VariableSpec::bit("s"),
        VariableSpec::bit("a"),
    ];
    let mut max_lhs = q(0, 1);
    let mut all_ok = true;
    let bound = q(3, 4);
    for f in 0u8..16 {
        // a = f(x, s), bit index x*2 + s; x and s uniform
        let mut probs = vec![q(0, 1); 8];
        for x in 0..2u8 {
            for s in 0..2u8 {
                let a = (f >> (x * 2 + s)) & 1;
                probs[((x << 2) | (s << 1) | a) as usize] = q(1, 4);
            }
        }
        let d = JointDistribution::new(vars.clone(), probs)?;
        let (lhs, report) = chsh_guessed(&d, &["s"])?;
        all_ok &= report.satisfied;
        if lhs > max_lhs {
            max_lhs = lhs;
        }
    }
    Ok(ChshFamilyReport {
        strategies: 16,
        all_within_bound: all_ok,
        attained: max_lhs == bound,
        max_lhs: crate::rational::fmt_frac(&max_lhs),
    })
}

/// Seeded random joint over `n` binary variables: integer weights 0..=100 per
/// cell, renormalized; boundary (zero) cells appear naturally.
pub fn random_joint(rng: &mut impl rand::Rng, names: &[&str]) -> JointDistribution {
    use crate::vars::VariableSpec;
    let vars: Vec<VariableSpec> = names.iter().map(|n| VariableSpec::bit(*n)).collect();
    loop {
        let weights: Vec<i64> = (0..1usize << names.len())
            .map(|_| rng.gen_range(0..=100))
            .collect();
        let total: i64 = weights.iter().sum();
        if total == 0 {
            continue;
        }
        let probs: Vec<Rational> = weights.iter().map(|&w| q(w, total)).collect();
        return JointDistribution::new(vars, probs).expect("normalized by construction");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::half;
    use crate::vars::VariableSpec;
    use rand::SeedableRng;

    fn bit(name: &str) -> VariableSpec {
        VariableSpec::bit(name)
    }

    fn uniform(names: &[&str]) -> JointDistribution {
        let vars: Vec<VariableSpec> = names.iter().map(|n| bit(n)).collect();
        let n = 1usize << names.len();
        JointDistribution::new(vars, vec![q(1, n as i64); n]).unwrap()
    }

    #[test]
    fn entropy_basics() {
        let d = uniform(&["u"]);
        assert!((entropy(&d, &["u"], &[]).unwrap() - 1.0).abs() < 1e-15);
        let det = JointDistribution::new(vec![bit("u")], vec![q(1, 1), q(0, 1)]).unwrap();
        assert_eq!(entropy(&det, &["u"], &[]).unwrap(), 0.0);
        // H(z | s) = H(z) = 1 for independent uniform z
        let d = uniform(&["z", "s"]);
        assert!((entropy(&d, &["z"], &["s"]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_basics() {
        let d = uniform(&["u", "v"]);
        assert!(mutual_information(&d, &["u"], &["v"], &[]).unwrap().abs() < 1e-15);
        // perfectly correlated copy
        let d = uniform(&["u"]).with_xor_column("w", &["u"]).unwrap();
        assert!((mutual_information(&d, &["u"], &["w"], &[]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn erasure_half_mutual_information() {
        // z uniform through a 1/2-erasure channel: output (w, flag g);
        // g=0: w=z, g=1: w uniform noise
        let vars = vec![bit("z"), bit("w"), bit("g")];
        let mut probs = vec![q(0, 1); 8];
        for z in 0..2usize {
            // g = 0: w = z, weight 1/4
            probs[(z << 2) | (z << 1)] += q(1, 4);
            // g = 1: w uniform, weight 1/8 each
            for w in 0..2usize {
                probs[(z << 2) | (w << 1) | 1] += q(1, 8);
            }
        }
        let d = JointDistribution::new(vars, probs).unwrap();
        let i = mutual_information(&d, &["z"], &["w", "g"], &[]).unwrap();
        assert!((i - 0.5).abs() < 1e-12, "I = {i}");
    }

    #[test]
    fn chain_rule_on_random_joints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let d = random_joint(&mut rng, &["a", "b", "c"]);
            let lhs = mutual_information(&d, &["a"], &["b", "c"], &[]).unwrap();
            let rhs = mutual_information(&d, &["a"], &["b"], &[]).unwrap()
                + mutual_information(&d, &["a"], &["c"], &["b"]).unwrap();
            assert!((lhs - rhs).abs() < IDENTITY_TOLERANCE);
        }
    }

    #[test]
    fn conditioning_never_increases_entropy() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let d = random_joint(&mut rng, &["a", "b"]);
            let h = entropy(&d, &["a"], &[]).unwrap();
            let hc = entropy(&d, &["a"], &["b"]).unwrap();
            assert!(hc <= h + IDENTITY_TOLERANCE);
            assert!(hc >= -IDENTITY_TOLERANCE);
        }
    }

    #[test]
    fn tripartite_values() {
        let d = uniform(&["a", "b", "c"]);
        assert!(tripartite_information(&d, &["a"], &["b"], &["c"], &[]).unwrap().abs() < 1e-15);
        // one uniform bit copied three ways: 1 + 1 + 1 - 1 = 2
        let d = uniform(&["a"])
            .with_xor_column("b", &["a"])
            .unwrap()
            .with_xor_column("c", &["a"])
            .unwrap();
        let t = tripartite_information(&d, &["a"], &["b"], &["c"], &[]).unwrap();
        assert!((t - 2.0).abs() < 1e-15);
        // identity from the lemma statement
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let d = random_joint(&mut rng, &["s", "t", "u", "v"]);
            let gap = tripartite_identity_gap(&d, &["s"], &["t"], &["u"], &["v"]).unwrap();
            assert!(gap < IDENTITY_TOLERANCE);
        }
    }

    #[test]
    fn guessed_information_basics() {
        let d = uniform(&["x", "g"]);
        assert_eq!(guessed_information(&d, &["x"], &["g"]).unwrap(), half());
        let d = uniform(&["x"]).with_xor_column("c", &["x"]).unwrap();
        assert_eq!(guessed_information(&d, &["x"], &["c"]).unwrap(), q(1, 1));
        // lower bound: max_j p(Y=j) when independent
        let d = JointDistribution::new(
            vec![bit("x"), bit("g")],
            vec![q(3, 8), q(1, 8), q(3, 8), q(1, 8)],
        )
        .unwrap();
        assert_eq!(guessed_information(&d, &["x"], &["g"]).unwrap(), q(3, 4));
    }

    #[test]
    fn chsh_guessed_independent_case() {
        // a independent of everything: LHS = 1/2 * 1/2 + 1/2 * 1/2 = 1/2
        let d = uniform(&["a", "x", "m"]);
        let (lhs, report) = chsh_guessed(&d, &["m"]).unwrap();
        assert_eq!(lhs, half());
        assert!(report.satisfied);
    }

    #[test]
    fn chsh_no_box_family_bound() {
        let r = verify_chsh_no_box_family().unwrap();
        assert_eq!(r.strategies, 16);
        assert!(r.all_within_bound);
        assert!(r.attained);
        assert_eq!(r.max_lhs, "3/4");
    }

    #[test]
    fn lemma5_on_random_joints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..500 {
            let d = random_joint(&mut rng, &["s", "t", "u", "v"]);
            let (ineq, ssa) = verify_lemma5(&d, &["s"], &["t"], &["u"], &["v"]).unwrap();
            assert!(ineq.satisfied, "{ineq}");
            assert!(ssa.satisfied, "{ssa}");
        }
    }

    #[test]
    fn lemma5_equality_case() {
        // T = (S, U) copied: LHS = H(S) + H(U) = RHS
        let d = uniform(&["s", "u"])
            .with_xor_column("t1", &["s"])
            .unwrap()
            .with_xor_column("t2", &["u"])
            .unwrap();
        let (ineq, _) = verify_lemma5(&d, &["s"], &["t1", "t2"], &["u"], &[]).unwrap();
        assert!(ineq.satisfied);
        assert!(ineq.slack.abs() < IDENTITY_TOLERANCE);
        assert!((ineq.value - 2.0).abs() < IDENTITY_TOLERANCE);
    }

    #[test]
    fn theorem4_precondition() {
        // x and z correlated: precondition must fail
        let d = uniform(&["x", "y"])
            .with_xor_column("z", &["x"])
            .unwrap()
            .with_xor_column("a", &["x"])
            .unwrap()
            .with_xor_column("bt", &["y"])
            .unwrap()
            .with_xor_column("yt", &["y"])
            .unwrap();
        assert!(matches!(
            verify_theorem4(&d, "bt", "yt", &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn theorem4_constant_bt() {
        // bt constant: LHS collapses to 0, RHS >= 0
        let d = uniform(&["x", "z", "y"])
            .with_xor_column("a", &["x"])
            .unwrap()
            .with_xor_column("bt", &[])
            .unwrap()
            .with_xor_column("yt", &["y"])
            .unwrap();
        let r = verify_theorem4(&d, "bt", "yt", &[]).unwrap();
        assert!(r.satisfied, "{r}");
        assert!(r.value.abs() < 1e-12);
    }
}
