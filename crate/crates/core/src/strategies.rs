//! Deterministic strategies for the "racbox + one c-bit simulates
//! PR-correlations + channel" scenario: exact reference semantics, the full
//! enumeration, and strategy mixtures driven by shared randomness.
//!
//! The exhaustive sweep over the whole space lives in [`sweep`].

pub mod sweep;

use crate::boxes::BipartiteBox;
use crate::channel::ClassicalChannel;
use crate::joint::JointDistribution;
use crate::rational::{q, q0, q1, Rational};
use crate::vars::{values_of, VariableSpec};
use crate::{Error, Result};
use num::{One, Zero};

/// Index of an (x, z) cell: x*2 + z.
#[inline]
pub fn idx_xz(x: u8, z: u8) -> u8 {
    x * 2 + z
}

/// Index of an (x, z, a) cell: x*4 + z*2 + a.
#[inline]
pub fn idx_xza(x: u8, z: u8, a: u8) -> u8 {
    x * 4 + z * 2 + a
}

/// A deterministic strategy, each map stored as a bitmask over its domain.
///
/// Alice: encodes (x, z) into the box inputs, chooses the message from
/// (x, z, a-tilde), and produces her protocol output from (x, z, a-tilde).
/// Bob: chooses the box input from y, his second input from (y, m), and
/// decodes his protocol output from (y, b-tilde, m). The box input y-tilde is
/// a function of y, so reading it separately cannot distinguish anything;
/// the decode domain is therefore (y, b-tilde, m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DeterministicStrategy {
    /// bit at idx_xz(x,z): value of box input x0
    pub encode_x0: u8,
    /// bit at idx_xz(x,z): value of box input x1
    pub encode_x1: u8,
    /// bit at idx_xza(x,z,a): the communicated bit m
    pub message: u8,
    /// bit at idx_xza(x,z,a): Alice's protocol output a
    pub alice_out: u8,
    /// bits 0..2: y-tilde for y = 0, 1
    pub bob_input: u8,
    /// bit at (y*2 + m): y-tilde-prime
    pub bob_yprime: u8,
    /// bit at (y*4 + bt*2 + m): Bob's protocol output b
    pub bob_decode: u8,
}

pub const N_ENCODE: u64 = 256;
pub const N_MESSAGE: u64 = 256;
pub const N_ALICE_OUT: u64 = 256;
pub const N_BOB_INPUT: u64 = 4;
pub const N_BOB_YPRIME: u64 = 16;
pub const N_BOB_DECODE: u64 = 256;

/// Size of the full deterministic-strategy space.
pub fn strategy_space_size() -> u64 {
    N_ENCODE * N_MESSAGE * N_ALICE_OUT * N_BOB_INPUT * N_BOB_YPRIME * N_BOB_DECODE
}

impl DeterministicStrategy {
    #[inline]
    pub fn encode(&self, x: u8, z: u8) -> (u8, u8) {
        let i = idx_xz(x, z);
        ((self.encode_x0 >> i) & 1, (self.encode_x1 >> i) & 1)
    }

    #[inline]
    pub fn message_bit(&self, x: u8, z: u8, a: u8) -> u8 {
        (self.message >> idx_xza(x, z, a)) & 1
    }

    #[inline]
    pub fn alice_out_bit(&self, x: u8, z: u8, a: u8) -> u8 {
        (self.alice_out >> idx_xza(x, z, a)) & 1
    }

    #[inline]
    pub fn bob_input_bit(&self, y: u8) -> u8 {
        (self.bob_input >> y) & 1
    }

    #[inline]
    pub fn bob_yprime_bit(&self, y: u8, m: u8) -> u8 {
        (self.bob_yprime >> (y * 2 + m)) & 1
    }

    #[inline]
    pub fn bob_decode_bit(&self, y: u8, bt: u8, m: u8) -> u8 {
        (self.bob_decode >> (y * 4 + bt * 2 + m)) & 1
    }

    /// Packs the strategy into its enumeration index (38 bits).
    pub fn to_index(&self) -> u64 {
        (self.encode_x0 as u64 & 0xF)
            | ((self.encode_x1 as u64 & 0xF) << 4)
            | ((self.message as u64) << 8)
            | ((self.alice_out as u64) << 16)
            | ((self.bob_input as u64 & 0x3) << 24)
            | ((self.bob_yprime as u64 & 0xF) << 26)
            | ((self.bob_decode as u64) << 30)
    }

    pub fn from_index(idx: u64) -> Result<Self> {
        if idx >= strategy_space_size() {
            return Err(Error::Precondition(format!(
                "strategy index {idx} out of range"
            )));
        }
        Ok(Self {
            encode_x0: (idx & 0xF) as u8,
            encode_x1: ((idx >> 4) & 0xF) as u8,
            message: ((idx >> 8) & 0xFF) as u8,
            alice_out: ((idx >> 16) & 0xFF) as u8,
            bob_input: ((idx >> 24) & 0x3) as u8,
            bob_yprime: ((idx >> 26) & 0xF) as u8,
            bob_decode: ((idx >> 30) & 0xFF) as u8,
        })
    }

    /// Does the strategy always feed a-tilde into y-tilde-prime? Exactly the
    /// strategies for which the racbox acts as a perfect RAC.
    pub fn routes_output_to_yprime(&self) -> bool {
        for x in 0..2 {
            for z in 0..2 {
                for a in 0..2 {
                    let m = self.message_bit(x, z, a);
                    for y in 0..2 {
                        if self.bob_yprime_bit(y, m) != a {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Does the message ignore a-tilde entirely?
    pub fn message_ignores_output(&self) -> bool {
        for x in 0..2 {
            for z in 0..2 {
                if self.message_bit(x, z, 0) != self.message_bit(x, z, 1) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::fmt::Display for DeterministicStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "strategy[{:#012x}: enc=({:04b},{:04b}) msg={:08b} aout={:08b} binp={:02b} ypr={:04b} dec={:08b}]",
            self.to_index(),
            self.encode_x0,
            self.encode_x1,
            self.message,
            self.alice_out,
            self.bob_input,
            self.bob_yprime,
            self.bob_decode
        )
    }
}

/// Lazy enumeration of the whole space, one strategy per index.
pub fn enumerate_strategies() -> impl Iterator<Item = DeterministicStrategy> {
    (0..strategy_space_size()).map(|i| DeterministicStrategy::from_index(i).expect("in range"))
}

// --- named strategies ---------------------------------------------------------

/// The resource-inequality protocol as a racbox strategy: z into x0, x into
/// x1, message carries a-tilde and is routed into y-tilde-prime, Bob outputs
/// m at y = 0 and b-tilde XOR m at y = 1; Alice outputs a-tilde.
pub fn fig3_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: mask_xz(|_x, z| z),
        encode_x1: mask_xz(|x, _z| x),
        message: mask_xza(|_x, _z, a| a),
        alice_out: mask_xza(|_x, _z, a| a),
        bob_input: mask_y(|y| y),
        bob_yprime: mask_ym(|_y, m| m),
        bob_decode: mask_ybm(|y, bt, m| if y == 0 { m } else { bt ^ m }),
    }
}

/// The message carries x instead of a-tilde; Alice outputs a constant and
/// encodes z into both box inputs. Perfect PR with a depolarizing channel.
pub fn message_carries_x_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: mask_xz(|_x, z| z),
        encode_x1: mask_xz(|_x, z| z),
        message: mask_xza(|x, _z, _a| x),
        alice_out: 0,
        bob_input: mask_y(|y| y),
        bob_yprime: 0,
        bob_decode: mask_ybm(|y, _bt, m| y & m),
    }
}

/// The support-case protocol with x-dependent slot assignment:
/// x = 0 puts (0, 1), x = 1 puts (z, z); Alice outputs x AND z.
pub fn table_ii_case2_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: mask_xz(|x, z| if x == 0 { 0 } else { z }),
        encode_x1: mask_xz(|x, z| if x == 0 { 1 } else { z }),
        message: mask_xza(|_x, _z, a| a),
        alice_out: mask_xza(|x, z, _a| x & z),
        bob_input: mask_y(|y| y),
        bob_yprime: mask_ym(|_y, m| m),
        bob_decode: mask_ybm(|y, bt, _m| bt ^ y),
    }
}

/// The third support case: x0 carries z only when x = 1, x1 carries x.
pub fn table_ii_case3_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: mask_xz(|x, z| if x == 0 { 0 } else { z }),
        encode_x1: mask_xz(|x, _z| x),
        message: mask_xza(|_x, _z, a| a),
        alice_out: 0,
        bob_input: mask_y(|y| y),
        bob_yprime: mask_ym(|_y, m| m),
        bob_decode: mask_ybm(|y, bt, _m| {
            // a = 0 always: b must equal x AND y; at y=0 output 0, at y=1
            // the box bit is x itself
            if y == 0 {
                0
            } else {
                bt
            }
        }),
    }
}

/// Routed strategy that ignores the box bit in the decode: succeeds with
/// probability 3/4 and witnesses the strict perfect-guessing inequality.
pub fn imperfect_three_quarters_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: mask_xz(|_x, z| z),
        encode_x1: 0,
        message: mask_xza(|_x, _z, a| a),
        alice_out: mask_xza(|_x, _z, a| a),
        bob_input: mask_y(|y| y),
        bob_yprime: mask_ym(|_y, m| m),
        bob_decode: mask_ybm(|_y, _bt, m| m),
    }
}

/// The message carries z and y-tilde-prime ignores it: the strategy family
/// that tries to use the c-bit as a plain channel.
pub fn message_carries_z_strategy() -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: 0,
        encode_x1: mask_xz(|x, _z| x),
        message: mask_xza(|_x, z, _a| z),
        alice_out: mask_xza(|_x, _z, a| a),
        bob_input: mask_y(|y| y),
        bob_yprime: 0,
        bob_decode: mask_ybm(|_y, bt, _m| bt),
    }
}

pub fn mask_xz(f: impl Fn(u8, u8) -> u8) -> u8 {
    let mut m = 0;
    for x in 0..2 {
        for z in 0..2 {
            m |= (f(x, z) & 1) << idx_xz(x, z);
        }
    }
    m
}

pub fn mask_xza(f: impl Fn(u8, u8, u8) -> u8) -> u8 {
    let mut m = 0;
    for x in 0..2 {
        for z in 0..2 {
            for a in 0..2 {
                m |= (f(x, z, a) & 1) << idx_xza(x, z, a);
            }
        }
    }
    m
}

pub fn mask_y(f: impl Fn(u8) -> u8) -> u8 {
    (f(0) & 1) | ((f(1) & 1) << 1)
}

pub fn mask_ym(f: impl Fn(u8, u8) -> u8) -> u8 {
    let mut m = 0;
    for y in 0..2 {
        for mm in 0..2 {
            m |= (f(y, mm) & 1) << (y * 2 + mm);
        }
    }
    m
}

pub fn mask_ybm(f: impl Fn(u8, u8, u8) -> u8) -> u8 {
    let mut m = 0;
    for y in 0..2 {
        for bt in 0..2 {
            for mm in 0..2 {
                m |= (f(y, bt, mm) & 1) << (y * 4 + bt * 2 + mm);
            }
        }
    }
    m
}

// --- reference semantics --------------------------------------------------------

/// Independent input distributions for x, z, y (probability of value 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDist {
    pub x1: Rational,
    pub z1: Rational,
    pub y1: Rational,
}

impl Default for InputDist {
    fn default() -> Self {
        Self {
            x1: q(1, 2),
            z1: q(1, 2),
            y1: q(1, 2),
        }
    }
}

impl InputDist {
    fn weight(&self, x: u8, z: u8, y: u8) -> Rational {
        let pick = |p: &Rational, v: u8| {
            if v == 1 {
                p.clone()
            } else {
                q1() - p.clone()
            }
        };
        pick(&self.x1, x) * pick(&self.z1, z) * pick(&self.y1, y)
    }
}

/// The variables of a strategy joint, in order.
pub const JOINT_VARS: [&str; 9] = ["x", "z", "y", "m", "ybox", "abox", "bbox", "a", "b"];

fn racbox_conditionals(
    b: &BipartiteBox,
) -> Result<(Vec<[Rational; 2]>, Vec<[[Rational; 2]; 2]>)> {
    // shape (2,1,2,1), all binary, nonsignalling Bob -> Alice
    let shape = (
        b.alice_inputs().len(),
        b.alice_outputs().len(),
        b.bob_inputs().len(),
        b.bob_outputs().len(),
    );
    if shape != (2, 1, 2, 1) || b.input_vars().iter().any(|v| v.arity != 2) {
        return Err(Error::Signature(
            "strategy execution needs the racbox signature".into(),
        ));
    }
    let verdict = crate::boxes::check_nonsignalling(b)?;
    if verdict.b_to_a {
        return Err(Error::Precondition(
            "box signals Bob to Alice; sequential strategy semantics undefined".into(),
        ));
    }
    // p(abox | x0,x1) indexed by alice input pair; p(bbox | inputs, abox)
    let mut marg = vec![[q0(), q0()]; 4];
    let mut cond = vec![[[q0(), q0()], [q0(), q0()]]; 16];
    for in_idx in 0..16 {
        let iv = values_of(&b.input_vars(), in_idx);
        let a_idx = (iv[0] * 2 + iv[1]) as usize;
        for out_idx in 0..4 {
            let ov = values_of(&b.output_vars(), out_idx);
            let p = b.prob(in_idx, out_idx);
            if iv[2] == 0 && iv[3] == 0 {
                marg[a_idx][ov[0] as usize] += p;
            }
        }
        for abox in 0..2usize {
            for bbox in 0..2usize {
                let p = b.prob(in_idx, abox * 2 + bbox);
                cond[in_idx][abox][bbox] = p.clone();
            }
        }
    }
    Ok((marg, cond))
}

/// Runs a deterministic strategy on a racbox-signature box, returning the
/// exact joint over (x, z, y, m, ybox, abox, bbox, a, b).
pub fn run_strategy(
    strategy: &DeterministicStrategy,
    b: &BipartiteBox,
    dist: &InputDist,
) -> Result<JointDistribution> {
    let (marg, cond) = racbox_conditionals(b)?;
    let vars: Vec<VariableSpec> = JOINT_VARS.iter().map(|n| VariableSpec::bit(*n)).collect();
    let mut atoms: Vec<(Vec<u8>, Rational)> = Vec::new();
    for x in 0..2u8 {
        for z in 0..2u8 {
            for y in 0..2u8 {
                let w_in = dist.weight(x, z, y);
                if w_in.is_zero() {
                    continue;
                }
                let (x0, x1) = strategy.encode(x, z);
                let ybox = strategy.bob_input_bit(y);
                for abox in 0..2u8 {
                    let p_a = marg[(x0 * 2 + x1) as usize][abox as usize].clone();
                    if p_a.is_zero() {
                        continue;
                    }
                    let m = strategy.message_bit(x, z, abox);
                    let yp = strategy.bob_yprime_bit(y, m);
                    let in_idx = ((x0 * 8) + (x1 * 4) + (ybox * 2) + yp) as usize;
                    for bbox in 0..2u8 {
                        let p_ab = cond[in_idx][abox as usize][bbox as usize].clone();
                        if p_ab.is_zero() {
                            continue;
                        }
                        let a = strategy.alice_out_bit(x, z, abox);
                        let bb = strategy.bob_decode_bit(y, bbox, m);
                        atoms.push((
                            vec![x, z, y, m, ybox, abox, bbox, a, bb],
                            w_in.clone() * p_ab,
                        ));
                    }
                }
            }
        }
    }
    JointDistribution::from_atoms(vars, atoms)
}

/// P(a XOR b = x AND y) for a joint containing x, y, a, b.
pub fn pr_success_probability(d: &JointDistribution) -> Result<Rational> {
    let names = d.var_names();
    let pos = |n: &str| -> Result<usize> {
        names
            .iter()
            .position(|v| *v == n)
            .ok_or_else(|| Error::UnknownVariable(n.to_string()))
    };
    let (px, py, pa, pb) = (pos("x")?, pos("y")?, pos("a")?, pos("b")?);
    let mut total = q0();
    for (vals, p) in d.support() {
        if vals[pa] ^ vals[pb] == vals[px] & vals[py] {
            total += p;
        }
    }
    Ok(total)
}

/// The channel from z to Bob's view of the box output, flagged by y:
/// p(bbox, y | z).
pub fn induced_channel(d: &JointDistribution) -> Result<ClassicalChannel> {
    ClassicalChannel::from_joint(d, "z", "bbox", &["y"])
}

/// The stricter view channel including the communicated bit: p(bbox, m, y | z).
pub fn induced_channel_with_message(d: &JointDistribution) -> Result<ClassicalChannel> {
    ClassicalChannel::from_joint(d, "z", "bbox", &["m", "y"])
}

// --- mixtures (shared randomness) ----------------------------------------------

/// A strategy mixture: the shared random variable s selects a component.
#[derive(Debug, Clone)]
pub struct MixedStrategy {
    pub components: Vec<(Rational, DeterministicStrategy)>,
}

impl MixedStrategy {
    pub fn uniform(strategies: Vec<DeterministicStrategy>) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::Precondition("empty mixture".into()));
        }
        let n = strategies.len() as i64;
        Ok(Self {
            components: strategies.into_iter().map(|s| (q(1, n), s)).collect(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        let mut total = q0();
        for (w, _) in &self.components {
            if w < &q0() {
                return Err(Error::InvalidDistribution("negative weight".into()));
            }
            total += w;
        }
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "mixture weights sum to {total}"
            )));
        }
        Ok(())
    }

    /// Joint including the selector variable s (arity = component count,
    /// padded to 2 when the mixture is a singleton).
    pub fn run(&self, b: &BipartiteBox, dist: &InputDist) -> Result<JointDistribution> {
        self.validate()?;
        let arity = (self.components.len().max(2)) as u32;
        let mut vars = vec![VariableSpec::new("s", arity)?];
        vars.extend(JOINT_VARS.iter().map(|n| VariableSpec::bit(*n)));
        let mut atoms = Vec::new();
        for (i, (w, strat)) in self.components.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let joint = run_strategy(strat, b, dist)?;
            for (vals, p) in joint.support() {
                let mut v = vec![i as u8];
                v.extend(vals);
                atoms.push((v, w.clone() * p.clone()));
            }
        }
        JointDistribution::from_atoms(vars, atoms)
    }
}

/// Decomposition check: the s-marginalized mixture joint must equal the
/// weighted sum of the component joints (computed along an independent
/// accumulation route), and perfect PR-correlation of the mixture must be
/// equivalent to perfect PR-correlation of every positive-weight component.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Lemma2Report {
    pub table_equality: bool,
    pub mixture_success: String,
    pub component_successes: Vec<String>,
    pub convexity_consistent: bool,
}

pub fn verify_lemma2_decomposition(
    mixed: &MixedStrategy,
    b: &BipartiteBox,
    dist: &InputDist,
) -> Result<Lemma2Report> {
    let with_s = mixed.run(b, dist)?;
    let marginalized = with_s.marginal(&JOINT_VARS)?;
    // independent route: accumulate the convex combination cell by cell
    let vars: Vec<VariableSpec> = JOINT_VARS.iter().map(|n| VariableSpec::bit(*n)).collect();
    let mut probs = vec![q0(); 1 << JOINT_VARS.len()];
    let mut component_successes = Vec::new();
    let mut all_perfect = true;
    let mut any_imperfect_weight = q0();
    for (w, strat) in &mixed.components {
        let joint = run_strategy(strat, b, dist)?;
        let success = pr_success_probability(&joint)?;
        if !success.is_one() && !w.is_zero() {
            all_perfect = false;
            any_imperfect_weight += w;
        }
        component_successes.push(crate::rational::fmt_frac(&success));
        for (i, p) in joint.probs().iter().enumerate() {
            probs[i] += w.clone() * p.clone();
        }
    }
    let convex = JointDistribution::new(vars, probs)?;
    let table_equality = convex == marginalized;
    let mixture_success = pr_success_probability(&marginalized)?;
    // convexity: the mixture is perfect iff every supported component is
    let convexity_consistent = (mixture_success.is_one() == all_perfect)
        && (all_perfect || mixture_success < q1());
    Ok(Lemma2Report {
        table_equality,
        mixture_success: crate::rational::fmt_frac(&mixture_success),
        component_successes,
        convexity_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{make_nonsignalling_racbox, make_signalling_racbox};
    use crate::channel::{classify_channel, ChannelKind};
    use crate::rational::half;

    #[test]
    fn component_counts() {
        assert_eq!(N_ENCODE, 256); // 4 inputs, 4 outputs: 4^4
        assert_eq!(N_BOB_INPUT, 4); // 2 inputs, 2 outputs: 2^2
        assert_eq!(
            strategy_space_size(),
            256 * N_MESSAGE * N_ALICE_OUT * 4 * N_BOB_YPRIME * N_BOB_DECODE
        );
        assert_eq!(strategy_space_size(), 1u64 << 38);
    }

    #[test]
    fn index_roundtrip() {
        for idx in [
            0u64,
            strategy_space_size() - 1,
            fig3_strategy().to_index(),
            0x2a5a5a5a5,
        ] {
            let s = DeterministicStrategy::from_index(idx).unwrap();
            assert_eq!(s.to_index(), idx);
        }
        assert!(DeterministicStrategy::from_index(strategy_space_size()).is_err());
        // the first few enumerated strategies are distinct
        let seen: std::collections::HashSet<u64> = enumerate_strategies()
            .take(10_000)
            .map(|s| s.to_index())
            .collect();
        assert_eq!(seen.len(), 10_000);
    }

    #[test]
    fn fig3_is_perfect_on_signalling_racbox() {
        let joint = run_strategy(
            &fig3_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        assert_eq!(pr_success_probability(&joint).unwrap(), q1());
        // inputs marginal equals the input distribution
        let m = joint.marginal(&["x", "z", "y"]).unwrap();
        assert!(m.probs().iter().all(|p| *p == q(1, 8)));
        // induced channel is the 1/2-erasure channel
        let ch = induced_channel(&joint).unwrap();
        let class = classify_channel(&ch);
        assert_eq!(class.kind, ChannelKind::Erasure);
        assert_eq!(class.parameter, half());
    }

    #[test]
    fn fig3_strategy_flags() {
        assert!(fig3_strategy().routes_output_to_yprime());
        assert!(!fig3_strategy().message_ignores_output());
        assert!(message_carries_x_strategy().message_ignores_output());
        assert!(!message_carries_x_strategy().routes_output_to_yprime());
    }

    #[test]
    fn message_carries_x_gives_depolarizing() {
        let joint = run_strategy(
            &message_carries_x_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        assert_eq!(pr_success_probability(&joint).unwrap(), q1());
        let class = classify_channel(&induced_channel(&joint).unwrap());
        assert_eq!(class.kind, ChannelKind::Depolarizing);
        assert_eq!(class.parameter, half());
    }

    #[test]
    fn table_ii_strategies_are_perfect_amplitude_damping() {
        for strat in [table_ii_case2_strategy(), table_ii_case3_strategy()] {
            let joint =
                run_strategy(&strat, &make_signalling_racbox(), &InputDist::default()).unwrap();
            assert_eq!(pr_success_probability(&joint).unwrap(), q1(), "{strat}");
            let class = classify_channel(&induced_channel(&joint).unwrap());
            assert_eq!(class.kind, ChannelKind::AmplitudeDamping, "{strat}");
        }
        // case 2 reproduces the canonical amplitude-damping table exactly
        let joint = run_strategy(
            &table_ii_case2_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        let ch = induced_channel(&joint).unwrap();
        assert_eq!(ch.table(), crate::channel::table_ii_amplitude_damping().table());
    }

    #[test]
    fn imperfect_strategy_scores_three_quarters() {
        let joint = run_strategy(
            &imperfect_three_quarters_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        assert_eq!(pr_success_probability(&joint).unwrap(), q(3, 4));
    }

    #[test]
    fn decode_ignoring_box_bit_has_no_information_path() {
        // b independent of z given (x, y); channel through the decode output
        // carries nothing, while bbox itself may
        let strat = imperfect_three_quarters_strategy();
        let joint =
            run_strategy(&strat, &make_signalling_racbox(), &InputDist::default()).unwrap();
        // decode ignores bbox: b depends only on (y, m); conditioned on m the
        // output is fixed, so I(z : b) = 0
        let i = crate::info::mutual_information(&joint, &["z"], &["b"], &[]).unwrap();
        assert!(i.abs() < 1e-12);
    }

    #[test]
    fn constant_decode_succeeds_half() {
        let strat = DeterministicStrategy {
            bob_decode: 0,
            ..fig3_strategy()
        };
        let joint =
            run_strategy(&strat, &make_signalling_racbox(), &InputDist::default()).unwrap();
        assert_eq!(pr_success_probability(&joint).unwrap(), half());
    }

    #[test]
    fn nonsignalling_racbox_supports_identity_channel_with_message() {
        // m = z with the racbox wired as a PR simulator: PR-correlations hold
        // and Bob's view (bbox, m, y) carries z intact
        let strat = message_carries_z_strategy();
        let joint =
            run_strategy(&strat, &make_nonsignalling_racbox(), &InputDist::default()).unwrap();
        assert_eq!(pr_success_probability(&joint).unwrap(), q1());
        let ch = induced_channel_with_message(&joint).unwrap();
        let mi = ch.uniform_mutual_information().unwrap();
        assert!((mi - 1.0).abs() < 1e-12, "capacity-1 channel expected, MI = {mi}");
        assert!(!crate::channel::is_postprocessing_of_erasure(&ch, &half()).unwrap());
    }

    #[test]
    fn mixture_decomposition() {
        let b = make_signalling_racbox();
        let dist = InputDist::default();
        // two perfect strategies: mixture perfect
        let mixed =
            MixedStrategy::uniform(vec![fig3_strategy(), table_ii_case2_strategy()]).unwrap();
        let r = verify_lemma2_decomposition(&mixed, &b, &dist).unwrap();
        assert!(r.table_equality);
        assert!(r.convexity_consistent);
        assert_eq!(r.mixture_success, "1/1");
        // a 3/4 component at weight 1/2 caps the mixture at 7/8
        let mixed = MixedStrategy::uniform(vec![
            fig3_strategy(),
            imperfect_three_quarters_strategy(),
        ])
        .unwrap();
        let r = verify_lemma2_decomposition(&mixed, &b, &dist).unwrap();
        assert!(r.table_equality);
        assert!(r.convexity_consistent);
        assert_eq!(r.mixture_success, "7/8");
        // singleton mixture: identical joint
        let single = MixedStrategy::uniform(vec![fig3_strategy()]).unwrap();
        let with_s = single.run(&b, &dist).unwrap();
        let marg = with_s.marginal(&JOINT_VARS).unwrap();
        let direct = run_strategy(&fig3_strategy(), &b, &dist).unwrap();
        assert_eq!(marg, direct);
    }

    #[test]
    fn signature_and_precondition_errors() {
        let strat = fig3_strategy();
        assert!(matches!(
            run_strategy(&strat, &crate::boxes::make_pr_box(), &InputDist::default()),
            Err(Error::Signature(_))
        ));
    }

    #[test]
    fn chsh_guessed_violated_by_racbox_strategy() {
        // both y-conditioned guessing terms reach 1 on the perfect strategy
        let joint = run_strategy(
            &fig3_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        let (lhs, report) =
            crate::info::chsh_guessed_conditioned(&joint, &["bbox", "m", "ybox"]).unwrap();
        assert_eq!(lhs, q1());
        assert!(!report.satisfied);
    }

    #[test]
    fn perfect_guess_equalities_on_reference_joints() {
        let b = make_signalling_racbox();
        let joint = run_strategy(&fig3_strategy(), &b, &InputDist::default()).unwrap();
        // the communicated bit doubles as the shared variable s
        let r = crate::info::verify_lemma4(&joint, "bbox", "ybox", &["m"]).unwrap();
        assert!(r.holds, "{r:?}");
        // the designated 3/4 strategy shows a strict gap at y = 1
        let joint =
            run_strategy(&imperfect_three_quarters_strategy(), &b, &InputDist::default()).unwrap();
        let r = crate::info::verify_lemma4(&joint, "bbox", "ybox", &["m"]).unwrap();
        assert!(!r.holds);
        assert!(r.y1_mutual + 0.5 < r.y1_entropy, "{r:?}");
    }

    #[test]
    fn tradeoff_inequality_on_reference_joint() {
        let joint = run_strategy(
            &fig3_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        let r = crate::info::verify_theorem4(&joint, "bbox", "ybox", &["m"]).unwrap();
        assert!(r.satisfied, "{r}");
    }

    #[test]
    fn message_bound_reference_value() {
        let joint = run_strategy(
            &fig3_strategy(),
            &make_signalling_racbox(),
            &InputDist::default(),
        )
        .unwrap();
        let i = crate::info::theorem3_information(&joint, "bbox", "ybox", &["m"]).unwrap();
        assert!((i - 0.5).abs() < 1e-12, "I = {i}");
        // proof-step trace: H(z|s) = H(z) = 1 and the chain rule pieces agree
        let trace = crate::info::theorem3_trace(&joint, "bbox", "ybox", &["m"]).unwrap();
        let get = |k: &str| {
            trace
                .iter()
                .find(|(name, _)| name == k)
                .unwrap_or_else(|| panic!("missing {k}"))
                .1
        };
        assert!((get("H(z|s)") - 1.0).abs() < 1e-12);
        assert!((get("H(z)") - 1.0).abs() < 1e-12);
        let total = get("I(z:bbox,ybox,y,m)");
        let chain = get("I(z:y,ybox,m)") + get("I(z:bbox|ybox,m,y)");
        assert!((total - chain).abs() < 1e-12);
    }
}
