//! Exhaustive verification over the full deterministic-strategy space
//! (2^38 strategies) for the signalling racbox plus one c-bit.
//!
//! The sweep factors the space: Bob's per-setting choice (box input j,
//! second-input rule p, decode d) decouples across y, and for fixed Alice
//! maps the set of per-setting choices achieving perfect PR-correlations is
//! a 64-bit mask computed by ANDing 8 per-atom constraint masks. Channels,
//! information quantities and support patterns depend only on small
//! projections of the strategy, so they are memoized per projection and
//! weighted by decode multiplicities.

use super::{idx_xz, idx_xza, DeterministicStrategy};
use crate::channel::{
    classify_channel, depolarizing, is_postprocessing_of, is_postprocessing_of_erasure,
    ChannelClass, ChannelKind, ClassicalChannel,
};
use crate::rational::{half, q, Rational};
use crate::vars::VariableSpec;
use crate::Result;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Which canonical racbox the strategies run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxKind {
    /// a = y': RAC; a != y': fresh uniform bit at b.
    Signalling,
    /// b = x_y XOR a XOR y' always.
    Nonsignalling,
}

impl BoxKind {
    fn name(&self) -> &'static str {
        match self {
            BoxKind::Signalling => "signalling-racbox",
            BoxKind::Nonsignalling => "nonsignalling-racbox",
        }
    }
}

const XMASK: u8 = 0xF0; // idx_xza cells with x = 1
const MFREE_D: u16 = (1 << 0) | (1 << 3) | (1 << 12) | (1 << 15); // decodes ignoring m
const AOUT_X_ONLY: [u8; 4] = [0x00, 0x0F, 0xF0, 0xFF]; // alice_out depending on x alone

#[inline]
fn dec_bit(d: u16, bt: u8, m: u8) -> u8 {
    ((d >> (bt * 2 + m)) & 1) as u8
}

#[inline]
fn ypr_bit(p: u8, m: u8) -> u8 {
    (p >> m) & 1
}

/// Per-atom constraint masks over the 64 (p, d) choices of one y-slice.
/// Index: m + 2*w + 4*t + 8*a.
fn atom_masks(kind: BoxKind) -> [u64; 16] {
    let mut out = [0u64; 16];
    for m in 0..2u8 {
        for w in 0..2u8 {
            for t in 0..2u8 {
                for a in 0..2u8 {
                    let mut mask = 0u64;
                    for p in 0..4u8 {
                        for d in 0..16u16 {
                            let routed = ypr_bit(p, m) == a;
                            let ok = if routed {
                                dec_bit(d, w, m) == t
                            } else {
                                match kind {
                                    BoxKind::Signalling => {
                                        dec_bit(d, 0, m) == t && dec_bit(d, 1, m) == t
                                    }
                                    BoxKind::Nonsignalling => dec_bit(d, w ^ 1, m) == t,
                                }
                            };
                            if ok {
                                mask |= 1u64 << (p as u64 * 16 + d as u64);
                            }
                        }
                    }
                    out[(m + 2 * w + 4 * t + 8 * a) as usize] = mask;
                }
            }
        }
    }
    out
}

/// Q[v | msg<<4 | t<<12]: the (p, d) choices making the slice perfect.
struct QTable {
    q: Vec<u64>,
}

impl QTable {
    fn build(kind: BoxKind) -> Self {
        let am = atom_masks(kind);
        let mut q = vec![0u64; 1 << 20];
        for v in 0..16u32 {
            for msg in 0..256u32 {
                // the 8 atoms' (m, w, a) parts are t-independent
                let mut partial = [0usize; 8];
                for (i, slot) in partial.iter_mut().enumerate() {
                    let x = (i >> 2) as u8;
                    let z = ((i >> 1) & 1) as u8;
                    let a = (i & 1) as u8;
                    let m = ((msg >> idx_xza(x, z, a)) & 1) as u8;
                    let w = ((v >> idx_xz(x, z)) & 1) as u8;
                    *slot = (m + 2 * w + 8 * a) as usize;
                }
                for t in 0..256u32 {
                    let mut mask = !0u64;
                    for (i, base) in partial.iter().enumerate() {
                        let tb = ((t >> i) & 1) as usize;
                        mask &= am[base + 4 * tb];
                        if mask == 0 {
                            break;
                        }
                    }
                    q[Self::index(v, msg, t)] = mask;
                }
            }
        }
        Self { q }
    }

    #[inline]
    fn index(v: u32, msg: u32, t: u32) -> usize {
        (v | (msg << 4) | (t << 12)) as usize
    }

    #[inline]
    fn get(&self, v: u8, msg: u8, t: u8) -> u64 {
        self.q[Self::index(v as u32, msg as u32, t as u32)]
    }
}

/// Maximum per-slice success (in half-units, 0..=16) over all (p, d).
fn slice_max_success_halves(kind: BoxKind, v: u8, msg: u8, t: u8) -> u8 {
    let mut best = 0u8;
    for p in 0..4u8 {
        for d in 0..16u16 {
            let mut halves = 0u8;
            for i in 0..8u8 {
                let x = i >> 2;
                let z = (i >> 1) & 1;
                let a = i & 1;
                let m = (msg >> idx_xza(x, z, a)) & 1;
                let w = (v >> idx_xz(x, z)) & 1;
                let tb = (t >> idx_xza(x, z, a)) & 1;
                let routed = ypr_bit(p, m) == a;
                halves += if routed {
                    2 * u8::from(dec_bit(d, w, m) == tb)
                } else {
                    match kind {
                        BoxKind::Signalling => {
                            u8::from(dec_bit(d, 0, m) == tb) + u8::from(dec_bit(d, 1, m) == tb)
                        }
                        BoxKind::Nonsignalling => 2 * u8::from(dec_bit(d, w ^ 1, m) == tb),
                    }
                };
            }
            best = best.max(halves);
        }
    }
    best
}

// --- slice-level exact data -----------------------------------------------------

/// Distributions induced by one y-slice of a strategy: everything that does
/// not depend on the decode or on Alice's output map.
#[derive(Clone)]
struct SliceInfo {
    /// p(bt | z) in 1/8 units, indexed z*2 + bt
    zch: [u8; 4],
    /// p(bt, m | z) in 1/8 units, indexed z*4 + bt*2 + m
    zmch: [u8; 8],
    /// p(bt | x) in 1/8 units, indexed x*2 + bt
    xch: [u8; 4],
    routed: bool,
}

fn entropy_units(units: &[u32], total: u32) -> f64 {
    let tot = f64::from(total);
    units
        .iter()
        .filter(|&&u| u > 0)
        .map(|&u| {
            let p = f64::from(u) / tot;
            -p * p.log2()
        })
        .sum()
}

fn slice_info(kind: BoxKind, v: u8, msg: u8, p: u8) -> SliceInfo {
    let mut zch = [0u8; 4];
    let mut zmch = [0u8; 8];
    let mut xch = [0u8; 4];
    let mut routed_all = true;
    for x in 0..2u8 {
        for z in 0..2u8 {
            for a in 0..2u8 {
                let m = (msg >> idx_xza(x, z, a)) & 1;
                let w = (v >> idx_xz(x, z)) & 1;
                let routed = ypr_bit(p, m) == a;
                routed_all &= routed;
                let mut put = |bt: u8, units: u8| {
                    zch[(z * 2 + bt) as usize] += units;
                    zmch[(z * 4 + bt * 2 + m) as usize] += units;
                    xch[(x * 2 + bt) as usize] += units;
                };
                if routed {
                    put(w, 2);
                } else {
                    match kind {
                        BoxKind::Signalling => {
                            put(0, 1);
                            put(1, 1);
                        }
                        BoxKind::Nonsignalling => put(w ^ 1, 2),
                    }
                }
            }
        }
    }
    SliceInfo {
        zch,
        zmch,
        xch,
        routed: routed_all,
    }
}

/// Exact pair channel p(bt, flag | z) from two per-slice unit tables,
/// y uniform. `units[y]` indexed [z*2 + bt] in 1/8 units.
fn pair_channel(units: [&[u8; 4]; 2], input: &str, content: &str, flag: &str) -> ClassicalChannel {
    let mut table = vec![vec![q(0, 1); 4]; 2];
    for z in 0..2usize {
        for y in 0..2usize {
            for bt in 0..2usize {
                table[z][bt * 2 + y] = q(units[y][z * 2 + bt] as i64, 16);
            }
        }
    }
    ClassicalChannel::new(
        VariableSpec::bit(input),
        VariableSpec::bit(content),
        vec![VariableSpec::bit(flag)],
        table,
    )
    .expect("pair channel normalized by construction")
}

/// Pair channel including the message: p(bt, m, y | z).
fn pair_channel_with_message(units: [&[u8; 8]; 2]) -> ClassicalChannel {
    let mut table = vec![vec![q(0, 1); 8]; 2];
    for z in 0..2usize {
        for y in 0..2usize {
            for bt in 0..2usize {
                for m in 0..2usize {
                    table[z][bt * 4 + y * 2 + m] = q(units[y][z * 4 + bt * 2 + m] as i64, 16);
                }
            }
        }
    }
    ClassicalChannel::new(
        VariableSpec::bit("z"),
        VariableSpec::bit("w"),
        vec![VariableSpec::bit("y"), VariableSpec::bit("m")],
        table,
    )
    .expect("message-view channel normalized by construction")
}

/// Perfect-guessing data for one routed slice: I(bt : T | a) vs H(T | a)
/// where bt = v(x,z) and T is the target map over (x,z,a).
#[derive(Clone, Copy)]
struct GuessInfo {
    mutual: f64,
    gap: f64,
}

fn guess_info(v: u8, t: u8) -> GuessInfo {
    let mut mutual = 0.0;
    let mut target_entropy = 0.0;
    for a in 0..2u8 {
        let mut joint = [0u32; 4]; // (bt, tv)
        for x in 0..2u8 {
            for z in 0..2u8 {
                let bt = (v >> idx_xz(x, z)) & 1;
                let tv = (t >> idx_xza(x, z, a)) & 1;
                joint[(bt * 2 + tv) as usize] += 1;
            }
        }
        let h_joint = entropy_units(&joint, 4);
        let bt_m = [joint[0] + joint[1], joint[2] + joint[3]];
        let tv_m = [joint[0] + joint[2], joint[1] + joint[3]];
        let h_bt = entropy_units(&bt_m, 4);
        let h_tv = entropy_units(&tv_m, 4);
        mutual += 0.5 * (h_bt + h_tv - h_joint);
        target_entropy += 0.5 * h_tv;
    }
    GuessInfo {
        mutual,
        gap: (mutual - target_entropy).abs(),
    }
}

/// I(a : a XOR x : z | s = a-tilde) for an alice_out map, over uniform (x,z).
fn tripartite_aout(aout: u8) -> f64 {
    let mut total = 0.0;
    for ab in 0..2u8 {
        // joint over (a, ax, z): 8 cells, (x,z) uniform at 1/4 each
        let mut joint = [0u32; 8];
        let mut a_m = [0u32; 2];
        let mut ax_m = [0u32; 2];
        let mut z_m = [0u32; 2];
        for x in 0..2u8 {
            for z in 0..2u8 {
                let a = (aout >> idx_xza(x, z, ab)) & 1;
                let ax = a ^ x;
                joint[(a * 4 + ax * 2 + z) as usize] += 1;
                a_m[a as usize] += 1;
                ax_m[ax as usize] += 1;
                z_m[z as usize] += 1;
            }
        }
        let h = entropy_units(&a_m, 4) + entropy_units(&ax_m, 4) + entropy_units(&z_m, 4)
            - entropy_units(&joint, 4);
        total += 0.5 * h;
    }
    total
}

/// I(z : bt) for a routed slice where bt = v(x, z); used by the trade-off
/// inequality's communication term.
fn routed_i_z(v: u8) -> f64 {
    let mut joint = [0u32; 4];
    for x in 0..2u8 {
        for z in 0..2u8 {
            let bt = (v >> idx_xz(x, z)) & 1;
            joint[(z * 2 + bt) as usize] += 1;
        }
    }
    let h_joint = entropy_units(&joint, 4);
    let bt_m = [joint[0] + joint[2], joint[1] + joint[3]];
    1.0 + entropy_units(&bt_m, 4) - h_joint
}

fn routed_h_bt(v: u8) -> f64 {
    let mut bt_m = [0u32; 2];
    for x in 0..2u8 {
        for z in 0..2u8 {
            bt_m[((v >> idx_xz(x, z)) & 1) as usize] += 1;
        }
    }
    entropy_units(&bt_m, 4)
}

fn routed_hz_given_bt(v: u8) -> f64 {
    let mut joint = [0u32; 4];
    for x in 0..2u8 {
        for z in 0..2u8 {
            joint[(z * 2 + ((v >> idx_xz(x, z)) & 1)) as usize] += 1;
        }
    }
    entropy_units(&joint, 4) - routed_h_bt(v)
}

// --- support patterns (vanishing lemma) ------------------------------------------

/// Support masks over (x, y) for each bt value, for a routed strategy with
/// per-setting encodes v0 (y=0) and v1 (y=1). Bit x*2 + y.
fn support_masks(v_y0: u8, v_y1: u8) -> [u8; 2] {
    let mut supp = [0u8; 2];
    for (y, v) in [(0u8, v_y0), (1u8, v_y1)] {
        for x in 0..2u8 {
            for z in 0..2u8 {
                let bt = (v >> idx_xz(x, z)) & 1;
                supp[bt as usize] |= 1 << (x * 2 + y);
            }
        }
    }
    supp
}

/// Canonical form of a support pattern under bit flips on x, y and bt.
fn canonical_pattern(supp: [u8; 2]) -> u8 {
    let remap = |mask: u8, fx: u8, fy: u8| -> u8 {
        let mut out = 0u8;
        for x in 0..2u8 {
            for y in 0..2u8 {
                if mask & (1 << (x * 2 + y)) != 0 {
                    out |= 1 << ((x ^ fx) * 2 + (y ^ fy));
                }
            }
        }
        out
    };
    let mut best = u8::MAX;
    for fx in 0..2u8 {
        for fy in 0..2u8 {
            for fb in 0..2u8 {
                let (m0, m1) = if fb == 0 {
                    (supp[0], supp[1])
                } else {
                    (supp[1], supp[0])
                };
                let packed = (remap(m0, fx, fy) << 4) | remap(m1, fx, fy);
                best = best.min(packed);
            }
        }
    }
    best
}

fn pattern_label(canon: u8) -> String {
    // canonical forms of the three named support cases, computed from their
    // representative encodes
    let case1 = canonical_pattern(support_masks(
        super::mask_xz(|_x, z| z),
        super::mask_xz(|x, _z| x),
    ));
    let case2 = canonical_pattern(support_masks(
        super::mask_xz(|x, z| if x == 0 { 0 } else { z }),
        super::mask_xz(|x, z| if x == 0 { 1 } else { z }),
    ));
    let case3 = canonical_pattern(support_masks(
        super::mask_xz(|x, z| if x == 0 { 0 } else { z }),
        super::mask_xz(|x, _z| x),
    ));
    if canon == case1 {
        "case1".into()
    } else if canon == case2 {
        "case2".into()
    } else if canon == case3 {
        "case3".into()
    } else {
        format!("degenerate:{canon:02x}")
    }
}

// --- the sweep -------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct TheoremSweepReport {
    pub box_kind: String,
    pub total_strategies: u64,
    pub perfect_total: u64,
    pub perfect_routed: u64,
    pub perfect_message_independent: u64,
    pub perfect_partial: u64,
    /// strategies whose y=1 slice never routes a-tilde yet are perfect
    pub perfect_noise_at_y1: u64,
    pub postproc_failures: u64,
    pub first_postproc_failure: Option<String>,
    pub mview_postproc_failures: u64,
    pub first_mview_failure: Option<String>,
    /// "branch/class" -> strategy count (z-channel classes)
    pub z_classes: BTreeMap<String, u64>,
    /// routed strategies: "xclass|zclass" -> count
    pub routed_pair_classes: BTreeMap<String, u64>,
    /// routed, both channels with positive capacity: the Table II pairing
    pub routed_nonzero_pair_classes: BTreeMap<String, u64>,
    pub part_i_msg_kinds: BTreeMap<String, u64>,
    pub part_i_all_postproc_of_depolarizing: bool,
    /// routed + constant box input: z-channel always zero capacity
    pub constant_ybox_all_zero_capacity: bool,
    pub theorem3_max: f64,
    pub theorem3_argmax: Option<String>,
    pub theorem3_fig3_value: f64,
    pub lemma4_checked: u64,
    pub lemma4_violations: u64,
    pub lemma4_max_gap: f64,
    pub theorem4_checked: u64,
    pub theorem4_violations: u64,
    pub theorem4_min_slack: f64,
    pub lemma3_family: u64,
    pub lemma3_violations: u64,
    pub lemma3_patterns: BTreeMap<String, u64>,
    /// best PR success over strategies whose message carries z (num/32)
    pub max_success_message_carries_z_halves: u8,
    pub elapsed_ms: u128,
}

struct WorkerState {
    qt: std::sync::Arc<QTable>,
    kind: BoxKind,
    slices: HashMap<u32, SliceInfo>,
    guesses: HashMap<u16, GuessInfo>,
    trip: [Option<f64>; 256],
    zpair: HashMap<u64, ZPairInfo>,
    zpair_depol: HashMap<u64, bool>,
    xpair_class: HashMap<u64, ChannelClass>,
    mview: HashMap<u128, bool>,
    report: Acc,
}

#[derive(Clone)]
struct ZPairInfo {
    class: ChannelClass,
    postproc_ok: bool,
}

#[derive(Default)]
struct Acc {
    perfect_total: u64,
    perfect_routed: u64,
    perfect_message_independent: u64,
    perfect_partial: u64,
    perfect_noise_at_y1: u64,
    postproc_failures: u64,
    first_postproc_failure: Option<(u64, String)>,
    mview_postproc_failures: u64,
    first_mview_failure: Option<(u64, String)>,
    z_classes: BTreeMap<String, u64>,
    routed_pair_classes: BTreeMap<String, u64>,
    routed_nonzero_pair_classes: BTreeMap<String, u64>,
    part_i_msg_kinds: BTreeMap<String, u64>,
    part_i_depol_ok: bool,
    constant_ybox_zero_cap: bool,
    theorem3_max: f64,
    theorem3_argmax: Option<u64>,
    lemma4_checked: u64,
    lemma4_violations: u64,
    lemma4_max_gap: f64,
    theorem4_checked: u64,
    theorem4_violations: u64,
    theorem4_min_slack: f64,
    lemma3_family: u64,
    lemma3_violations: u64,
    lemma3_patterns: BTreeMap<String, u64>,
}

impl Acc {
    fn new() -> Self {
        Self {
            part_i_depol_ok: true,
            constant_ybox_zero_cap: true,
            theorem3_max: f64::NEG_INFINITY,
            theorem4_min_slack: f64::INFINITY,
            ..Default::default()
        }
    }

    fn merge(&mut self, other: Acc) {
        self.perfect_total += other.perfect_total;
        self.perfect_routed += other.perfect_routed;
        self.perfect_message_independent += other.perfect_message_independent;
        self.perfect_partial += other.perfect_partial;
        self.perfect_noise_at_y1 += other.perfect_noise_at_y1;
        self.postproc_failures += other.postproc_failures;
        merge_first(&mut self.first_postproc_failure, other.first_postproc_failure);
        self.mview_postproc_failures += other.mview_postproc_failures;
        merge_first(&mut self.first_mview_failure, other.first_mview_failure);
        merge_map(&mut self.z_classes, other.z_classes);
        merge_map(&mut self.routed_pair_classes, other.routed_pair_classes);
        merge_map(
            &mut self.routed_nonzero_pair_classes,
            other.routed_nonzero_pair_classes,
        );
        merge_map(&mut self.part_i_msg_kinds, other.part_i_msg_kinds);
        self.part_i_depol_ok &= other.part_i_depol_ok;
        self.constant_ybox_zero_cap &= other.constant_ybox_zero_cap;
        if other.theorem3_max > self.theorem3_max
            || (other.theorem3_max == self.theorem3_max
                && match (self.theorem3_argmax, other.theorem3_argmax) {
                    (Some(a), Some(b)) => b < a,
                    (None, Some(_)) => true,
                    _ => false,
                })
        {
            self.theorem3_max = other.theorem3_max;
            self.theorem3_argmax = other.theorem3_argmax;
        }
        self.lemma4_checked += other.lemma4_checked;
        self.lemma4_violations += other.lemma4_violations;
        self.lemma4_max_gap = self.lemma4_max_gap.max(other.lemma4_max_gap);
        self.theorem4_checked += other.theorem4_checked;
        self.theorem4_violations += other.theorem4_violations;
        self.theorem4_min_slack = self.theorem4_min_slack.min(other.theorem4_min_slack);
        self.lemma3_family += other.lemma3_family;
        self.lemma3_violations += other.lemma3_violations;
        merge_map(&mut self.lemma3_patterns, other.lemma3_patterns);
    }
}

fn merge_first(dst: &mut Option<(u64, String)>, src: Option<(u64, String)>) {
    if let Some((idx, s)) = src {
        match dst {
            Some((cur, _)) if *cur <= idx => {}
            _ => *dst = Some((idx, s)),
        }
    }
}

fn merge_map(dst: &mut BTreeMap<String, u64>, src: BTreeMap<String, u64>) {
    for (k, v) in src {
        *dst.entry(k).or_insert(0) += v;
    }
}

fn class_key(c: &ChannelClass) -> String {
    c.to_string()
}

#[allow(clippy::too_many_arguments)]
fn assemble_strategy(
    v0: u8,
    v1: u8,
    msg: u8,
    aout: u8,
    j0: u8,
    p0: u8,
    d0: u16,
    j1: u8,
    p1: u8,
    d1: u16,
) -> DeterministicStrategy {
    DeterministicStrategy {
        encode_x0: v0,
        encode_x1: v1,
        message: msg,
        alice_out: aout,
        bob_input: j0 | (j1 << 1),
        bob_yprime: p0 | (p1 << 2),
        bob_decode: (d0 as u8 & 0xF) | (((d1 as u8) & 0xF) << 4),
    }
}

impl WorkerState {
    fn new(qt: std::sync::Arc<QTable>, kind: BoxKind) -> Self {
        Self {
            qt,
            kind,
            slices: HashMap::new(),
            guesses: HashMap::new(),
            trip: [None; 256],
            zpair: HashMap::new(),
            zpair_depol: HashMap::new(),
            xpair_class: HashMap::new(),
            mview: HashMap::new(),
            report: Acc::new(),
        }
    }

    fn slice(&mut self, v: u8, msg: u8, p: u8) -> SliceInfo {
        let key = (v as u32) | ((msg as u32) << 4) | ((p as u32) << 12);
        if let Some(s) = self.slices.get(&key) {
            return s.clone();
        }
        let s = slice_info(self.kind, v, msg, p);
        self.slices.insert(key, s.clone());
        s
    }

    fn guess(&mut self, v: u8, t: u8) -> GuessInfo {
        let key = (v as u16) | ((t as u16) << 4);
        if let Some(g) = self.guesses.get(&key) {
            return *g;
        }
        let g = guess_info(v, t);
        self.guesses.insert(key, g);
        g
    }

    fn tripartite(&mut self, aout: u8) -> f64 {
        if let Some(v) = self.trip[aout as usize] {
            return v;
        }
        let v = tripartite_aout(aout);
        self.trip[aout as usize] = Some(v);
        v
    }

    fn zpair_info(&mut self, s0: &SliceInfo, s1: &SliceInfo) -> ZPairInfo {
        let key = u64::from(u32::from_le_bytes(s0.zch)) | (u64::from(u32::from_le_bytes(s1.zch)) << 32);
        if let Some(i) = self.zpair.get(&key) {
            return i.clone();
        }
        let ch = pair_channel([&s0.zch, &s1.zch], "z", "w", "y");
        let info = ZPairInfo {
            class: classify_channel(&ch),
            postproc_ok: is_postprocessing_of_erasure(&ch, &half())
                .expect("binary-input channel"),
        };
        self.zpair.insert(key, info.clone());
        info
    }

    fn zpair_depol_ok(&mut self, s0: &SliceInfo, s1: &SliceInfo) -> bool {
        let key = u64::from(u32::from_le_bytes(s0.zch)) | (u64::from(u32::from_le_bytes(s1.zch)) << 32);
        if let Some(&ok) = self.zpair_depol.get(&key) {
            return ok;
        }
        let ch = pair_channel([&s0.zch, &s1.zch], "z", "w", "y");
        let base = depolarizing(&half()).expect("valid depolarizing channel");
        let ok = is_postprocessing_of(&ch, &base).expect("feasibility well posed");
        self.zpair_depol.insert(key, ok);
        ok
    }

    fn xpair(&mut self, s0: &SliceInfo, s1: &SliceInfo) -> ChannelClass {
        let key = u64::from(u32::from_le_bytes(s0.xch)) | (u64::from(u32::from_le_bytes(s1.xch)) << 32);
        if let Some(c) = self.xpair_class.get(&key) {
            return c.clone();
        }
        let ch = pair_channel([&s0.xch, &s1.xch], "x", "w", "y");
        let c = classify_channel(&ch);
        self.xpair_class.insert(key, c.clone());
        c
    }

    fn mview_ok(&mut self, s0: &SliceInfo, s1: &SliceInfo) -> bool {
        let key = u128::from(u64::from_le_bytes(s0.zmch)) | (u128::from(u64::from_le_bytes(s1.zmch)) << 64);
        if let Some(&ok) = self.mview.get(&key) {
            return ok;
        }
        let ch = pair_channel_with_message([&s0.zmch, &s1.zmch]);
        let ok = is_postprocessing_of_erasure(&ch, &half()).expect("binary-input channel");
        self.mview.insert(key, ok);
        ok
    }

    /// Processes one perfect (Alice maps, Bob per-setting choice) group.
    #[allow(clippy::too_many_arguments)]
    fn pair(
        &mut self,
        msg: u8,
        aout: u8,
        v0: u8,
        v1: u8,
        e0: (u8, u8, u16),
        e1: (u8, u8, u16),
        msg_ind: bool,
        routed_p: [[bool; 4]; 2],
        noise_p: [[bool; 4]; 2],
    ) {
        let (j0, p0, d0) = e0;
        let (j1, p1, d1) = e1;
        let count = (d0.count_ones() as u64) * (d1.count_ones() as u64);
        let vj0 = if j0 == 0 { v0 } else { v1 };
        let vj1 = if j1 == 0 { v0 } else { v1 };
        let s0 = self.slice(vj0, msg, p0);
        let s1 = self.slice(vj1, msg, p1);
        let routed = routed_p[0][p0 as usize] && routed_p[1][p1 as usize];
        debug_assert_eq!(routed, s0.routed && s1.routed);

        self.report.perfect_total += count;
        let branch = if routed {
            self.report.perfect_routed += count;
            "part_ii"
        } else if msg_ind {
            self.report.perfect_message_independent += count;
            "part_i"
        } else {
            self.report.perfect_partial += count;
            "partial"
        };
        if noise_p[1][p1 as usize] {
            self.report.perfect_noise_at_y1 += count;
        }

        let strategy_desc = || {
            assemble_strategy(
                v0,
                v1,
                msg,
                aout,
                j0,
                p0,
                d0 & d0.wrapping_neg(),
                j1,
                p1,
                d1 & d1.wrapping_neg(),
            )
        };

        // Theorem 1: the z-channel must be a postprocessing of Erasure(1/2)
        let zp = self.zpair_info(&s0, &s1);
        if !zp.postproc_ok {
            self.report.postproc_failures += count;
            let s = strategy_desc();
            merge_first(
                &mut self.report.first_postproc_failure,
                Some((s.to_index(), s.to_string())),
            );
        }
        if !self.mview_ok(&s0, &s1) {
            self.report.mview_postproc_failures += count;
            let s = strategy_desc();
            merge_first(
                &mut self.report.first_mview_failure,
                Some((s.to_index(), s.to_string())),
            );
        }
        *self
            .report
            .z_classes
            .entry(format!("{branch}/{}", class_key(&zp.class)))
            .or_insert(0) += count;

        if branch == "part_i" {
            let kind = if msg == super::mask_xza(|x, _z, _a| x)
                || msg == super::mask_xza(|x, _z, _a| x ^ 1)
            {
                "carries_x"
            } else if msg == 0 || msg == 0xFF {
                "const"
            } else if msg == super::mask_xza(|_x, z, _a| z)
                || msg == super::mask_xza(|_x, z, _a| z ^ 1)
            {
                "carries_z"
            } else {
                "other"
            };
            *self
                .report
                .part_i_msg_kinds
                .entry(kind.to_string())
                .or_insert(0) += count;
            if !self.zpair_depol_ok(&s0, &s1) {
                self.report.part_i_depol_ok = false;
            }
        }

        if routed {
            let xc = self.xpair(&s0, &s1);
            let pair_key = format!("{}|{}", class_key(&xc), class_key(&zp.class));
            *self
                .report
                .routed_pair_classes
                .entry(pair_key.clone())
                .or_insert(0) += count;
            if xc.kind != ChannelKind::ZeroCapacity && zp.class.kind != ChannelKind::ZeroCapacity
            {
                *self
                    .report
                    .routed_nonzero_pair_classes
                    .entry(pair_key)
                    .or_insert(0) += count;
            }
            if j0 == j1 && zp.class.kind != ChannelKind::ZeroCapacity {
                self.report.constant_ybox_zero_cap = false;
            }

            // Theorem 3: I(z : bt, yt, y, s) with s = the communicated a-tilde
            let i3 = 1.0 - 0.5 * (routed_hz_given_bt(vj0) + routed_hz_given_bt(vj1));
            let idx = strategy_desc().to_index();
            if i3 > self.report.theorem3_max + 1e-15 {
                self.report.theorem3_max = i3;
                self.report.theorem3_argmax = Some(idx);
            } else if (i3 - self.report.theorem3_max).abs() <= 1e-15 {
                match self.report.theorem3_argmax {
                    Some(cur) if cur <= idx => {}
                    _ => {
                        self.report.theorem3_max = i3.max(self.report.theorem3_max);
                        self.report.theorem3_argmax = Some(idx);
                    }
                }
            }

            // Lemma 4 equalities on both settings
            let t0 = aout;
            let t1 = aout ^ XMASK;
            let g0 = self.guess(vj0, t0);
            let g1 = self.guess(vj1, t1);
            self.report.lemma4_checked += count;
            self.report.lemma4_max_gap = self.report.lemma4_max_gap.max(g0.gap.max(g1.gap));
            if g0.gap > 1e-12 || g1.gap > 1e-12 {
                self.report.lemma4_violations += count;
            }

            // the trade-off inequality
            let lhs = 0.5 * g1.mutual + 0.5 * g0.mutual + 0.5 * (routed_i_z(vj0) + routed_i_z(vj1));
            let rhs = 0.5 * self.tripartite(aout) + 0.5 * (routed_h_bt(vj0) + routed_h_bt(vj1));
            self.report.theorem4_checked += count;
            self.report.theorem4_min_slack = self.report.theorem4_min_slack.min(rhs - lhs);
            if lhs > rhs + 1e-12 {
                self.report.theorem4_violations += count;
            }

            // vanishing-support lemma on its premise family: decode ignores
            // the message and Alice's output depends on x alone
            if AOUT_X_ONLY.contains(&aout) {
                let free = ((d0 & MFREE_D).count_ones() as u64) * ((d1 & MFREE_D).count_ones() as u64);
                if free > 0 {
                    self.report.lemma3_family += free;
                    let supp = support_masks(vj0, vj1);
                    let violated = supp.iter().any(|&s| s == 0xF);
                    if violated {
                        self.report.lemma3_violations += free;
                    }
                    let label = pattern_label(canonical_pattern(supp));
                    *self.report.lemma3_patterns.entry(label).or_insert(0) += free;
                }
            }
        }
    }
}

/// Runs the exhaustive sweep for one box kind.
pub fn sweep_theorem1(kind: BoxKind, parallelism: usize) -> Result<TheoremSweepReport> {
    let start = std::time::Instant::now();
    let qt = std::sync::Arc::new(QTable::build(kind));
    let parallelism = parallelism.max(1);
    let chunk = 256usize.div_ceil(parallelism);
    let mut partials: Vec<Acc> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..parallelism {
            let lo = t * chunk;
            let hi = ((t + 1) * chunk).min(256);
            if lo >= hi {
                continue;
            }
            let qt = qt.clone();
            handles.push(scope.spawn(move || {
                let mut st = WorkerState::new(qt, kind);
                for msg in lo..hi {
                    sweep_msg(&mut st, msg as u8);
                }
                st.report
            }));
        }
        for h in handles {
            partials.push(h.join().expect("sweep worker panicked"));
        }
    });
    let mut acc = Acc::new();
    for p in partials {
        acc.merge(p);
    }

    // best PR success when the message carries z (and hence cannot route
    // a-tilde): scan the two z-carrying message maps
    let mut best_z_halves = 0u8;
    for msg in [
        super::mask_xza(|_x, z, _a| z),
        super::mask_xza(|_x, z, _a| z ^ 1),
    ] {
        for aout in 0..=255u8 {
            let t0 = aout;
            let t1 = aout ^ XMASK;
            let b0 = (0..16u8)
                .map(|v| slice_max_success_halves(kind, v, msg, t0))
                .max()
                .unwrap();
            let b1 = (0..16u8)
                .map(|v| slice_max_success_halves(kind, v, msg, t1))
                .max()
                .unwrap();
            best_z_halves = best_z_halves.max(b0 + b1);
        }
    }

    // the protocol strategy's message-bound value, from the same slice data
    let fig3 = super::fig3_strategy();
    let fig3_i3 = 1.0
        - 0.5
            * (routed_hz_given_bt(fig3.encode_x0) + routed_hz_given_bt(fig3.encode_x1));

    Ok(TheoremSweepReport {
        box_kind: kind.name().to_string(),
        total_strategies: super::strategy_space_size(),
        perfect_total: acc.perfect_total,
        perfect_routed: acc.perfect_routed,
        perfect_message_independent: acc.perfect_message_independent,
        perfect_partial: acc.perfect_partial,
        perfect_noise_at_y1: acc.perfect_noise_at_y1,
        postproc_failures: acc.postproc_failures,
        first_postproc_failure: acc.first_postproc_failure.map(|(_, s)| s),
        mview_postproc_failures: acc.mview_postproc_failures,
        first_mview_failure: acc.first_mview_failure.map(|(_, s)| s),
        z_classes: acc.z_classes,
        routed_pair_classes: acc.routed_pair_classes,
        routed_nonzero_pair_classes: acc.routed_nonzero_pair_classes,
        part_i_msg_kinds: acc.part_i_msg_kinds,
        part_i_all_postproc_of_depolarizing: acc.part_i_depol_ok,
        constant_ybox_all_zero_capacity: acc.constant_ybox_zero_cap,
        theorem3_max: acc.theorem3_max,
        theorem3_argmax: acc
            .theorem3_argmax
            .map(|i| DeterministicStrategy::from_index(i).expect("in range").to_string()),
        theorem3_fig3_value: fig3_i3,
        lemma4_checked: acc.lemma4_checked,
        lemma4_violations: acc.lemma4_violations,
        lemma4_max_gap: acc.lemma4_max_gap,
        theorem4_checked: acc.theorem4_checked,
        theorem4_violations: acc.theorem4_violations,
        theorem4_min_slack: acc.theorem4_min_slack,
        lemma3_family: acc.lemma3_family,
        lemma3_violations: acc.lemma3_violations,
        lemma3_patterns: acc.lemma3_patterns,
        max_success_message_carries_z_halves: best_z_halves,
        elapsed_ms: start.elapsed().as_millis(),
    })
}

fn sweep_msg(st: &mut WorkerState, msg: u8) {
    // routedness of a (y-slice, p) choice depends on (msg, p) alone
    let mut routed_p = [[true; 4]; 2];
    let mut noise_p = [[true; 4]; 2];
    for p in 0..4u8 {
        let mut all = true;
        let mut none = true;
        for x in 0..2u8 {
            for z in 0..2u8 {
                for a in 0..2u8 {
                    let m = (msg >> idx_xza(x, z, a)) & 1;
                    if ypr_bit(p, m) == a {
                        none = false;
                    } else {
                        all = false;
                    }
                }
            }
        }
        for y in 0..2usize {
            routed_p[y][p as usize] = all;
            noise_p[y][p as usize] = none;
        }
    }
    let msg_ind = {
        let mut ind = true;
        for x in 0..2u8 {
            for z in 0..2u8 {
                ind &= ((msg >> idx_xza(x, z, 0)) & 1) == ((msg >> idx_xza(x, z, 1)) & 1);
            }
        }
        ind
    };

    for aout in 0..=255u8 {
        let t0 = aout;
        let t1 = aout ^ XMASK;
        let mut q0v = [0u64; 16];
        let mut q1v = [0u64; 16];
        let mut tot0 = [0u32; 16];
        let mut tot1 = [0u32; 16];
        let mut any = false;
        for v in 0..16u8 {
            q0v[v as usize] = st.qt.get(v, msg, t0);
            q1v[v as usize] = st.qt.get(v, msg, t1);
            tot0[v as usize] = q0v[v as usize].count_ones();
            tot1[v as usize] = q1v[v as usize].count_ones();
            any |= tot0[v as usize] > 0 || tot1[v as usize] > 0;
        }
        if !any {
            continue;
        }
        for v0 in 0..16usize {
            for v1 in 0..16usize {
                let s0_total = tot0[v0] + tot0[v1];
                let s1_total = tot1[v0] + tot1[v1];
                if s0_total == 0 || s1_total == 0 {
                    continue;
                }
                // per-setting entries: (j, p, d-mask)
                let mut entries0: Vec<(u8, u8, u16)> = Vec::with_capacity(8);
                let mut entries1: Vec<(u8, u8, u16)> = Vec::with_capacity(8);
                for (j, v) in [(0u8, v0), (1u8, v1)] {
                    for p in 0..4u8 {
                        let d0 = ((q0v[v] >> (16 * p as u64)) & 0xFFFF) as u16;
                        if d0 != 0 {
                            entries0.push((j, p, d0));
                        }
                        let d1 = ((q1v[v] >> (16 * p as u64)) & 0xFFFF) as u16;
                        if d1 != 0 {
                            entries1.push((j, p, d1));
                        }
                    }
                }
                for &e0 in &entries0 {
                    for &e1 in &entries1 {
                        st.pair(
                            msg, aout, v0 as u8, v1 as u8, e0, e1, msg_ind, routed_p, noise_p,
                        );
                    }
                }
            }
        }
    }
}

// --- fast single-strategy evaluation (bridge to the reference semantics) --------

/// PR success in half-units out of 32 for one strategy, uniform inputs.
pub fn fast_success_halves(s: &DeterministicStrategy, kind: BoxKind) -> u32 {
    let mut halves = 0u32;
    for x in 0..2u8 {
        for z in 0..2u8 {
            for y in 0..2u8 {
                for a in 0..2u8 {
                    let m = s.message_bit(x, z, a);
                    let j = s.bob_input_bit(y);
                    let v = if j == 0 { s.encode_x0 } else { s.encode_x1 };
                    let w = (v >> idx_xz(x, z)) & 1;
                    let t = s.alice_out_bit(x, z, a) ^ (x & y);
                    let routed = s.bob_yprime_bit(y, m) == a;
                    halves += if routed {
                        2 * u32::from(s.bob_decode_bit(y, w, m) == t)
                    } else {
                        match kind {
                            BoxKind::Signalling => {
                                u32::from(s.bob_decode_bit(y, 0, m) == t)
                                    + u32::from(s.bob_decode_bit(y, 1, m) == t)
                            }
                            BoxKind::Nonsignalling => {
                                2 * u32::from(s.bob_decode_bit(y, w ^ 1, m) == t)
                            }
                        }
                    };
                }
            }
        }
    }
    halves
}

/// The z-channel of one strategy computed through the slice tables.
pub fn fast_induced_channel(s: &DeterministicStrategy, kind: BoxKind) -> ClassicalChannel {
    let p0 = s.bob_yprime & 0x3;
    let p1 = (s.bob_yprime >> 2) & 0x3;
    let v0 = if s.bob_input_bit(0) == 0 { s.encode_x0 } else { s.encode_x1 };
    let v1 = if s.bob_input_bit(1) == 0 { s.encode_x0 } else { s.encode_x1 };
    let s0 = slice_info(kind, v0, s.message, p0);
    let s1 = slice_info(kind, v1, s.message, p1);
    pair_channel([&s0.zch, &s1.zch], "z", "w", "y")
}

/// PR success as an exact fraction.
pub fn fast_success(s: &DeterministicStrategy, kind: BoxKind) -> Rational {
    q(fast_success_halves(s, kind) as i64, 32)
}
