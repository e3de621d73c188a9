//! Classical pre/post-processing circuits around a box: input fixing, XOR
//! gates, an optional one-bit Alice-to-Bob message, shared and local
//! randomness — plus the named simulation protocols built from them.
//!
//! Box-side variables are referenced with a `~` prefix to keep the inner
//! box's namespace separate from the protocol's.

use crate::boxes::BipartiteBox;
use crate::channel::{classify_channel, ChannelClass, ClassicalChannel};
use crate::joint::JointDistribution;
use crate::rational::{q, q0, q1, Rational};
use crate::vars::{space_size, values_of, VariableSpec};
use crate::{Error, Result};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};

// --- boolean expressions -----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(u8),
    Var(String),
    Not(Box<Expr>),
    Xor(Vec<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    /// mux(c, e0, e1): e0 when c = 0, e1 when c = 1
    Mux(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    pub fn xor2(a: Expr, b: Expr) -> Expr {
        Expr::Xor(vec![a, b])
    }

    pub fn eval(&self, env: &BTreeMap<String, u8>) -> Result<u8> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Var(name) => *env
                .get(name)
                .ok_or_else(|| Error::UnknownVariable(name.clone()))?,
            Expr::Not(e) => e.eval(env)? ^ 1,
            Expr::Xor(es) => {
                let mut acc = 0;
                for e in es {
                    acc ^= e.eval(env)?;
                }
                acc
            }
            Expr::And(es) => {
                let mut acc = 1;
                for e in es {
                    acc &= e.eval(env)?;
                }
                acc
            }
            Expr::Or(es) => {
                let mut acc = 0;
                for e in es {
                    acc |= e.eval(env)?;
                }
                acc
            }
            Expr::Mux(c, e0, e1) => {
                if c.eval(env)? == 0 {
                    e0.eval(env)?
                } else {
                    e1.eval(env)?
                }
            }
        })
    }

    pub fn variables(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(n) => {
                out.insert(n.clone());
            }
            Expr::Not(e) => e.variables(out),
            Expr::Xor(es) | Expr::And(es) | Expr::Or(es) => {
                for e in es {
                    e.variables(out);
                }
            }
            Expr::Mux(c, a, b) => {
                c.variables(out);
                a.variables(out);
                b.variables(out);
            }
        }
    }

    pub fn parse(s: &str) -> Result<Expr> {
        let mut p = ExprParser {
            chars: s.chars().collect(),
            pos: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.chars.len() {
            return Err(Error::Parse {
                line: 0,
                msg: format!("trailing input in expression `{s}`"),
            });
        }
        Ok(e)
    }
}

impl std::fmt::Display for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(n) => write!(f, "{n}"),
            Expr::Not(e) => write!(f, "not({e})"),
            Expr::Xor(es) => write_call(f, "xor", es),
            Expr::And(es) => write_call(f, "and", es),
            Expr::Or(es) => write_call(f, "or", es),
            Expr::Mux(c, a, b) => write!(f, "mux({c}, {a}, {b})"),
        }
    }
}

fn write_call(f: &mut std::fmt::Formatter<'_>, name: &str, es: &[Expr]) -> std::fmt::Result {
    write!(f, "{name}(")?;
    for (i, e) in es.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{e}")?;
    }
    write!(f, ")")
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: 0,
            msg: msg.into(),
        }
    }

    fn ident(&mut self) -> String {
        let start = self.pos;
        if self.peek() == Some('~') {
            self.pos += 1;
        }
        while self
            .peek()
            .map(|c| c.is_ascii_alphanumeric() || c == '_')
            .unwrap_or(false)
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn expr(&mut self) -> Result<Expr> {
        self.skip_ws();
        match self.peek() {
            Some('0') => {
                self.pos += 1;
                Ok(Expr::Const(0))
            }
            Some('1') => {
                self.pos += 1;
                Ok(Expr::Const(1))
            }
            Some(c) if c == '~' || c.is_ascii_alphabetic() || c == '_' => {
                let name = self.ident();
                self.skip_ws();
                if self.peek() == Some('(') {
                    self.pos += 1;
                    let mut args = Vec::new();
                    loop {
                        args.push(self.expr()?);
                        self.skip_ws();
                        match self.peek() {
                            Some(',') => self.pos += 1,
                            Some(')') => {
                                self.pos += 1;
                                break;
                            }
                            _ => return Err(self.err("expected `,` or `)`")),
                        }
                    }
                    match (name.as_str(), args.len()) {
                        ("not", 1) => Ok(Expr::Not(Box::new(args.remove(0)))),
                        ("xor", _) => Ok(Expr::Xor(args)),
                        ("and", _) => Ok(Expr::And(args)),
                        ("or", _) => Ok(Expr::Or(args)),
                        ("mux", 3) => {
                            let b = args.pop().unwrap();
                            let a = args.pop().unwrap();
                            let c = args.pop().unwrap();
                            Ok(Expr::Mux(Box::new(c), Box::new(a), Box::new(b)))
                        }
                        _ => Err(self.err(format!(
                            "unknown function `{name}` with {} arguments",
                            args.len()
                        ))),
                    }
                } else {
                    Ok(Expr::Var(name))
                }
            }
            other => Err(self.err(format!("unexpected character {other:?}"))),
        }
    }
}

// --- wirings ------------------------------------------------------------------

/// A classical wiring: deterministic maps around one inner box, an optional
/// one-bit message from Alice to Bob, and declared uniform random bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wiring {
    pub alice_inputs: Vec<VariableSpec>,
    pub alice_outputs: Vec<VariableSpec>,
    pub bob_inputs: Vec<VariableSpec>,
    pub bob_outputs: Vec<VariableSpec>,
    /// shared uniform random bits, visible to both parties
    pub shared: Vec<String>,
    pub alice_rand: Vec<String>,
    pub bob_rand: Vec<String>,
    /// assignments to the inner box's Alice inputs (targets without `~`)
    pub alice_pre: Vec<(String, Expr)>,
    /// the one communicated bit; may read Alice's box outputs (`~` names)
    pub message: Option<Expr>,
    pub bob_pre: Vec<(String, Expr)>,
    pub alice_post: Vec<(String, Expr)>,
    pub bob_post: Vec<(String, Expr)>,
}

const MESSAGE_NAME: &str = "m";

impl Wiring {
    /// Structural validation: variable scoping, the one-c-bit budget, and
    /// target coverage of the protocol outputs.
    pub fn validate(&self) -> Result<()> {
        crate::vars::check_unique_names([
            &self.alice_inputs[..],
            &self.alice_outputs[..],
            &self.bob_inputs[..],
            &self.bob_outputs[..],
        ])?;
        let mut reserved: BTreeSet<String> = BTreeSet::new();
        for v in self
            .alice_inputs
            .iter()
            .chain(&self.alice_outputs)
            .chain(&self.bob_inputs)
            .chain(&self.bob_outputs)
        {
            reserved.insert(v.name.clone());
        }
        for r in self.shared.iter().chain(&self.alice_rand).chain(&self.bob_rand) {
            if !reserved.insert(r.clone()) {
                return Err(Error::DuplicateVariable(r.clone()));
            }
        }
        if reserved.contains(MESSAGE_NAME) {
            return Err(Error::Wiring(format!(
                "the name `{MESSAGE_NAME}` is reserved for the communicated bit"
            )));
        }

        let alice_scope: BTreeSet<&str> = self
            .alice_inputs
            .iter()
            .map(|v| v.name.as_str())
            .chain(self.shared.iter().map(String::as_str))
            .chain(self.alice_rand.iter().map(String::as_str))
            .collect();
        let bob_scope: BTreeSet<&str> = self
            .bob_inputs
            .iter()
            .map(|v| v.name.as_str())
            .chain(self.shared.iter().map(String::as_str))
            .chain(self.bob_rand.iter().map(String::as_str))
            .collect();

        let message_declared = self.message.is_some();
        let check = |expr: &Expr,
                     scope: &BTreeSet<&str>,
                     allow_box: bool,
                     allow_m: bool,
                     what: &str|
         -> Result<()> {
            let mut used = BTreeSet::new();
            expr.variables(&mut used);
            for v in used {
                if v.starts_with('~') {
                    if !allow_box {
                        return Err(Error::Wiring(format!(
                            "{what} may not read box variable `{v}`"
                        )));
                    }
                } else if v == MESSAGE_NAME {
                    if !allow_m {
                        return Err(Error::Wiring(format!("{what} may not read `{MESSAGE_NAME}`")));
                    }
                    if !message_declared {
                        return Err(Error::BudgetViolation(format!(
                            "{what} reads `{MESSAGE_NAME}` but the wiring declares no message"
                        )));
                    }
                } else if !scope.contains(v.as_str()) {
                    return Err(Error::Wiring(format!(
                        "{what} references `{v}` outside its party's scope"
                    )));
                }
            }
            Ok(())
        };

        for (t, e) in &self.alice_pre {
            check(e, &alice_scope, false, false, &format!("alice_pre {t}"))?;
        }
        if let Some(m) = &self.message {
            check(m, &alice_scope, true, false, "message")?;
        }
        for (t, e) in &self.bob_pre {
            check(e, &bob_scope, false, true, &format!("bob_pre {t}"))?;
        }
        for (t, e) in &self.alice_post {
            check(e, &alice_scope, true, false, &format!("alice_post {t}"))?;
        }
        for (t, e) in &self.bob_post {
            check(e, &bob_scope, true, true, &format!("bob_post {t}"))?;
        }

        let post_targets =
            |posts: &[(String, Expr)], declared: &[VariableSpec], who: &str| -> Result<()> {
                let targets: BTreeSet<&str> = posts.iter().map(|(t, _)| t.as_str()).collect();
                let want: BTreeSet<&str> = declared.iter().map(|v| v.name.as_str()).collect();
                if targets.len() != posts.len() {
                    return Err(Error::Wiring(format!("{who} assigns a target twice")));
                }
                if targets != want {
                    return Err(Error::Wiring(format!(
                        "{who} must assign exactly the declared outputs {want:?}, got {targets:?}"
                    )));
                }
                Ok(())
            };
        post_targets(&self.alice_post, &self.alice_outputs, "alice_post")?;
        post_targets(&self.bob_post, &self.bob_outputs, "bob_post")?;
        Ok(())
    }

    fn message_reads_box_outputs(&self) -> bool {
        self.message
            .as_ref()
            .map(|m| {
                let mut used = BTreeSet::new();
                m.variables(&mut used);
                used.iter().any(|v| v.starts_with('~'))
            })
            .unwrap_or(false)
    }
}

/// An inner box together with a wiring around it.
#[derive(Debug, Clone)]
pub struct WiredBox {
    pub inner: BipartiteBox,
    pub wiring: Wiring,
}

impl WiredBox {
    pub fn effective(&self) -> Result<BipartiteBox> {
        compose(&self.inner, &self.wiring)
    }
}

/// Composes a wiring with an inner box, summing over the inner box's
/// outcomes and all declared randomness. The result is an exact box over the
/// protocol-level variables.
///
/// When the message reads Alice's box outputs, Bob's box inputs depend on
/// them, which is only meaningful for boxes that are nonsignalling from Bob
/// to Alice (Alice's marginal is then well defined before Bob's inputs are
/// chosen). That property is verified before composing.
pub fn compose(inner: &BipartiteBox, wiring: &Wiring) -> Result<BipartiteBox> {
    wiring.validate()?;
    let cover = |pre: &[(String, Expr)], want: &[VariableSpec], who: &str| -> Result<()> {
        let targets: BTreeSet<&str> = pre.iter().map(|(t, _)| t.as_str()).collect();
        let want_set: BTreeSet<&str> = want.iter().map(|v| v.name.as_str()).collect();
        if targets.len() != pre.len() || targets != want_set {
            return Err(Error::Wiring(format!(
                "{who} must assign exactly the inner box inputs {want_set:?}, got {targets:?}"
            )));
        }
        Ok(())
    };
    cover(&wiring.alice_pre, inner.alice_inputs(), "alice_pre")?;
    cover(&wiring.bob_pre, inner.bob_inputs(), "bob_pre")?;

    // Alice-side box references must be Alice box outputs, Bob-side Bob's.
    let alice_box: BTreeSet<String> = inner
        .alice_outputs()
        .iter()
        .map(|v| format!("~{}", v.name))
        .collect();
    let bob_box: BTreeSet<String> = inner
        .bob_outputs()
        .iter()
        .map(|v| format!("~{}", v.name))
        .collect();
    let side_check = |e: &Expr, allowed: &BTreeSet<String>, what: &str| -> Result<()> {
        let mut used = BTreeSet::new();
        e.variables(&mut used);
        for v in used {
            if v.starts_with('~') && !allowed.contains(&v) {
                return Err(Error::Wiring(format!(
                    "{what} reads `{v}`, which is not visible to that party"
                )));
            }
        }
        Ok(())
    };
    if let Some(m) = &wiring.message {
        side_check(m, &alice_box, "message")?;
    }
    for (t, e) in &wiring.alice_post {
        side_check(e, &alice_box, &format!("alice_post {t}"))?;
    }
    for (t, e) in &wiring.bob_post {
        side_check(e, &bob_box, &format!("bob_post {t}"))?;
    }

    let sequential = wiring.message_reads_box_outputs();
    if sequential && crate::boxes::check_nonsignalling(inner)?.b_to_a {
        return Err(Error::Precondition(
            "message reads Alice's box outputs, but the inner box signals Bob to Alice".into(),
        ));
    }

    let proto_in: Vec<VariableSpec> = wiring
        .alice_inputs
        .iter()
        .chain(&wiring.bob_inputs)
        .cloned()
        .collect();
    let proto_out: Vec<VariableSpec> = wiring
        .alice_outputs
        .iter()
        .chain(&wiring.bob_outputs)
        .cloned()
        .collect();
    let rand_bits: Vec<String> = wiring
        .shared
        .iter()
        .chain(&wiring.alice_rand)
        .chain(&wiring.bob_rand)
        .cloned()
        .collect();
    let n_rand = rand_bits.len();
    let rand_weight = q(1, 1i64 << n_rand);

    let inner_in = inner.input_vars();
    let inner_aout = inner.alice_outputs().to_vec();
    let inner_bout = inner.bob_outputs().to_vec();
    let inner_out = inner.output_vars();
    let n_inner_bout = space_size(&inner_bout);

    let mut table = vec![vec![q0(); space_size(&proto_out)]; space_size(&proto_in)];

    for in_idx in 0..space_size(&proto_in) {
        let in_vals = values_of(&proto_in, in_idx);
        for rnd in 0..1usize << n_rand {
            let mut env: BTreeMap<String, u8> = BTreeMap::new();
            for (v, val) in proto_in.iter().zip(&in_vals) {
                env.insert(v.name.clone(), *val);
            }
            for (i, r) in rand_bits.iter().enumerate() {
                env.insert(r.clone(), ((rnd >> i) & 1) as u8);
            }
            let mut alice_in_vals = vec![0u8; inner.alice_inputs().len()];
            for (t, e) in &wiring.alice_pre {
                let pos = crate::vars::position(inner.alice_inputs(), t)?;
                alice_in_vals[pos] = e.eval(&env)?;
            }

            let emit = |env: &BTreeMap<String, u8>,
                            weight: Rational,
                            table: &mut Vec<Vec<Rational>>|
             -> Result<()> {
                let mut out_vals = vec![0u8; proto_out.len()];
                for (t, e) in wiring.alice_post.iter().chain(&wiring.bob_post) {
                    let pos = crate::vars::position(&proto_out, t)?;
                    out_vals[pos] = e.eval(env)?;
                }
                let out_idx = crate::vars::index_of(&proto_out, &out_vals);
                table[in_idx][out_idx] += weight;
                Ok(())
            };

            if sequential {
                // Alice's marginal is Bob-input independent (checked above):
                // evaluate it at Bob inputs all zero.
                let probe_idx = {
                    let mut vals = alice_in_vals.clone();
                    vals.extend(vec![0u8; inner.bob_inputs().len()]);
                    crate::vars::index_of(&inner_in, &vals)
                };
                for a_idx in 0..space_size(&inner_aout) {
                    let mut p_a = q0();
                    for b_idx in 0..n_inner_bout {
                        p_a += inner.prob(probe_idx, a_idx * n_inner_bout + b_idx);
                    }
                    if p_a.is_zero() {
                        continue;
                    }
                    let a_vals = values_of(&inner_aout, a_idx);
                    let mut env_a = env.clone();
                    for (v, val) in inner_aout.iter().zip(&a_vals) {
                        env_a.insert(format!("~{}", v.name), *val);
                    }
                    let m = wiring
                        .message
                        .as_ref()
                        .expect("sequential implies message")
                        .eval(&env_a)?;
                    env_a.insert(MESSAGE_NAME.to_string(), m);
                    let mut bob_in_vals = vec![0u8; inner.bob_inputs().len()];
                    for (t, e) in &wiring.bob_pre {
                        let pos = crate::vars::position(inner.bob_inputs(), t)?;
                        bob_in_vals[pos] = e.eval(&env_a)?;
                    }
                    let full_idx = {
                        let mut vals = alice_in_vals.clone();
                        vals.extend(bob_in_vals);
                        crate::vars::index_of(&inner_in, &vals)
                    };
                    for b_idx in 0..n_inner_bout {
                        let p_ab = inner.prob(full_idx, a_idx * n_inner_bout + b_idx);
                        if p_ab.is_zero() {
                            continue;
                        }
                        let b_vals = values_of(&inner_bout, b_idx);
                        let mut env_ab = env_a.clone();
                        for (v, val) in inner_bout.iter().zip(&b_vals) {
                            env_ab.insert(format!("~{}", v.name), *val);
                        }
                        // p(a|x) * p(b|x,y,a) = p(a,b|x,y): use the joint entry
                        emit(&env_ab, rand_weight.clone() * p_ab.clone(), &mut table)?;
                    }
                }
            } else {
                let mut env_m = env.clone();
                if let Some(mex) = &wiring.message {
                    let m = mex.eval(&env)?;
                    env_m.insert(MESSAGE_NAME.to_string(), m);
                }
                let mut bob_in_vals = vec![0u8; inner.bob_inputs().len()];
                for (t, e) in &wiring.bob_pre {
                    let pos = crate::vars::position(inner.bob_inputs(), t)?;
                    bob_in_vals[pos] = e.eval(&env_m)?;
                }
                let full_idx = {
                    let mut vals = alice_in_vals.clone();
                    vals.extend(bob_in_vals);
                    crate::vars::index_of(&inner_in, &vals)
                };
                for out_idx in 0..space_size(&inner_out) {
                    let p = inner.prob(full_idx, out_idx);
                    if p.is_zero() {
                        continue;
                    }
                    let out_vals = values_of(&inner_out, out_idx);
                    let mut env_o = env_m.clone();
                    for (v, val) in inner_out.iter().zip(&out_vals) {
                        env_o.insert(format!("~{}", v.name), *val);
                    }
                    emit(&env_o, rand_weight.clone() * p.clone(), &mut table)?;
                }
            }
        }
    }

    BipartiteBox::new(
        wiring.alice_inputs.clone(),
        wiring.alice_outputs.clone(),
        wiring.bob_inputs.clone(),
        wiring.bob_outputs.clone(),
        table,
    )
}

// --- the named wirings --------------------------------------------------------

fn bits(names: &[&str]) -> Vec<VariableSpec> {
    names.iter().map(|n| VariableSpec::bit(*n)).collect()
}

/// Pass-through wiring on the PR signature.
pub fn identity_pr_wiring() -> Wiring {
    Wiring {
        alice_inputs: bits(&["x"]),
        alice_outputs: bits(&["a"]),
        bob_inputs: bits(&["y"]),
        bob_outputs: bits(&["b"]),
        shared: vec![],
        alice_rand: vec![],
        bob_rand: vec![],
        alice_pre: vec![("x".into(), Expr::var("x"))],
        message: None,
        bob_pre: vec![("y".into(), Expr::var("y"))],
        alice_post: vec![("a".into(), Expr::var("~a"))],
        bob_post: vec![("b".into(), Expr::var("~b"))],
    }
}

/// Simulation of the nonsignalling racbox with a PR-box: C-NOTs fold the two
/// Alice bits into x = x0 XOR x1 and correct the outputs with x0 and y'.
pub fn pr_to_racbox_wiring() -> Wiring {
    Wiring {
        alice_inputs: bits(&["x0", "x1"]),
        alice_outputs: bits(&["a"]),
        bob_inputs: bits(&["y", "yp"]),
        bob_outputs: bits(&["b"]),
        shared: vec![],
        alice_rand: vec![],
        bob_rand: vec![],
        alice_pre: vec![("x".into(), Expr::xor2(Expr::var("x0"), Expr::var("x1")))],
        message: None,
        bob_pre: vec![("y".into(), Expr::var("y"))],
        alice_post: vec![("a".into(), Expr::xor2(Expr::var("~a"), Expr::var("x0")))],
        bob_post: vec![("b".into(), Expr::xor2(Expr::var("~b"), Expr::var("yp")))],
    }
}

/// Simulation of the PR-box with a racbox: fix x0 = 0 and y' = 0, route the
/// protocol inputs into x1 and y. Cancels the C-NOTs of the converse wiring.
pub fn racbox_to_pr_wiring() -> Wiring {
    Wiring {
        alice_inputs: bits(&["x"]),
        alice_outputs: bits(&["a"]),
        bob_inputs: bits(&["y"]),
        bob_outputs: bits(&["b"]),
        shared: vec![],
        alice_rand: vec![],
        bob_rand: vec![],
        alice_pre: vec![
            ("x0".into(), Expr::Const(0)),
            ("x1".into(), Expr::var("x")),
        ],
        message: None,
        bob_pre: vec![
            ("y".into(), Expr::var("y")),
            ("yp".into(), Expr::Const(0)),
        ],
        alice_post: vec![("a".into(), Expr::var("~a"))],
        bob_post: vec![("b".into(), Expr::var("~b"))],
    }
}

/// Racbox plus one communicated bit: Alice sends her output a, Bob feeds it
/// into y'. The composed box is a perfect RAC (Alice's output is dropped).
pub fn racbox_plus_cbit_wiring() -> Wiring {
    Wiring {
        alice_inputs: bits(&["x0", "x1"]),
        alice_outputs: vec![],
        bob_inputs: bits(&["y"]),
        bob_outputs: bits(&["b"]),
        shared: vec![],
        alice_rand: vec![],
        bob_rand: vec![],
        alice_pre: vec![
            ("x0".into(), Expr::var("x0")),
            ("x1".into(), Expr::var("x1")),
        ],
        message: Some(Expr::var("~a")),
        bob_pre: vec![
            ("y".into(), Expr::var("y")),
            ("yp".into(), Expr::var(MESSAGE_NAME)),
        ],
        alice_post: vec![],
        bob_post: vec![("b".into(), Expr::var("~b"))],
    }
}

/// RAC used as a PR-box plus an erasure channel: Alice inputs the message z
/// into x0 and her PR input x into x1; outputs are built from the shared
/// random bit s, with Bob's C-NOT correction at y = 1. Bob's extra output w
/// is the raw RAC bit, i.e. the received message.
pub fn rac_to_pr_erasure_wiring() -> Wiring {
    Wiring {
        alice_inputs: bits(&["x", "z"]),
        alice_outputs: bits(&["a"]),
        bob_inputs: bits(&["y"]),
        bob_outputs: bits(&["b", "w"]),
        shared: vec!["s".into()],
        alice_rand: vec![],
        bob_rand: vec![],
        alice_pre: vec![
            ("x0".into(), Expr::var("z")),
            ("x1".into(), Expr::var("x")),
        ],
        message: None,
        bob_pre: vec![("y".into(), Expr::var("y"))],
        alice_post: vec![("a".into(), Expr::var("s"))],
        bob_post: vec![
            (
                "b".into(),
                Expr::Mux(
                    Box::new(Expr::var("y")),
                    Box::new(Expr::var("s")),
                    Box::new(Expr::xor2(Expr::var("~b"), Expr::var("s"))),
                ),
            ),
            ("w".into(), Expr::var("~b")),
        ],
    }
}

/// Turns any racbox into a perfect RAC by spending one classical bit.
pub fn racbox_plus_cbit_to_rac(inner: &BipartiteBox) -> Result<BipartiteBox> {
    if !crate::boxes::is_racbox(inner)? {
        return Err(Error::Precondition(
            "inner box does not satisfy the racbox condition".into(),
        ));
    }
    compose(inner, &racbox_plus_cbit_wiring())
}

/// Checks that a box is the ideal RAC: signature {x0,x1} -> {} / {y} -> {b},
/// with b = x_y surely.
pub fn is_perfect_rac(b: &BipartiteBox) -> bool {
    let shape = (
        b.alice_inputs().len(),
        b.alice_outputs().len(),
        b.bob_inputs().len(),
        b.bob_outputs().len(),
    );
    if shape != (2, 0, 1, 1) || b.input_vars().iter().any(|v| v.arity != 2) {
        return false;
    }
    let rac = crate::boxes::make_rac_box();
    let rin = rac.input_vars();
    let bin = b.input_vars();
    for in_idx in 0..space_size(&bin) {
        for out_idx in 0..2 {
            if b.prob(in_idx, out_idx) != rac.prob(in_idx, out_idx) {
                return false;
            }
        }
    }
    let _ = rin;
    true
}

/// Outcome of the RAC -> PR + erasure protocol at a given p(y=1).
#[derive(Debug, Clone)]
pub struct ErasureProtocolReport {
    pub wired: WiredBox,
    pub effective: BipartiteBox,
    /// a XOR b = x AND y with probability 1 for every (x, z, y)
    pub pr_perfect: bool,
    /// the channel z -> (w, flag y) with x uniform and p(y=1) as configured
    pub channel: ClassicalChannel,
    pub channel_class: ChannelClass,
    pub p_y1: Rational,
}

/// Runs the resource-inequality protocol on a perfect RAC: simulates the
/// PR-box exactly and leaves behind an erasure channel for z with erasure
/// probability p(y=1), flagged by y.
pub fn rac_to_pr_plus_erasure_protocol(
    inner: &BipartiteBox,
    p_y1: &Rational,
) -> Result<ErasureProtocolReport> {
    if p_y1 < &q0() || p_y1 > &q1() {
        return Err(Error::Precondition(format!(
            "p(y=1) must lie in [0,1], got {p_y1}"
        )));
    }
    if !is_perfect_rac(inner) {
        return Err(Error::Precondition("inner box is not a perfect RAC".into()));
    }
    let wiring = rac_to_pr_erasure_wiring();
    let effective = compose(inner, &wiring)?;

    // PR-correlations hold for every value of the side input z
    let mut pr_perfect = true;
    let in_vars = effective.input_vars();
    let out_vars = effective.output_vars();
    for in_idx in 0..space_size(&in_vars) {
        let iv = values_of(&in_vars, in_idx); // x, z, y
        let (x, y) = (iv[0], iv[2]);
        for out_idx in 0..space_size(&out_vars) {
            let ov = values_of(&out_vars, out_idx); // a, b, w
            if ov[0] ^ ov[1] != x & y && !effective.prob(in_idx, out_idx).is_zero() {
                pr_perfect = false;
            }
        }
    }

    // channel z -> (w, y): x uniform, z uniform (conditioned away), y ~ p_y1
    let chan_vars = bits(&["z", "w", "y"]);
    let mut atoms: Vec<(Vec<u8>, Rational)> = Vec::new();
    for in_idx in 0..space_size(&in_vars) {
        let iv = values_of(&in_vars, in_idx);
        let (z, y) = (iv[1], iv[2]);
        let py = if y == 1 {
            p_y1.clone()
        } else {
            q1() - p_y1.clone()
        };
        let weight = q(1, 4) * py; // uniform x, z
        if weight.is_zero() {
            continue;
        }
        for out_idx in 0..space_size(&out_vars) {
            let p = effective.prob(in_idx, out_idx);
            if p.is_zero() {
                continue;
            }
            let ov = values_of(&out_vars, out_idx);
            atoms.push((vec![z, ov[2], y], weight.clone() * p.clone()));
        }
    }
    let joint = JointDistribution::from_atoms(chan_vars, atoms)?;
    let channel = ClassicalChannel::from_joint(&joint, "z", "w", &["y"])?;
    let channel_class = classify_channel(&channel);

    Ok(ErasureProtocolReport {
        wired: WiredBox {
            inner: inner.clone(),
            wiring,
        },
        effective,
        pr_perfect,
        channel,
        channel_class,
        p_y1: p_y1.clone(),
    })
}

// --- text format ---------------------------------------------------------------

impl Wiring {
    pub fn to_text(&self) -> String {
        let mut s = String::from("wiring v1\n");
        let decl = |label: &str, vars: &[VariableSpec]| -> String {
            if vars.is_empty() {
                format!("{label}\n")
            } else {
                let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
                format!("{label} {}\n", names.join(" "))
            }
        };
        s.push_str(&decl("alice_in", &self.alice_inputs));
        s.push_str(&decl("alice_out", &self.alice_outputs));
        s.push_str(&decl("bob_in", &self.bob_inputs));
        s.push_str(&decl("bob_out", &self.bob_outputs));
        for (label, names) in [
            ("shared", &self.shared),
            ("alice_rand", &self.alice_rand),
            ("bob_rand", &self.bob_rand),
        ] {
            if !names.is_empty() {
                s.push_str(&format!("{label} {}\n", names.join(" ")));
            }
        }
        for (t, e) in &self.alice_pre {
            s.push_str(&format!("alice_pre ~{t} = {e}\n"));
        }
        if let Some(m) = &self.message {
            s.push_str(&format!("message m = {m}\n"));
        }
        for (t, e) in &self.bob_pre {
            s.push_str(&format!("bob_pre ~{t} = {e}\n"));
        }
        for (t, e) in &self.alice_post {
            s.push_str(&format!("alice_post {t} = {e}\n"));
        }
        for (t, e) in &self.bob_post {
            s.push_str(&format!("bob_post {t} = {e}\n"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Wiring> {
        let mut w = Wiring {
            alice_inputs: vec![],
            alice_outputs: vec![],
            bob_inputs: vec![],
            bob_outputs: vec![],
            shared: vec![],
            alice_rand: vec![],
            bob_rand: vec![],
            alice_pre: vec![],
            message: None,
            bob_pre: vec![],
            alice_post: vec![],
            bob_post: vec![],
        };
        let err = |line: usize, msg: &str| Error::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (l0, first) = lines.next().ok_or_else(|| err(0, "empty wiring file"))?;
        if first.trim() != "wiring v1" {
            return Err(err(l0, "expected header `wiring v1`"));
        }
        for (ln, raw) in lines {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (keyword, rest) = line.split_once(' ').unwrap_or((line, ""));
            let rest = rest.trim();
            let parse_assign = |rest: &str, box_target: bool| -> Result<(String, Expr)> {
                let (lhs, rhs) = rest
                    .split_once('=')
                    .ok_or_else(|| err(ln, "expected `target = expr`"))?;
                let target = lhs.trim();
                let target = if box_target {
                    target
                        .strip_prefix('~')
                        .ok_or_else(|| err(ln, "pre targets are box inputs; prefix with `~`"))?
                } else {
                    target
                };
                let expr = Expr::parse(rhs.trim()).map_err(|e| err(ln, &e.to_string()))?;
                Ok((target.to_string(), expr))
            };
            match keyword {
                "alice_in" | "alice_out" | "bob_in" | "bob_out" => {
                    let vars: Result<Vec<VariableSpec>> = rest
                        .split_whitespace()
                        .map(|n| VariableSpec::new(n, 2))
                        .collect();
                    let vars = vars.map_err(|e| err(ln, &e.to_string()))?;
                    match keyword {
                        "alice_in" => w.alice_inputs = vars,
                        "alice_out" => w.alice_outputs = vars,
                        "bob_in" => w.bob_inputs = vars,
                        _ => w.bob_outputs = vars,
                    }
                }
                "shared" | "alice_rand" | "bob_rand" => {
                    let names: Vec<String> =
                        rest.split_whitespace().map(|s| s.to_string()).collect();
                    match keyword {
                        "shared" => w.shared = names,
                        "alice_rand" => w.alice_rand = names,
                        _ => w.bob_rand = names,
                    }
                }
                "alice_pre" => w.alice_pre.push(parse_assign(rest, true)?),
                "bob_pre" => w.bob_pre.push(parse_assign(rest, true)?),
                "alice_post" => w.alice_post.push(parse_assign(rest, false)?),
                "bob_post" => w.bob_post.push(parse_assign(rest, false)?),
                "message" => {
                    let (t, e) = parse_assign(rest, false)?;
                    if t != MESSAGE_NAME {
                        return Err(err(ln, "message target must be `m`"));
                    }
                    w.message = Some(e);
                }
                other => return Err(err(ln, &format!("unknown section `{other}`"))),
            }
        }
        w.validate()?;
        Ok(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boxes::{
        check_nonsignalling, is_racbox, make_nonsignalling_racbox, make_pr_box, make_rac_box,
        make_signalling_racbox, satisfies_pr_correlations,
    };
    use crate::channel::ChannelKind;
    use crate::rational::half;

    #[test]
    fn identity_wiring_is_identity() {
        let pr = make_pr_box();
        let composed = compose(&pr, &identity_pr_wiring()).unwrap();
        assert_eq!(composed, pr);
    }

    #[test]
    fn fresh_bit_destroys_correlation() {
        let mut w = identity_pr_wiring();
        w.bob_rand = vec!["r".into()];
        w.bob_post = vec![("b".into(), Expr::xor2(Expr::var("~b"), Expr::var("r")))];
        let composed = compose(&make_pr_box(), &w).unwrap();
        assert!(!satisfies_pr_correlations(&composed).unwrap());
        let p = composed
            .event_prob_uniform(&[], |v| v.get("a") ^ v.get("b") == v.get("x") & v.get("y"))
            .unwrap();
        assert_eq!(p, half());
    }

    #[test]
    fn pr_simulates_nonsignalling_racbox_exactly() {
        let composed = compose(&make_pr_box(), &pr_to_racbox_wiring()).unwrap();
        assert_eq!(composed, make_nonsignalling_racbox());
        assert!(is_racbox(&composed).unwrap());
        assert!(check_nonsignalling(&composed).unwrap().nonsignalling());
        let p = composed
            .event_prob_uniform(&[], |v| {
                let xy = if v.get("y") == 0 { v.get("x0") } else { v.get("x1") };
                v.get("b") == xy ^ v.get("a") ^ v.get("yp")
            })
            .unwrap();
        assert_eq!(p, q1());
    }

    #[test]
    fn racbox_simulates_pr_exactly() {
        let composed = compose(&make_nonsignalling_racbox(), &racbox_to_pr_wiring()).unwrap();
        assert!(satisfies_pr_correlations(&composed).unwrap());
        assert_eq!(composed, make_pr_box());
        // the signalling racbox cannot: on a != y' the output is noise
        let composed = compose(&make_signalling_racbox(), &racbox_to_pr_wiring()).unwrap();
        assert!(!satisfies_pr_correlations(&composed).unwrap());
        let p = composed
            .event_prob_uniform(&[], |v| v.get("a") ^ v.get("b") == v.get("x") & v.get("y"))
            .unwrap();
        assert_eq!(p, q(3, 4));
    }

    #[test]
    fn roundtrip_cancels_exactly() {
        let as_racbox = compose(&make_pr_box(), &pr_to_racbox_wiring()).unwrap();
        let back = compose(&as_racbox, &racbox_to_pr_wiring()).unwrap();
        assert_eq!(back, make_pr_box());
    }

    #[test]
    fn racbox_plus_cbit_gives_rac() {
        for inner in [
            make_nonsignalling_racbox(),
            make_signalling_racbox(),
            compose(&make_pr_box(), &pr_to_racbox_wiring()).unwrap(),
        ] {
            let rac = racbox_plus_cbit_to_rac(&inner).unwrap();
            assert_eq!(rac, make_rac_box());
        }
        let junk = BipartiteBox::from_fn(
            bits(&["x0", "x1"]),
            bits(&["a"]),
            bits(&["y", "yp"]),
            bits(&["b"]),
            |v| {
                if v.get("b") == 0 && v.get("a") == 0 {
                    q1()
                } else {
                    q0()
                }
            },
        )
        .unwrap();
        assert!(matches!(
            racbox_plus_cbit_to_rac(&junk),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn erasure_protocol_perfect_pr_and_channel() {
        let rac = make_rac_box();
        for (num, den) in [(1i64, 4i64), (1, 2), (3, 4)] {
            let report = rac_to_pr_plus_erasure_protocol(&rac, &q(num, den)).unwrap();
            assert!(report.pr_perfect);
            assert_eq!(report.channel_class.kind, ChannelKind::Erasure);
            assert_eq!(report.channel_class.parameter, q(num, den));
        }
        let report = rac_to_pr_plus_erasure_protocol(&rac, &half()).unwrap();
        for z in 0..2u8 {
            assert_eq!(*report.channel.prob(z, z, 0), half());
            assert_eq!(*report.channel.prob(z, z ^ 1, 0), q0());
        }
        let p = report
            .effective
            .event_prob_uniform(&[], |v| v.get("a") ^ v.get("b") == v.get("x") & v.get("y"))
            .unwrap();
        assert_eq!(p, q1());
    }

    #[test]
    fn erasure_protocol_preconditions() {
        assert!(matches!(
            rac_to_pr_plus_erasure_protocol(&make_rac_box(), &q(3, 2)),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            rac_to_pr_plus_erasure_protocol(&make_nonsignalling_racbox(), &half()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn budget_violation_detected() {
        let mut w = identity_pr_wiring();
        w.bob_pre = vec![("y".into(), Expr::xor2(Expr::var("y"), Expr::var("m")))];
        assert!(matches!(w.validate(), Err(Error::BudgetViolation(_))));
    }

    #[test]
    fn no_retrocausation_scoping() {
        let mut w = identity_pr_wiring();
        w.alice_pre = vec![("x".into(), Expr::var("y"))];
        assert!(matches!(w.validate(), Err(Error::Wiring(_))));
        let mut w = identity_pr_wiring();
        w.bob_post = vec![("b".into(), Expr::var("~a"))];
        assert!(compose(&make_pr_box(), &w).is_err());
    }

    #[test]
    fn composition_preserves_normalization() {
        let composed = racbox_plus_cbit_to_rac(&make_signalling_racbox()).unwrap();
        composed.validate().unwrap();
    }

    #[test]
    fn wiring_text_roundtrip() {
        for w in [
            identity_pr_wiring(),
            pr_to_racbox_wiring(),
            racbox_to_pr_wiring(),
            racbox_plus_cbit_wiring(),
            rac_to_pr_erasure_wiring(),
        ] {
            let text = w.to_text();
            let parsed = Wiring::from_text(&text).unwrap();
            assert_eq!(parsed, w, "roundtrip failed for:\n{text}");
            assert_eq!(parsed.to_text(), text);
        }
    }

    #[test]
    fn expr_parse_display_roundtrip() {
        for s in [
            "xor(x0, x1)",
            "mux(y, s, xor(b, s))",
            "not(and(x, or(y, 1)))",
            "0",
            "~a",
        ] {
            let e = Expr::parse(s).unwrap();
            assert_eq!(format!("{e}"), s);
        }
        assert!(Expr::parse("frob(x)").is_err());
        assert!(Expr::parse("xor(x,").is_err());
    }
}
