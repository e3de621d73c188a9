//! Browser bindings for the box toolkit. Three operations, each returning a
//! JSON string for the static page in `www/` to render:
//! box inspection, protocol runs with a tunable p(y=1), and
//! deterministic-strategy exploration by preset name or raw index.

use racbox_core::boxes::{
    check_nonsignalling, chsh_score, is_racbox, make_nonsignalling_racbox, make_pr_box,
    make_rac_box, make_signalling_racbox, satisfies_pr_correlations, BipartiteBox,
};
use racbox_core::channel::{classify_channel, is_postprocessing_of_erasure};
use racbox_core::rational::{fmt_frac, half, q, to_f64};
use racbox_core::strategies::{self, DeterministicStrategy, InputDist};
use racbox_core::wiring::{
    compose, pr_to_racbox_wiring, rac_to_pr_plus_erasure_protocol, racbox_to_pr_wiring,
};
use racbox_core::{info, vars::space_size, vars::values_of};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn box_rows(b: &BipartiteBox) -> Value {
    let in_vars = b.input_vars();
    let out_vars = b.output_vars();
    let mut rows = Vec::new();
    for in_idx in 0..space_size(&in_vars) {
        let iv = values_of(&in_vars, in_idx);
        let label: Vec<String> = in_vars
            .iter()
            .zip(&iv)
            .map(|(v, val)| format!("{}={}", v.name, val))
            .collect();
        let mut outs = Vec::new();
        for out_idx in 0..space_size(&out_vars) {
            let p = b.prob(in_idx, out_idx);
            if p == &q(0, 1) {
                continue;
            }
            let ov = values_of(&out_vars, out_idx);
            let olabel: Vec<String> = out_vars
                .iter()
                .zip(&ov)
                .map(|(v, val)| format!("{}={}", v.name, val))
                .collect();
            outs.push(json!([olabel.join(" "), fmt_frac(p), to_f64(p)]));
        }
        rows.push(json!({ "inputs": label.join(" "), "outputs": outs }));
    }
    Value::Array(rows)
}

fn named_box(name: &str) -> Result<BipartiteBox, String> {
    match name {
        "pr" => Ok(make_pr_box()),
        "ns-racbox" => Ok(make_nonsignalling_racbox()),
        "sig-racbox" => Ok(make_signalling_racbox()),
        "rac" => Ok(make_rac_box()),
        other => Err(format!("unknown box `{other}`")),
    }
}

fn err_json(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

/// Box inspector: table plus all verification verdicts.
#[wasm_bindgen]
pub fn box_report(name: &str) -> String {
    let b = match named_box(name) {
        Ok(b) => b,
        Err(e) => return err_json(e),
    };
    let nosig = match check_nonsignalling(&b) {
        Ok(v) => v,
        Err(e) => return err_json(e),
    };
    let racbox = is_racbox(&b).ok();
    let pr = satisfies_pr_correlations(&b).ok();
    let chsh = chsh_score(&b).ok().map(|s| json!([fmt_frac(&s), to_f64(&s)]));
    json!({
        "name": name,
        "rows": box_rows(&b),
        "nonsignalling": { "alice_to_bob": nosig.a_to_b, "bob_to_alice": nosig.b_to_a },
        "is_racbox": racbox,
        "pr_correlations": pr,
        "chsh_score": chsh,
    })
    .to_string()
}

/// Protocol explorer. `p_y1` applies to the erasure protocol.
#[wasm_bindgen]
pub fn protocol_report(name: &str, p_y1_num: u32, p_y1_den: u32) -> String {
    match name {
        "pr-to-racbox" => {
            let composed = match compose(&make_pr_box(), &pr_to_racbox_wiring()) {
                Ok(b) => b,
                Err(e) => return err_json(e),
            };
            json!({
                "name": name,
                "rows": box_rows(&composed),
                "equals_nonsignalling_racbox": composed == make_nonsignalling_racbox(),
                "is_racbox": is_racbox(&composed).ok(),
            })
            .to_string()
        }
        "racbox-to-pr" => {
            let composed = match compose(&make_nonsignalling_racbox(), &racbox_to_pr_wiring()) {
                Ok(b) => b,
                Err(e) => return err_json(e),
            };
            json!({
                "name": name,
                "rows": box_rows(&composed),
                "equals_pr_box": composed == make_pr_box(),
                "pr_correlations": satisfies_pr_correlations(&composed).ok(),
            })
            .to_string()
        }
        "roundtrip" => {
            let as_racbox = match compose(&make_pr_box(), &pr_to_racbox_wiring()) {
                Ok(b) => b,
                Err(e) => return err_json(e),
            };
            let back = match compose(&as_racbox, &racbox_to_pr_wiring()) {
                Ok(b) => b,
                Err(e) => return err_json(e),
            };
            json!({
                "name": name,
                "forward_exact": as_racbox == make_nonsignalling_racbox(),
                "reverse_exact": back == make_pr_box(),
                "rows": box_rows(&back),
            })
            .to_string()
        }
        "rac-to-pr-erasure" => {
            if p_y1_den == 0 || p_y1_num > p_y1_den {
                return err_json("p(y=1) must be a fraction in [0, 1]");
            }
            let p = q(p_y1_num as i64, p_y1_den as i64);
            let report = match rac_to_pr_plus_erasure_protocol(&make_rac_box(), &p) {
                Ok(r) => r,
                Err(e) => return err_json(e),
            };
            let mi = report.channel.uniform_mutual_information().unwrap_or(f64::NAN);
            json!({
                "name": name,
                "p_y1": fmt_frac(&p),
                "pr_perfect": report.pr_perfect,
                "channel_class": report.channel_class.to_string(),
                "channel": channel_rows(&report.channel),
                "channel_mutual_information": mi,
            })
            .to_string()
        }
        other => err_json(format!("unknown protocol `{other}`")),
    }
}

fn channel_rows(ch: &racbox_core::channel::ClassicalChannel) -> Value {
    let n_flag = ch.n_flag_assignments();
    let mut rows = Vec::new();
    for zi in 0..ch.input().arity as usize {
        let mut outs = Vec::new();
        for sym in 0..ch.n_symbols() {
            let c = sym / n_flag;
            let fv = values_of(ch.flags(), sym % n_flag);
            let flag: Vec<String> = ch
                .flags()
                .iter()
                .zip(&fv)
                .map(|(v, val)| format!("{}={}", v.name, val))
                .collect();
            let p = &ch.table()[zi][sym];
            if p == &q(0, 1) {
                continue;
            }
            outs.push(json!([
                format!("{}={} {}", ch.content().name, c, flag.join(" ")),
                fmt_frac(p),
                to_f64(p)
            ]));
        }
        rows.push(json!({ "input": format!("{}={}", ch.input().name, zi), "outputs": outs }));
    }
    Value::Array(rows)
}

/// Strategy explorer: preset names or `index:<n>` for any of the 2^38
/// deterministic strategies, evaluated on the signalling racbox.
#[wasm_bindgen]
pub fn strategy_report(which: &str) -> String {
    let strategy = match which {
        "fig3" => strategies::fig3_strategy(),
        "case2" => strategies::table_ii_case2_strategy(),
        "case3" => strategies::table_ii_case3_strategy(),
        "carries-x" => strategies::message_carries_x_strategy(),
        "imperfect" => strategies::imperfect_three_quarters_strategy(),
        "carries-z" => strategies::message_carries_z_strategy(),
        other => match other.strip_prefix("index:").and_then(|s| s.trim().parse::<u64>().ok()) {
            Some(idx) => match DeterministicStrategy::from_index(idx) {
                Ok(s) => s,
                Err(e) => return err_json(e),
            },
            None => return err_json(format!("unknown strategy `{other}`")),
        },
    };
    let b = make_signalling_racbox();
    let joint = match strategies::run_strategy(&strategy, &b, &InputDist::default()) {
        Ok(j) => j,
        Err(e) => return err_json(e),
    };
    let success = strategies::pr_success_probability(&joint).unwrap_or_else(|_| q(0, 1));
    let channel = match strategies::induced_channel(&joint) {
        Ok(c) => c,
        Err(e) => return err_json(e),
    };
    let class = classify_channel(&channel);
    let postproc = is_postprocessing_of_erasure(&channel, &half()).unwrap_or(false);
    let info_bound = info::theorem3_information(&joint, "bbox", "ybox", &["m"]).unwrap_or(f64::NAN);
    json!({
        "strategy": strategy.to_string(),
        "index": strategy.to_index().to_string(),
        "routes_output_to_yprime": strategy.routes_output_to_yprime(),
        "message_ignores_output": strategy.message_ignores_output(),
        "pr_success": [fmt_frac(&success), to_f64(&success)],
        "channel_class": class.to_string(),
        "postprocessing_of_half_erasure": postproc,
        "message_information": info_bound,
        "channel": channel_rows(&channel),
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_valid_json() {
        for name in ["pr", "ns-racbox", "sig-racbox", "rac"] {
            let doc: serde_json::Value =
                serde_json::from_str(&box_report(name)).expect("valid json");
            assert!(doc.get("error").is_none(), "{name}: {doc}");
        }
        let doc: serde_json::Value = serde_json::from_str(&box_report("nope")).unwrap();
        assert!(doc.get("error").is_some());
    }

    #[test]
    fn protocol_reports() {
        for name in ["pr-to-racbox", "racbox-to-pr", "roundtrip"] {
            let doc: serde_json::Value =
                serde_json::from_str(&protocol_report(name, 1, 2)).unwrap();
            assert!(doc.get("error").is_none(), "{name}: {doc}");
        }
        let doc: serde_json::Value =
            serde_json::from_str(&protocol_report("rac-to-pr-erasure", 1, 4)).unwrap();
        assert_eq!(doc["channel_class"], "erasure(1/4)");
        assert_eq!(doc["pr_perfect"], true);
    }

    #[test]
    fn strategy_reports() {
        let doc: serde_json::Value = serde_json::from_str(&strategy_report("fig3")).unwrap();
        assert_eq!(doc["pr_success"][0], "1/1");
        assert_eq!(doc["channel_class"], "erasure(1/2)");
        let idx = doc["index"].as_str().unwrap().to_string();
        let doc2: serde_json::Value =
            serde_json::from_str(&strategy_report(&format!("index:{idx}"))).unwrap();
        assert_eq!(doc["strategy"], doc2["strategy"]);
        let doc: serde_json::Value = serde_json::from_str(&strategy_report("imperfect")).unwrap();
        assert_eq!(doc["pr_success"][0], "3/4");
    }
}
