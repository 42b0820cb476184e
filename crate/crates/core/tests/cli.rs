mod common;

use std::process::Command;

use common::{data_path, network, oracle_cuts};
use serde_json::Value;

fn netcap(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_netcap"))
        .args(args.iter().map(|a| {
            if a.ends_with(".json") {
                data_path(a)
            } else {
                a.to_string()
            }
        }))
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("{e}: {s}"))
}

#[test]
fn validate_exit_codes() {
    assert_eq!(netcap(&["validate", "fig1.json"]).0, 0);
    let (code, out, _) = netcap(&["validate", "--json", "cyclic.json"]);
    assert_eq!(code, 1);
    let v = json(&out);
    assert_eq!(v["valid"], false);
    assert_eq!(v["violations"][0], "cycle detected");
    let (code, _, err) = netcap(&["validate", "malformed.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("syntax"), "{err}");
    assert_eq!(netcap(&["validate", "missing.json"]).0, 2);
}

#[test]
fn bounds_json() {
    let (code, out, _) = netcap(&["bounds", "--json", "fig1.json", "arith_sum3.json"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["footprint"]["value"], 1.0);
    assert_eq!(v["huang"]["value"], 1.0);
    assert_eq!(v["improved"]["display"], "0.773705614469");
    assert_eq!(v["improved"]["argmin"], serde_json::json!(["e5", "e6"]));
    assert_eq!(v["improved"]["partition"], serde_json::json!([["e5"], ["e6"]]));
    assert_eq!(v["improved"]["witness"]["n"], 6);
    assert_eq!(v["ordering_holds"], true);
    assert_eq!(
        v["rows"].as_array().unwrap().len(),
        oracle_cuts(&network("fig1.json")).len()
    );
    let (_, again, _) = netcap(&["bounds", "--json", "fig1.json", "arith_sum3.json"]);
    assert_eq!(out, again);
}

#[test]
fn bounds_single_kind_and_text() {
    let (code, out, _) = netcap(&["bounds", "--bound", "improved", "reverse_butterfly.json", "max2.json"]);
    assert_eq!(code, 0);
    assert!(
        out.lines().any(|l| l.starts_with("improved") && l.contains(" 2 ")),
        "{out}"
    );
    assert!(!out.contains("footprint"));
    let (code, _, err) = netcap(&["bounds", "fig1.json", "max2.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("arity"));
}

#[test]
fn cuts_listing() {
    let (code, out, _) = netcap(&["cuts", "fig1.json"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), oracle_cuts(&network("fig1.json")).len());
    assert!(out.contains("cut={e5,e6} I={s1,s2,s3} J={} K={s1,s2,s3} global=true strong_partitions=2"));
    let (_, out, _) = netcap(&["cuts", "--json", "n1.json"]);
    let v = json(&out);
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .all(|c| !c["I"].as_array().unwrap().is_empty()));
}

#[test]
fn verify_and_induce() {
    let (code, out, _) = netcap(&["verify", "n1.json", "max2.json", "fig8_code.json"]);
    assert_eq!((code, out.trim()), (0, "ok"));
    let (code, out, _) = netcap(&[
        "verify",
        "--json",
        "reverse_butterfly.json",
        "max2.json",
        "fig9_code.json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["ok"], true);
    let (code, out, _) = netcap(&["verify", "n1.json", "max2.json", "fig9_code.json"]);
    assert_eq!(code, 2, "{out}");
    let (code, out, _) = netcap(&["induce", "n1.json", "max2.json", "fig8_code.json", "--cut", "e1,e5,e4"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["table"], serde_json::json!([0, 2, 1, 3, 2, 2, 3, 3]));
    assert_eq!(v["output_alphabet_size"], 4);
    let (code, _, err) = netcap(&["induce", "n1.json", "max2.json", "fig8_code.json", "--cut", "e1,e2"]);
    assert_eq!(code, 1);
    assert!(err.contains("not global"));
}

#[test]
fn verify_reports_counterexample() {
    let dir = std::env::temp_dir().join(format!("netcap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut v = json(&std::fs::read_to_string(data_path("fig8_code.json")).unwrap());
    v["edges"]["e5"]["table"] = serde_json::json!([[0], [0], [0], [0]]);
    let path = dir.join("broken.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netcap"))
        .args(["verify", &data_path("n1.json"), &data_path("max2.json")])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("counterexample"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn search_exit_codes() {
    let (code, out, _) = netcap(&["search", "reverse_butterfly.json", "max2.json", "--k", "1", "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["k"], 1);
    let (code, out, _) = netcap(&["search", "fig1.json", "arith_sum3.json", "--k", "1", "--n", "1"]);
    assert_eq!((code, out.trim()), (3, "exhausted"));
    let (code, out, _) = netcap(&[
        "search",
        "reverse_butterfly.json",
        "max2.json",
        "--k",
        "2",
        "--n",
        "1",
        "--no-prune",
        "--timeout-seconds",
        "0",
    ]);
    assert_eq!((code, out.trim()), (4, "timeout"));
    let (code, _, _) = netcap(&[
        "search",
        "reverse_butterfly.json",
        "max2.json",
        "--k",
        "3",
        "--n",
        "2",
        "--limit-space",
        "8",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn cut_rows_and_non_global_cuts() {
    let (_, out, _) = netcap(&["cuts", "fig1.json"]);
    assert!(out.contains("cut={e5} I={s1} J={s2} K={s1,s2} global=false strong_partitions=1"));
    let (code, out, _) = netcap(&["cuts", "path.json"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    assert!(out.lines().all(|l| l.contains("I={s1} J={}")));
    let (code, _, err) = netcap(&["induce", "n1.json", "max2.json", "fig8_code.json", "--cut", "e5"]);
    assert_eq!(code, 1);
    assert!(err.contains("cut is not global"), "{err}");
}

#[test]
fn mutated_code_counterexample_lists_both_outputs() {
    let dir = std::env::temp_dir().join(format!("netcap-cli-m9-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut v = json(&std::fs::read_to_string(data_path("fig9_code.json")).unwrap());
    v["edges"]["e6"]["table"][1] = serde_json::json!([1, 0]);
    let path = dir.join("m9.json");
    std::fs::write(&path, v.to_string()).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netcap"))
        .args([
            "verify",
            "--json",
            &data_path("reverse_butterfly.json"),
            &data_path("max2.json"),
        ])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = json(&String::from_utf8(out.stdout).unwrap());
    let ce = &v["counterexample"];
    assert_eq!(v["ok"], false);
    assert!(ce["input"]["s1"].is_array() && ce["input"]["s2"].is_array());
    assert_ne!(ce["expected"], ce["decoded"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn induced_linear_decoder() {
    let (code, out, _) = netcap(&[
        "induce",
        "fig1.json",
        "that_linear.json",
        "fig6_code.json",
        "--cut",
        "e5,e6",
    ]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!((v["s"].as_u64(), v["q"].as_u64()), (Some(2), Some(8)));
    let table = v["table"].as_array().unwrap();
    for a in 0..8u64 {
        for b in 0..8u64 {
            let bit = |w: u64, i: u32| (w >> (2 - i)) & 1;
            let o1 = 2 * ((bit(a, 0) + bit(b, 0)) % 2) + bit(a, 2);
            let o2 = 2 * ((bit(a, 1) + bit(b, 1)) % 2) + bit(b, 2);
            assert_eq!(table[(8 * a + b) as usize].as_u64(), Some(4 * o1 + o2));
        }
    }
}

#[test]
fn outputs_feed_back_in() {
    let dir = std::env::temp_dir().join(format!("netcap-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (_, induced, _) = netcap(&["induce", "n1.json", "max2.json", "fig8_code.json", "--cut", "e1,e5,e4"]);
    let f = dir.join("f.json");
    std::fs::write(&f, induced).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netcap"))
        .args(["bounds", "--json", "--bound", "improved", &data_path("n2.json")])
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["improved"]["witness"]["n"], 8);

    let (_, found, _) = netcap(&["search", "n1.json", "max2.json", "--k", "2", "--n", "1"]);
    let c = dir.join("c.json");
    std::fs::write(&c, found).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_netcap"))
        .args(["verify", &data_path("n1.json"), &data_path("max2.json")])
        .arg(&c)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    std::fs::remove_dir_all(&dir).ok();
}
