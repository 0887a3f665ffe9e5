use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn malle() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_malle"));
    for (k, _) in std::env::vars() {
        if k.starts_with("MALLE_") {
            cmd.env_remove(k);
        }
    }
    cmd
}

fn run(args: &[&str]) -> Output {
    malle().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(code(&out), 0, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn assert_schema(name: &str, v: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}\n{v:#}");
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn mu(n: u64) -> i64 {
    let mut m = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

#[test]
fn invariants_of_catalog_examples() {
    let k = ok_json(&["invariants", "--group", "kluners", "--action", "kluners-split"]);
    assert_schema("invariants", &k);
    assert_eq!((k["a"].as_u64(), k["b"].as_u64()), (Some(2), Some(2)));
    assert_eq!(k["B"], 2);
    assert_eq!(k["b_malle"], 1);
    for preset in ["kluners-nonsplit", "full-over-Q"] {
        let v = ok_json(&["invariants", "--group", "C3wrC2", "--action", preset]);
        assert_eq!(v["b"], 1, "{preset}");
    }
    // Without any action every minimal element is its own orbit.
    let bare = ok_json(&["invariants", "--group", "kluners", "--action", "trivial"]);
    assert_eq!(bare["b"].as_u64().unwrap() as usize, bare["minimal_set"].as_array().unwrap().len());
    let c2 = ok_json(&["invariants", "--group", "C2"]);
    assert_eq!((c2["a"].as_u64(), c2["b"].as_u64()), (Some(1), Some(1)));
    let v4 = ok_json(&["invariants", "--group", "V4-regular", "--action", "trivial-pi-over-Q"]);
    assert_schema("invariants", &v4);
    assert_eq!((v4["a"].as_u64(), v4["b"].as_u64()), (Some(2), Some(3)));
    // Orbits partition the minimal set.
    let members: usize = v4["orbits"].as_array().unwrap().iter().map(|o| o["members"].as_array().unwrap().len()).sum();
    assert_eq!(members, v4["minimal_set"].as_array().unwrap().len());
}

#[test]
fn invariants_accept_group_files_and_inline_normals() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s4.json", r#"{"degree": 4, "generators": [[2,3,4,1], [2,1,3,4]]}"#);
    let v = ok_json(&["invariants", "--group", &g, "--normal", "(1 2)(3 4),(1 3)(2 4)"]);
    assert_schema("invariants", &v);
    assert_eq!(v["a"], 2);
    let out = run(&["invariants", "--group", &g]);
    assert_eq!(code(&out), 3, "nonabelian group without --normal");
}

#[test]
fn output_is_deterministic_with_sorted_keys() {
    let args = ["invariants", "--group", "D4", "--action", "full-over-Q"];
    let a = run(&args).stdout;
    let b = run(&args).stdout;
    assert_eq!(a, b);
    let parsed: BTreeMap<String, Value> = serde_json::from_slice(&a).unwrap();
    let mut resorted = serde_json::to_string_pretty(&parsed).unwrap();
    resorted.push('\n');
    assert_eq!(String::from_utf8(a).unwrap(), resorted);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["invariants", "--group", "A5"])), 2);
    assert_eq!(code(&run(&["invariants", "--group", "C2", "--action", "bogus"])), 2);
    assert_eq!(code(&run(&["invariants", "--group", "S4", "--normal", "(1 2)"])), 3);
    assert_eq!(code(&run(&["count", "--group", "C2", "--X", "1e17"])), 4);
    assert_eq!(code(&run(&["count", "--group", "C2", "--X", "100", "--fields"])), 3);
    assert_eq!(code(&run(&["count", "--group", "A5", "--X", "100"])), 2);
    assert_eq!(code(&run(&["count", "--group", "C2", "--X", "ten"])), 3);
    assert_eq!(code(&run(&["wiles-eval", "--input", "/nonexistent/x.json"])), 2);
}

#[test]
fn local_factor_matches_cocycle_counts() {
    let v = ok_json(&["local-factor", "--group", "C3"]);
    assert_schema("local-factor", &v);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 2);
    for c in classes {
        // Σ coefficients = |Z¹|/|T|.
        let mass: f64 = c["coefficients"]
            .as_object()
            .unwrap()
            .values()
            .map(|q| q.as_str().unwrap().parse::<f64>().unwrap())
            .sum();
        let z1 = c["sizes"]["z1"].as_f64().unwrap();
        assert_eq!(mass, z1 / 3.0);
        assert_eq!(c["sizes"]["h0"].as_u64().unwrap() * c["sizes"]["b1"].as_u64().unwrap(), 3);
    }
    let single = ok_json(&["local-factor", "--group", "C2", "--conjugator", "()", "--ordering", "ram"]);
    assert_schema("local-factor", &single);
    let coeffs = &single["classes"][0]["coefficients"];
    assert_eq!(coeffs["0"], "1");
    assert_eq!(coeffs["1"], "1");
}

#[test]
fn euler_on_squarefree_family() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(
        dir.path(),
        "f.json",
        r#"{"classes": [{"label": "all", "factor": {"coefficients": {"0": "1", "1": "1"}}, "weight": "1"}]}"#,
    );
    let v = ok_json(&["euler", "--family", &family, "--s", "2.0", "--prime-bound", "1e6", "--expand", "1e5"]);
    assert_schema("euler", &v);
    assert_eq!(v["a"], 1);
    assert_eq!(v["b"], "1");
    // ∏ (1 + p^-2)(1 - p^-2) = 1/ζ(4) = 90/π⁴.
    let g = v["G_estimate"]["value"].as_f64().unwrap();
    assert!((g - 90.0 / PI.powi(4)).abs() < 1e-6, "{g}");
    let c = v["prediction"]["constant"].as_f64().unwrap();
    assert!((c - 6.0 / (PI * PI)).abs() < 1e-5, "{c}");
    let last = v["expansion"]["rows"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(last["x"], 100000);
    // Squarefree integers up to 10⁵, counted directly.
    let squarefree = (1..=100_000u64).filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % (d * d) != 0)).count();
    assert_eq!(last["actual"], squarefree.to_string());

    let out = run(&["euler", "--family", &family, "--s", "0.5"]);
    assert_eq!(code(&out), 3, "left of the pole");
}

#[test]
fn euler_from_catalog_group() {
    let v = ok_json(&["euler", "--group", "V4", "--prime-bound", "1e4"]);
    assert_schema("euler", &v);
    assert_eq!(v["a"], 2);
    assert_eq!(v["b"], "3");
}

#[test]
fn count_series_and_files() {
    let one = ok_json(&["count", "--group", "C2", "--X", "1"]);
    assert_schema("count", &one);
    assert_eq!(one["grid"], serde_json::json!([1]));
    assert_eq!(one["counts"], serde_json::json!([1]));
    assert!(one.get("fit_error").is_some());

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("out.json");
    let svg = dir.path().join("plot.svg");
    let v = ok_json(&[
        "count",
        "--group",
        "C2",
        "--ordering",
        "disc",
        "--X",
        "1e6",
        "--surjective",
        "--fit-decades",
        "4",
        "--json",
        json.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert_schema("count", &v);
    let a_hat = v["fit"]["a_hat"].as_f64().unwrap();
    assert!((0.95..=1.05).contains(&a_hat), "{a_hat}");
    assert_eq!(v["predicted"]["a"], 1);
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(saved, v);
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.contains("<polyline"));

    // Quadratic fields with |disc| ≤ 100, counted from fundamental discriminants.
    let fundamental = |d: i64| {
        let m = d.rem_euclid(16);
        let sqfree = |n: i64| (2..).take_while(|k: &i64| k * k <= n.abs()).all(|k| n % (k * k) != 0);
        (d.rem_euclid(4) == 1 && sqfree(d)) || ((m == 8 || m == 12) && sqfree(d / 4))
    };
    let expected = (-100..=100i64).filter(|&d| d != 0 && d != 1 && fundamental(d)).count();
    let fields = ok_json(&["count", "--group", "2", "--X", "100", "--lo", "100", "--surjective", "--fields"]);
    assert_eq!(fields["counts"], serde_json::json!([expected]));
}

#[test]
fn count_target_spellings_agree() {
    let a = ok_json(&["count", "--group", "V4", "--X", "1000", "--ordering", "ram"]);
    let b = ok_json(&["count", "--group", "2,2", "--X", "1000", "--ordering", "ram"]);
    let c = ok_json(&["count", "--group", "C2xC2", "--X", "1000", "--ordering", "ram"]);
    assert_eq!(a, b);
    assert_eq!(b, c);
    assert_eq!(ok_json(&["count", "--group", "C2xC3", "--X", "50"])["target"], serde_json::json!([6]));
}

#[test]
fn mobius_agrees_with_divisor_oracle() {
    let v = ok_json(&["mobius", "--order", "60"]);
    assert_schema("mobius", &v);
    assert_eq!(v["oracle_agrees"], true);
    let orders: Vec<u64> = v["nodes"].as_array().unwrap().iter().map(|n| n["order"].as_u64().unwrap()).collect();
    assert_eq!(orders.len(), 12);
    let m = v["mobius"].as_array().unwrap();
    for (i, &di) in orders.iter().enumerate() {
        for (j, &dj) in orders.iter().enumerate() {
            let expected = if dj % di == 0 { mu(dj / di) } else { 0 };
            assert_eq!(m[i][j].as_i64().unwrap(), expected, "{di} {dj}");
        }
    }
    let v4 = ok_json(&["mobius", "--group", "V4"]);
    assert_eq!(v4["nodes"].as_array().unwrap().len(), 4);
    assert_eq!(v4["oracle_agrees"], true);
}

#[test]
fn wiles_eval_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(
        dir.path(),
        "w.json",
        r#"{"locals": [{"l_size": 4, "h0_size": 2}, {"l_size": 3, "h0_size": 9}], "h0_t": 2, "h0_tstar": 4}"#,
    );
    let v = ok_json(&["wiles-eval", "--input", &input]);
    assert_schema("wiles-eval", &v);
    // (2/4)·(4/2)·(3/9) = 1/3.
    assert_eq!(v["ratio"], "1/3");

    let synthetic = write(
        dir.path(),
        "s.json",
        r#"{"group": [2, 2], "unramified": [[0, 1]], "conditions": {"h": [0, 0]}}"#,
    );
    let s = ok_json(&["wiles-eval", "--synthetic", &synthetic]);
    assert_schema("wiles-eval", &s);
    for c in s["coefficients"].as_array().unwrap() {
        assert_eq!(c["c"], "1");
    }

    let bad = write(dir.path(), "bad.json", r#"{"locals": [], "h0_t": 1}"#);
    assert_eq!(code(&run(&["wiles-eval", "--input", &bad])), 3);
    let zero = write(dir.path(), "zero.json", r#"{"locals": [], "h0_t": 1, "h0_tstar": 0}"#);
    assert_eq!(code(&run(&["wiles-eval", "--input", &zero])), 3);
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "mobius"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_schema("verify", &v);
    assert_eq!(v["passed"], true);

    let v = ok_json(&["verify", "mblocal"]);
    assert!(v["summary"][0]["cases"].as_u64().unwrap() >= 12);

    let out = run(&["verify", "burnside", "--filter", "no-such-case"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("vacuous"));

    assert_eq!(code(&run(&["verify", "everything"])), 2);
}

#[test]
fn config_file_and_environment_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "malle.cfg", "# defaults\ngroup = C3\naction = \"trivial\"\n");
    let from_file = ok_json(&["--config", &cfg, "invariants"]);
    assert_eq!(from_file["group"], "C3");
    assert_eq!(from_file["action"], "trivial");

    let out = malle().env("MALLE_GROUP", "C2").args(["--config", &cfg, "invariants"]).output().unwrap();
    let from_env: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(from_env["group"], "C2");

    let out = malle()
        .env("MALLE_GROUP", "C2")
        .env("MALLE_CONFIG", &cfg)
        .args(["invariants", "--group", "C4"])
        .output()
        .unwrap();
    let from_flag: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(from_flag["group"], "C4");
    assert_eq!(from_flag["action"], "trivial");

    let bad = write(dir.path(), "bad.cfg", "group C2\n");
    assert_eq!(code(&run(&["--config", &bad, "invariants"])), 3);
}

#[test]
fn log_appends_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("runs.jsonl");
    let log = log.to_str().unwrap();
    ok_json(&["--log", log, "invariants", "--group", "C2"]);
    ok_json(&["--log", log, "mobius", "--order", "6"]);
    let text = std::fs::read_to_string(log).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["command"], "invariants");
    assert_eq!(lines[1]["command"], "mobius");
    assert_eq!(lines[1]["result"]["nodes"].as_array().unwrap().len(), 4);
}
