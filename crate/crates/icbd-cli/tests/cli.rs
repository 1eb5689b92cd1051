use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../icbd/fixtures")
        .join(name)
}

fn icbd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_icbd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn solve_bos_outside() {
    let game = fixture("bos_outside.json");
    let out = icbd(&["solve", path_str(&game), "--method", "icbd"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("profiles: {(IT, L)}"), "{text}");
    assert!(text.contains("outcomes: {z2}"));
    assert!(text.contains("round 1: removed {Ann:ID}\nround 2: removed {Bob:R}\nround 3: removed {Ann:O}"));
    // byte-stable
    assert_eq!(stdout(&icbd(&["solve", path_str(&game), "--method", "icbd"])), text);
}

#[test]
fn every_method_runs() {
    let game = fixture("bos_outside.json");
    for m in ["icbd", "osr", "icd", "ia"] {
        let out = icbd(&["solve", path_str(&game), "--method", m]);
        assert_eq!(code(&out), 0, "{m}");
        assert!(stdout(&out).contains("outcomes: {z2}"), "{m}: {}", stdout(&out));
    }
    // the local variant keeps ID visible at Bob's node, so R survives
    let local = stdout(&icbd(&["solve", path_str(&game), "--method", "local"]));
    assert!(local.contains("round 1 at a.root: removed {ID}"), "{local}");
    assert!(local.contains("outcomes: {z1, z2, z3}"), "{local}");
    // backward induction needs perfect information
    assert_eq!(code(&icbd(&["solve", path_str(&game), "--method", "bi"])), 2);
}

#[test]
fn centipede_has_no_relevant_ties() {
    let game = fixture("reny_centipede.json");
    for cond in ["nrt", "tdi", "perfect-info", "perfect-recall"] {
        let out = icbd(&["check", path_str(&game), "--condition", cond]);
        assert_eq!(code(&out), 0, "{cond}: {}", stdout(&out));
    }
    let bi = stdout(&icbd(&["solve", path_str(&game), "--method", "bi"]));
    assert!(bi.contains("outcomes: {z1}") && bi.contains("unique: true"), "{bi}");
    let solved = stdout(&icbd(&["solve", path_str(&game), "--method", "icbd"]));
    assert!(solved.contains("profiles: {(A, DG)}\noutcomes: {z1}"), "{solved}");
}

#[test]
fn order_dependence_divergence() {
    let game = fixture("order_dep.json");
    let global = stdout(&icbd(&["solve", path_str(&game), "--method", "icbd"]));
    let local = stdout(&icbd(&["solve", path_str(&game), "--method", "local"]));
    assert!(global.contains("profiles: {(O, C)}"), "{global}");
    assert!(local.contains("profiles: {(O, L)}"), "{local}");
}

#[test]
fn cardinal_refinement_with_utilities() {
    let game = fixture("outside_tmd.json");
    let u = fixture("outside_tmd_utilities.json");
    let out = icbd(&["solve", path_str(&game), "--method", "icd", "--utilities", path_str(&u)]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("profiles: {(IT, L)}"), "{}", stdout(&out));
}

#[test]
fn condition_failures_exit_one() {
    let game = fixture("bos_outside.json");
    let out = icbd(&["check", path_str(&game), "--condition", "perfect-info"]);
    assert_eq!(code(&out), 1);
    let out = icbd(&["check", path_str(&game), "--condition", "nrt"]);
    assert_eq!(code(&out), 1);

    let dir = tempfile::tempdir().unwrap();
    let forgetful = dir.path().join("forgetful.json");
    std::fs::write(
        &forgetful,
        r#"{
  "format_version": 1,
  "players": ["Ann"],
  "preferences": {"Ann": [["z1"], ["z2"], ["z3"], ["z4"]]},
  "tree": {
    "moves": [{"player": "Ann", "info_set": "h1", "actions": ["a", "b"]}],
    "children": [
      {"moves": [{"player": "Ann", "info_set": "h2", "actions": ["c", "d"]}],
       "children": [{"outcome": "z1"}, {"outcome": "z2"}]},
      {"moves": [{"player": "Ann", "info_set": "h2", "actions": ["c", "d"]}],
       "children": [{"outcome": "z3"}, {"outcome": "z4"}]}
    ]
  }
}"#,
    )
    .unwrap();
    let out = icbd(&["check", path_str(&forgetful), "--condition", "perfect-recall"]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
    // any other command refuses the game outright
    let out = icbd(&["solve", path_str(&forgetful), "--method", "icbd"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn input_errors_exit_two() {
    let out = icbd(&["solve", "/nonexistent/game.json", "--method", "icbd"]);
    assert_eq!(code(&out), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"format_version\": 1, \"players\": [] ").unwrap();
    let out = icbd(&["solve", path_str(&bad), "--method", "icbd"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let out = icbd(&["solve", path_str(&fixture("bos_outside.json")), "--method", "nope"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn random_generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = icbd(&[
            "gen",
            "random",
            "--seed",
            "17",
            "--nrt",
            "--depth",
            "3",
            "--actions",
            "3",
            "-o",
            path_str(p),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let out = icbd(&["check", path_str(&a), "--condition", "nrt"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn agenda_and_money_burning() {
    let dir = tempfile::tempdir().unwrap();
    let game = dir.path().join("agenda_game.json");
    let out = icbd(&[
        "gen",
        "agenda",
        path_str(&fixture("amendment_cycle.json")),
        "-o",
        path_str(&game),
    ]);
    assert_eq!(code(&out), 0);
    let solved = stdout(&icbd(&["solve", path_str(&game), "--method", "icbd"]));
    let bi = stdout(&icbd(&["solve", path_str(&game), "--method", "bi"]));
    assert!(solved.contains("outcomes: {y}"), "{solved}");
    assert!(bi.contains("outcomes: {y}"), "{bi}");
    assert_eq!(code(&icbd(&["check", path_str(&game), "--condition", "tdi"])), 0);

    let base = fixture("bos_base.json");
    let mb = dir.path().join("mb.json");
    let out = icbd(&[
        "gen",
        "moneyburn",
        path_str(&base),
        "--epsilon",
        "1/2",
        "--cap",
        "3",
        "-o",
        path_str(&mb),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&icbd(&["solve", path_str(&mb), "--method", "icbd"])).contains("outcomes: {0:U:L}"));
    let out = icbd(&[
        "gen",
        "moneyburn",
        path_str(&base),
        "--epsilon",
        "1",
        "--cap",
        "3",
        "-o",
        path_str(&mb),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn oracles_are_clean_on_fixtures() {
    for f in [
        "bos_outside.json",
        "reny_centipede.json",
        "order_dep.json",
        "outside_tmd.json",
    ] {
        for level in ["dominance", "icbd-step", "theorem31"] {
            let out = icbd(&["verify", path_str(&fixture(f)), "--oracle", level]);
            assert_eq!(code(&out), 0, "{f} {level}: {}", stdout(&out));
        }
    }
}

#[test]
fn traces_replay_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let game = fixture("bos_outside.json");
    let trace = dir.path().join("trace.json");
    let out = icbd(&[
        "solve",
        path_str(&game),
        "--method",
        "icbd",
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(code(&out), 0);
    let out = icbd(&["verify", path_str(&game), "--trace", path_str(&trace)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    // claim that Bob's R was removed in the first round instead of Ann's ID
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["iterations"][0]["eliminated"][0]["strategy"] = "IT".into();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let out = icbd(&["verify", path_str(&game), "--trace", path_str(&tampered)]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));
}

#[test]
fn witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let game = fixture("reny_centipede.json");
    let cert = dir.path().join("cert.json");
    let out = icbd(&[
        "witness",
        path_str(&game),
        "--player",
        "Bob",
        "--strategy",
        "DG",
        "-o",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let out = icbd(&["verify", path_str(&game), "--certificate", path_str(&cert)]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let bos = fixture("bos_outside.json");
    let out = icbd(&["witness", path_str(&bos), "--player", "Ann", "--strategy", "ID"]);
    assert_eq!(code(&out), 1);
    let out = icbd(&["witness", path_str(&bos), "--player", "1", "--strategy", "IT"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("\"format_version\": 1"));
}
