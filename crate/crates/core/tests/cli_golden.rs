mod support;

use std::process::Command;

#[test]
fn json_output_matches_golden_files() {
    let failures: Vec<String> = support::GOLDEN
        .iter()
        .filter_map(|(name, args)| support::check_golden(name, args).err())
        .collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn exit_codes_in_process() {
    for (name, args, code) in support::EXIT_CASES {
        support::check_exit(name, args, *code).unwrap();
    }
}

#[test]
fn exit_codes_from_binary() {
    let bin = env!("CARGO_BIN_EXE_hamlat");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();

    let ok = run(&["steinitz", "mul", "2^3*3", "3^inf"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "2^3*3^inf\n");

    let verify = run(&["cartan", "verify-theorem3", "--field", "gf2", "--sizes", "2,4", "--exhaustive"]);
    assert_eq!(verify.status.code(), Some(0));
    let text = String::from_utf8_lossy(&verify.stdout);
    assert!(text.contains("in_span               1"));
    assert!(text.contains("moves_at_k            4"));
    assert!(text.contains("normalizes_then_moves 1"));

    let overlap = support::golden_dir().join("inputs/chain_overlap.json");
    let bad = run(&["chain", "validate", overlap.to_str().unwrap(), "--json"]);
    assert_eq!(bad.status.code(), Some(1));
    let body: serde_json::Value = serde_json::from_slice(&bad.stdout).unwrap();
    assert_eq!(body["ok"], false);
    assert_eq!(body["result"]["embeddings"][0]["diagnostics"][0]["kind"], "overlap");

    assert_eq!(run(&["steinitz", "parse", "0"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("hamlat-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("st.json");
    let (code, stdout, _) =
        support::run_cli(&["chain", "st", "--sizes", "2,6", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let body: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(body["result"]["st"], "2*3");
    std::fs::remove_dir_all(dir).unwrap();
}
