//! CLI cases shared by the golden-file tests and the acceptance runner.

#![allow(dead_code)]

use std::path::PathBuf;

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// `@name` stands for `tests/golden/inputs/name`.
fn expand(args: &[&str]) -> Vec<String> {
    std::iter::once("hamlat".to_string())
        .chain(args.iter().map(|a| match a.strip_prefix('@') {
            Some(file) => golden_dir().join("inputs").join(file).display().to_string(),
            None => (*a).to_string(),
        }))
        .collect()
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = hamlat::cli::run(expand(args), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// One `--json` invocation per subcommand.
pub const GOLDEN: &[(&str, &[&str])] = &[
    ("steinitz_mul", &["steinitz", "mul", "2^3*3", "3^inf"]),
    ("steinitz_lcm", &["steinitz", "lcm", "2^3*5", "2*3^inf"]),
    ("steinitz_divides", &["steinitz", "divides", "2*3", "2^inf*3"]),
    ("steinitz_parse", &["steinitz", "parse", "7^inf*3*2^2"]),
    ("space_rank", &["space", "rank", "1010"]),
    ("space_distance", &["space", "distance", "1100", "1010"]),
    ("space_axioms", &["space", "axioms", "--n", "4", "--exhaustive"]),
    ("space_cover", &["space", "cover", "1100", "0110"]),
    ("tensor_element", &["tensor", "element", "10", "011"]),
    ("tensor_iso_check", &["tensor", "iso-check", "--n", "2", "--m", "3"]),
    ("tensor_cover_rank", &["tensor", "cover-rank", "110110", "--n", "2", "--m", "3", "--right", "110,001"]),
    ("periodic_rank", &["periodic", "rank", "011011"]),
    ("periodic_pseudorank", &["periodic", "pseudorank", "111:10"]),
    ("periodic_member", &["periodic", "member", "011", "--u", "3^inf"]),
    ("chain_validate", &["chain", "validate", "@chain_ok.json"]),
    ("chain_factor", &["chain", "factor", "--n", "2", "--s", "6"]),
    ("chain_decompose", &["chain", "decompose", "--sizes", "2,6,12,60"]),
    ("chain_st", &["chain", "st", "--sizes", "2,4,8"]),
    ("chain_iso", &["chain", "iso", "2,6", "3,6"]),
    ("cartan_check", &["cartan", "check", "@unipotent2_q.json", "--field", "q"]),
    ("cartan_conjugate", &["cartan", "conjugate", "@diag2_q.json", "@unipotent2_q.json", "--field", "q"]),
    ("cartan_count", &["cartan", "count", "--m", "2", "--field", "gf3"]),
    ("cartan_build_chain", &["cartan", "build-chain", "--sizes", "2,4", "--field", "gf2"]),
    ("cartan_verify_theorem3", &["cartan", "verify-theorem3", "--sizes", "2,4", "--field", "gf2", "--exhaustive"]),
    ("cartan_lemma2", &["cartan", "lemma2", "--n", "2", "--m", "2", "--field", "gf2"]),
    ("cartan_theorem4", &["cartan", "theorem4", "--primes", "2,3", "--field", "q"]),
];

/// Runs one golden case. With `HAMLAT_UPDATE_GOLDEN=1` the golden file is
/// rewritten instead of compared.
pub fn check_golden(name: &str, args: &[&str]) -> Result<(), String> {
    let mut full = args.to_vec();
    full.push("--json");
    let (code, out, err) = run_cli(&full);
    if code != 0 {
        return Err(format!("{name}: exit {code}, stderr {err}"));
    }
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var_os("HAMLAT_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != out {
        return Err(format!("{name}: output differs from {}\n--- got\n{out}", path.display()));
    }
    Ok(())
}

/// One deliberate failure per exit-code class, plus a success.
pub const EXIT_CASES: &[(&str, &[&str], i32)] = &[
    ("success", &["steinitz", "mul", "2", "3"], 0),
    ("verification failure: overlapping blocks", &["chain", "validate", "@chain_overlap.json"], 1),
    ("verification failure: not a Cartan frame", &["cartan", "check", "@identity_only_q.json", "--field", "q"], 1),
    ("usage: unknown subcommand", &["frobnicate"], 2),
    ("usage: missing argument", &["steinitz", "mul", "2"], 2),
    ("malformed input: bad Steinitz text", &["steinitz", "parse", "2^x"], 2),
    ("malformed input: truncated JSON", &["chain", "decompose", "@not_json.json"], 2),
    ("malformed input: missing file", &["chain", "st", "@no_such_file.json"], 2),
    ("malformed input: wrong field", &["cartan", "check", "@diag2_q.json", "--field", "gf2"], 2),
    ("precondition: n^2 > next size", &["cartan", "build-chain", "--sizes", "2,3", "--field", "gf2"], 2),
    ("resource cap: enumeration", &["cartan", "count", "--m", "3", "--field", "gf5"], 2),
    ("resource cap: budget", &["cartan", "verify-theorem3", "--sizes", "2,4", "--exhaustive", "--budget", "10"], 2),
];

pub fn check_exit(name: &str, args: &[&str], expected: i32) -> Result<(), String> {
    let (code, _, err) = run_cli(args);
    if code == expected {
        Ok(())
    } else {
        Err(format!("{name}: expected exit {expected}, got {code} ({err})"))
    }
}
