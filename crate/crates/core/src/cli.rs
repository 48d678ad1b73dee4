//! The `hamlat` command line.
//!
//! Exit codes: 0 on success, 1 when a verification finds a failure (the
//! report is still printed), 2 for usage errors, unreadable or malformed
//! input, unmet preconditions and exceeded resource caps.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::chains::{
    decompose_chain, factor_complement, iso_test, steinitz_of_chain, validate_embedding,
    ChainSpace, Embedding, IsoOutcome,
};
use crate::hamming::{
    check_rank_axioms, check_rank_axioms_exhaustive, distance, orthogonal_cover, AxiomReport,
    HElement, OrthogonalCover, StandardSpace,
};
use crate::locmatrix::{
    self, build_theorem3_chain, conjugate_cartans, conjugation_maps, count_cartans, is_cartan,
    lemma2_witness, theorem4_check, verify_theorem3, CartanFrame, Field, FieldTag, Gf2, Gf3, Gf5,
    Matrix, VerifyMode, Q,
};
use crate::periodic::{EventuallyPeriodicSequence, PeriodicSequence};
use crate::steinitz::SteinitzNumber;
use crate::tensor::{rank_via_cover, tensor_element, tensor_space_iso};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "hamlat", version, about = "Hamming spaces, Steinitz numbers and Cartan subalgebras")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steinitz number arithmetic.
    #[command(subcommand)]
    Steinitz(SteinitzCmd),
    /// Standard Hamming spaces H_n.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Tensor products H_n ⊗ H_m.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Periodic and eventually periodic sequences.
    #[command(subcommand)]
    Periodic(PeriodicCmd),
    /// Chains H_{n_1} ⊂ H_{n_2} ⊂ … of standard spaces.
    #[command(subcommand)]
    Chain(ChainCmd),
    /// Cartan frames in matrix algebras.
    #[command(subcommand)]
    Cartan(CartanCmd),
}

#[derive(Subcommand, Debug)]
enum SteinitzCmd {
    Mul { a: String, b: String },
    Lcm { a: String, b: String },
    Divides { a: String, b: String },
    Parse { a: String },
}

#[derive(Subcommand, Debug)]
enum SpaceCmd {
    /// Rank of a bit-string.
    Rank { x: String },
    Distance { a: String, b: String },
    /// Check the rank axioms on H_n.
    Axioms {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Orthogonal cover through the given elements.
    Cover {
        #[arg(required = true)]
        elements: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum TensorCmd {
    /// x ⊗ y as an element of H_{nm}.
    Element { x: String, y: String },
    /// Check H_n ⊗ H_m ≅ H_{nm}.
    IsoCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Rank of x ∈ H_{nm} through covers of both factors.
    CoverRank {
        x: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        /// Left cover members (default: atoms).
        #[arg(long, value_delimiter = ',')]
        left: Vec<String>,
        /// Right cover members (default: atoms).
        #[arg(long, value_delimiter = ',')]
        right: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum PeriodicCmd {
    /// Rank of a periodic sequence given by one period.
    Rank { pattern: String },
    /// Besicovitch pseudorank of `pre:tail`.
    Pseudorank { sequence: String },
    /// Whether the minimal period divides u.
    Member {
        pattern: String,
        #[arg(long)]
        u: String,
    },
}

#[derive(Args, Debug)]
struct ChainInput {
    /// Chain file (JSON).
    file: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', conflicts_with = "file")]
    sizes: Vec<usize>,
}

#[derive(Subcommand, Debug)]
enum ChainCmd {
    Validate(ChainInput),
    /// Split H_s as H_n ⊗ H_{s/n} along an embedding.
    Factor {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        s: usize,
        /// Blocks as JSON, e.g. [[0,2],[1,3]] (default: consecutive).
        #[arg(long, conflicts_with = "random")]
        blocks: Option<String>,
        /// Use a random partition.
        #[arg(long)]
        random: bool,
    },
    Decompose(ChainInput),
    St(ChainInput),
    /// Compare two chains, each a file or a comma list of sizes.
    Iso { first: String, second: String },
}

#[derive(Subcommand, Debug)]
enum CartanCmd {
    /// Check a frame file (JSON array of matrices).
    Check {
        file: PathBuf,
        #[arg(long, default_value = "q")]
        field: FieldTag,
    },
    /// Find x with x⁻¹ e_i x = f_i.
    Conjugate {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value = "q")]
        field: FieldTag,
    },
    /// Count Cartan frames of M_m over a finite field.
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "gf2")]
        field: FieldTag,
    },
    BuildChain {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "gf2")]
        field: FieldTag,
    },
    VerifyTheorem3 {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "gf2")]
        field: FieldTag,
        /// Level to test, 1-based (default: the one below the top).
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long, conflicts_with = "trials")]
        exhaustive: bool,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = locmatrix::DEFAULT_BUDGET)]
        budget: u64,
    },
    Lemma2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value = "q")]
        field: FieldTag,
    },
    Theorem4 {
        #[arg(long, value_delimiter = ',', required = true)]
        primes: Vec<u64>,
        #[arg(long, default_value = "q")]
        field: FieldTag,
        /// Use only the first k primes.
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// Result of one command: a JSON payload, its text rendering, and whether
/// the verification (if any) passed.
struct Outcome {
    command: &'static str,
    ok: bool,
    result: Value,
    text: String,
}

impl Outcome {
    fn ok(command: &'static str, result: Value, text: impl Into<String>) -> Self {
        Self { command, ok: true, result, text: text.into() }
    }

    fn checked(command: &'static str, ok: bool, result: Value, text: impl Into<String>) -> Self {
        Self { command, ok, result, text: text.into() }
    }
}

#[derive(Debug)]
struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

type CmdResult = Result<Outcome, CliError>;

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

macro_rules! with_field {
    ($tag:expr, $f:ident => $body:expr) => {
        match $tag {
            FieldTag::Gf2 => {
                type $f = Gf2;
                $body
            }
            FieldTag::Gf3 => {
                type $f = Gf3;
                $body
            }
            FieldTag::Gf5 => {
                type $f = Gf5;
                $body
            }
            FieldTag::Q => {
                type $f = Q;
                $body
            }
        }
    };
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(CliError(msg)) => {
            if cli.json {
                let body = json!({ "ok": false, "error": msg });
                let _ = writeln!(stdout, "{}", serde_json::to_string_pretty(&body).expect("json"));
            }
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let rendered = if cli.json {
        let body = json!({ "command": outcome.command, "ok": outcome.ok, "result": outcome.result });
        serde_json::to_string_pretty(&body).expect("json") + "\n"
    } else {
        let mut t = outcome.text.clone();
        if !t.ends_with('\n') {
            t.push('\n');
        }
        t
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => {
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    if outcome.ok {
        EXIT_OK
    } else {
        let _ = writeln!(stderr, "{}: verification failed", outcome.command);
        EXIT_FAILURE
    }
}

fn dispatch(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Steinitz(c) => steinitz_cmd(c),
        Command::Space(c) => space_cmd(c, cli.seed),
        Command::Tensor(c) => tensor_cmd(c),
        Command::Periodic(c) => periodic_cmd(c),
        Command::Chain(c) => chain_cmd(c, cli.seed),
        Command::Cartan(c) => cartan_cmd(c, cli.seed),
    }
}

fn steinitz(s: &str) -> Result<SteinitzNumber, CliError> {
    Ok(s.parse::<SteinitzNumber>()?)
}

fn steinitz_cmd(c: &SteinitzCmd) -> CmdResult {
    Ok(match c {
        SteinitzCmd::Mul { a, b } => {
            let r = steinitz(a)?.mul(&steinitz(b)?);
            Outcome::ok("steinitz mul", json!({ "value": r }), r.to_string())
        }
        SteinitzCmd::Lcm { a, b } => {
            let r = steinitz(a)?.lcm(&steinitz(b)?);
            Outcome::ok("steinitz lcm", json!({ "value": r }), r.to_string())
        }
        SteinitzCmd::Divides { a, b } => {
            let d = steinitz(a)?.divides(&steinitz(b)?);
            Outcome::ok("steinitz divides", json!({ "divides": d }), d.to_string())
        }
        SteinitzCmd::Parse { a } => {
            let s = steinitz(a)?;
            let factors: Vec<Value> = s
                .factors()
                .map(|(p, e)| json!({ "prime": p, "exponent": e.to_string() }))
                .collect();
            let natural = s.to_natural().ok().map(|n| n.to_string());
            let mut text = format!("canonical {s}\nfinite    {}", s.is_finite());
            if let Some(n) = &natural {
                write!(text, "\nvalue     {n}").unwrap();
            }
            Outcome::ok(
                "steinitz parse",
                json!({ "canonical": s, "finite": s.is_finite(), "natural": natural, "factors": factors }),
                text,
            )
        }
    })
}

fn element(s: &str) -> Result<HElement, CliError> {
    Ok(s.parse::<HElement>()?)
}

fn axiom_text(r: &AxiomReport) -> String {
    let mut t = format!(
        "H_{}: {} elements, {} orthogonal pairs ({})\nviolations {}",
        r.n,
        r.elements_checked,
        r.pairs_checked,
        if r.exhaustive { "exhaustive" } else { "sampled" },
        r.violations.len()
    );
    for v in r.violations.iter().take(5) {
        write!(t, "\n  axiom {}: {}", v.axiom, v.detail).unwrap();
    }
    t
}

fn space_cmd(c: &SpaceCmd, seed: u64) -> CmdResult {
    Ok(match c {
        SpaceCmd::Rank { x } => {
            let x = element(x)?;
            let r = x.rank();
            Outcome::ok("space rank", json!({ "element": x, "rank": r }), r.to_string())
        }
        SpaceCmd::Distance { a, b } => {
            let d = distance(&element(a)?, &element(b)?)?;
            Outcome::ok("space distance", json!({ "distance": d }), d.to_string())
        }
        SpaceCmd::Axioms { n, exhaustive, trials } => {
            let space = StandardSpace::new(*n)?;
            let report = if *exhaustive {
                check_rank_axioms_exhaustive(space)?
            } else {
                check_rank_axioms(space, *trials, seed)
            };
            Outcome::checked("space axioms", report.passed(), to_json(&report), axiom_text(&report))
        }
        SpaceCmd::Cover { elements } => {
            let xs: Vec<HElement> = elements.iter().map(|s| element(s)).collect::<Result<_, _>>()?;
            let cover = orthogonal_cover(&xs)?;
            let decompositions: Vec<Vec<usize>> = xs
                .iter()
                .map(|x| cover.decompose(x).map(|d| d.expect("cover built through x")))
                .collect::<Result<_, _>>()?;
            let mut text = String::new();
            for (i, m) in cover.members().iter().enumerate() {
                writeln!(text, "c{i} {m}").unwrap();
            }
            for (x, d) in xs.iter().zip(&decompositions) {
                let parts: Vec<String> = d.iter().map(|i| format!("c{i}")).collect();
                writeln!(text, "{x} = {}", parts.join(" + ")).unwrap();
            }
            Outcome::ok(
                "space cover",
                json!({ "members": cover.members(), "decompositions": decompositions }),
                text,
            )
        }
    })
}

fn cover_or_atoms(members: &[String], n: usize) -> Result<OrthogonalCover, CliError> {
    if members.is_empty() {
        return Ok(OrthogonalCover::atoms(StandardSpace::new(n)?));
    }
    let xs: Vec<HElement> = members.iter().map(|s| element(s)).collect::<Result<_, _>>()?;
    if let Some(x) = xs.iter().find(|x| x.n() != n) {
        return Err(CliError(format!("cover member {x} is not in H_{n}")));
    }
    Ok(OrthogonalCover::new(xs)?)
}

fn tensor_cmd(c: &TensorCmd) -> CmdResult {
    Ok(match c {
        TensorCmd::Element { x, y } => {
            let (x, y) = (element(x)?, element(y)?);
            let t = tensor_element(&x, &y);
            let text = format!("{t}\nrank {}", t.rank());
            Outcome::ok("tensor element", json!({ "element": t, "rank": t.rank() }), text)
        }
        TensorCmd::IsoCheck { n, m } => {
            let r = tensor_space_iso(*n, *m)?;
            let text = format!(
                "H_{n} ⊗ H_{m} ≅ H_{}: {}\npure tensors {}, pairs {} ({})",
                n * m,
                if r.passed() { "ok" } else { "FAILED" },
                r.pure_tensors_checked,
                r.pairs_checked,
                if r.pairs_exhaustive { "exhaustive" } else { "strided" }
            );
            Outcome::checked("tensor iso-check", r.passed(), to_json(&r), text)
        }
        TensorCmd::CoverRank { x, n, m, left, right } => {
            let x = element(x)?;
            let (l, r) = (cover_or_atoms(left, *n)?, cover_or_atoms(right, *m)?);
            let via = rank_via_cover(&x, &l, &r)?;
            let direct = x.rank();
            let agree = via == direct;
            let text = format!("cover rank {via}\ndirect     {direct}");
            Outcome::checked(
                "tensor cover-rank",
                agree,
                json!({ "cover_rank": via, "direct_rank": direct, "agree": agree }),
                text,
            )
        }
    })
}

fn periodic_cmd(c: &PeriodicCmd) -> CmdResult {
    Ok(match c {
        PeriodicCmd::Rank { pattern } => {
            let s: PeriodicSequence = pattern.parse()?;
            let text = format!("{s}\nperiod {}\nrank   {}", s.period(), s.rank());
            Outcome::ok(
                "periodic rank",
                json!({ "sequence": s, "period": s.period(), "rank": s.rank() }),
                text,
            )
        }
        PeriodicCmd::Pseudorank { sequence } => {
            let s: EventuallyPeriodicSequence = sequence.parse()?;
            let p = s.besicovitch_pseudorank();
            let text = format!("{s}\npseudorank {p}\nnull       {}", s.is_null());
            Outcome::ok(
                "periodic pseudorank",
                json!({ "sequence": s, "pseudorank": p, "null": s.is_null() }),
                text,
            )
        }
        PeriodicCmd::Member { pattern, u } => {
            let s: PeriodicSequence = pattern.parse()?;
            let u = steinitz(u)?;
            let member = s.is_u_periodic(&u);
            let text = format!("period {} {} {u}", s.period(), if member { "divides" } else { "does not divide" });
            Outcome::ok(
                "periodic member",
                json!({ "sequence": s, "period": s.period(), "u": u, "member": member }),
                text,
            )
        }
    })
}

#[derive(Deserialize)]
struct RawChain {
    sizes: Vec<usize>,
    #[serde(default)]
    embeddings: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default)]
    complete: bool,
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError(format!("cannot read {}: {e}", path.display())))
}

fn raw_chain(input: &ChainInput) -> Result<RawChain, CliError> {
    match &input.file {
        Some(path) => serde_json::from_str(&read_file(path)?)
            .map_err(|e| CliError(format!("{}: {e}", path.display()))),
        None if input.sizes.is_empty() => Err(CliError("give a chain file or --sizes".into())),
        None => Ok(RawChain { sizes: input.sizes.clone(), embeddings: None, complete: false }),
    }
}

fn chain_from_raw(raw: RawChain) -> Result<ChainSpace, CliError> {
    let embeddings = raw.embeddings.map(|list| {
        list.into_iter()
            .zip(raw.sizes.windows(2))
            .map(|(b, w)| Embedding::from_blocks(w[0], w[1], b))
            .collect()
    });
    Ok(ChainSpace::new(raw.sizes, embeddings, raw.complete)?)
}

/// A file path, or a comma list of sizes.
fn chain_arg(s: &str) -> Result<ChainSpace, CliError> {
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == ',') {
        let sizes: Vec<usize> = s.split(',').map(str::parse).collect::<Result<_, _>>()?;
        return Ok(ChainSpace::canonical(&sizes)?);
    }
    let raw: RawChain = serde_json::from_str(&read_file(Path::new(s))?)
        .map_err(|e| CliError(format!("{s}: {e}")))?;
    chain_from_raw(raw)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn chain_cmd(c: &ChainCmd, seed: u64) -> CmdResult {
    Ok(match c {
        ChainCmd::Validate(input) => {
            let raw = raw_chain(input)?;
            let sizes = raw.sizes.clone();
            let reports: Vec<Value> = match &raw.embeddings {
                Some(list) => list
                    .iter()
                    .zip(sizes.windows(2))
                    .map(|(b, w)| to_json(&validate_embedding(&Embedding::from_blocks(w[0], w[1], b.clone()))))
                    .collect(),
                None => Vec::new(),
            };
            let verdict = chain_from_raw(raw);
            let error = verdict.as_ref().err().map(|e| e.0.clone());
            let text = match &error {
                None => format!("chain {} valid", join(&sizes)),
                Some(e) => format!("chain {} invalid: {e}", join(&sizes)),
            };
            Outcome::checked(
                "chain validate",
                error.is_none(),
                json!({ "sizes": sizes, "valid": error.is_none(), "error": error, "embeddings": reports }),
                text,
            )
        }
        ChainCmd::Factor { n, s, blocks, random } => {
            let e = match (blocks, random) {
                (Some(text), _) => {
                    let b: Vec<Vec<usize>> = serde_json::from_str(text)?;
                    Embedding::from_blocks(*n, *s, b)
                }
                (None, true) => Embedding::random(*n, *s, &mut ChaCha8Rng::seed_from_u64(seed))?,
                (None, false) => Embedding::canonical(*n, *s)?,
            };
            let validation = validate_embedding(&e);
            if !validation.valid {
                let text = format!("invalid embedding: {:?}", validation.diagnostics);
                return Ok(Outcome::checked("chain factor", false, json!({ "embedding": validation }), text));
            }
            let f = factor_complement(&e)?;
            let report = f.verify();
            let mut text = format!("H_{s} = H_{n} ⊗ H_{}\n", s / n);
            for (j, g) in f.generators.iter().enumerate() {
                writeln!(text, "f{j} {g}").unwrap();
            }
            write!(text, "verified {}", report.passed()).unwrap();
            Outcome::checked(
                "chain factor",
                report.passed(),
                json!({ "factorization": f, "report": report }),
                text,
            )
        }
        ChainCmd::Decompose(input) => {
            let chain = chain_from_raw(raw_chain(input)?)?;
            let d = decompose_chain(&chain);
            let st = steinitz_of_chain(&chain);
            let text = format!("primes {}\nst     {st}", join(&d.primes));
            Outcome::ok(
                "chain decompose",
                json!({ "sizes": chain.sizes(), "primes": d.primes, "per_level": d.per_level, "st": st }),
                text,
            )
        }
        ChainCmd::St(input) => {
            let chain = chain_from_raw(raw_chain(input)?)?;
            let st = steinitz_of_chain(&chain);
            Outcome::ok("chain st", json!({ "sizes": chain.sizes(), "st": st }), st.to_string())
        }
        ChainCmd::Iso { first, second } => {
            let (a, b) = (chain_arg(first)?, chain_arg(second)?);
            let outcome = iso_test(&a, &b)?;
            let text = match &outcome {
                IsoOutcome::IsomorphicTruncations { bijection } => {
                    format!("isomorphic truncations\nbijection {}", join(bijection))
                }
                IsoOutcome::Distinct => "distinct".to_string(),
                IsoOutcome::UndecidedAtDepth => "undecided at this depth".to_string(),
            };
            Outcome::ok(
                "chain iso",
                json!({
                    "st_first": steinitz_of_chain(&a),
                    "st_second": steinitz_of_chain(&b),
                    "outcome": outcome,
                }),
                text,
            )
        }
    })
}

fn read_frame<F: Field>(path: &Path) -> Result<Vec<Matrix<F>>, CliError> {
    serde_json::from_str(&read_file(path)?).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn cartan_cmd(c: &CartanCmd, seed: u64) -> CmdResult {
    match c {
        CartanCmd::Check { file, field } => with_field!(*field, F => cartan_check::<F>(file)),
        CartanCmd::Conjugate { first, second, field } => {
            with_field!(*field, F => cartan_conjugate::<F>(first, second))
        }
        CartanCmd::Count { m, field } => with_field!(*field, F => {
            let c = count_cartans::<F>(*m)?;
            let text = format!(
                "M_{}(GF({})): {} rank-1 idempotents, {} Cartan frames\nformula {} ({})",
                c.m, c.q, c.rank_one_idempotents, c.enumerated, c.formula,
                if c.agrees { "agrees" } else { "DISAGREES" }
            );
            Ok(Outcome::checked("cartan count", c.agrees, to_json(&c), text))
        }),
        CartanCmd::BuildChain { sizes, field } => with_field!(*field, F => {
            let chain = build_theorem3_chain::<F>(sizes)?;
            let mut text = format!("chain {} over {field}", join(sizes));
            for ch in &chain.checks {
                write!(
                    text,
                    "\nlevel {}: frame {}, contains lower {}, intersection dim {} ({})",
                    ch.level, ch.frame_valid, ch.contains_lower, ch.intersection_dim,
                    if ch.passed() { "ok" } else { "FAILED" }
                ).unwrap();
            }
            Ok(Outcome::checked("cartan build-chain", chain.passed(), to_json(&chain), text))
        }),
        CartanCmd::VerifyTheorem3 { sizes, field, depth, exhaustive, trials, budget } => {
            with_field!(*field, F => {
                let chain = build_theorem3_chain::<F>(sizes)?;
                let level = depth.unwrap_or(sizes.len().saturating_sub(1));
                let mode = match (exhaustive, trials) {
                    (true, _) => VerifyMode::Exhaustive,
                    (false, Some(t)) => VerifyMode::Sampled { trials: *t, seed },
                    (false, None) if F::order().is_some() => VerifyMode::Exhaustive,
                    (false, None) => VerifyMode::Sampled { trials: 1000, seed },
                };
                let r = verify_theorem3(&chain, level, mode, *budget)?;
                let text = format!(
                    "chain {} over {field}, level {level}, {}\ncandidates {}, invertible {}\n\
                     in_span               {}\nmoves_at_k            {}\nnormalizes_then_moves {}\nviolations            {}",
                    join(sizes),
                    match mode { VerifyMode::Exhaustive => "exhaustive".to_string(), VerifyMode::Sampled { trials, .. } => format!("{trials} samples") },
                    r.candidates, r.invertible, r.tallies.in_span, r.tallies.moves_at_k,
                    r.tallies.normalizes_then_moves, r.violations
                );
                Ok(Outcome::checked("cartan verify-theorem3", r.zero_violations, to_json(&r), text))
            })
        }
        CartanCmd::Lemma2 { n, m, field } => with_field!(*field, F => {
            let w = lemma2_witness::<F>(*n, *m)?;
            let text = format!(
                "x = C_{n} ⊗ I_{m}\n{}\ninvertible {}, outside span {}, action {:?}",
                w.x, w.invertible, w.outside_span, w.action
            );
            Ok(Outcome::checked("cartan lemma2", w.passed(), to_json(&w), text))
        }),
        CartanCmd::Theorem4 { primes, field, depth } => with_field!(*field, F => {
            let used = &primes[..depth.unwrap_or(primes.len()).min(primes.len())];
            let r = theorem4_check::<F>(used)?;
            let text = format!(
                "primes {} (N = {}) over {field}\nE(D) ≅ tensor of H_p: elements {} ({}), pure tensors {} ({})\nst {} = {} ({})",
                join(used), r.size, r.elements_checked, r.elements_ok, r.pure_tensors_checked,
                r.pure_tensors_ok, r.st_algebra, r.st_space, r.st_equal
            );
            Ok(Outcome::checked("cartan theorem4", r.passed(), to_json(&r), text))
        }),
    }
}

fn cartan_check<F: Field>(file: &Path) -> CmdResult {
    let frame = read_frame::<F>(file)?;
    let check = is_cartan(&frame);
    let text = if check.valid {
        format!("valid Cartan frame of M_{}", frame[0].n())
    } else {
        format!("not a Cartan frame: {:?}", check.diagnostics)
    };
    Ok(Outcome::checked("cartan check", check.valid, to_json(&check), text))
}

fn cartan_conjugate<F: Field>(first: &Path, second: &Path) -> CmdResult {
    let (a, b) = (read_frame::<F>(first)?, read_frame::<F>(second)?);
    let (ca, cb) = (is_cartan(&a), is_cartan(&b));
    if !ca.valid || !cb.valid {
        return Ok(Outcome::checked(
            "cartan conjugate",
            false,
            json!({ "first": ca, "second": cb }),
            format!("not Cartan frames: {:?} / {:?}", ca.diagnostics, cb.diagnostics),
        ));
    }
    let (h1, h2) = (CartanFrame::new(a)?, CartanFrame::new(b)?);
    let x = conjugate_cartans(&h1, &h2)?;
    let verified = conjugation_maps(&x, &h1, &h2);
    let text = format!("x =\n{x}\nverified {verified}");
    Ok(Outcome::checked("cartan conjugate", verified, json!({ "x": x, "verified": verified }), text))
}
