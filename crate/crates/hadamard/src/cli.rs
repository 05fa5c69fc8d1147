//! The `hadamard` command line.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hadamard_core::abp::{nisan_ranks, Abp};
use hadamard_core::cfg::{build_l1_grammar, build_l2_grammar, cfg_to_circuit, circuit_to_cfg, intersect_bruteforce};
use hadamard_core::lblab::{
    build_f, build_f_prime, corr_f_vs, exp_sum, permanent_hadamard, sum_coeffs, ExplicitParams,
};
use hadamard_core::pit::{det_to_abp, pit_bruteforce, pit_rational, pit_span_basis, reach_to_abp};
use hadamard_core::poly::{NcPoly, Word};
use hadamard_core::products::{hadamard_abp, hadamard_circuit_abp};
use hadamard_core::scalar::{Field, Rational, Scalar};
use hadamard_core::Caps;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::json::{
    parse_field_spec, scalar_to_json, to_string, AbpDto, CircuitDto, FieldDto, GrammarDto, GraphDto, MatrixDto,
    PolyDto, VerdictDto,
};
use crate::parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "hadamard",
    version,
    about = "Hadamard products of noncommutative polynomials"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Field for inputs that do not name one: q, fp:<p> or fpk:<p>:<k>.
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[arg(long, global = true)]
    pub max_terms: Option<usize>,
    #[arg(long, global = true)]
    pub max_degree: Option<usize>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Rewrite circuit gates of fan-in other than two into binary chains.
    #[arg(long, global = true)]
    pub normalize_fanin: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Zero test for a program.
    Pit {
        #[arg(value_enum)]
        method: PitArg,
        input: PathBuf,
        /// Trials for the randomized test.
        #[arg(long, default_value_t = 20)]
        trials: u32,
    },
    /// Hadamard product constructions.
    #[command(subcommand)]
    Hadamard(HadamardCmd),
    /// Partial-derivative matrix ranks of a polynomial or program.
    Nisan { input: PathBuf },
    /// Expand a program or circuit into a polynomial.
    Expand { input: PathBuf },
    /// Acyclic grammars.
    #[command(subcommand)]
    Cfg(CfgCmd),
    /// Reductions to zero testing.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Explicit-polynomial experiments.
    #[command(subcommand)]
    Lab(LabCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum PitArg {
    /// Exact test over the rationals.
    Det,
    /// Deterministic span-basis test.
    Span,
    /// Randomized test over a finite field.
    Rand,
    /// Full expansion.
    Brute,
}

#[derive(Debug, Subcommand)]
pub enum HadamardCmd {
    /// Product of two programs.
    Abp { left: PathBuf, right: PathBuf },
    /// Product of a circuit and a program.
    CircuitAbp { circuit: PathBuf, abp: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum CfgCmd {
    /// Circuit counting derivation trees.
    ToCircuit { grammar: PathBuf },
    /// Grammar from a monotone circuit.
    FromCircuit { circuit: PathBuf },
    /// Derivation counts for one word, or for every word up to a length.
    Count {
        grammar: PathBuf,
        /// Comma-separated terminal indices; empty for the empty word.
        #[arg(long)]
        word: Option<String>,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Common words up to a length.
    Intersect {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// Grammar for z w w^r with |z| = |w| = n.
    GenL1 {
        #[arg(long)]
        n: usize,
    },
    /// Grammar for w w^r z with |z| = |w| = n.
    GenL2 {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    /// Determinant of a square matrix as a program over no variables.
    Det2abp { matrix: PathBuf },
    /// s-t reachability as a program.
    Reach2abp { graph: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum LabCmd {
    /// The explicit polynomial F (or its positive part).
    BuildF {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: usize,
        /// Emit F' instead of F.
        #[arg(long)]
        prime: bool,
    },
    /// Correlations of F with F' and with random product polynomials.
    Corr {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        /// Monomials per factor of each random product.
        #[arg(long, default_value_t = 4)]
        terms: usize,
    },
    /// Character sums over random subsets of GF(2^p).
    Expsum {
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        /// Number of sets in each sum.
        #[arg(long, default_value_t = 2)]
        sets: usize,
        #[arg(long, default_value_t = 3)]
        size: usize,
    },
    /// The permanent as a product of two row and column polynomials.
    Perm {
        #[arg(long)]
        n: usize,
    },
}

struct Ctx {
    field: Option<Field>,
    seed: u64,
    caps: Caps,
    normalize_fanin: bool,
}

/// Runs the command line, writing the result to `out` (unless `--output`
/// is given) and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(text) => {
            let written = match &cli.global.output {
                Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
                None => out.write_all(text.as_bytes()).context("writing output"),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(err, "error: {e:#}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

/// 3 when a resource cap stopped the run, 2 otherwise.
pub fn exit_code(e: &anyhow::Error) -> i32 {
    let cap = e.chain().any(|c| {
        c.downcast_ref::<hadamard_core::Error>()
            .is_some_and(hadamard_core::Error::is_cap)
    });
    if cap {
        EXIT_CAP
    } else {
        EXIT_INPUT
    }
}

fn execute(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let mut caps = Caps::default();
    if let Some(t) = g.max_terms {
        caps.max_terms = t;
    }
    if let Some(d) = g.max_degree {
        caps.max_degree = d;
    }
    let ctx = Ctx {
        field: g.field.as_deref().map(parse_field_spec).transpose()?,
        seed: g.seed,
        caps,
        normalize_fanin: g.normalize_fanin,
    };
    if g.threads == 0 {
        bail!("--threads must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.threads).build()?;
    pool.install(|| dispatch(&cli.command, &ctx))
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<String> {
    let value = match cmd {
        Command::Pit { method, input, trials } => {
            let abp = read_abp(input, ctx)?;
            let v = match method {
                PitArg::Det => pit_rational(&abp)?,
                PitArg::Span => pit_span_basis(&abp)?,
                PitArg::Rand => parallel::pit_randomized_par(&abp, *trials, ctx.seed)?,
                PitArg::Brute => pit_bruteforce(&abp, &ctx.caps)?,
            };
            serde_json::to_value(VerdictDto::from_verdict(&v))?
        }
        Command::Hadamard(HadamardCmd::Abp { left, right }) => {
            let (p, q) = (read_abp(left, ctx)?, read_abp(right, ctx)?);
            let h = hadamard_abp(&p, &q)?;
            let r = &h.report;
            json!({
                "abp": AbpDto::from_abp(&h.abp),
                "report": {
                    "left_nodes": r.left_nodes,
                    "right_nodes": r.right_nodes,
                    "nodes_before_prune": r.nodes_before_prune,
                    "nodes_after_prune": r.nodes_after_prune,
                    "degrees": r.degrees.iter().map(|d| json!({
                        "degree": d.degree,
                        "left_layers": d.left_layers,
                        "right_layers": d.right_layers,
                        "product_layers": d.product_layers,
                        "nodes_after_prune": d.nodes_after_prune,
                    })).collect::<Vec<_>>(),
                },
            })
        }
        Command::Hadamard(HadamardCmd::CircuitAbp { circuit, abp }) => {
            let c = read_circuit(circuit, ctx)?;
            let p = read_abp(abp, ctx)?;
            let h = hadamard_circuit_abp(&c, &p)?;
            let size = h.circuit.size();
            json!({
                "circuit": CircuitDto::from_circuit(&h.circuit),
                "report": {
                    "input_gates": c.size().gates,
                    "input_nodes": p.node_count(),
                    "gates": size.gates,
                    "edges": size.edges,
                    "degrees": h.per_degree.iter().map(|d| json!({
                        "degree": d.degree,
                        "part_layers": d.part.layers(),
                        "table_gates": d.gates.len(),
                    })).collect::<Vec<_>>(),
                },
            })
        }
        Command::Nisan { input } => {
            let f = match read_value(input)? {
                v if v.get("layers").is_some() => {
                    from_value::<AbpDto>(v)?.to_abp(ctx.field.as_ref())?.expand(&ctx.caps)?
                }
                v => from_value::<PolyDto>(v)?.to_nc(ctx.field.as_ref())?,
            };
            nisan_report(&f, &ctx.caps)?
        }
        Command::Expand { input } => {
            let f = match read_value(input)? {
                v if v.get("gates").is_some() => from_value::<CircuitDto>(v)?
                    .to_circuit(ctx.field.as_ref(), ctx.normalize_fanin)?
                    .expand(&ctx.caps)?,
                v => from_value::<AbpDto>(v)?.to_abp(ctx.field.as_ref())?.expand(&ctx.caps)?,
            };
            serde_json::to_value(PolyDto::from_nc(&f))?
        }
        Command::Cfg(c) => cfg_command(c, ctx)?,
        Command::Reduce(ReduceCmd::Det2abp { matrix }) => {
            let m = read::<MatrixDto>(matrix)?.to_matrix(ctx.field.as_ref())?;
            serde_json::to_value(AbpDto::from_abp(&det_to_abp(&m)?))?
        }
        Command::Reduce(ReduceCmd::Reach2abp { graph }) => {
            let g = read::<GraphDto>(graph)?.to_graph()?;
            serde_json::to_value(AbpDto::from_abp(&reach_to_abp(&g)?))?
        }
        Command::Lab(l) => lab_command(l, ctx)?,
    };
    Ok(to_string(&value))
}

fn nisan_report(f: &NcPoly, caps: &Caps) -> Result<Value> {
    let top = f.degree().unwrap_or(0);
    let mut parts = Vec::new();
    let mut total = 0;
    for d in 0..=top {
        let part = f.homogeneous_part(d);
        if part.is_zero() {
            continue;
        }
        let ranks = nisan_ranks(&part, d, caps)?;
        let sum: usize = ranks.iter().sum();
        total += sum;
        parts.push(json!({ "degree": d, "ranks": ranks, "total": sum }));
    }
    Ok(json!({ "parts": parts, "total": total }))
}

fn cfg_command(c: &CfgCmd, ctx: &Ctx) -> Result<Value> {
    Ok(match c {
        CfgCmd::ToCircuit { grammar } => {
            let g = read::<GrammarDto>(grammar)?.to_cfg()?;
            serde_json::to_value(CircuitDto::from_circuit(&cfg_to_circuit(&g)?))?
        }
        CfgCmd::FromCircuit { circuit } => {
            let c = read_circuit(circuit, ctx)?;
            serde_json::to_value(GrammarDto::from_cfg(&circuit_to_cfg(&c)?))?
        }
        CfgCmd::Count { grammar, word, max_len } => {
            let g = read::<GrammarDto>(grammar)?.to_cfg()?;
            match word {
                Some(w) => {
                    let w = parse_word(w)?;
                    json!({ "word": w.0, "count": g.count_derivations(&w).to_string() })
                }
                None => {
                    let counts: Vec<Value> = g
                        .language(*max_len, &ctx.caps)?
                        .iter()
                        .map(|w| json!({ "word": w.0, "count": g.count_derivations(w).to_string() }))
                        .collect();
                    json!({ "max_len": max_len, "counts": counts })
                }
            }
        }
        CfgCmd::Intersect { first, second, max_len } => {
            let g1 = read::<GrammarDto>(first)?.to_cfg()?;
            let g2 = read::<GrammarDto>(second)?.to_cfg()?;
            let both = intersect_bruteforce(&g1, &g2, *max_len, &ctx.caps)?;
            json!({
                "max_len": max_len,
                "empty": both.is_empty(),
                "words": both.iter().map(|w| w.0.clone()).collect::<Vec<_>>(),
            })
        }
        CfgCmd::GenL1 { n } => serde_json::to_value(GrammarDto::from_cfg(&build_l1_grammar(*n)?))?,
        CfgCmd::GenL2 { n } => serde_json::to_value(GrammarDto::from_cfg(&build_l2_grammar(*n)?))?,
    })
}

fn ratio(r: &Rational) -> Value {
    Value::String(Scalar::rational(r.clone()).to_string())
}

fn lab_command(l: &LabCmd, ctx: &Ctx) -> Result<Value> {
    Ok(match l {
        LabCmd::BuildF { t, p, prime } => {
            let params = ExplicitParams::new(*t, *p)?;
            let f = if *prime {
                build_f_prime(&params, &ctx.caps)?
            } else {
                build_f(&params, &ctx.caps)?
            };
            json!({
                "t": t,
                "p": p,
                "n": params.n(),
                "sum_coeffs": scalar_to_json(&sum_coeffs(&f)),
                "poly": PolyDto::from_commutative(&f),
            })
        }
        LabCmd::Corr { t, p, samples, terms } => {
            let params = ExplicitParams::new(*t, *p)?;
            let f = build_f(&params, &ctx.caps)?;
            let fp = build_f_prime(&params, &ctx.caps)?;
            let own = corr_f_vs(&f, &fp)?;
            let battery = parallel::corr_battery(&f, *samples, *terms, ctx.seed)?;
            let worst = battery.iter().map(|r| r.squared_ratio.clone()).max();
            json!({
                "t": t,
                "p": p,
                "n": params.n(),
                "sum_coeffs": scalar_to_json(&sum_coeffs(&f)),
                "norm_sq": ratio(&f.norm_sq()?),
                "f_prime": { "corr": ratio(&own.corr), "squared_ratio": ratio(&own.squared_ratio) },
                "battery": battery
                    .iter()
                    .map(|r| json!({ "corr": ratio(&r.corr), "squared_ratio": ratio(&r.squared_ratio) }))
                    .collect::<Vec<_>>(),
                "max_squared_ratio": worst.as_ref().map(ratio),
            })
        }
        LabCmd::Expsum { p, samples, sets, size } => {
            let field = Field::extension(2, *p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let mut out = Vec::new();
            for _ in 0..*samples {
                let s: Vec<Vec<Scalar>> = (0..*sets)
                    .map(|_| (0..*size).map(|_| field.random(&mut rng)).collect())
                    .collect();
                let z = field.random(&mut rng);
                let sum = exp_sum(&s, &z)?;
                out.push(json!({
                    "z": scalar_to_json(&z),
                    "sets": s.iter().map(|a| a.iter().map(scalar_to_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    "sum": sum.to_string(),
                }));
            }
            json!({ "p": p, "field": FieldDto::from_field(&field), "samples": out })
        }
        LabCmd::Perm { n } => {
            let (f, g) = permanent_hadamard(*n, &ctx.caps)?;
            let h = f.hadamard(&g)?;
            json!({
                "n": n,
                "f_terms": f.len(),
                "g_terms": g.len(),
                "permanent": PolyDto::from_commutative(&h),
            })
        }
    })
}

fn parse_word(s: &str) -> Result<Word> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Word::empty());
    }
    s.split(',')
        .map(|t| t.trim().parse::<u32>().with_context(|| format!("bad letter {t:?}")))
        .collect::<Result<Vec<_>>>()
        .map(Word)
}

fn read_value(path: &Path) -> Result<Value> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        s
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn from_value<T: DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| anyhow!("malformed input: {e}"))
}

fn read<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_value(read_value(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_abp(path: &Path, ctx: &Ctx) -> Result<Abp> {
    read::<AbpDto>(path)?
        .to_abp(ctx.field.as_ref())
        .with_context(|| format!("in {}", path.display()))
}

fn read_circuit(path: &Path, ctx: &Ctx) -> Result<hadamard_core::circuit::Circuit> {
    read::<CircuitDto>(path)?
        .to_circuit(ctx.field.as_ref(), ctx.normalize_fanin)
        .with_context(|| format!("in {}", path.display()))
}
