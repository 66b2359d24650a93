//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finmod::{iso_fingerprint, parse_sequence, pontryagin_dual, FinMod, ModuleDoc, SeqElement};
use crate::koszul::{koszul_chain, koszul_cochain, regularity_certificate};
use crate::tate::{d_functor, group_cohomology, local_cohomology, StableValue};
use crate::theorems::{self, reports_to_json, Params, VerificationReport};

#[derive(Debug, Parser)]
#[command(
    name = "duality-lab",
    version,
    about = "Exact checks of Koszul, local and Tate duality on finite modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one theorem verifier.
    Verify {
        id: String,
        /// Run the corrupted fixture instead; a sound verifier reports FAIL.
        #[arg(long)]
        negative: bool,
    },
    /// Run every verifier.
    Suite {
        #[arg(long)]
        negative: bool,
    },
    /// Run a single computation on a module read from JSON.
    Compute { op: Op },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Op {
    Tor,
    Ext,
    LocalCohomology,
    DFunctor,
    GroupCohomology,
    Dual,
    Fingerprint,
    Regularity,
}

#[derive(Debug, Args)]
pub struct Opts {
    #[arg(long, global = true, default_value_t = 2)]
    pub p: u64,
    #[arg(long, global = true, default_value_t = 3)]
    pub d: usize,
    #[arg(long, global = true, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, global = true, env = "DUALITY_LAB_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "k-max", global = true, default_value_t = 12)]
    pub k_max: usize,
    /// Degree bound for graded computations.
    #[arg(long, global = true, default_value_t = 12)]
    pub n: usize,
    /// Stabilization window.
    #[arg(long, global = true, default_value_t = 2)]
    pub w: usize,
    /// Fingerprint word length.
    #[arg(long, global = true, default_value_t = 2)]
    pub l: usize,
    /// Worker threads; 0 means one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Write the JSON report here; the summary then goes to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Comma-separated sequence, e.g. `P1,V1:2,G1:0`.
    #[arg(long, global = true)]
    pub seq: Option<String>,
    /// Module JSON file.
    #[arg(long, global = true)]
    pub module: Option<PathBuf>,
    /// Degree.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<i64>,
    /// Stage `k` of the subgroup `U_k` for group cohomology.
    #[arg(long, global = true, default_value_t = 0)]
    pub k: u32,
}

impl Opts {
    pub fn params(&self) -> Params {
        Params {
            p: self.p,
            d: self.d,
            trials: self.trials,
            seed: self.seed,
            k_max: self.k_max,
            n: self.n,
            w: self.w,
            l: self.l,
        }
    }
}

/// A finished run: the JSON document, a text summary and whether it passed.
pub struct Outcome {
    pub json: String,
    pub summary: String,
    pub passed: bool,
}

pub fn load_module(path: &Path) -> Result<FinMod> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    ModuleDoc::parse(&text)
        .and_then(|doc| doc.to_module())
        .map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            e => e,
        })
}

fn need<T: Clone>(v: &Option<T>, flag: &str, op: Op) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::Parse(format!("compute {}: missing --{flag}", op_name(op))))
}

fn op_name(op: Op) -> String {
    op.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

fn module_json(m: &FinMod) -> Value {
    serde_json::to_value(ModuleDoc::from_module(m)).expect("module serializes")
}

fn stable_json(v: &StableValue) -> Value {
    json!({
        "module": module_json(&v.module),
        "certificate": v.certificate,
        "annihilator_bound": v.annihilator_bound,
        "k_max_used": v.k_max_used,
    })
}

fn seq_arg(opts: &Opts, op: Op) -> Result<Vec<SeqElement>> {
    parse_sequence(&need(&opts.seq, "seq", op)?)
}

pub fn compute(op: Op, opts: &Opts) -> Result<Outcome> {
    let m = load_module(&need(&opts.module, "module", op)?)?;
    let mut doc = json!({ "op": op_name(op), "input": module_json(&m) });
    let (result, summary) = match op {
        Op::Tor | Op::Ext => {
            let seq = seq_arg(opts, op)?;
            let q = need(&opts.q, "q", op)?;
            doc["sequence"] = json!(opts.seq);
            doc["q"] = json!(q);
            let h = if op == Op::Tor {
                koszul_chain(&seq, &m)?.homology(q)
            } else {
                koszul_cochain(&seq, &m)?.homology(q)
            };
            let s = format!("{} q={q}: factors {:?}", op_name(op), h.sorted_factors());
            (module_json(&h), s)
        }
        Op::LocalCohomology => {
            let seq = seq_arg(opts, op)?;
            let q = need(&opts.q, "q", op)?;
            doc["sequence"] = json!(opts.seq);
            doc["q"] = json!(q);
            let v = local_cohomology(&m, &seq, q, opts.k_max, opts.w)?;
            let s = format!(
                "local-cohomology q={q}: factors {:?} (stable from k={})",
                v.module.sorted_factors(),
                v.certificate.stable_index
            );
            (stable_json(&v), s)
        }
        Op::DFunctor => {
            let q = need(&opts.q, "q", op)?;
            doc["q"] = json!(q);
            let v = d_functor(&m, q, opts.k_max, opts.w)?;
            let s = format!(
                "d-functor q={q}: factors {:?} (stable from k={})",
                v.module.sorted_factors(),
                v.certificate.stable_index
            );
            (stable_json(&v), s)
        }
        Op::GroupCohomology => {
            let q = need(&opts.q, "q", op)?;
            doc["q"] = json!(q);
            doc["k"] = json!(opts.k);
            let h = group_cohomology(&m, opts.k, q)?;
            let s = format!("group-cohomology k={} q={q}: factors {:?}", opts.k, h.sorted_factors());
            (module_json(&h), s)
        }
        Op::Dual => {
            let h = pontryagin_dual(&m);
            (module_json(&h), format!("dual: factors {:?}", h.sorted_factors()))
        }
        Op::Fingerprint => {
            let fp = iso_fingerprint(&m, opts.l);
            let s = format!("fingerprint l={}: {}", opts.l, fp.summary());
            (json!({ "digest": fp.digest(), "fingerprint": fp }), s)
        }
        Op::Regularity => {
            let seq = seq_arg(opts, op)?;
            doc["sequence"] = json!(opts.seq);
            let cert = regularity_certificate(&m.ambient(), &seq);
            let s = format!("regularity: certified={} {}", cert.certified, cert.reason);
            (json!({ "certified": cert.certified, "reason": cert.reason }), s)
        }
    };
    doc["result"] = result;
    Ok(Outcome {
        json: serde_json::to_string_pretty(&doc)?,
        summary,
        passed: true,
    })
}

fn report_outcome(reports: Vec<VerificationReport>) -> Outcome {
    Outcome {
        json: reports_to_json(&reports),
        summary: reports.iter().map(|r| r.summary()).collect::<Vec<_>>().join("\n"),
        passed: reports.iter().all(|r| r.passed()),
    }
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let params = cli.opts.params();
    params.check()?;
    match &cli.command {
        Command::Verify { id, negative } => {
            let r = if *negative {
                theorems::negative_control(id, &params)?
            } else {
                theorems::verify(id, &params)?
            };
            Ok(Outcome {
                json: r.to_json(),
                summary: r.summary(),
                passed: r.passed(),
            })
        }
        Command::Suite { negative } => {
            let reports = if *negative {
                theorems::run_negative_controls(&params, cli.opts.jobs)?
            } else {
                theorems::run_suite(&params, cli.opts.jobs)?
            };
            Ok(report_outcome(reports))
        }
        Command::Compute { op } => compute(*op, &cli.opts),
    }
}

/// Exit status: 0 all passed, 1 some verdict FAIL, 2 error.
pub fn run(cli: &Cli) -> i32 {
    match execute(cli) {
        Ok(out) => {
            let written = match &cli.opts.out {
                Some(path) => std::fs::write(path, format!("{}\n", out.json)).map(|_| println!("{}", out.summary)),
                None => {
                    println!("{}", out.json);
                    eprintln!("{}", out.summary);
                    Ok(())
                }
            };
            match written {
                Err(e) => {
                    eprintln!("error: {e}");
                    2
                }
                Ok(()) if out.passed => 0,
                Ok(()) => 1,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
