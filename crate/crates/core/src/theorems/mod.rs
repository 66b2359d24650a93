//! One verifier per duality statement. Each builds instances, computes both
//! sides by separate routes and records per-degree comparisons.
//!
//! Every verifier also has a negative control: the same procedure run on a
//! fixture with a deliberate defect (a flipped sign, a wrong shift, a wrong
//! transition), which must come out FAIL.

mod duality;
mod instances;
mod local;
mod misc;
mod report;
mod rings;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use report::{Comparison, Mode, ReportBuilder, Verdict, VerificationReport, Witness};

pub const THEOREM_IDS: [&str; 15] = [
    "koszul-selfduality",
    "ext-tor-duality",
    "rgamma-composition",
    "torus-duality",
    "local-duality-iwasawa",
    "explicit-adjoints-finite",
    "jannsen-route",
    "matlis-commutation",
    "pont-involution",
    "pont-hom-rvee",
    "injective-hull",
    "tor-ext-criterion",
    "tor-vanishing-graded",
    "max-finite-submodule",
    "z-counterexample",
];

/// Shared knobs. `d` is the Koszul length for the self-duality check, the
/// maximal sequence length elsewhere and the number of variables for the
/// graded check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    pub p: u64,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub k_max: usize,
    /// Degree bound for graded computations.
    pub n: usize,
    /// Stabilization window.
    pub w: usize,
    /// Fingerprint word length.
    pub l: usize,
}

impl Default for Params {
    fn default() -> Self {
        Self {
            p: 2,
            d: 3,
            trials: 50,
            seed: 0,
            k_max: 12,
            n: 12,
            w: 2,
            l: 2,
        }
    }
}

impl Params {
    pub fn check(&self) -> Result<()> {
        if !crate::exactlin::is_prime(self.p) {
            return Err(Error::NotPrimePower(self.p));
        }
        if self.l == 0 {
            return Err(Error::Precondition("fingerprint length must be positive".into()));
        }
        Ok(())
    }
}

/// State handed to a verifier.
pub(crate) struct Ctx {
    pub params: Params,
    pub rng: rand_chacha::ChaCha8Rng,
    /// Run the negative-control fixture instead of the real instances.
    pub corrupt: bool,
}

impl Ctx {
    fn new(id: &str, params: &Params, corrupt: bool) -> Self {
        Self {
            params: params.clone(),
            rng: instances::rng_for(id, params.seed),
            corrupt,
        }
    }

    pub fn builder(&self, id: &str) -> ReportBuilder {
        let mut b = ReportBuilder::new(
            id,
            self.params.seed,
            serde_json::to_value(&self.params).expect("params serialize"),
        );
        if self.corrupt {
            b.note("negative control: corrupted fixture, expected to FAIL");
        }
        b
    }
}

fn unknown(id: &str) -> Error {
    Error::UnknownTheorem {
        id: id.to_string(),
        valid: THEOREM_IDS.iter().map(|s| s.to_string()).collect(),
    }
}

fn dispatch(id: &str, params: &Params, corrupt: bool) -> Result<VerificationReport> {
    params.check()?;
    if !THEOREM_IDS.contains(&id) {
        return Err(unknown(id));
    }
    let mut ctx = Ctx::new(id, params, corrupt);
    match id {
        "koszul-selfduality" => duality::koszul_selfduality(&mut ctx),
        "ext-tor-duality" => duality::ext_tor_duality(&mut ctx),
        "matlis-commutation" => duality::matlis_commutation(&mut ctx),
        "rgamma-composition" => local::rgamma_composition(&mut ctx),
        "torus-duality" => local::torus_duality(&mut ctx),
        "local-duality-iwasawa" => local::local_duality_iwasawa(&mut ctx),
        "explicit-adjoints-finite" => local::explicit_adjoints_finite(&mut ctx),
        "jannsen-route" => local::jannsen_route(&mut ctx),
        "pont-involution" => rings::pont_involution(&mut ctx),
        "pont-hom-rvee" => rings::pont_hom_rvee(&mut ctx),
        "injective-hull" => rings::injective_hull(&mut ctx),
        "tor-ext-criterion" => rings::tor_ext_criterion(&mut ctx),
        "tor-vanishing-graded" => misc::tor_vanishing_graded(&mut ctx),
        "max-finite-submodule" => misc::max_finite_submodule(&mut ctx),
        "z-counterexample" => misc::z_counterexample(&mut ctx),
        _ => Err(unknown(id)),
    }
}

/// Runs one verifier.
pub fn verify(id: &str, params: &Params) -> Result<VerificationReport> {
    dispatch(id, params, false)
}

/// Runs the corrupted fixture of one verifier; a sound verifier reports FAIL.
pub fn negative_control(id: &str, params: &Params) -> Result<VerificationReport> {
    dispatch(id, params, true)
}

fn run_all(params: &Params, jobs: usize, corrupt: bool) -> Result<Vec<VerificationReport>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
    let mut reports = pool.install(|| {
        THEOREM_IDS
            .par_iter()
            .map(|id| dispatch(id, params, corrupt))
            .collect::<Result<Vec<_>>>()
    })?;
    reports.sort_by(|a, b| (&a.theorem_id, a.seed).cmp(&(&b.theorem_id, b.seed)));
    Ok(reports)
}

/// All verifiers with bounded parallelism (`jobs = 0` means one per core),
/// merged by theorem id then seed.
pub fn run_suite(params: &Params, jobs: usize) -> Result<Vec<VerificationReport>> {
    run_all(params, jobs, false)
}

/// All negative controls, merged like `run_suite`.
pub fn run_negative_controls(params: &Params, jobs: usize) -> Result<Vec<VerificationReport>> {
    run_all(params, jobs, true)
}

/// Canonical JSON for a list of reports.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
