use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::THEOREM_IDS;
use crate::exactlin::MatrixZN;
use crate::finmod::{random_finmod, structure_quotient, Ambient, FinMod, ModuleDoc, RandomModuleParams, SeqElement};
use crate::koszul::regularity_certificate;

/// Each verifier draws from its own ChaCha stream of the shared seed.
pub(crate) fn rng_for(id: &str, seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let stream = THEOREM_IDS.iter().position(|x| *x == id).unwrap_or(THEOREM_IDS.len());
    rng.set_stream(stream as u64 + 1);
    rng
}

pub(crate) fn random_ambient(rng: &mut ChaCha8Rng, p: u64, t_max: usize, s_max: usize) -> Ambient {
    let a = rng.gen_range(1..=3);
    let t = rng.gen_range(0..=t_max);
    let s = rng.gen_range(0..=s_max);
    Ambient::new(p, a, t, s).expect("p was checked to be prime")
}

pub(crate) fn random_module(rng: &mut ChaCha8Rng, amb: Ambient) -> FinMod {
    random_finmod(rng, amb, &RandomModuleParams::default())
}

/// Any catalog element of the ambient ring, repeats allowed.
pub(crate) fn random_element(rng: &mut ChaCha8Rng, amb: Ambient) -> SeqElement {
    let kinds = 1 + amb.t + amb.s;
    match rng.gen_range(0..kinds) {
        0 => SeqElement::P(rng.gen_range(1..=2)),
        v if v <= amb.t => SeqElement::V(v, rng.gen_range(1..=2)),
        g => SeqElement::G(g - amb.t, rng.gen_range(0..=1)),
    }
}

/// Catalog elements on distinct variables in random order, so the
/// sequence is certified regular.
pub(crate) fn random_regular(rng: &mut ChaCha8Rng, amb: Ambient, len: usize) -> Vec<SeqElement> {
    let mut vars: Vec<usize> = (0..1 + amb.t + amb.s).collect();
    let mut out = Vec::new();
    while out.len() < len && !vars.is_empty() {
        let v = vars.swap_remove(rng.gen_range(0..vars.len()));
        out.push(match v {
            0 => SeqElement::P(rng.gen_range(1..=2)),
            v if v <= amb.t => SeqElement::V(v, rng.gen_range(1..=2)),
            g => SeqElement::G(g - amb.t, rng.gen_range(0..=1)),
        });
    }
    debug_assert!(regularity_certificate(&amb, &out).certified);
    out
}

pub(crate) fn module_value(m: &FinMod) -> Value {
    serde_json::to_value(ModuleDoc::from_module(m)).expect("module serializes")
}

pub(crate) fn seq_string(seq: &[SeqElement]) -> String {
    seq.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
}

pub(crate) fn module_instance(m: &FinMod, seq: &[SeqElement]) -> Value {
    json!({ "module": module_value(m), "sequence": seq_string(seq) })
}

/// `Z/p^e` over `amb` with every `X_i = 0` and every `γ_j = gamma`.
pub(crate) fn cyclic(amb: Ambient, e: u32, gamma: u64) -> FinMod {
    let md = amb.modulus();
    let ops = (0..amb.n_ops())
        .map(|i| MatrixZN::scalar(md, 1, if amb.is_group_op(i) { gamma } else { 0 }))
        .collect();
    FinMod::from_parts(amb, vec![amb.p.pow(e)], ops).expect("scalar operators are well defined")
}

/// A complete-intersection quotient `Λ/(f)` with the full sequence `f`.
pub(crate) struct CiInstance {
    pub ambient: Ambient,
    pub f: Vec<SeqElement>,
    pub module: FinMod,
}

impl CiInstance {
    pub fn new(ambient: Ambient, f: Vec<SeqElement>) -> crate::Result<Self> {
        let module = structure_quotient(ambient, &f)?.module;
        Ok(Self { ambient, f, module })
    }

    pub fn value(&self) -> Value {
        json!({ "ambient": self.ambient, "f": seq_string(&self.f), "log_size": self.module.log_size() })
    }

    /// `r = t + 1 + s`.
    pub fn r(&self) -> usize {
        self.f.len()
    }
}

/// Random full-length catalog sequence with `log_p |Λ/(f)| ≤ max_log`.
pub(crate) fn random_ci(rng: &mut ChaCha8Rng, p: u64, t: usize, s: usize, max_log: u32) -> CiInstance {
    loop {
        let a = rng.gen_range(1..=2);
        let amb = Ambient::new(p, a, t, s).expect("prime");
        let c = rng.gen_range(1..=a);
        let mut f = vec![SeqElement::P(c)];
        let mut log = c as u64;
        let mut count = 1u64;
        for i in 1..=t {
            let e = rng.gen_range(1..=2);
            count *= e as u64;
            f.push(SeqElement::V(i, e));
        }
        for j in 1..=s {
            let b = rng.gen_range(0..=1);
            count *= p.pow(b);
            f.push(SeqElement::G(j, b));
        }
        log *= count;
        if log > max_log as u64 {
            continue;
        }
        // shuffle so that P is not always first
        let k = rng.gen_range(0..f.len());
        f.swap(0, k);
        return CiInstance::new(amb, f).expect("catalog quotient of bounded size");
    }
}
