use rand::Rng;
use serde_json::json;

use super::instances::{cyclic, module_instance, random_ambient, random_element, random_module, random_regular};
use super::{Ctx, Mode, VerificationReport};
use crate::error::{Error, Result};
use crate::finmod::{pontryagin_dual, Ambient, FinMod, SeqElement};
use crate::koszul::{koszul_chain, koszul_cochain, realize_selfduality, selfduality_map};

pub(super) fn koszul_selfduality(ctx: &mut Ctx) -> Result<VerificationReport> {
    let params = ctx.params.clone();
    let mut cases: Vec<(FinMod, Vec<SeqElement>)> = Vec::new();
    let mut table;
    if ctx.corrupt {
        let amb = Ambient::new(3, 2, 0, 0)?;
        cases.push((cyclic(amb, 2, 1), vec![SeqElement::P(1), SeqElement::P(1)]));
        table = selfduality_map(2);
        for e in table.entries.iter_mut().filter(|e| e.subset == [1]) {
            e.sign = -e.sign;
        }
    } else {
        if !(1..=4).contains(&params.d) {
            return Err(Error::Precondition(format!(
                "self-duality needs 1 ≤ d ≤ 4, got {}",
                params.d
            )));
        }
        table = selfduality_map(params.d);
        for _ in 0..params.trials {
            let amb = random_ambient(&mut ctx.rng, params.p, 2, 2);
            let m = random_module(&mut ctx.rng, amb);
            let seq = (0..params.d).map(|_| random_element(&mut ctx.rng, amb)).collect();
            cases.push((m, seq));
        }
    }
    let mut b = ctx.builder("koszul-selfduality");
    b.param("sign_table", serde_json::to_value(&table)?);
    for (m, seq) in &cases {
        let inst = b.instance(module_instance(m, seq), m.log_size() as u64 + seq.len() as u64);
        let d = seq.len();
        let chain = koszul_chain(seq, m)?;
        let cochain = koszul_cochain(seq, m)?;
        match realize_selfduality(&chain, &cochain, &table) {
            Ok(map) => {
                for q in 0..=d {
                    let comp = map.component(-(q as i64)).expect("every degree has a component");
                    let iso = comp.is_iso();
                    b.compare(
                        inst,
                        q as i64,
                        Mode::Map,
                        format!("K_{q} -> K^{}: squares commute", d - q),
                        if iso { "bijective" } else { "not bijective" }.into(),
                        iso,
                    );
                }
            }
            Err(Error::ChainMapViolation { degree, detail }) => {
                b.compare(inst, degree, Mode::Map, detail, "commuting square".into(), false);
            }
            Err(e) => b.error(inst, -1, &e),
        }
    }
    Ok(b.finish())
}

/// Small fixtures first, then random certified instances.
fn ext_tor_cases(ctx: &mut Ctx) -> Result<Vec<(FinMod, Vec<SeqElement>)>> {
    let p = ctx.params.p;
    let amb = Ambient::new(p, 2, 0, 1)?;
    let mut cases = vec![(cyclic(amb, 2, 1), vec![SeqElement::P(1)])];
    if ctx.corrupt {
        return Ok(cases);
    }
    cases.push((FinMod::zero(amb), vec![SeqElement::P(1)]));
    cases.push((cyclic(amb, 2, 1 + p), vec![SeqElement::P(1), SeqElement::G(1, 0)]));
    for _ in 0..ctx.params.trials {
        let amb = random_ambient(&mut ctx.rng, p, 2, 2);
        let max = ctx.params.d.clamp(1, 1 + amb.t + amb.s);
        let len = ctx.rng.gen_range(1..=max);
        let seq = random_regular(&mut ctx.rng, amb, len);
        cases.push((random_module(&mut ctx.rng, amb), seq));
    }
    Ok(cases)
}

pub(super) fn ext_tor_duality(ctx: &mut Ctx) -> Result<VerificationReport> {
    let cases = ext_tor_cases(ctx)?;
    let shift = if ctx.corrupt { 1 } else { 0 };
    let l = ctx.params.l;
    let mut b = ctx.builder("ext-tor-duality");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    for (m, seq) in &cases {
        let inst = b.instance(module_instance(m, seq), m.log_size() as u64 + seq.len() as u64);
        let d = seq.len() as i64;
        let chain = koszul_chain(seq, m)?;
        let cochain = koszul_cochain(seq, m)?;
        for q in 0..=d {
            b.fingerprints(inst, q, &cochain.homology(d - q + shift), &chain.homology(q), l);
        }
    }
    Ok(b.finish())
}

pub(super) fn matlis_commutation(ctx: &mut Ctx) -> Result<VerificationReport> {
    let cases = ext_tor_cases(ctx)?;
    let shift = if ctx.corrupt { 1 } else { 0 };
    let l = ctx.params.l;
    let mut b = ctx.builder("matlis-commutation");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    for (m, seq) in &cases {
        let inst = b.instance(module_instance(m, seq), m.log_size() as u64 + seq.len() as u64);
        let d = seq.len() as i64;
        let dual = pontryagin_dual(m);
        let lhs = koszul_cochain(seq, &dual)?;
        let rhs = koszul_cochain(seq, m)?;
        for q in 0..=d {
            let right = pontryagin_dual(&rhs.homology(d - q + shift));
            b.fingerprints(inst, q, &lhs.homology(q), &right, l);
        }
    }
    b.param("routes", json!(["Ext^q(R/(x), Pi(M))", "Pi(Ext^{d-q}(R/(x), M))"]));
    Ok(b.finish())
}
