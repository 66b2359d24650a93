use serde_json::json;

use super::instances::{cyclic, module_value, random_ambient, random_module};
use super::{Ctx, Mode, VerificationReport};
use crate::error::{Error, Result};
use crate::exactlin::MatrixZN;
use crate::finmod::{
    evaluation_map, hom_module, log_p, pontryagin_dual, structure_quotient, Ambient, FinMod, ModMap, SeqElement,
};
use crate::tinyring::{
    baer_check, catalog_up_to, essentiality_check, ext, matlis_module, tor, truncated, z_mod, RingSpec, TinyRing,
};

fn random_modules(ctx: &mut Ctx) -> Vec<FinMod> {
    let p = ctx.params.p;
    let mut out = vec![cyclic(Ambient::new(p, 2, 0, 0).expect("prime"), 2, 1)];
    out.push(FinMod::zero(Ambient::new(p, 1, 1, 1).expect("prime")));
    out.push(cyclic(Ambient::new(p, 2, 0, 1).expect("prime"), 2, 1 + p));
    for _ in 0..ctx.params.trials {
        let amb = random_ambient(&mut ctx.rng, p, 2, 2);
        out.push(random_module(&mut ctx.rng, amb));
    }
    out
}

pub(super) fn pont_involution(ctx: &mut Ctx) -> Result<VerificationReport> {
    let cases = if ctx.corrupt {
        vec![cyclic(Ambient::new(ctx.params.p, 2, 0, 0)?, 2, 1)]
    } else {
        random_modules(ctx)
    };
    let scale = if ctx.corrupt { ctx.params.p } else { 1 };
    let mut b = ctx.builder("pont-involution");
    for m in &cases {
        let inst = b.instance(module_value(m), m.log_size() as u64);
        let ev = evaluation_map(m).scale(scale);
        let ok = ev.is_well_defined();
        let eq = ok && ev.is_equivariant();
        let iso = ok && ev.is_iso();
        b.compare(
            inst,
            0,
            Mode::Map,
            "M -> Pi(Pi(M)) equivariant".into(),
            eq.to_string(),
            eq,
        );
        b.compare(
            inst,
            0,
            Mode::Map,
            "M -> Pi(Pi(M)) bijective".into(),
            iso.to_string(),
            iso,
        );
    }
    Ok(b.finish())
}

/// Smallest `n ≥ 1` with `a^n = 0`.
fn nilpotency(m: &FinMod, a: &MatrixZN) -> Option<u32> {
    let mut x = a.clone();
    for n in 1..=64 {
        if x.is_zero() {
            return Some(n);
        }
        x = m.compose(&x, a);
    }
    None
}

/// `R° = Z_p[[X]]/(p^c, X_i^{n_i})` with trivial group action, acting on `m`.
fn coefficient_quotient(m: &FinMod, undersized: bool) -> Result<FinMod> {
    let amb = m.ambient();
    let exp = m.factors().iter().map(|&o| log_p(o, amb.p)).max().unwrap_or(0).max(1);
    let c = if undersized { exp - 1 } else { exp };
    let mut seq = vec![SeqElement::P(c)];
    for i in 0..amb.t {
        let n = nilpotency(m, m.x(i)).ok_or_else(|| Error::Precondition(format!("X{} is not nilpotent", i + 1)))?;
        seq.push(SeqElement::V(i + 1, n));
    }
    seq.extend((1..=amb.s).map(|j| SeqElement::G(j, 0)));
    if c == 0 {
        return Ok(FinMod::zero(amb));
    }
    Ok(structure_quotient(amb, &seq)?.module)
}

/// `Hom_R(M, Π(R°)) → Π(M)`, `φ ↦ (x ↦ φ(x)(1))`.
fn evaluation_at_one(m: &FinMod, ring: &FinMod) -> Result<(FinMod, ModMap)> {
    let target = pontryagin_dual(ring);
    let hom = hom_module(m, &target)?;
    let dual = pontryagin_dual(m);
    let md = m.modulus();
    let mut mat = MatrixZN::zeros(md, dual.rank(), hom.module.rank());
    let order_one = ring.factors().first().copied().unwrap_or(1);
    for b in 0..hom.module.rank() {
        let phi = hom.map_of(&hom.module.basis_vector(b));
        for (j, &o) in m.factors().iter().enumerate() {
            let y0 = phi.apply(&m.basis_vector(j)).first().copied().unwrap_or(0) % order_one;
            let c = (y0 as u128 * o as u128 / order_one as u128) as u64 % o;
            mat.set(j, b, c);
        }
    }
    let map = ModMap::new(hom.module.clone(), dual, mat)?;
    Ok((hom.module, map))
}

pub(super) fn pont_hom_rvee(ctx: &mut Ctx) -> Result<VerificationReport> {
    let cases = if ctx.corrupt {
        vec![cyclic(Ambient::new(ctx.params.p, 2, 0, 0)?, 2, 1)]
    } else {
        random_modules(ctx)
    };
    let undersized = ctx.corrupt;
    let l = ctx.params.l;
    let mut b = ctx.builder("pont-hom-rvee");
    for m in &cases {
        let inst = b.instance(module_value(m), m.log_size() as u64);
        let run = || -> Result<(FinMod, ModMap)> { evaluation_at_one(m, &coefficient_quotient(m, undersized)?) };
        match run() {
            Ok((hom, map)) => {
                let iso = map.is_iso();
                let eq = map.is_equivariant();
                b.compare(
                    inst,
                    0,
                    Mode::Map,
                    "Hom_R(M, Pi(R)) -> Pi(M) bijective".into(),
                    iso.to_string(),
                    iso,
                );
                b.compare(
                    inst,
                    0,
                    Mode::Map,
                    "Hom_R(M, Pi(R)) -> Pi(M) equivariant".into(),
                    eq.to_string(),
                    eq,
                );
                b.fingerprints(inst, 0, &hom, &pontryagin_dual(m), l);
            }
            Err(e) => b.error(inst, 0, &e),
        }
    }
    Ok(b.finish())
}

/// `F_2[x,y]/(x,y)^2`, local but not Gorenstein.
fn square_zero_plane() -> TinyRing {
    TinyRing::new(&RingSpec {
        p: 2,
        n: 2,
        entries: vec![(vec![0, 0], 1), (vec![1, 0], 1), (vec![0, 1], 1)],
    })
    .expect("valid ring")
}

pub(super) fn injective_hull(ctx: &mut Ctx) -> Result<VerificationReport> {
    let rings: Vec<(TinyRing, FinMod)> = if ctx.corrupt {
        let r = square_zero_plane();
        let q = r.module.clone();
        vec![(r, q)]
    } else {
        catalog_up_to(64)
            .into_iter()
            .map(|r| {
                let q = matlis_module(&r);
                (r, q)
            })
            .collect()
    };
    let mut b = ctx.builder("injective-hull");
    b.note("Baer's criterion over every ideal and essentiality over every nonzero element, exhaustively");
    for (ring, q) in &rings {
        let inst = b.instance(
            json!({ "ring": ring.spec(), "name": ring.name() }),
            ring.log_size() as u64,
        );
        match baer_check(ring, q) {
            Ok(records) => {
                let failing = records.iter().filter(|r| !r.extends).count();
                b.compare(
                    inst,
                    0,
                    Mode::Map,
                    format!("{} ideals, {failing} with non-extending maps", records.len()),
                    "every map extends".into(),
                    failing == 0,
                );
            }
            Err(e) => b.error(inst, 0, &e),
        }
        let ess = essentiality_check(ring, q);
        b.exact(inst, 0, &ess.socle_log_size, &1);
        b.compare(
            inst,
            0,
            Mode::Exact,
            format!("{} of {} cyclic submodules miss the socle", ess.misses, ess.checked),
            "0 miss".into(),
            ess.misses == 0,
        );
    }
    Ok(b.finish())
}

fn tor_ext_rings(p: u64) -> Vec<TinyRing> {
    let mut rings = vec![z_mod(p, 2), truncated(p, 2), truncated(p, 3)];
    rings.push(
        TinyRing::new(&RingSpec {
            p,
            n: 1,
            entries: vec![(vec![0], 2), (vec![1], 1)],
        })
        .expect("valid ring"),
    );
    rings.push(square_zero_plane());
    rings
}

pub(super) fn tor_ext_criterion(ctx: &mut Ctx) -> Result<VerificationReport> {
    let l = ctx.params.l;
    // (ring, N, M, injective module used in place of Π(R))
    let mut cases: Vec<(TinyRing, FinMod, FinMod, FinMod)> = Vec::new();
    if ctx.corrupt {
        let r = square_zero_plane();
        let residue = r
            .ideals()
            .iter()
            .map(|i| r.quotient(i))
            .find(|m| m.log_size() == 1)
            .ok_or_else(|| Error::Precondition("residue field not found".into()))?;
        cases.push((r.clone(), r.module.clone(), residue, r.module.clone()));
    } else {
        for ring in tor_ext_rings(ctx.params.p) {
            let quotients: Vec<FinMod> = ring
                .ideals()
                .iter()
                .map(|i| ring.quotient(i))
                .filter(|m| !m.is_zero())
                .collect();
            let q = matlis_module(&ring);
            for n in &quotients {
                for m in &quotients {
                    cases.push((ring.clone(), n.clone(), m.clone(), q.clone()));
                }
            }
        }
    }
    let mut b = ctx.builder("tor-ext-criterion");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    for (ring, n, m, q) in &cases {
        let value = json!({ "ring": ring.spec(), "N": module_value(n), "M": module_value(m) });
        let inst = b.instance(
            value,
            ring.log_size() as u64 + n.log_size() as u64 + m.log_size() as u64,
        );
        let run = || -> Result<(FinMod, FinMod)> {
            let lhs = pontryagin_dual(&tor(ring, n, m, 1)?);
            let h = hom_module(n, q)?.module;
            Ok((lhs, ext(ring, m, &h, 1)?))
        };
        match run() {
            Ok((lhs, rhs)) => {
                b.fingerprints(inst, 1, &lhs, &rhs, l);
            }
            Err(e) => b.error(inst, 1, &e),
        }
    }
    Ok(b.finish())
}
