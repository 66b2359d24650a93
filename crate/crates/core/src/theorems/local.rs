use rand::Rng;
use serde_json::json;

use super::instances::{
    cyclic, module_instance, module_value, random_ambient, random_ci, random_module, random_regular, seq_string,
    CiInstance,
};
use super::{Ctx, Mode, VerificationReport};
use crate::chainkit::{colimit, ChainMap, DirectedSystem, Orientation};
use crate::error::{Error, Result};
use crate::finmod::{hom_module, pontryagin_dual, Ambient, FinMod, ModMap, SeqElement};
use crate::koszul::{
    cofactor_map, functoriality_map, koszul_chain, koszul_chain_from, power_transition, regularity_certificate, stage,
    CofactorRule,
};
use crate::tate::{
    d_functor_with_rule, extend, local_cohomology, local_cohomology_system_with_rule, norm, staged_colimit,
    torus_annihilator_bound, torus_sequence,
};

fn sum(parts: &[FinMod], amb: Ambient) -> Result<FinMod> {
    let nonzero: Vec<&FinMod> = parts.iter().filter(|m| !m.is_zero()).collect();
    if nonzero.is_empty() {
        Ok(FinMod::zero(amb))
    } else {
        FinMod::direct_sum(&nonzero)
    }
}

/// `⊕_{a+b=n} R^aΓ_outer(R^bΓ_inner M)` for all `n`.
fn composed(m: &FinMod, inner: &[SeqElement], outer: &[SeqElement], k_max: usize, w: usize) -> Result<Vec<FinMod>> {
    let top = inner.len() + outer.len();
    let mut total = vec![Vec::new(); top + 1];
    for bdeg in 0..=inner.len() {
        let x = local_cohomology(m, inner, bdeg as i64, k_max, w)?.module;
        for adeg in 0..=outer.len() {
            total[adeg + bdeg].push(local_cohomology(&x, outer, adeg as i64, k_max, w)?.module);
        }
    }
    total.iter().map(|parts| sum(parts, m.ambient())).collect()
}

pub(super) fn rgamma_composition(ctx: &mut Ctx) -> Result<VerificationReport> {
    let params = ctx.params.clone();
    let (p, k_max, w, l) = (params.p, params.k_max, params.w, params.l);
    let fixture_amb = Ambient::new(p, 2, 1, 0)?;
    let mut cases: Vec<(FinMod, Vec<SeqElement>, Vec<SeqElement>)> = vec![(
        cyclic(fixture_amb, 2, 1),
        vec![SeqElement::P(1)],
        vec![SeqElement::V(1, 1)],
    )];
    if !ctx.corrupt {
        cases.push((
            FinMod::zero(fixture_amb),
            vec![SeqElement::P(1)],
            vec![SeqElement::V(1, 1)],
        ));
        cases.push((
            random_module(&mut ctx.rng, fixture_amb),
            vec![SeqElement::P(1)],
            vec![SeqElement::V(1, 1)],
        ));
        for _ in 0..params.trials {
            let amb = loop {
                let a = random_ambient(&mut ctx.rng, p, 2, 2);
                if a.t + a.s >= 1 {
                    break a;
                }
            };
            let max = params.d.clamp(2, 1 + amb.t + amb.s);
            let len = ctx.rng.gen_range(2..=max);
            let seq = random_regular(&mut ctx.rng, amb, len);
            let cut = ctx.rng.gen_range(1..len);
            let m = random_module(&mut ctx.rng, amb);
            cases.push((m, seq[..cut].to_vec(), seq[cut..].to_vec()));
        }
    }
    let rule = if ctx.corrupt {
        CofactorRule::Complement
    } else {
        CofactorRule::Subset
    };
    let mut b = ctx.builder("rgamma-composition");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    for (m, i, j) in &cases {
        let both: Vec<SeqElement> = i.iter().chain(j).copied().collect();
        let value = json!({ "module": module_value(m), "I": seq_string(i), "J": seq_string(j) });
        let inst = b.instance(value, m.log_size() as u64 + both.len() as u64);
        let run = || -> Result<(Vec<FinMod>, Vec<FinMod>, Vec<FinMod>)> {
            let sys = local_cohomology_system_with_rule(m, &both, k_max, w, rule)?;
            let direct = (0..=both.len())
                .map(|q| staged_colimit(&sys, q as i64, w).map(|v| v.module))
                .collect::<Result<Vec<_>>>()?;
            Ok((direct, composed(m, j, i, k_max, w)?, composed(m, i, j, k_max, w)?))
        };
        match run() {
            Ok((direct, ij, ji)) => {
                for n in 0..direct.len() {
                    b.fingerprints(inst, n as i64, &direct[n], &ij[n], l);
                    b.fingerprints(inst, n as i64, &direct[n], &ji[n], l);
                    if n == 0 {
                        b.fingerprints(inst, 0, &direct[0], m, l);
                    } else {
                        b.exact(inst, n as i64, &direct[n].sorted_factors(), &vec![]);
                    }
                }
            }
            Err(e) => b.error(inst, -1, &e),
        }
    }
    Ok(b.finish())
}

pub(super) fn torus_duality(ctx: &mut Ctx) -> Result<VerificationReport> {
    let params = ctx.params.clone();
    let (p, k_max, w, l) = (params.p, params.k_max, params.w, params.l);
    let mut cases: Vec<FinMod> = Vec::new();
    if ctx.corrupt {
        cases.push(cyclic(Ambient::new(2, 2, 0, 1)?, 2, 3));
    } else {
        cases.push(cyclic(Ambient::new(p, 1, 0, 1)?, 1, 1));
        cases.push(FinMod::zero(Ambient::new(p, 1, 0, 1)?));
        cases.push(cyclic(Ambient::new(p, 1, 0, 2)?, 1, 1));
        for _ in 0..params.trials {
            let s = ctx.rng.gen_range(1..=2);
            let a = ctx.rng.gen_range(1..=3);
            let amb = Ambient::new(p, a, 0, s)?;
            cases.push(random_module(&mut ctx.rng, amb));
        }
    }
    let rule = if ctx.corrupt {
        CofactorRule::Subset
    } else {
        CofactorRule::Complement
    };
    let mut b = ctx.builder("torus-duality");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    for m in &cases {
        let s = m.ambient().s;
        let seq = torus_sequence(s, 0);
        let inst = b.instance(module_instance(m, &seq), m.log_size() as u64 + s as u64);
        let dual = pontryagin_dual(m);
        for j in 0..=s as i64 {
            let lhs = d_functor_with_rule(&dual, j, k_max, w, rule);
            let rhs = local_cohomology(m, &seq, s as i64 - j, k_max, w);
            match (lhs, rhs) {
                (Ok(x), Ok(y)) => {
                    b.fingerprints(inst, j, &x.module, &y.module, l);
                }
                (Err(e), _) | (_, Err(e)) => b.error(inst, j, &e),
            }
        }
    }
    Ok(b.finish())
}

/// `E^r(M)` for `M = Λ/(f)`, as `H_0` of the Koszul complex of `f` on the
/// larger quotient `Λ/(f^{(2)})`; lower `E^q` vanish by regularity.
fn top_adjoint(ci: &CiInstance) -> Result<FinMod> {
    let cert = regularity_certificate(&ci.ambient, &ci.f);
    if !cert.certified || ci.r() != 1 + ci.ambient.t + ci.ambient.s {
        return Err(Error::NotCertified(cert.reason));
    }
    let f2 = stage(&ci.f, 2);
    let c2 = f2
        .iter()
        .find_map(|e| match e {
            SeqElement::P(c) => Some(*c),
            _ => None,
        })
        .expect("full sequences contain a power of p");
    let amb2 = ci.ambient.with_precision(c2.max(ci.ambient.a))?;
    let t = crate::finmod::structure_quotient(amb2, &f2)?.module;
    Ok(koszul_chain(&ci.f, &t)?.homology(0))
}

/// `E^j(M)` from the certified Koszul computation.
fn adjoint(ci: &CiInstance, top: &FinMod, j: i64) -> FinMod {
    if j == ci.r() as i64 {
        top.clone()
    } else {
        FinMod::zero(top.ambient())
    }
}

fn ci_cases(
    ctx: &mut Ctx,
    fixtures: Vec<(Ambient, Vec<SeqElement>)>,
    pairs: &[(usize, usize)],
) -> Result<Vec<CiInstance>> {
    let mut cases = fixtures
        .into_iter()
        .map(|(a, f)| CiInstance::new(a, f))
        .collect::<Result<Vec<_>>>()?;
    if ctx.corrupt {
        cases.truncate(1);
        return Ok(cases);
    }
    let per = ctx.params.trials.div_ceil(pairs.len()).max(4);
    for &(t, s) in pairs {
        for _ in 0..per {
            cases.push(random_ci(&mut ctx.rng, ctx.params.p, t, s, 6));
        }
    }
    Ok(cases)
}

const CI_PAIRS: [(usize, usize); 5] = [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2)];

fn maximal_ideal(amb: Ambient) -> Vec<SeqElement> {
    std::iter::once(SeqElement::P(1))
        .chain((1..=amb.t).map(|i| SeqElement::V(i, 1)))
        .chain((1..=amb.s).map(|j| SeqElement::G(j, 0)))
        .collect()
}

pub(super) fn local_duality_iwasawa(ctx: &mut Ctx) -> Result<VerificationReport> {
    let p = ctx.params.p;
    let fixtures = vec![
        (Ambient::new(p, 1, 0, 0)?, vec![SeqElement::P(1)]),
        (Ambient::new(2, 2, 0, 1)?, vec![SeqElement::P(2), SeqElement::G(1, 1)]),
    ];
    let cases = ci_cases(ctx, fixtures, &CI_PAIRS)?;
    let (k_max, w, l) = (ctx.params.k_max, ctx.params.w, ctx.params.l);
    let off = if ctx.corrupt { 1 } else { 0 };
    let mut b = ctx.builder("local-duality-iwasawa");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    b.note("E^j for j below r vanishes by the regularity certificate");
    for ci in &cases {
        let inst = b.instance(ci.value(), ci.module.log_size() as u64 + ci.r() as u64);
        let r = ci.r() as i64;
        let run = || -> Result<(Vec<FinMod>, FinMod)> {
            let seq = maximal_ideal(ci.ambient);
            let sys = local_cohomology_system_with_rule(&ci.module, &seq, k_max, w, CofactorRule::Subset)?;
            let lhs = (0..=r)
                .map(|q| staged_colimit(&sys, q, w).map(|v| v.module))
                .collect::<Result<Vec<_>>>()?;
            Ok((lhs, top_adjoint(ci)?))
        };
        match run() {
            Ok((lhs, top)) => {
                for q in 0..=r {
                    let rhs = pontryagin_dual(&adjoint(ci, &top, r - q - off));
                    b.fingerprints(inst, q, &lhs[q as usize], &rhs, l);
                }
            }
            Err(e) => b.error(inst, -1, &e),
        }
    }
    Ok(b.finish())
}

/// `Hom_Z(M, Z/p^{2e}) → Hom_Z(M, Z/p^e)` under reduction, with `p^e`
/// the exponent of `M`; returns the log size of the image.
fn e0_image(m: &FinMod) -> Result<u32> {
    let p = m.ambient().p;
    let e = m
        .factors()
        .iter()
        .map(|&o| crate::finmod::log_p(o, p))
        .max()
        .unwrap_or(0);
    if e == 0 {
        return Ok(0);
    }
    let plain = Ambient::new(p, 2 * e, 0, 0)?;
    let group = FinMod::from_parts(plain, m.factors().to_vec(), vec![])?;
    let big = cyclic(plain, 2 * e, 1);
    let small = cyclic(plain, e, 1);
    let reduce = ModMap::new(
        big.clone(),
        small.clone(),
        crate::exactlin::MatrixZN::scalar(plain.modulus(), 1, 1),
    )?;
    let hom_big = hom_module(&group, &big)?;
    let hom_small = hom_module(&group, &small)?;
    let mut mat = crate::exactlin::MatrixZN::zeros(plain.modulus(), hom_small.module.rank(), hom_big.module.rank());
    for j in 0..hom_big.module.rank() {
        let phi = hom_big.map_of(&hom_big.module.basis_vector(j)).then(&reduce)?;
        let c = hom_small
            .coords_of_map(&phi)
            .ok_or_else(|| Error::InvalidMap("reduced homomorphism is not a homomorphism".into()))?;
        for (i, &x) in c.iter().enumerate() {
            mat.set(i, j, x);
        }
    }
    Ok(ModMap::new(hom_big.module.clone(), hom_small.module.clone(), mat)?.image_log_size())
}

pub(super) fn explicit_adjoints_finite(ctx: &mut Ctx) -> Result<VerificationReport> {
    let p = ctx.params.p;
    let fixtures = vec![
        (Ambient::new(p, 1, 0, 1)?, vec![SeqElement::P(1), SeqElement::G(1, 0)]),
        (
            Ambient::new(p, 1, 1, 1)?,
            vec![SeqElement::P(1), SeqElement::V(1, 1), SeqElement::G(1, 0)],
        ),
    ];
    let cases = ci_cases(ctx, fixtures, &CI_PAIRS)?;
    let l = ctx.params.l;
    let corrupt = ctx.corrupt;
    let mut b = ctx.builder("explicit-adjoints-finite");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    b.note("only finite modules are instantiated; free and torsion cases have no finite realization");
    for ci in &cases {
        let inst = b.instance(ci.value(), ci.module.log_size() as u64 + ci.r() as u64);
        let r = ci.r() as i64;
        let top = match top_adjoint(ci) {
            Ok(t) => t,
            Err(e) => {
                b.error(inst, r, &e);
                continue;
            }
        };
        let expected_at = if corrupt { r - 1 } else { r };
        for q in 0..=r {
            let e = adjoint(ci, &top, q);
            if q == expected_at {
                b.fingerprints(inst, q, &e, &ci.module, l);
            } else {
                b.exact(inst, q, &e.sorted_factors(), &vec![]);
            }
        }
        match e0_image(&ci.module) {
            Ok(img) => {
                b.compare(
                    inst,
                    0,
                    Mode::Exact,
                    format!("image log size {img}"),
                    "image log size 0".into(),
                    img == 0,
                );
            }
            Err(e) => b.error(inst, 0, &e),
        }
    }
    Ok(b.finish())
}

/// `colim_k H_s(K_•(γ^{-p^k} − 1) ⊗ ΠΠ Tor_q(Z/p^k, M))` along the diagonal.
fn jannsen_colimit(m: &FinMod, q: i64, k_max: usize, w: usize, zero_transitions: bool) -> Result<FinMod> {
    let amb = m.ambient();
    let (p, s) = (amb.p, amb.s);
    let e = m
        .factors()
        .iter()
        .map(|&o| crate::finmod::log_p(o, p) as usize)
        .max()
        .unwrap_or(0);
    let bound = torus_annihilator_bound(m).map(|b| b.max(e));
    let top = extend(k_max, bound, m, w);
    // Tor_q(Z/p^k, M) with the transitions induced by Z/p^k → Z/p^{k+1}, ×p
    let mut tor_data = Vec::new();
    for k in 1..=top {
        tor_data.push(koszul_chain(&[SeqElement::P(k as u32)], m)?.complex.homology_data(q));
    }
    let mut tors = Vec::new();
    let mut tor_maps = Vec::new();
    for k in 1..=top {
        let b = pontryagin_dual(&pontryagin_dual(&tor_data[k - 1].module));
        tors.push(b);
        if k < top {
            let t = power_transition(&[SeqElement::P(1)], k, m, Orientation::Chain, CofactorRule::Complement)?;
            let induced = t.induced(q, &tor_data[k - 1], &tor_data[k]);
            tor_maps.push(induced.pontryagin_dual().pontryagin_dual());
        }
    }
    let xs = |b: &FinMod, k: usize| -> Result<Vec<crate::exactlin::MatrixZN>> {
        (0..s)
            .map(|j| {
                let inv = b.inverse(b.gamma(j))?;
                Ok(b.sub(&b.power(&inv, p.pow(k as u32)), &b.identity()))
            })
            .collect()
    };
    let mut complexes = Vec::new();
    let mut maps: Vec<ChainMap> = Vec::new();
    for k in 1..=top {
        let b = &tors[k - 1];
        complexes.push(koszul_chain_from(b, xs(b, k)?)?);
        if k > 1 {
            let prev = &tors[k - 2];
            let mid = koszul_chain_from(prev, xs(prev, k)?)?;
            let cof = (0..s)
                .map(|j| Ok(norm(prev, &prev.inverse(prev.gamma(j))?, (k - 1) as u32)))
                .collect::<Result<Vec<_>>>()?;
            let n = complexes.len();
            let step = cofactor_map(&complexes[n - 2], &mid, &cof, CofactorRule::Complement)?;
            let g = if zero_transitions {
                ModMap::zero(prev.clone(), b.clone())
            } else {
                tor_maps[k - 2].clone()
            };
            maps.push(step.then(&functoriality_map(&mid, &complexes[n - 1], &g)?)?);
        }
    }
    let s = s as i64;
    let data: Vec<_> = complexes.iter().map(|c| c.complex.homology_data(s)).collect();
    let objects = data.iter().map(|h| h.module.clone()).collect();
    let transitions = maps
        .iter()
        .enumerate()
        .map(|(i, f)| f.induced(s, &data[i], &data[i + 1]))
        .collect();
    Ok(colimit(&DirectedSystem::new(1, objects, transitions)?, w)?.module)
}

pub(super) fn jannsen_route(ctx: &mut Ctx) -> Result<VerificationReport> {
    let p = ctx.params.p;
    let fixtures = vec![
        (Ambient::new(p, 1, 0, 1)?, vec![SeqElement::P(1), SeqElement::G(1, 0)]),
        (
            Ambient::new(p, 1, 0, 2)?,
            vec![SeqElement::P(1), SeqElement::G(1, 0), SeqElement::G(2, 0)],
        ),
    ];
    let cases = ci_cases(ctx, fixtures, &[(0, 1), (0, 2)])?;
    let (k_max, w, l) = (ctx.params.k_max, ctx.params.w, ctx.params.l);
    let corrupt = ctx.corrupt;
    let mut b = ctx.builder("jannsen-route");
    b.note(format!("fingerprint-level comparisons at word length {l}"));
    b.note("Tor transitions are induced by multiplication by p from Z/p^k to Z/p^{k+1}");
    for ci in &cases {
        let inst = b.instance(ci.value(), ci.module.log_size() as u64 + ci.r() as u64);
        let s = ci.ambient.s as i64;
        let top = match top_adjoint(ci) {
            Ok(t) => t,
            Err(e) => {
                b.error(inst, -1, &e);
                continue;
            }
        };
        for q in 0..=1 {
            match jannsen_colimit(&ci.module, q, k_max, w, corrupt) {
                Ok(lhs) => {
                    let rhs = pontryagin_dual(&adjoint(ci, &top, q + s));
                    b.fingerprints(inst, q, &lhs, &rhs, l);
                }
                Err(e) => b.error(inst, q, &e),
            }
        }
    }
    Ok(b.finish())
}
