//! Torus cohomology, Tate's D-functor and local cohomology on finite modules.

use serde::{Deserialize, Serialize};

use crate::chainkit::{colimit, ChainMap, DirectedSystem, StabilizationCertificate};
use crate::error::{Error, Result};
use crate::exactlin::{smith_form_integers, IntMatrix, MatrixZN};
use crate::finmod::{pontryagin_dual, Ambient, FinMod, ModMap, SeqElement};
use crate::koszul::{
    cofactor, cofactor_map, koszul_chain_from, koszul_cochain, stage, CofactorRule, KoszulRealization,
};

/// A colimit together with how it was certified.
#[derive(Clone, Debug)]
pub struct StableValue {
    pub degree: i64,
    pub module: FinMod,
    pub certificate: StabilizationCertificate,
    /// First stage at which every element of the staged sequence acts as zero.
    pub annihilator_bound: Option<usize>,
    /// Last stage actually computed, after extension past the bound.
    pub k_max_used: usize,
}

/// `(γ_1^{p^k} − 1, …, γ_s^{p^k} − 1)`.
pub fn torus_sequence(s: usize, k: u32) -> Vec<SeqElement> {
    (1..=s).map(|j| SeqElement::G(j, k)).collect()
}

pub(crate) fn norm(m: &FinMod, g: &MatrixZN, k: u32) -> MatrixZN {
    let p = m.ambient().p;
    let gk = m.power(g, p.pow(k));
    let mut acc = m.scalar(0);
    let mut term = m.identity();
    for _ in 0..p {
        acc = m.add(&acc, &term);
        term = m.compose(&term, &gk);
    }
    acc
}

fn norms(m: &FinMod, k: u32) -> Vec<MatrixZN> {
    (0..m.ambient().s).map(|j| norm(m, m.gamma(j), k)).collect()
}

/// `H^q(U_k, A)` with `U_k = G^{p^k}`.
pub fn group_cohomology(a: &FinMod, k: u32, q: i64) -> Result<FinMod> {
    if a.ambient().s == 0 {
        return Err(Error::Precondition("group cohomology needs s ≥ 1".into()));
    }
    Ok(koszul_cochain(&torus_sequence(a.ambient().s, k), a)?.homology(q))
}

/// Restriction `H^•(U_k, A) → H^•(U_{k+1}, A)` on Koszul models.
pub fn restriction(a: &FinMod, k: u32) -> Result<ChainMap> {
    let s = a.ambient().s;
    let src = koszul_cochain(&torus_sequence(s, k), a)?;
    let tgt = koszul_cochain(&torus_sequence(s, k + 1), a)?;
    cofactor_map(&src, &tgt, &norms(a, k), CofactorRule::Subset)
}

/// Corestriction `H^•(U_{k+1}, A) → H^•(U_k, A)` on Koszul models.
pub fn corestriction(a: &FinMod, k: u32) -> Result<ChainMap> {
    let s = a.ambient().s;
    let src = koszul_cochain(&torus_sequence(s, k + 1), a)?;
    let tgt = koszul_cochain(&torus_sequence(s, k), a)?;
    cofactor_map(&src, &tgt, &norms(a, k), CofactorRule::Complement)
}

/// Checks `cor ∘ res = p^s` on `H^q(U_k, A)` for every `q`.
pub fn check_cor_res(a: &FinMod, k: u32) -> Result<()> {
    let s = a.ambient().s;
    let both = restriction(a, k)?.then(&corestriction(a, k)?)?;
    let scale = a.modulus().pow(a.ambient().p, s as u64);
    for q in 0..=s as i64 {
        let h = both.source().homology_data(q);
        let induced = both.induced(q, &h, &h);
        let expected = ModMap::identity(&h.module).scale(scale);
        if induced.matrix() != expected.matrix() {
            return Err(Error::ChainMapViolation {
                degree: q,
                detail: format!("corestriction after restriction is not p^{s} at stage {k}"),
            });
        }
    }
    Ok(())
}

fn power_is_identity(m: &FinMod, g: &MatrixZN, k: u32) -> bool {
    m.power(g, m.ambient().p.pow(k)) == m.identity()
}

/// Smallest `k` with every `γ_j^{p^k} = 1` on `a`, if one exists.
pub fn torus_annihilator_bound(a: &FinMod) -> Option<usize> {
    (0..24u32)
        .find(|&k| (0..a.ambient().s).all(|j| power_is_identity(a, a.gamma(j), k)))
        .map(|k| k as usize)
}

pub(crate) fn extend(k_max: usize, bound: Option<usize>, m: &FinMod, w: usize) -> usize {
    match bound {
        Some(b) => k_max.max(b + m.log_size() as usize + 2 * w.max(1) + 1),
        None => k_max,
    }
}

/// Stable value of `H_q` (or `H^q`) along Koszul complexes and chain maps.
fn homology_colimit(
    complexes: &[KoszulRealization],
    maps: &[ChainMap],
    q: i64,
    k_min: usize,
    w: usize,
) -> Result<(FinMod, StabilizationCertificate)> {
    let data: Vec<_> = complexes.iter().map(|c| c.complex.homology_data(q)).collect();
    let objects = data.iter().map(|h| h.module.clone()).collect();
    let transitions = maps
        .iter()
        .enumerate()
        .map(|(i, f)| f.induced(q, &data[i], &data[i + 1]))
        .collect();
    let c = colimit(&DirectedSystem::new(k_min, objects, transitions)?, w)?;
    Ok((c.module, c.certificate))
}

/// `D_q(A) = colim_k Π(H^q(U_k, A))` along duals of corestriction.
///
/// Evaluated as `colim_k H_q(K_•(γ^{-p^k} − 1) ⊗ Π(A))`: dualizing the
/// cochain model turns `γ − 1` into `γ^{-1} − 1` on `Π(A)` and the dual of the
/// corestriction into the complement-rule map with norm cofactors.
pub fn d_functor(a: &FinMod, q: i64, k_max: usize, w: usize) -> Result<StableValue> {
    d_functor_with_rule(a, q, k_max, w, CofactorRule::Complement)
}

/// `d_functor` with an explicit transition rule; only `Complement` is correct.
pub fn d_functor_with_rule(a: &FinMod, q: i64, k_max: usize, w: usize, rule: CofactorRule) -> Result<StableValue> {
    let amb = a.ambient();
    let s = amb.s;
    if s == 0 {
        return Err(Error::Precondition("the D-functor needs s ≥ 1".into()));
    }
    let bound = torus_annihilator_bound(a);
    let k_max = extend(k_max, bound, a, w);
    let da = pontryagin_dual(a);
    let inv: Vec<MatrixZN> = (0..s).map(|j| da.inverse(da.gamma(j))).collect::<Result<_>>()?;
    let mut complexes = Vec::new();
    let mut maps = Vec::new();
    for k in 0..=k_max as u32 {
        if k <= bound.unwrap_or(2).min(2) as u32 {
            check_cor_res(a, k)?;
        }
        let xs: Vec<MatrixZN> = inv
            .iter()
            .map(|g| da.sub(&da.power(g, amb.p.pow(k)), &da.identity()))
            .collect();
        complexes.push(koszul_chain_from(&da, xs)?);
        if k > 0 {
            let cof: Vec<MatrixZN> = inv.iter().map(|g| norm(&da, g, k - 1)).collect();
            let n = complexes.len();
            maps.push(cofactor_map(&complexes[n - 2], &complexes[n - 1], &cof, rule)?);
        }
    }
    let (module, certificate) = homology_colimit(&complexes, &maps, q, 0, w)?;
    Ok(StableValue {
        degree: q,
        module,
        certificate,
        annihilator_bound: bound,
        k_max_used: k_max,
    })
}

/// Smallest stage `k ≥ 1` at which every staged element acts as zero on `m`.
pub fn annihilator_bound(seq: &[SeqElement], m: &FinMod) -> Option<usize> {
    (1..=64usize).find(|&k| {
        stage(seq, k)
            .iter()
            .all(|e| m.realize(e).map(|x| x.is_zero()).unwrap_or(false))
    })
}

/// `R^qΓ(M) = colim_k H^q(Hom(K_•(x^{(k)}), M))` along subset-rule transitions.
pub fn local_cohomology(m: &FinMod, seq: &[SeqElement], q: i64, k_max: usize, w: usize) -> Result<StableValue> {
    let staged = local_cohomology_system(m, seq, k_max, w)?;
    let (module, certificate) = homology_colimit(&staged.complexes, &staged.maps, q, 1, w)?;
    Ok(StableValue {
        degree: q,
        module,
        certificate,
        annihilator_bound: staged.bound,
        k_max_used: staged.k_max,
    })
}

/// Staged cochain Koszul complexes and transitions, reusable across degrees.
pub struct StagedSystem {
    pub complexes: Vec<KoszulRealization>,
    pub maps: Vec<ChainMap>,
    pub bound: Option<usize>,
    pub k_max: usize,
}

pub fn local_cohomology_system(m: &FinMod, seq: &[SeqElement], k_max: usize, w: usize) -> Result<StagedSystem> {
    local_cohomology_system_with_rule(m, seq, k_max, w, CofactorRule::Subset)
}

/// Staged system with an explicit transition rule; only `Subset` is correct.
pub fn local_cohomology_system_with_rule(
    m: &FinMod,
    seq: &[SeqElement],
    k_max: usize,
    w: usize,
    rule: CofactorRule,
) -> Result<StagedSystem> {
    let bound = annihilator_bound(seq, m);
    let k_max = extend(k_max, bound, m, w);
    let mut complexes = Vec::new();
    let mut maps = Vec::new();
    for k in 1..=k_max {
        complexes.push(koszul_cochain(&stage(seq, k), m)?);
        if k > 1 {
            let (a, b) = (stage(seq, k - 1), stage(seq, k));
            let cof = a
                .iter()
                .zip(&b)
                .map(|(x, y)| cofactor(x, y, m))
                .collect::<Result<Vec<_>>>()?;
            let n = complexes.len();
            maps.push(cofactor_map(&complexes[n - 2], &complexes[n - 1], &cof, rule)?);
        }
    }
    Ok(StagedSystem {
        complexes,
        maps,
        bound,
        k_max,
    })
}

/// Stable value in degree `q` of an already built staged system.
pub fn staged_colimit(sys: &StagedSystem, q: i64, w: usize) -> Result<StableValue> {
    let (module, certificate) = homology_colimit(&sys.complexes, &sys.maps, q, 1, w)?;
    Ok(StableValue {
        degree: q,
        module,
        certificate,
        annihilator_bound: sys.bound,
        k_max_used: sys.k_max,
    })
}

/// Torsion part of `Z_p^rows / image(m)` with the free rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxFiniteSubmodule {
    pub p: u64,
    /// `p`-power invariant factors, ascending.
    pub torsion: Vec<u64>,
    pub free_rank: usize,
    /// Invariant factors of `colim_k Hom(Z/p^k, M)`.
    pub gamma_route: Vec<u64>,
}

fn p_part(p: u64, x: i128) -> u64 {
    let mut x = x.unsigned_abs();
    let mut out = 1u64;
    while x.is_multiple_of(p as u128) {
        x /= p as u128;
        out *= p;
    }
    out
}

pub fn max_finite_submodule_zp(p: u64, presentation: &IntMatrix, w: usize) -> Result<MaxFiniteSubmodule> {
    if !crate::exactlin::is_prime(p) {
        return Err(Error::NotPrimePower(p));
    }
    let s = smith_form_integers(presentation);
    let nonzero = s.diagonal.iter().filter(|&&d| d != 0).count();
    let free_rank = presentation.rows - nonzero;
    let torsion: Vec<u64> = s
        .diagonal
        .iter()
        .filter(|&&d| d != 0)
        .map(|&d| p_part(p, d))
        .filter(|&o| o > 1)
        .collect();
    // colim_k Hom(Z/p^k, M): the p^k-torsion of each cyclic summand, along inclusions
    let top = torsion.iter().map(|&o| crate::finmod::log_p(o, p)).max().unwrap_or(0);
    let amb = Ambient::new(p, top.max(1), 0, 0)?;
    let exps: Vec<u32> = torsion.iter().map(|&o| crate::finmod::log_p(o, p)).collect();
    let stage_mod =
        |k: u32| -> Result<FinMod> { FinMod::from_parts(amb, exps.iter().map(|&e| p.pow(e.min(k))).collect(), vec![]) };
    let k_max = top as usize + 2 * w.max(1) + 2;
    let mut objects = Vec::new();
    let mut transitions = Vec::new();
    for k in 1..=k_max as u32 {
        objects.push(stage_mod(k)?);
        if k > 1 {
            let md = amb.modulus();
            let mut mat = MatrixZN::zeros(md, exps.len(), exps.len());
            for (i, &e) in exps.iter().enumerate() {
                mat.set(i, i, p.pow(e.min(k) - e.min(k - 1)));
            }
            let n = objects.len();
            transitions.push(ModMap::new(objects[n - 2].clone(), objects[n - 1].clone(), mat)?);
        }
    }
    let c = colimit(&DirectedSystem::new(1, objects, transitions)?, w)?;
    let mut torsion = torsion;
    torsion.sort_unstable();
    Ok(MaxFiniteSubmodule {
        p,
        torsion,
        free_rank,
        gamma_route: c.module.sorted_factors(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmod::{iso_fingerprint, random_finmod, RandomModuleParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_module(p: u64, a: u32, s: usize, order: u64, gamma: u64) -> FinMod {
        let amb = Ambient::new(p, a, 0, s).unwrap();
        let ops = (0..s).map(|_| MatrixZN::scalar(amb.modulus(), 1, gamma)).collect();
        FinMod::from_parts(amb, vec![order], ops).unwrap()
    }

    #[test]
    fn trivial_action_cohomology() {
        for k in 0..3 {
            let a = scalar_module(3, 1, 1, 3, 1);
            assert_eq!(group_cohomology(&a, k, 0).unwrap().factors(), &[3]);
            assert_eq!(group_cohomology(&a, k, 1).unwrap().factors(), &[3]);
        }
        let a = scalar_module(2, 1, 2, 2, 1);
        let sizes: Vec<u32> = (0..=2)
            .map(|q| group_cohomology(&a, 1, q).unwrap().log_size())
            .collect();
        assert_eq!(sizes, vec![1, 2, 1]);
    }

    #[test]
    fn unit_action_mod_3() {
        // γ = 2 has order 2, so γ^{3^k} = 2 and γ^{3^k} − 1 = 1 is a unit
        let a = scalar_module(3, 1, 1, 3, 2);
        for k in 0..3 {
            assert!(group_cohomology(&a, k, 0).unwrap().is_zero());
            assert!(group_cohomology(&a, k, 1).unwrap().is_zero());
        }
    }

    #[test]
    fn d_functor_of_trivial_zp() {
        let a = scalar_module(2, 1, 1, 2, 1);
        assert!(d_functor(&a, 0, 6, 2).unwrap().module.is_zero());
        assert_eq!(d_functor(&a, 1, 6, 2).unwrap().module.factors(), &[2]);
        let z = FinMod::zero(Ambient::new(2, 1, 0, 1).unwrap());
        assert!(d_functor(&z, 1, 4, 2).unwrap().module.is_zero());
    }

    #[test]
    fn cor_res_is_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let amb = Ambient::new(3, 2, 0, 2).unwrap();
        for _ in 0..5 {
            let a = random_finmod(&mut rng, amb, &RandomModuleParams::default());
            for k in 0..2 {
                check_cor_res(&a, k).unwrap();
            }
        }
    }

    #[test]
    fn finite_modules_are_their_own_torsion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let amb = Ambient::new(2, 2, 1, 1).unwrap();
        let seq = [SeqElement::P(1), SeqElement::V(1, 1), SeqElement::G(1, 0)];
        for _ in 0..4 {
            let m = random_finmod(&mut rng, amb, &RandomModuleParams::default());
            let sys = local_cohomology_system(&m, &seq, 4, 2).unwrap();
            assert!(sys.bound.is_some());
            let h0 = staged_colimit(&sys, 0, 2).unwrap();
            assert_eq!(iso_fingerprint(&h0.module, 2), iso_fingerprint(&m, 2));
            for q in 1..=3 {
                assert!(staged_colimit(&sys, q, 2).unwrap().module.is_zero());
            }
        }
    }

    #[test]
    fn p_torsion_only() {
        let amb = Ambient::new(2, 2, 0, 0).unwrap();
        let m = FinMod::cyclic_trivial(amb, 4).unwrap();
        assert_eq!(
            local_cohomology(&m, &[SeqElement::P(1)], 0, 4, 2)
                .unwrap()
                .module
                .factors(),
            &[4]
        );
        assert!(local_cohomology(&m, &[SeqElement::P(1)], 1, 4, 2)
            .unwrap()
            .module
            .is_zero());
        let z = FinMod::zero(amb);
        assert!(local_cohomology(&z, &[SeqElement::P(1)], 0, 4, 2)
            .unwrap()
            .module
            .is_zero());
    }

    #[test]
    fn torus_duality_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for s in [1, 2] {
            let amb = Ambient::new(2, 2, 0, s).unwrap();
            let m = random_finmod(&mut rng, amb, &RandomModuleParams::default());
            let seq = torus_sequence(s, 0);
            for j in 0..=s as i64 {
                let d = d_functor(&pontryagin_dual(&m), j, 4, 2).unwrap();
                let g = local_cohomology(&m, &seq, s as i64 - j, 4, 2).unwrap();
                assert_eq!(d.module.log_size(), g.module.log_size(), "s={s} j={j}");
            }
        }
    }

    #[test]
    fn max_finite_examples() {
        let r = max_finite_submodule_zp(3, &IntMatrix::diag(&[9, 0]), 2).unwrap();
        assert_eq!((r.torsion.clone(), r.free_rank), (vec![9], 1));
        assert_eq!(r.gamma_route, vec![9]);
        let r = max_finite_submodule_zp(2, &IntMatrix::zeros(2, 2), 2).unwrap();
        assert!(r.torsion.is_empty() && r.gamma_route.is_empty());
        let r = max_finite_submodule_zp(5, &IntMatrix::diag(&[1]), 2).unwrap();
        assert_eq!((r.torsion.len(), r.free_rank), (0, 0));
        // 12 = 4·3 has 2-part 4
        let r = max_finite_submodule_zp(2, &IntMatrix::from_rows(&[vec![12, 6]]), 2).unwrap();
        assert_eq!(r.torsion, vec![2]);
    }
}
