//! Koszul complexes on finite modules, built on the wedge basis of sorted
//! index subsets in lexicographic order.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::chainkit::{ChainComplex, ChainMap, Orientation};
use crate::error::{Error, Result};
use crate::exactlin::MatrixZN;
use crate::finmod::{Ambient, FinMod, ModMap, SeqElement};

/// `q`-subsets of `{0..d-1}` in lexicographic order.
pub fn subsets(d: usize, q: usize) -> Vec<Vec<usize>> {
    (0..d).combinations(q).collect()
}

fn position(list: &[Vec<usize>], s: &[usize]) -> usize {
    list.binary_search_by(|x| x.as_slice().cmp(s))
        .expect("subset is listed")
}

#[derive(Clone, Debug)]
pub struct KoszulRealization {
    pub module: FinMod,
    pub orientation: Orientation,
    pub complex: ChainComplex,
    /// Endomorphisms realizing `x_1..x_d` on `module`.
    pub elements: Vec<MatrixZN>,
}

impl KoszulRealization {
    pub fn length(&self) -> usize {
        self.elements.len()
    }

    /// `H_q` for chains, `H^q` for cochains.
    pub fn homology(&self, q: i64) -> FinMod {
        self.complex.homology(q)
    }
}

fn realize_all(seq: &[SeqElement], m: &FinMod) -> Result<Vec<MatrixZN>> {
    seq.iter().map(|e| m.realize(e)).collect()
}

fn place(m: &FinMod, out: &mut MatrixZN, row_block: usize, col_block: usize, block: &MatrixZN, sign: i64) {
    let r = m.rank();
    let md = m.modulus();
    for i in 0..r {
        for j in 0..r {
            let x = block.get(i, j);
            let cur = out.get(row_block * r + i, col_block * r + j);
            let v = if sign > 0 { md.add(cur, x) } else { md.sub(cur, x) };
            out.set(row_block * r + i, col_block * r + j, v);
        }
    }
}

/// `K_•(x) ⊗ M` with `d(e_I) = Σ_k (−1)^{k+1} x_{i_k} e_{I∖i_k}`.
pub fn koszul_chain(seq: &[SeqElement], m: &FinMod) -> Result<KoszulRealization> {
    let xs = realize_all(seq, m)?;
    koszul_chain_from(m, xs)
}

pub fn koszul_chain_from(m: &FinMod, xs: Vec<MatrixZN>) -> Result<KoszulRealization> {
    let d = xs.len();
    let md = m.modulus();
    let r = m.rank();
    let terms: Vec<FinMod> = (0..=d).map(|q| m.power_sum(subsets(d, q).len())).collect();
    let mut diffs = Vec::new();
    for q in 1..=d {
        let src = subsets(d, q);
        let tgt = subsets(d, q - 1);
        let mut mat = MatrixZN::zeros(md, tgt.len() * r, src.len() * r);
        for (ci, set) in src.iter().enumerate() {
            for (k, &i) in set.iter().enumerate() {
                let mut rest = set.clone();
                rest.remove(k);
                let sign = if k % 2 == 0 { 1 } else { -1 };
                place(m, &mut mat, position(&tgt, &rest), ci, &xs[i], sign);
            }
        }
        diffs.push(ModMap::new_unchecked(terms[q].clone(), terms[q - 1].clone(), mat)?);
    }
    let complex = ChainComplex::chain(0, terms, diffs)?;
    Ok(KoszulRealization {
        module: m.clone(),
        orientation: Orientation::Chain,
        complex,
        elements: xs,
    })
}

/// `Hom(K_•(x), M)`, assembled target by target:
/// `(δφ)_{J} = Σ_m (−1)^{m+1} x_{j_m} φ_{J∖j_m}`.
pub fn koszul_cochain(seq: &[SeqElement], m: &FinMod) -> Result<KoszulRealization> {
    let xs = realize_all(seq, m)?;
    koszul_cochain_from(m, xs)
}

pub fn koszul_cochain_from(m: &FinMod, xs: Vec<MatrixZN>) -> Result<KoszulRealization> {
    let d = xs.len();
    let md = m.modulus();
    let r = m.rank();
    let terms: Vec<FinMod> = (0..=d).map(|q| m.power_sum(subsets(d, q).len())).collect();
    let mut diffs = Vec::new();
    for q in 0..d {
        let src = subsets(d, q);
        let tgt = subsets(d, q + 1);
        let mut mat = MatrixZN::zeros(md, tgt.len() * r, src.len() * r);
        for (row, jset) in tgt.iter().enumerate() {
            for mpos in 0..jset.len() {
                let omitted: Vec<usize> = jset
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != mpos)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = if mpos % 2 == 0 { 1 } else { -1 };
                place(m, &mut mat, row, position(&src, &omitted), &xs[jset[mpos]], sign);
            }
        }
        diffs.push(ModMap::new_unchecked(terms[q].clone(), terms[q + 1].clone(), mat)?);
    }
    let complex = ChainComplex::cochain(0, terms, diffs)?;
    Ok(KoszulRealization {
        module: m.clone(),
        orientation: Orientation::Cochain,
        complex,
        elements: xs,
    })
}

/// One row of the self-duality sign table, subsets numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignEntry {
    pub subset: Vec<usize>,
    pub complement: Vec<usize>,
    pub sign: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignTable {
    pub d: usize,
    pub entries: Vec<SignEntry>,
}

impl SignTable {
    pub fn sign(&self, subset: &[usize]) -> i64 {
        self.entries
            .iter()
            .find(|e| e.subset.iter().map(|&i| i - 1).eq(subset.iter().copied()))
            .map(|e| e.sign)
            .expect("every subset has an entry")
    }
}

fn permutation_sign(p: &[usize]) -> i64 {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `e_I ↦ sgn(I, I^c) · e_{I^c}^*`, the sign of the shuffle that lists `I`
/// followed by its complement.
pub fn selfduality_map(d: usize) -> SignTable {
    let mut entries = Vec::new();
    for q in 0..=d {
        for set in subsets(d, q) {
            let comp: Vec<usize> = (0..d).filter(|i| !set.contains(i)).collect();
            let perm: Vec<usize> = set.iter().chain(&comp).copied().collect();
            entries.push(SignEntry {
                subset: set.iter().map(|i| i + 1).collect(),
                complement: comp.iter().map(|i| i + 1).collect(),
                sign: permutation_sign(&perm),
            });
        }
    }
    SignTable { d, entries }
}

/// Extra sign `(−1)^{q(q−1)/2}` on `K_q` that makes the degreewise
/// self-duality maps commute with both differentials on the nose.
pub fn degree_twist(q: usize) -> i64 {
    if (q * q.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Realizes `K_•(x) ⊗ M → [d] Hom(K_•(x), M)` from a sign table and checks
/// that it is a chain map.
pub fn realize_selfduality(
    chain: &KoszulRealization,
    cochain: &KoszulRealization,
    table: &SignTable,
) -> Result<ChainMap> {
    let d = chain.length();
    if cochain.length() != d || table.d != d || chain.module != cochain.module {
        return Err(Error::DimensionMismatch(
            "self-duality between unrelated Koszul complexes".into(),
        ));
    }
    let m = &chain.module;
    let md = m.modulus();
    let r = m.rank();
    let source = chain.complex.as_cochain();
    let target = cochain.complex.shift(d as i64);
    let ident = m.identity();
    let mut comps = Vec::new();
    // internal degree -q holds K_q on the source and K^{d-q} on the target
    for q in (0..=d).rev() {
        let src = subsets(d, q);
        let tgt = subsets(d, d - q);
        let mut mat = MatrixZN::zeros(md, tgt.len() * r, src.len() * r);
        for (ci, set) in src.iter().enumerate() {
            let comp: Vec<usize> = (0..d).filter(|i| !set.contains(i)).collect();
            let s = table.sign(set) * degree_twist(q);
            place(m, &mut mat, position(&tgt, &comp), ci, &ident, s);
        }
        comps.push(ModMap::new_unchecked(
            source.module(-(q as i64)),
            target.module(-(q as i64)),
            mat,
        )?);
    }
    ChainMap::new(source, target, comps)
}

/// How a transition scales the wedge component of a subset `S`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CofactorRule {
    /// Product of the cofactors indexed by `S`.
    Subset,
    /// Product of the cofactors indexed by the complement of `S`.
    Complement,
}

/// Degreewise diagonal map multiplying the `S`-component by a product of
/// cofactors, checked to be a chain map.
pub fn cofactor_map(
    src: &KoszulRealization,
    tgt: &KoszulRealization,
    cofactors: &[MatrixZN],
    rule: CofactorRule,
) -> Result<ChainMap> {
    let d = src.length();
    if tgt.length() != d || cofactors.len() != d || src.orientation != tgt.orientation {
        return Err(Error::DimensionMismatch(
            "transition between unrelated Koszul complexes".into(),
        ));
    }
    let (sm, tm) = (&src.module, &tgt.module);
    let md = sm.modulus();
    let (rs, rt) = (sm.rank(), tm.rank());
    let (lo, hi) = src.complex.cochain_range();
    let mut comps = Vec::new();
    for c in lo..=hi {
        let q = match src.orientation {
            Orientation::Chain => (-c) as usize,
            Orientation::Cochain => c as usize,
        };
        let sets = subsets(d, q);
        let mut mat = MatrixZN::zeros(md, sets.len() * rt, sets.len() * rs);
        for (bi, set) in sets.iter().enumerate() {
            let mut block = MatrixZN::scalar(md, rt, 1);
            for (j, f) in cofactors.iter().enumerate() {
                let inside = set.contains(&j);
                if inside == (rule == CofactorRule::Subset) {
                    block = tm.compose(&block, f);
                }
            }
            // block is an endomorphism of the target; compose with the
            // identification source → target given by cofactor shape
            let block = if rs == rt {
                block
            } else {
                return Err(Error::DimensionMismatch("modules differ".into()));
            };
            mat.set_block(bi * rt, bi * rs, &block);
        }
        let n = match src.orientation {
            Orientation::Chain => q as i64,
            Orientation::Cochain => q as i64,
        };
        comps.push(ModMap::new_unchecked(
            src.complex.module(n),
            tgt.complex.module(n),
            mat,
        )?);
    }
    ChainMap::new(src.complex.clone(), tgt.complex.clone(), comps)
}

/// Degreewise `id_{wedge} ⊗ g` for a module map `g : M → N`.
pub fn functoriality_map(src: &KoszulRealization, tgt: &KoszulRealization, g: &ModMap) -> Result<ChainMap> {
    let d = src.length();
    if tgt.length() != d || src.orientation != tgt.orientation {
        return Err(Error::DimensionMismatch(
            "functoriality between unrelated Koszul complexes".into(),
        ));
    }
    let md = src.module.modulus();
    let (rs, rt) = (src.module.rank(), tgt.module.rank());
    let (lo, hi) = src.complex.cochain_range();
    let mut comps = Vec::new();
    for c in lo..=hi {
        let q = c.unsigned_abs() as usize;
        let n = match src.orientation {
            Orientation::Chain => -c,
            Orientation::Cochain => c,
        };
        let count = subsets(d, q).len();
        let mut mat = MatrixZN::zeros(md, count * rt, count * rs);
        for b in 0..count {
            mat.set_block(b * rt, b * rs, g.matrix());
        }
        comps.push(ModMap::new_unchecked(
            src.complex.module(n),
            tgt.complex.module(n),
            mat,
        )?);
    }
    ChainMap::new(src.complex.clone(), tgt.complex.clone(), comps)
}

/// Cofactor `f` with `to = f · from` as an endomorphism of `m`.
pub fn cofactor(from: &SeqElement, to: &SeqElement, m: &FinMod) -> Result<MatrixZN> {
    use SeqElement::*;
    match (*from, *to) {
        (P(c1), P(c2)) if c2 >= c1 => Ok(m.scalar(m.modulus().pow(m.ambient().p, (c2 - c1) as u64))),
        (V(i, c1), V(i2, c2)) if i == i2 && c2 >= c1 => Ok(m.power(m.x(i - 1), (c2 - c1) as u64)),
        (G(j, b1), G(j2, b2)) if j == j2 && b2 >= b1 => {
            let p = m.ambient().p;
            let g = m.power(m.gamma(j - 1), p.pow(b1));
            let mut acc = m.scalar(0);
            let mut term = m.identity();
            for _ in 0..p.pow(b2 - b1) {
                acc = m.add(&acc, &term);
                term = m.compose(&term, &g);
            }
            Ok(acc)
        }
        _ => Err(Error::Precondition(format!(
            "{to} is not a multiple of {from} in the catalog"
        ))),
    }
}

/// Power stage `k ≥ 1`: `p^c ↦ p^{ck}`, `X^c ↦ X^{ck}`, `γ^{p^b} − 1 ↦ γ^{p^{b+k−1}} − 1`.
pub fn stage(seq: &[SeqElement], k: usize) -> Vec<SeqElement> {
    assert!(k >= 1, "stages start at 1");
    seq.iter()
        .map(|e| match *e {
            SeqElement::P(c) => SeqElement::P(c * k as u32),
            SeqElement::V(i, c) => SeqElement::V(i, c * k as u32),
            SeqElement::G(j, b) => SeqElement::G(j, b + k as u32 - 1),
        })
        .collect()
}

/// Transition between consecutive power stages, with the chain-map
/// property checked.
pub fn power_transition(
    seq: &[SeqElement],
    k: usize,
    m: &FinMod,
    orientation: Orientation,
    rule: CofactorRule,
) -> Result<ChainMap> {
    let (a, b) = (stage(seq, k), stage(seq, k + 1));
    let build = |s: &[SeqElement]| match orientation {
        Orientation::Chain => koszul_chain(s, m),
        Orientation::Cochain => koszul_cochain(s, m),
    };
    let (src, tgt) = (build(&a)?, build(&b)?);
    let cof = a
        .iter()
        .zip(&b)
        .map(|(x, y)| cofactor(x, y, m))
        .collect::<Result<Vec<_>>>()?;
    cofactor_map(&src, &tgt, &cof, rule)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityCertificate {
    pub certified: bool,
    pub reason: String,
}

/// Symbolic regularity: catalog elements on pairwise distinct variables.
pub fn regularity_certificate(amb: &Ambient, seq: &[SeqElement]) -> RegularityCertificate {
    let reject = |reason: String| RegularityCertificate {
        certified: false,
        reason,
    };
    let mut seen = std::collections::BTreeSet::new();
    for e in seq {
        match *e {
            SeqElement::P(0) | SeqElement::V(_, 0) => return reject(format!("{e} is a unit")),
            SeqElement::V(i, _) if i == 0 || i > amb.t => return reject(format!("{e} is not in the ambient ring")),
            SeqElement::G(j, _) if j == 0 || j > amb.s => return reject(format!("{e} is not in the ambient ring")),
            _ => {}
        }
        if !seen.insert(e.variable()) {
            return reject(format!("{e} repeats a variable"));
        }
    }
    RegularityCertificate {
        certified: true,
        reason: "catalog elements on distinct variables".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmod::{random_finmod, RandomModuleParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zp2(p: u64) -> FinMod {
        let a = Ambient::new(p, 2, 1, 1).unwrap();
        FinMod::cyclic_trivial(a, p * p).unwrap()
    }

    #[test]
    fn one_element_koszul_on_zp2() {
        for p in [2, 3] {
            let m = zp2(p);
            let k = koszul_chain(&[SeqElement::P(1)], &m).unwrap();
            assert_eq!(k.homology(0).factors(), &[p]);
            assert_eq!(k.homology(1).factors(), &[p]);
            let c = koszul_cochain(&[SeqElement::P(1)], &m).unwrap();
            assert_eq!(c.homology(0).factors(), &[p]);
            assert_eq!(c.homology(1).factors(), &[p]);
        }
    }

    #[test]
    fn two_element_rank_pattern() {
        let a = Ambient::new(2, 2, 1, 0).unwrap();
        let x = MatrixZN::from_rows(a.modulus(), 2, &[vec![0, 1], vec![0, 0]]).unwrap();
        let m = FinMod::from_parts(a, vec![4, 4], vec![x]).unwrap();
        let k = koszul_chain(&[SeqElement::P(1), SeqElement::V(1, 1)], &m).unwrap();
        let ranks: Vec<usize> = (0..=2).map(|q| k.complex.module(q).rank() / m.rank()).collect();
        assert_eq!(ranks, vec![1, 2, 1]);
        // non-regular sequences still give complexes
        assert!(koszul_cochain(&[SeqElement::P(1), SeqElement::P(1)], &m).is_ok());
        assert!(koszul_cochain(&[SeqElement::P(1)], &FinMod::zero(a))
            .unwrap()
            .homology(0)
            .is_zero());
    }

    #[test]
    fn sign_tables() {
        let t2 = selfduality_map(2);
        let signs: Vec<i64> = t2.entries.iter().map(|e| e.sign).collect();
        assert_eq!(signs, vec![1, 1, -1, 1]);
        let t3 = selfduality_map(3);
        assert_eq!(t3.sign(&[0, 2]), -1);
    }

    #[test]
    fn selfduality_commutes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Ambient::new(3, 2, 2, 2).unwrap();
        let seqs = [
            vec![SeqElement::P(1)],
            vec![SeqElement::P(1), SeqElement::V(1, 1)],
            vec![SeqElement::V(2, 1), SeqElement::G(1, 0), SeqElement::P(1)],
            vec![
                SeqElement::P(1),
                SeqElement::V(1, 2),
                SeqElement::G(1, 0),
                SeqElement::G(2, 1),
            ],
        ];
        for seq in &seqs {
            let m = random_finmod(&mut rng, a, &RandomModuleParams::default());
            let ch = koszul_chain(seq, &m).unwrap();
            let co = koszul_cochain(seq, &m).unwrap();
            let f = realize_selfduality(&ch, &co, &selfduality_map(seq.len())).unwrap();
            assert!(f.is_degreewise_iso());
        }
    }

    #[test]
    fn transitions_are_chain_maps_and_compose() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = Ambient::new(2, 3, 1, 1).unwrap();
        let m = random_finmod(&mut rng, a, &RandomModuleParams::default());
        let seq = [SeqElement::P(1), SeqElement::V(1, 1), SeqElement::G(1, 0)];
        for orientation in [Orientation::Chain, Orientation::Cochain] {
            let rule = if orientation == Orientation::Chain {
                CofactorRule::Complement
            } else {
                CofactorRule::Subset
            };
            let t1 = power_transition(&seq, 1, &m, orientation, rule).unwrap();
            let t2 = power_transition(&seq, 2, &m, orientation, rule).unwrap();
            let two = t1.then(&t2).unwrap();
            let build = |s: &[SeqElement]| match orientation {
                Orientation::Chain => koszul_chain(s, &m).unwrap(),
                Orientation::Cochain => koszul_cochain(s, &m).unwrap(),
            };
            let (s1, s3) = (stage(&seq, 1), stage(&seq, 3));
            let cof: Vec<MatrixZN> = s1.iter().zip(&s3).map(|(x, y)| cofactor(x, y, &m).unwrap()).collect();
            let direct = cofactor_map(&build(&s1), &build(&s3), &cof, rule).unwrap();
            for (x, y) in two.components().iter().zip(direct.components()) {
                assert_eq!(x.matrix(), y.matrix());
            }
        }
    }

    #[test]
    fn identity_stage_gives_identity_map() {
        let m = zp2(2);
        let seq = [SeqElement::P(1)];
        let k = koszul_cochain(&seq, &m).unwrap();
        let f = cofactor_map(&k, &k, &[m.identity()], CofactorRule::Subset).unwrap();
        assert!(f
            .components()
            .iter()
            .all(|c| c.matrix() == &MatrixZN::identity(m.modulus(), c.source().rank())));
    }

    #[test]
    fn regularity_examples() {
        let a = Ambient::new(2, 2, 1, 1).unwrap();
        assert!(regularity_certificate(&a, &[SeqElement::P(1), SeqElement::V(1, 1), SeqElement::G(1, 0)]).certified);
        assert!(!regularity_certificate(&a, &[SeqElement::P(1), SeqElement::P(2)]).certified);
        assert!(regularity_certificate(&a, &[SeqElement::V(1, 3)]).certified);
    }
}
