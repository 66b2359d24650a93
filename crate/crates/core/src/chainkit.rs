//! Complexes of finite modules, their homology, and stabilized colimits.
//!
//! Complexes are stored cochain-wise: `modules[i]` sits in cochain degree
//! `lo + i` and `diffs[i]` goes up one degree. A chain complex is the same
//! data read with `C_q = C^{-q}`. Shifts follow `([d]C)^n = C^{n+d}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::Subquotient;
use crate::finmod::{iso_fingerprint, pontryagin_dual, FinMod, ModMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Chain,
    Cochain,
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    orientation: Orientation,
    lo: i64,
    modules: Vec<FinMod>,
    diffs: Vec<ModMap>,
}

/// `H^n` together with the data needed to map into and out of it.
#[derive(Clone, Debug)]
pub struct Homology {
    pub module: FinMod,
    pub sq: Subquotient,
    /// The term of the complex it is a subquotient of.
    pub term: FinMod,
}

impl Homology {
    /// Ambient representative of a class.
    pub fn lift(&self, c: &[u64]) -> Vec<u64> {
        self.sq.lift(c)
    }

    pub fn class_of(&self, cycle: &[u64]) -> Option<Vec<u64>> {
        self.sq.coords(cycle)
    }
}

impl ChainComplex {
    /// Cochain complex with `modules[i]` in degree `lo + i`.
    pub fn cochain(lo: i64, modules: Vec<FinMod>, diffs: Vec<ModMap>) -> Result<Self> {
        Self::build(Orientation::Cochain, lo, modules, diffs)
    }

    /// Chain complex with `modules[i]` in degree `lo + i` and
    /// `diffs[i] : C_{lo+i+1} → C_{lo+i}`.
    pub fn chain(lo: i64, mut modules: Vec<FinMod>, mut diffs: Vec<ModMap>) -> Result<Self> {
        let hi = lo + modules.len() as i64 - 1;
        modules.reverse();
        diffs.reverse();
        Self::build(Orientation::Chain, -hi, modules, diffs)
    }

    fn build(orientation: Orientation, lo: i64, modules: Vec<FinMod>, diffs: Vec<ModMap>) -> Result<Self> {
        if modules.is_empty() {
            return Err(Error::NotAComplex("a complex needs at least one term".into()));
        }
        if diffs.len() + 1 != modules.len() {
            return Err(Error::NotAComplex(format!(
                "{} terms need {} differentials, got {}",
                modules.len(),
                modules.len() - 1,
                diffs.len()
            )));
        }
        let amb = modules[0].ambient();
        if modules.iter().any(|m| m.ambient() != amb) {
            return Err(Error::AmbientMismatch("terms of a complex over different rings".into()));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.source() != &modules[i] || d.target() != &modules[i + 1] {
                return Err(Error::NotAComplex(format!(
                    "differential {i} has the wrong source or target"
                )));
            }
        }
        for i in 0..diffs.len().saturating_sub(1) {
            if !diffs[i].then(&diffs[i + 1])?.is_zero() {
                return Err(Error::NotAComplex(format!(
                    "d∘d ≠ 0 starting in cochain degree {}",
                    lo + i as i64
                )));
            }
        }
        Ok(Self {
            orientation,
            lo,
            modules,
            diffs,
        })
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    fn internal(&self, n: i64) -> i64 {
        match self.orientation {
            Orientation::Cochain => n,
            Orientation::Chain => -n,
        }
    }

    /// Cochain-degree bounds of the stored terms.
    pub fn cochain_range(&self) -> (i64, i64) {
        (self.lo, self.lo + self.modules.len() as i64 - 1)
    }

    /// Degrees in the complex's own indexing, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        let (lo, hi) = self.cochain_range();
        let mut d: Vec<i64> = (lo..=hi).map(|n| self.internal(n)).collect();
        d.sort_unstable();
        d
    }

    fn idx(&self, internal: i64) -> Option<usize> {
        let i = internal - self.lo;
        (0..self.modules.len() as i64).contains(&i).then_some(i as usize)
    }

    /// Term in degree `n` of the complex's own indexing.
    pub fn module(&self, n: i64) -> FinMod {
        match self.idx(self.internal(n)) {
            Some(i) => self.modules[i].clone(),
            None => FinMod::zero(self.modules[0].ambient()),
        }
    }

    pub fn terms(&self) -> &[FinMod] {
        &self.modules
    }

    pub fn differentials(&self) -> &[ModMap] {
        &self.diffs
    }

    /// Outgoing differential at cochain degree `c`, zero at the edges.
    fn d_from(&self, c: i64) -> ModMap {
        let src = self.term_internal(c);
        match self.idx(c) {
            Some(i) if i < self.diffs.len() => self.diffs[i].clone(),
            _ => ModMap::zero(src, self.term_internal(c + 1)),
        }
    }

    fn term_internal(&self, c: i64) -> FinMod {
        match self.idx(c) {
            Some(i) => self.modules[i].clone(),
            None => FinMod::zero(self.modules[0].ambient()),
        }
    }

    /// `H^n` (or `H_n` for chain complexes) with induced operators.
    pub fn homology_data(&self, n: i64) -> Homology {
        let c = self.internal(n);
        let term = self.term_internal(c);
        let out = self.d_from(c);
        let inc = self.d_from(c - 1);
        let gens = out.kernel_rows();
        let rels: Vec<Vec<u64>> = (0..inc.source().rank())
            .map(|j| inc.matrix().right_apply(&inc.source().basis_vector(j)))
            .collect();
        let (module, sq) = term.subquotient(&gens, &rels);
        Homology { module, sq, term }
    }

    pub fn homology(&self, n: i64) -> FinMod {
        self.homology_data(n).module
    }

    /// `([d]C)^n = C^{n+d}`, on cochain degrees.
    pub fn shift(&self, d: i64) -> ChainComplex {
        let mut c = self.clone();
        c.lo -= d;
        c
    }

    /// Same data read as a cochain complex, `C^{-q} = C_q`.
    pub fn as_cochain(&self) -> ChainComplex {
        let mut c = self.clone();
        c.orientation = Orientation::Cochain;
        c
    }

    /// Degreewise Pontryagin dual with arrows reversed and degrees negated.
    pub fn dualize(&self) -> ChainComplex {
        let k = self.modules.len();
        let modules: Vec<FinMod> = self.modules.iter().rev().map(pontryagin_dual).collect();
        let diffs: Vec<ModMap> = self.diffs.iter().rev().map(ModMap::pontryagin_dual).collect();
        let (_, hi) = self.cochain_range();
        let out = Self {
            orientation: self.orientation,
            lo: -hi,
            modules,
            diffs,
        };
        debug_assert_eq!(out.modules.len(), k);
        out
    }

    /// `Σ (−1)^n log_p |C^n|`.
    pub fn euler_log(&self) -> i64 {
        self.modules
            .iter()
            .enumerate()
            .map(|(i, m)| sign(self.lo + i as i64) * m.log_size() as i64)
            .sum()
    }

    /// `Σ (−1)^n log_p |H^n|`.
    pub fn homology_euler_log(&self) -> i64 {
        let (lo, hi) = self.cochain_range();
        (lo..=hi)
            .map(|c| sign(c) * self.homology(self.internal(c)).log_size() as i64)
            .sum()
    }
}

fn sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Degreewise maps between complexes with the same cochain range.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    components: Vec<ModMap>,
}

impl ChainMap {
    /// Verifies every square; the first failing one is reported.
    pub fn new(source: ChainComplex, target: ChainComplex, components: Vec<ModMap>) -> Result<Self> {
        if source.cochain_range() != target.cochain_range() || components.len() != source.modules.len() {
            return Err(Error::DimensionMismatch(
                "chain map between complexes of different shape".into(),
            ));
        }
        for (i, f) in components.iter().enumerate() {
            if f.source() != &source.modules[i] || f.target() != &target.modules[i] {
                return Err(Error::DimensionMismatch(format!(
                    "component {i} has the wrong source or target"
                )));
            }
        }
        for i in 0..source.diffs.len() {
            let lhs = source.diffs[i].then(&components[i + 1])?;
            let rhs = components[i].then(&target.diffs[i])?;
            if lhs.matrix() != rhs.matrix() {
                let c = source.lo + i as i64;
                return Err(Error::ChainMapViolation {
                    degree: source.internal(c),
                    detail: format!(
                        "square from degree {} does not commute: f∘d = {:?}, d∘f = {:?}",
                        source.internal(c),
                        lhs.matrix().row_vecs(),
                        rhs.matrix().row_vecs()
                    ),
                });
            }
        }
        Ok(Self {
            source,
            target,
            components,
        })
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn components(&self) -> &[ModMap] {
        &self.components
    }

    /// Component at degree `n` of the source's own indexing.
    pub fn component(&self, n: i64) -> Option<&ModMap> {
        self.source.idx(self.source.internal(n)).map(|i| &self.components[i])
    }

    pub fn is_degreewise_iso(&self) -> bool {
        self.components.iter().all(ModMap::is_iso)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap> {
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(f, g)| f.then(g))
            .collect::<Result<Vec<_>>>()?;
        ChainMap::new(self.source.clone(), other.target.clone(), comps)
    }

    /// Induced map on `H^n` of the source's indexing.
    pub fn induced(&self, n: i64, hs: &Homology, ht: &Homology) -> ModMap {
        let md = hs.module.modulus();
        let f = self.component(n);
        let mut m = crate::exactlin::MatrixZN::zeros(md, ht.module.rank(), hs.module.rank());
        if let Some(f) = f {
            for j in 0..hs.module.rank() {
                let cycle = hs.lift(&hs.module.basis_vector(j));
                let image = f.matrix().right_apply(&cycle);
                let c = ht.class_of(&image).expect("chain maps send cycles to cycles");
                for (i, &x) in c.iter().enumerate() {
                    m.set(i, j, x);
                }
            }
        }
        ModMap::new_unchecked(hs.module.clone(), ht.module.clone(), m).expect("shape")
    }
}

/// Objects `A_{k_min} → A_{k_min+1} → …` with one transition per step.
#[derive(Clone, Debug)]
pub struct DirectedSystem {
    pub k_min: usize,
    pub objects: Vec<FinMod>,
    pub transitions: Vec<ModMap>,
}

impl DirectedSystem {
    pub fn new(k_min: usize, objects: Vec<FinMod>, transitions: Vec<ModMap>) -> Result<Self> {
        if objects.is_empty() || transitions.len() + 1 != objects.len() {
            return Err(Error::DimensionMismatch(
                "a directed system needs n objects and n-1 transitions".into(),
            ));
        }
        for (i, t) in transitions.iter().enumerate() {
            if t.source().factors() != objects[i].factors() || t.target().factors() != objects[i + 1].factors() {
                return Err(Error::DimensionMismatch(format!(
                    "transition {i} does not connect its objects"
                )));
            }
        }
        Ok(Self {
            k_min,
            objects,
            transitions,
        })
    }

    pub fn k_max(&self) -> usize {
        self.k_min + self.objects.len() - 1
    }

    /// Composite `A_i → A_j` for list positions `i ≤ j`.
    pub fn composite(&self, i: usize, j: usize) -> ModMap {
        let mut f = ModMap::identity(&self.objects[i]);
        for t in &self.transitions[i..j] {
            f = f.then(t).expect("consecutive transitions compose");
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationCertificate {
    /// First index of the stable window.
    pub stable_index: usize,
    pub window: usize,
    pub k_max: usize,
    /// `log_p |im(A_k → A_{k_max})|` for every `k`.
    pub image_log_sizes: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationFailure {
    pub k_max: usize,
    pub window: usize,
    pub image_log_sizes: Vec<u32>,
    /// Fingerprint summaries of the last objects.
    pub tail: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct Colimit {
    pub module: FinMod,
    pub certificate: StabilizationCertificate,
}

/// Stable value of a directed system.
///
/// The colimit is read off as `im(A_j → A_last)` once the image sizes are
/// constant for `w + 1` consecutive `j` and the image of `A_j` has stopped
/// shrinking over the last `w + 1` targets, so kernels have stopped growing.
pub fn colimit(sys: &DirectedSystem, w: usize) -> Result<Colimit> {
    let w = w.max(1);
    let n = sys.objects.len();
    let last = n - 1;
    let mut to_last = vec![ModMap::identity(&sys.objects[last]); n];
    for i in (0..last).rev() {
        to_last[i] = sys.transitions[i].then(&to_last[i + 1])?;
    }
    let sizes: Vec<u32> = to_last.iter().map(ModMap::image_log_size).collect();
    for j in 0..n {
        if j + 2 * w > last {
            break;
        }
        if sizes[j..=j + w].iter().any(|&s| s != sizes[j]) {
            continue;
        }
        // image sizes only shrink along the targets, so one check covers the window
        if sys.composite(j, last - w).image_log_size() == sizes[j] {
            let (module, _) = to_last[j].image();
            return Ok(Colimit {
                module,
                certificate: StabilizationCertificate {
                    stable_index: sys.k_min + j,
                    window: w,
                    k_max: sys.k_max(),
                    image_log_sizes: sizes,
                },
            });
        }
    }
    let tail = sys.objects[n.saturating_sub(w + 1)..]
        .iter()
        .map(|m| iso_fingerprint(m, 1).summary())
        .collect();
    Err(Error::NoStabilization(Box::new(StabilizationFailure {
        k_max: sys.k_max(),
        window: w,
        image_log_sizes: sizes,
        tail,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::MatrixZN;
    use crate::finmod::Ambient;

    fn zmod(o: u64) -> FinMod {
        let a = Ambient::new(2, 3, 0, 0).unwrap();
        FinMod::from_parts(a, vec![o], vec![]).unwrap()
    }

    fn times(src: &FinMod, tgt: &FinMod, c: u64) -> ModMap {
        ModMap::new(src.clone(), tgt.clone(), MatrixZN::scalar(src.modulus(), 1, c)).unwrap()
    }

    #[test]
    fn two_term_complex() {
        let m = zmod(4);
        let c = ChainComplex::chain(0, vec![m.clone(), m.clone()], vec![times(&m, &m, 2)]).unwrap();
        assert_eq!(c.homology(1).factors(), &[2]);
        assert_eq!(c.homology(0).factors(), &[2]);
        assert!(c.homology(2).is_zero());
        let d = c.dualize();
        assert_eq!(d.homology(-1).factors(), &[2]);
        assert_eq!(d.homology(0).factors(), &[2]);
    }

    #[test]
    fn rejects_nonzero_square() {
        let m = zmod(8);
        let r = ChainComplex::cochain(
            0,
            vec![m.clone(), m.clone(), m.clone()],
            vec![times(&m, &m, 2), times(&m, &m, 2)],
        );
        assert!(r.is_err());
    }

    #[test]
    fn shift_moves_degrees() {
        let m = zmod(4);
        let c = ChainComplex::cochain(0, vec![m.clone(), m.clone()], vec![times(&m, &m, 1)]).unwrap();
        let s = c.shift(3);
        assert_eq!(s.cochain_range(), (-3, -2));
        assert_eq!(s.shift(-3).cochain_range(), c.cochain_range());
        for n in -4..2 {
            assert_eq!(s.homology(n).factors(), c.homology(n + 3).factors());
        }
    }

    #[test]
    fn colimit_examples() {
        let m = zmod(2);
        let ident = DirectedSystem::new(0, vec![m.clone(); 6], vec![times(&m, &m, 1); 5]).unwrap();
        let c = colimit(&ident, 2).unwrap();
        assert_eq!(c.module.factors(), &[2]);
        assert_eq!(c.certificate.stable_index, 0);
        let zero = DirectedSystem::new(0, vec![m.clone(); 6], vec![times(&m, &m, 0); 5]).unwrap();
        assert!(colimit(&zero, 2).unwrap().module.is_zero());
        // Z/2 → Z/4 → Z/8 by multiplication with 2 never stabilizes
        let objs = vec![zmod(2), zmod(4), zmod(8)];
        let ts = vec![times(&objs[0], &objs[1], 2), times(&objs[1], &objs[2], 2)];
        let grow = DirectedSystem::new(1, objs, ts).unwrap();
        assert!(matches!(colimit(&grow, 1), Err(Error::NoStabilization(_))));
    }
}
