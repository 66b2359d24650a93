use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{FinMod, ModMap};
use crate::exactlin::MatrixZN;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordRecord {
    pub ker: Vec<u64>,
    pub coker: Vec<u64>,
}

/// Isomorphism surrogate: invariant factors of the module and of kernels
/// and cokernels of every operator word up to a length bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub word_length: usize,
    pub factors: Vec<u64>,
    pub words: BTreeMap<String, WordRecord>,
}

impl Fingerprint {
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("fingerprint serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Compact text form, used in reports.
    pub fn summary(&self) -> String {
        format!("{:?} #{}", self.factors, &self.digest()[..12])
    }
}

/// Letters: `p`, `X_i`, `X_i - 1`, `g_j - 1`. Words are multisets since the
/// operators commute.
fn letters(m: &FinMod) -> Vec<(String, MatrixZN)> {
    let amb = m.ambient();
    let mut out = vec![("p".to_string(), m.scalar(amb.p))];
    for i in 0..amb.t {
        out.push((format!("X{}", i + 1), m.x(i).clone()));
        out.push((format!("(X{}-1)", i + 1), m.sub(m.x(i), &m.identity())));
    }
    for j in 0..amb.s {
        out.push((format!("(g{}-1)", j + 1), m.sub(m.gamma(j), &m.identity())));
    }
    out
}

pub fn iso_fingerprint(m: &FinMod, word_length: usize) -> Fingerprint {
    assert!(word_length >= 1, "word length must be positive");
    let letters = letters(m);
    let mut words = BTreeMap::new();
    let mut frontier: Vec<(Vec<usize>, MatrixZN)> = vec![(Vec::new(), m.identity())];
    for _ in 0..word_length {
        let mut next = Vec::new();
        for (w, mat) in &frontier {
            let start = w.last().copied().unwrap_or(0);
            for (li, (_, lm)) in letters.iter().enumerate().skip(start) {
                let mut w2 = w.clone();
                w2.push(li);
                let prod = m.compose(mat, lm);
                let f = ModMap::endomorphism(m, prod.clone());
                let name = w2.iter().map(|&i| letters[i].0.as_str()).collect::<Vec<_>>().join("*");
                words.insert(
                    name,
                    WordRecord {
                        ker: f.kernel_factors(),
                        coker: f.cokernel_factors(),
                    },
                );
                next.push((w2, prod));
            }
        }
        frontier = next;
    }
    Fingerprint {
        word_length,
        factors: m.sorted_factors(),
        words,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmod::{pontryagin_dual, random_finmod, random_unimodular, Ambient, RandomModuleParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn swap_and_identity_are_distinguished() {
        let a = Ambient::new(2, 1, 1, 0).unwrap();
        let md = a.modulus();
        let swap = FinMod::from_parts(
            a,
            vec![2, 2],
            vec![MatrixZN::from_rows(md, 2, &[vec![0, 1], vec![1, 0]]).unwrap()],
        )
        .unwrap();
        let id = FinMod::from_parts(a, vec![2, 2], vec![MatrixZN::identity(md, 2)]).unwrap();
        let fs = iso_fingerprint(&swap, 1);
        let fi = iso_fingerprint(&id, 1);
        assert_ne!(fs, fi);
        // the letter X-1 is what separates them: rank 1 versus rank 0
        assert_eq!(fs.words["(X1-1)"].coker, vec![2]);
        assert_eq!(fi.words["(X1-1)"].coker, vec![2, 2]);
    }

    #[test]
    fn trivial_module_matches_its_dual() {
        let a = Ambient::new(3, 2, 1, 1).unwrap();
        let m = FinMod::from_parts(
            a,
            vec![3, 9],
            vec![MatrixZN::zeros(a.modulus(), 2, 2), MatrixZN::identity(a.modulus(), 2)],
        )
        .unwrap();
        assert_eq!(iso_fingerprint(&m, 2), iso_fingerprint(&pontryagin_dual(&m), 2));
    }

    #[test]
    fn invariant_under_change_of_basis() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let a = Ambient::new(2, 2, 1, 1).unwrap();
            let m = random_finmod(&mut rng, a, &RandomModuleParams::default());
            let u = random_unimodular(&mut rng, &m);
            let c = m.conjugate(&u).unwrap();
            assert_eq!(iso_fingerprint(&m, 2), iso_fingerprint(&c, 2));
        }
    }
}
