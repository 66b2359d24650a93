//! Multigraded Koszul computations over `F_p[x_1..x_n]` for ideals
//! generated by pure powers of variables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{is_prime, rank_mod_p};

/// `x_var^exp`, variables numbered from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PurePower {
    pub var: usize,
    pub exp: u32,
}

/// `R/I` and `R/J` over `R = F_p[x_1..x_n]`, truncated at total degree `bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedQuotient {
    pub p: u64,
    pub n: usize,
    pub ideal_i: Vec<PurePower>,
    pub ideal_j: Vec<PurePower>,
    pub bound: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Requires generators on pairwise distinct variables within and across the ideals.
    Certified,
    /// Any pure powers; used to exhibit what fails without the split hypothesis.
    Oracle,
}

impl GradedQuotient {
    pub fn new(
        p: u64,
        n: usize,
        ideal_i: Vec<PurePower>,
        ideal_j: Vec<PurePower>,
        bound: usize,
        mode: Mode,
    ) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrimePower(p));
        }
        for g in ideal_i.iter().chain(&ideal_j) {
            if g.var >= n {
                return Err(Error::Precondition(format!(
                    "x{} is not one of the {n} variables",
                    g.var + 1
                )));
            }
            if g.exp == 0 {
                return Err(Error::Precondition("a pure power of exponent 0 is a unit".into()));
            }
        }
        if mode == Mode::Certified {
            let mut vars: Vec<usize> = ideal_i.iter().chain(&ideal_j).map(|g| g.var).collect();
            vars.sort_unstable();
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NotCertified(
                    "generators must use pairwise distinct variables".into(),
                ));
            }
        }
        Ok(Self {
            p,
            n,
            ideal_i,
            ideal_j,
            bound,
        })
    }

    /// Same data with the roles of `I` and `J` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            ideal_i: self.ideal_j.clone(),
            ideal_j: self.ideal_i.clone(),
            ..self.clone()
        }
    }
}

fn in_ideal(gens: &[PurePower], alpha: &[u32]) -> bool {
    gens.iter().any(|g| alpha[g.var] >= g.exp)
}

/// Exponent vectors of total degree `d` in `n` variables, lexicographic.
pub fn multidegrees(n: usize, d: usize) -> Vec<Vec<u32>> {
    fn go(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for x in (0..=d).rev() {
            prefix.push(x);
            go(n, d - x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(vec![]);
        }
        return out;
    }
    go(n, d as u32, &mut Vec::new(), &mut out);
    out
}

/// `dim_{F_p} H_q` of `K_•(I-generators) ⊗ R/J` in multidegree `alpha`, for all `q`.
fn koszul_homology_at(gq: &GradedQuotient, alpha: &[u32]) -> Vec<usize> {
    let r = gq.ideal_i.len();
    // basis of K_q ⊗ R/J in degree alpha: subsets S with alpha − deg(S) ≥ 0 outside J
    let mut basis: Vec<Vec<u32>> = vec![Vec::new(); r + 1];
    for mask in 0u32..(1 << r) {
        let mut beta = alpha.to_vec();
        let mut ok = true;
        for (i, g) in gq.ideal_i.iter().enumerate() {
            if mask >> i & 1 == 1 {
                if beta[g.var] < g.exp {
                    ok = false;
                    break;
                }
                beta[g.var] -= g.exp;
            }
        }
        if ok && !in_ideal(&gq.ideal_j, &beta) {
            basis[mask.count_ones() as usize].push(mask);
        }
    }
    let p = gq.p;
    let mut ranks = vec![0usize; r + 2];
    for q in 1..=r {
        if basis[q].is_empty() || basis[q - 1].is_empty() {
            continue;
        }
        // rows: source basis elements, columns: target basis elements
        let mut rows: Vec<Vec<u64>> = basis[q]
            .iter()
            .map(|&s| {
                let mut row = vec![0u64; basis[q - 1].len()];
                let mut seen = 0;
                for i in 0..r {
                    if s >> i & 1 == 1 {
                        let t = s & !(1 << i);
                        if let Ok(pos) = basis[q - 1].binary_search(&t) {
                            row[pos] = if seen % 2 == 0 { 1 } else { p - 1 };
                        }
                        seen += 1;
                    }
                }
                row
            })
            .collect();
        ranks[q] = rank_mod_p(p, &mut rows);
    }
    (0..=r).map(|q| basis[q].len() - ranks[q] - ranks[q + 1]).collect()
}

/// `dim Tor_q(R/I, R/J)` in each total degree `0..=bound`, for `q = 0..=|I|`.
pub fn graded_tor_table(gq: &GradedQuotient) -> Vec<Vec<usize>> {
    let r = gq.ideal_i.len();
    let mut table = vec![vec![0usize; gq.bound + 1]; r + 1];
    for d in 0..=gq.bound {
        for alpha in multidegrees(gq.n, d) {
            for (q, h) in koszul_homology_at(gq, &alpha).into_iter().enumerate() {
                table[q][d] += h;
            }
        }
    }
    table
}

/// `dim Tor_q(R/I, R/J)` in each total degree `0..=bound`.
pub fn graded_tor(gq: &GradedQuotient, q: usize) -> Vec<usize> {
    graded_tor_table(gq)
        .get(q)
        .cloned()
        .unwrap_or_else(|| vec![0; gq.bound + 1])
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeComparison {
    pub degree: usize,
    pub intersection: usize,
    pub product: usize,
}

/// Monomial counts of `I ∩ J` and `IJ` in each total degree.
pub fn intersection_vs_product(gq: &GradedQuotient) -> Vec<DegreeComparison> {
    (0..=gq.bound)
        .map(|d| {
            let mut intersection = 0;
            let mut product = 0;
            for alpha in multidegrees(gq.n, d) {
                if in_ideal(&gq.ideal_i, &alpha) && in_ideal(&gq.ideal_j, &alpha) {
                    intersection += 1;
                }
                let divisible = gq.ideal_i.iter().any(|a| {
                    gq.ideal_j.iter().any(|b| {
                        let mut need = vec![0u32; gq.n];
                        need[a.var] += a.exp;
                        need[b.var] += b.exp;
                        need.iter().zip(&alpha).all(|(x, y)| x <= y)
                    })
                });
                if divisible {
                    product += 1;
                }
            }
            DegreeComparison {
                degree: d,
                intersection,
                product,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pp(var: usize, exp: u32) -> PurePower {
        PurePower { var, exp }
    }

    #[test]
    fn split_pair_has_no_higher_tor() {
        let gq = GradedQuotient::new(2, 2, vec![pp(0, 2)], vec![pp(1, 3)], 10, Mode::Certified).unwrap();
        assert!(graded_tor(&gq, 1).iter().all(|&x| x == 0));
        assert_eq!(graded_tor(&gq, 0), vec![1, 2, 2, 1, 0, 0, 0, 0, 0, 0, 0]);
        assert!(intersection_vs_product(&gq).iter().all(|c| c.intersection == c.product));
    }

    #[test]
    fn overlap_needs_oracle_mode() {
        assert!(GradedQuotient::new(2, 1, vec![pp(0, 1)], vec![pp(0, 1)], 4, Mode::Certified).is_err());
        let gq = GradedQuotient::new(2, 1, vec![pp(0, 1)], vec![pp(0, 1)], 4, Mode::Oracle).unwrap();
        // Tor_1(R/(x), R/(x)) = R/(x) shifted to degree 1
        assert_eq!(graded_tor(&gq, 1), vec![0, 1, 0, 0, 0]);
        let cmp = intersection_vs_product(&gq);
        assert_eq!((cmp[1].intersection, cmp[1].product), (1, 0));
    }

    #[test]
    fn one_against_two_variables() {
        let gq = GradedQuotient::new(3, 3, vec![pp(0, 1)], vec![pp(1, 1), pp(2, 1)], 6, Mode::Certified).unwrap();
        assert!(intersection_vs_product(&gq).iter().all(|c| c.intersection == c.product));
    }

    #[test]
    fn multidegree_counts() {
        assert_eq!(multidegrees(3, 2).len(), 6);
        assert_eq!(multidegrees(1, 5), vec![vec![5]]);
    }

    proptest! {
        #[test]
        fn tor_is_symmetric(ei in proptest::collection::vec(0u32..3, 3), ej in proptest::collection::vec(0u32..3, 3), p in prop_oneof![Just(2u64), Just(3)]) {
            let i: Vec<PurePower> = ei.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| pp(v, e)).collect();
            let j: Vec<PurePower> = ej.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| pp(v, e)).collect();
            let gq = GradedQuotient::new(p, 3, i, j, 7, Mode::Oracle).unwrap();
            let a = graded_tor_table(&gq);
            let b = graded_tor_table(&gq.swapped());
            for q in 0..a.len().max(b.len()) {
                let zero = vec![0; 8];
                prop_assert_eq!(a.get(q).unwrap_or(&zero), b.get(q).unwrap_or(&zero));
            }
            let tor1_zero = a.get(1).is_none_or(|t| t.iter().all(|&x| x == 0));
            let equal = intersection_vs_product(&gq).iter().all(|c| c.intersection == c.product);
            prop_assert_eq!(tor1_zero, equal);
        }
    }
}
