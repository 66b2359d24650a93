use super::{MatrixZN, Modulus};
use crate::error::{Error, Result};

/// Howell normal form of a row span over `Z/p^a`.
///
/// `transform · input = form` holds exactly; `pivots[r] = (column, valuation)`
/// for row `r` of the form.
#[derive(Clone, Debug)]
pub struct HowellForm {
    pub form: MatrixZN,
    pub transform: MatrixZN,
    pub pivots: Vec<(usize, u32)>,
}

struct TrackedRow {
    row: Vec<u64>,
    coef: Vec<u64>,
}

impl TrackedRow {
    fn axpy(&mut self, m: &Modulus, q: u64, other: &TrackedRow) {
        if q == 0 {
            return;
        }
        for (x, &y) in self.row.iter_mut().zip(&other.row) {
            *x = m.sub(*x, m.mul(q, y));
        }
        for (x, &y) in self.coef.iter_mut().zip(&other.coef) {
            *x = m.sub(*x, m.mul(q, y));
        }
    }

    fn scaled(&self, m: &Modulus, c: u64) -> TrackedRow {
        TrackedRow {
            row: self.row.iter().map(|&x| m.mul(x, c)).collect(),
            coef: self.coef.iter().map(|&x| m.mul(x, c)).collect(),
        }
    }

    fn is_zero(&self) -> bool {
        self.row.iter().all(|&x| x == 0)
    }
}

/// Canonical generating set of the row span of `m`.
pub fn howell_form(m: &MatrixZN) -> HowellForm {
    let modulus = m.modulus();
    let a = modulus.exponent();
    let (nr, nc) = (m.rows(), m.cols());
    let mut pending: Vec<TrackedRow> = (0..nr)
        .map(|i| {
            let mut coef = vec![0; nr];
            coef[i] = 1 % modulus.value();
            TrackedRow {
                row: m.row(i).to_vec(),
                coef,
            }
        })
        .filter(|r| !r.is_zero())
        .collect();
    let mut done: Vec<TrackedRow> = Vec::new();
    let mut pivots = Vec::new();

    for col in 0..nc {
        let best = pending
            .iter()
            .enumerate()
            .filter(|(_, r)| r.row[col] != 0)
            .min_by_key(|(_, r)| modulus.valuation(r.row[col]))
            .map(|(i, _)| i);
        let Some(best) = best else { continue };
        let pivot = pending.swap_remove(best);
        let (v, inv) = modulus.normalizer(pivot.row[col]);
        let pivot = pivot.scaled(&modulus, inv);
        let pv = modulus.p_pow(v);
        for r in pending.iter_mut() {
            let e = r.row[col];
            if e != 0 {
                r.axpy(&modulus, e / pv, &pivot);
            }
        }
        pending.retain(|r| !r.is_zero());
        if v > 0 {
            let extra = pivot.scaled(&modulus, modulus.p_pow(a - v));
            if !extra.is_zero() {
                pending.push(extra);
            }
        }
        pivots.push((col, v));
        done.push(pivot);
    }
    debug_assert!(pending.is_empty());

    // entries above each pivot are reduced into [0, p^v)
    for r in 0..done.len() {
        let (col, v) = pivots[r];
        let pv = modulus.p_pow(v);
        let (upper, lower) = done.split_at_mut(r);
        let prow = &lower[0];
        for u in upper.iter_mut() {
            let q = u.row[col] / pv;
            u.axpy(&modulus, q, prow);
        }
    }

    let form = MatrixZN::from_u64_rows(modulus, nc, &done.iter().map(|r| r.row.clone()).collect::<Vec<_>>());
    let transform = MatrixZN::from_u64_rows(modulus, nr, &done.iter().map(|r| r.coef.clone()).collect::<Vec<_>>());
    HowellForm {
        form,
        transform,
        pivots,
    }
}

impl HowellForm {
    /// Coefficients `c` (indexed by rows of the form) with `c · form = v`,
    /// or `None` when `v` is outside the span.
    pub fn reduce(&self, v: &[u64]) -> Option<Vec<u64>> {
        let modulus = self.form.modulus();
        let mut w = v.to_vec();
        let mut coef = vec![0u64; self.form.rows()];
        for (r, &(col, val)) in self.pivots.iter().enumerate() {
            let e = w[col];
            if e == 0 {
                continue;
            }
            let pv = modulus.p_pow(val);
            if !e.is_multiple_of(pv) {
                return None;
            }
            let q = e / pv;
            for (j, x) in w.iter_mut().enumerate().skip(col) {
                *x = modulus.sub(*x, modulus.mul(q, self.form.get(r, j)));
            }
            coef[r] = q;
        }
        w.iter().all(|&x| x == 0).then_some(coef)
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).is_some()
    }

    /// log_p of the size of the row span.
    pub fn log_size(&self) -> u32 {
        let a = self.form.modulus().exponent();
        self.pivots.iter().map(|&(_, v)| a - v).sum()
    }
}

/// Rows generating `{v : v · m = 0}`.
pub fn kernel(m: &MatrixZN) -> MatrixZN {
    let modulus = m.modulus();
    let aug = m
        .hstack(&MatrixZN::identity(modulus, m.rows()))
        .expect("same row count");
    let h = howell_form(&aug);
    let rows: Vec<Vec<u64>> = (0..h.form.rows())
        .filter(|&r| h.pivots[r].0 >= m.cols())
        .map(|r| h.form.row(r)[m.cols()..].to_vec())
        .collect();
    MatrixZN::from_u64_rows(modulus, m.rows(), &rows)
}

/// Some `x` with `x · a = b`, if one exists.
pub fn solve(a: &MatrixZN, b: &[u64]) -> Result<Option<Vec<u64>>> {
    if b.len() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has length {}, matrix has {} columns",
            b.len(),
            a.cols()
        )));
    }
    let h = howell_form(a);
    Ok(h.reduce(b).map(|c| h.transform.left_apply(&c)))
}

/// Rank over the prime field `Z/p` of a small dense matrix given by rows.
pub fn rank_mod_p(p: u64, rows: &mut [Vec<u64>]) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][col].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = modinv_small(rows[rank][col] % p, p);
        for x in rows[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..rows.len() {
            if i != rank {
                let f = rows[i][col] % p;
                if f != 0 {
                    for j in 0..ncols {
                        rows[i][j] = (rows[i][j] + (p - f) * rows[rank][j]) % p;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

fn modinv_small(x: u64, p: u64) -> u64 {
    let (_, inv, _) = super::ext_gcd(x as i128, p as i128);
    inv.rem_euclid(p as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::enumerate_row_span;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m8() -> Modulus {
        Modulus::new(8).unwrap()
    }

    #[test]
    fn identity_is_its_own_form() {
        let id = MatrixZN::identity(m8(), 3);
        let h = howell_form(&id);
        assert_eq!(h.form, id);
    }

    #[test]
    fn zero_matrix_has_empty_form() {
        let z = MatrixZN::zeros(m8(), 3, 4);
        assert_eq!(howell_form(&z).form.rows(), 0);
    }

    #[test]
    fn random_forms_match_brute_force_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let rows: Vec<Vec<i64>> = (0..3).map(|_| (0..4).map(|_| rng.gen_range(0..8)).collect()).collect();
            let m = MatrixZN::from_rows(m8(), 4, &rows).unwrap();
            let h = howell_form(&m);
            assert_eq!(enumerate_row_span(&h.form), enumerate_row_span(&m));
            assert_eq!(h.transform.mul(&m).unwrap(), h.form);
            let span = enumerate_row_span(&m);
            assert_eq!(span.len() as u64, 2u64.pow(h.log_size()));
        }
    }

    #[test]
    fn form_is_canonical_for_equal_spans() {
        let a = MatrixZN::from_rows(m8(), 2, &[vec![2, 4], vec![0, 4]]).unwrap();
        let b = MatrixZN::from_rows(m8(), 2, &[vec![6, 0], vec![2, 0], vec![0, 4], vec![4, 4]]).unwrap();
        assert_eq!(howell_form(&a).form, howell_form(&b).form);
    }

    #[test]
    fn kernel_of_multiplication_by_two() {
        let k = kernel(&MatrixZN::from_rows(m8(), 1, &[vec![2]]).unwrap());
        assert_eq!(k.row_vecs(), vec![vec![4]]);
    }

    #[test]
    fn kernel_of_p_on_z9() {
        let m9 = Modulus::new(9).unwrap();
        let k = kernel(&MatrixZN::from_rows(m9, 1, &[vec![3]]).unwrap());
        assert_eq!(k.row_vecs(), vec![vec![3]]);
    }

    #[test]
    fn kernel_of_identity_is_zero() {
        assert_eq!(kernel(&MatrixZN::identity(m8(), 3)).rows(), 0);
    }

    #[test]
    fn solve_examples() {
        let two = MatrixZN::from_rows(m8(), 1, &[vec![2]]).unwrap();
        let x = solve(&two, &[4]).unwrap().unwrap();
        assert_eq!((x[0] * 2) % 8, 4);
        assert_eq!(solve(&two, &[1]).unwrap(), None);
        let id = MatrixZN::identity(m8(), 3);
        assert_eq!(solve(&id, &[1, 5, 7]).unwrap(), Some(vec![1, 5, 7]));
        assert!(solve(&id, &[1]).is_err());
    }

    #[test]
    fn kernel_matches_enumeration_over_z8_and_z9() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [8u64, 9] {
            let md = Modulus::new(n).unwrap();
            for _ in 0..10 {
                let r = rng.gen_range(1..=3);
                let c = rng.gen_range(1..=3);
                let rows: Vec<Vec<i64>> = (0..r)
                    .map(|_| (0..c).map(|_| rng.gen_range(0..n as i64)).collect())
                    .collect();
                let m = MatrixZN::from_rows(md, c, &rows).unwrap();
                let k = kernel(&m);
                let brute: std::collections::BTreeSet<Vec<u64>> = all_vectors(n, r)
                    .into_iter()
                    .filter(|v| m.left_apply(v).iter().all(|&x| x == 0))
                    .collect();
                if k.rows() == 0 {
                    assert_eq!(brute.len(), 1);
                } else {
                    assert_eq!(enumerate_row_span(&k), brute);
                }
            }
        }
    }

    fn all_vectors(n: u64, len: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..n).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn rank_over_prime_field() {
        let mut rows = vec![vec![1, 2, 0], vec![2, 4, 0], vec![0, 1, 1]];
        assert_eq!(rank_mod_p(3, &mut rows), 2);
    }
}
