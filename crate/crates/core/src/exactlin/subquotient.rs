use super::{howell_form, kernel, smith_local, HowellForm, MatrixZN, Modulus};

/// Invariant-factor presentation of `S / T` for row spans `T ⊆ S` of `(Z/p^a)^n`.
///
/// `basis[i]` is an ambient representative of the `i`-th cyclic summand,
/// which has order `orders[i]`; orders are nondecreasing.
#[derive(Clone, Debug)]
pub struct Subquotient {
    modulus: Modulus,
    span: HowellForm,
    v: MatrixZN,
    kept: Vec<usize>,
    pub basis: Vec<Vec<u64>>,
    pub orders: Vec<u64>,
}

impl Subquotient {
    /// `gens` span `S`; `rels` span `T`. Relations outside `S` are added to `S`.
    pub fn new(modulus: Modulus, ambient_dim: usize, gens: &[Vec<u64>], rels: &[Vec<u64>]) -> Self {
        let all: Vec<Vec<u64>> = gens.iter().chain(rels).cloned().collect();
        let span = howell_form(&MatrixZN::from_u64_rows(modulus, ambient_dim, &all));
        let m = span.form.rows();
        let k = kernel(&span.form);
        let mut rel_rows: Vec<Vec<u64>> = rels
            .iter()
            .map(|r| span.reduce(r).expect("relation lies in the span"))
            .collect();
        rel_rows.extend(k.row_vecs());
        let lmat = MatrixZN::from_u64_rows(modulus, m, &rel_rows);
        let sm = smith_local(&lmat);
        let a = modulus.exponent();
        let mut kept = Vec::new();
        let mut orders = Vec::new();
        for i in 0..m {
            let val = sm.valuations.get(i).copied().unwrap_or(a).min(a);
            if val > 0 {
                kept.push(i);
                orders.push(modulus.p_pow(val));
            }
        }
        let basis = kept.iter().map(|&i| span.form.left_apply(sm.v_inv.row(i))).collect();
        Self {
            modulus,
            span,
            v: sm.v,
            kept,
            basis,
            orders,
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    /// log_p of the cardinality.
    pub fn log_size(&self) -> u32 {
        self.orders
            .iter()
            .map(|&o| o.trailing_zeros_p(self.modulus.prime()))
            .sum()
    }

    /// Coordinates of `s ∈ S` in the cyclic basis; `None` when `s ∉ S`.
    pub fn coords(&self, s: &[u64]) -> Option<Vec<u64>> {
        let c = self.span.reduce(s)?;
        if c.is_empty() {
            return Some(Vec::new());
        }
        let y = self.v.left_apply(&c);
        Some(self.kept.iter().zip(&self.orders).map(|(&i, &o)| y[i] % o).collect())
    }

    /// Ambient representative of a coordinate vector.
    pub fn lift(&self, c: &[u64]) -> Vec<u64> {
        let n = self.span.form.cols();
        let mut out = vec![0u64; n];
        for (b, &x) in self.basis.iter().zip(c) {
            if x == 0 {
                continue;
            }
            for (o, &y) in out.iter_mut().zip(b) {
                *o = self.modulus.add(*o, self.modulus.mul(x, y));
            }
        }
        out
    }
}

trait PAdicLog {
    fn trailing_zeros_p(self, p: u64) -> u32;
}

impl PAdicLog for u64 {
    fn trailing_zeros_p(mut self, p: u64) -> u32 {
        let mut e = 0;
        while self > 1 && self.is_multiple_of(p) {
            self /= p;
            e += 1;
        }
        e
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::enumerate_row_span;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn z4_mod_2z4() {
        let md = Modulus::new(4).unwrap();
        let q = Subquotient::new(md, 1, &[vec![1]], &[vec![2]]);
        assert_eq!(q.orders, vec![2]);
        assert_eq!(q.coords(&[3]), Some(vec![1]));
        assert_eq!(q.coords(&[2]), Some(vec![0]));
    }

    #[test]
    fn quotient_sizes_match_enumeration() {
        let md = Modulus::new(8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let gens: Vec<Vec<u64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..8)).collect()).collect();
            let rels: Vec<Vec<u64>> = (0..2)
                .map(|_| {
                    let c: Vec<u64> = (0..3).map(|_| rng.gen_range(0..8)).collect();
                    MatrixZN::from_u64_rows(md, 3, &gens).left_apply(&c)
                })
                .collect();
            let q = Subquotient::new(md, 3, &gens, &rels);
            let s = enumerate_row_span(&MatrixZN::from_u64_rows(md, 3, &gens)).len() as u64;
            let t = enumerate_row_span(&MatrixZN::from_u64_rows(md, 3, &rels)).len() as u64;
            assert_eq!(s / t, 2u64.pow(q.log_size()));
            for w in q.orders.windows(2) {
                assert!(w[0] <= w[1]);
            }
            // lift then coords is the identity on coordinates
            for (i, &o) in q.orders.iter().enumerate() {
                let mut c = vec![0; q.len()];
                c[i] = 1 % o;
                assert_eq!(q.coords(&q.lift(&c)).unwrap(), c);
            }
            // relations map to zero
            for r in &rels {
                assert!(q.coords(r).unwrap().iter().all(|&x| x == 0));
            }
        }
    }
}
