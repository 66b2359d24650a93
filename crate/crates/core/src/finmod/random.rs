use rand::Rng;

use super::{Ambient, FinMod};
use crate::exactlin::MatrixZN;

#[derive(Clone, Debug)]
pub struct RandomModuleParams {
    /// Upper bound for log_p |M|.
    pub max_log_size: u32,
    pub max_blocks: usize,
    pub max_block_rank: usize,
}

impl Default for RandomModuleParams {
    fn default() -> Self {
        Self {
            max_log_size: 8,
            max_blocks: 2,
            max_block_rank: 3,
        }
    }
}

/// A random matrix `E` with `E mod p` nilpotent that is a well-defined
/// endomorphism of `⊕ Z/o_i`.
fn nilpotent_like<R: Rng>(rng: &mut R, amb: Ambient, orders: &[u64]) -> MatrixZN {
    let md = amb.modulus();
    let k = orders.len();
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by_key(|&i| (orders[i], i));
    let mut pos = vec![0; k];
    for (r, &i) in idx.iter().enumerate() {
        pos[i] = r;
    }
    let mut e = MatrixZN::zeros(md, k, k);
    for i in 0..k {
        for j in 0..k {
            let (oi, oj) = (orders[i], orders[j]);
            let x = if pos[i] < pos[j] {
                rng.gen_range(0..oi)
            } else {
                let step = amb.p * (oi / oi.min(oj));
                step * rng.gen_range(0..oi)
            };
            e.set(i, j, x % oi);
        }
    }
    e
}

fn poly_no_constant<R: Rng>(rng: &mut R, m: &FinMod, e: &MatrixZN) -> MatrixZN {
    let pa = m.modulus().value();
    let e2 = m.compose(e, e);
    let c1 = m.scalar(rng.gen_range(0..pa));
    let c2 = m.scalar(rng.gen_range(0..pa));
    m.add(&m.compose(&c1, e), &m.compose(&c2, &e2))
}

pub fn random_finmod<R: Rng>(rng: &mut R, amb: Ambient, params: &RandomModuleParams) -> FinMod {
    let nblocks = rng.gen_range(1..=params.max_blocks.max(1));
    let mut budget = params.max_log_size.max(1);
    let mut blocks = Vec::new();
    for _ in 0..nblocks {
        if budget == 0 {
            break;
        }
        let rank = rng.gen_range(1..=params.max_block_rank.max(1));
        let mut exps = Vec::new();
        for _ in 0..rank {
            let hi = amb.a.min(budget);
            if hi == 0 {
                break;
            }
            let e = rng.gen_range(1..=hi);
            budget -= e;
            exps.push(e);
        }
        exps.sort_unstable();
        let orders: Vec<u64> = exps.iter().map(|&e| amb.p.pow(e)).collect();
        let shell = FinMod::from_parts_unchecked(
            amb,
            orders.clone(),
            vec![MatrixZN::zeros(amb.modulus(), orders.len(), orders.len()); amb.n_ops()],
        );
        let e = nilpotent_like(rng, amb, &orders);
        let mut ops = Vec::new();
        for i in 0..amb.n_ops() {
            let q = poly_no_constant(rng, &shell, &e);
            ops.push(if amb.is_group_op(i) {
                shell.add(&shell.identity(), &q)
            } else {
                q
            });
        }
        blocks.push(FinMod::from_parts(amb, orders, ops).expect("polynomials in one operator commute"));
    }
    FinMod::direct_sum(&blocks.iter().collect::<Vec<_>>()).expect("nonempty")
}

/// Random invertible change of basis for `m`.
pub fn random_unimodular<R: Rng>(rng: &mut R, m: &FinMod) -> MatrixZN {
    let e = nilpotent_like(rng, m.ambient(), m.factors());
    m.add(&m.identity(), &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_modules_are_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (p, a, t, s) in [(2, 3, 1, 1), (3, 2, 2, 0), (2, 2, 0, 2), (3, 1, 0, 0)] {
            let amb = Ambient::new(p, a, t, s).unwrap();
            for _ in 0..10 {
                let m = random_finmod(&mut rng, amb, &RandomModuleParams::default());
                assert!(m.log_size() <= 8);
                let re = FinMod::from_parts(amb, m.factors().to_vec(), m.ops().to_vec());
                assert!(re.is_ok());
                let u = random_unimodular(&mut rng, &m);
                assert!(m.is_automorphism(&u));
            }
        }
    }
}
