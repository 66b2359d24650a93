use super::{FinMod, ModMap};
use crate::exactlin::MatrixZN;

/// `⟨x, φ⟩ ∈ Q_p/Z_p`, returned as the numerator over `p^a`.
///
/// `x` is an element of `m`, `φ` an element of `Π(m)` in the dual basis
/// `χ_i(ε_j) = δ_ij / o_i`.
pub fn pairing(m: &FinMod, x: &[u64], phi: &[u64]) -> u64 {
    let md = m.modulus();
    let pa = md.value();
    let mut acc = 0u64;
    for ((&xi, &fi), &o) in x.iter().zip(phi).zip(m.factors()) {
        acc = md.add(acc, md.mul(md.mul(xi, fi), pa / o));
    }
    acc
}

/// Adjoint under the pairing: `⟨A x, φ⟩ = ⟨x, A* φ⟩`.
fn adjoint(m: &FinMod, a: &MatrixZN) -> MatrixZN {
    let md = m.modulus();
    let o = m.factors();
    let k = m.rank();
    let mut out = MatrixZN::zeros(md, k, k);
    for i in 0..k {
        for kk in 0..k {
            let x = a.get(kk, i) as u128 * o[i] as u128 / o[kk] as u128;
            out.set(i, kk, (x % o[i] as u128) as u64);
        }
    }
    out
}

/// `Π(M) = Hom(M, Q_p/Z_p)`. Variables act by adjoints; the group acts
/// from the right, `(γφ)(x) = φ(γ^{-1} x)`.
pub fn pontryagin_dual(m: &FinMod) -> FinMod {
    let amb = m.ambient();
    let ops: Vec<MatrixZN> = (0..amb.n_ops())
        .map(|i| {
            if amb.is_group_op(i) {
                let inv = m.inverse(m.op(i)).expect("group operators are invertible");
                adjoint(m, &inv)
            } else {
                adjoint(m, m.op(i))
            }
        })
        .collect();
    let dual = FinMod::from_parts_unchecked(amb, m.factors().to_vec(), ops);
    for i in 0..amb.n_ops() {
        let a = if amb.is_group_op(i) {
            m.inverse(m.op(i)).expect("invertible")
        } else {
            m.op(i).clone()
        };
        for r in 0..m.rank() {
            for c in 0..m.rank() {
                let x = m.basis_vector(c);
                let phi = m.basis_vector(r);
                let lhs = pairing(m, &m.apply(&a, &x), &phi);
                let rhs = pairing(m, &x, &dual.apply(dual.op(i), &phi));
                assert_eq!(lhs, rhs, "pairing identity fails for {}", amb.op_name(i));
            }
        }
    }
    dual
}

impl ModMap {
    /// `Π(f) : Π(N) → Π(M)`, `φ ↦ φ ∘ f`.
    pub fn pontryagin_dual(&self) -> ModMap {
        let (src, tgt) = (self.source(), self.target());
        let e = src.factors();
        let e2 = tgt.factors();
        let md = src.modulus();
        let mut g = MatrixZN::zeros(md, src.rank(), tgt.rank());
        for i in 0..src.rank() {
            for k in 0..tgt.rank() {
                let x = self.matrix().get(k, i) as u128 * e[i] as u128 / e2[k] as u128;
                g.set(i, k, (x % e[i] as u128) as u64);
            }
        }
        ModMap::new_unchecked(pontryagin_dual(tgt), pontryagin_dual(src), g).expect("shape")
    }
}

/// `M → Π(Π(M))`, `a ↦ (φ ↦ φ(a))`, assembled from pairing values.
pub fn evaluation_map(m: &FinMod) -> ModMap {
    let dual = pontryagin_dual(m);
    let ddual = pontryagin_dual(&dual);
    let md = m.modulus();
    let pa = md.value();
    let k = m.rank();
    let mut e = MatrixZN::zeros(md, k, k);
    for j in 0..k {
        let x = m.basis_vector(j);
        for (i, &o) in m.factors().iter().enumerate() {
            // coefficient of χ**_i is o_i · ⟨x, χ_i⟩
            let v = pairing(m, &x, &dual.basis_vector(i));
            e.set(i, j, (v as u128 * o as u128 / pa as u128) as u64 % o);
        }
    }
    ModMap::new_unchecked(m.clone(), ddual, e).expect("shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finmod::{random_finmod, Ambient, RandomModuleParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dual_of_trivial_z4() {
        let a = Ambient::new(2, 2, 0, 1).unwrap();
        let m = FinMod::cyclic_trivial(a, 4).unwrap();
        assert_eq!(pontryagin_dual(&m), m);
    }

    #[test]
    fn dual_keeps_factors_and_pairs_correctly() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let a = Ambient::new(2, 3, 1, 1).unwrap();
            let m = random_finmod(&mut rng, a, &RandomModuleParams::default());
            let d = pontryagin_dual(&m);
            assert_eq!(d.factors(), m.factors());
            assert_eq!(d.log_size(), m.log_size());
            // random elements, not just basis pairs
            let x: Vec<u64> = m.factors().iter().map(|&o| rng.gen_range(0..o)).collect();
            let phi: Vec<u64> = m.factors().iter().map(|&o| rng.gen_range(0..o)).collect();
            let lhs = pairing(&m, &m.apply(m.x(0), &x), &phi);
            let rhs = pairing(&m, &x, &d.apply(d.x(0), &phi));
            assert_eq!(lhs, rhs);
            let ev = evaluation_map(&m);
            assert!(ev.is_well_defined() && ev.is_equivariant() && ev.is_iso());
        }
    }

    #[test]
    fn dual_map_is_precomposition() {
        let a = Ambient::new(3, 2, 0, 0).unwrap();
        let m = FinMod::from_parts(a, vec![3, 9], vec![]).unwrap();
        let n = FinMod::from_parts(a, vec![9], vec![]).unwrap();
        let f = ModMap::new(
            m.clone(),
            n.clone(),
            MatrixZN::from_rows(a.modulus(), 2, &[vec![3, 2]]).unwrap(),
        )
        .unwrap();
        let g = f.pontryagin_dual();
        for phi in 0..9u64 {
            for x0 in 0..3u64 {
                for x1 in 0..9u64 {
                    let x = vec![x0, x1];
                    assert_eq!(pairing(&n, &f.apply(&x), &[phi]), pairing(&m, &x, &g.apply(&[phi])));
                }
            }
        }
    }
}
