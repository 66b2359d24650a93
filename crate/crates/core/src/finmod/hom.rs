use super::{Ambient, FinMod, ModMap};
use crate::error::{Error, Result};
use crate::exactlin::{MatrixZN, Subquotient};

/// `Hom_R(M, N)` for `R = Z_p[[X_1..X_t]]`, with `X` acting by
/// post-composition and the group by conjugation `γ_N ∘ φ ∘ γ_M^{-1}`.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub module: FinMod,
    source: FinMod,
    target: FinMod,
    /// `(k, i, g)`: the additive generator `ε_i ↦ (f_k / g) ζ_k` of order `g`.
    slots: Vec<(usize, usize, u64)>,
    sq: Subquotient,
}

impl HomModule {
    fn to_slot_coords(&self, phi: &MatrixZN) -> Vec<u64> {
        let f = self.target.factors();
        self.slots
            .iter()
            .map(|&(k, i, g)| {
                let step = f[k] / g;
                let x = phi.get(k, i) % f[k];
                debug_assert_eq!(x % step, 0, "matrix is not a well-defined map");
                (x / step) % g
            })
            .collect()
    }

    fn from_slot_coords(&self, c: &[u64]) -> MatrixZN {
        let md = self.source.modulus();
        let f = self.target.factors();
        let mut phi = MatrixZN::zeros(md, self.target.rank(), self.source.rank());
        for (&(k, i, g), &x) in self.slots.iter().zip(c) {
            phi.set(k, i, (x % g) * (f[k] / g));
        }
        phi
    }

    /// Matrix of the map represented by a coordinate vector of `module`.
    pub fn map_of(&self, coords: &[u64]) -> ModMap {
        let c = self.sq.lift(coords);
        ModMap::new_unchecked(self.source.clone(), self.target.clone(), self.from_slot_coords(&c)).expect("shape")
    }

    /// Coordinates of an `R`-linear map in `module`; `None` if it is not `R`-linear.
    pub fn coords_of_map(&self, phi: &ModMap) -> Option<Vec<u64>> {
        self.sq.coords(&self.to_slot_coords(phi.matrix()))
    }
}

pub fn hom_module(m: &FinMod, n: &FinMod) -> Result<HomModule> {
    if m.ambient() != n.ambient() {
        return Err(Error::AmbientMismatch(
            "Hom between modules over different rings".into(),
        ));
    }
    let amb = m.ambient();
    let md = amb.modulus();
    let mut slots = Vec::new();
    for (k, &fk) in n.factors().iter().enumerate() {
        for (i, &oi) in m.factors().iter().enumerate() {
            let g = gcd(fk, oi);
            if g > 1 {
                slots.push((k, i, g));
            }
        }
    }
    let plain = Ambient::new(amb.p, amb.a, 0, 0)?;
    let dim = slots.len();
    let h_orders: Vec<u64> = slots.iter().map(|s| s.2).collect();
    let mut hom = HomModule {
        module: FinMod::zero(amb),
        source: m.clone(),
        target: n.clone(),
        slots,
        sq: Subquotient::new(md, dim, &[], &[]),
    };
    if dim == 0 {
        return Ok(hom);
    }
    let h = FinMod::from_parts_unchecked(plain, h_orders.clone(), vec![]);

    // R-linearity: φ ↦ (X_N φ − φ X_M)_i has kernel Hom_R(M, N)
    let basis: Vec<MatrixZN> = (0..dim)
        .map(|e| {
            let mut c = vec![0; dim];
            c[e] = 1;
            hom.from_slot_coords(&c)
        })
        .collect();
    let tgt = h.power_sum(amb.t);
    let mut lin = MatrixZN::zeros(md, tgt.rank(), dim);
    for (e, phi) in basis.iter().enumerate() {
        for i in 0..amb.t {
            let lhs = n.op(i).mul(phi)?;
            let rhs = phi.mul(m.op(i))?;
            let diff = super::reduce_rows(&lhs.sub(&rhs)?, n.factors());
            for (r, x) in hom.to_slot_coords(&diff).into_iter().enumerate() {
                lin.set(i * dim + r, e, x);
            }
        }
    }
    let lmap = ModMap::new_unchecked(h.clone(), tgt, lin)?;
    let (_, sq) = h.subquotient(&lmap.kernel_rows(), &[]);
    hom.sq = sq;

    let ginv: Vec<MatrixZN> = (0..amb.s).map(|j| m.inverse(m.gamma(j))).collect::<Result<_>>()?;
    let rank = hom.sq.len();
    let mut ops = Vec::new();
    for idx in 0..amb.n_ops() {
        let mut op = MatrixZN::zeros(md, rank, rank);
        for b in 0..rank {
            let mut e = vec![0; rank];
            e[b] = 1;
            let phi = hom.from_slot_coords(&hom.sq.lift(&e));
            let acted = if amb.is_group_op(idx) {
                n.op(idx).mul(&phi)?.mul(&ginv[idx - amb.t])?
            } else {
                n.op(idx).mul(&phi)?
            };
            let acted = super::reduce_rows(&acted, n.factors());
            let c = hom
                .sq
                .coords(&hom.to_slot_coords(&acted))
                .expect("Hom_R is stable under the operators");
            for (r, &x) in c.iter().enumerate() {
                op.set(r, b, x);
            }
        }
        ops.push(op);
    }
    hom.module = FinMod::from_parts_unchecked(amb, hom.sq.orders.clone(), ops);
    Ok(hom)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(orders: Vec<u64>) -> FinMod {
        let a = Ambient::new(2, 2, 0, 0).unwrap();
        FinMod::from_parts(a, orders, vec![]).unwrap()
    }

    #[test]
    fn hom_examples() {
        assert_eq!(
            hom_module(&group(vec![2]), &group(vec![4])).unwrap().module.factors(),
            &[2]
        );
        assert_eq!(
            hom_module(&group(vec![4]), &group(vec![4])).unwrap().module.factors(),
            &[4]
        );
        assert!(hom_module(&group(vec![4]), &group(vec![])).unwrap().module.is_zero());
    }

    #[test]
    fn linearity_cuts_down_hom() {
        // Z/2 ⊕ Z/2 with X the swap: Hom_R(M, M) is the centralizer, of order 4
        let a = Ambient::new(2, 1, 1, 0).unwrap();
        let md = a.modulus();
        let m = FinMod::from_parts(
            a,
            vec![2, 2],
            vec![MatrixZN::from_rows(md, 2, &[vec![0, 1], vec![1, 0]]).unwrap()],
        )
        .unwrap();
        let h = hom_module(&m, &m).unwrap();
        assert_eq!(h.module.log_size(), 2);
        let id = ModMap::identity(&m);
        let c = h.coords_of_map(&id).unwrap();
        assert_eq!(h.map_of(&c).matrix(), id.matrix());
    }
}
