use super::{Ambient, FinMod, SeqElement};
use crate::error::{Error, Result};
use crate::exactlin::MatrixZN;

/// `Λ / (p^c, X_i^{c_i}, γ_j^{p^{b_j}} − 1)` on its monomial basis `X^α γ^β`.
#[derive(Clone, Debug)]
pub struct StructureQuotient {
    pub module: FinMod,
    /// Exponent vector `(α_1..α_t, β_1..β_s)` of each basis element.
    pub monomials: Vec<Vec<u64>>,
}

/// Requires exactly one `P`, one `V_i` per variable and one `G_j` per
/// generator; everything else has infinite quotient.
pub fn structure_quotient(amb: Ambient, seq: &[SeqElement]) -> Result<StructureQuotient> {
    let mut c = None;
    let mut vs = vec![None; amb.t];
    let mut gs = vec![None; amb.s];
    for e in seq {
        let slot = match *e {
            SeqElement::P(x) => c.replace(x).is_some(),
            SeqElement::V(i, x) if (1..=amb.t).contains(&i) => vs[i - 1].replace(x).is_some(),
            SeqElement::G(j, b) if (1..=amb.s).contains(&j) => gs[j - 1].replace(b).is_some(),
            _ => {
                return Err(Error::Unrealizable(format!(
                    "{e} is not an element of the ambient ring"
                )))
            }
        };
        if slot {
            return Err(Error::Precondition(format!("{e} repeats a variable")));
        }
    }
    let c = c.ok_or_else(|| Error::Precondition("sequence needs a power of p".into()))?;
    let vs: Vec<u32> = vs
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("sequence needs a power of every X_i".into()))?;
    let gs: Vec<u32> = gs
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("sequence needs an element for every γ_j".into()))?;
    if c > amb.a {
        return Err(Error::Precondition(format!(
            "p^{c} exceeds the precision p^{} of the ambient ring",
            amb.a
        )));
    }
    let ranges: Vec<u64> = vs
        .iter()
        .map(|&v| v as u64)
        .chain(gs.iter().map(|&b| amb.p.pow(b)))
        .collect();
    let dim: u64 = if c == 0 { 0 } else { ranges.iter().product() };
    if dim > 4096 {
        return Err(Error::RingTooLarge(format!("quotient has {dim} monomials")));
    }
    let mut monomials: Vec<Vec<u64>> = vec![vec![]];
    for &r in &ranges {
        monomials = monomials
            .into_iter()
            .flat_map(|m| {
                (0..r).map(move |x| {
                    let mut m2 = m.clone();
                    m2.push(x);
                    m2
                })
            })
            .collect();
    }
    if dim == 0 {
        monomials.clear();
    }
    let index = |e: &[u64]| -> usize {
        let mut idx = 0usize;
        for (x, r) in e.iter().zip(&ranges) {
            idx = idx * (*r as usize) + *x as usize;
        }
        idx
    };
    let md = amb.modulus();
    let n = monomials.len();
    let mut ops = Vec::new();
    for v in 0..amb.n_ops() {
        let mut op = MatrixZN::zeros(md, n, n);
        for (col, mono) in monomials.iter().enumerate() {
            let mut next = mono.clone();
            next[v] += 1;
            if next[v] == ranges[v] {
                if amb.is_group_op(v) {
                    next[v] = 0;
                } else {
                    continue;
                }
            }
            op.set(index(&next), col, 1);
        }
        ops.push(op);
    }
    let order = amb.p.pow(c);
    let module = FinMod::from_parts(amb, vec![order; n], ops)?;
    Ok(StructureQuotient { module, monomials })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_ring_of_z2() {
        let amb = Ambient::new(2, 2, 0, 1).unwrap();
        let q = structure_quotient(amb, &[SeqElement::P(2), SeqElement::G(1, 1)]).unwrap();
        assert_eq!(q.module.factors(), &[4, 4]);
        let g = q.module.gamma(0);
        assert_eq!(q.module.compose(g, g), q.module.identity());
    }

    #[test]
    fn truncated_polynomials() {
        let amb = Ambient::new(3, 1, 1, 0).unwrap();
        let q = structure_quotient(amb, &[SeqElement::V(1, 3), SeqElement::P(1)]).unwrap();
        assert_eq!(q.module.log_size(), 3);
        let x = q.module.x(0);
        assert!(!q.module.compose(x, x).is_zero());
        assert!(q.module.power(x, 3).is_zero());
    }

    #[test]
    fn incomplete_sequences_are_rejected() {
        let amb = Ambient::new(2, 2, 1, 0).unwrap();
        assert!(structure_quotient(amb, &[SeqElement::P(1)]).is_err());
        assert!(structure_quotient(amb, &[SeqElement::P(1), SeqElement::P(1), SeqElement::V(1, 1)]).is_err());
    }
}
