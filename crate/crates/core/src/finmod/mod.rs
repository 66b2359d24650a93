//! Finite modules over `Λ = Z_p[[X_1..X_t]][[Z_p^s]]`.
//!
//! A module is `⊕ Z/o_i` with one matrix per named operator. Operators act
//! on column vectors: `(A x)_i = Σ_j A[i][j] x_j mod o_i`, which is well
//! defined exactly when `o_i | o_j · A[i][j]`.

mod dual;
mod fingerprint;
mod hom;
mod io;
mod quotient;
mod random;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactlin::{howell_form, is_prime, kernel, MatrixZN, Modulus, Subquotient};

pub use dual::{evaluation_map, pairing, pontryagin_dual};
pub use fingerprint::{iso_fingerprint, Fingerprint, WordRecord};
pub use hom::{hom_module, HomModule};
pub use io::ModuleDoc;
pub use quotient::{structure_quotient, StructureQuotient};
pub use random::{random_finmod, random_unimodular, RandomModuleParams};

/// `Z_p[[X_1..X_t]][[Z_p^s]]` acting on `p^a`-torsion modules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ambient {
    pub p: u64,
    pub a: u32,
    pub t: usize,
    pub s: usize,
}

impl Ambient {
    pub fn new(p: u64, a: u32, t: usize, s: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidModule(format!("{p} is not prime")));
        }
        if a == 0 {
            return Err(Error::InvalidModule("precision a must be at least 1".into()));
        }
        if (a as f64) * (p as f64).log2() > 40.0 {
            return Err(Error::InvalidModule(format!("p^a = {p}^{a} is too large")));
        }
        Ok(Self { p, a, t, s })
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::from_prime(self.p, self.a).expect("validated ambient")
    }

    pub fn with_precision(&self, a: u32) -> Result<Self> {
        Self::new(self.p, a, self.t, self.s)
    }

    pub fn n_ops(&self) -> usize {
        self.t + self.s
    }

    /// Krull dimension `t + 1 + s`.
    pub fn dimension(&self) -> usize {
        self.t + 1 + self.s
    }

    pub fn op_name(&self, i: usize) -> String {
        if i < self.t {
            format!("X{}", i + 1)
        } else {
            format!("g{}", i - self.t + 1)
        }
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        let (kind, idx) = name.split_at(1);
        let idx: usize = idx.parse().ok()?;
        match kind {
            "X" if (1..=self.t).contains(&idx) => Some(idx - 1),
            "g" if (1..=self.s).contains(&idx) => Some(self.t + idx - 1),
            _ => None,
        }
    }

    pub fn is_group_op(&self, i: usize) -> bool {
        i >= self.t
    }
}

/// Finite `Λ`-module: invariant factors plus one matrix per operator.
#[derive(Clone, PartialEq, Eq)]
pub struct FinMod {
    ambient: Ambient,
    factors: Vec<u64>,
    ops: Vec<MatrixZN>,
}

impl std::fmt::Debug for FinMod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FinMod")
            .field("factors", &self.factors)
            .field("ops", &self.ops.iter().map(|m| m.row_vecs()).collect::<Vec<_>>())
            .finish()
    }
}

/// Validated constructor; factors must form a dividing chain.
pub fn make_finmod(ambient: Ambient, factors: Vec<u64>, operators: Vec<MatrixZN>) -> Result<FinMod> {
    for w in factors.windows(2) {
        if w[1] % w[0] != 0 {
            return Err(Error::InvalidModule(format!(
                "factors {:?} do not form a dividing chain",
                factors
            )));
        }
    }
    FinMod::from_parts(ambient, factors, operators)
}

impl FinMod {
    /// Validating constructor that allows factors in any order, as they
    /// arise for direct sums.
    pub fn from_parts(ambient: Ambient, factors: Vec<u64>, operators: Vec<MatrixZN>) -> Result<Self> {
        let md = ambient.modulus();
        let pa = md.value();
        for &o in &factors {
            if o <= 1 || !pa.is_multiple_of(o) {
                return Err(Error::InvalidModule(format!(
                    "factor {o} is not a nontrivial power of {} dividing {pa}",
                    ambient.p
                )));
            }
        }
        if operators.len() != ambient.n_ops() {
            return Err(Error::InvalidModule(format!(
                "expected {} operators, got {}",
                ambient.n_ops(),
                operators.len()
            )));
        }
        let k = factors.len();
        let mut ops = Vec::with_capacity(operators.len());
        for (idx, m) in operators.into_iter().enumerate() {
            if m.rows() != k || m.cols() != k {
                return Err(Error::InvalidModule(format!(
                    "operator {} has shape {}x{}, expected {k}x{k}",
                    ambient.op_name(idx),
                    m.rows(),
                    m.cols()
                )));
            }
            let m = rebase(&m, md);
            if let Some((i, j)) = ill_defined_entry(&m, &factors, &factors) {
                return Err(Error::InvalidModule(format!(
                    "operator {} is not well defined at ({i}, {j})",
                    ambient.op_name(idx)
                )));
            }
            ops.push(reduce_rows(&m, &factors));
        }
        let module = Self { ambient, factors, ops };
        for i in 0..module.ops.len() {
            for j in i + 1..module.ops.len() {
                let ab = module.compose(&module.ops[i], &module.ops[j]);
                let ba = module.compose(&module.ops[j], &module.ops[i]);
                if ab != ba {
                    return Err(Error::InvalidModule(format!(
                        "operators {} and {} do not commute",
                        ambient.op_name(i),
                        ambient.op_name(j)
                    )));
                }
            }
        }
        for j in 0..ambient.s {
            if !module.is_automorphism(&module.ops[ambient.t + j]) {
                return Err(Error::InvalidModule(format!("operator g{} is not invertible", j + 1)));
            }
        }
        Ok(module)
    }

    /// Skips validation; for constructions whose output is correct by design.
    pub(crate) fn from_parts_unchecked(ambient: Ambient, factors: Vec<u64>, ops: Vec<MatrixZN>) -> Self {
        let ops = ops.iter().map(|m| reduce_rows(m, &factors)).collect();
        Self { ambient, factors, ops }
    }

    pub fn zero(ambient: Ambient) -> Self {
        let md = ambient.modulus();
        Self {
            ambient,
            factors: Vec::new(),
            ops: vec![MatrixZN::zeros(md, 0, 0); ambient.n_ops()],
        }
    }

    /// `Z/o` with every `X_i` acting by zero and every `γ_j` trivially.
    pub fn cyclic_trivial(ambient: Ambient, order: u64) -> Result<Self> {
        let md = ambient.modulus();
        let ops = (0..ambient.n_ops())
            .map(|i| MatrixZN::scalar(md, 1, u64::from(ambient.is_group_op(i))))
            .collect();
        Self::from_parts(ambient, vec![order], ops)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn modulus(&self) -> Modulus {
        self.ambient.modulus()
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    /// log_p of the cardinality.
    pub fn log_size(&self) -> u32 {
        self.factors.iter().map(|&o| log_p(o, self.ambient.p)).sum()
    }

    pub fn sorted_factors(&self) -> Vec<u64> {
        let mut f = self.factors.clone();
        f.sort_unstable();
        f
    }

    pub fn ops(&self) -> &[MatrixZN] {
        &self.ops
    }

    pub fn op(&self, i: usize) -> &MatrixZN {
        &self.ops[i]
    }

    pub fn x(&self, i: usize) -> &MatrixZN {
        assert!(i < self.ambient.t);
        &self.ops[i]
    }

    pub fn gamma(&self, j: usize) -> &MatrixZN {
        assert!(j < self.ambient.s);
        &self.ops[self.ambient.t + j]
    }

    pub fn operators_by_name(&self) -> BTreeMap<String, Vec<Vec<u64>>> {
        self.ops
            .iter()
            .enumerate()
            .map(|(i, m)| (self.ambient.op_name(i), m.row_vecs()))
            .collect()
    }

    pub fn identity(&self) -> MatrixZN {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> MatrixZN {
        reduce_rows(&MatrixZN::scalar(self.modulus(), self.rank(), c), &self.factors)
    }

    /// `a ∘ b` for endomorphisms.
    pub fn compose(&self, a: &MatrixZN, b: &MatrixZN) -> MatrixZN {
        reduce_rows(&a.mul(b).expect("square endomorphisms"), &self.factors)
    }

    pub fn add(&self, a: &MatrixZN, b: &MatrixZN) -> MatrixZN {
        reduce_rows(&a.add(b).expect("same shape"), &self.factors)
    }

    pub fn sub(&self, a: &MatrixZN, b: &MatrixZN) -> MatrixZN {
        reduce_rows(&a.sub(b).expect("same shape"), &self.factors)
    }

    pub fn power(&self, a: &MatrixZN, mut e: u64) -> MatrixZN {
        let mut acc = self.identity();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.compose(&base, &base);
            }
        }
        acc
    }

    /// Column action of an endomorphism on an element.
    pub fn apply(&self, a: &MatrixZN, x: &[u64]) -> Vec<u64> {
        self.reduce_vec(&a.right_apply(x))
    }

    pub fn reduce_vec(&self, x: &[u64]) -> Vec<u64> {
        x.iter().zip(&self.factors).map(|(&v, &o)| v % o).collect()
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.rank()];
        v[i] = 1;
        v
    }

    /// Rows `o_i ε_i` generating the relations inside `(Z/p^a)^k`.
    pub fn relations(&self) -> Vec<Vec<u64>> {
        let pa = self.modulus().value();
        (0..self.rank())
            .filter(|&i| self.factors[i] != pa)
            .map(|i| {
                let mut v = vec![0; self.rank()];
                v[i] = self.factors[i];
                v
            })
            .collect()
    }

    pub fn is_automorphism(&self, a: &MatrixZN) -> bool {
        let rows: Vec<Vec<u64>> = (0..self.rank()).map(|j| a.right_apply(&self.basis_vector(j))).collect();
        let q = Subquotient::new(
            self.modulus(),
            self.rank(),
            &self.identity_rows(),
            &[rows, self.relations()].concat(),
        );
        q.is_empty()
    }

    fn identity_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rank()).map(|i| self.basis_vector(i)).collect()
    }

    /// Inverse of an automorphism, by solving `a x = ε_j` column by column.
    pub fn inverse(&self, a: &MatrixZN) -> Result<MatrixZN> {
        let k = self.rank();
        let md = self.modulus();
        let mut stacked = a.transpose();
        for i in 0..k {
            let mut row = vec![0; k];
            row[i] = self.factors[i] % md.value();
            stacked = stacked
                .vstack(&MatrixZN::from_u64_rows(md, k, &[row]))
                .expect("same width");
        }
        let h = howell_form(&stacked);
        let mut inv = MatrixZN::zeros(md, k, k);
        for j in 0..k {
            let c = h
                .reduce(&self.basis_vector(j))
                .ok_or_else(|| Error::InvalidModule("operator is not invertible".into()))?;
            let x = h.transform.left_apply(&c);
            for i in 0..k {
                inv.set(i, j, x[i] % self.factors[i]);
            }
        }
        Ok(inv)
    }

    /// Presentation of `⟨gens⟩ / ⟨rels⟩` inside this module, with induced operators.
    pub fn subquotient(&self, gens: &[Vec<u64>], rels: &[Vec<u64>]) -> (FinMod, Subquotient) {
        let mut all_rels = rels.to_vec();
        all_rels.extend(self.relations());
        let sq = Subquotient::new(self.modulus(), self.rank(), gens, &all_rels);
        let ops = self.ops.iter().map(|a| self.induced(a, &sq)).collect();
        let m = FinMod::from_parts_unchecked(self.ambient, sq.orders.clone(), ops);
        (m, sq)
    }

    fn induced(&self, a: &MatrixZN, sq: &Subquotient) -> MatrixZN {
        let md = self.modulus();
        let n = sq.len();
        let mut out = MatrixZN::zeros(md, n, n);
        for (i, b) in sq.basis.iter().enumerate() {
            let image = a.right_apply(b);
            let c = sq.coords(&image).expect("subquotient is stable under the operator");
            for (j, &x) in c.iter().enumerate() {
                out.set(j, i, x);
            }
        }
        out
    }

    /// Direct sum; factors are concatenated without sorting.
    /// Additive span of `gens`, which must be stable under every operator,
    /// with its inclusion.
    pub fn submodule(&self, gens: &[Vec<u64>]) -> (FinMod, ModMap) {
        let (sub, sq) = self.subquotient(gens, &[]);
        let incl = basis_map(&sub, self, &sq);
        (sub, incl)
    }

    pub fn direct_sum(parts: &[&FinMod]) -> Result<FinMod> {
        let ambient = parts
            .first()
            .map(|m| m.ambient)
            .ok_or_else(|| Error::InvalidModule("empty direct sum".into()))?;
        if parts.iter().any(|m| m.ambient != ambient) {
            return Err(Error::AmbientMismatch(
                "direct sum of modules over different rings".into(),
            ));
        }
        let factors: Vec<u64> = parts.iter().flat_map(|m| m.factors.iter().copied()).collect();
        let ops = (0..ambient.n_ops())
            .map(|i| block_diag(ambient.modulus(), &parts.iter().map(|m| &m.ops[i]).collect::<Vec<_>>()))
            .collect();
        Ok(FinMod::from_parts_unchecked(ambient, factors, ops))
    }

    /// `M^{⊕n}`.
    pub fn power_sum(&self, n: usize) -> FinMod {
        if n == 0 {
            return FinMod::zero(self.ambient);
        }
        FinMod::direct_sum(&vec![self; n]).expect("same ambient")
    }

    /// Same group and operators, after the change of basis `x ↦ u x`.
    pub fn conjugate(&self, u: &MatrixZN) -> Result<FinMod> {
        let uinv = self.inverse(u)?;
        let ops = self
            .ops
            .iter()
            .map(|a| self.compose(&self.compose(u, a), &uinv))
            .collect();
        FinMod::from_parts(self.ambient, self.factors.clone(), ops)
    }

    /// Realization of a catalog element as an endomorphism.
    pub fn realize(&self, e: &SeqElement) -> Result<MatrixZN> {
        match *e {
            SeqElement::P(c) => Ok(self.scalar(self.modulus().pow(self.ambient.p, c as u64))),
            SeqElement::V(i, c) => {
                if i == 0 || i > self.ambient.t {
                    return Err(Error::Unrealizable(format!(
                        "X{i} is not a variable of the ambient ring"
                    )));
                }
                Ok(self.power(&self.ops[i - 1], c as u64))
            }
            SeqElement::G(j, b) => {
                if j == 0 || j > self.ambient.s {
                    return Err(Error::Unrealizable(format!(
                        "g{j} is not a generator of the ambient group"
                    )));
                }
                let g = self.power(&self.ops[self.ambient.t + j - 1], self.ambient.p.pow(b));
                Ok(self.sub(&g, &self.identity()))
            }
        }
    }
}

/// Homomorphism of finite modules given by a `target.rank() × source.rank()` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMap {
    source: FinMod,
    target: FinMod,
    matrix: MatrixZN,
}

impl ModMap {
    /// Validates well-definedness and equivariance.
    pub fn new(source: FinMod, target: FinMod, matrix: MatrixZN) -> Result<Self> {
        let f = Self::new_unchecked(source, target, matrix)?;
        if let Some((i, j)) = ill_defined_entry(&f.matrix, &f.target.factors, &f.source.factors) {
            return Err(Error::InvalidMap(format!(
                "matrix entry ({i}, {j}) is not well defined"
            )));
        }
        if let Some(i) = f.non_equivariant_op() {
            return Err(Error::InvalidMap(format!(
                "map does not commute with {}",
                f.source.ambient.op_name(i)
            )));
        }
        Ok(f)
    }

    /// Checks shapes and ambient ring only.
    pub fn new_unchecked(source: FinMod, target: FinMod, matrix: MatrixZN) -> Result<Self> {
        if source.ambient != target.ambient {
            return Err(Error::AmbientMismatch("source and target differ".into()));
        }
        if matrix.rows() != target.rank() || matrix.cols() != source.rank() {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.rank(),
                source.rank()
            )));
        }
        let matrix = reduce_rows(&rebase(&matrix, source.modulus()), &target.factors);
        Ok(Self { source, target, matrix })
    }

    pub fn zero(source: FinMod, target: FinMod) -> Self {
        let m = MatrixZN::zeros(source.modulus(), target.rank(), source.rank());
        Self::new_unchecked(source, target, m).expect("shapes agree")
    }

    pub fn identity(m: &FinMod) -> Self {
        Self::new_unchecked(m.clone(), m.clone(), m.identity()).expect("shapes agree")
    }

    pub fn endomorphism(m: &FinMod, a: MatrixZN) -> Self {
        Self::new_unchecked(m.clone(), m.clone(), a).expect("shapes agree")
    }

    pub fn source(&self) -> &FinMod {
        &self.source
    }

    pub fn target(&self) -> &FinMod {
        &self.target
    }

    pub fn matrix(&self) -> &MatrixZN {
        &self.matrix
    }

    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.target.reduce_vec(&self.matrix.right_apply(x))
    }

    pub fn is_well_defined(&self) -> bool {
        ill_defined_entry(&self.matrix, &self.target.factors, &self.source.factors).is_none()
    }

    /// First operator index that the map fails to commute with.
    pub fn non_equivariant_op(&self) -> Option<usize> {
        (0..self.source.ambient.n_ops()).find(|&i| {
            let lhs = reduce_rows(
                &self.matrix.mul(&self.source.ops[i]).expect("shape"),
                &self.target.factors,
            );
            let rhs = reduce_rows(
                &self.target.ops[i].mul(&self.matrix).expect("shape"),
                &self.target.factors,
            );
            lhs != rhs
        })
    }

    pub fn is_equivariant(&self) -> bool {
        self.non_equivariant_op().is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModMap) -> Result<ModMap> {
        if other.source.factors != self.target.factors {
            return Err(Error::DimensionMismatch("composition of incompatible maps".into()));
        }
        let m = other.matrix.mul(&self.matrix)?;
        ModMap::new_unchecked(self.source.clone(), other.target.clone(), m)
    }

    pub fn scale(&self, c: u64) -> ModMap {
        ModMap::new_unchecked(self.source.clone(), self.target.clone(), self.matrix.scale(c)).expect("shape")
    }

    fn image_rows(&self) -> Vec<Vec<u64>> {
        (0..self.source.rank())
            .map(|j| self.matrix.right_apply(&self.source.basis_vector(j)))
            .collect()
    }

    /// Ambient rows generating the preimage of zero.
    pub(crate) fn kernel_rows(&self) -> Vec<Vec<u64>> {
        let md = self.source.modulus();
        let (ks, kt) = (self.source.rank(), self.target.rank());
        if kt == 0 {
            return self.source.identity_rows();
        }
        let mut stacked = self.matrix.transpose();
        let rel = MatrixZN::from_u64_rows(
            md,
            kt,
            &(0..kt)
                .map(|i| {
                    let mut v = vec![0; kt];
                    v[i] = self.target.factors[i] % md.value();
                    v
                })
                .collect::<Vec<_>>(),
        );
        stacked = stacked.vstack(&rel).expect("same width");
        kernel(&stacked)
            .row_vecs()
            .into_iter()
            .map(|r| r[..ks].to_vec())
            .collect()
    }

    pub fn kernel(&self) -> (FinMod, ModMap) {
        let (k, sq) = self.source.subquotient(&self.kernel_rows(), &[]);
        let incl = basis_map(&k, &self.source, &sq);
        (k, incl)
    }

    pub fn image(&self) -> (FinMod, ModMap) {
        let (im, sq) = self.target.subquotient(&self.image_rows(), &[]);
        let incl = basis_map(&im, &self.target, &sq);
        (im, incl)
    }

    pub fn cokernel(&self) -> (FinMod, ModMap) {
        let (c, sq) = self
            .target
            .subquotient(&self.target.identity_rows(), &self.image_rows());
        let md = self.target.modulus();
        let mut proj = MatrixZN::zeros(md, c.rank(), self.target.rank());
        for j in 0..self.target.rank() {
            let coords = sq.coords(&self.target.basis_vector(j)).expect("generator");
            for (i, &x) in coords.iter().enumerate() {
                proj.set(i, j, x);
            }
        }
        let p = ModMap::new_unchecked(self.target.clone(), c.clone(), proj).expect("shape");
        (c, p)
    }

    /// log_p |im|
    pub fn image_log_size(&self) -> u32 {
        let sq = Subquotient::new(
            self.target.modulus(),
            self.target.rank(),
            &self.image_rows(),
            &self.target.relations(),
        );
        sq.log_size()
    }

    /// Invariant factors of the kernel, without building induced operators.
    pub fn kernel_factors(&self) -> Vec<u64> {
        let rels = self.source.relations();
        Subquotient::new(self.source.modulus(), self.source.rank(), &self.kernel_rows(), &rels).orders
    }

    pub fn cokernel_factors(&self) -> Vec<u64> {
        let mut rels = self.image_rows();
        rels.extend(self.target.relations());
        Subquotient::new(
            self.target.modulus(),
            self.target.rank(),
            &self.target.identity_rows(),
            &rels,
        )
        .orders
    }

    pub fn is_injective(&self) -> bool {
        self.image_log_size() == self.source.log_size()
    }

    pub fn is_surjective(&self) -> bool {
        self.image_log_size() == self.target.log_size()
    }

    pub fn is_iso(&self) -> bool {
        self.source.log_size() == self.target.log_size() && self.is_surjective()
    }
}

/// Inclusion of a subquotient's basis into its ambient module.
fn basis_map(sub: &FinMod, ambient_mod: &FinMod, sq: &Subquotient) -> ModMap {
    let md = ambient_mod.modulus();
    let mut m = MatrixZN::zeros(md, ambient_mod.rank(), sub.rank());
    for (j, b) in sq.basis.iter().enumerate() {
        for (i, &x) in b.iter().enumerate() {
            m.set(i, j, x);
        }
    }
    ModMap::new_unchecked(sub.clone(), ambient_mod.clone(), m).expect("shape")
}

/// Catalog elements from which regular sequences are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SeqElement {
    /// `p^c`
    P(u32),
    /// `X_i^c`, variables numbered from 1
    V(usize, u32),
    /// `γ_j^{p^b} − 1`, generators numbered from 1
    G(usize, u32),
}

impl SeqElement {
    /// Underlying variable, used by the regularity certificate.
    pub fn variable(&self) -> (u8, usize) {
        match *self {
            SeqElement::P(_) => (0, 0),
            SeqElement::V(i, _) => (1, i),
            SeqElement::G(j, _) => (2, j),
        }
    }
}

impl std::fmt::Display for SeqElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            SeqElement::P(c) => write!(f, "P:{c}"),
            SeqElement::V(i, c) => write!(f, "V{i}:{c}"),
            SeqElement::G(j, b) => write!(f, "G{j}:{b}"),
        }
    }
}

impl std::str::FromStr for SeqElement {
    type Err = Error;

    /// Accepts `P1`, `P:1`, `V1:2`, `G2:0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("cannot parse sequence element `{s}`"));
        let s = s.trim();
        let (head, rest) = s.split_at(1.min(s.len()));
        match head {
            "P" => {
                let c = rest.trim_start_matches(':').parse().map_err(|_| bad())?;
                Ok(SeqElement::P(c))
            }
            "V" | "G" => {
                let (idx, e) = rest.split_once(':').ok_or_else(bad)?;
                let idx: usize = idx.parse().map_err(|_| bad())?;
                let e: u32 = e.parse().map_err(|_| bad())?;
                if idx == 0 {
                    return Err(bad());
                }
                Ok(if head == "V" {
                    SeqElement::V(idx, e)
                } else {
                    SeqElement::G(idx, e)
                })
            }
            _ => Err(bad()),
        }
    }
}

pub fn parse_sequence(s: &str) -> Result<Vec<SeqElement>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

pub(crate) fn log_p(mut o: u64, p: u64) -> u32 {
    let mut e = 0;
    while o > 1 {
        o /= p;
        e += 1;
    }
    e
}

pub(crate) fn rebase(m: &MatrixZN, md: Modulus) -> MatrixZN {
    if m.modulus() == md {
        return m.clone();
    }
    let mut out = MatrixZN::zeros(md, m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j));
        }
    }
    out
}

/// Reduces row `i` modulo `orders[i]`.
pub(crate) fn reduce_rows(m: &MatrixZN, orders: &[u64]) -> MatrixZN {
    let mut out = m.clone();
    for (i, &o) in orders.iter().enumerate() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(i, j) % o);
        }
    }
    out
}

fn ill_defined_entry(m: &MatrixZN, row_orders: &[u64], col_orders: &[u64]) -> Option<(usize, usize)> {
    for (i, &oi) in row_orders.iter().enumerate() {
        for (j, &oj) in col_orders.iter().enumerate() {
            let x = m.get(i, j) as u128 * oj as u128;
            if !x.is_multiple_of(oi as u128) {
                return Some((i, j));
            }
        }
    }
    None
}

fn block_diag(md: Modulus, blocks: &[&MatrixZN]) -> MatrixZN {
    let n: usize = blocks.iter().map(|b| b.rows()).sum();
    let mut out = MatrixZN::zeros(md, n, n);
    let mut off = 0;
    for b in blocks {
        out.set_block(off, off, b);
        off += b.rows();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn amb(p: u64, a: u32, t: usize, s: usize) -> Ambient {
        Ambient::new(p, a, t, s).unwrap()
    }

    fn mat(md: Modulus, rows: &[Vec<i64>]) -> MatrixZN {
        MatrixZN::from_rows(md, rows.first().map_or(0, |r| r.len()), rows).unwrap()
    }

    #[test]
    fn make_finmod_examples() {
        let a = amb(2, 2, 0, 1);
        assert!(make_finmod(a, vec![4], vec![mat(a.modulus(), &[vec![1]])]).is_ok());
        assert!(make_finmod(a, vec![4], vec![mat(a.modulus(), &[vec![3]])]).is_ok());
        assert!(make_finmod(a, vec![4], vec![mat(a.modulus(), &[vec![2]])]).is_err());
        let b = amb(2, 1, 1, 0);
        let x = mat(b.modulus(), &[vec![0, 1], vec![0, 0]]);
        assert!(make_finmod(b, vec![2, 2], vec![x]).is_ok());
    }

    #[test]
    fn rejects_ill_defined_and_noncommuting() {
        let a = amb(2, 2, 1, 0);
        // Z/2 ⊕ Z/4, entry (0,1)=1 is fine; entry (1,0)=1 is not
        let bad = mat(a.modulus(), &[vec![0, 0], vec![1, 0]]);
        assert!(make_finmod(a, vec![2, 4], vec![bad]).is_err());
        let b = amb(2, 1, 2, 0);
        let x1 = mat(b.modulus(), &[vec![0, 1], vec![0, 0]]);
        let x2 = mat(b.modulus(), &[vec![0, 0], vec![1, 0]]);
        assert!(make_finmod(b, vec![2, 2], vec![x1, x2]).is_err());
    }

    #[test]
    fn kernel_image_cokernel_of_two_on_z4() {
        let a = amb(2, 2, 0, 0);
        let m = make_finmod(a, vec![4], vec![]).unwrap();
        let f = ModMap::new(m.clone(), m.clone(), m.scalar(2)).unwrap();
        assert_eq!(f.kernel().0.factors(), &[2]);
        assert_eq!(f.image().0.factors(), &[2]);
        assert_eq!(f.cokernel().0.factors(), &[2]);
        let id = ModMap::identity(&m);
        assert!(id.kernel().0.is_zero());
        assert!(id.cokernel().0.is_zero());
        let z = ModMap::zero(m.clone(), m.clone());
        assert_eq!(z.kernel().0.factors(), &[4]);
        assert!(z.image().0.is_zero());
    }

    #[test]
    fn inverse_of_unit() {
        let a = amb(3, 2, 0, 1);
        let md = a.modulus();
        let m = make_finmod(a, vec![3, 9], vec![mat(md, &[vec![1, 1], vec![0, 4]])]).unwrap();
        let inv = m.inverse(m.gamma(0)).unwrap();
        assert_eq!(m.compose(m.gamma(0), &inv), m.identity());
    }

    #[test]
    fn seq_element_parsing() {
        assert_eq!("P1".parse::<SeqElement>().unwrap(), SeqElement::P(1));
        assert_eq!("P:2".parse::<SeqElement>().unwrap(), SeqElement::P(2));
        assert_eq!("V1:3".parse::<SeqElement>().unwrap(), SeqElement::V(1, 3));
        assert_eq!("G2:0".parse::<SeqElement>().unwrap(), SeqElement::G(2, 0));
        assert!("Q1".parse::<SeqElement>().is_err());
        assert_eq!(parse_sequence("P1,G1:0").unwrap().len(), 2);
    }
}
