//! Small finite local rings `Z/p^a[x_1..x_n] / (monomial relations)`.
//!
//! A ring is given by a staircase of monomials `x^α` and an order function
//! `e`, nonincreasing under divisibility: the additive group is
//! `⊕ Z/p^{e(α)} x^α` and `x^α x^β = x^{α+β}`. These cover `Z/p^a`,
//! truncated polynomial rings, `Z/p^2[x]/(x^2, px)`, `F_p[x, y]/(x, y)^2` and
//! the like, and every one is local with residue field `F_p`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::chainkit::ChainComplex;
use crate::error::{Error, Result};
use crate::exactlin::{howell_form, MatrixZN};
use crate::finmod::{hom_module, pontryagin_dual, Ambient, FinMod, ModMap};

/// `log_p |R|` allowed for catalog rings.
pub const MAX_LOG_SIZE: u32 = 12;

#[derive(Clone, Debug)]
pub struct TinyRing {
    pub p: u64,
    pub n: usize,
    /// Staircase monomials in graded lexicographic order.
    pub monomials: Vec<Vec<u32>>,
    /// `e(α)` for each monomial.
    pub orders: Vec<u32>,
    /// `R` as a module over itself, `X_i` acting by multiplication by `x_i`.
    pub module: FinMod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingSpec {
    pub p: u64,
    pub n: usize,
    /// `(α, e(α))` for every monomial with `e(α) > 0`.
    pub entries: Vec<(Vec<u32>, u32)>,
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl TinyRing {
    pub fn new(spec: &RingSpec) -> Result<Self> {
        let (p, n) = (spec.p, spec.n);
        let mut entries = spec.entries.clone();
        entries.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            (da, std::cmp::Reverse(&a.0)).cmp(&(db, std::cmp::Reverse(&b.0)))
        });
        if entries.iter().any(|(a, e)| a.len() != n || *e == 0) {
            return Err(Error::InvalidModule(
                "monomials need n exponents and positive orders".into(),
            ));
        }
        if entries.iter().map(|x| &x.0).duplicates().next().is_some() {
            return Err(Error::InvalidModule("repeated monomial".into()));
        }
        let log: u32 = entries.iter().map(|x| x.1).sum();
        if log > MAX_LOG_SIZE {
            return Err(Error::RingTooLarge(format!("|R| = {p}^{log}")));
        }
        let lookup: BTreeMap<Vec<u32>, u32> = entries.iter().cloned().collect();
        for (a, e) in &entries {
            for i in 0..n {
                if a[i] > 0 {
                    let mut b = a.clone();
                    b[i] -= 1;
                    match lookup.get(&b) {
                        Some(&eb) if eb >= *e => {}
                        _ => {
                            return Err(Error::InvalidModule(format!(
                                "order function is not a nonincreasing staircase at {a:?}"
                            )))
                        }
                    }
                }
            }
        }
        let a = entries.first().map_or(1, |x| x.1).max(1);
        if entries.first().is_some_and(|x| x.0.iter().any(|&y| y != 0)) {
            return Err(Error::InvalidModule("the staircase must contain 1".into()));
        }
        let amb = Ambient::new(p, a, n, 0)?;
        let md = amb.modulus();
        let k = entries.len();
        let index: BTreeMap<&Vec<u32>, usize> = entries.iter().enumerate().map(|(i, x)| (&x.0, i)).collect();
        let mut ops = Vec::new();
        for v in 0..n {
            let mut op = MatrixZN::zeros(md, k, k);
            for (col, (alpha, _)) in entries.iter().enumerate() {
                let mut beta = alpha.clone();
                beta[v] += 1;
                if let Some(&row) = index.get(&beta) {
                    op.set(row, col, 1);
                }
            }
            ops.push(op);
        }
        let factors = entries.iter().map(|x| p.pow(x.1)).collect();
        let module = FinMod::from_parts(amb, factors, ops)?;
        Ok(Self {
            p,
            n,
            monomials: entries.iter().map(|x| x.0.clone()).collect(),
            orders: entries.iter().map(|x| x.1).collect(),
            module,
        })
    }

    pub fn spec(&self) -> RingSpec {
        RingSpec {
            p: self.p,
            n: self.n,
            entries: self
                .monomials
                .iter()
                .cloned()
                .zip(self.orders.iter().copied())
                .collect(),
        }
    }

    pub fn ambient(&self) -> Ambient {
        self.module.ambient()
    }

    pub fn log_size(&self) -> u32 {
        self.orders.iter().sum()
    }

    /// Readable presentation, e.g. `Z/4[x1]/(x1^2, 2x1)` is `1:2 x1:1`.
    pub fn name(&self) -> String {
        let mono = |a: &[u32]| -> String {
            let parts: Vec<String> = a
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{e}", i + 1)
                    }
                })
                .collect();
            if parts.is_empty() {
                "1".into()
            } else {
                parts.join("")
            }
        };
        let body = self
            .monomials
            .iter()
            .zip(&self.orders)
            .map(|(a, e)| format!("{}:{e}", mono(a)))
            .join(" ");
        format!("p={} {body}", self.p)
    }

    /// Ring element `x^α` as a coordinate vector, zero outside the staircase.
    pub fn monomial(&self, alpha: &[u32]) -> Vec<u64> {
        let mut v = vec![0; self.monomials.len()];
        if let Some(i) = self.monomials.iter().position(|m| m == alpha) {
            v[i] = 1;
        }
        v
    }

    pub fn one(&self) -> Vec<u64> {
        self.monomial(&vec![0; self.n])
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let act = self.action(x, &self.module);
        self.module.apply(&act, y)
    }

    /// Matrix by which `r` acts on an `R`-module `m`: `Σ r_α X^α`.
    pub fn action(&self, r: &[u64], m: &FinMod) -> MatrixZN {
        let mut out = m.scalar(0);
        for (alpha, &c) in self.monomials.iter().zip(r) {
            if c == 0 {
                continue;
            }
            let mut term = m.scalar(c);
            for (v, &e) in alpha.iter().enumerate() {
                term = m.compose(&term, &m.power(m.x(v), e as u64));
            }
            out = m.add(&out, &term);
        }
        out
    }

    /// Whether the operators of `m` satisfy the relations of `R`.
    pub fn is_module(&self, m: &FinMod) -> bool {
        if m.ambient() != self.ambient() {
            return false;
        }
        // x^β = 0 just outside the staircase, p^{e(α)} x^α = 0 inside it
        let mut boundary = BTreeSet::new();
        for a in &self.monomials {
            for v in 0..self.n {
                let mut b = a.clone();
                b[v] += 1;
                if !self.monomials.contains(&b) {
                    boundary.insert(b);
                }
            }
        }
        let power = |alpha: &[u32]| {
            let mut t = m.identity();
            for (v, &e) in alpha.iter().enumerate() {
                t = m.compose(&t, &m.power(m.x(v), e as u64));
            }
            t
        };
        boundary.iter().all(|b| power(b).is_zero())
            && self
                .monomials
                .iter()
                .zip(&self.orders)
                .all(|(a, &e)| m.compose(&m.scalar(self.p.pow(e)), &power(a)).is_zero())
    }

    /// All `|R|` elements.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        self.module
            .factors()
            .iter()
            .map(|&o| 0..o)
            .multi_cartesian_product()
            .collect()
    }

    /// Every ideal, each given by additive generators, found by closing
    /// `I + R r` over all `I` found so far and all `r ∈ R`.
    pub fn ideals(&self) -> Vec<Vec<Vec<u64>>> {
        let m = &self.module;
        let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        let zero: Vec<Vec<u64>> = Vec::new();
        seen.insert(span_key(m, &zero));
        queue.push_back(zero.clone());
        out.push(zero);
        let elements = self.elements();
        while let Some(ideal) = queue.pop_front() {
            for r in &elements {
                let mut gens = ideal.clone();
                gens.push(r.clone());
                let closed = submodule_closure(m, &gens);
                let key = span_key(m, &closed);
                if seen.insert(key) {
                    queue.push_back(closed.clone());
                    out.push(closed);
                }
            }
        }
        out
    }

    /// `R/I` as an `R`-module.
    pub fn quotient(&self, ideal: &[Vec<u64>]) -> FinMod {
        let basis: Vec<Vec<u64>> = (0..self.module.rank()).map(|j| self.module.basis_vector(j)).collect();
        self.module.subquotient(&basis, ideal).0
    }

    /// Socle `{v : p v = 0, x_i v = 0}` of an `R`-module.
    pub fn socle(&self, m: &FinMod) -> (FinMod, ModMap) {
        let ops: Vec<MatrixZN> = std::iter::once(m.scalar(self.p))
            .chain(m.ops().iter().cloned())
            .collect();
        let target = m.power_sum(ops.len());
        let mut mat = MatrixZN::zeros(m.modulus(), target.rank(), m.rank());
        for (i, op) in ops.iter().enumerate() {
            mat.set_block(i * m.rank(), 0, op);
        }
        ModMap::new_unchecked(m.clone(), target, mat).expect("shape").kernel()
    }
}

/// Additive span of `gens` closed under the operators of `m` and the scalar `p`.
pub fn submodule_closure(m: &FinMod, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let rels = m.relations();
    let mut rows: Vec<Vec<u64>> = gens.iter().map(|g| m.reduce_vec(g)).collect();
    let mut frontier = rows.clone();
    while !frontier.is_empty() {
        let mut all = rows.clone();
        all.extend(rels.iter().cloned());
        let h = howell_form(&MatrixZN::from_u64_rows(m.modulus(), m.rank(), &all));
        let mut next = Vec::new();
        for v in &frontier {
            for op in m.ops() {
                let w = m.apply(op, v);
                if !h.contains(&w) && !next.contains(&w) {
                    next.push(w);
                }
            }
        }
        rows.extend(next.iter().cloned());
        frontier = next;
    }
    rows
}

fn span_key(m: &FinMod, gens: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut all: Vec<Vec<u64>> = gens.to_vec();
    all.extend(m.relations());
    howell_form(&MatrixZN::from_u64_rows(m.modulus(), m.rank(), &all))
        .form
        .to_rows()
}

/// Staircases of at most `size` monomials in `n` variables using every variable.
fn staircases(n: usize, size: usize) -> Vec<Vec<Vec<u32>>> {
    let origin = vec![0u32; n];
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::from([vec![origin]]);
    while let Some(s) = queue.pop_front() {
        let mut sorted = s.clone();
        sorted.sort();
        if !seen.insert(sorted.clone()) {
            continue;
        }
        if (0..n).all(|v| s.iter().any(|a| a[v] > 0)) {
            out.push(sorted);
        }
        if s.len() == size {
            continue;
        }
        for a in &s {
            for v in 0..n {
                let mut b = a.clone();
                b[v] += 1;
                if s.contains(&b) {
                    continue;
                }
                let corner = (0..n).all(|u| {
                    b[u] == 0 || {
                        let mut c = b.clone();
                        c[u] -= 1;
                        s.contains(&c)
                    }
                });
                if corner {
                    let mut t = s.clone();
                    t.push(b);
                    queue.push_back(t);
                }
            }
        }
    }
    out
}

/// Nonincreasing order functions on a staircase with total at most `budget`.
fn order_functions(stair: &[Vec<u32>], budget: u32) -> Vec<Vec<u32>> {
    // stair is sorted, so every monomial comes after its divisors
    fn go(stair: &[Vec<u32>], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == stair.len() {
            out.push(cur.clone());
            return;
        }
        let cap = (0..i)
            .filter(|&j| divides(&stair[j], &stair[i]))
            .map(|j| cur[j])
            .min()
            .unwrap_or(u32::MAX);
        let remaining = (stair.len() - i - 1) as u32;
        for e in 1..=cap.min(left.saturating_sub(remaining)) {
            cur.push(e);
            go(stair, i + 1, left - e, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(stair, 0, budget, &mut Vec::new(), &mut out);
    out
}

fn canonical(entries: &[(Vec<u32>, u32)], n: usize) -> Vec<(Vec<u32>, u32)> {
    (0..n)
        .permutations(n)
        .map(|perm| {
            let mut e: Vec<(Vec<u32>, u32)> = entries
                .iter()
                .map(|(a, o)| (perm.iter().map(|&i| a[i]).collect(), *o))
                .collect();
            e.sort();
            e
        })
        .min()
        .unwrap_or_default()
}

/// Every catalog ring with `|R| ≤ p^max_log`, up to renaming variables.
pub fn catalog(p: u64, max_log: u32) -> Vec<TinyRing> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for n in 0..=max_log.saturating_sub(1) as usize {
        for stair in staircases(n, max_log as usize) {
            for e in order_functions(&stair, max_log) {
                let entries: Vec<(Vec<u32>, u32)> = stair.iter().cloned().zip(e).collect();
                if seen.insert(canonical(&entries, n)) {
                    out.push(TinyRing::new(&RingSpec { p, n, entries }).expect("catalog rings are valid"));
                }
            }
        }
    }
    out
}

/// Catalog rings of cardinality at most `bound`, over every prime `p ≤ bound`.
pub fn catalog_up_to(bound: u64) -> Vec<TinyRing> {
    let mut out = Vec::new();
    for p in (2..=bound).filter(|&p| crate::exactlin::is_prime(p)) {
        let mut log = 0;
        while p.pow(log + 1) <= bound {
            log += 1;
        }
        out.extend(catalog(p, log));
    }
    out
}

pub fn z_mod(p: u64, a: u32) -> TinyRing {
    TinyRing::new(&RingSpec {
        p,
        n: 0,
        entries: vec![(vec![], a)],
    })
    .expect("valid")
}

/// `F_p[x]/(x^k)`.
pub fn truncated(p: u64, k: u32) -> TinyRing {
    TinyRing::new(&RingSpec {
        p,
        n: 1,
        entries: (0..k).map(|i| (vec![i], 1)).collect(),
    })
    .expect("valid")
}

/// Outcome of Baer's criterion for one ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaerRecord {
    pub ideal_log_size: u32,
    /// `log_p |Hom_R(I, Q)|`
    pub hom_log_size: u32,
    /// `log_p` of the image of restriction from `Hom_R(R, Q)`.
    pub restricted_log_size: u32,
    pub extends: bool,
}

/// Baer's criterion for `q`: restriction `Hom_R(R, Q) → Hom_R(I, Q)` is onto
/// for every ideal `I`.
pub fn baer_check(ring: &TinyRing, q: &FinMod) -> Result<Vec<BaerRecord>> {
    let r = &ring.module;
    let hom_r = hom_module(r, q)?;
    let mut out = Vec::new();
    for ideal in ring.ideals() {
        let (i, incl) = r.submodule(&ideal);
        let hom_i = hom_module(&i, q)?;
        let md = r.modulus();
        let mut mat = MatrixZN::zeros(md, hom_i.module.rank(), hom_r.module.rank());
        for j in 0..hom_r.module.rank() {
            let phi = hom_r.map_of(&hom_r.module.basis_vector(j));
            let psi = incl.then(&phi)?;
            let c = hom_i
                .coords_of_map(&psi)
                .ok_or_else(|| Error::InvalidMap("restriction of a linear map is not linear".into()))?;
            for (row, &x) in c.iter().enumerate() {
                mat.set(row, j, x);
            }
        }
        let res = ModMap::new(hom_r.module.clone(), hom_i.module.clone(), mat)?;
        let restricted = res.image_log_size();
        out.push(BaerRecord {
            ideal_log_size: i.log_size(),
            hom_log_size: hom_i.module.log_size(),
            restricted_log_size: restricted,
            extends: restricted == hom_i.module.log_size(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialityRecord {
    pub socle_log_size: u32,
    /// Number of nonzero elements `v` with `R v ∩ socle = 0`.
    pub misses: usize,
    pub checked: usize,
}

/// Every nonzero cyclic submodule `R v ⊂ Q` meets the socle of `Q`.
pub fn essentiality_check(ring: &TinyRing, q: &FinMod) -> EssentialityRecord {
    let (soc, incl) = ring.socle(q);
    let soc_gens: Vec<Vec<u64>> = (0..soc.rank()).map(|j| incl.apply(&soc.basis_vector(j))).collect();
    let mut misses = 0;
    let mut checked = 0;
    let elements: Vec<Vec<u64>> = q.factors().iter().map(|&o| 0..o).multi_cartesian_product().collect();
    for v in elements {
        if v.iter().all(|&x| x == 0) {
            continue;
        }
        checked += 1;
        let rv = submodule_closure(q, &[v]);
        let rv_mod = q.subquotient(&rv, &[]).0;
        let both = q
            .subquotient(&rv.iter().chain(&soc_gens).cloned().collect::<Vec<_>>(), &[])
            .0;
        // |Rv ∩ S| = |Rv| |S| / |Rv + S|
        if rv_mod.log_size() + soc.log_size() == both.log_size() {
            misses += 1;
        }
    }
    EssentialityRecord {
        socle_log_size: soc.log_size(),
        misses,
        checked,
    }
}

/// `F_2 → F_1 → F_0 → M` with each `F_i = R^{g_i}` and the differentials as
/// matrices of ring elements.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub ranks: [usize; 3],
    /// `d1[i][j]`: component `i` of the image of generator `j` of `F_1`.
    pub d1: Vec<Vec<Vec<u64>>>,
    pub d2: Vec<Vec<Vec<u64>>>,
}

/// Greedy minimal generating set of an `R`-module, as coordinate vectors.
fn generators(m: &FinMod) -> Vec<Vec<u64>> {
    let mut gens: Vec<Vec<u64>> = Vec::new();
    let mut span = span_key(m, &[]);
    let full = span_key(m, &(0..m.rank()).map(|j| m.basis_vector(j)).collect::<Vec<_>>());
    for j in 0..m.rank() {
        if span == full {
            break;
        }
        let mut trial = gens.clone();
        trial.push(m.basis_vector(j));
        let key = span_key(m, &submodule_closure(m, &trial));
        if key != span {
            gens = trial;
            span = key;
        }
    }
    gens
}

/// `R^g → m` sending the `i`-th basis vector to `gens[i]`, with its kernel.
fn cover(ring: &TinyRing, m: &FinMod, gens: &[Vec<u64>]) -> Result<(FinMod, ModMap)> {
    let free = ring.module.power_sum(gens.len());
    let r = ring.module.rank();
    let mut mat = MatrixZN::zeros(m.modulus(), m.rank(), free.rank());
    for (i, g) in gens.iter().enumerate() {
        for a in 0..r {
            let img = m.apply(&ring.action(&ring.monomial(&ring.monomials[a]), m), g);
            for (row, &x) in img.iter().enumerate() {
                mat.set(row, i * r + a, x);
            }
        }
    }
    let f = ModMap::new(free, m.clone(), mat)?;
    if !f.is_surjective() {
        return Err(Error::InvalidMap("generators do not generate".into()));
    }
    Ok(f.kernel())
}

fn split_blocks(ring: &TinyRing, v: &[u64]) -> Vec<Vec<u64>> {
    v.chunks(ring.module.rank()).map(|c| c.to_vec()).collect()
}

pub fn resolve(ring: &TinyRing, m: &FinMod) -> Result<Resolution> {
    if !ring.is_module(m) {
        return Err(Error::InvalidModule("not a module over the ring".into()));
    }
    let g0 = generators(m);
    let (k1, inc1) = cover(ring, m, &g0)?;
    let g1: Vec<Vec<u64>> = generators(&k1);
    let (k2, inc2) = cover(ring, &k1, &g1)?;
    let g2: Vec<Vec<u64>> = generators(&k2);
    let column = |inc: &ModMap, g: &Vec<u64>| split_blocks(ring, &inc.apply(g));
    let d1_cols: Vec<Vec<Vec<u64>>> = g1.iter().map(|g| column(&inc1, g)).collect();
    let d2_cols: Vec<Vec<Vec<u64>>> = g2.iter().map(|g| column(&inc2, g)).collect();
    let transpose = |cols: Vec<Vec<Vec<u64>>>, rows: usize| -> Vec<Vec<Vec<u64>>> {
        (0..rows).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect()
    };
    Ok(Resolution {
        ranks: [g0.len(), g1.len(), g2.len()],
        d1: transpose(d1_cols, g0.len()),
        d2: transpose(d2_cols, g1.len()),
    })
}

fn block_map(
    ring: &TinyRing,
    src: &FinMod,
    tgt: &FinMod,
    base: &FinMod,
    entries: &[Vec<Vec<u64>>],
    transpose: bool,
) -> Result<ModMap> {
    let r = base.rank();
    let mut mat = MatrixZN::zeros(base.modulus(), tgt.rank(), src.rank());
    for (i, row) in entries.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let act = ring.action(x, base);
            let (bi, bj) = if transpose { (j, i) } else { (i, j) };
            mat.set_block(bi * r, bj * r, &act);
        }
    }
    ModMap::new(src.clone(), tgt.clone(), mat)
}

/// `Tor_q^R(N, M)` for `q ≤ 1`, from the resolution of `M`.
pub fn tor(ring: &TinyRing, n: &FinMod, m: &FinMod, q: i64) -> Result<FinMod> {
    let res = resolve(ring, m)?;
    let terms: Vec<FinMod> = res.ranks.iter().map(|&g| n.power_sum(g)).collect();
    let d1 = block_map(ring, &terms[1], &terms[0], n, &res.d1, false)?;
    let d2 = block_map(ring, &terms[2], &terms[1], n, &res.d2, false)?;
    Ok(ChainComplex::chain(0, terms, vec![d1, d2])?.homology(q))
}

/// `Ext^q_R(M, Q)` for `q ≤ 1`, from the resolution of `M`.
pub fn ext(ring: &TinyRing, m: &FinMod, target: &FinMod, q: i64) -> Result<FinMod> {
    let res = resolve(ring, m)?;
    let terms: Vec<FinMod> = res.ranks.iter().map(|&g| target.power_sum(g)).collect();
    let d1 = block_map(ring, &terms[0], &terms[1], target, &res.d1, true)?;
    let d2 = block_map(ring, &terms[1], &terms[2], target, &res.d2, true)?;
    Ok(ChainComplex::cochain(0, terms, vec![d1, d2])?.homology(q))
}

/// `Π(R)` for a catalog ring.
pub fn matlis_module(ring: &TinyRing) -> FinMod {
    pontryagin_dual(&ring.module)
}
