use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{Ctx, Mode, VerificationReport};
use crate::chainkit::DirectedSystem;
use crate::error::Result;
use crate::exactlin::{smith_form_integers, IntMatrix, MatrixZN};
use crate::finmod::{Ambient, FinMod, ModMap};
use crate::gradedpoly::{graded_tor_table, intersection_vs_product, GradedQuotient, Mode as GradedMode, PurePower};
use crate::tate::max_finite_submodule_zp;

/// Every pair of pure-power ideals on disjoint variables, exponents ≤ 3.
fn split_pairs(n: usize) -> Vec<(Vec<PurePower>, Vec<PurePower>)> {
    // per variable: 0 = unused, 1..=3 in I, 4..=6 in J
    let mut out = Vec::new();
    let total = 7usize.pow(n as u32);
    for code in 0..total {
        let (mut i, mut j) = (Vec::new(), Vec::new());
        let mut c = code;
        for var in 0..n {
            match c % 7 {
                0 => {}
                e @ 1..=3 => i.push(PurePower { var, exp: e as u32 }),
                e => j.push(PurePower { var, exp: e as u32 - 3 }),
            }
            c /= 7;
        }
        if !i.is_empty() && !j.is_empty() {
            out.push((i, j));
        }
    }
    out
}

struct GradedOutcome {
    higher_tor: Vec<usize>,
    symmetric: bool,
    intersection: Vec<usize>,
    product: Vec<usize>,
}

fn graded_outcome(gq: &GradedQuotient) -> GradedOutcome {
    let table = graded_tor_table(gq);
    let swapped = graded_tor_table(&gq.swapped());
    let totals =
        |t: &Vec<Vec<usize>>| -> Vec<usize> { (0..=4).map(|q| t.get(q).map_or(0, |row| row.iter().sum())).collect() };
    let cmp = intersection_vs_product(gq);
    GradedOutcome {
        higher_tor: totals(&table)[1..].to_vec(),
        symmetric: totals(&table) == totals(&swapped),
        intersection: cmp.iter().map(|c| c.intersection).collect(),
        product: cmp.iter().map(|c| c.product).collect(),
    }
}

pub(super) fn tor_vanishing_graded(ctx: &mut Ctx) -> Result<VerificationReport> {
    let params = ctx.params.clone();
    let mut cases: Vec<GradedQuotient> = Vec::new();
    if ctx.corrupt {
        let x = PurePower { var: 0, exp: 1 };
        cases.push(GradedQuotient::new(
            2,
            1,
            vec![x],
            vec![x],
            params.n,
            GradedMode::Oracle,
        )?);
    } else {
        let vars = params.d.clamp(1, 4);
        for p in [2u64, 3] {
            for (i, j) in split_pairs(vars) {
                cases.push(GradedQuotient::new(p, vars, i, j, params.n, GradedMode::Certified)?);
            }
        }
    }
    let outcomes: Vec<GradedOutcome> = cases.par_iter().map(graded_outcome).collect();
    let mut b = ctx.builder("tor-vanishing-graded");
    b.note("Tor_q totals over all degrees up to the bound, q = 1..4");
    for (gq, out) in cases.iter().zip(&outcomes) {
        let inst = b.instance(serde_json::to_value(gq)?, (gq.ideal_i.len() + gq.ideal_j.len()) as u64);
        b.exact(inst, 1, &out.higher_tor, &vec![0; 4]);
        b.compare(
            inst,
            0,
            Mode::Exact,
            format!("symmetric: {}", out.symmetric),
            "symmetric: true".into(),
            out.symmetric,
        );
        b.exact(inst, 1, &out.intersection, &out.product);
    }
    Ok(b.finish())
}

fn random_presentation(ctx: &mut Ctx) -> IntMatrix {
    let rows = ctx.rng.gen_range(1..=3);
    let cols = ctx.rng.gen_range(1..=3);
    let entries: Vec<Vec<i128>> = (0..rows)
        .map(|_| (0..cols).map(|_| ctx.rng.gen_range(-16i128..=16)).collect())
        .collect();
    IntMatrix::from_rows(&entries)
}

pub(super) fn max_finite_submodule(ctx: &mut Ctx) -> Result<VerificationReport> {
    let p = ctx.params.p;
    let w = ctx.params.w;
    let mut cases: Vec<(u64, IntMatrix)> = Vec::new();
    if ctx.corrupt {
        cases.push((2, IntMatrix::diag(&[6])));
    } else {
        let q = p as i128;
        cases.push((p, IntMatrix::diag(&[q * q])));
        cases.push((p, IntMatrix::from_rows(&[vec![q], vec![0]])));
        cases.push((p, IntMatrix::diag(&[q, q * q * q, 7])));
        for _ in 0..ctx.params.trials {
            cases.push((p, random_presentation(ctx)));
        }
    }
    let corrupt = ctx.corrupt;
    let mut b = ctx.builder("max-finite-submodule");
    b.note("Smith p-part against colim_k Hom(Z/p^k, M) over Z_p");
    for (p, m) in &cases {
        let rows: Vec<Vec<String>> = (0..m.rows)
            .map(|i| (0..m.cols).map(|j| m.get(i, j).to_string()).collect())
            .collect();
        let inst = b.instance(json!({ "p": p, "presentation": rows }), (m.rows * m.cols) as u64);
        match max_finite_submodule_zp(*p, m, w) {
            Ok(r) => {
                let lhs: Vec<u64> = if corrupt {
                    // full torsion, prime-to-p part included
                    let mut t: Vec<u64> = smith_form_integers(m)
                        .diagonal
                        .iter()
                        .filter(|&&d| d != 0 && d.unsigned_abs() != 1)
                        .map(|d| d.unsigned_abs() as u64)
                        .collect();
                    t.sort_unstable();
                    t
                } else {
                    r.torsion.clone()
                };
                b.exact(inst, 0, &lhs, &r.gamma_route);
            }
            Err(e) => b.error(inst, 0, &e),
        }
    }
    Ok(b.finish())
}

fn ext1_cyclic(n: i128, m: i128) -> Vec<i128> {
    // Ext^1_Z(Z/n, Z/m) = coker(m·Z ⊕ n·Z → Z)
    smith_form_integers(&IntMatrix::from_rows(&[vec![m, n]]))
        .diagonal
        .into_iter()
        .filter(|&d| d != 1)
        .collect()
}

pub(super) fn z_counterexample(ctx: &mut Ctx) -> Result<VerificationReport> {
    let corrupt = ctx.corrupt;
    let mut b = ctx.builder("z-counterexample");
    if !corrupt {
        let inst = b.instance(json!({ "n": 12, "m": 18 }), 2);
        b.exact(inst, 1, &ext1_cyclic(12, 18), &vec![6]);
        let inst = b.instance(json!({ "n": (1..=10).map(|i| 1i64 << i).collect::<Vec<_>>() }), 10);
        for i in 1..=10 {
            for j in 1..=10 {
                let (n, m) = (1i128 << i, 1i128 << j);
                b.exact(inst, 1, &ext1_cyclic(n, m), &vec![n.min(m)]);
            }
        }
        // Ext^1(Z/n, Q/Z) = coker(n on Q/Z). At level N the subgroup Z/N sits in
        // Z/(nN) as the multiples of n; its image in coker(n on Z/(nN)) must vanish.
        let inst = b.instance(json!({ "n_max": 100, "N_max": 12 }), 100);
        let mut nonzero = 0;
        for n in 1..=100i128 {
            for big in 1..=12i128 {
                let g = smith_form_integers(&IntMatrix::from_rows(&[vec![n * big, n]])).diagonal[0].abs();
                if n % g != 0 {
                    nonzero += 1;
                }
            }
        }
        b.exact(inst, 1, &nonzero, &0);
    }
    // colim Z/2^i along ×2 is nonzero: A_1 survives to A_10
    let amb = Ambient::new(2, 10, 0, 0)?;
    let objects: Vec<FinMod> = (1..=10)
        .map(|i| FinMod::from_parts(amb, vec![1 << i], vec![]))
        .collect::<Result<_>>()?;
    let factor = if corrupt { 0 } else { 2 };
    let transitions = objects
        .windows(2)
        .map(|w| ModMap::new(w[0].clone(), w[1].clone(), MatrixZN::scalar(amb.modulus(), 1, factor)))
        .collect::<Result<Vec<_>>>()?;
    let sys = DirectedSystem::new(1, objects, transitions)?;
    let inst = b.instance(json!({ "system": "Z/2^i, x2", "i_max": 10 }), 10);
    let img = sys.composite(0, 9).image_log_size();
    b.compare(
        inst,
        0,
        Mode::Exact,
        format!("image of A_1 in A_10: log size {img}"),
        "nonzero".into(),
        img > 0,
    );
    Ok(b.finish())
}
