use super::MatrixZN;

/// Smith form over the chain ring `Z/p^a`: `U · m · V = diag(p^{v_1}, …)`.
///
/// Only the column side is recorded since callers present quotients of
/// row spans, which row operations leave untouched.
#[derive(Clone, Debug)]
pub struct LocalSmith {
    /// Valuations of the nonzero diagonal entries, nondecreasing.
    pub valuations: Vec<u32>,
    pub v: MatrixZN,
    pub v_inv: MatrixZN,
}

pub fn smith_local(m: &MatrixZN) -> LocalSmith {
    let md = m.modulus();
    let (nr, nc) = (m.rows(), m.cols());
    let mut w: Vec<Vec<u64>> = m.row_vecs();
    let mut v = MatrixZN::identity(md, nc);
    let mut v_inv = MatrixZN::identity(md, nc);
    let mut valuations = Vec::new();

    for r in 0..nr.min(nc) {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in w.iter().enumerate().skip(r) {
            for (j, &x) in row.iter().enumerate().skip(r) {
                if x != 0 {
                    let val = md.valuation(x);
                    if best.is_none_or(|b| val < b.2) {
                        best = Some((i, j, val));
                    }
                }
            }
        }
        let Some((i, j, val)) = best else { break };
        w.swap(r, i);
        if j != r {
            for row in w.iter_mut() {
                row.swap(r, j);
            }
            swap_cols(&mut v, r, j);
            swap_rows(&mut v_inv, r, j);
        }
        let (_, inv) = md.normalizer(w[r][r]);
        for x in w[r].iter_mut() {
            *x = md.mul(*x, inv);
        }
        let pv = md.p_pow(val);
        let pivot_row = w[r].clone();
        for row in w.iter_mut().skip(r + 1) {
            let q = row[r] / pv;
            if q != 0 {
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = md.sub(*x, md.mul(q, y));
                }
            }
        }
        for jj in r + 1..nc {
            let q = w[r][jj] / pv;
            if q == 0 {
                continue;
            }
            // col_jj -= q col_r
            for row in w.iter_mut() {
                let y = row[r];
                row[jj] = md.sub(row[jj], md.mul(q, y));
            }
            for i2 in 0..nc {
                let y = v.get(i2, r);
                let cur = v.get(i2, jj);
                v.set(i2, jj, md.sub(cur, md.mul(q, y)));
            }
            // row_r of v_inv += q row_jj
            for j2 in 0..nc {
                let y = v_inv.get(jj, j2);
                let cur = v_inv.get(r, j2);
                v_inv.set(r, j2, md.add(cur, md.mul(q, y)));
            }
        }
        valuations.push(val);
    }
    LocalSmith { valuations, v, v_inv }
}

fn swap_cols(m: &mut MatrixZN, a: usize, b: usize) {
    for i in 0..m.rows() {
        let x = m.get(i, a);
        let y = m.get(i, b);
        m.set(i, a, y);
        m.set(i, b, x);
    }
}

fn swap_rows(m: &mut MatrixZN, a: usize, b: usize) {
    for j in 0..m.cols() {
        let x = m.get(a, j);
        let y = m.get(b, j);
        m.set(a, j, y);
        m.set(b, j, x);
    }
}

/// Dense integer matrix for presentations of finitely generated abelian groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i128>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged integer matrix");
            for (j, &x) in r.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn diag(entries: &[i128]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i128) {
        self.data[i * self.cols + j] = x;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * other.get(k, j));
                }
            }
        }
        out
    }

    fn row_axpy(&mut self, dst: usize, q: i128, src: usize) {
        for j in 0..self.cols {
            let y = self.get(src, j);
            let cur = self.get(dst, j);
            self.set(dst, j, cur - q * y);
        }
    }

    fn col_axpy(&mut self, dst: usize, q: i128, src: usize) {
        for i in 0..self.rows {
            let y = self.get(i, src);
            let cur = self.get(i, dst);
            self.set(i, dst, cur - q * y);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let x = self.get(r, j);
            self.set(r, j, -x);
        }
    }
}

/// Smith form over the integers with certificates `u · m · v = diag`.
#[derive(Clone, Debug)]
pub struct SmithIntegers {
    /// `d_1 | d_2 | …`, one entry per `min(rows, cols)`, zeros last.
    pub diagonal: Vec<i128>,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithIntegers {
    pub fn diagonal_matrix(&self, rows: usize, cols: usize) -> IntMatrix {
        let mut d = IntMatrix::zeros(rows, cols);
        for (i, &x) in self.diagonal.iter().enumerate() {
            d.set(i, i, x);
        }
        d
    }
}

pub fn smith_form_integers(m: &IntMatrix) -> SmithIntegers {
    let (nr, nc) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(nr);
    let mut v = IntMatrix::identity(nc);

    for t in 0..nr.min(nc) {
        // smallest nonzero entry of the trailing block goes to (t, t)
        let Some((i0, j0)) = min_abs_entry(&a, t, |i, j| i >= t && j >= t) else {
            break;
        };
        a.swap_rows(t, i0);
        u.swap_rows(t, i0);
        a.swap_cols(t, j0);
        v.swap_cols(t, j0);
        loop {
            let piv = a.get(t, t);
            let mut clean = true;
            for i in t + 1..nr {
                let q = a.get(i, t).div_euclid(piv);
                if q != 0 {
                    a.row_axpy(i, q, t);
                    u.row_axpy(i, q, t);
                }
                if a.get(i, t) != 0 {
                    clean = false;
                }
            }
            for j in t + 1..nc {
                let q = a.get(t, j).div_euclid(piv);
                if q != 0 {
                    a.col_axpy(j, q, t);
                    v.col_axpy(j, q, t);
                }
                if a.get(t, j) != 0 {
                    clean = false;
                }
            }
            if !clean {
                let (i1, j1) = min_abs_entry(&a, t, |i, j| (i == t && j >= t) || (j == t && i >= t))
                    .expect("row or column still has a nonzero entry");
                a.swap_rows(t, i1);
                u.swap_rows(t, i1);
                a.swap_cols(t, j1);
                v.swap_cols(t, j1);
                continue;
            }
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| a.get(i, j) % piv != 0));
            match bad {
                Some(i) => {
                    // row_t += row_i, then eliminate again
                    a.row_axpy(t, -1, i);
                    u.row_axpy(t, -1, i);
                }
                None => break,
            }
        }
        if a.get(t, t) < 0 {
            a.negate_row(t);
            u.negate_row(t);
        }
    }
    let diagonal = (0..nr.min(nc)).map(|i| a.get(i, i)).collect();
    SmithIntegers { diagonal, u, v }
}

fn min_abs_entry(a: &IntMatrix, t: usize, keep: impl Fn(usize, usize) -> bool) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, i128)> = None;
    for i in t..a.rows {
        for j in t..a.cols {
            let x = a.get(i, j).abs();
            if x != 0 && keep(i, j) && best.is_none_or(|b| x < b.2) {
                best = Some((i, j, x));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}
