//! Dense matrices over Z_d with deterministic Gaussian elimination.

use super::field::{mod_inverse, Fp};

/// Row-major; entries always reduced mod d.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatFp {
    rows: usize,
    cols: usize,
    d: u64,
    data: Vec<u64>,
}

/// Solution set of A x = b as a particular point plus kernel basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<u64>,
    pub basis: Vec<Vec<u64>>,
}

impl MatFp {
    pub fn zeros(rows: usize, cols: usize, d: u64) -> Self {
        MatFp {
            rows,
            cols,
            d,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize, d: u64) -> Self {
        let mut m = MatFp::zeros(n, n, d);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>], d: u64) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = MatFp::zeros(r, c, d);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.set_i64(i, j, v);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn get_fp(&self, i: usize, j: usize) -> Fp {
        Fp::from_u64(self.get(i, j), self.d)
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.d;
    }

    pub fn set_i64(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v.rem_euclid(self.d as i64) as u64;
    }

    pub fn mul(&self, rhs: &MatFp) -> MatFp {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.d, rhs.d);
        let mut out = MatFp::zeros(self.rows, rhs.cols, self.d);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, cur + a * rhs.get(k, j) % self.d);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(0u64, |acc, j| {
                    (acc + self.get(i, j) * (v[j] % self.d)) % self.d
                })
            })
            .collect()
    }

    pub fn transpose(&self) -> MatFp {
        let mut out = MatFp::zeros(self.cols, self.rows, self.d);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Inverse by elimination on [A | I]; None when singular.
    pub fn inverse(&self) -> Option<MatFp> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let d = self.d;
        let mut a = self.clone();
        let mut inv = MatFp::identity(n, d);
        for col in 0..n {
            let pivot = (col..n).find(|&r| a.get(r, col) != 0)?;
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let scale = mod_inverse(a.get(col, col), d).ok()?;
            a.scale_row(col, scale);
            inv.scale_row(col, scale);
            for r in 0..n {
                if r != col {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        a.sub_scaled_row(r, col, factor);
                        inv.sub_scaled_row(r, col, factor);
                    }
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, k: u64) {
        for c in 0..self.cols {
            let v = self.get(i, c);
            self.set(i, c, v * k % self.d);
        }
    }

    /// row_i -= k * row_j
    fn sub_scaled_row(&mut self, i: usize, j: usize, k: u64) {
        for c in 0..self.cols {
            let v = self.get(i, c);
            let w = self.get(j, c) * k % self.d;
            self.set(i, c, v + self.d - w);
        }
    }

    /// Solve A x = b. Pivots are chosen deterministically (first usable row
    /// per column, columns left to right); free coordinates are zero in the
    /// particular solution and the kernel basis has one vector per free
    /// column with a 1 in that coordinate.
    pub fn solve_affine(&self, b: &[u64]) -> Option<AffineSolution> {
        assert_eq!(b.len(), self.rows);
        let d = self.d;
        let mut a = self.clone();
        let mut rhs: Vec<u64> = b.iter().map(|&v| v % d).collect();
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; self.cols];
        let mut row = 0;
        for col in 0..self.cols {
            let Some(p) = (row..self.rows).find(|&r| a.get(r, col) != 0) else {
                continue;
            };
            if p != row {
                a.swap_rows(p, row);
                rhs.swap(p, row);
            }
            let scale = mod_inverse(a.get(row, col), d).expect("nonzero pivot");
            a.scale_row(row, scale);
            rhs[row] = rhs[row] * scale % d;
            for r in 0..self.rows {
                if r != row {
                    let factor = a.get(r, col);
                    if factor != 0 {
                        a.sub_scaled_row(r, row, factor);
                        rhs[r] = (rhs[r] + d - rhs[row] * factor % d) % d;
                    }
                }
            }
            pivot_of_col[col] = Some(row);
            row += 1;
            if row == self.rows {
                break;
            }
        }
        // Rows of zeros with nonzero right-hand side mean inconsistency.
        for r in row..self.rows {
            if rhs[r] != 0 {
                return None;
            }
        }
        let mut particular = vec![0u64; self.cols];
        for (col, p) in pivot_of_col.iter().enumerate() {
            if let Some(r) = p {
                particular[col] = rhs[*r];
            }
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut v = vec![0u64; self.cols];
            v[free] = 1;
            for (col, p) in pivot_of_col.iter().enumerate() {
                if let Some(r) = p {
                    v[col] = (d - a.get(*r, free)) % d;
                }
            }
            basis.push(v);
        }
        Some(AffineSolution { particular, basis })
    }
}
