//! Smith and Hermite normal forms, integer kernels and linear Diophantine solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::IntMatrix;

/// Output of [`smith_normal_form`]: `u * m * v == s`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `s[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Position of the nonzero entry of least absolute value in the lower-right
/// block starting at `(t, t)`; ties go to the lowest `(row, col)`.
fn min_pivot(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = &s[(i, j)];
            if x.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if s[(bi, bj)].abs() <= x.abs() => {}
                _ => best = Some((i, j)),
            }
        }
    }
    best
}

/// Computes `(U, S, V)` with `U·M·V = S`, `S` diagonal with each diagonal
/// entry dividing the next, and `U`, `V` unimodular. Nonzero diagonal entries
/// are positive and come first.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut u_inv = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    // Row operations are mirrored on `u` and inversely on `u_inv`:
    // `row[a] += c * row[b]` on u  <=>  `col[b] -= c * col[a]` on u_inv.
    let swap_rows =
        |s: &mut IntMatrix, u: &mut IntMatrix, ui: &mut IntMatrix, a: usize, b: usize| {
            s.swap_rows(a, b);
            u.swap_rows(a, b);
            ui.swap_cols(a, b);
        };
    let add_row = |s: &mut IntMatrix,
                   u: &mut IntMatrix,
                   ui: &mut IntMatrix,
                   dst: usize,
                   src: usize,
                   c: &BigInt| {
        s.add_row_multiple(dst, src, c);
        u.add_row_multiple(dst, src, c);
        ui.add_col_multiple(src, dst, &-c);
    };

    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = min_pivot(&s, t) else {
            break;
        };
        swap_rows(&mut s, &mut u, &mut u_inv, t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let pivot = s[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = &s[(i, t)] / &pivot;
                add_row(&mut s, &mut u, &mut u_inv, i, t, &-q);
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = &s[(t, j)] / &pivot;
                s.add_col_multiple(j, t, &-&q);
                v.add_col_multiple(j, t, &-q);
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                // Row t and column t are cleared; enforce divisibility.
                let bad = (t + 1..rows)
                    .find(|&i| (t + 1..cols).any(|j| !s[(i, j)].is_multiple_of(&pivot)));
                match bad {
                    Some(i) => {
                        add_row(&mut s, &mut u, &mut u_inv, t, i, &BigInt::from(1));
                    }
                    None => break,
                }
            }
            let Some((pi, pj)) = min_pivot(&s, t) else {
                unreachable!("pivot row is nonzero")
            };
            swap_rows(&mut s, &mut u, &mut u_inv, t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
        }

        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
    }

    SmithForm { u, u_inv, s, v }
}

/// Row-style Hermite normal form: returns `(U, H)` with `U·M = H`, `U`
/// unimodular, `H` in row echelon form with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            // smallest nonzero |entry| in column c at or below row r
            let piv = (r..rows)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&a, &b| h[(a, c)].abs().cmp(&h[(b, c)].abs()).then(a.cmp(&b)));
            let Some(p) = piv else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut clean = true;
            for i in r + 1..rows {
                if h[(i, c)].is_zero() {
                    continue;
                }
                let q = &h[(i, c)] / &h[(r, c)];
                h.add_row_multiple(i, r, &-&q);
                u.add_row_multiple(i, r, &-q);
                if !h[(i, c)].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        for i in 0..r {
            let q = h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                h.add_row_multiple(i, r, &-&q);
                u.add_row_multiple(i, r, &-q);
            }
        }
        r += 1;
    }
    (u, h)
}

/// A basis of the integer kernel `{x : M x = 0}`, as the columns of the result.
pub fn integer_kernel(m: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(m);
    let rank = snf.rank();
    let idx: Vec<usize> = (rank..m.cols()).collect();
    snf.v.select_columns(&idx)
}

/// Some integer solution of `M x = b`, if one exists.
pub fn solve_integer(m: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), m.rows(), "right-hand side length mismatch");
    let snf = smith_normal_form(m);
    let ub = snf.u.mul_vec(b);
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); m.cols()];
    for (i, c) in ub.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                let (q, r) = c.div_rem(d);
                if !r.is_zero() {
                    return None;
                }
                y[i] = q;
            }
            _ => {
                if !c.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.mul_vec(&y))
}
