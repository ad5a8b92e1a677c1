use num_complex::Complex64;

use crate::{CMatrix, Error, Result};

/// Ratio `|R_00| / |R_jj|` past which pivoted-QR diagonal entries are
/// treated as numerically zero.
pub const RANK_CONDITION_LIMIT: f64 = 1e12;

/// Solution of `min ||A X - Y||_F`, minimum-norm when `A` is rank deficient.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: CMatrix,
    /// Numerical rank detected by the pivoted factorization.
    pub rank: usize,
    /// `|R_00| / |R_{rank-1,rank-1}|`; infinite for a zero matrix.
    pub condition_estimate: f64,
    /// True when the rank falls below `min(rows, cols)`.
    pub rank_deficient: bool,
}

/// Householder reflector `H = I - 2 v v^H / (v^H v)` acting on rows
/// `offset..` of its target.
struct Reflector {
    offset: usize,
    v: Vec<Complex64>,
    vv: f64,
}

impl Reflector {
    /// Builds the reflector mapping `x` onto `alpha e_1`. Returns `None`
    /// (identity) for a zero vector.
    fn new(offset: usize, x: &[Complex64]) -> Option<(Self, Complex64)> {
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return None;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v = x.to_vec();
        v[0] -= alpha;
        let vv = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Some((Reflector { offset, v, vv }, alpha))
    }

    fn apply(&self, m: &mut CMatrix, cols: std::ops::Range<usize>) {
        for c in cols {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, vi) in self.v.iter().enumerate() {
                s += vi.conj() * m[(self.offset + i, c)];
            }
            let f = s * (2.0 / self.vv);
            for (i, vi) in self.v.iter().enumerate() {
                m[(self.offset + i, c)] -= f * vi;
            }
        }
    }
}

fn column_tail(m: &CMatrix, col: usize, from: usize) -> Vec<Complex64> {
    (from..m.nrows()).map(|i| m[(i, col)]).collect()
}

/// Solves `min ||A X - Y||_F` by column-pivoted Householder QR.
///
/// Full column rank inputs are solved by back substitution. Otherwise a
/// second QR of the retained trapezoid (complete orthogonal
/// decomposition) yields the minimum-norm minimizer; this also covers
/// underdetermined systems with more columns than rows.
pub fn least_squares_solve(a: &CMatrix, y: &CMatrix) -> Result<LeastSquares> {
    let (q, k) = a.shape();
    if q == 0 || k == 0 {
        return Err(Error::dimension("least squares needs a non-empty matrix"));
    }
    if y.nrows() != q {
        return Err(Error::dimension(format!(
            "left-hand side has {q} rows but right-hand side has {}",
            y.nrows()
        )));
    }
    let ncols_rhs = y.ncols();

    let mut work = a.clone();
    let mut rhs = y.clone();
    let mut perm: Vec<usize> = (0..k).collect();
    let steps = q.min(k);
    let mut diag = Vec::with_capacity(steps);

    for j in 0..steps {
        let (pivot, _) = (j..k)
            .map(|c| {
                let n: f64 = (j..q).map(|i| work[(i, c)].norm_sqr()).sum();
                (c, n)
            })
            .fold((j, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot != j {
            work.swap_columns(j, pivot);
            perm.swap(j, pivot);
        }
        match Reflector::new(j, &column_tail(&work, j, j)) {
            Some((h, alpha)) => {
                h.apply(&mut work, j + 1..k);
                h.apply(&mut rhs, 0..ncols_rhs);
                work[(j, j)] = alpha;
                for i in j + 1..q {
                    work[(i, j)] = Complex64::new(0.0, 0.0);
                }
                diag.push(alpha.norm());
            }
            None => diag.push(0.0),
        }
    }

    let lead = diag[0];
    let rank = if lead == 0.0 {
        0
    } else {
        diag.iter()
            .take_while(|&&d| d > 0.0 && lead / d <= RANK_CONDITION_LIMIT)
            .count()
    };
    let condition_estimate = if rank == 0 {
        f64::INFINITY
    } else {
        lead / diag[rank - 1]
    };
    let rank_deficient = rank < steps;

    let mut z = CMatrix::zeros(k, ncols_rhs);
    if rank == k {
        back_substitute(&work, &rhs, &mut z, k);
    } else if rank > 0 {
        min_norm_solve(&work, &rhs, &mut z, rank);
    }

    let mut solution = CMatrix::zeros(k, ncols_rhs);
    for (i, &p) in perm.iter().enumerate() {
        solution.set_row(p, &z.row(i));
    }

    Ok(LeastSquares {
        solution,
        rank,
        condition_estimate,
        rank_deficient,
    })
}

/// Solves the leading `n x n` upper triangle of `r` against `rhs`.
fn back_substitute(r: &CMatrix, rhs: &CMatrix, out: &mut CMatrix, n: usize) {
    for c in 0..rhs.ncols() {
        for i in (0..n).rev() {
            let mut s = rhs[(i, c)];
            for l in i + 1..n {
                s -= r[(i, l)] * out[(l, c)];
            }
            out[(i, c)] = s / r[(i, i)];
        }
    }
}

/// Minimum-norm solution of `R_top z = rhs[..rank]` where `R_top` is the
/// leading `rank x k` trapezoid of `r`.
fn min_norm_solve(r: &CMatrix, rhs: &CMatrix, out: &mut CMatrix, rank: usize) {
    let k = r.ncols();
    // R_top^H = Z [T; 0]  =>  R_top = T^H Z^H.
    let mut b = CMatrix::from_fn(k, rank, |i, j| r[(j, i)].conj());
    let mut reflectors = Vec::with_capacity(rank);
    for j in 0..rank {
        if let Some((h, alpha)) = Reflector::new(j, &column_tail(&b, j, j)) {
            h.apply(&mut b, j + 1..rank);
            b[(j, j)] = alpha;
            for i in j + 1..k {
                b[(i, j)] = Complex64::new(0.0, 0.0);
            }
            reflectors.push(h);
        }
    }

    for c in 0..rhs.ncols() {
        // T^H w = rhs (lower triangular, forward substitution)
        let mut w = vec![Complex64::new(0.0, 0.0); rank];
        for i in 0..rank {
            let mut s = rhs[(i, c)];
            for (l, wl) in w.iter().enumerate().take(i) {
                s -= b[(l, i)].conj() * wl;
            }
            w[i] = s / b[(i, i)].conj();
        }
        let mut col = CMatrix::zeros(k, 1);
        for (i, wi) in w.into_iter().enumerate() {
            col[(i, 0)] = wi;
        }
        for h in reflectors.iter().rev() {
            h.apply(&mut col, 0..1);
        }
        out.set_column(c, &col.column(0));
    }
}
