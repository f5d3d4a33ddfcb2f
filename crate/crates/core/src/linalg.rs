//! Exact linear algebra over the rationals.
//!
//! Kernel computation is fraction free: rows are scaled to integers and
//! reduced with the Bareiss algorithm; back substitution then recovers a
//! canonical rational basis (primitive integer vectors, first nonzero entry
//! positive). Large overdetermined systems go through the Gram matrix
//! `A^T A`, which has the same kernel over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

pub type RatMatrix = Vec<Vec<Rational>>;

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect()
}

pub fn zero_matrix(rows: usize, cols: usize) -> RatMatrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn transpose(m: &RatMatrix) -> RatMatrix {
    if m.is_empty() {
        return Vec::new();
    }
    let (r, c) = (m.len(), m[0].len());
    let mut out = zero_matrix(c, r);
    for i in 0..r {
        for j in 0..c {
            out[j][i] = m[i][j].clone();
        }
    }
    out
}

pub fn mat_mul(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (r, k) = (a.len(), b.len());
    let c = if k == 0 { 0 } else { b[0].len() };
    let mut out = zero_matrix(r, c);
    for i in 0..r {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[l][j].is_zero() {
                    out[i][j] += &a[i][l] * &b[l][j];
                }
            }
        }
    }
    out
}

pub fn mat_sub(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn mat_add(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &RatMatrix, s: &Rational) -> RatMatrix {
    a.iter()
        .map(|r| r.iter().map(|x| x * s).collect())
        .collect()
}

pub fn mat_vec(a: &RatMatrix, v: &[Rational]) -> Vec<Rational> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn vec_dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_matrix(m: &RatMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|x| x.is_zero()))
}

pub fn is_symmetric(m: &RatMatrix) -> bool {
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| m[i][j] == m[j][i]))
}

pub fn is_antisymmetric(m: &RatMatrix) -> bool {
    let n = m.len();
    (0..n).all(|i| (0..n).all(|j| m[i][j] == -m[j][i].clone()))
}

pub fn to_f64_matrix(m: &RatMatrix) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(crate::scalar::Scalar::to_f64).collect())
        .collect()
}

/// Scale a rational row to a primitive integer row (clears denominators,
/// divides by the content). The zero row maps to the zero row.
fn to_primitive_int_row(row: &[Rational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in row {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let ints: Vec<BigInt> = row
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(v);
    }
    if gcd.is_zero() || gcd.is_one() {
        return ints;
    }
    ints.iter().map(|v| v / &gcd).collect()
}

/// Canonical form of a rational vector: primitive integers, first nonzero
/// entry positive.
pub fn canonical_vector(v: &[Rational]) -> Vec<Rational> {
    let ints = to_primitive_int_row(v);
    let sign = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| if x.is_negative() { -1 } else { 1 })
        .unwrap_or(1);
    ints.iter()
        .map(|x| Rational::from_integer(if sign < 0 { -x.clone() } else { x.clone() }))
        .collect()
}

struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivot_cols: Vec<usize>,
}

/// Fraction-free (Bareiss) row echelon form of an integer matrix.
fn bareiss_echelon(mut m: Vec<Vec<BigInt>>, cols: usize) -> Echelon {
    let nrows = m.len();
    let mut pivot_cols = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0usize;
    for col in 0..cols {
        if r >= nrows {
            break;
        }
        // smallest nonzero pivot keeps intermediate entries small
        let pivot_row = (r..nrows)
            .filter(|&i| !m[i][col].is_zero())
            .min_by_key(|&i| m[i][col].abs());
        let Some(pr) = pivot_row else { continue };
        m.swap(r, pr);
        for i in r + 1..nrows {
            for j in col + 1..cols {
                let num = &m[r][col] * &m[i][j] - &m[i][col] * &m[r][j];
                m[i][j] = num / &prev;
            }
            m[i][col] = BigInt::zero();
        }
        prev = m[r][col].clone();
        pivot_cols.push(col);
        r += 1;
    }
    m.truncate(pivot_cols.len());
    Echelon { rows: m, pivot_cols }
}

/// Basis of the right kernel `{x : A x = 0}` of a rational constraint
/// matrix, one canonical vector per free column.
pub fn kernel_basis(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    // Overdetermined systems reduce through the Gram matrix, which has the
    // same kernel over the rationals (sum of squares is zero iff each term
    // is zero).
    if rows.len() > 2 * cols.max(4) {
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| to_primitive_int_row(r))
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .collect();
        let mut gram = vec![vec![BigInt::zero(); cols]; cols];
        for row in &int_rows {
            let support: Vec<usize> = (0..cols).filter(|&j| !row[j].is_zero()).collect();
            for &i in &support {
                for &j in &support {
                    let prod = &row[i] * &row[j];
                    gram[i][j] += prod;
                }
            }
        }
        let gram_rat: Vec<Vec<Rational>> = gram
            .into_iter()
            .map(|r| r.into_iter().map(Rational::from_integer).collect())
            .collect();
        return kernel_basis_small(&gram_rat, cols);
    }
    kernel_basis_small(rows, cols)
}

fn kernel_basis_small(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.len(), cols);
            to_primitive_int_row(r)
        })
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    let ech = bareiss_echelon(int_rows, cols);
    let pivot_set: std::collections::BTreeSet<usize> = ech.pivot_cols.iter().copied().collect();
    let free_cols: Vec<usize> = (0..cols).filter(|c| !pivot_set.contains(c)).collect();
    let mut basis = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut x = vec![Rational::zero(); cols];
        x[fc] = Rational::one();
        for (i, &pc) in ech.pivot_cols.iter().enumerate().rev() {
            let mut acc = Rational::zero();
            for j in pc + 1..cols {
                if !ech.rows[i][j].is_zero() && !x[j].is_zero() {
                    acc += Rational::from_integer(ech.rows[i][j].clone()) * &x[j];
                }
            }
            x[pc] = -acc / Rational::from_integer(ech.rows[i][pc].clone());
        }
        basis.push(canonical_vector(&x));
    }
    basis
}

/// Rank of a rational matrix.
pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    let int_rows: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| to_primitive_int_row(r))
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    bareiss_echelon(int_rows, cols).pivot_cols.len()
}

/// One solution of `A x = b` when the system is consistent (free variables
/// are set to zero). Plain rational elimination; systems here are small.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let nrows = a.len();
    let cols = if nrows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0usize;
    for col in 0..cols {
        let Some(pr) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = Rational::one() / m[r][col].clone();
        for j in col..=cols {
            m[r][j] = &m[r][j] * &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in col..=cols {
                    let sub = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - &sub;
                }
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == nrows {
            break;
        }
    }
    // inconsistent when a zero row has nonzero rhs
    for i in r..nrows {
        if !m[i][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Rational::zero(); cols];
    for (row, col) in pivots {
        x[col] = m[row][cols].clone();
    }
    Some(x)
}

/// Inverse of a square rational matrix, if nonsingular.
pub fn invert(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let pr = (col..n).find(|&i| !a[i][col].is_zero())?;
        a.swap(col, pr);
        let inv = Rational::one() / a[col][col].clone();
        for j in 0..2 * n {
            a[col][j] = &a[col][j] * &inv;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    let sub = &f * &a[col][j];
                    a[i][j] = &a[i][j] - &sub;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

/// Orthogonal projector onto the span of the given (independent) vectors,
/// with respect to the standard inner product.
pub fn projector(basis: &[Vec<Rational>], dim: usize) -> RatMatrix {
    if basis.is_empty() {
        return zero_matrix(dim, dim);
    }
    let k = basis.len();
    let mut gram = zero_matrix(k, k);
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = vec_dot(&basis[i], &basis[j]);
        }
    }
    let inv = invert(&gram).expect("independent vectors have invertible Gram matrix");
    let mut p = zero_matrix(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let mut acc = Rational::zero();
            for i in 0..k {
                for j in 0..k {
                    if !inv[i][j].is_zero() {
                        acc += &basis[i][r] * &inv[i][j] * &basis[j][c];
                    }
                }
            }
            p[r][c] = acc;
        }
    }
    p
}

/// Incremental row-reduced span of rational vectors.
#[derive(Debug, Clone, Default)]
pub struct SpanBuilder {
    rows: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl SpanBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !w[p].is_zero() {
                let f = w[p].clone();
                for (wi, ri) in w.iter_mut().zip(row) {
                    let sub = &f * ri;
                    *wi = &*wi - &sub;
                }
            }
        }
        w
    }

    /// Returns true when the vector enlarged the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut w = self.reduce(v);
        let Some(p) = w.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = Rational::one() / w[p].clone();
        for x in w.iter_mut() {
            *x = &*x * &inv;
        }
        // keep full reduced form for canonical bases
        for (row, &rp) in self.rows.iter_mut().zip(&self.pivots) {
            if rp != p && !row[p].is_zero() {
                let f = row[p].clone();
                for (ri, wi) in row.iter_mut().zip(&w) {
                    let sub = &f * wi;
                    *ri = &*ri - &sub;
                }
            }
        }
        let at = self.pivots.iter().position(|&q| q > p).unwrap_or(self.rows.len());
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        true
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.rows
    }
}

/// Basis of `{X : X M = M X for every M}`, as matrices.
pub fn commutant(mats: &[RatMatrix], n: usize) -> Vec<RatMatrix> {
    let unknowns = n * n;
    let mut rows = Vec::new();
    for m in mats {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Rational::zero(); unknowns];
                for k in 0..n {
                    // (X M)_{ij} picks X[i][k] M[k][j]
                    row[i * n + k] += &m[k][j];
                    // (M X)_{ij} picks M[i][k] X[k][j]
                    row[k * n + j] -= &m[i][k];
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    kernel_basis(&rows, unknowns)
        .into_iter()
        .map(|v| (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn rv(vals: &[i64]) -> Vec<Rational> {
        vals.iter().map(|&v| rat_int(v)).collect()
    }

    #[test]
    fn kernel_of_simple_system() {
        // x + y + z = 0, x - z = 0  =>  kernel spanned by (1, -2, 1)
        let rows = vec![rv(&[1, 1, 1]), rv(&[1, 0, -1])];
        let basis = kernel_basis(&rows, 3);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0], rv(&[1, -2, 1]));
    }

    #[test]
    fn kernel_with_rational_entries() {
        let rows = vec![vec![rat(1, 2), rat(1, 3)]];
        let basis = kernel_basis(&rows, 2);
        assert_eq!(basis.len(), 1);
        let v = &basis[0];
        assert!( (&rows[0][0] * &v[0] + &rows[0][1] * &v[1]).is_zero() );
    }

    #[test]
    fn kernel_gram_route_matches_direct() {
        // many redundant rows trigger the Gram path
        let base = vec![rv(&[1, 2, 3, 4]), rv(&[0, 1, 0, 1])];
        let mut rows = Vec::new();
        for k in 1..15i64 {
            rows.push(base[0].iter().map(|x| x * rat_int(k)).collect());
            rows.push(base[1].iter().map(|x| x * rat_int(k + 1)).collect());
        }
        let direct = kernel_basis_small(&rows, 4);
        let gram = kernel_basis(&rows, 4);
        assert_eq!(direct.len(), gram.len());
        for v in &gram {
            for r in &base {
                assert!(vec_dot(r, v).is_zero());
            }
        }
    }

    #[test]
    fn solve_and_invert() {
        let a = vec![rv(&[2, 1]), rv(&[1, 3])];
        let x = solve(&a, &rv(&[5, 10])).unwrap();
        assert_eq!(x, vec![rat_int(1), rat_int(3)]);
        assert!(solve(&[rv(&[1, 1]), rv(&[1, 1])], &rv(&[1, 2])).is_none());

        let inv = invert(&a).unwrap();
        let prod = mat_mul(&a, &inv);
        assert_eq!(prod, identity(2));
        assert!(invert(&vec![rv(&[1, 2]), rv(&[2, 4])]).is_none());
    }

    #[test]
    fn span_builder_tracks_rank() {
        let mut span = SpanBuilder::new();
        assert!(span.insert(&rv(&[1, 2, 0])));
        assert!(!span.insert(&rv(&[2, 4, 0])));
        assert!(span.insert(&rv(&[0, 0, 3])));
        assert_eq!(span.dim(), 2);
        assert!(span.contains(&rv(&[3, 6, 3])));
        assert!(!span.contains(&rv(&[0, 1, 0])));
    }

    #[test]
    fn commutant_of_diagonal() {
        // commutant of diag(1, 2) is the diagonal matrices
        let d = vec![rv(&[1, 0]), rv(&[0, 2])];
        let c = commutant(&[d], 2);
        assert_eq!(c.len(), 2);
        for m in &c {
            assert!(m[0][1].is_zero() && m[1][0].is_zero());
        }
    }

    #[test]
    fn projector_is_idempotent_symmetric() {
        let basis = vec![rv(&[1, 1, 0]), rv(&[0, 1, 1])];
        let p = projector(&basis, 3);
        assert_eq!(mat_mul(&p, &p), p);
        assert!(is_symmetric(&p));
        assert_eq!(mat_vec(&p, &rv(&[1, 1, 0])), rv(&[1, 1, 0]));
    }
}
