//! Canonical form of two-symmetric pp-waves, isometry equivalence of
//! canonical forms, and the Cahen-Wallach normalization of locally
//! symmetric ones.
//!
//! A two-symmetric potential `(u h_ij + f_ij)x^i x^j + g_i(u) x^i + k(u)`
//! reduces to `(λ_i δ_ij u + F_ij) x^i x^j` by sorting an orthogonal
//! eigenbasis of `h` (numeric in general, an exact permutation when `h` is
//! already diagonal) and by eliminating `g` and `k` with a shift `b(u)`,
//! `d(u)`. The shift always exists by ODE theory; a polynomial witness is
//! searched for by an ascending-degree ansatz and reported when found.
//!
//! Two canonical forms are isometric iff they share the `λ` vector and
//! `F2 = c H + a^T F1 a` for some real `c` and an orthogonal `a` commuting
//! with `H = diag(λ)`. With simple spectrum the stabilizer is the diagonal
//! sign group and the decision is an exhaustive (complete) search; with
//! repeated eigenvalues the decision compares conjugation invariants and
//! attempts numerical alignment, returning `undetermined` when neither
//! route settles the question.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::classify::structural_two_symmetry_test;
use crate::error::{Error, Result};
use crate::linalg;
use crate::metric::PpWaveMetric;
use crate::poly::{PolyDoc, Polynomial};
use crate::scalar::{rat, Rational, Scalar};

pub const CERTIFICATE_TOL: f64 = 1e-9;
const LAMBDA_MATCH_TOL: f64 = 1e-9;
const MULTIPLICITY_TOL: f64 = 1e-8;
const NONZERO_LAMBDA_TOL: f64 = 1e-12;
const INVARIANT_TOL: f64 = 1e-7;
pub const KILL_DEGREE_BUDGET: u16 = 12;

#[derive(Debug, Clone)]
pub enum ShiftWitness {
    /// `g` and `k` already vanish.
    NotNeeded,
    /// Explicit polynomials eliminating the linear and scalar parts.
    Witness {
        b: Vec<Polynomial<Rational>>,
        d: Polynomial<Rational>,
    },
    /// The eliminating shift exists by ODE theory but is not polynomial
    /// (or the input was numeric).
    Existence,
}

#[derive(Debug, Clone)]
pub struct Provenance {
    /// Orthogonal matrix diagonalizing `h` (columns sorted by eigenvalue).
    pub a: Vec<Vec<f64>>,
    /// `u`-translation; canonicalization keeps `c = 0`.
    pub c: f64,
    pub shift: ShiftWitness,
}

/// Normal form of a two-symmetric potential: `H = (λ_i δ_ij u + F_ij) x^i x^j` with
/// `λ_1 <= ... <= λ_n`, at least one `λ_i` nonzero, `F` symmetric.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub n: usize,
    pub lambdas: Vec<f64>,
    pub f: Vec<Vec<f64>>,
    pub provenance: Option<Provenance>,
}

impl CanonicalForm {
    pub fn from_parts(lambdas: Vec<f64>, f: Vec<Vec<f64>>) -> Result<Self> {
        let c = CanonicalForm {
            n: lambdas.len(),
            lambdas,
            f,
            provenance: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.len() != self.n || self.f.len() != self.n {
            return Err(Error::NotCanonical("dimension mismatch".into()));
        }
        if self.f.iter().any(|row| row.len() != self.n) {
            return Err(Error::NotCanonical("F is not square".into()));
        }
        if self.lambdas.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotCanonical("lambdas not sorted".into()));
        }
        if !self.lambdas.iter().any(|l| l.abs() > NONZERO_LAMBDA_TOL) {
            return Err(Error::NotCanonical("all lambdas vanish".into()));
        }
        for i in 0..self.n {
            for j in 0..self.n {
                if (self.f[i][j] - self.f[j][i]).abs() > 1e-12 {
                    return Err(Error::NotCanonical("F not symmetric".into()));
                }
            }
        }
        Ok(())
    }

    /// The exact metric with this canonical potential (rationalized
    /// coefficients are not attempted; entries are binary64 ratios).
    pub fn to_numeric_metric(&self) -> Result<PpWaveMetric<f64>> {
        let n = self.n;
        let nv = n + 2;
        let mut h = Polynomial::<f64>::zero(nv);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0u16; nv];
                e[1 + i] += 1;
                e[1 + j] += 1;
                let mut eu = e.clone();
                eu[nv - 1] = 1;
                if i == j {
                    h.add_term(eu, self.lambdas[i]);
                }
                // free double sum: x_i x_j collects f_ij + f_ji
                h.add_term(e, self.f[i][j]);
            }
        }
        PpWaveMetric::new(n, h)
    }
}

fn to_f64_mat<C: Scalar>(m: &[Vec<C>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_f64()).collect())
        .collect()
}

fn mat_max_abs(m: &[Vec<f64>]) -> f64 {
    m.iter()
        .flat_map(|r| r.iter())
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, k) = (a.len(), b.len());
    let c = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![0.0; c]; r];
    for i in 0..r {
        for l in 0..k {
            if a[i][l] != 0.0 {
                for j in 0..c {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

fn mat_t(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (r, c) = (a.len(), a[0].len());
    let mut out = vec![vec![0.0; r]; c];
    for i in 0..r {
        for j in 0..c {
            out[j][i] = a[i][j];
        }
    }
    out
}

/// Sorted orthogonal diagonalization of a symmetric matrix: returns
/// `(lambdas ascending, a)` with `a^T h a = diag(lambdas)`. Exactly a
/// permutation when `h` is already diagonal.
fn diagonalize_sorted(h: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = h.len();
    let scale = mat_max_abs(h).max(1.0);
    let off = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j)
        .fold(0.0f64, |acc, (i, j)| acc.max(h[i][j].abs()));
    if off <= 1e-14 * scale {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| h[a][a].partial_cmp(&h[b][b]).expect("finite"));
        let lambdas: Vec<f64> = order.iter().map(|&i| h[i][i]).collect();
        let mut a = vec![vec![0.0; n]; n];
        for (k, &i) in order.iter().enumerate() {
            a[i][k] = 1.0;
        }
        return Ok((lambdas, a));
    }
    let m = DMatrix::from_fn(n, n, |i, j| h[i][j]);
    let eig =
        nalgebra::SymmetricEigen::try_new(m, 1e-13, 10_000).ok_or(Error::DegenerateEigenproblem)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite"));
    let lambdas: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut a = vec![vec![0.0; n]; n];
    for (k, &src) in order.iter().enumerate() {
        for i in 0..n {
            a[i][k] = eig.eigenvectors[(i, src)];
        }
    }
    Ok((lambdas, a))
}

fn conjugate(a: &[Vec<f64>], f: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let at = mat_t(a);
    let mut out = matmul(&matmul(&at, f), a);
    let n = out.len();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (out[i][j] + out[j][i]);
            out[i][j] = avg;
            out[j][i] = avg;
        }
    }
    out
}

/// Reduce an exact two-symmetric metric to canonical form. The recorded
/// transformation keeps `c = 0`; `b`, `d` are constructed when a
/// polynomial shift exists and reported existence-only otherwise.
pub fn canonicalize(m: &PpWaveMetric<Rational>) -> Result<CanonicalForm> {
    let t = structural_two_symmetry_test(m, 0.0).ok_or(Error::NotTwoSymmetric)?;
    let (lambdas, a) = diagonalize_sorted(&to_f64_mat(&t.h))?;
    let f = conjugate(&a, &to_f64_mat(&t.f));
    let shift = if t.g.iter().all(|p| p.is_zero()) && t.k.is_zero() {
        ShiftWitness::NotNeeded
    } else {
        match kill_linear_terms(&t.h, &t.f, &t.g, KILL_DEGREE_BUDGET)? {
            KillReport::Witness(b) => {
                let d = integrate_d(&t, &b, m)?;
                ShiftWitness::Witness { b, d }
            }
            KillReport::ExistenceOnly => ShiftWitness::Existence,
        }
    };
    let form = CanonicalForm {
        n: m.n(),
        lambdas,
        f,
        provenance: Some(Provenance { a, c: 0.0, shift }),
    };
    form.validate()?;
    Ok(form)
}

/// Canonicalize a floating-point metric (tolerance-based template
/// extraction; the shift is never constructed).
pub fn canonicalize_numeric(m: &PpWaveMetric<f64>) -> Result<CanonicalForm> {
    let tol = 1e-9 * m.potential().max_coef_abs().max(1.0);
    let t = structural_two_symmetry_test(m, tol).ok_or(Error::NotTwoSymmetric)?;
    let (lambdas, a) = diagonalize_sorted(&t.h)?;
    let f = conjugate(&a, &t.f);
    let shift = if t.g.iter().all(|p| p.is_negligible(tol)) && t.k.is_negligible(tol) {
        ShiftWitness::NotNeeded
    } else {
        ShiftWitness::Existence
    };
    let form = CanonicalForm {
        n: m.n(),
        lambdas,
        f,
        provenance: Some(Provenance { a, c: 0.0, shift }),
    };
    form.validate()?;
    Ok(form)
}

/// `d(u)` with `d' = -(Σ (b^j')² + (u h + f)_{ij} b^i b^j + g_i b^i + k) / 2`,
/// integrated termwise from `u^t` to `u^{t+1}/(t+1)`.
fn integrate_d(
    t: &crate::classify::QuadraticTemplate<Rational>,
    b: &[Polynomial<Rational>],
    m: &PpWaveMetric<Rational>,
) -> Result<Polynomial<Rational>> {
    let n = m.n();
    let nv = m.num_vars();
    let u = Polynomial::<Rational>::var(nv, m.var_u())?;
    let mut rhs = t.k.clone();
    for j in 0..n {
        let bd = b[j].diff(m.var_u())?;
        rhs = rhs.checked_add(&bd.checked_mul(&bd)?)?;
        rhs = rhs.checked_add(&t.g[j].checked_mul(&b[j])?)?;
        for i in 0..n {
            let coef = u
                .scale(&t.h[i][j])
                .checked_add(&Polynomial::constant(nv, t.f[i][j].clone()))?;
            rhs = rhs.checked_add(&coef.checked_mul(&b[i].checked_mul(&b[j])?)?)?;
        }
    }
    let d_dot = rhs.scale(&rat(-1, 2));
    let mut d = Polynomial::zero(nv);
    for (e, c) in d_dot.terms() {
        let mut e2 = e.clone();
        e2[m.var_u()] += 1;
        let k = e2[m.var_u()] as i64;
        d.add_term(e2, c * &rat(1, k));
    }
    Ok(d)
}

#[derive(Debug, Clone)]
pub enum KillReport {
    /// Polynomial `b(u)` with `b'' = (u h + f) b + g/2`.
    Witness(Vec<Polynomial<Rational>>),
    /// No polynomial solution up to the degree budget; smooth solutions
    /// exist locally by ODE theory.
    ExistenceOnly,
}

/// Search for a polynomial solution of the linear second-order system
/// `b'' = (u h + f) b + g/2` by an ascending-degree ansatz.
pub fn kill_linear_terms(
    h: &[Vec<Rational>],
    f: &[Vec<Rational>],
    g: &[Polynomial<Rational>],
    max_degree: u16,
) -> Result<KillReport> {
    let n = h.len();
    if f.len() != n || g.len() != n {
        return Err(Error::InvalidInput("h, f, g dimension mismatch".into()));
    }
    let Some(first) = g.first() else {
        return Err(Error::BadDimension);
    };
    let nv = first.num_vars();
    let u_var = nv - 1;
    for p in g {
        if (0..u_var).any(|i| p.depends_on(i)) {
            return Err(Error::NotAFunctionOfU);
        }
    }
    // g as coefficient vectors over u
    let deg_g = g.iter().map(|p| p.degree_in(u_var)).max().unwrap_or(0) as usize;
    let g_coef: Vec<Vec<Rational>> = g
        .iter()
        .map(|p| {
            (0..=deg_g)
                .map(|t| {
                    let mut e = vec![0u16; nv];
                    e[u_var] = t as u16;
                    p.coefficient(&e)
                })
                .collect()
        })
        .collect();

    for deg_b in 0..=max_degree as usize {
        let cols = n * (deg_b + 1);
        let top = (deg_b + 1).max(deg_g);
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for t in 0..=top {
            for i in 0..n {
                let mut row = vec![Rational::zero(); cols];
                // b_i'' contributes (t+2)(t+1) β_i[t+2]
                if t + 2 <= deg_b {
                    row[i * (deg_b + 1) + t + 2] =
                        Rational::from_integer((((t + 2) * (t + 1)) as i64).into());
                }
                // -(u h b)_i at degree t uses β_j[t-1]
                if t >= 1 && t - 1 <= deg_b {
                    for j in 0..n {
                        row[j * (deg_b + 1) + t - 1] -= &h[i][j];
                    }
                }
                // -(f b)_i at degree t uses β_j[t]
                if t <= deg_b {
                    for j in 0..n {
                        row[j * (deg_b + 1) + t] -= &f[i][j];
                    }
                }
                rows.push(row);
                rhs.push(if t <= deg_g {
                    &g_coef[i][t] * &rat(1, 2)
                } else {
                    Rational::zero()
                });
            }
        }
        if let Some(beta) = linalg::solve(&rows, &rhs) {
            let mut b = Vec::with_capacity(n);
            for i in 0..n {
                let mut p = Polynomial::zero(nv);
                for (k, coef) in beta[i * (deg_b + 1)..(i + 1) * (deg_b + 1)].iter().enumerate() {
                    let mut e = vec![0u16; nv];
                    e[u_var] = k as u16;
                    p.add_term(e, coef.clone());
                }
                b.push(p);
            }
            debug_assert!(verify_kill_witness(h, f, g, &b));
            return Ok(KillReport::Witness(b));
        }
    }
    Ok(KillReport::ExistenceOnly)
}

fn verify_kill_witness(
    h: &[Vec<Rational>],
    f: &[Vec<Rational>],
    g: &[Polynomial<Rational>],
    b: &[Polynomial<Rational>],
) -> bool {
    let n = h.len();
    let nv = g[0].num_vars();
    let u_var = nv - 1;
    let u = Polynomial::<Rational>::var(nv, u_var).expect("in range");
    (0..n).all(|i| {
        let mut lhs = b[i]
            .diff(u_var)
            .and_then(|p| p.diff(u_var))
            .expect("in range");
        for j in 0..n {
            let coef = u
                .scale(&h[i][j])
                .checked_add(&Polynomial::constant(nv, f[i][j].clone()))
                .expect("same vars");
            lhs = lhs
                .checked_sub(&coef.checked_mul(&b[j]).expect("same vars"))
                .expect("same vars");
        }
        lhs = lhs
            .checked_sub(&g[i].scale(&rat(1, 2)))
            .expect("same vars");
        lhs.is_zero()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equivalence {
    Equivalent,
    NotEquivalent,
    Undetermined,
}

#[derive(Debug, Clone)]
pub struct EquivalenceVerdict {
    pub status: Equivalence,
    /// Certificate `(c, a)` with `F2 = c H + a^T F1 a`, present iff
    /// equivalent.
    pub c: Option<f64>,
    pub a: Option<Vec<Vec<f64>>>,
}

impl EquivalenceVerdict {
    fn not_equivalent() -> Self {
        EquivalenceVerdict {
            status: Equivalence::NotEquivalent,
            c: None,
            a: None,
        }
    }

    fn equivalent(c: f64, a: Vec<Vec<f64>>) -> Self {
        EquivalenceVerdict {
            status: Equivalence::Equivalent,
            c: Some(c),
            a: Some(a),
        }
    }

    fn undetermined() -> Self {
        EquivalenceVerdict {
            status: Equivalence::Undetermined,
            c: None,
            a: None,
        }
    }
}

fn frob_inner(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x * y))
        .sum()
}

fn diag_matrix(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = v[i];
    }
    m
}

/// Max-norm residual of a certificate: orthogonality, H-stabilization and
/// the F relation, each required below [`CERTIFICATE_TOL`].
pub fn certificate_residual(
    c1: &CanonicalForm,
    c2: &CanonicalForm,
    c: f64,
    a: &[Vec<f64>],
) -> f64 {
    let n = c1.n;
    let h = diag_matrix(&c1.lambdas);
    let at = mat_t(a);
    let mut worst = 0.0f64;
    let ata = matmul(&at, a);
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((ata[i][j] - id).abs());
        }
    }
    let atha = matmul(&matmul(&at, &h), a);
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((atha[i][j] - h[i][j]).abs());
        }
    }
    let atfa = matmul(&matmul(&at, &c1.f), a);
    for i in 0..n {
        for j in 0..n {
            worst = worst.max((c2.f[i][j] - c * h[i][j] - atfa[i][j]).abs());
        }
    }
    worst
}

fn eigenvalues_sorted(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    if n == 0 {
        return Vec::new();
    }
    let dm = DMatrix::from_fn(n, n, |i, j| 0.5 * (m[i][j] + m[j][i]));
    let eig = nalgebra::SymmetricEigen::new(dm);
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v
}

fn submatrix(m: &[Vec<f64>], rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|&i| cols.iter().map(|&j| m[i][j]).collect())
        .collect()
}

/// Decide isometry equivalence of two canonical forms.
pub fn decide_equivalence(c1: &CanonicalForm, c2: &CanonicalForm) -> Result<EquivalenceVerdict> {
    c1.validate()?;
    c2.validate()?;
    if c1.n != c2.n {
        return Ok(EquivalenceVerdict::not_equivalent());
    }
    let n = c1.n;
    if c1
        .lambdas
        .iter()
        .zip(&c2.lambdas)
        .any(|(a, b)| (a - b).abs() > LAMBDA_MATCH_TOL)
    {
        return Ok(EquivalenceVerdict::not_equivalent());
    }
    let h = diag_matrix(&c1.lambdas);
    let hh = frob_inner(&h, &h);
    debug_assert!(hh > 0.0);
    let c = (frob_inner(&c2.f, &h) - frob_inner(&c1.f, &h)) / hh;
    // target for a^T F1 a
    let mut fhat = c2.f.clone();
    for i in 0..n {
        fhat[i][i] -= c * c1.lambdas[i];
    }

    // eigenvalue multiplicity blocks
    let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..n {
        let prev = c1.lambdas[i - 1];
        let cur = c1.lambdas[i];
        if (cur - prev).abs() <= MULTIPLICITY_TOL * cur.abs().max(prev.abs()).max(1.0) {
            blocks.last_mut().expect("nonempty").push(i);
        } else {
            blocks.push(vec![i]);
        }
    }

    if blocks.iter().all(|b| b.len() == 1) {
        // simple spectrum: diagonal sign stabilizer, complete search
        for mask in 0..(1u64 << (n - 1)) {
            let mut eps = vec![1.0f64; n];
            for (i, e) in eps.iter_mut().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 1 {
                    *e = -1.0;
                }
            }
            let ok = (0..n).all(|i| {
                (0..n).all(|j| (eps[i] * eps[j] * c1.f[i][j] - fhat[i][j]).abs() <= CERTIFICATE_TOL)
            });
            if ok {
                return Ok(EquivalenceVerdict::equivalent(c, diag_matrix(&eps)));
            }
        }
        return Ok(EquivalenceVerdict::not_equivalent());
    }

    // conjugation invariants: global spectrum, diagonal block spectra,
    // cross-block Frobenius pairings
    let s1 = eigenvalues_sorted(&c1.f);
    let s2 = eigenvalues_sorted(&fhat);
    if s1.iter().zip(&s2).any(|(a, b)| (a - b).abs() > INVARIANT_TOL) {
        return Ok(EquivalenceVerdict::not_equivalent());
    }
    for bl in &blocks {
        let b1 = eigenvalues_sorted(&submatrix(&c1.f, bl, bl));
        let b2 = eigenvalues_sorted(&submatrix(&fhat, bl, bl));
        if b1.iter().zip(&b2).any(|(a, b)| (a - b).abs() > INVARIANT_TOL) {
            return Ok(EquivalenceVerdict::not_equivalent());
        }
    }
    for (bi, bl_i) in blocks.iter().enumerate() {
        for bl_j in blocks.iter().skip(bi + 1) {
            let m1 = submatrix(&c1.f, bl_i, bl_j);
            let m2 = submatrix(&fhat, bl_i, bl_j);
            let t1 = frob_inner(&m1, &m1);
            let t2 = frob_inner(&m2, &m2);
            if (t1 - t2).abs() > INVARIANT_TOL {
                return Ok(EquivalenceVerdict::not_equivalent());
            }
        }
    }

    // alignment attempts
    if let Some(a) = align_repeated(c1, &fhat, &blocks) {
        let res = certificate_residual(c1, c2, c, &a);
        if res <= CERTIFICATE_TOL {
            return Ok(EquivalenceVerdict::equivalent(c, a));
        }
    }
    Ok(EquivalenceVerdict::undetermined())
}

fn block_diagonal_offnorm(a: &[Vec<f64>], blocks: &[Vec<usize>]) -> f64 {
    let n = a.len();
    let mut owner = vec![0usize; n];
    for (bi, bl) in blocks.iter().enumerate() {
        for &i in bl {
            owner[i] = bi;
        }
    }
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] {
                worst = worst.max(a[i][j].abs());
            }
        }
    }
    worst
}

fn align_repeated(
    c1: &CanonicalForm,
    fhat: &[Vec<f64>],
    blocks: &[Vec<usize>],
) -> Option<Vec<Vec<f64>>> {
    let n = c1.n;
    let f1 = &c1.f;
    let close = |a: &[Vec<f64>]| -> bool {
        let conj = conjugate(a, f1);
        (0..n).all(|i| (0..n).all(|j| (conj[i][j] - fhat[i][j]).abs() <= CERTIFICATE_TOL))
    };

    // identity
    let id: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    if close(&id) {
        return Some(id);
    }

    // eigenvector alignment when F1 has simple spectrum
    let f1m = DMatrix::from_fn(n, n, |i, j| f1[i][j]);
    let fhm = DMatrix::from_fn(n, n, |i, j| fhat[i][j]);
    let e1 = nalgebra::SymmetricEigen::new(f1m);
    let e2 = nalgebra::SymmetricEigen::new(fhm);
    let mut o1: Vec<usize> = (0..n).collect();
    o1.sort_by(|&a, &b| e1.eigenvalues[a].partial_cmp(&e1.eigenvalues[b]).expect("finite"));
    let mut o2: Vec<usize> = (0..n).collect();
    o2.sort_by(|&a, &b| e2.eigenvalues[a].partial_cmp(&e2.eigenvalues[b]).expect("finite"));
    let simple = (1..n).all(|k| {
        (e1.eigenvalues[o1[k]] - e1.eigenvalues[o1[k - 1]]).abs() > 1e-8
    });
    if simple && n <= 16 {
        // a = U diag(eps) V^T conjugates F1 onto Fhat for every sign choice;
        // keep one that is block diagonal.
        for mask in 0..(1u64 << (n - 1)) {
            let mut a = vec![vec![0.0; n]; n];
            for k in 0..n {
                let eps = if k > 0 && mask >> (k - 1) & 1 == 1 { -1.0 } else { 1.0 };
                for i in 0..n {
                    for j in 0..n {
                        a[i][j] += e1.eigenvectors[(i, o1[k])] * eps * e2.eigenvectors[(j, o2[k])];
                    }
                }
            }
            if block_diagonal_offnorm(&a, blocks) <= CERTIFICATE_TOL && close(&a) {
                return Some(a);
            }
        }
    }

    // projected-gradient descent with polar retraction, random restarts
    let mut rng = ChaCha8Rng::seed_from_u64(0x70705f77617665);
    for restart in 0..50 {
        let mut a = if restart == 0 {
            id.clone()
        } else {
            random_block_orthogonal(&mut rng, n, blocks)
        };
        let mut step = 0.1;
        let mut best = align_objective(f1, fhat, &a);
        for _ in 0..1000 {
            if best <= (CERTIFICATE_TOL * 0.1).powi(2) {
                break;
            }
            let grad = align_gradient(f1, fhat, &a);
            let mut cand = a.clone();
            for i in 0..n {
                for j in 0..n {
                    cand[i][j] -= step * grad[i][j];
                }
            }
            let cand = polar_blocks(&cand, blocks);
            let val = align_objective(f1, fhat, &cand);
            if val < best {
                a = cand;
                best = val;
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
        }
        if close(&a) {
            return Some(a);
        }
    }
    None
}

/// `|F1 a - a Fhat|_F^2`, zero exactly at solutions of `a^T F1 a = Fhat`.
fn align_objective(f1: &[Vec<f64>], fhat: &[Vec<f64>], a: &[Vec<f64>]) -> f64 {
    let r = mat_residual(f1, fhat, a);
    frob_inner(&r, &r)
}

fn mat_residual(f1: &[Vec<f64>], fhat: &[Vec<f64>], a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let fa = matmul(f1, a);
    let af = matmul(a, fhat);
    let mut r = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            r[i][j] = fa[i][j] - af[i][j];
        }
    }
    r
}

fn align_gradient(f1: &[Vec<f64>], fhat: &[Vec<f64>], a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let r = mat_residual(f1, fhat, a);
    // d/da |F1 a - a Fhat|^2 = 2 (F1 R - R Fhat), both symmetric
    let t1 = matmul(f1, &r);
    let t2 = matmul(&r, fhat);
    let mut g = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = 2.0 * (t1[i][j] - t2[i][j]);
        }
    }
    g
}

fn polar_blocks(a: &[Vec<f64>], blocks: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for bl in blocks {
        let k = bl.len();
        let m = DMatrix::from_fn(k, k, |i, j| a[bl[i]][bl[j]]);
        let svd = nalgebra::SVD::new(m, true, true);
        let u = svd.u.expect("requested");
        let vt = svd.v_t.expect("requested");
        let q = u * vt;
        for i in 0..k {
            for j in 0..k {
                out[bl[i]][bl[j]] = q[(i, j)];
            }
        }
    }
    out
}

fn random_block_orthogonal(rng: &mut ChaCha8Rng, n: usize, blocks: &[Vec<usize>]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; n]; n];
    for bl in blocks {
        let k = bl.len();
        let m = DMatrix::from_fn(k, k, |_, _| rng.random_range(-1.0..1.0));
        let qr = m.qr();
        let q = qr.q();
        for i in 0..k {
            for j in 0..k {
                out[bl[i]][bl[j]] = q[(i, j)];
            }
        }
    }
    out
}

/// Cahen-Wallach normalization of a locally symmetric pp-wave: the sorted
/// nonzero eigenvalues of half the constant Hessian; zero eigenvalues are
/// a decomposable flat factor and are reported separately.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CahenWallachForm {
    pub lambdas: Vec<f64>,
    pub flat_dimension: usize,
}

pub fn cahen_wallach_normalize(m: &PpWaveMetric<Rational>) -> Result<CahenWallachForm> {
    if crate::classify::classify_order(m, 0.0) != crate::classify::SymmetryOrder::Symmetric {
        return Err(Error::NotSymmetric);
    }
    let n = m.n();
    let hessian = m.hessian();
    let zero_exp = vec![0u16; m.num_vars()];
    let half_hess: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| 0.5 * hessian[i][j].coefficient(&zero_exp).to_f64())
                .collect()
        })
        .collect();
    let (all, _) = diagonalize_sorted(&half_hess)?;
    let lambdas: Vec<f64> = all
        .iter()
        .copied()
        .filter(|l| l.abs() > NONZERO_LAMBDA_TOL)
        .collect();
    let flat_dimension = n - lambdas.len();
    Ok(CahenWallachForm {
        lambdas,
        flat_dimension,
    })
}

/// JSON document for a canonical form.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CanonicalDoc {
    pub lambdas: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformation: Option<ProvenanceDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProvenanceDoc {
    pub a: Vec<Vec<f64>>,
    pub c: f64,
    /// Either the string "not_needed" / "existence" or the list of
    /// polynomial witnesses `b(u)`.
    pub b: serde_json::Value,
    /// Either the same marker string or the polynomial `d(u)`.
    pub d: serde_json::Value,
}

impl CanonicalForm {
    pub fn to_doc(&self) -> CanonicalDoc {
        CanonicalDoc {
            lambdas: self.lambdas.clone(),
            f: self.f.clone(),
            transformation: self.provenance.as_ref().map(|p| {
                let (b, d) = match &p.shift {
                    ShiftWitness::NotNeeded => (
                        serde_json::json!("not_needed"),
                        serde_json::json!("not_needed"),
                    ),
                    ShiftWitness::Existence => {
                        (serde_json::json!("existence"), serde_json::json!("existence"))
                    }
                    ShiftWitness::Witness { b, d } => (
                        serde_json::to_value(b.iter().map(|p| p.to_doc()).collect::<Vec<_>>())
                            .expect("serializable"),
                        serde_json::to_value(d.to_doc()).expect("serializable"),
                    ),
                };
                ProvenanceDoc {
                    a: p.a.clone(),
                    c: p.c,
                    b,
                    d,
                }
            }),
        }
    }

    pub fn from_doc(doc: &CanonicalDoc) -> Result<Self> {
        let mut form = CanonicalForm::from_parts(doc.lambdas.clone(), doc.f.clone())?;
        if let Some(p) = &doc.transformation {
            let shift = match (&p.b, &p.d) {
                (serde_json::Value::String(s), _) if s == "not_needed" => ShiftWitness::NotNeeded,
                (serde_json::Value::String(_), _) => ShiftWitness::Existence,
                (serde_json::Value::Array(arr), d) => {
                    let b = arr
                        .iter()
                        .map(|v| {
                            let pd: PolyDoc = serde_json::from_value(v.clone())
                                .map_err(|e| Error::Parse(e.to_string()))?;
                            Polynomial::from_doc(&pd)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let dd: PolyDoc = serde_json::from_value(d.clone())
                        .map_err(|e| Error::Parse(e.to_string()))?;
                    ShiftWitness::Witness {
                        b,
                        d: Polynomial::from_doc(&dd)?,
                    }
                }
                _ => ShiftWitness::Existence,
            };
            form.provenance = Some(Provenance {
                a: p.a.clone(),
                c: p.c,
                shift,
            });
        }
        Ok(form)
    }
}

/// JSON document for an equivalence verdict.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquivalenceDoc {
    pub equivalent: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
}

impl EquivalenceVerdict {
    pub fn to_doc(&self) -> EquivalenceDoc {
        EquivalenceDoc {
            equivalent: match self.status {
                Equivalence::Equivalent => serde_json::json!(true),
                Equivalence::NotEquivalent => serde_json::json!(false),
                Equivalence::Undetermined => serde_json::json!("undetermined"),
            },
            c: self.c,
            a: self.a.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    type P = Polynomial<Rational>;

    fn metric(text: &str, n: usize) -> PpWaveMetric<Rational> {
        PpWaveMetric::new(n, P::parse(text, n + 2).unwrap()).unwrap()
    }

    #[test]
    fn canonicalize_already_canonical() {
        let c = canonicalize(&metric("u * x1^2", 1)).unwrap();
        assert_eq!(c.lambdas, vec![1.0]);
        assert_eq!(c.f, vec![vec![0.0]]);
        assert!(matches!(
            c.provenance.unwrap().shift,
            ShiftWitness::NotNeeded
        ));
    }

    #[test]
    fn canonicalize_offdiagonal_h() {
        // H = 2u x1 x2: h = offdiag(1,1), eigenvalues (-1, 1), F = 0
        let c = canonicalize(&metric("2 * u x1 x2", 2)).unwrap();
        assert!((c.lambdas[0] + 1.0).abs() < 1e-12);
        assert!((c.lambdas[1] - 1.0).abs() < 1e-12);
        for row in &c.f {
            for v in row {
                assert!(v.abs() < 1e-12);
            }
        }
        // rotation by π/4: all entries 1/√2 in magnitude
        let a = c.provenance.unwrap().a;
        for row in &a {
            for v in row {
                assert!((v.abs() - 0.5f64.sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn canonicalize_sorts_diagonal_h() {
        // h = diag(1, 0) must be permuted to (0, 1); F = offdiag(2, 2)
        // is permuted along. 4 x1 x2 means f_12 = f_21 = 2.
        let c = canonicalize(&metric("u * x1^2 + 4 * x1 x2", 2)).unwrap();
        assert_eq!(c.lambdas, vec![0.0, 1.0]);
        assert_eq!(c.f[0][1], 2.0);
        assert_eq!(c.f[1][0], 2.0);
        assert_eq!(c.f[0][0], 0.0);
    }

    #[test]
    fn canonicalize_rejects_non_two_symmetric() {
        assert_eq!(
            canonicalize(&metric("x1^2", 1)).unwrap_err(),
            Error::NotTwoSymmetric
        );
    }

    #[test]
    fn canonicalize_records_polynomial_shift() {
        // g is killable: n=1, h=1, f=0, g = -2u has witness b = 1
        let c = canonicalize(&metric("u * x1^2 - 2 * u x1", 1)).unwrap();
        match c.provenance.unwrap().shift {
            ShiftWitness::Witness { b, d } => {
                assert_eq!(b[0], P::one(3));
                // d' = -((b')^2 + u b^2 + g b) / 2 = -(0 + u - 2u)/2 = u/2
                assert_eq!(d, P::parse("1/4 * u^2", 3).unwrap());
            }
            other => panic!("expected witness, got {other:?}"),
        }
    }

    #[test]
    fn provenance_transformation_really_canonicalizes() {
        // apply the recorded (a, b, c, d) to the metric and check the
        // result is the canonical potential
        let m = metric("u * x1^2 - 2 * u x1", 1);
        let c = canonicalize(&m).unwrap();
        let prov = c.provenance.clone().unwrap();
        let (b, d) = match prov.shift {
            ShiftWitness::Witness { b, d } => (b, d),
            _ => unreachable!(),
        };
        let t = crate::transform::AdaptedTransformation::new(
            vec![vec![rat_int(1)]],
            b,
            rat_int(0),
            d,
        )
        .unwrap();
        let out = t.apply(&m).unwrap();
        assert_eq!(out, metric("u * x1^2", 1));
    }

    #[test]
    fn kill_linear_terms_examples() {
        let nv = 3;
        let h = vec![vec![rat_int(1)]];
        let f = vec![vec![rat_int(0)]];
        // g = 0 -> b = 0
        match kill_linear_terms(&h, &f, &[P::zero(nv)], 12).unwrap() {
            KillReport::Witness(b) => assert!(b[0].is_zero()),
            _ => panic!("expected witness"),
        }
        // g = -2u -> b = 1
        match kill_linear_terms(&h, &f, &[P::parse("-2 * u", nv).unwrap()], 12).unwrap() {
            KillReport::Witness(b) => assert_eq!(b[0], P::one(nv)),
            _ => panic!("expected witness"),
        }
        // g = 2 -> no polynomial witness
        assert!(matches!(
            kill_linear_terms(&h, &f, &[P::int_constant(nv, 2)], 12).unwrap(),
            KillReport::ExistenceOnly
        ));
    }

    #[test]
    fn equivalence_identity() {
        let c1 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![0.0, 3.0], vec![3.0, 0.0]])
            .unwrap();
        let v = decide_equivalence(&c1, &c1).unwrap();
        assert_eq!(v.status, Equivalence::Equivalent);
        assert_eq!(v.c, Some(0.0));
        assert_eq!(v.a.unwrap(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn equivalence_sign_flip() {
        let c1 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![0.0, 3.0], vec![3.0, 0.0]])
            .unwrap();
        let c2 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![0.0, -3.0], vec![-3.0, 0.0]])
            .unwrap();
        let v = decide_equivalence(&c1, &c2).unwrap();
        assert_eq!(v.status, Equivalence::Equivalent);
        let a = v.a.unwrap();
        assert_eq!(a[0][0] * a[1][1], -1.0);
        assert!(certificate_residual(&c1, &c2, v.c.unwrap(), &a) <= CERTIFICATE_TOL);
    }

    #[test]
    fn equivalence_c_shift() {
        let c1 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![5.0, 0.0], vec![0.0, 0.0]])
            .unwrap();
        let c2 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![6.0, 0.0], vec![0.0, 2.0]])
            .unwrap();
        let v = decide_equivalence(&c1, &c2).unwrap();
        assert_eq!(v.status, Equivalence::Equivalent);
        assert!((v.c.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equivalence_lambda_mismatch() {
        let c1 = CanonicalForm::from_parts(vec![1.0, 2.0], vec![vec![0.0; 2]; 2]).unwrap();
        let c2 = CanonicalForm::from_parts(vec![1.0, 3.0], vec![vec![0.0; 2]; 2]).unwrap();
        assert_eq!(
            decide_equivalence(&c1, &c2).unwrap().status,
            Equivalence::NotEquivalent
        );
    }

    #[test]
    fn equivalence_repeated_eigenvalues_rotation() {
        // λ = (1,1): the stabilizer is all of O(2); F2 = a^T F1 a for a
        // rotation must be recognized.
        let c1 =
            CanonicalForm::from_parts(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, -1.0]])
                .unwrap();
        let th = 0.3f64;
        let a = vec![vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]];
        let f2 = conjugate(&a, &c1.f);
        let c2 = CanonicalForm::from_parts(vec![1.0, 1.0], f2).unwrap();
        let v = decide_equivalence(&c1, &c2).unwrap();
        assert_eq!(v.status, Equivalence::Equivalent);
        assert!(certificate_residual(&c1, &c2, v.c.unwrap(), v.a.as_ref().unwrap())
            <= CERTIFICATE_TOL);
    }

    #[test]
    fn equivalence_repeated_eigenvalues_invariant_mismatch() {
        let c1 = CanonicalForm::from_parts(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 2.0]])
            .unwrap();
        let c2 = CanonicalForm::from_parts(vec![1.0, 1.0], vec![vec![1.0, 0.0], vec![0.0, 3.0]])
            .unwrap();
        assert_eq!(
            decide_equivalence(&c1, &c2).unwrap().status,
            Equivalence::NotEquivalent
        );
    }

    #[test]
    fn cahen_wallach_examples() {
        // H = 2 x1 x2: half Hessian offdiag(1,1), eigenvalues (-1, 1)
        let cw = cahen_wallach_normalize(&metric("2 * x1 x2", 2)).unwrap();
        assert_eq!(cw.lambdas, vec![-1.0, 1.0]);
        assert_eq!(cw.flat_dimension, 0);
        // already diagonal
        let cw2 = cahen_wallach_normalize(&metric("x1^2 + x2^2", 2)).unwrap();
        assert_eq!(cw2.lambdas, vec![1.0, 1.0]);
        // H = x1^2 in n = 2: one flat direction splits off
        let cw3 = cahen_wallach_normalize(&metric("x1^2", 2)).unwrap();
        assert_eq!(cw3.lambdas, vec![1.0]);
        assert_eq!(cw3.flat_dimension, 1);
        // two-symmetric input refuses
        assert_eq!(
            cahen_wallach_normalize(&metric("u * x1^2", 1)).unwrap_err(),
            Error::NotSymmetric
        );
    }

    #[test]
    fn canonical_doc_roundtrip() {
        let c = canonicalize(&metric("u * x1^2 - 2 * u x1", 1)).unwrap();
        let doc = c.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let back: CanonicalDoc = serde_json::from_str(&json).unwrap();
        let c2 = CanonicalForm::from_doc(&back).unwrap();
        assert_eq!(c2.lambdas, c.lambdas);
        assert_eq!(c2.f, c.f);
        assert!(matches!(
            c2.provenance.unwrap().shift,
            ShiftWitness::Witness { .. }
        ));
    }

    #[test]
    fn canonical_data_determines_curvature() {
        // a canonical form is a fixed point of canonicalization, and equal
        // (λ, F) data give componentwise-equal curvature at sample points
        let cf = CanonicalForm::from_parts(
            vec![-1.0, 0.5, 2.0],
            vec![
                vec![0.3, 1.0, 0.0],
                vec![1.0, -0.7, 0.25],
                vec![0.0, 0.25, 0.0],
            ],
        )
        .unwrap();
        let m = cf.to_numeric_metric().unwrap();
        let again = canonicalize_numeric(&m).unwrap();
        for (a, b) in cf.lambdas.iter().zip(&again.lambdas) {
            assert!((a - b).abs() < 1e-12);
        }
        for i in 0..3 {
            for j in 0..3 {
                assert!((cf.f[i][j] - again.f[i][j]).abs() < 1e-12);
            }
        }
        let m2 = again.to_numeric_metric().unwrap();
        let r1 = crate::curvature::curvature(&m);
        let r2 = crate::curvature::curvature(&m2);
        for pt in [[0.0; 5], [0.5, -1.0, 2.0, 0.25, 1.5]] {
            let v1 = r1.eval(&pt).unwrap();
            let v2 = r2.eval(&pt).unwrap();
            assert_eq!(v1.len(), v2.len());
            for (k, x) in &v1 {
                assert!((x - v2[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn numeric_canonicalize_after_rotation() {
        // exact canonical metric, rotated numerically, re-canonicalized
        let m = metric("u * x1^2 + 3 * u * x2^2 + x1 x2", 2);
        let c1 = canonicalize(&m).unwrap();
        let th = 0.7f64;
        let a = vec![vec![th.cos(), -th.sin()], vec![th.sin(), th.cos()]];
        let t = crate::transform::AdaptedTransformation::<f64>::new(
            a,
            vec![Polynomial::zero(4), Polynomial::zero(4)],
            0.0,
            Polynomial::zero(4),
        )
        .unwrap();
        let rotated = t.apply(&m.to_numeric()).unwrap();
        let c2 = canonicalize_numeric(&rotated).unwrap();
        for (l1, l2) in c1.lambdas.iter().zip(&c2.lambdas) {
            assert!((l1 - l2).abs() < 1e-9);
        }
        let v = decide_equivalence(&c1, &c2).unwrap();
        assert_eq!(v.status, Equivalence::Equivalent);
    }
}
