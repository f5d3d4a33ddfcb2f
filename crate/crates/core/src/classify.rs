//! Symmetry classification of pp-wave metrics and the screen holonomy span.
//!
//! A metric is classified as flat, locally symmetric, two-symmetric or
//! neither (up to second derivatives). The structural criteria — Hessian
//! zero, Hessian constant, potential of the shape
//! `(u H_ij + F_ij) x^i x^j + G_i(u) x^i + K(u)` with `H_ij != 0` — are
//! equivalent to the tensorial ones (`R̄ = 0`, `∇R̄ = 0`, `∇²R̄ = 0`), and
//! debug builds assert that equivalence on every call.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::curvature::{curvature, nabla2_r, nabla_r};
use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix, SpanBuilder};
use crate::metric::PpWaveMetric;
use crate::poly::Polynomial;
use crate::scalar::{rat, rationalize, Rational, Scalar};
use crate::tensor::CovariantTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryOrder {
    Flat,
    Symmetric,
    TwoSymmetric,
    NoneUpTo2,
}

/// Classification result; the witness is the first nonzero tensor among
/// `R̄, ∇R̄, ∇²R̄` (absent for flat metrics).
#[derive(Debug, Clone)]
pub struct SymmetryReport {
    pub order: SymmetryOrder,
    pub witness_name: Option<&'static str>,
    pub witness: Option<CovariantTensor<Rational>>,
}

/// The pieces of a potential of the two-symmetric template shape,
/// `H = (u h_ij + f_ij) x^i x^j + g_i(u) x^i + k(u)`.
#[derive(Debug, Clone)]
pub struct QuadraticTemplate<C> {
    pub h: Vec<Vec<C>>,
    pub f: Vec<Vec<C>>,
    pub g: Vec<Polynomial<C>>,
    pub k: Polynomial<C>,
}

impl<C: Scalar> QuadraticTemplate<C> {
    pub fn h_is_zero(&self, tol: f64) -> bool {
        self.h
            .iter()
            .all(|row| row.iter().all(|x| x.is_negligible(tol)))
    }
}

/// Match the potential against the quadratic template: no x-degree above
/// two, and every x-quadratic coefficient affine in `u`. Returns the
/// extracted pieces, without requiring `h != 0`. `tol` is the absolute
/// threshold below which numeric coefficients count as zero (ignored for
/// exact scalars).
pub fn quadratic_template<C: Scalar>(
    m: &PpWaveMetric<C>,
    tol: f64,
) -> Option<QuadraticTemplate<C>> {
    let n = m.n();
    let nv = m.num_vars();
    let half = C::from_rational(&rat(1, 2));
    let mut h = vec![vec![C::zero(); n]; n];
    let mut f = vec![vec![C::zero(); n]; n];
    let mut g = vec![Polynomial::zero(nv); n];
    let mut k = Polynomial::zero(nv);

    let u_one = {
        let mut e = vec![0u16; nv];
        e[m.var_u()] = 1;
        e
    };
    let zero_exp = vec![0u16; nv];

    for (key, coef) in m.potential().split_by_vars(&m.x_vars()) {
        let total: u32 = key.iter().map(|&x| x as u32).sum();
        match total {
            0 => k = coef,
            1 => {
                let i = key.iter().position(|&x| x == 1).expect("degree one");
                g[i] = coef;
            }
            2 => {
                // coefficient must be affine in u
                let alpha = coef.coefficient(&u_one);
                let beta = coef.coefficient(&zero_exp);
                let residual = coef
                    .checked_sub(
                        &Polynomial::monomial(nv, u_one.clone(), alpha.clone())
                            .expect("lengths match")
                            .checked_add(&Polynomial::constant(nv, beta.clone()))
                            .expect("same vars"),
                    )
                    .expect("same vars");
                if !residual.is_negligible(tol) {
                    return None;
                }
                if let Some(i) = key.iter().position(|&x| x == 2) {
                    h[i][i] = alpha;
                    f[i][i] = beta;
                } else {
                    let i = key.iter().position(|&x| x == 1).expect("two ones");
                    let j = key[i + 1..]
                        .iter()
                        .position(|&x| x == 1)
                        .expect("two ones")
                        + i
                        + 1;
                    let ha = alpha * half.clone();
                    let fb = beta * half.clone();
                    h[i][j] = ha.clone();
                    h[j][i] = ha;
                    f[i][j] = fb.clone();
                    f[j][i] = fb;
                }
            }
            _ => {
                if !coef.is_negligible(tol) {
                    return None;
                }
            }
        }
    }
    Some(QuadraticTemplate { h, f, g, k })
}

/// Structural two-symmetry test: the potential has the template shape
/// with a nonzero `h` matrix. Agrees with `∇R̄ != 0 ∧ ∇²R̄ = 0`.
pub fn structural_two_symmetry_test<C: Scalar>(
    m: &PpWaveMetric<C>,
    tol: f64,
) -> Option<QuadraticTemplate<C>> {
    let t = quadratic_template(m, tol)?;
    if t.h_is_zero(tol) {
        None
    } else {
        Some(t)
    }
}

/// Structural classification, generic over the scalar (tolerance is used
/// only for numeric coefficients).
pub fn classify_order<C: Scalar>(m: &PpWaveMetric<C>, tol: f64) -> SymmetryOrder {
    let hessian = m.hessian();
    let flat = hessian
        .iter()
        .all(|row| row.iter().all(|p| p.is_negligible(tol)));
    if flat {
        return SymmetryOrder::Flat;
    }
    let constant = hessian.iter().all(|row| {
        row.iter().all(|p| {
            p.terms()
                .all(|(e, c)| e.iter().all(|&x| x == 0) || c.is_negligible(tol))
        })
    });
    if constant {
        return SymmetryOrder::Symmetric;
    }
    if structural_two_symmetry_test(m, tol).is_some() {
        return SymmetryOrder::TwoSymmetric;
    }
    SymmetryOrder::NoneUpTo2
}

/// Classification by exact zero tests on the curvature engine outputs;
/// used as the oracle for [`classify_order`].
pub fn tensorial_order(m: &PpWaveMetric<Rational>) -> SymmetryOrder {
    if curvature(m).is_zero() {
        return SymmetryOrder::Flat;
    }
    if nabla_r(m).is_zero() {
        return SymmetryOrder::Symmetric;
    }
    if nabla2_r(m).is_zero() {
        return SymmetryOrder::TwoSymmetric;
    }
    SymmetryOrder::NoneUpTo2
}

/// Classify an exact metric, attaching the witness tensor.
pub fn classify(m: &PpWaveMetric<Rational>) -> SymmetryReport {
    let order = classify_order(m, 0.0);
    debug_assert_eq!(order, tensorial_order(m), "structural/tensorial disagreement");
    let (witness_name, witness) = match order {
        SymmetryOrder::Flat => (None, None),
        SymmetryOrder::Symmetric => (Some("curvature"), Some(curvature(m))),
        SymmetryOrder::TwoSymmetric => (Some("nabla_r"), Some(nabla_r(m))),
        SymmetryOrder::NoneUpTo2 => (Some("nabla2_r"), Some(nabla2_r(m))),
    };
    SymmetryReport {
        order,
        witness_name,
        witness,
    }
}

/// Span of the Hessian values over a saturating rational sample grid,
/// its common kernel `E0`, and the finest orthogonal decomposition of the
/// complement into subspaces invariant under every matrix of the span.
#[derive(Debug, Clone)]
pub struct ScreenHolonomySpan {
    pub n: usize,
    pub dimension: usize,
    pub basis: Vec<RatMatrix>,
    /// Basis of the common kernel `E0`; nonempty iff the metric splits off
    /// a flat Riemannian factor.
    pub kernel: Vec<Vec<Rational>>,
    /// Invariant blocks `E1, E2, ...` of the orthogonal complement of `E0`.
    pub blocks: Vec<Vec<Vec<Rational>>>,
    /// False when a block may split further but only along irrational
    /// eigenspaces, which the exact refinement refuses to do.
    pub determined: bool,
    pub decomposable: bool,
}

fn flatten_symmetric(mat: &[Vec<Rational>], n: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            v.push(mat[i][j].clone());
        }
    }
    v
}

pub fn screen_span(m: &PpWaveMetric<Rational>) -> ScreenHolonomySpan {
    let n = m.n();
    let hessian = m.hessian();
    // degree bound: a grid wider than every per-variable degree determines
    // the coefficient span exactly
    let mut max_deg = 0u16;
    for row in &hessian {
        for p in row {
            for i in 1..=n {
                max_deg = max_deg.max(p.degree_in(m.var_x(i)));
            }
            max_deg = max_deg.max(p.degree_in(m.var_u()));
        }
    }
    let full_dim = n * (n + 1) / 2;
    let mut span = SpanBuilder::new();
    let mut dims = vec![0usize];
    let grid_vars = n + 1; // x1..xn, u
    let mut radius = 0i64;
    loop {
        // shell of L-infinity radius `radius`
        let mut point = vec![Rational::zero(); m.num_vars()];
        let mut counters = vec![-radius; grid_vars];
        'points: loop {
            if radius == 0 || counters.iter().any(|&c| c.abs() == radius) {
                for (k, &c) in counters.iter().enumerate() {
                    point[1 + k] = Rational::from_integer(c.into());
                }
                let mut value = vec![vec![Rational::zero(); n]; n];
                for i in 0..n {
                    for j in i..n {
                        let v = hessian[i][j].eval(&point).expect("point length");
                        value[i][j] = v.clone();
                        value[j][i] = v;
                    }
                }
                span.insert(&flatten_symmetric(&value, n));
            }
            // advance odometer
            for k in 0..grid_vars {
                counters[k] += 1;
                if counters[k] <= radius {
                    continue 'points;
                }
                counters[k] = -radius;
            }
            break;
        }
        dims.push(span.dim());
        let l = dims.len();
        let stable = l >= 3 && dims[l - 1] == dims[l - 2] && dims[l - 2] == dims[l - 3];
        if span.dim() == full_dim || stable || radius > max_deg as i64 + 1 {
            break;
        }
        radius += 1;
    }

    let basis: Vec<RatMatrix> = span
        .basis()
        .iter()
        .map(|v| {
            let mut mat = vec![vec![Rational::zero(); n]; n];
            let mut idx = 0;
            for i in 0..n {
                for j in i..n {
                    mat[i][j] = v[idx].clone();
                    mat[j][i] = v[idx].clone();
                    idx += 1;
                }
            }
            mat
        })
        .collect();

    let (kernel, blocks, determined) = invariant_block_decomposition(&basis, n);
    ScreenHolonomySpan {
        n,
        dimension: span.dim(),
        decomposable: !kernel.is_empty(),
        basis,
        kernel,
        blocks,
        determined,
    }
}

/// Common kernel of the matrices, plus the finest orthogonal splitting of
/// its complement into subspaces invariant under all of them. Splitting
/// directions are found among symmetric elements of the commutant with
/// rational spectrum; blocks whose corner commutant is larger than the
/// scalars but offers no rational eigenvalue are reported undetermined.
pub type BlockDecomposition = (Vec<Vec<Rational>>, Vec<Vec<Vec<Rational>>>, bool);

pub fn invariant_block_decomposition(mats: &[RatMatrix], n: usize) -> BlockDecomposition {
    let mut rows = Vec::new();
    for m in mats {
        rows.extend(m.iter().cloned());
    }
    let kernel = linalg::kernel_basis(&rows, n);
    let complement = if kernel.is_empty() {
        linalg::identity(n)
    } else if kernel.len() == n {
        Vec::new()
    } else {
        linalg::kernel_basis(&kernel, n)
    };
    let mut determined = true;
    let blocks = if complement.is_empty() {
        Vec::new()
    } else {
        split_block(mats, complement, n, &mut determined)
    };
    (kernel, blocks, determined)
}

fn corner_commutant(mats: &[RatMatrix], p: &RatMatrix, n: usize) -> Vec<RatMatrix> {
    let unknowns = n * n;
    let mut rows = Vec::new();
    // X M = M X
    for m in mats {
        for i in 0..n {
            for j in 0..n {
                let mut row = vec![Rational::zero(); unknowns];
                for k in 0..n {
                    row[i * n + k] += &m[k][j];
                    row[k * n + j] -= &m[i][k];
                }
                rows.push(row);
            }
        }
    }
    // X = P X and X = X P (corner of the block)
    let id = linalg::identity(n);
    let q = linalg::mat_sub(&id, p);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Rational::zero(); unknowns];
            for k in 0..n {
                row[k * n + j] += &q[i][k]; // ((I-P) X)_{ij}
            }
            rows.push(row);
            let mut row2 = vec![Rational::zero(); unknowns];
            for k in 0..n {
                row2[i * n + k] += &q[k][j]; // (X (I-P))_{ij}
            }
            rows.push(row2);
        }
    }
    linalg::kernel_basis(&rows, unknowns)
        .into_iter()
        .map(|v| (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect())
        .collect()
}

fn is_scalar_multiple(x: &RatMatrix, p: &RatMatrix, n: usize) -> bool {
    let mut t: Option<Rational> = None;
    for i in 0..n {
        for j in 0..n {
            if !p[i][j].is_zero() {
                t = Some(&x[i][j] / &p[i][j]);
                break;
            }
        }
        if t.is_some() {
            break;
        }
    }
    let Some(t) = t else { return false };
    (0..n).all(|i| (0..n).all(|j| x[i][j] == &t * &p[i][j]))
}

fn split_block(
    mats: &[RatMatrix],
    block: Vec<Vec<Rational>>,
    n: usize,
    determined: &mut bool,
) -> Vec<Vec<Vec<Rational>>> {
    let dim = block.len();
    if dim == 0 {
        return Vec::new();
    }
    if dim == 1 {
        return vec![block];
    }
    let p = linalg::projector(&block, n);
    let corner = corner_commutant(mats, &p, n);

    // candidates: symmetrized corner elements that are not multiples of P
    let mut sym_span = SpanBuilder::new();
    let mut candidates: Vec<RatMatrix> = Vec::new();
    for y in &corner {
        let yt = linalg::transpose(y);
        let s = linalg::mat_add(y, &yt);
        if linalg::is_zero_matrix(&s) {
            continue;
        }
        let flat: Vec<Rational> = s.iter().flatten().cloned().collect();
        if sym_span.insert(&flat) {
            candidates.push(s);
        }
    }
    if sym_span.dim() <= 1 {
        // only multiples of the identity of the corner: irreducible block
        return vec![block];
    }
    // a few deterministic combinations widen the net for rational spectra
    let extra: Vec<RatMatrix> = (2..5)
        .map(|w| {
            let mut acc = linalg::zero_matrix(n, n);
            for (k, c) in candidates.iter().enumerate() {
                let weight = Rational::from_integer(((k as i64 + 1) * w).into());
                acc = linalg::mat_add(&acc, &linalg::mat_scale(c, &weight));
            }
            acc
        })
        .collect();
    let mut try_list = candidates;
    try_list.extend(extra);

    for x in &try_list {
        if is_scalar_multiple(x, &p, n) {
            continue;
        }
        if let Some(parts) = eigen_split(x, &p, dim, n) {
            let mut out = Vec::new();
            for part in parts {
                out.extend(split_block(mats, part, n, determined));
            }
            return out;
        }
    }
    *determined = false;
    vec![block]
}

/// Split a block along the rational eigenspaces of a symmetric matrix
/// commuting with everything. Returns None when no rational eigenvalue
/// splits the block.
fn eigen_split(
    x: &RatMatrix,
    p: &RatMatrix,
    block_dim: usize,
    n: usize,
) -> Option<Vec<Vec<Vec<Rational>>>> {
    let xf = nalgebra::DMatrix::from_fn(n, n, |i, j| crate::scalar::Scalar::to_f64(&x[i][j]));
    let eig = nalgebra::SymmetricEigen::new(xf);
    let mut lambdas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    lambdas.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    lambdas.dedup_by(|a, b| (*a - *b).abs() < 1e-8);

    let id = linalg::identity(n);
    let q = linalg::mat_sub(&id, p);
    let mut parts: Vec<Vec<Vec<Rational>>> = Vec::new();
    let mut found_dim = 0usize;
    for lam in lambdas {
        let Some(lam_rat) = rationalize(lam, 1_000_000) else {
            continue;
        };
        // eigenspace within the block: (X - λ) z = 0 and (I - P) z = 0
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for i in 0..n {
            let mut row = x[i].clone();
            row[i] = &row[i] - &lam_rat;
            rows.push(row);
        }
        rows.extend(q.iter().cloned());
        let space = linalg::kernel_basis(&rows, n);
        if !space.is_empty() {
            found_dim += space.len();
            parts.push(space);
        }
    }
    if parts.is_empty() || (parts.len() == 1 && found_dim == block_dim) {
        return None;
    }
    if found_dim < block_dim {
        // leftover: inside the block, orthogonal to everything found
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for part in &parts {
            rows.extend(part.iter().cloned());
        }
        rows.extend(q.iter().cloned());
        let leftover = linalg::kernel_basis(&rows, n);
        if !leftover.is_empty() {
            parts.push(leftover);
        }
    }
    if parts.len() >= 2 {
        Some(parts)
    } else {
        None
    }
}

/// Restrict a metric to the screen variables in `keep` (1-based), fixing
/// the discarded ones to zero. Only valid when the potential's Hessian
/// block on the discarded variables vanishes identically.
pub fn restrict_metric(
    m: &PpWaveMetric<Rational>,
    keep: &[usize],
) -> Result<PpWaveMetric<Rational>> {
    let n_new = keep.len();
    if n_new == 0 {
        return Err(Error::BadDimension);
    }
    let nv_new = n_new + 2;
    let mut images = vec![Polynomial::zero(nv_new); m.num_vars()];
    images[0] = Polynomial::var(nv_new, 0)?;
    for (new_i, &old_i) in keep.iter().enumerate() {
        images[m.var_x(old_i)] = Polynomial::var(nv_new, 1 + new_i)?;
    }
    images[m.var_u()] = Polynomial::var(nv_new, nv_new - 1)?;
    let h = m.potential().substitute(&images)?;
    PpWaveMetric::new(n_new, h)
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
    fn classify_examples() {
        assert_eq!(classify(&metric("x1^2", 1)).order, SymmetryOrder::Symmetric);
        assert_eq!(
            classify(&metric("u * x1^2", 1)).order,
            SymmetryOrder::TwoSymmetric
        );
        assert_eq!(
            classify(&metric("x1^4", 1)).order,
            SymmetryOrder::NoneUpTo2
        );
        assert_eq!(classify(&metric("0", 2)).order, SymmetryOrder::Flat);
        // potentials affine in x are flat
        assert_eq!(
            classify(&metric("u^3 x1 + u", 1)).order,
            SymmetryOrder::Flat
        );
    }

    #[test]
    fn witness_matches_order() {
        let rep = classify(&metric("u * x1^2", 1));
        assert_eq!(rep.witness_name, Some("nabla_r"));
        assert!(!rep.witness.unwrap().is_zero());
        assert!(classify(&metric("0", 1)).witness.is_none());
    }

    #[test]
    fn structural_extraction_example() {
        // H = u x1^2 + 3 x1 x2 + 5 u^3 x2 + u^7
        let m = metric("u * x1^2 + 3 * x1 x2 + 5 * u^3 x2 + u^7", 2);
        let t = structural_two_symmetry_test(&m, 0.0).unwrap();
        assert_eq!(t.h[0][0], rat_int(1));
        assert!(t.h[0][1].is_zero());
        assert_eq!(t.f[0][1], rat(3, 2));
        assert_eq!(t.f[1][0], rat(3, 2));
        assert!(t.g[0].is_zero());
        assert_eq!(t.g[1], P::parse("5 * u^3", 4).unwrap());
        assert_eq!(t.k, P::parse("u^7", 4).unwrap());
    }

    #[test]
    fn structural_rejections() {
        // Hessian quadratic in u
        assert!(structural_two_symmetry_test(&metric("u^2 * x1^2", 1), 0.0).is_none());
        // h = 0: symmetric, not two-symmetric
        assert!(structural_two_symmetry_test(&metric("x1^2", 1), 0.0).is_none());
        // cubic in x
        assert!(structural_two_symmetry_test(&metric("x1^3 + u * x1^2", 1), 0.0).is_none());
    }

    #[test]
    fn structural_agrees_with_tensorial_on_edge_cases() {
        for text in [
            "x1^3",
            "u * x1^2 + x1^3",
            "u^2 * x1^2",
            "x1^4",
            "u * x1^2 + x2^2",
            "x1^2 - x2^2 + u^5",
            "u * x1 x2",
        ] {
            let m = metric(text, 2);
            assert_eq!(
                classify_order(&m, 0.0),
                tensorial_order(&m),
                "disagreement on {text}"
            );
        }
    }

    #[test]
    fn screen_span_rank_one_with_kernel() {
        // H = x1^2 in n = 2: span {diag(2,0)}, E0 = span(e2)
        let s = screen_span(&metric("x1^2", 2));
        assert_eq!(s.dimension, 1);
        assert_eq!(s.kernel.len(), 1);
        assert_eq!(s.kernel[0], vec![rat_int(0), rat_int(1)]);
        assert!(s.decomposable);
        assert!(s.determined);
        assert_eq!(s.blocks.len(), 1);
        assert_eq!(s.blocks[0][0], vec![rat_int(1), rat_int(0)]);
    }

    #[test]
    fn screen_span_identity_direction() {
        // H = u x1^2 + u x2^2: span is the identity direction, E0 = 0
        let s = screen_span(&metric("u * x1^2 + u * x2^2", 2));
        assert_eq!(s.dimension, 1);
        assert!(s.kernel.is_empty());
        assert!(!s.decomposable);
    }

    #[test]
    fn screen_span_flat() {
        let s = screen_span(&metric("0", 2));
        assert_eq!(s.dimension, 0);
        assert_eq!(s.kernel.len(), 2);
        assert!(s.blocks.is_empty());
        assert!(s.decomposable);
    }

    #[test]
    fn screen_span_equals_h_f_span_for_templates() {
        // Hessian of the template is 2(uh + f); the sampled span must equal
        // span{h, f}.
        let m = metric("u * x1^2 + 4 * x1 x2 + u * x2^2 - x2^2", 2);
        let s = screen_span(&m);
        let t = structural_two_symmetry_test(&m, 0.0).unwrap();
        let mut oracle = SpanBuilder::new();
        oracle.insert(&flatten_symmetric(&t.h, 2));
        oracle.insert(&flatten_symmetric(&t.f, 2));
        assert_eq!(s.dimension, oracle.dim());
        for b in &s.basis {
            assert!(oracle.contains(&flatten_symmetric(b, 2)));
        }
    }

    #[test]
    fn irrational_split_is_refused() {
        // span of a single matrix with irrational eigenvalues: [[1,1],[1,0]]
        let mats = vec![vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(0)],
        ]];
        let (kernel, blocks, determined) = invariant_block_decomposition(&mats, 2);
        assert!(kernel.is_empty());
        assert_eq!(blocks.len(), 1);
        assert!(!determined);
    }

    #[test]
    fn decomposability_consistency() {
        // H uses x1, x2 only inside an n = 3 screen: E0 = span(e3) and the
        // restriction keeps the classification.
        let m = metric("u * x1^2 + x1 x2 + u^3", 3);
        let s = screen_span(&m);
        assert!(s.decomposable);
        assert_eq!(s.kernel.len(), 1);
        let restricted = restrict_metric(&m, &[1, 2]).unwrap();
        assert_eq!(classify(&restricted).order, classify(&m).order);
    }

    #[test]
    fn numeric_template_with_tolerance() {
        let m = metric("u * x1^2 + 3 * x1 x2", 2).to_numeric();
        assert!(structural_two_symmetry_test(&m, 1e-9).is_some());
        assert_eq!(classify_order(&m, 1e-9), SymmetryOrder::TwoSymmetric);
    }
}
