//! Algebraic curvature-tensor spaces for subalgebras of the similitude
//! algebra, realized as exact kernels of rational constraint systems.
//!
//! The ambient vector space `V` has basis `(p, e_1..e_n, q)` with the
//! pp-wave Gram matrix. Elements of `so(V)` are stored as endomorphism
//! matrices; bivectors `X∧Y` act by `Z -> g(X,Z)Y - g(Y,Z)X`. The spaces
//!
//! * `R(g)`  — curvature tensors valued in `g` with the first Bianchi
//!   identity,
//! * `P(h)`  — maps `E -> h` with the cyclic compatibility identity,
//! * `∇R(g)` — tensors `V* ⊗ R(g)` with the second Bianchi identity,
//!
//! are computed as exact kernel bases, and [`annihilator`] restricts the
//! natural Lie-algebra action to any of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, RatMatrix};
use crate::scalar::Rational;
use crate::tensor::{CoIdx, CovariantTensor};
use num_traits::Zero;

/// Which curvature space a basis lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceShape {
    /// `R(g)`: map from ordered pairs of basis vectors to `so(V)`.
    Curvature,
    /// `P(h)`: map from the screen basis to `so(E)`.
    WeakCurvature,
    /// `∇R(g)`: map from basis directions to `R(g)`.
    NablaCurvature,
}

/// Exact basis of a linear space of flattened tensors. Every vector
/// satisfies the defining constraints with zero residual.
#[derive(Debug, Clone)]
pub struct LinearSpaceBasis {
    pub shape: SpaceShape,
    pub n: usize,
    pub ambient_dim: usize,
    pub vectors: Vec<Vec<Rational>>,
}

impl LinearSpaceBasis {
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Holonomy-type selector for the algebra `g` built on top of the screen
/// generators: `ppwave` is the abelian `p∧E`, type II adds the screen
/// algebra, type I additionally adds `p∧q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolonomyType {
    #[serde(rename = "I")]
    TypeI,
    #[serde(rename = "II")]
    TypeII,
    #[serde(rename = "ppwave")]
    PpWave,
}

pub fn dim_v(n: usize) -> usize {
    n + 2
}

fn zero_mat(d: usize) -> RatMatrix {
    linalg::zero_matrix(d, d)
}

/// Standard basis of `so(n)` acting on the screen: `E_ij - E_ji`, `i < j`.
pub fn so_screen_basis(n: usize) -> Vec<RatMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut m = linalg::zero_matrix(n, n);
            m[i][j] = Rational::from_integer(1.into());
            m[j][i] = Rational::from_integer((-1).into());
            out.push(m);
        }
    }
    out
}

/// Embed a screen endomorphism into `so(V)` (acting on the `e`-block).
pub fn embed_screen(h: &RatMatrix, n: usize) -> RatMatrix {
    let d = dim_v(n);
    let mut m = zero_mat(d);
    for i in 0..n {
        for j in 0..n {
            m[1 + i][1 + j] = h[i][j].clone();
        }
    }
    m
}

/// The null rotation `p ∧ e_i` (1-based `i`): `q -> e_i`, `e_i -> -p`.
pub fn null_rotation(i: usize, n: usize) -> RatMatrix {
    let d = dim_v(n);
    let mut m = zero_mat(d);
    m[i][d - 1] = Rational::from_integer(1.into());
    m[0][i] = Rational::from_integer((-1).into());
    m
}

/// The boost `p ∧ q`: `q -> q`, `p -> -p`.
pub fn boost(n: usize) -> RatMatrix {
    let d = dim_v(n);
    let mut m = zero_mat(d);
    m[d - 1][d - 1] = Rational::from_integer(1.into());
    m[0][0] = Rational::from_integer((-1).into());
    m
}

/// Generators of the algebra for a holonomy type. Screen generators must
/// be antisymmetric `n×n` matrices.
pub fn generator_set(
    n: usize,
    screen: &[RatMatrix],
    gtype: HolonomyType,
) -> Result<Vec<RatMatrix>> {
    for h in screen {
        if h.len() != n || h.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("screen generator has wrong size".into()));
        }
        if !linalg::is_antisymmetric(h) {
            return Err(Error::NotAntisymmetric);
        }
    }
    let mut gens = Vec::new();
    if gtype == HolonomyType::TypeI {
        gens.push(boost(n));
    }
    if gtype != HolonomyType::PpWave {
        gens.extend(screen.iter().map(|h| embed_screen(h, n)));
    }
    for i in 1..=n {
        gens.push(null_rotation(i, n));
    }
    Ok(gens)
}

fn pair_list(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            out.push((a, b));
        }
    }
    out
}

fn pair_index(a: usize, b: usize, d: usize) -> (usize, i64) {
    debug_assert!(a != b);
    let (lo, hi, sign) = if a < b { (a, b, 1) } else { (b, a, -1) };
    // index of (lo, hi) in the a<b enumeration
    let idx = lo * d - lo * (lo + 1) / 2 + (hi - lo - 1);
    (idx, sign)
}

/// Read the endomorphism `R(X_a, X_b)` out of an ambient `R`-vector.
fn endo_at(vec: &[Rational], a: usize, b: usize, d: usize) -> RatMatrix {
    if a == b {
        return zero_mat(d);
    }
    let (idx, sign) = pair_index(a, b, d);
    let base = idx * d * d;
    let mut m = zero_mat(d);
    for r in 0..d {
        for c in 0..d {
            let v = &vec[base + r * d + c];
            m[r][c] = if sign > 0 { v.clone() } else { -v.clone() };
        }
    }
    m
}

/// `R(g)`: exact kernel of the first Bianchi identity on `Λ²V* ⊗ g`.
pub fn space_r(n: usize, gens: &[RatMatrix]) -> LinearSpaceBasis {
    let d = dim_v(n);
    let pairs = pair_list(d);
    let m = gens.len();
    let unknowns = pairs.len() * m;
    let mut rows = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                // R(a,b)c + R(b,c)a + R(c,a)b = 0, componentwise
                for r in 0..d {
                    let mut row = vec![Rational::zero(); unknowns];
                    let (iab, _) = pair_index(a, b, d);
                    let (ibc, _) = pair_index(b, c, d);
                    let (iac, _) = pair_index(a, c, d);
                    for (g, gen) in gens.iter().enumerate() {
                        row[iab * m + g] += &gen[r][c];
                        row[ibc * m + g] += &gen[r][a];
                        row[iac * m + g] -= &gen[r][b]; // R(c,a) = -R(a,c)
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    let kernel = linalg::kernel_basis(&rows, unknowns);
    let ambient_dim = pairs.len() * d * d;
    let vectors = kernel
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![Rational::zero(); ambient_dim];
            for (pi, _) in pairs.iter().enumerate() {
                for (g, gen) in gens.iter().enumerate() {
                    let c = &coeffs[pi * m + g];
                    if c.is_zero() {
                        continue;
                    }
                    for r in 0..d {
                        for cc in 0..d {
                            if !gen[r][cc].is_zero() {
                                v[pi * d * d + r * d + cc] += c * &gen[r][cc];
                            }
                        }
                    }
                }
            }
            linalg::canonical_vector(&v)
        })
        .collect();
    LinearSpaceBasis {
        shape: SpaceShape::Curvature,
        n,
        ambient_dim,
        vectors,
    }
}

/// `P(h)`: exact kernel of `g(P(x)y,z) + g(P(y)z,x) + g(P(z)x,y) = 0` on
/// `E* ⊗ h`.
pub fn space_p(n: usize, screen: &[RatMatrix]) -> Result<LinearSpaceBasis> {
    for h in screen {
        if !linalg::is_antisymmetric(h) {
            return Err(Error::NotAntisymmetric);
        }
    }
    let m = screen.len();
    let unknowns = n * m;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut row = vec![Rational::zero(); unknowns];
                for (g, gen) in screen.iter().enumerate() {
                    row[i * m + g] += &gen[k][j];
                    row[j * m + g] += &gen[i][k];
                    row[k * m + g] += &gen[j][i];
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = linalg::kernel_basis(&rows, unknowns);
    let ambient_dim = n * n * n;
    let vectors = kernel
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![Rational::zero(); ambient_dim];
            for i in 0..n {
                for (g, gen) in screen.iter().enumerate() {
                    let c = &coeffs[i * m + g];
                    if c.is_zero() {
                        continue;
                    }
                    for r in 0..n {
                        for cc in 0..n {
                            if !gen[r][cc].is_zero() {
                                v[i * n * n + r * n + cc] += c * &gen[r][cc];
                            }
                        }
                    }
                }
            }
            linalg::canonical_vector(&v)
        })
        .collect();
    Ok(LinearSpaceBasis {
        shape: SpaceShape::WeakCurvature,
        n,
        ambient_dim,
        vectors,
    })
}

/// `∇R(g)`: exact kernel of the second Bianchi identity on `V* ⊗ R(g)`.
pub fn space_nabla_r(n: usize, gens: &[RatMatrix]) -> LinearSpaceBasis {
    let d = dim_v(n);
    let r_space = space_r(n, gens);
    let k = r_space.dim();
    let pairs = pair_list(d);
    let unknowns = d * k;
    // cache endomorphisms R_α(X_a, X_b) for a<b
    let endos: Vec<Vec<RatMatrix>> = r_space
        .vectors
        .iter()
        .map(|v| pairs.iter().map(|&(a, b)| endo_at(v, a, b, d)).collect())
        .collect();
    let lookup = |alpha: usize, a: usize, b: usize| -> (usize, i64) {
        let (idx, sign) = pair_index(a, b, d);
        let _ = alpha;
        (idx, sign)
    };
    let mut rows = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                // S_a(b,c) + S_b(c,a) + S_c(a,b) = 0
                for r in 0..d {
                    for cc in 0..d {
                        let mut row = vec![Rational::zero(); unknowns];
                        for alpha in 0..k {
                            let (i1, s1) = lookup(alpha, b, c);
                            let (i2, s2) = lookup(alpha, c, a);
                            let (i3, s3) = lookup(alpha, a, b);
                            let e = &endos[alpha];
                            row[a * k + alpha] +=
                                Rational::from_integer(s1.into()) * &e[i1][r][cc];
                            row[b * k + alpha] +=
                                Rational::from_integer(s2.into()) * &e[i2][r][cc];
                            row[c * k + alpha] +=
                                Rational::from_integer(s3.into()) * &e[i3][r][cc];
                        }
                        if row.iter().any(|x| !x.is_zero()) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
    }
    let kernel = linalg::kernel_basis(&rows, unknowns);
    let ambient_dim = d * pairs.len() * d * d;
    let vectors = kernel
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![Rational::zero(); ambient_dim];
            for dir in 0..d {
                for (alpha, rv) in r_space.vectors.iter().enumerate() {
                    let c = &coeffs[dir * k + alpha];
                    if c.is_zero() {
                        continue;
                    }
                    for (j, x) in rv.iter().enumerate() {
                        if !x.is_zero() {
                            v[dir * pairs.len() * d * d + j] += c * x;
                        }
                    }
                }
            }
            linalg::canonical_vector(&v)
        })
        .collect();
    LinearSpaceBasis {
        shape: SpaceShape::NablaCurvature,
        n,
        ambient_dim,
        vectors,
    }
}

fn commutator(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    linalg::mat_sub(&linalg::mat_mul(a, b), &linalg::mat_mul(b, a))
}

/// Natural action of `A ∈ so(V)` on an ambient `R`-vector:
/// `(A·R)(x,y) = [A, R(x,y)] - R(Ax, y) - R(x, Ay)`.
pub fn action_curvature(a: &RatMatrix, vec: &[Rational], n: usize) -> Vec<Rational> {
    let d = dim_v(n);
    let pairs = pair_list(d);
    let mut out = vec![Rational::zero(); pairs.len() * d * d];
    for (pi, &(x, y)) in pairs.iter().enumerate() {
        let mxy = endo_at(vec, x, y, d);
        let mut m = commutator(a, &mxy);
        for r in 0..d {
            if !a[r][x].is_zero() {
                let mry = endo_at(vec, r, y, d);
                m = linalg::mat_sub(&m, &linalg::mat_scale(&mry, &a[r][x]));
            }
            if !a[r][y].is_zero() {
                let mxr = endo_at(vec, x, r, d);
                m = linalg::mat_sub(&m, &linalg::mat_scale(&mxr, &a[r][y]));
            }
        }
        for r in 0..d {
            for c in 0..d {
                out[pi * d * d + r * d + c] = m[r][c].clone();
            }
        }
    }
    out
}

/// Natural action on an ambient `∇R`-vector:
/// `(A·S)(w; x,y) = [A, S_w(x,y)] - S_{Aw}(x,y) - S_w(Ax,y) - S_w(x,Ay)`.
pub fn action_nabla(a: &RatMatrix, vec: &[Rational], n: usize) -> Vec<Rational> {
    let d = dim_v(n);
    let pairs = pair_list(d);
    let block = pairs.len() * d * d;
    let mut out = vec![Rational::zero(); d * block];
    for w in 0..d {
        let sub = action_curvature(a, &vec[w * block..(w + 1) * block], n);
        for (j, x) in sub.iter().enumerate() {
            out[w * block + j] = x.clone();
        }
        // - S_{Aw}
        for r in 0..d {
            if a[r][w].is_zero() {
                continue;
            }
            for j in 0..block {
                let term = &a[r][w] * &vec[r * block + j];
                out[w * block + j] -= term;
            }
        }
    }
    out
}

/// Action on a `P(h)`-vector by a screen generator:
/// `(A·P)(x) = [A, P(x)] - P(Ax)`.
pub fn action_weak(a: &RatMatrix, vec: &[Rational], n: usize) -> Vec<Rational> {
    let read = |i: usize| -> RatMatrix {
        (0..n)
            .map(|r| (0..n).map(|c| vec[i * n * n + r * n + c].clone()).collect())
            .collect()
    };
    let mut out = vec![Rational::zero(); n * n * n];
    for i in 0..n {
        let mut m = commutator(a, &read(i));
        for r in 0..n {
            if !a[r][i].is_zero() {
                m = linalg::mat_sub(&m, &linalg::mat_scale(&read(r), &a[r][i]));
            }
        }
        for r in 0..n {
            for c in 0..n {
                out[i * n * n + r * n + c] = m[r][c].clone();
            }
        }
    }
    out
}

/// Subspace of `space` annihilated by every generator, as an exact kernel
/// computation restricted to the span.
pub fn annihilator(space: &LinearSpaceBasis, gens: &[RatMatrix]) -> LinearSpaceBasis {
    let k = space.dim();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for a in gens {
        let images: Vec<Vec<Rational>> = space
            .vectors
            .iter()
            .map(|v| match space.shape {
                SpaceShape::Curvature => action_curvature(a, v, space.n),
                SpaceShape::NablaCurvature => action_nabla(a, v, space.n),
                SpaceShape::WeakCurvature => action_weak(a, v, space.n),
            })
            .collect();
        for j in 0..space.ambient_dim {
            let row: Vec<Rational> = (0..k).map(|i| images[i][j].clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = linalg::kernel_basis(&rows, k);
    let vectors = kernel
        .into_iter()
        .map(|coeffs| {
            let mut v = vec![Rational::zero(); space.ambient_dim];
            for (i, c) in coeffs.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (j, x) in space.vectors[i].iter().enumerate() {
                    if !x.is_zero() {
                        v[j] += c * x;
                    }
                }
            }
            linalg::canonical_vector(&v)
        })
        .collect();
    LinearSpaceBasis {
        shape: space.shape,
        n: space.n,
        ambient_dim: space.ambient_dim,
        vectors,
    }
}

/// Curvature tensor parameterized by `(λ, e, P, R⁰, T)`:
///
/// ```text
/// R(p,q)   = -λ p∧q - p∧e
/// R(x,y)   = R⁰(x,y) - p∧(P(y)x - P(x)y)
/// R(x,q)   = -g(e,x) p∧q + P(x) - p∧(T x)
/// R(p,x)   = 0
/// ```
#[derive(Debug, Clone)]
pub struct AlgebraicCurvature {
    pub n: usize,
    pub lambda: Rational,
    pub e: Vec<Rational>,
    /// `P(e_i)` as antisymmetric screen matrices.
    pub p: Vec<RatMatrix>,
    /// `R⁰(e_i, e_j)` for screen pairs `i < j`, antisymmetric matrices.
    pub r0: Vec<RatMatrix>,
    /// Symmetric screen matrix.
    pub t: RatMatrix,
}

impl AlgebraicCurvature {
    /// Pure `R^T` tensor.
    pub fn from_t(t: RatMatrix) -> Self {
        let n = t.len();
        let screen_pairs = n * (n - 1) / 2;
        AlgebraicCurvature {
            n,
            lambda: Rational::zero(),
            e: vec![Rational::zero(); n],
            p: vec![linalg::zero_matrix(n, n); n],
            r0: vec![linalg::zero_matrix(n, n); screen_pairs],
            t,
        }
    }

    fn p_wedge_vec(w: &[Rational], n: usize) -> RatMatrix {
        let d = dim_v(n);
        let mut m = zero_mat(d);
        for (k, wk) in w.iter().enumerate() {
            if wk.is_zero() {
                continue;
            }
            // w_k * (p ∧ e_{k+1})
            m[k + 1][d - 1] += wk;
            m[0][k + 1] -= wk;
        }
        m
    }

    /// Ambient `R`-vector of this tensor.
    pub fn to_curvature_vector(&self) -> Vec<Rational> {
        let n = self.n;
        let d = dim_v(n);
        let pairs = pair_list(d);
        let mut v = vec![Rational::zero(); pairs.len() * d * d];
        let write = |a: usize, b: usize, m: &RatMatrix, v: &mut Vec<Rational>| {
            let (idx, sign) = pair_index(a, b, d);
            for r in 0..d {
                for c in 0..d {
                    if !m[r][c].is_zero() {
                        let val = if sign > 0 { m[r][c].clone() } else { -m[r][c].clone() };
                        v[idx * d * d + r * d + c] += val;
                    }
                }
            }
        };
        // R(p, q) = -λ p∧q - p∧e
        let mut mpq = linalg::mat_scale(&boost(n), &-self.lambda.clone());
        mpq = linalg::mat_sub(&mpq, &Self::p_wedge_vec(&self.e, n));
        write(0, d - 1, &mpq, &mut v);
        // R(e_i, e_j) = R⁰(e_i,e_j) - p∧(P(e_j)e_i - P(e_i)e_j)
        let mut sp = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                let mut m = embed_screen(&self.r0[sp], n);
                sp += 1;
                let pj_ei: Vec<Rational> = (0..n).map(|r| self.p[j][r][i].clone()).collect();
                let pi_ej: Vec<Rational> = (0..n).map(|r| self.p[i][r][j].clone()).collect();
                let diff: Vec<Rational> =
                    pj_ei.iter().zip(&pi_ej).map(|(a, b)| a - b).collect();
                m = linalg::mat_sub(&m, &Self::p_wedge_vec(&diff, n));
                write(1 + i, 1 + j, &m, &mut v);
            }
        }
        // R(e_i, q) = -g(e, e_i) p∧q + P(e_i) - p∧(T e_i)
        for i in 0..n {
            let mut m = linalg::mat_scale(&boost(n), &-self.e[i].clone());
            m = linalg::mat_add(&m, &embed_screen(&self.p[i], n));
            let t_ei: Vec<Rational> = (0..n).map(|r| self.t[r][i].clone()).collect();
            m = linalg::mat_sub(&m, &Self::p_wedge_vec(&t_ei, n));
            write(1 + i, d - 1, &m, &mut v);
        }
        v
    }
}

/// Ambient `∇R`-vector of `S = q' ⊗ R^{Id_E}`, the generator singled out
/// by the annihilator computation for irreducible screen algebras.
pub fn q_dual_r_identity_vector(n: usize) -> Vec<Rational> {
    let d = dim_v(n);
    let pairs = pair_list(d);
    let block = pairs.len() * d * d;
    let r_id = AlgebraicCurvature::from_t(linalg::identity(n)).to_curvature_vector();
    let mut v = vec![Rational::zero(); d * block];
    // S_q = R^{Id}, all other directions zero; q is the last basis vector
    for (j, x) in r_id.iter().enumerate() {
        v[(d - 1) * block + j] = x.clone();
    }
    v
}

pub fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some(k) = a.iter().position(|x| !x.is_zero()) else {
        return b.iter().all(|x| x.is_zero());
    };
    if b[k].is_zero() {
        return false;
    }
    let t = &b[k] / &a[k];
    a.iter().zip(b).all(|(x, y)| y == &(x * &t))
}

/// Raise the last index of the two trailing slots of a rank-4 component
/// table evaluated at a point, giving the pair-to-endomorphism form used
/// by the ambient `R`-vectors.
pub fn curvature_vector_from_tensor(
    t: &CovariantTensor<Rational>,
    point: &[Rational],
) -> Result<Vec<Rational>> {
    if t.rank() != 4 {
        return Err(Error::InvalidInput("rank-4 tensor expected".into()));
    }
    let n = t.n();
    let d = dim_v(n);
    let all = CoIdx::all(n);
    let gram: Vec<Vec<i64>> = crate::metric::gram_matrix(n);
    let vals = t.eval(point)?;
    let pairs = pair_list(d);
    let mut v = vec![Rational::zero(); pairs.len() * d * d];
    for (pi, &(a, b)) in pairs.iter().enumerate() {
        // M[z][w] = T(a, b, z, w); endo = G M^T
        for r in 0..d {
            for z in 0..d {
                let mut acc = Rational::zero();
                for w in 0..d {
                    if gram[r][w] == 0 {
                        continue;
                    }
                    let key = vec![all[a], all[b], all[z], all[w]];
                    if let Some(x) = vals.get(&key) {
                        acc += Rational::from_integer(gram[r][w].into()) * x;
                    }
                }
                v[pi * d * d + r * d + z] = acc;
            }
        }
    }
    Ok(v)
}

/// Same raising for a rank-5 table `(direction; 4 slots)`, giving an
/// ambient `∇R`-vector.
pub fn nabla_vector_from_tensor(
    t: &CovariantTensor<Rational>,
    point: &[Rational],
) -> Result<Vec<Rational>> {
    if t.rank() != 5 {
        return Err(Error::InvalidInput("rank-5 tensor expected".into()));
    }
    let n = t.n();
    let d = dim_v(n);
    let all = CoIdx::all(n);
    let gram: Vec<Vec<i64>> = crate::metric::gram_matrix(n);
    let vals = t.eval(point)?;
    let pairs = pair_list(d);
    let block = pairs.len() * d * d;
    let mut v = vec![Rational::zero(); d * block];
    for dir in 0..d {
        for (pi, &(a, b)) in pairs.iter().enumerate() {
            for r in 0..d {
                for z in 0..d {
                    let mut acc = Rational::zero();
                    for w in 0..d {
                        if gram[r][w] == 0 {
                            continue;
                        }
                        let key = vec![all[dir], all[a], all[b], all[z], all[w]];
                        if let Some(x) = vals.get(&key) {
                            acc += Rational::from_integer(gram[r][w].into()) * x;
                        }
                    }
                    v[dir * block + pi * d * d + r * d + z] = acc;
                }
            }
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpanBuilder;
    use crate::scalar::rat_int;

    #[test]
    fn bivector_action_matrices() {
        // p∧e_1 sends q to e_1 and e_1 to -p
        let m = null_rotation(1, 2);
        assert_eq!(m[1][3], rat_int(1));
        assert_eq!(m[0][1], rat_int(-1));
        // and it is in so(V): G m antisymmetric
        let g: RatMatrix = crate::metric::gram_matrix(2)
            .iter()
            .map(|r| r.iter().map(|&x| rat_int(x)).collect())
            .collect();
        let gm = linalg::mat_mul(&g, &m);
        assert!(linalg::is_antisymmetric(&gm));
        let gb = linalg::mat_mul(&g, &boost(2));
        assert!(linalg::is_antisymmetric(&gb));
    }

    #[test]
    fn space_r_abelian_is_s2() {
        // R(p∧E) ≅ S²E
        for n in [1usize, 2, 3] {
            let gens = generator_set(n, &[], HolonomyType::PpWave).unwrap();
            let s = space_r(n, &gens);
            assert_eq!(s.dim(), n * (n + 1) / 2, "n = {n}");
        }
    }

    #[test]
    fn space_r_type_ii_so2() {
        // dim = dim P(so(2)) + dim R(so(2)) + dim S²E = 2 + 1 + 3
        let gens = generator_set(2, &so_screen_basis(2), HolonomyType::TypeII).unwrap();
        assert_eq!(space_r(2, &gens).dim(), 6);
    }

    #[test]
    fn space_p_dimensions() {
        assert_eq!(space_p(2, &so_screen_basis(2)).unwrap().dim(), 2);
        assert_eq!(space_p(3, &[]).unwrap().dim(), 0);
        // regression anchor: P(so(3)) has the mixed-symmetry dimension
        // n(n²-1)/3 = 8
        assert_eq!(space_p(3, &so_screen_basis(3)).unwrap().dim(), 8);
    }

    #[test]
    fn space_nabla_r_abelian_is_s2_plus_s3() {
        // ∇R(p∧E) ≅ S²E ⊕ S³E
        let gens1 = generator_set(1, &[], HolonomyType::PpWave).unwrap();
        assert_eq!(space_nabla_r(1, &gens1).dim(), 2);
        let gens2 = generator_set(2, &[], HolonomyType::PpWave).unwrap();
        assert_eq!(space_nabla_r(2, &gens2).dim(), 3 + 4);
    }

    #[test]
    fn space_nabla_r_type_ii_so2_anchor() {
        let gens = generator_set(2, &so_screen_basis(2), HolonomyType::TypeII).unwrap();
        let s = space_nabla_r(2, &gens);
        // regression anchor from the exact solver
        assert_eq!(s.dim(), 15);
        // the distinguished generator is present
        let mut span = SpanBuilder::new();
        for v in &s.vectors {
            span.insert(v);
        }
        assert!(span.contains(&q_dual_r_identity_vector(2)));
    }

    #[test]
    fn annihilator_of_everything_by_nothing() {
        let gens = generator_set(2, &[], HolonomyType::PpWave).unwrap();
        let s = space_r(2, &gens);
        let ann = annihilator(&s, &[]);
        assert_eq!(ann.dim(), s.dim());
    }

    #[test]
    fn abelian_annihilates_its_own_curvature_space() {
        // p∧E acts trivially on R(p∧E)
        let gens = generator_set(2, &[], HolonomyType::PpWave).unwrap();
        let s = space_r(2, &gens);
        let ann = annihilator(&s, &gens);
        assert_eq!(ann.dim(), s.dim());
    }

    #[test]
    fn irreducible_screen_annihilator_is_one_dimensional() {
        for n in [2usize, 3] {
            let gens = generator_set(n, &so_screen_basis(n), HolonomyType::TypeII).unwrap();
            let nabla = space_nabla_r(n, &gens);
            let ann = annihilator(&nabla, &gens);
            assert_eq!(ann.dim(), 1, "n = {n}");
            assert!(
                proportional(&ann.vectors[0], &q_dual_r_identity_vector(n)),
                "generator must be q'⊗R^Id for n = {n}"
            );
        }
    }

    #[test]
    fn type_i_annihilator_is_trivial() {
        let n = 2;
        let gens = generator_set(n, &so_screen_basis(n), HolonomyType::TypeI).unwrap();
        let nabla = space_nabla_r(n, &gens);
        let ann = annihilator(&nabla, &gens);
        assert_eq!(ann.dim(), 0);
    }

    #[test]
    fn algebraic_curvature_satisfies_bianchi() {
        // a tensor with all five pieces set lies in R(sim(n))
        let n = 2;
        let mut t = linalg::identity(n);
        t[0][1] = rat_int(2);
        t[1][0] = rat_int(2);
        let so2 = so_screen_basis(n);
        let ac = AlgebraicCurvature {
            n,
            lambda: rat_int(3),
            e: vec![rat_int(1), rat_int(-2)],
            p: vec![so2[0].clone(), linalg::mat_scale(&so2[0], &rat_int(5))],
            r0: vec![linalg::mat_scale(&so2[0], &rat_int(7))],
            t,
        };
        let v = ac.to_curvature_vector();
        let gens = generator_set(n, &so_screen_basis(n), HolonomyType::TypeI).unwrap();
        let full = space_r(n, &gens);
        let mut span = SpanBuilder::new();
        for b in &full.vectors {
            span.insert(b);
        }
        assert!(span.contains(&v));
        // and R(p, e_i) = 0 by construction: pairs (p, e_i) carry no data
        let d = dim_v(n);
        let m = endo_at(&v, 0, 1, d);
        assert!(linalg::is_zero_matrix(&m));
    }

    #[test]
    fn engine_curvature_matches_r_t_parameterization() {
        // R̄ of H = x1² at any point is R^T with T = diag(1, 0)
        let m = crate::metric::PpWaveMetric::new(
            2,
            crate::poly::Polynomial::parse("x1^2", 4).unwrap(),
        )
        .unwrap();
        let r = crate::curvature::curvature(&m);
        let pt = vec![rat_int(0); 4];
        let v = curvature_vector_from_tensor(&r, &pt).unwrap();
        let mut t = linalg::zero_matrix(2, 2);
        t[0][0] = rat_int(1);
        let expected = AlgebraicCurvature::from_t(t).to_curvature_vector();
        assert_eq!(v, expected);
    }

    #[test]
    fn engine_nabla_r_lies_in_q_tensor_span() {
        // two-symmetric template: ∇R̄ at a point is q' ⊗ R^{h} exactly
        let m = crate::metric::PpWaveMetric::new(
            2,
            crate::poly::Polynomial::parse("u * x1^2 + 4 * u * x1 x2 + 3 * x2^2", 4).unwrap(),
        )
        .unwrap();
        let s = crate::curvature::nabla_r(&m);
        let pt = vec![rat_int(2), rat_int(-1), rat_int(3), rat_int(5)];
        let v = nabla_vector_from_tensor(&s, &pt).unwrap();
        // h matrix from the template: h11 = 1, h12 = h21 = 2, h22 = 0
        let mut h = linalg::zero_matrix(2, 2);
        h[0][0] = rat_int(1);
        h[0][1] = rat_int(2);
        h[1][0] = rat_int(2);
        let r_h = AlgebraicCurvature::from_t(h).to_curvature_vector();
        let d = dim_v(2);
        let block = pair_list(d).len() * d * d;
        // direction q carries R^h, every other direction vanishes
        for dir in 0..d {
            for j in 0..block {
                let expected = if dir == d - 1 {
                    r_h[j].clone()
                } else {
                    Rational::zero()
                };
                assert_eq!(v[dir * block + j], expected);
            }
        }
    }
}
