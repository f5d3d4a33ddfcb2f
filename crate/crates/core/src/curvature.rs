//! Curvature of a pp-wave in the standard frame: closed forms for the
//! curvature tensor, Ricci, Weyl and the first two covariant derivatives,
//! plus two independent oracles (a generic frame-wise covariant derivative
//! and a finite-difference coordinate computation).
//!
//! Component conventions. The curvature tensor is normalized so that
//!
//! ```text
//! R̄(e_i, q, e_j, q) = ½ H_{,ij}
//! ```
//!
//! with the pair symmetries filling in `R̄(q,e_i,q,e_j) = ½H_{,ij}` and
//! `R̄(e_i,q,q,e_j) = R̄(q,e_i,e_j,q) = -½H_{,ij}`; every component not of
//! this shape vanishes. Writing `Θ_ij` for that four-index pattern, the
//! covariant derivatives used throughout are
//!
//! ```text
//! ∇R̄:  (e^k; Θ_ij) = ½ H_{,ijk}        (q'; Θ_ij) = ½ H_{,iju}
//! ∇²R̄: (e^k, e^l; Θ_ij) = ½ H_{,ijkl}
//!       (e^k, q'; Θ_ij) = (q', e^k; Θ_ij) = ½ H_{,ijku}
//!       (q', q'; Θ_ij) = ½ H_{,ijuu} + ¼ Σ_k H_{,k} H_{,ijk}
//! ```
//!
//! The quadratic correction in the `q'⊗q'` block comes from
//! `∇_u q = -½ H_{,i} e_i`; it is what makes a cubic potential fail to be
//! two-symmetric. All three displays are reproduced exactly by
//! [`covariant_derivative_oracle`], which knows nothing about them.

use crate::error::{Error, Result};
use crate::metric::PpWaveMetric;
use crate::poly::Polynomial;
use crate::scalar::{rat, Scalar};
use crate::tensor::{CoIdx, CovariantTensor};

fn half<C: Scalar>() -> C {
    C::from_rational(&rat(1, 2))
}

fn quarter<C: Scalar>() -> C {
    C::from_rational(&rat(1, 4))
}

/// The nonzero Christoffel symbols of a pp-wave in adapted coordinates:
/// `Γ^v_{uu} = ½H_{,u}`, `Γ^v_{iu} = ½H_{,i}`, `Γ^i_{uu} = -½H_{,i}`.
/// Everything else vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ChristoffelTable<C> {
    n: usize,
    /// `Γ^v_{uu}`
    pub gamma_v_uu: Polynomial<C>,
    /// `Γ^v_{iu} = Γ^v_{ui}`, indexed by `i - 1`
    pub gamma_v_xu: Vec<Polynomial<C>>,
    /// `Γ^i_{uu}`, indexed by `i - 1`
    pub gamma_x_uu: Vec<Polynomial<C>>,
}

impl<C: Scalar> ChristoffelTable<C> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_v_uu.is_zero()
            && self.gamma_v_xu.iter().all(|p| p.is_zero())
            && self.gamma_x_uu.iter().all(|p| p.is_zero())
    }
}

pub fn christoffel<C: Scalar>(m: &PpWaveMetric<C>) -> ChristoffelTable<C> {
    let h = half::<C>();
    let gamma_v_uu = m.d_u().scale(&h);
    let gamma_v_xu: Vec<_> = (1..=m.n()).map(|i| m.d_x(i).scale(&h)).collect();
    let gamma_x_uu: Vec<_> = gamma_v_xu.iter().map(|p| p.clone().negate()).collect();
    ChristoffelTable {
        n: m.n(),
        gamma_v_uu,
        gamma_v_xu,
        gamma_x_uu,
    }
}

/// Insert `value` at the Hessian-type pattern `(prefix; e^i, q', e^j, q')`
/// together with its three sign-related images.
fn insert_hessian_block<C: Scalar>(
    t: &mut CovariantTensor<C>,
    prefix: &[CoIdx],
    i: usize,
    j: usize,
    value: Polynomial<C>,
) {
    if value.is_zero() {
        return;
    }
    let neg = value.clone().negate();
    let mk = |tail: [CoIdx; 4]| {
        let mut idx = prefix.to_vec();
        idx.extend_from_slice(&tail);
        idx
    };
    t.add_to(mk([CoIdx::E(i), CoIdx::QPrime, CoIdx::E(j), CoIdx::QPrime]), value.clone());
    t.add_to(mk([CoIdx::QPrime, CoIdx::E(i), CoIdx::QPrime, CoIdx::E(j)]), value);
    t.add_to(mk([CoIdx::E(i), CoIdx::QPrime, CoIdx::QPrime, CoIdx::E(j)]), neg.clone());
    t.add_to(mk([CoIdx::QPrime, CoIdx::E(i), CoIdx::E(j), CoIdx::QPrime]), neg);
}

/// Covariant curvature tensor (rank 4).
pub fn curvature<C: Scalar>(m: &PpWaveMetric<C>) -> CovariantTensor<C> {
    let n = m.n();
    let hess = m.hessian();
    let h = half::<C>();
    let mut t = CovariantTensor::zero(n, 4);
    for i in 1..=n {
        for j in 1..=n {
            insert_hessian_block(&mut t, &[], i, j, hess[i - 1][j - 1].scale(&h));
        }
    }
    t
}

/// Ricci tensor, computed by contracting slots 1 and 3 of the curvature
/// tensor with the inverse Gram matrix. For a pp-wave this equals
/// `½ ΔH q'⊗q'`.
pub fn ricci<C: Scalar>(m: &PpWaveMetric<C>) -> CovariantTensor<C> {
    curvature(m).contract(0, 2).expect("rank 4 tensor")
}

/// Scalar curvature (trace of Ricci); identically zero for pp-waves.
pub fn scalar_curvature<C: Scalar>(m: &PpWaveMetric<C>) -> Polynomial<C> {
    ricci(m)
        .contract(0, 1)
        .expect("rank 2 tensor")
        .get(&[])
}

/// Sparse entries of the constant frame Gram matrix.
fn gram_entries(n: usize) -> Vec<(CoIdx, CoIdx, i64)> {
    let mut out = vec![
        (CoIdx::PPrime, CoIdx::QPrime, 1),
        (CoIdx::QPrime, CoIdx::PPrime, 1),
    ];
    for i in 1..=n {
        out.push((CoIdx::E(i), CoIdx::E(i), 1));
    }
    out
}

/// The curvature-like product of the Gram tensor with a symmetric rank-2
/// tensor `L`:
/// `(g ∧ L)_{abcd} = g_ac L_bd - g_ad L_bc + L_ac g_bd - L_ad g_bc`.
fn gram_kulkarni<C: Scalar>(l: &CovariantTensor<C>) -> CovariantTensor<C> {
    let n = l.n();
    let mut out = CovariantTensor::zero(n, 4);
    for (g_pair, g_val) in gram_entries(n).iter().map(|&(x, y, v)| ((x, y), v)) {
        for (l_idx, l_val) in l.components() {
            let (lx, ly) = (l_idx[0], l_idx[1]);
            let v = l_val.scale(&C::from_int(g_val));
            // g_ac L_bd with (a,c) = g_pair, (b,d) = (lx,ly)
            out.add_to(vec![g_pair.0, lx, g_pair.1, ly], v.clone());
            // - g_ad L_bc
            out.add_to(vec![g_pair.0, lx, ly, g_pair.1], v.clone().negate());
            // L_ac g_bd
            out.add_to(vec![lx, g_pair.0, ly, g_pair.1], v.clone());
            // - L_ad g_bc
            out.add_to(vec![lx, g_pair.0, g_pair.1, ly], v.negate());
        }
    }
    out
}

/// Weyl conformal curvature tensor `W = R̄ - g ∧ L` with the Schouten
/// tensor `L = ric / n` (the scalar curvature vanishes identically).
/// Requires manifold dimension at least four, i.e. `n >= 2`.
pub fn weyl<C: Scalar>(m: &PpWaveMetric<C>) -> Result<CovariantTensor<C>> {
    let n = m.n();
    if n < 2 {
        return Err(Error::DimensionTooSmallForWeyl(n));
    }
    let inv_n = C::from_rational(&rat(1, n as i64));
    let l = ricci(m).scale(&inv_n);
    curvature(m).checked_sub(&gram_kulkarni(&l))
}

/// First covariant derivative of the curvature tensor (rank 5).
pub fn nabla_r<C: Scalar>(m: &PpWaveMetric<C>) -> CovariantTensor<C> {
    let n = m.n();
    let hess = m.hessian();
    let h = half::<C>();
    let mut t = CovariantTensor::zero(n, 5);
    for i in 1..=n {
        for j in 1..=n {
            // e^k ⊗ block: ½ H_{,ijk}
            for k in 1..=n {
                let val = hess[i - 1][j - 1]
                    .diff(m.var_x(k))
                    .expect("in range")
                    .scale(&h);
                insert_hessian_block(&mut t, &[CoIdx::E(k)], i, j, val);
            }
            // q' ⊗ block: ½ H_{,iju}
            let val_u = hess[i - 1][j - 1]
                .diff(m.var_u())
                .expect("in range")
                .scale(&h);
            insert_hessian_block(&mut t, &[CoIdx::QPrime], i, j, val_u);
        }
    }
    t
}

/// Second covariant derivative of the curvature tensor (rank 6). See the
/// module docs for the component display, in particular the quadratic
/// `¼ Σ_k H_{,k} H_{,ijk}` correction in the `q'⊗q'` block.
pub fn nabla2_r<C: Scalar>(m: &PpWaveMetric<C>) -> CovariantTensor<C> {
    let n = m.n();
    let hess = m.hessian();
    let h = half::<C>();
    let q = quarter::<C>();
    let first: Vec<Polynomial<C>> = (1..=n).map(|i| m.d_x(i)).collect();
    let mut t = CovariantTensor::zero(n, 6);
    for i in 1..=n {
        for j in 1..=n {
            let hij = &hess[i - 1][j - 1];
            let hij_u = hij.diff(m.var_u()).expect("in range");
            // e^k ⊗ e^l and mixed blocks
            for k in 1..=n {
                let hijk = hij.diff(m.var_x(k)).expect("in range");
                for l in 1..=n {
                    let val = hijk.diff(m.var_x(l)).expect("in range").scale(&h);
                    insert_hessian_block(&mut t, &[CoIdx::E(k), CoIdx::E(l)], i, j, val);
                }
                let val_mixed = hijk.diff(m.var_u()).expect("in range").scale(&h);
                insert_hessian_block(
                    &mut t,
                    &[CoIdx::E(k), CoIdx::QPrime],
                    i,
                    j,
                    val_mixed.clone(),
                );
                insert_hessian_block(&mut t, &[CoIdx::QPrime, CoIdx::E(k)], i, j, val_mixed);
            }
            // q' ⊗ q' block
            let mut val_qq = hij_u.diff(m.var_u()).expect("in range").scale(&h);
            for k in 1..=n {
                let hijk = hij.diff(m.var_x(k)).expect("in range");
                val_qq = val_qq
                    .checked_add(&first[k - 1].checked_mul(&hijk).expect("same vars").scale(&q))
                    .expect("same vars");
            }
            insert_hessian_block(&mut t, &[CoIdx::QPrime, CoIdx::QPrime], i, j, val_qq);
        }
    }
    t
}

/// Generic frame-wise covariant derivative of an arbitrary covariant
/// tensor, built only from the connection action on the standard frame
/// (`∇ p = 0`, `∇_u e_i = ½H_{,i} p`, `∇_u q = -½H_{,i} e_i`, all
/// x- and v-direction connection matrices zero). The derivative direction
/// becomes the first slot of the result. This is the oracle against which
/// the closed forms [`nabla_r`] and [`nabla2_r`] are checked; it is also a
/// genuine covariant derivative, so iterating it satisfies the Ricci
/// identity.
pub fn covariant_derivative_oracle<C: Scalar>(
    m: &PpWaveMetric<C>,
    t: &CovariantTensor<C>,
) -> Result<CovariantTensor<C>> {
    if t.n() != m.n() {
        return Err(Error::InvalidInput("tensor/metric dimension mismatch".into()));
    }
    let n = m.n();
    let h = half::<C>();
    let h_x: Vec<Polynomial<C>> = (1..=n).map(|i| m.d_x(i).scale(&h)).collect();
    let half_pot = m.potential().scale(&h);
    let mut out = CovariantTensor::zero(n, t.rank() + 1);
    for (idx, val) in t.components() {
        // ∇_p = ∂_v on components
        let dv = val.diff(m.var_v())?;
        if !dv.is_zero() {
            let mut key = vec![CoIdx::PPrime];
            key.extend_from_slice(idx);
            out.add_to(key, dv.clone());
        }
        // ∇_{e_k} = ∂_k on components
        for k in 1..=n {
            let dk = val.diff(m.var_x(k))?;
            if !dk.is_zero() {
                let mut key = vec![CoIdx::E(k)];
                key.extend_from_slice(idx);
                out.add_to(key, dk);
            }
        }
        // ∇_q = ∂_u - ½H ∂_v on components, plus the connection action
        let mut dq = val.diff(m.var_u())?;
        dq = dq.checked_sub(&half_pot.checked_mul(&val.diff(m.var_v())?)?)?;
        {
            let mut key = vec![CoIdx::QPrime];
            key.extend_from_slice(idx);
            out.add_to(key, dq);
        }
        for s in 0..t.rank() {
            match idx[s] {
                // a p slot feeds every e_i slot with -½H_{,i} T[..p..]
                CoIdx::PPrime => {
                    for i in 1..=n {
                        let mut key = vec![CoIdx::QPrime];
                        key.extend_from_slice(idx);
                        key[s + 1] = CoIdx::E(i);
                        out.add_to(key, h_x[i - 1].checked_mul(val)?.negate());
                    }
                }
                // an e_i slot feeds the q slot with +½H_{,i} T[..e_i..]
                CoIdx::E(i) => {
                    let mut key = vec![CoIdx::QPrime];
                    key.extend_from_slice(idx);
                    key[s + 1] = CoIdx::QPrime;
                    out.add_to(key, h_x[i - 1].checked_mul(val)?);
                }
                CoIdx::QPrime => {}
            }
        }
    }
    Ok(out)
}

/// Coordinate-frame curvature by finite differences, expressed in the
/// standard frame at a point. Independent of every closed form above: the
/// Christoffel symbols come from the symbolic first derivatives of `H`
/// only, their derivatives are central differences, and the curvature is
/// assembled from the general coordinate formula
/// `R^a_{bcd} = ∂_c Γ^a_{db} - ∂_d Γ^a_{cb} + Γ^a_{ce}Γ^e_{db} - Γ^a_{de}Γ^e_{cb}`.
pub fn fd_frame_curvature(m: &PpWaveMetric<f64>, point: &[f64], step: f64) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = m.n();
    let d = n + 2;
    let h_u = m.d_u();
    let h_x: Vec<Polynomial<f64>> = (1..=n).map(|i| m.d_x(i)).collect();

    let gamma_at = |pt: &[f64]| -> Vec<Vec<Vec<f64>>> {
        let mut g = vec![vec![vec![0.0; d]; d]; d];
        let hu = h_u.eval(pt).expect("point length");
        g[0][d - 1][d - 1] = 0.5 * hu;
        for i in 1..=n {
            let hi = h_x[i - 1].eval(pt).expect("point length");
            g[0][i][d - 1] = 0.5 * hi;
            g[0][d - 1][i] = 0.5 * hi;
            g[i][d - 1][d - 1] = -0.5 * hi;
        }
        g
    };

    // dgamma[c][a][db] = ∂_c Γ^a_{db} by central differences
    let mut dgamma = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for c in 0..d {
        let mut plus = point.to_vec();
        let mut minus = point.to_vec();
        plus[c] += step;
        minus[c] -= step;
        let gp = gamma_at(&plus);
        let gm = gamma_at(&minus);
        for a in 0..d {
            for b1 in 0..d {
                for b2 in 0..d {
                    dgamma[c][a][b1][b2] = (gp[a][b1][b2] - gm[a][b1][b2]) / (2.0 * step);
                }
            }
        }
    }
    let gamma = gamma_at(point);

    // coordinate metric at the point
    let mut g = vec![vec![0.0; d]; d];
    g[0][d - 1] = 1.0;
    g[d - 1][0] = 1.0;
    for i in 1..=n {
        g[i][i] = 1.0;
    }
    g[d - 1][d - 1] = m.potential().eval(point).expect("point length");

    // R^a_{bcd}
    let mut riem = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let mut val = dgamma[c][a][e][b] - dgamma[e][a][c][b];
                    for f in 0..d {
                        val += gamma[a][c][f] * gamma[f][e][b] - gamma[a][e][f] * gamma[f][c][b];
                    }
                    riem[a][b][c][e] = val;
                }
            }
        }
    }

    // covariant components R̄(∂_c, ∂_d, ∂_b, ∂_w) = Σ_a g_{aw} R^a_{bcd}
    let mut rbar = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for s1 in 0..d {
        for s2 in 0..d {
            for s3 in 0..d {
                for s4 in 0..d {
                    let mut val = 0.0;
                    for a in 0..d {
                        val += g[a][s4] * riem[a][s3][s1][s2];
                    }
                    rbar[s1][s2][s3][s4] = val;
                }
            }
        }
    }

    // frame vectors in coordinates: p = ∂_v, e_i = ∂_i, q = ∂_u - ½H ∂_v
    let mut frame = vec![vec![0.0; d]; d];
    frame[0][0] = 1.0;
    for i in 1..=n {
        frame[i][i] = 1.0;
    }
    frame[d - 1][0] = -0.5 * g[d - 1][d - 1];
    frame[d - 1][d - 1] = 1.0;

    contract_frame(rbar, &frame, d)
}

fn contract_frame(
    mut t: Vec<Vec<Vec<Vec<f64>>>>,
    frame: &[Vec<f64>],
    d: usize,
) -> Vec<Vec<Vec<Vec<f64>>>> {
    // apply the frame to one slot at a time (slot 0, then rotate)
    for _ in 0..4 {
        let mut next = vec![vec![vec![vec![0.0; d]; d]; d]; d];
        #[allow(clippy::needless_range_loop)]
        for a in 0..d {
            for m in 0..d {
                let fam = frame[a][m];
                if fam == 0.0 {
                    continue;
                }
                for i in 0..d {
                    for j in 0..d {
                        for k in 0..d {
                            // rotate: new[i][j][k][a] accumulates old[m][i][j][k]
                            next[i][j][k][a] += fam * t[m][i][j][k];
                        }
                    }
                }
            }
        }
        t = next;
    }
    t
}

/// Dense frame components of a rank-4 tensor at a point, for comparison
/// against [`fd_frame_curvature`].
pub fn frame_components_dense(t: &CovariantTensor<f64>, point: &[f64]) -> Vec<Vec<Vec<Vec<f64>>>> {
    let n = t.n();
    let d = n + 2;
    assert_eq!(t.rank(), 4);
    let mut out = vec![vec![vec![vec![0.0; d]; d]; d]; d];
    for (idx, val) in t.components() {
        let v = val.eval(point).expect("point length");
        let pos: Vec<usize> = idx.iter().map(|i| i.position(n)).collect();
        out[pos[0]][pos[1]][pos[2]][pos[3]] = v;
    }
    out
}
