//! Adapted coordinate changes preserving the pp-wave form.
//!
//! A transformation holds the data `(a, b, c, d)` describing the old
//! coordinates in terms of the new ones:
//!
//! ```text
//! x^i = a^i_j x̃^j + b^i(ũ),    u = ũ + c,
//! v   = ṽ - Σ_{i,j} a^j_i (db^j/dũ)(ũ) x̃^i + d(ũ),
//! ```
//!
//! with `a` orthogonal and `b^i, d` polynomials in `u`. Applying it to a
//! potential `H` produces
//!
//! `H̃ = H(a x̃ + b, ũ + c) + Σ_i (db^i/dũ)² + 2 dd/dũ - 2 Σ_{i,j} a^j_i (d²b^j/dũ²) x̃^i`,
//!
//! which reduces to the usual update rules for the quadratic family. These
//! maps form a group; `compose` and `inverse` stay inside it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::PpWaveMetric;
use crate::poly::{PolyDoc, Polynomial};
use crate::scalar::Scalar;

const ORTHOGONALITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedTransformation<C> {
    n: usize,
    a: Vec<Vec<C>>,
    b: Vec<Polynomial<C>>,
    c: C,
    d: Polynomial<C>,
}

fn depends_only_on_u<C: Scalar>(p: &Polynomial<C>, n: usize) -> bool {
    (0..=n).all(|i| !p.depends_on(i))
}

impl<C: Scalar> AdaptedTransformation<C> {
    /// Validates orthogonality of `a` (exactly for exact scalars, to
    /// `1e-12` for floats) and that `b`, `d` depend on `u` only.
    pub fn new(a: Vec<Vec<C>>, b: Vec<Polynomial<C>>, c: C, d: Polynomial<C>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidInput("a must be square and nonempty".into()));
        }
        if b.len() != n {
            return Err(Error::InvalidInput(format!(
                "b must have {n} entries, got {}",
                b.len()
            )));
        }
        let nv = n + 2;
        for p in b.iter().chain(std::iter::once(&d)) {
            if p.num_vars() != nv {
                return Err(Error::VarCountMismatch(p.num_vars(), nv));
            }
            if !depends_only_on_u(p, n) {
                return Err(Error::NotAFunctionOfU);
            }
        }
        // a^T a = 1
        for i in 0..n {
            for j in 0..n {
                let mut dot = C::zero();
                for k in 0..n {
                    dot = dot + a[k][i].clone() * a[k][j].clone();
                }
                let expected = if i == j { C::one() } else { C::zero() };
                if !(dot - expected).is_negligible(ORTHOGONALITY_TOL) {
                    return Err(Error::NotOrthogonal(format!("column pair ({i}, {j})")));
                }
            }
        }
        Ok(AdaptedTransformation { n, a, b, c, d })
    }

    pub fn identity(n: usize) -> Self {
        let nv = n + 2;
        let a = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { C::one() } else { C::zero() })
                    .collect()
            })
            .collect();
        AdaptedTransformation {
            n,
            a,
            b: vec![Polynomial::zero(nv); n],
            c: C::zero(),
            d: Polynomial::zero(nv),
        }
    }

    /// Exact signed permutation: `x^i = sign_i * x̃^{perm(i)}`.
    pub fn signed_permutation(perm: &[usize], signs: &[i64]) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::InvalidInput("perm/sign length mismatch".into()));
        }
        let mut seen = vec![false; n];
        let mut a = vec![vec![C::zero(); n]; n];
        for i in 0..n {
            if perm[i] >= n || seen[perm[i]] || (signs[i] != 1 && signs[i] != -1) {
                return Err(Error::InvalidInput("not a signed permutation".into()));
            }
            seen[perm[i]] = true;
            a[i][perm[i]] = C::from_int(signs[i]);
        }
        Self::new(
            a,
            vec![Polynomial::zero(n + 2); n],
            C::zero(),
            Polynomial::zero(n + 2),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &Vec<Vec<C>> {
        &self.a
    }

    pub fn b(&self) -> &[Polynomial<C>] {
        &self.b
    }

    pub fn c(&self) -> &C {
        &self.c
    }

    pub fn d(&self) -> &Polynomial<C> {
        &self.d
    }

    fn var_u(&self) -> usize {
        self.n + 1
    }

    /// Substitute `u -> u + shift` in a polynomial of `u`.
    fn shift_u(&self, p: &Polynomial<C>, shift: &C) -> Polynomial<C> {
        let nv = self.n + 2;
        let mut images: Vec<Polynomial<C>> = (0..nv)
            .map(|i| Polynomial::var(nv, i).expect("in range"))
            .collect();
        images[self.var_u()] = images[self.var_u()]
            .checked_add(&Polynomial::constant(nv, shift.clone()))
            .expect("same vars");
        p.substitute(&images).expect("same vars")
    }

    /// New potential after the coordinate change.
    pub fn apply(&self, m: &PpWaveMetric<C>) -> Result<PpWaveMetric<C>> {
        if m.n() != self.n {
            return Err(Error::VarCountMismatch(m.n(), self.n));
        }
        m.validate()?;
        let n = self.n;
        let nv = n + 2;
        let u = Polynomial::<C>::var(nv, self.var_u())?;

        // images of (v, x^1..x^n, u) in the new coordinates
        let mut images: Vec<Polynomial<C>> = Vec::with_capacity(nv);
        images.push(Polynomial::var(nv, 0)?); // v never occurs in H
        for i in 0..n {
            let mut img = self.b[i].clone();
            for j in 0..n {
                let xj = Polynomial::var(nv, 1 + j)?;
                img = img.checked_add(&xj.scale(&self.a[i][j]))?;
            }
            images.push(img);
        }
        images.push(u.checked_add(&Polynomial::constant(nv, self.c.clone()))?);

        let mut h = m.potential().substitute(&images)?;

        let b_dot: Vec<Polynomial<C>> = self
            .b
            .iter()
            .map(|p| p.diff(self.var_u()).expect("in range"))
            .collect();
        let b_ddot: Vec<Polynomial<C>> = b_dot
            .iter()
            .map(|p| p.diff(self.var_u()).expect("in range"))
            .collect();

        // + Σ (db^i/du)^2
        for bd in &b_dot {
            h = h.checked_add(&bd.checked_mul(bd)?)?;
        }
        // + 2 d'(u)
        h = h.checked_add(&self.d.diff(self.var_u())?.scale(&C::from_int(2)))?;
        // - 2 Σ_{j,k} a^j_k b''_j x^k
        for k in 0..n {
            let xk = Polynomial::<C>::var(nv, 1 + k)?;
            for j in 0..n {
                let term = b_ddot[j]
                    .scale(&self.a[j][k])
                    .checked_mul(&xk)?
                    .scale(&C::from_int(-2));
                h = h.checked_add(&term)?;
            }
        }
        PpWaveMetric::new(n, h)
    }

    /// Composition in the order `apply(apply(m, t1), t2) = apply(m, t1.compose(&t2))`
    /// (the coordinate map of the result is `φ_{t1} ∘ φ_{t2}`).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::VarCountMismatch(self.n, other.n));
        }
        let n = self.n;
        let nv = n + 2;
        // a = a1 a2
        let mut a = vec![vec![C::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = C::zero();
                for k in 0..n {
                    acc = acc + self.a[i][k].clone() * other.a[k][j].clone();
                }
                a[i][j] = acc;
            }
        }
        // b(u) = a1 b2(u) + b1(u + c2)
        let mut b = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.shift_u(&self.b[i], &other.c);
            for j in 0..n {
                acc = acc.checked_add(&other.b[j].scale(&self.a[i][j]))?;
            }
            b.push(acc);
        }
        let c = self.c.clone() + other.c.clone();
        // d(u) = d1(u + c2) + d2(u) - < a1^T b1'(u + c2), b2(u) >
        let mut d = self
            .shift_u(&self.d, &other.c)
            .checked_add(&other.d)?;
        let b1_dot: Vec<Polynomial<C>> = self
            .b
            .iter()
            .map(|p| p.diff(self.var_u()).expect("in range"))
            .collect();
        for j in 0..n {
            // (a1^T b1'(u + c2))_j = Σ_k a1[k][j] b1'_k(u + c2)
            let mut comp = Polynomial::zero(nv);
            for k in 0..n {
                comp = comp.checked_add(&self.shift_u(&b1_dot[k], &other.c).scale(&self.a[k][j]))?;
            }
            d = d.checked_sub(&comp.checked_mul(&other.b[j])?)?;
        }
        Self::new(a, b, c, d)
    }

    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let neg_c = -self.c.clone();
        // a^T
        let mut at = vec![vec![C::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                at[i][j] = self.a[j][i].clone();
            }
        }
        // b̂(u) = -a^T b(u - c)
        let shifted_b: Vec<Polynomial<C>> =
            self.b.iter().map(|p| self.shift_u(p, &neg_c)).collect();
        let mut bhat = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Polynomial::zero(n + 2);
            for j in 0..n {
                acc = acc.checked_add(&shifted_b[j].scale(&self.a[j][i]))?;
            }
            bhat.push(acc.negate());
        }
        // d̂(u) = -d(u - c) - < b'(u - c), b(u - c) >
        let mut dhat = self.shift_u(&self.d, &neg_c).negate();
        for j in 0..n {
            let bj_dot_shifted = self.shift_u(
                &self.b[j].diff(self.var_u()).expect("in range"),
                &neg_c,
            );
            dhat = dhat.checked_sub(&bj_dot_shifted.checked_mul(&shifted_b[j])?)?;
        }
        Self::new(at, bhat, neg_c, dhat)
    }

    pub fn to_numeric(&self) -> AdaptedTransformation<f64> {
        AdaptedTransformation {
            n: self.n,
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|x| x.to_f64()).collect())
                .collect(),
            b: self
                .b
                .iter()
                .map(|p| p.map_coefficients(|c| c.to_f64()))
                .collect(),
            c: self.c.to_f64(),
            d: self.d.map_coefficients(|c| c.to_f64()),
        }
    }
}

/// JSON document for a transformation. `exact` selects the scalar used
/// when reading it back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransformationDoc {
    pub a: Vec<Vec<serde_json::Value>>,
    pub b: Vec<PolyDoc>,
    pub c: serde_json::Value,
    pub d: PolyDoc,
    pub exact: bool,
}

impl<C: Scalar> AdaptedTransformation<C> {
    pub fn to_doc(&self) -> TransformationDoc {
        TransformationDoc {
            a: self
                .a
                .iter()
                .map(|row| row.iter().map(|x| x.coef_json()).collect())
                .collect(),
            b: self.b.iter().map(|p| p.to_doc()).collect(),
            c: self.c.coef_json(),
            d: self.d.to_doc(),
            exact: C::EXACT,
        }
    }

    pub fn from_doc(doc: &TransformationDoc) -> Result<Self> {
        let a = doc
            .a
            .iter()
            .map(|row| row.iter().map(C::coef_from_json).collect())
            .collect::<Result<Vec<Vec<C>>>>()?;
        let b = doc
            .b
            .iter()
            .map(Polynomial::from_doc)
            .collect::<Result<Vec<_>>>()?;
        Self::new(a, b, C::coef_from_json(&doc.c)?, Polynomial::from_doc(&doc.d)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, Rational};

    type P = Polynomial<Rational>;
    type T = AdaptedTransformation<Rational>;

    fn metric(text: &str, n: usize) -> PpWaveMetric<Rational> {
        PpWaveMetric::new(n, P::parse(text, n + 2).unwrap()).unwrap()
    }

    #[test]
    fn identity_keeps_metric() {
        let m = metric("u * x1^2 + x1 x2", 2);
        let t = T::identity(2);
        assert_eq!(t.apply(&m).unwrap(), m);
    }

    #[test]
    fn reflection_keeps_square() {
        // H = x1^2 with a = (-1) is unchanged
        let m = metric("x1^2", 1);
        let t = T::new(
            vec![vec![rat_int(-1)]],
            vec![P::zero(3)],
            rat_int(0),
            P::zero(3),
        )
        .unwrap();
        assert_eq!(t.apply(&m).unwrap(), m);
    }

    #[test]
    fn translation_in_x_by_u() {
        // H = x1^2, b1(u) = u: H̃ = x1^2 + 2 u x1 + u^2 + 1, the constant
        // coming from the (db/du)^2 term.
        let m = metric("x1^2", 1);
        let t = T::new(
            vec![vec![rat_int(1)]],
            vec![P::var(3, 2).unwrap()],
            rat_int(0),
            P::zero(3),
        )
        .unwrap();
        let out = t.apply(&m).unwrap();
        assert_eq!(out, metric("x1^2 + 2 * u x1 + u^2 + 1", 1));
    }

    #[test]
    fn second_derivative_term_enters() {
        // b1(u) = u^2 has b'' = 2, contributing -2 * a * b'' * x1 = -4 x1.
        let m = metric("0", 1);
        let b = P::parse("u^2", 3).unwrap();
        let t = T::new(vec![vec![rat_int(1)]], vec![b], rat_int(0), P::zero(3)).unwrap();
        let out = t.apply(&m).unwrap();
        // H̃ = (b')^2 - 2 b'' x1 = 4u^2 - 4 x1
        assert_eq!(out, metric("4 * u^2 - 4 * x1", 1));
    }

    #[test]
    fn non_orthogonal_is_rejected() {
        let bad = T::new(
            vec![vec![rat_int(2)]],
            vec![P::zero(3)],
            rat_int(0),
            P::zero(3),
        );
        assert!(matches!(bad, Err(Error::NotOrthogonal(_))));
    }

    #[test]
    fn b_with_x_dependence_rejected() {
        let bad = T::new(
            vec![vec![rat_int(1)]],
            vec![P::var(3, 1).unwrap()],
            rat_int(0),
            P::zero(3),
        );
        assert_eq!(bad.unwrap_err(), Error::NotAFunctionOfU);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let m = metric("u * x1^2 + 3 * x1 x2 + x2^2", 2);
        let t1 = T::new(
            vec![
                vec![rat_int(0), rat_int(1)],
                vec![rat_int(-1), rat_int(0)],
            ],
            vec![P::parse("u", 4).unwrap(), P::parse("1 - u^2", 4).unwrap()],
            rat(1, 2),
            P::parse("u^3", 4).unwrap(),
        )
        .unwrap();
        let t2 = T::new(
            vec![
                vec![rat(3, 5), rat(4, 5)],
                vec![rat(-4, 5), rat(3, 5)],
            ],
            vec![P::parse("2 * u", 4).unwrap(), P::zero(4)],
            rat_int(-1),
            P::parse("u", 4).unwrap(),
        )
        .unwrap();
        let sequential = t2.apply(&t1.apply(&m).unwrap()).unwrap();
        let composed = t1.compose(&t2).unwrap().apply(&m).unwrap();
        assert_eq!(sequential, composed);
    }

    #[test]
    fn inverse_undoes_application() {
        let m = metric("u * x1^2 + x1", 1);
        let t = T::new(
            vec![vec![rat_int(-1)]],
            vec![P::parse("u^2 + u", 3).unwrap()],
            rat_int(2),
            P::parse("3 * u", 3).unwrap(),
        )
        .unwrap();
        let inv = t.inverse().unwrap();
        let round = inv.apply(&t.apply(&m).unwrap()).unwrap();
        assert_eq!(round, m);
        // composition with the inverse is the identity transformation
        let id = t.compose(&inv).unwrap();
        assert_eq!(id, T::identity(1));
    }

    #[test]
    fn doc_roundtrip_exact_and_numeric() {
        let t = T::signed_permutation(&[1, 0], &[1, -1]).unwrap();
        let doc = t.to_doc();
        assert!(doc.exact);
        let back = T::from_doc(&doc).unwrap();
        assert_eq!(back, t);

        let tn = t.to_numeric();
        let docn = tn.to_doc();
        assert!(!docn.exact);
        let backn = AdaptedTransformation::<f64>::from_doc(&docn).unwrap();
        assert_eq!(backn.a()[0][1], 1.0);
    }
}
