//! The pp-wave metric `2 du dv + δ_ij dx^i dx^j + H(x, u) du²` and its
//! standard frame.
//!
//! Coordinates are ordered `v, x1, ..., xn, u`, so the potential lives in
//! `n + 2` variables and may not depend on `v`. All tensor components in
//! this crate are taken with respect to the standard frame
//! `p = ∂_v, e_i = ∂_i, q = ∂_u - H/2 ∂_v` and its dual coframe
//! `p' = dv + H/2 du, e^i = dx^i, q' = du`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolyDoc, Polynomial};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct PpWaveMetric<C> {
    n: usize,
    potential: Polynomial<C>,
}

impl<C: Scalar> PpWaveMetric<C> {
    /// Build and validate: `n >= 1` and `∂_v H = 0`.
    pub fn new(n: usize, potential: Polynomial<C>) -> Result<Self> {
        if n < 1 {
            return Err(Error::BadDimension);
        }
        if potential.num_vars() != n + 2 {
            return Err(Error::VarCountMismatch(potential.num_vars(), n + 2));
        }
        let m = PpWaveMetric { n, potential };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::BadDimension);
        }
        if self.potential.depends_on(self.var_v()) {
            return Err(Error::PotentialDependsOnV);
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Manifold dimension `n + 2`.
    pub fn dim(&self) -> usize {
        self.n + 2
    }

    pub fn num_vars(&self) -> usize {
        self.n + 2
    }

    pub fn potential(&self) -> &Polynomial<C> {
        &self.potential
    }

    pub fn var_v(&self) -> usize {
        0
    }

    /// Variable index of `x^i` for `i` in `1..=n`.
    pub fn var_x(&self, i: usize) -> usize {
        debug_assert!((1..=self.n).contains(&i));
        i
    }

    pub fn var_u(&self) -> usize {
        self.n + 1
    }

    pub fn x_vars(&self) -> Vec<usize> {
        (1..=self.n).collect()
    }

    /// `∂H/∂x^i`, `i` in `1..=n`.
    pub fn d_x(&self, i: usize) -> Polynomial<C> {
        self.potential.diff(self.var_x(i)).expect("x index in range")
    }

    pub fn d_u(&self) -> Polynomial<C> {
        self.potential.diff(self.var_u()).expect("u index in range")
    }

    /// Hessian `H_{,ij}` as an n×n matrix of polynomials (1-based callers
    /// use `[i-1][j-1]`).
    pub fn hessian(&self) -> Vec<Vec<Polynomial<C>>> {
        let firsts: Vec<Polynomial<C>> = (1..=self.n).map(|i| self.d_x(i)).collect();
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| firsts[i].diff(self.var_x(j + 1)).expect("in range"))
                    .collect()
            })
            .collect()
    }

    pub fn map_coefficients<D: Scalar>(&self, f: impl Fn(&C) -> D) -> PpWaveMetric<D> {
        PpWaveMetric {
            n: self.n,
            potential: self.potential.map_coefficients(f),
        }
    }

    /// Floating-point copy of the metric.
    pub fn to_numeric(&self) -> PpWaveMetric<f64> {
        self.map_coefficients(|c| c.to_f64())
    }
}

/// JSON document `{ "n": .., "H": <polynomial> }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricDoc {
    pub n: usize,
    #[serde(rename = "H")]
    pub h: PolyDoc,
}

impl<C: Scalar> PpWaveMetric<C> {
    pub fn to_doc(&self) -> MetricDoc {
        MetricDoc {
            n: self.n,
            h: self.potential.to_doc(),
        }
    }

    pub fn from_doc(doc: &MetricDoc) -> Result<Self> {
        let h = Polynomial::from_doc(&doc.h)?;
        PpWaveMetric::new(doc.n, h)
    }
}

/// Constant Gram matrix of the standard frame `(p, e_1..e_n, q)`:
/// `g(p,q) = 1`, `g(e_i,e_j) = δ_ij`, all other pairings zero.
pub fn gram_matrix(n: usize) -> Vec<Vec<i64>> {
    let d = n + 2;
    let mut g = vec![vec![0i64; d]; d];
    g[0][d - 1] = 1;
    g[d - 1][0] = 1;
    for i in 1..=n {
        g[i][i] = 1;
    }
    g
}
