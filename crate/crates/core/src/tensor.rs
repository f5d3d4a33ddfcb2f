//! Covariant tensors in the standard coframe `p', e^1..e^n, q'`.
//!
//! Components are stored sparsely, keyed by index tuples; omitted entries
//! are zero. The coframe index order `p' < e^1 < ... < e^n < q'` fixes a
//! deterministic component ordering for serialization.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{PolyDoc, Polynomial};
use crate::scalar::Scalar;

/// Index into the standard coframe (equivalently, the frame vector a
/// covariant slot is evaluated on): `p'`/`p`, `e^i`/`e_i` (1-based), `q'`/`q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoIdx {
    PPrime,
    E(usize),
    QPrime,
}

impl CoIdx {
    pub fn name(&self) -> String {
        match self {
            CoIdx::PPrime => "pp".to_string(),
            CoIdx::E(i) => format!("e{i}"),
            CoIdx::QPrime => "qp".to_string(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "pp" => Ok(CoIdx::PPrime),
            "qp" => Ok(CoIdx::QPrime),
            other => {
                if let Some(num) = other.strip_prefix('e') {
                    let i: usize = num
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad frame index {other:?}")))?;
                    if i == 0 {
                        return Err(Error::Parse("frame index e0 is invalid".into()));
                    }
                    Ok(CoIdx::E(i))
                } else {
                    Err(Error::Parse(format!("bad frame index {other:?}")))
                }
            }
        }
    }

    /// All indices for screen dimension `n`, in order.
    pub fn all(n: usize) -> Vec<CoIdx> {
        let mut v = vec![CoIdx::PPrime];
        v.extend((1..=n).map(CoIdx::E));
        v.push(CoIdx::QPrime);
        v
    }

    /// Position in the `(p, e_1..e_n, q)` basis list.
    pub fn position(&self, n: usize) -> usize {
        match self {
            CoIdx::PPrime => 0,
            CoIdx::E(i) => *i,
            CoIdx::QPrime => n + 1,
        }
    }
}

/// Inverse-Gram pairing of two frame indices: `G(p, q) = G(q, p) = 1`,
/// `G(e_i, e_i) = 1`, everything else zero (the Gram matrix is its own
/// inverse).
pub fn gram_pairing(a: CoIdx, b: CoIdx) -> i64 {
    match (a, b) {
        (CoIdx::PPrime, CoIdx::QPrime) | (CoIdx::QPrime, CoIdx::PPrime) => 1,
        (CoIdx::E(i), CoIdx::E(j)) if i == j => 1,
        _ => 0,
    }
}

#[derive(Clone, PartialEq)]
pub struct CovariantTensor<C> {
    n: usize,
    rank: usize,
    components: BTreeMap<Vec<CoIdx>, Polynomial<C>>,
}

impl<C: Scalar> CovariantTensor<C> {
    pub fn zero(n: usize, rank: usize) -> Self {
        CovariantTensor {
            n,
            rank,
            components: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn num_vars(&self) -> usize {
        self.n + 2
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// True when every component is negligible at the tolerance.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.components.values().all(|p| p.is_negligible(tol))
    }

    pub fn components(&self) -> impl Iterator<Item = (&Vec<CoIdx>, &Polynomial<C>)> {
        self.components.iter()
    }

    pub fn get(&self, idx: &[CoIdx]) -> Polynomial<C> {
        self.components
            .get(idx)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.n + 2))
    }

    pub fn set(&mut self, idx: Vec<CoIdx>, value: Polynomial<C>) {
        debug_assert_eq!(idx.len(), self.rank);
        debug_assert!(idx.iter().all(|i| match i {
            CoIdx::E(k) => (1..=self.n).contains(k),
            _ => true,
        }));
        if value.is_zero() {
            self.components.remove(&idx);
        } else {
            self.components.insert(idx, value);
        }
    }

    pub fn add_to(&mut self, idx: Vec<CoIdx>, value: Polynomial<C>) {
        if value.is_zero() {
            return;
        }
        let sum = match self.components.remove(&idx) {
            None => value,
            Some(prev) => prev.checked_add(&value).expect("same vars"),
        };
        if !sum.is_zero() {
            self.components.insert(idx, sum);
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::InvalidInput("tensor shape mismatch".into()));
        }
        let mut out = self.clone();
        for (idx, val) in &other.components {
            out.add_to(idx.clone(), val.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.clone().negate())
    }

    pub fn negate(mut self) -> Self {
        for v in self.components.values_mut() {
            *v = v.clone().negate();
        }
        self
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.n, self.rank);
        for (idx, val) in &self.components {
            out.add_to(idx.clone(), val.scale(c));
        }
        out
    }

    /// Contract two slots with the inverse Gram matrix of the standard
    /// frame, producing a tensor of rank `rank - 2`.
    pub fn contract(&self, slot_a: usize, slot_b: usize) -> Result<Self> {
        if slot_a == slot_b || slot_a >= self.rank || slot_b >= self.rank {
            return Err(Error::InvalidInput("bad contraction slots".into()));
        }
        let (lo, hi) = (slot_a.min(slot_b), slot_a.max(slot_b));
        let mut out = Self::zero(self.n, self.rank - 2);
        for (idx, val) in &self.components {
            let w = gram_pairing(idx[lo], idx[hi]);
            if w == 0 {
                continue;
            }
            let mut rest: Vec<CoIdx> = Vec::with_capacity(self.rank - 2);
            for (s, &i) in idx.iter().enumerate() {
                if s != lo && s != hi {
                    rest.push(i);
                }
            }
            out.add_to(rest, val.scale(&C::from_int(w)));
        }
        Ok(out)
    }

    /// Evaluate every component at a point; absent entries stay absent.
    pub fn eval(&self, point: &[C]) -> Result<BTreeMap<Vec<CoIdx>, C>> {
        let mut out = BTreeMap::new();
        for (idx, val) in &self.components {
            out.insert(idx.clone(), val.eval(point)?);
        }
        Ok(out)
    }

    /// Largest |component coefficient|, used for tolerance scaling.
    pub fn max_coef_abs(&self) -> f64 {
        self.components
            .values()
            .map(|p| p.max_coef_abs())
            .fold(0.0, f64::max)
    }

    pub fn map_coefficients<D: Scalar>(&self, f: impl Fn(&C) -> D) -> CovariantTensor<D> {
        let mut out = CovariantTensor::zero(self.n, self.rank);
        for (idx, val) in &self.components {
            out.add_to(idx.clone(), val.map_coefficients(&f));
        }
        out
    }
}

impl<C: Scalar> fmt::Debug for CovariantTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CovariantTensor(n={}, rank={})", self.n, self.rank)?;
        for (idx, val) in &self.components {
            let names: Vec<String> = idx.iter().map(|i| i.name()).collect();
            writeln!(f, "  ({}) = {}", names.join(", "), val)?;
        }
        Ok(())
    }
}

/// Dump format: zero-suppressed component list in deterministic order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorDoc {
    pub n: usize,
    pub rank: usize,
    pub components: Vec<TensorComponentDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorComponentDoc {
    pub indices: Vec<String>,
    pub value: PolyDoc,
}

impl<C: Scalar> CovariantTensor<C> {
    pub fn to_doc(&self) -> TensorDoc {
        TensorDoc {
            n: self.n,
            rank: self.rank,
            components: self
                .components
                .iter()
                .map(|(idx, val)| TensorComponentDoc {
                    indices: idx.iter().map(|i| i.name()).collect(),
                    value: val.to_doc(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &TensorDoc) -> Result<Self> {
        let mut t = Self::zero(doc.n, doc.rank);
        for comp in &doc.components {
            if comp.indices.len() != doc.rank {
                return Err(Error::InvalidInput("component rank mismatch".into()));
            }
            let idx = comp
                .indices
                .iter()
                .map(|s| CoIdx::parse(s))
                .collect::<Result<Vec<_>>>()?;
            t.add_to(idx, Polynomial::from_doc(&comp.value)?);
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_int, Rational};

    type P = Polynomial<Rational>;

    #[test]
    fn index_order_and_names() {
        let all = CoIdx::all(2);
        assert_eq!(all, vec![CoIdx::PPrime, CoIdx::E(1), CoIdx::E(2), CoIdx::QPrime]);
        assert!(CoIdx::PPrime < CoIdx::E(1));
        assert!(CoIdx::E(2) < CoIdx::QPrime);
        assert_eq!(CoIdx::E(2).name(), "e2");
        assert_eq!(CoIdx::parse("qp").unwrap(), CoIdx::QPrime);
        assert!(CoIdx::parse("z9").is_err());
    }

    #[test]
    fn contraction_uses_gram_pairs() {
        // T = p' ⊗ q' + e^1 ⊗ e^1 contracts to 1 + 1 = 2
        let mut t = CovariantTensor::<Rational>::zero(2, 2);
        t.set(vec![CoIdx::PPrime, CoIdx::QPrime], P::one(4));
        t.set(vec![CoIdx::E(1), CoIdx::E(1)], P::one(4));
        let s = t.contract(0, 1).unwrap();
        assert_eq!(s.get(&[]), P::int_constant(4, 2));
        // q' ⊗ q' contracts to zero: G(q, q) = 0
        let mut t2 = CovariantTensor::<Rational>::zero(2, 2);
        t2.set(vec![CoIdx::QPrime, CoIdx::QPrime], P::one(4));
        assert!(t2.contract(0, 1).unwrap().is_zero());
    }

    #[test]
    fn add_cancels_to_zero() {
        let mut t = CovariantTensor::<Rational>::zero(1, 1);
        t.set(vec![CoIdx::E(1)], P::int_constant(3, 5));
        let diff = t.checked_sub(&t.clone()).unwrap();
        assert!(diff.is_zero());
    }

    #[test]
    fn doc_roundtrip() {
        let mut t = CovariantTensor::<Rational>::zero(1, 2);
        t.set(
            vec![CoIdx::E(1), CoIdx::QPrime],
            P::parse("u * x1", 3).unwrap(),
        );
        t.set(
            vec![CoIdx::QPrime, CoIdx::E(1)],
            P::int_constant(3, -1),
        );
        let doc = t.to_doc();
        assert_eq!(doc.components.len(), 2);
        // deterministic order: e1 before qp
        assert_eq!(doc.components[0].indices, vec!["e1", "qp"]);
        let back = CovariantTensor::<Rational>::from_doc(&doc).unwrap();
        assert_eq!(back, t);
        let json1 = serde_json::to_string(&doc).unwrap();
        let json2 = serde_json::to_string(&t.to_doc()).unwrap();
        assert_eq!(json1, json2);
    }

    #[test]
    fn eval_component_table() {
        let mut t = CovariantTensor::<Rational>::zero(1, 1);
        t.set(vec![CoIdx::E(1)], P::parse("x1 + u", 3).unwrap());
        let vals = t
            .eval(&[rat_int(0), rat_int(2), rat_int(3)])
            .unwrap();
        assert_eq!(vals[&vec![CoIdx::E(1)]], rat_int(5));
    }
}
