//! Sparse multivariate polynomials.
//!
//! A polynomial in `k` variables is a map from exponent vectors of length
//! `k` to nonzero coefficients; equal polynomials have equal term maps. In
//! the pp-wave context the variables are fixed, in order, as
//! `v, x1, ..., xn, u`, and both the string grammar and the JSON form use
//! those names.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial<C> {
    num_vars: usize,
    terms: BTreeMap<Vec<u16>, C>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn zero(num_vars: usize) -> Self {
        Polynomial {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: C) -> Self {
        let mut p = Self::zero(num_vars);
        p.add_term(vec![0; num_vars], c);
        p
    }

    pub fn int_constant(num_vars: usize, n: i64) -> Self {
        Self::constant(num_vars, C::from_int(n))
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, C::one())
    }

    pub fn var(num_vars: usize, index: usize) -> Result<Self> {
        if index >= num_vars {
            return Err(Error::VarIndexOutOfRange { index, num_vars });
        }
        let mut exps = vec![0u16; num_vars];
        exps[index] = 1;
        let mut p = Self::zero(num_vars);
        p.add_term(exps, C::one());
        Ok(p)
    }

    pub fn monomial(num_vars: usize, exps: Vec<u16>, c: C) -> Result<Self> {
        if exps.len() != num_vars {
            return Err(Error::VarCountMismatch(exps.len(), num_vars));
        }
        let mut p = Self::zero(num_vars);
        p.add_term(exps, c);
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient of an exponent vector (zero when absent).
    pub fn coefficient(&self, exps: &[u16]) -> C {
        self.terms.get(exps).cloned().unwrap_or_else(C::zero)
    }

    /// Merge a term in, dropping the entry if the sum cancels.
    pub fn add_term(&mut self, exps: Vec<u16>, c: C) {
        debug_assert_eq!(exps.len(), self.num_vars);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&exps) {
            None => {
                self.terms.insert(exps, c);
            }
            Some(prev) => {
                let sum = prev + c;
                if !sum.is_zero() {
                    self.terms.insert(exps, sum);
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch(self.num_vars, other.num_vars));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.clone().negate())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.num_vars != other.num_vars {
            return Err(Error::VarCountMismatch(self.num_vars, other.num_vars));
        }
        let mut out = Self::zero(self.num_vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exps: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(exps, ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn negate(mut self) -> Self {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.num_vars);
        }
        let mut out = Self::zero(self.num_vars);
        for (e, coef) in &self.terms {
            out.add_term(e.clone(), coef.clone() * c.clone());
        }
        out
    }

    /// Exact formal partial derivative with respect to one variable.
    pub fn diff(&self, var: usize) -> Result<Self> {
        if var >= self.num_vars {
            return Err(Error::VarIndexOutOfRange {
                index: var,
                num_vars: self.num_vars,
            });
        }
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            let k = e[var];
            if k == 0 {
                continue;
            }
            let mut exps = e.clone();
            exps[var] = k - 1;
            out.add_term(exps, c.clone() * C::from_int(k as i64));
        }
        Ok(out)
    }

    /// Exact evaluation at a point.
    pub fn eval(&self, point: &[C]) -> Result<C> {
        if point.len() != self.num_vars {
            return Err(Error::PointLengthMismatch {
                got: point.len(),
                expected: self.num_vars,
            });
        }
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = term * x.clone();
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Exact composition: variable `i` is replaced by `images[i]`. All
    /// images must share a common variable count, which becomes the
    /// variable count of the result.
    pub fn substitute(&self, images: &[Polynomial<C>]) -> Result<Self> {
        if images.len() != self.num_vars {
            return Err(Error::SubstitutionLengthMismatch {
                got: images.len(),
                expected: self.num_vars,
            });
        }
        let new_vars = match images.first() {
            Some(p) => p.num_vars,
            None => 0,
        };
        for img in images {
            if img.num_vars != new_vars {
                return Err(Error::VarCountMismatch(img.num_vars, new_vars));
            }
        }
        // powers[i][k] = images[i]^k, built on demand
        let mut powers: Vec<Vec<Polynomial<C>>> =
            (0..self.num_vars).map(|_| vec![Self::one(new_vars)]).collect();
        let mut out = Self::zero(new_vars);
        for (e, c) in &self.terms {
            let mut term = Self::constant(new_vars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap().checked_mul(&images[i])?;
                    powers[i].push(next);
                }
                term = term.checked_mul(&powers[i][k as usize])?;
            }
            out = out.checked_add(&term)?;
        }
        Ok(out)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&k| k as u32).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Group terms by their exponents on `vars`: the key holds the picked
    /// exponents, the value collects the matching terms with those
    /// positions zeroed out (a polynomial in the remaining variables).
    pub fn split_by_vars(&self, vars: &[usize]) -> BTreeMap<Vec<u16>, Polynomial<C>> {
        let mut groups: BTreeMap<Vec<u16>, Polynomial<C>> = BTreeMap::new();
        for (e, c) in &self.terms {
            let key: Vec<u16> = vars.iter().map(|&i| e[i]).collect();
            let mut rest = e.clone();
            for &i in vars {
                rest[i] = 0;
            }
            groups
                .entry(key)
                .or_insert_with(|| Self::zero(self.num_vars))
                .add_term(rest, c.clone());
        }
        groups
    }

    pub fn map_coefficients<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.num_vars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Largest coefficient magnitude, as f64; 0 for the zero polynomial.
    pub fn max_coef_abs(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().abs())
            .fold(0.0, f64::max)
    }

    /// True when every coefficient passes the scalar's negligibility test.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol))
    }

    /// Drop terms with negligible coefficients (used on numeric data).
    pub fn pruned(&self, tol: f64) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (e, c) in &self.terms {
            if !c.is_negligible(tol) {
                out.add_term(e.clone(), c.clone());
            }
        }
        out
    }
}

impl<C: Scalar> std::ops::Add for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Self) -> Polynomial<C> {
        self.checked_add(rhs).expect("variable count mismatch")
    }
}

impl<C: Scalar> std::ops::Sub for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Self) -> Polynomial<C> {
        self.checked_sub(rhs).expect("variable count mismatch")
    }
}

impl<C: Scalar> std::ops::Mul for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Self) -> Polynomial<C> {
        self.checked_mul(rhs).expect("variable count mismatch")
    }
}

impl<C: Scalar> std::ops::Neg for Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.negate()
    }
}

/// Names used by the string grammar: `v`, `x1..xn`, `u`.
pub fn var_names(num_vars: usize) -> Vec<String> {
    let mut names = vec!["v".to_string()];
    if num_vars >= 2 {
        for i in 1..num_vars - 1 {
            names.push(format!("x{i}"));
        }
        names.push("u".to_string());
    }
    names
}

impl<C: Scalar> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = var_names(self.num_vars);
        let mut first = true;
        for (e, c) in &self.terms {
            let neg = c.to_f64() < 0.0;
            let mag = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        names[i].clone()
                    } else {
                        format!("{}^{}", names[i], k)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", mag.format_coef())?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join(" "))?;
            } else {
                write!(f, "{} * {}", mag.format_coef(), factors.join(" "))?;
            }
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]{:?}", self.num_vars, self.terms)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyDoc {
    pub num_vars: usize,
    pub terms: Vec<PolyTermDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolyTermDoc {
    pub coef: serde_json::Value,
    pub exps: Vec<u16>,
}

impl<C: Scalar> Polynomial<C> {
    pub fn to_doc(&self) -> PolyDoc {
        PolyDoc {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| PolyTermDoc {
                    coef: c.coef_json(),
                    exps: e.clone(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &PolyDoc) -> Result<Self> {
        let mut p = Self::zero(doc.num_vars);
        for t in &doc.terms {
            if t.exps.len() != doc.num_vars {
                return Err(Error::VarCountMismatch(t.exps.len(), doc.num_vars));
            }
            p.add_term(t.exps.clone(), C::coef_from_json(&t.coef)?);
        }
        Ok(p)
    }

    /// Parse the string grammar, e.g. `1/2 * x1^2 u - 3 * v + 7`.
    pub fn parse(text: &str, num_vars: usize) -> Result<Self> {
        let tokens = tokenize(text)?;
        let names = var_names(num_vars);
        let mut out = Self::zero(num_vars);
        let mut pos = 0usize;
        let mut sign_neg = false;
        // leading sign
        if let Some(Token::Op(op)) = tokens.get(pos) {
            if *op == '-' {
                sign_neg = true;
                pos += 1;
            } else if *op == '+' {
                pos += 1;
            }
        }
        loop {
            let (term, next) = parse_term::<C>(&tokens, pos, num_vars, &names)?;
            out = out.checked_add(&if sign_neg { term.negate() } else { term })?;
            pos = next;
            match tokens.get(pos) {
                None => break,
                Some(Token::Op(op)) if *op == '+' || *op == '-' => {
                    sign_neg = *op == '-';
                    pos += 1;
                }
                Some(tok) => {
                    return Err(Error::Parse(format!("unexpected token {tok:?}")));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(String),
    Name(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_ascii_digit()
                    || chars[i] == '.'
                    || chars[i] == '/'
                    || chars[i] == 'e'
                    || (chars[i] == '-' && i > start && chars[i - 1] == 'e'))
            {
                i += 1;
            }
            tokens.push(Token::Number(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric()) {
                i += 1;
            }
            tokens.push(Token::Name(chars[start..i].iter().collect()));
        } else if c == '+' || c == '-' || c == '*' || c == '^' {
            tokens.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?}")));
        }
    }
    Ok(tokens)
}

fn parse_term<C: Scalar>(
    tokens: &[Token],
    mut pos: usize,
    num_vars: usize,
    names: &[String],
) -> Result<(Polynomial<C>, usize)> {
    let mut coef = C::one();
    let mut exps = vec![0u16; num_vars];
    let mut saw_factor = false;
    loop {
        match tokens.get(pos) {
            Some(Token::Number(s)) => {
                coef = coef * C::parse_coef(s)?;
                saw_factor = true;
                pos += 1;
            }
            Some(Token::Name(name)) => {
                let idx = names
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
                let mut power = 1u16;
                if let Some(Token::Op('^')) = tokens.get(pos + 1) {
                    match tokens.get(pos + 2) {
                        Some(Token::Number(s)) => {
                            power = s
                                .parse::<u16>()
                                .map_err(|e| Error::Parse(format!("bad exponent {s:?}: {e}")))?;
                            pos += 3;
                        }
                        other => {
                            return Err(Error::Parse(format!("bad exponent after ^: {other:?}")))
                        }
                    }
                } else {
                    pos += 1;
                }
                exps[idx] += power;
                saw_factor = true;
            }
            Some(Token::Op('*')) => {
                pos += 1;
            }
            _ => break,
        }
    }
    if !saw_factor {
        return Err(Error::Parse("empty term".into()));
    }
    Ok((Polynomial::monomial(num_vars, exps, coef)?, pos))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int, Rational};

    type P = Polynomial<Rational>;

    fn x1() -> P {
        P::var(4, 1).unwrap()
    }
    fn u() -> P {
        P::var(4, 3).unwrap()
    }

    #[test]
    fn square_of_variable() {
        let sq = &x1() * &x1();
        assert_eq!(sq.coefficient(&[0, 2, 0, 0]), rat_int(1));
        assert_eq!(sq.num_terms(), 1);
    }

    #[test]
    fn additive_inverse_cancels() {
        let p = &(&x1() * &u()) + &P::int_constant(4, 5);
        let zero = &p + &p.clone().negate();
        assert!(zero.is_zero());
    }

    #[test]
    fn difference_of_squares() {
        // (u + x1)(u - x1) = u^2 - x1^2
        let prod = &(&u() + &x1()) * &(&u() - &x1());
        let expected = &(&u() * &u()) - &(&x1() * &x1());
        assert_eq!(prod, expected);
    }

    #[test]
    fn diff_power_rule() {
        // d/dx1 (u * x1^2) = 2 u x1
        let p = &u() * &(&x1() * &x1());
        let d = p.diff(1).unwrap();
        assert_eq!(d.coefficient(&[0, 1, 0, 1]), rat_int(2));
        assert_eq!(d.num_terms(), 1);
        // d/du (u * x1^2) = x1^2
        let du = p.diff(3).unwrap();
        assert_eq!(du, &x1() * &x1());
        // constants differentiate to zero
        assert!(P::int_constant(4, 9).diff(2).unwrap().is_zero());
    }

    #[test]
    fn diff_out_of_range() {
        assert!(matches!(
            x1().diff(7),
            Err(Error::VarIndexOutOfRange { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        // x1 * u at (x1=2, u=3) -> 6
        let p = &x1() * &u();
        let pt = [rat_int(0), rat_int(2), rat_int(0), rat_int(3)];
        assert_eq!(p.eval(&pt).unwrap(), rat_int(6));
        assert_eq!(P::zero(4).eval(&pt).unwrap(), rat_int(0));
        // u^2 - x1^2 at (x1=1, u=1) -> 0
        let q = &(&u() * &u()) - &(&x1() * &x1());
        let pt1 = [rat_int(0), rat_int(1), rat_int(0), rat_int(1)];
        assert_eq!(q.eval(&pt1).unwrap(), rat_int(0));
        assert!(matches!(
            p.eval(&[rat_int(1)]),
            Err(Error::PointLengthMismatch { .. })
        ));
    }

    #[test]
    fn substitute_identity_and_shift() {
        let p = &(&x1() * &x1()) + &u();
        let identity: Vec<P> = (0..4).map(|i| P::var(4, i).unwrap()).collect();
        assert_eq!(p.substitute(&identity).unwrap(), p);

        // x1 -> x1 + u applied to x1^2 gives x1^2 + 2 x1 u + u^2
        let mut images = identity.clone();
        images[1] = &x1() + &u();
        let shifted = (&x1() * &x1()).substitute(&images).unwrap();
        let expected = &(&(&x1() * &x1()) + &(&x1() * &u()).scale(&rat_int(2))) + &(&u() * &u());
        assert_eq!(shifted, expected);

        // u -> u + 1 applied to u * x1 gives u x1 + x1
        let mut images2 = identity;
        images2[3] = &u() + &P::one(4);
        let t = (&u() * &x1()).substitute(&images2).unwrap();
        assert_eq!(t, &(&u() * &x1()) + &x1());
    }

    #[test]
    fn string_grammar_roundtrip() {
        let p = &(&(&x1() * &x1()).scale(&rat(3, 2)) - &(&u() * &x1())) + &P::int_constant(4, 7);
        let text = p.to_string();
        let back = P::parse(&text, 4).unwrap();
        assert_eq!(back, p);
        // explicit grammar form
        let q = P::parse("1/2 * x1^2 u - v + 2", 4).unwrap();
        assert_eq!(q.coefficient(&[0, 2, 0, 1]), rat(1, 2));
        assert_eq!(q.coefficient(&[1, 0, 0, 0]), rat_int(-1));
        assert_eq!(q.coefficient(&[0, 0, 0, 0]), rat_int(2));
    }

    #[test]
    fn json_roundtrip() {
        let p = &(&x1() * &u()).scale(&rat(-5, 3)) + &P::int_constant(4, 2);
        let doc = p.to_doc();
        let json = serde_json::to_string(&doc).unwrap();
        let parsed: PolyDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(P::from_doc(&parsed).unwrap(), p);
    }

    #[test]
    fn split_by_vars_groups_x_monomials() {
        // H = u x1^2 + 3 x1 x2 + u^7  (n = 2, vars v x1 x2 u)
        let nv = 4;
        let x2 = P::var(nv, 2).unwrap();
        let h = &(&(&x1() * &x1()) * &u())
            + &(&(&x1() * &x2).scale(&rat_int(3)) + &P::monomial(nv, vec![0, 0, 0, 7], rat_int(1)).unwrap());
        let groups = h.split_by_vars(&[1, 2]);
        assert_eq!(groups.len(), 3);
        assert_eq!(groups[&vec![2, 0]], u());
        assert_eq!(groups[&vec![1, 1]], P::int_constant(nv, 3));
    }
}
