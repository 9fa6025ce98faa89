//! Sparse real polynomials in several variables, used as exact test functions
//! for first-order differential operators.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exponents: Vec<u32>, coeff: f64) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    fn add_term(&mut self, exponents: Vec<u32>, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        *self.terms.entry(exponents).or_insert(0.0) += coeff;
    }

    /// x_var · p
    pub fn mul_var(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (exps, &c) in &self.terms {
            let mut e = exps.clone();
            e[var] += 1;
            out.add_term(e, c);
        }
        out
    }

    /// ∂p/∂x_var
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (exps, &c) in &self.terms {
            if exps[var] == 0 {
                continue;
            }
            let mut e = exps.clone();
            let k = e[var];
            e[var] -= 1;
            out.add_term(e, c * f64::from(k));
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = Self::zero(self.nvars);
        for (exps, &c) in &self.terms {
            out.add_term(exps.clone(), c * factor);
        }
        out
    }

    /// self + factor·other
    pub fn axpy(&self, factor: f64, other: &Poly) -> Self {
        let mut out = self.clone();
        for (exps, &c) in &other.terms {
            out.add_term(exps.clone(), factor * c);
        }
        out
    }

    /// Largest coefficient magnitude; zero for the zero polynomial.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Every monomial of total degree ≤ `degree` in `nvars` variables.
pub fn monomial_basis(nvars: usize, degree: u32) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut exps = vec![0u32; nvars];
    fill_basis(0, degree, &mut exps, &mut out);
    out
}

fn fill_basis(var: usize, budget: u32, exps: &mut Vec<u32>, out: &mut Vec<Poly>) {
    if var == exps.len() {
        out.push(Poly::monomial(exps.clone(), 1.0));
        return;
    }
    for k in 0..=budget {
        exps[var] = k;
        fill_basis(var + 1, budget - k, exps, out);
    }
    exps[var] = 0;
}

/// A real first-order operator: multiplication by a coordinate, or a
/// constant-coefficient combination of partial derivatives.
///
/// Momentum operators are `−iħ·D` with `D` a [`LinearOp::Gradient`]; the
/// imaginary unit is carried analytically by the callers.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearOp {
    Coordinate(usize),
    Gradient(Vec<(usize, f64)>),
}

impl LinearOp {
    pub fn apply(&self, p: &Poly) -> Poly {
        match self {
            LinearOp::Coordinate(v) => p.mul_var(*v),
            LinearOp::Gradient(parts) => parts
                .iter()
                .fold(Poly::zero(p.nvars()), |acc, (v, c)| acc.axpy(*c, &p.derivative(*v))),
        }
    }
}

/// [A, B] applied to `p`.
pub fn commutator(a: &LinearOp, b: &LinearOp, p: &Poly) -> Poly {
    a.apply(&b.apply(p)).axpy(-1.0, &b.apply(&a.apply(p)))
}
