//! Multivariate polynomials as sparse monomial sums.

use crate::error::{Error, Result};

/// A polynomial in d variables stored as (coefficient, exponent vector)
/// terms. Exponent vectors all have length d.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    terms: Vec<(f64, Vec<u32>)>,
    dim: usize,
}

impl MultiPoly {
    pub fn new(dim: usize, terms: Vec<(f64, Vec<u32>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input(
                "multivariate polynomial needs dimension >= 1".into(),
            ));
        }
        for (_, e) in &terms {
            if e.len() != dim {
                return Err(Error::Input(format!(
                    "exponent vector length {} does not match dimension {dim}",
                    e.len()
                )));
            }
        }
        let mut mp = Self { terms, dim };
        mp.normalize();
        Ok(mp)
    }

    fn normalize(&mut self) {
        self.terms.sort_by(|a, b| a.1.cmp(&b.1));
        let mut merged: Vec<(f64, Vec<u32>)> = Vec::with_capacity(self.terms.len());
        for (c, e) in self.terms.drain(..) {
            match merged.last_mut() {
                Some((mc, me)) if *me == e => *mc += c,
                _ => merged.push((c, e)),
            }
        }
        merged.retain(|(c, _)| *c != 0.0);
        self.terms = merged;
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, Vec<u32>)] {
        &self.terms
    }

    /// Max over terms of the sum of exponents.
    pub fn total_degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|(_, e)| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.total_degree() == 0
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::Input(format!(
                "point has dimension {}, polynomial has {}",
                x.len(),
                self.dim
            )));
        }
        let mut acc = 0.0;
        for (c, e) in &self.terms {
            let mut t = *c;
            for (xi, &ei) in x.iter().zip(e) {
                t *= xi.powi(ei as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn partial(&self, i: usize) -> Result<MultiPoly> {
        if i >= self.dim {
            return Err(Error::Input(format!(
                "no coordinate {i} in dimension {}",
                self.dim
            )));
        }
        let mut terms = Vec::new();
        for (c, e) in &self.terms {
            if e[i] > 0 {
                let mut en = e.clone();
                en[i] -= 1;
                terms.push((c * e[i] as f64, en));
            }
        }
        MultiPoly::new(self.dim, terms)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if self.dim != other.dim {
            return Err(Error::Input(
                "dimension mismatch in polynomial difference".into(),
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, e)| (-c, e.clone())));
        MultiPoly::new(self.dim, terms)
    }

    pub fn add_scaled(&self, other: &MultiPoly, s: f64) -> Result<MultiPoly> {
        if self.dim != other.dim {
            return Err(Error::Input("dimension mismatch in polynomial sum".into()));
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(c, e)| (s * c, e.clone())));
        MultiPoly::new(self.dim, terms)
    }

    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(c, e)| {
                let vars: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| {
                        if p == 1 {
                            format!("x{}", i + 1)
                        } else {
                            format!("x{}^{}", i + 1, p)
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}
