//! Radial operators assembled from terms `coeff · r^a · ∫ s^b g(s) ds` over
//! `(0, r)` or `(r, ∞)`, plus local terms `coeff · r^a · g(r)`. The formal
//! adjoint with respect to `∫₀^∞ · dr` swaps `a` with `b` and the two ranges.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::Result;
use crate::polar::radial::{Moments, Radial, RadialFn, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Range {
    /// `∫₀^r`.
    Head,
    /// `∫_r^∞`.
    Tail,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    Local { coeff: f64, a: f64 },
    Integral { coeff: f64, a: f64, b: f64, range: Range },
}

impl Term {
    pub fn adjoint(self) -> Term {
        match self {
            Term::Local { .. } => self,
            Term::Integral { coeff, a, b, range } => Term::Integral {
                coeff,
                a: b,
                b: a,
                range: match range {
                    Range::Head => Range::Tail,
                    Range::Tail => Range::Head,
                },
            },
        }
    }

    fn describe(self) -> String {
        match self {
            Term::Local { coeff, a } => format!("{coeff:+}·r^{a}·g(r)"),
            Term::Integral { coeff, a, b, range } => {
                let bounds = match range {
                    Range::Head => "0..r",
                    Range::Tail => "r..inf",
                };
                format!("{coeff:+}·r^{a}·∫[{bounds}] s^{b} g(s) ds")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialOperator {
    pub terms: Vec<Term>,
}

impl RadialOperator {
    /// `L(g) = c∫_r^∞ g/s - C(g + (1/r)∫₀^r g + r∫_r^∞ g/s²)`.
    pub fn l(c: f64, big_c: f64) -> Self {
        RadialOperator {
            terms: Vec::from([
                Term::Integral { coeff: c, a: 0.0, b: -1.0, range: Range::Tail },
                Term::Local { coeff: -big_c, a: 0.0 },
                Term::Integral { coeff: -big_c, a: -1.0, b: 0.0, range: Range::Head },
                Term::Integral { coeff: -big_c, a: 1.0, b: -2.0, range: Range::Tail },
            ]),
        }
    }

    /// The formal adjoint, term by term.
    pub fn adjoint(&self) -> Self {
        RadialOperator {
            terms: self.terms.iter().map(|t| t.adjoint()).collect(),
        }
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self.terms.iter().map(|t| t.describe()).collect();
        parts.join(" ")
    }

    /// Prepares `self(g)` for evaluation at arbitrary `r`.
    pub fn apply(&self, engine: &Radial, g: &RadialFn) -> Result<Applied> {
        let mut parts = Vec::with_capacity(self.terms.len());
        for &term in &self.terms {
            parts.push(match term {
                Term::Local { .. } => (term, None),
                Term::Integral { b, range: Range::Head, .. } => (term, Some(engine.head_moments(g, b)?)),
                Term::Integral { b, range: Range::Tail, .. } => (term, Some(engine.tail_moments(g, b)?)),
            });
        }
        Ok(Applied { g: g.clone(), parts })
    }
}

/// An operator applied to one function, with cached moments.
#[derive(Debug, Clone)]
pub struct Applied {
    g: RadialFn,
    parts: Vec<(Term, Option<Moments>)>,
}

impl Applied {
    pub fn eval(&self, r: f64) -> Result<f64> {
        let mut sum = 0.0;
        for (term, moments) in &self.parts {
            sum += match (term, moments) {
                (Term::Local { coeff, a }, _) => coeff * r.powf(*a) * self.g.eval(r),
                (Term::Integral { coeff, a, range, .. }, Some(m)) => {
                    let integral = match range {
                        Range::Head => m.head(r)?,
                        Range::Tail => m.tail(r)?,
                    };
                    coeff * r.powf(*a) * integral
                }
                (Term::Integral { .. }, None) => unreachable!("moments are prepared for every integral term"),
            };
        }
        Ok(sum)
    }

    /// Values at the grid nodes.
    pub fn at_nodes(&self, engine: &Radial) -> Result<RadialProfile> {
        let nodes = engine.grid().nodes();
        let mut values = Vec::with_capacity(nodes.len());
        for (i, &r) in nodes.iter().enumerate() {
            let mut sum = 0.0;
            for (term, moments) in &self.parts {
                sum += match (term, moments) {
                    (Term::Local { coeff, a }, _) => coeff * r.powf(*a) * self.g.eval(r),
                    (Term::Integral { coeff, a, range, .. }, Some(m)) => {
                        let integral = match range {
                            Range::Head => m.head_at_nodes()?[i],
                            Range::Tail => m.tail_at_nodes()?[i],
                        };
                        coeff * r.powf(*a) * integral
                    }
                    (Term::Integral { .. }, None) => unreachable!("moments are prepared for every integral term"),
                };
            }
            values.push(sum);
        }
        RadialProfile::new(engine.grid().clone(), values)
    }
}

/// `L(g)` at the grid nodes.
pub fn l_apply(engine: &Radial, g: &RadialFn, c: f64, big_c: f64) -> Result<RadialProfile> {
    RadialOperator::l(c, big_c).apply(engine, g)?.at_nodes(engine)
}

/// `L*(g)` at the grid nodes, from the generated adjoint.
pub fn lstar_apply(engine: &Radial, g: &RadialFn, c: f64, big_c: f64) -> Result<RadialProfile> {
    RadialOperator::l(c, big_c).adjoint().apply(engine, g)?.at_nodes(engine)
}
