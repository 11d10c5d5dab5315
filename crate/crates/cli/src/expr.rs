//! Closed-form expressions from configuration files, e.g. `-sin(x)` or
//! `r^3*exp(-r)`. Parsed once; evaluation reuses a per-thread builtin
//! context (`pi`, `e`, `sin`, `exp`, ...).

use blowup_core::function::FieldFn;
use blowup_core::polar::radial::RadialFn;

use crate::error::{CliError, Result};

thread_local! {
    static BUILTINS: meval::Context<'static> = meval::Context::new();
}

struct Vars<'a>(&'a [(&'a str, f64)]);

impl meval::ContextProvider for Vars<'_> {
    fn get_var(&self, name: &str) -> Option<f64> {
        self.0.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }
}

/// A parsed expression in the named variables.
#[derive(Debug, Clone)]
pub struct Expr {
    pub source: String,
    expr: meval::Expr,
}

impl Expr {
    /// Parses `source` and checks that it only uses `vars` and builtins.
    pub fn parse(source: &str, vars: &[&str]) -> Result<Self> {
        let expr: meval::Expr = source
            .parse()
            .map_err(|e| CliError::config(format!("cannot parse `{source}`: {e}")))?;
        let probe: Vec<(&str, f64)> = vars.iter().map(|&v| (v, 0.5)).collect();
        BUILTINS
            .with(|b| expr.eval_with_context((Vars(&probe), b)))
            .map_err(|e| CliError::config(format!("`{source}`: {e} (allowed variables: {})", vars.join(", "))))?;
        Ok(Expr {
            source: source.to_string(),
            expr,
        })
    }

    pub fn eval(&self, vars: &[(&str, f64)]) -> f64 {
        BUILTINS
            .with(|b| self.expr.eval_with_context((Vars(vars), b)))
            .unwrap_or(f64::NAN)
    }
}

/// A field `f(x, y)`.
pub fn field_fn(source: &str) -> Result<FieldFn> {
    let e = Expr::parse(source, &["x", "y"])?;
    let label = e.source.clone();
    Ok(FieldFn::closed(label, move |[x, y]| e.eval(&[("x", x), ("y", y)])))
}

/// A radial profile `f(r)`.
pub fn radial_fn(source: &str) -> Result<RadialFn> {
    let e = Expr::parse(source, &["r"])?;
    let label = e.source.clone();
    Ok(RadialFn::new(label, move |r| e.eval(&[("r", r)])))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unary_minus_binds_weaker_than_power() {
        let e = Expr::parse("-x^2", &["x"]).unwrap();
        assert_eq!(e.eval(&[("x", 3.0)]), -9.0);
    }

    #[test]
    fn builtins_and_unknown_names() {
        let f = field_fn("-sin(x) + 0*y + pi").unwrap();
        assert!((f.eval([1.0, 0.0]) - (std::f64::consts::PI - 1f64.sin())).abs() < 1e-15);
        assert!(field_fn("sin(z)").is_err());
        assert!(field_fn("sin(").is_err());
        let g = radial_fn("r^3*exp(-r)").unwrap();
        assert!((g.eval(2.0) - 8.0 * (-2f64).exp()).abs() < 1e-15);
    }
}
