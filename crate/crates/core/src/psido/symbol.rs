use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub type EntryFn = Arc<dyn Fn(&[f64], &[f64], usize, usize) -> Complex64 + Send + Sync>;
pub type SpaceFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolKind {
    /// Depends on `xi` only: a Fourier multiplier.
    Multiplier,
    /// Depends on `x` only: multiplication by a function.
    Multiplication,
    General,
}

/// One term `b(x) c(xi)` of a separable scalar symbol.
#[derive(Clone)]
pub struct SeparableTerm {
    pub space: SpaceFn,
    pub freq: SpaceFn,
}

impl SeparableTerm {
    pub fn new(
        space: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        freq: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            space: Arc::new(space),
            freq: Arc::new(freq),
        }
    }
}

/// Symbol `a(x, xi)` of declared order `m`, possibly matrix valued
/// (`rows x cols`), on the torus.
#[derive(Clone)]
pub struct Symbol {
    name: String,
    order: f64,
    kind: SymbolKind,
    rows: usize,
    cols: usize,
    entry: EntryFn,
    separable: Option<Vec<SeparableTerm>>,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("name", &self.name)
            .field("order", &self.order)
            .field("kind", &self.kind)
            .field("shape", &(self.rows, self.cols))
            .field("separable_terms", &self.separable.as_ref().map(Vec::len))
            .finish()
    }
}

impl Symbol {
    /// Scalar Fourier multiplier `a(xi)`.
    pub fn multiplier(
        name: impl Into<String>,
        order: f64,
        a: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let a: SpaceFn = Arc::new(a);
        let c = a.clone();
        Self {
            name: name.into(),
            order,
            kind: SymbolKind::Multiplier,
            rows: 1,
            cols: 1,
            entry: Arc::new(move |_, xi, _, _| a(xi)),
            separable: Some(vec![SeparableTerm {
                space: Arc::new(|_| Complex64::new(1.0, 0.0)),
                freq: c,
            }]),
        }
    }

    /// Matrix-valued Fourier multiplier with entries `a(xi, row, col)`.
    pub fn matrix_multiplier(
        name: impl Into<String>,
        order: f64,
        rows: usize,
        cols: usize,
        a: impl Fn(&[f64], usize, usize) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            order,
            kind: SymbolKind::Multiplier,
            rows,
            cols,
            entry: Arc::new(move |_, xi, r, c| a(xi, r, c)),
            separable: None,
        }
    }

    /// Multiplication by `b(x)` (order 0).
    pub fn multiplication(
        name: impl Into<String>,
        b: impl Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let b: SpaceFn = Arc::new(b);
        let c = b.clone();
        Self {
            name: name.into(),
            order: 0.0,
            kind: SymbolKind::Multiplication,
            rows: 1,
            cols: 1,
            entry: Arc::new(move |x, _, _, _| b(x)),
            separable: Some(vec![SeparableTerm {
                space: c,
                freq: Arc::new(|_| Complex64::new(1.0, 0.0)),
            }]),
        }
    }

    /// Scalar symbol given pointwise, without a separable form.
    pub fn general(
        name: impl Into<String>,
        order: f64,
        a: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            order,
            kind: SymbolKind::General,
            rows: 1,
            cols: 1,
            entry: Arc::new(move |x, xi, _, _| a(x, xi)),
            separable: None,
        }
    }

    /// Scalar symbol `sum_t b_t(x) c_t(xi)`.
    pub fn separable(name: impl Into<String>, order: f64, terms: Vec<SeparableTerm>) -> Self {
        let t = terms.clone();
        Self {
            name: name.into(),
            order,
            kind: SymbolKind::General,
            rows: 1,
            cols: 1,
            entry: Arc::new(move |x, xi, _, _| t.iter().map(|t| (t.space)(x) * (t.freq)(xi)).sum()),
            separable: Some(terms),
        }
    }

    /// The zero multiplier of a given order.
    pub fn zero(name: impl Into<String>, order: f64) -> Self {
        Self::multiplier(name, order, |_| Complex64::default())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_scalar(&self) -> bool {
        self.rows == 1 && self.cols == 1
    }

    pub fn separable_terms(&self) -> Option<&[SeparableTerm]> {
        self.separable.as_deref()
    }

    /// Drop the separable form so that only the pointwise definition remains.
    pub fn without_separable(&self) -> Self {
        let mut s = self.clone();
        s.separable = None;
        s
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Scalar value `a(x, xi)`.
    #[inline]
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> Complex64 {
        (self.entry)(x, xi, 0, 0)
    }

    #[inline]
    pub fn eval_entry(&self, x: &[f64], xi: &[f64], row: usize, col: usize) -> Complex64 {
        (self.entry)(x, xi, row, col)
    }

    pub(crate) fn entry_fn(&self) -> EntryFn {
        self.entry.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_entry_matches_terms() {
        let s = Symbol::separable(
            "t",
            1.0,
            vec![SeparableTerm::new(
                |x| Complex64::new(x[0].cos(), 0.0),
                |xi| Complex64::new(xi[0].abs(), 0.0),
            )],
        );
        let v = s.eval(&[0.3], &[-4.0]);
        assert!((v.re - 0.3f64.cos() * 4.0).abs() < 1e-15);
        assert_eq!(s.kind(), SymbolKind::General);
    }
}
