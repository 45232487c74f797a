use crate::rational::Rational;

/// Piecewise-constant function on [0, 1]: `base` on [0, t_1], then
/// `values[j]` on (t_{j+1}, t_{j+2}] (0-based j), the last piece running
/// to 1. Left-closed pieces never occur, matching "value >= x iff f > T".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepFunction<V> {
    base: V,
    breakpoints: Vec<Rational>,
    values: Vec<V>,
}

impl<V: Clone + PartialOrd> StepFunction<V> {
    pub fn new(base: V, breakpoints: Vec<Rational>, values: Vec<V>) -> Self {
        assert_eq!(breakpoints.len(), values.len());
        assert!(breakpoints.windows(2).all(|w| w[0] < w[1]), "breakpoints must ascend strictly");
        debug_assert!(std::iter::once(&base).chain(&values).collect::<Vec<_>>().windows(2).all(|w| w[0] <= w[1]));
        StepFunction { base, breakpoints, values }
    }

    pub fn eval(&self, f: &Rational) -> &V {
        // Pieces whose left end lies strictly below f.
        let j = self.breakpoints.partition_point(|t| t < f);
        if j == 0 { &self.base } else { &self.values[j - 1] }
    }

    pub fn base(&self) -> &V {
        &self.base
    }

    pub fn breakpoints(&self) -> &[Rational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn map<W: Clone + PartialOrd>(&self, g: impl Fn(&V) -> W) -> StepFunction<W> {
        StepFunction {
            base: g(&self.base),
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(g).collect(),
        }
    }
}
