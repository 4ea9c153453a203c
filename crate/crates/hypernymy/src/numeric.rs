//! Small numeric kernels: compensated summation, stable softmax, KL
//! divergence.
//!
//! Metric aggregates sum up to a thousand terms per row and hundreds of
//! thousands of terms per report; compensated (Neumaier) summation keeps
//! the result independent of magnitude ordering to well below the
//! tolerances used elsewhere, and every summation site in the crate fixes
//! its iteration order so whole reports are bitwise reproducible.

/// Neumaier compensated accumulator.
///
/// Like Kahan summation but robust when the next term is larger in
/// magnitude than the running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    /// Fresh accumulator at zero.
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one term.
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated total.
    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of a slice in its given order.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = KahanSum::new();
    for v in values {
        acc.add(v);
    }
    acc.total()
}

/// Numerically stable softmax of `logits` into an `f64` probability vector.
///
/// The maximum logit is subtracted before exponentiation so arbitrarily
/// large inputs cannot overflow.
pub fn softmax(logits: &[f32]) -> Vec<f64> {
    let mut out = vec![0.0f64; logits.len()];
    softmax_into(logits, &mut out);
    out
}

/// As [`softmax`] but writing into a caller-provided buffer.
pub fn softmax_into(logits: &[f32], out: &mut [f64]) {
    assert_eq!(logits.len(), out.len());
    let max = logits.iter().copied().fold(f32::NEG_INFINITY, f32::max) as f64;
    let mut z = KahanSum::new();
    for (o, &l) in out.iter_mut().zip(logits) {
        let e = (l as f64 - max).exp();
        *o = e;
        z.add(e);
    }
    let z = z.total();
    for o in out.iter_mut() {
        *o /= z;
    }
}

/// Softmax of `logits` restricted to the positions in `subset`
/// (ascending indices); the result is a distribution over `subset`.
pub fn softmax_subset(logits: &[f32], subset: &[u32]) -> Vec<f64> {
    let max = subset
        .iter()
        .map(|&i| logits[i as usize])
        .fold(f32::NEG_INFINITY, f32::max) as f64;
    let mut out = Vec::with_capacity(subset.len());
    let mut z = KahanSum::new();
    for &i in subset {
        let e = (logits[i as usize] as f64 - max).exp();
        out.push(e);
        z.add(e);
    }
    let z = z.total();
    for o in out.iter_mut() {
        *o /= z;
    }
    out
}

/// Kullback-Leibler divergence `D(p ‖ q)` in nats.
///
/// Terms with `p[i] == 0` contribute zero regardless of `q[i]`; a
/// strictly positive `p[i]` over `q[i] == 0` yields `+inf`, which callers
/// avoid by construction (the reference distribution is a mixture that
/// includes `p`).
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len());
    let mut acc = KahanSum::new();
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            acc.add(pi * (pi / qi).ln());
        }
    }
    acc.total()
}
