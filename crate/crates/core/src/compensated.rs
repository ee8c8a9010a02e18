//! Double-double accumulation for residuals that must be exact to well
//! below one ulp of the operands.

use crate::linalg::{ComplexMatrix, C64};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

#[derive(Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    #[inline]
    fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = two_sum(s, lo);
        self.hi = hi;
        self.lo = lo;
    }

    #[inline]
    fn add_prod(&mut self, a: f64, b: f64) {
        let (p, e) = two_prod(a, b);
        self.add(p);
        self.add(e);
    }
}

/// Complex accumulator carrying roughly 106 bits per component.
#[derive(Clone, Copy, Default)]
pub(crate) struct ComplexAccumulator {
    re: DoubleDouble,
    im: DoubleDouble,
}

impl ComplexAccumulator {
    #[inline]
    pub(crate) fn add(&mut self, z: C64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub(crate) fn add_prod(&mut self, a: C64, b: C64) {
        self.re.add_prod(a.re, b.re);
        self.re.add_prod(-a.im, b.im);
        self.im.add_prod(a.re, b.im);
        self.im.add_prod(a.im, b.re);
    }

    /// Leading and trailing parts of the accumulated value.
    pub(crate) fn split(&self) -> (C64, C64) {
        (
            C64::new(self.re.hi, self.im.hi),
            C64::new(self.re.lo, self.im.lo),
        )
    }

    pub(crate) fn value(&self) -> C64 {
        C64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
}

/// `rhs − ω·x − T*(T·x)` with every product and sum carried in
/// double-double, rounded once at the end.
pub(crate) fn tikhonov_residual(
    t: &ComplexMatrix,
    omega: f64,
    x: &ComplexMatrix,
    rhs: &ComplexMatrix,
) -> ComplexMatrix {
    let (m, n) = t.shape();
    let k = x.cols();
    // Y = T·x kept as hi + lo.
    let mut y_hi = ComplexMatrix::zeros(m, k);
    let mut y_lo = ComplexMatrix::zeros(m, k);
    for i in 0..m {
        for j in 0..k {
            let mut acc = ComplexAccumulator::default();
            for l in 0..n {
                acc.add_prod(t.get(i, l), x.get(l, j));
            }
            let (hi, lo) = acc.split();
            y_hi.set(i, j, hi);
            y_lo.set(i, j, lo);
        }
    }
    let mut out = ComplexMatrix::zeros(n, k);
    for l in 0..n {
        for j in 0..k {
            let mut acc = ComplexAccumulator::default();
            acc.add(rhs.get(l, j));
            acc.add_prod(C64::new(-omega, 0.0), x.get(l, j));
            for i in 0..m {
                let t_conj = -t.get(i, l).conj();
                acc.add_prod(t_conj, y_hi.get(i, j));
                acc.add_prod(t_conj, y_lo.get(i, j));
            }
            out.set(l, j, acc.value());
        }
    }
    out
}
