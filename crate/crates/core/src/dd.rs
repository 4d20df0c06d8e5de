//! Minimal double-double arithmetic for cancellation-prone polynomial algebra.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub(crate) const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub(crate) fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

/// Polynomial with double-double coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly(pub(crate) Vec<Dd>);

impl Poly {
    pub(crate) fn constant(c: Dd) -> Self {
        Poly(vec![c])
    }

    fn coeff(&self, i: usize) -> Dd {
        self.0.get(i).copied().unwrap_or(Dd::ZERO)
    }

    pub(crate) fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub(crate) fn scale(&self, c: Dd) -> Poly {
        Poly(self.0.iter().map(|&a| a * c).collect())
    }

    /// Multiply by `c0 + c1 v + c2 v^2`.
    pub(crate) fn mul_quadratic(&self, c: [Dd; 3]) -> Poly {
        let mut out = vec![Dd::ZERO; self.0.len() + 2];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in c.iter().enumerate() {
                out[i + j] = out[i + j] + a * b;
            }
        }
        Poly(out)
    }

    pub(crate) fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![Dd::ZERO]);
        }
        Poly(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, &a)| a * Dd::from((i + 1) as f64))
                .collect(),
        )
    }

    /// Coefficients of `w ↦ P(1 − w)`.
    pub(crate) fn reflect(&self) -> Poly {
        let n = self.0.len();
        let mut out = vec![Dd::ZERO; n];
        for (k, &a) in self.0.iter().enumerate() {
            // (1 - w)^k = sum_j C(k, j) (-1)^j w^j
            let mut binom = 1.0;
            for j in 0..=k {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                out[j] = out[j] + a * Dd::from(sign * binom);
                binom = binom * (k - j) as f64 / (j + 1) as f64;
            }
        }
        Poly(out)
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        let x = Dd::from(x);
        let mut acc = Dd::ZERO;
        for &a in self.0.iter().rev() {
            acc = acc * x + a;
        }
        acc.to_f64()
    }
}
