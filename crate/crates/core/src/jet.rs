//! Truncated multivariate Taylor jets (up to three variables, degree four),
//! used to differentiate closed-form kernels exactly.

pub const DEGREE: usize = 4;
const SIDE: usize = DEGREE + 1;
const LEN: usize = SIDE * SIDE * SIDE;

fn slot(a: usize, b: usize, c: usize) -> usize {
    (a * SIDE + b) * SIDE + c
}

/// Taylor coefficients `c_α` of `Σ c_α ξ^α` with `|α| ≤ 4`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    c: [f64; LEN],
}

impl Jet {
    pub fn constant(v: f64) -> Self {
        let mut c = [0.0; LEN];
        c[0] = v;
        Self { c }
    }

    /// The coordinate function `x_k` expanded at `x0`.
    pub fn variable(k: usize, x0: f64) -> Self {
        let mut j = Self::constant(x0);
        let mut e = [0usize; 3];
        e[k] = 1;
        j.c[slot(e[0], e[1], e[2])] = 1.0;
        j
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of `ξ^α`.
    pub fn coeff(&self, alpha: &[usize]) -> f64 {
        let mut e = [0usize; 3];
        e[..alpha.len()].copy_from_slice(alpha);
        if e.iter().sum::<usize>() > DEGREE {
            return 0.0;
        }
        self.c[slot(e[0], e[1], e[2])]
    }

    /// `∂^α` at the expansion point: `α! c_α`.
    pub fn derivative(&self, alpha: &[usize]) -> f64 {
        let fact: f64 = alpha.iter().map(|&k| crate::numeric::factorial(k)).product();
        fact * self.coeff(alpha)
    }

    pub fn add(&self, o: &Jet) -> Jet {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(o.c.iter()) {
            *a += b;
        }
        Jet { c }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut c = self.c;
        for a in c.iter_mut() {
            *a *= s;
        }
        Jet { c }
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let mut c = [0.0; LEN];
        for a1 in 0..SIDE {
            for b1 in 0..SIDE - a1 {
                for c1 in 0..SIDE - a1 - b1 {
                    let x = self.c[slot(a1, b1, c1)];
                    if x == 0.0 {
                        continue;
                    }
                    for a2 in 0..SIDE - a1 - b1 - c1 {
                        for b2 in 0..SIDE - a1 - b1 - c1 - a2 {
                            for c2 in 0..SIDE - a1 - b1 - c1 - a2 - b2 {
                                let y = o.c[slot(a2, b2, c2)];
                                if y != 0.0 {
                                    c[slot(a1 + a2, b1 + b2, c1 + c2)] += x * y;
                                }
                            }
                        }
                    }
                }
            }
        }
        Jet { c }
    }

    /// `F(self)` given `derivs[k] = F^{(k)}(self.value())` for `k = 0..=4`.
    pub fn compose(&self, derivs: &[f64; SIDE]) -> Jet {
        let mut delta = *self;
        delta.c[0] = 0.0;
        let mut out = Jet::constant(derivs[0]);
        let mut pow = Jet::constant(1.0);
        let mut fact = 1.0;
        for (k, &d) in derivs.iter().enumerate().skip(1) {
            pow = pow.mul(&delta);
            fact *= k as f64;
            out = out.add(&pow.scale(d / fact));
        }
        out
    }
}
