//! Forward-mode Wirtinger differentiation.
//!
//! [`Wirt`] carries a complex value together with its derivatives with respect
//! to a complex parameter `μ` and its conjugate `μ̄`. Closed-form charts are
//! written once against the [`CScalar`] trait and evaluated either on plain
//! [`Complex64`] (the map) or on [`Wirt`] (the map plus exact first
//! derivatives), so analytic jets never drift from the map they describe.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

/// Minimal complex field interface shared by [`Complex64`] and [`Wirt`].
pub trait CScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: Complex64) -> Self;
    fn conj(self) -> Self;
    /// Principal square root.
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn value(self) -> Complex64;

    fn real(r: f64) -> Self {
        Self::constant(Complex64::new(r, 0.0))
    }

    fn scale(self, s: f64) -> Self {
        self * Self::real(s)
    }

    /// Real part, as a complex quantity with zero imaginary part.
    fn re(self) -> Self {
        (self + self.conj()).scale(0.5)
    }

    /// Imaginary part, as a complex quantity with zero imaginary part.
    fn im(self) -> Self {
        (self - self.conj()) * Self::constant(Complex64::new(0.0, -0.5))
    }

    fn abs_sq(self) -> Self {
        self * self.conj()
    }

    fn ipow(self, n: i32) -> Self {
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = Self::real(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        if n < 0 {
            Self::real(1.0) / acc
        } else {
            acc
        }
    }
}

impl CScalar for Complex64 {
    fn constant(c: Complex64) -> Self {
        c
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn value(self) -> Complex64 {
        self
    }
}

/// A complex value with its Wirtinger derivatives `∂f = ∂f/∂μ` and `∂̄f = ∂f/∂μ̄`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wirt {
    pub v: Complex64,
    pub d: Complex64,
    pub db: Complex64,
}

impl Wirt {
    /// The independent variable `μ` itself: `∂μ = 1`, `∂̄μ = 0`.
    pub fn variable(mu: Complex64) -> Self {
        Self {
            v: mu,
            d: Complex64::new(1.0, 0.0),
            db: Complex64::new(0.0, 0.0),
        }
    }
}

impl Add for Wirt {
    type Output = Wirt;
    fn add(self, o: Wirt) -> Wirt {
        Wirt {
            v: self.v + o.v,
            d: self.d + o.d,
            db: self.db + o.db,
        }
    }
}

impl Sub for Wirt {
    type Output = Wirt;
    fn sub(self, o: Wirt) -> Wirt {
        Wirt {
            v: self.v - o.v,
            d: self.d - o.d,
            db: self.db - o.db,
        }
    }
}

impl Mul for Wirt {
    type Output = Wirt;
    fn mul(self, o: Wirt) -> Wirt {
        Wirt {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            db: self.db * o.v + self.v * o.db,
        }
    }
}

impl Div for Wirt {
    type Output = Wirt;
    fn div(self, o: Wirt) -> Wirt {
        let q = self.v / o.v;
        Wirt {
            v: q,
            d: (self.d - q * o.d) / o.v,
            db: (self.db - q * o.db) / o.v,
        }
    }
}

impl Neg for Wirt {
    type Output = Wirt;
    fn neg(self) -> Wirt {
        Wirt {
            v: -self.v,
            d: -self.d,
            db: -self.db,
        }
    }
}

impl CScalar for Wirt {
    fn constant(c: Complex64) -> Self {
        Wirt {
            v: c,
            d: Complex64::new(0.0, 0.0),
            db: Complex64::new(0.0, 0.0),
        }
    }

    // ∂(f̄) = conj(∂̄f), ∂̄(f̄) = conj(∂f)
    fn conj(self) -> Self {
        Wirt {
            v: self.v.conj(),
            d: self.db.conj(),
            db: self.d.conj(),
        }
    }

    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let k = 0.5 / s;
        Wirt {
            v: s,
            d: self.d * k,
            db: self.db * k,
        }
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        Wirt {
            v: e,
            d: self.d * e,
            db: self.db * e,
        }
    }

    fn value(self) -> Complex64 {
        self.v
    }
}
