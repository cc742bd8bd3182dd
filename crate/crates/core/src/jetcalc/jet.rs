use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use super::expr::DIVISION_GUARD;
use super::EvalError;

/// Exponent triples of every monomial of degree at most three, ordered by
/// degree. This is the storage order of [`Jet`] coefficients.
pub const MONOMIALS: [[u8; 3]; 20] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const LEN: [usize; 4] = [1, 4, 10, 20];

fn degree(alpha: [u8; 3]) -> u8 {
    alpha[0] + alpha[1] + alpha[2]
}

pub fn monomial_index(alpha: [u8; 3]) -> Option<usize> {
    MONOMIALS.iter().position(|m| *m == alpha)
}

fn factorial(alpha: [u8; 3]) -> f64 {
    const F: [f64; 4] = [1.0, 1.0, 2.0, 6.0];
    alpha.iter().map(|&a| F[a as usize]).product()
}

// (lhs slot, rhs slot, product slot, product degree)
fn product_table() -> &'static [(usize, usize, usize, u8)] {
    static TABLE: OnceLock<Vec<(usize, usize, usize, u8)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = Vec::new();
        for (i, a) in MONOMIALS.iter().enumerate() {
            for (j, b) in MONOMIALS.iter().enumerate() {
                let sum = [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
                if degree(sum) <= 3 {
                    table.push((i, j, monomial_index(sum).unwrap(), degree(sum)));
                }
            }
        }
        table.sort_by_key(|entry| entry.3);
        table
    })
}

// For each axis: (source slot, target slot, multiplier) of d/d(axis).
fn derivative_table(axis: usize) -> &'static [(usize, usize, f64)] {
    static TABLES: OnceLock<[Vec<(usize, usize, f64)>; 3]> = OnceLock::new();
    &TABLES.get_or_init(|| {
        std::array::from_fn(|axis| {
            let mut table = Vec::new();
            for (target, beta) in MONOMIALS.iter().enumerate() {
                let mut src = *beta;
                src[axis] += 1;
                if let Some(source) = monomial_index(src) {
                    table.push((source, target, src[axis] as f64));
                }
            }
            table
        })
    })[axis]
}

/// Truncated multivariate Taylor expansion at a point: the value and all
/// partial derivatives up to `order` (at most 3).
///
/// Arithmetic on jets is exact Leibniz/chain-rule propagation of the stored
/// derivatives; the result of a binary operation carries the smaller order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    order: u8,
    // Taylor coefficients d^alpha f / alpha!, indexed like MONOMIALS.
    coef: [f64; 20],
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Jet {
        let mut coef = [0.0; 20];
        coef[0] = value;
        Jet {
            order: order as u8,
            coef,
        }
    }

    pub fn zero(order: usize) -> Jet {
        Jet::constant(0.0, order)
    }

    /// The coordinate function `x_axis` expanded at a point with that
    /// coordinate equal to `at`.
    pub fn coordinate(axis: usize, at: f64, order: usize) -> Jet {
        let mut j = Jet::constant(at, order);
        if order >= 1 {
            j.coef[1 + axis] = 1.0;
        }
        j
    }

    /// Builds a jet from partial derivatives listed in `MONOMIALS` order.
    pub fn from_partials(order: usize, partials: &[f64]) -> Jet {
        assert!(order <= 3 && partials.len() >= LEN[order]);
        let mut coef = [0.0; 20];
        for k in 0..LEN[order] {
            coef[k] = partials[k] / factorial(MONOMIALS[k]);
        }
        Jet {
            order: order as u8,
            coef,
        }
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> f64 {
        self.coef[0]
    }

    /// Partial derivative for the multi-index `alpha` (exponent per axis).
    pub fn partial(&self, alpha: [u8; 3]) -> f64 {
        assert!(
            degree(alpha) as usize <= self.order(),
            "partial of degree {} requested from a jet of order {}",
            degree(alpha),
            self.order
        );
        let k = monomial_index(alpha).expect("degree checked above");
        self.coef[k] * factorial(alpha)
    }

    /// First partials, as the components of the differential.
    pub fn gradient(&self) -> [f64; 3] {
        assert!(self.order >= 1, "gradient of an order-0 jet");
        [self.coef[1], self.coef[2], self.coef[3]]
    }

    /// Partial derivative along `axis` as a jet of one order less.
    pub fn derivative(&self, axis: usize) -> Jet {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        let order = self.order - 1;
        let mut coef = [0.0; 20];
        for &(src, dst, m) in derivative_table(axis) {
            if dst < LEN[order as usize] {
                coef[dst] = m * self.coef[src];
            }
        }
        Jet { order, coef }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        let order = order.min(self.order());
        let mut coef = [0.0; 20];
        coef[..LEN[order]].copy_from_slice(&self.coef[..LEN[order]]);
        Jet {
            order: order as u8,
            coef,
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut out = *self;
        for c in out.coef.iter_mut() {
            *c *= s;
        }
        out
    }

    /// `F(self)` for a univariate `F` with derivatives `d[k] = F^(k)(value)`.
    pub fn compose(&self, d: [f64; 4]) -> Jet {
        let order = self.order();
        let mut u = *self;
        u.coef[0] = 0.0;
        let mut out = Jet::constant(d[0], order);
        let mut power = Jet::constant(1.0, order);
        let mut fact = 1.0;
        for (k, dk) in d.iter().enumerate().skip(1).take(order) {
            power = power * u;
            fact *= k as f64;
            out += power.scale(dk / fact);
        }
        out
    }

    pub fn recip(&self) -> Result<Jet, EvalError> {
        let v = self.value();
        if v.abs() < DIVISION_GUARD {
            return Err(EvalError::NearZeroDenominator { value: v });
        }
        let r = 1.0 / v;
        Ok(self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r]))
    }

    pub fn div(&self, rhs: &Jet) -> Result<Jet, EvalError> {
        Ok(*self * rhs.recip()?)
    }

    pub fn sqrt(&self) -> Result<Jet, EvalError> {
        let v = self.value();
        if v < 0.0 || (self.order > 0 && v < DIVISION_GUARD) {
            return Err(EvalError::NonPositiveSqrt { value: v });
        }
        let s = v.sqrt();
        if self.order == 0 {
            return Ok(Jet::constant(s, 0));
        }
        Ok(self.compose([
            s,
            0.5 / s,
            -0.25 / (s * v),
            0.375 / (s * v * v),
        ]))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coef = [0.0; 20];
        for (k, c) in coef.iter_mut().enumerate().take(LEN[order as usize]) {
            *c = self.coef[k] + rhs.coef[k];
        }
        Jet { order, coef }
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coef = [0.0; 20];
        for (k, c) in coef.iter_mut().enumerate().take(LEN[order as usize]) {
            *c = self.coef[k] - rhs.coef[k];
        }
        Jet { order, coef }
    }
}

impl AddAssign for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = *self - rhs;
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut coef = [0.0; 20];
        for &(i, j, k, _) in product_table().iter().take_while(|e| e.3 <= order) {
            coef[k] += self.coef[i] * rhs.coef[j];
        }
        Jet { order, coef }
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Mul<Jet> for f64 {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        rhs.scale(self)
    }
}
