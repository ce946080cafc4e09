//! Truncated bivariate Taylor (jet) arithmetic in the variables `(t, x)`.
//!
//! A [`Jet3`] carries a value and every partial derivative of total order at
//! most 3 at one expansion point. Sums, products, quotients and compositions
//! with smooth scalar functions propagate the table exactly (to rounding),
//! which is what makes the derivative formulas downstream trustworthy on
//! deeply composed energies.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::scalar::Scalar;

/// Slot order used throughout: `(i, j)` means `∂ₜ^i ∂ₓ^j`.
pub const SLOTS: [(usize, usize); 10] = [
    (0, 0),
    (1, 0),
    (0, 1),
    (2, 0),
    (1, 1),
    (0, 2),
    (3, 0),
    (2, 1),
    (1, 2),
    (0, 3),
];

#[inline]
fn slot(i: usize, j: usize) -> usize {
    debug_assert!(i + j <= 3);
    // Graded lexicographic: order d starts at d(d+1)/2, then j ascends.
    let d = i + j;
    d * (d + 1) / 2 + j
}

const FACT: [f64; 4] = [1.0, 1.0, 2.0, 6.0];

/// Value plus all partial derivatives of total order ≤ 3 at a point.
///
/// Internally stores Taylor coefficients (partial / i!·j!) so that the
/// product rule is a plain truncated convolution; the public accessors
/// convert back to partial derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet3<S> {
    a: [S; 10],
}

impl<S: Scalar> Jet3<S> {
    /// Jet of a constant.
    pub fn constant(c: S) -> Self {
        let mut a = [S::zero(); 10];
        a[0] = c;
        Jet3 { a }
    }

    /// Jet of the coordinate function `t` at `t = t0`.
    pub fn variable_t(t0: S) -> Self {
        let mut a = [S::zero(); 10];
        a[0] = t0;
        a[slot(1, 0)] = S::one();
        Jet3 { a }
    }

    /// Jet of the coordinate function `x` at `x = x0`.
    pub fn variable_x(x0: S) -> Self {
        let mut a = [S::zero(); 10];
        a[0] = x0;
        a[slot(0, 1)] = S::one();
        Jet3 { a }
    }

    /// Build directly from a table of partial derivatives `∂ₜ^i ∂ₓ^j`.
    pub fn from_partials(p: [S; 10]) -> Self {
        let mut a = [S::zero(); 10];
        for (k, &(i, j)) in SLOTS.iter().enumerate() {
            a[k] = p[k] / S::of(FACT[i] * FACT[j]);
        }
        Jet3 { a }
    }

    pub fn value(&self) -> S {
        self.a[0]
    }

    /// Partial derivative `∂ₜ^i ∂ₓ^j` (requires `i + j ≤ 3`).
    pub fn partial(&self, i: usize, j: usize) -> S {
        self.a[slot(i, j)] * S::of(FACT[i] * FACT[j])
    }

    /// Overwrite the partial derivative `∂ₜ^i ∂ₓ^j`.
    pub fn set_partial(&mut self, i: usize, j: usize, v: S) {
        self.a[slot(i, j)] = v / S::of(FACT[i] * FACT[j]);
    }

    pub fn dt(&self) -> S {
        self.partial(1, 0)
    }
    pub fn dx(&self) -> S {
        self.partial(0, 1)
    }
    pub fn dtt(&self) -> S {
        self.partial(2, 0)
    }
    pub fn dxt(&self) -> S {
        self.partial(1, 1)
    }
    pub fn dxx(&self) -> S {
        self.partial(0, 2)
    }
    pub fn dttt(&self) -> S {
        self.partial(3, 0)
    }
    pub fn dxtt(&self) -> S {
        self.partial(2, 1)
    }
    pub fn dxxt(&self) -> S {
        self.partial(1, 2)
    }
    pub fn dxxx(&self) -> S {
        self.partial(0, 3)
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, s: S) -> Self {
        let mut a = self.a;
        for c in &mut a {
            *c = *c * s;
        }
        Jet3 { a }
    }

    /// Compose with a smooth scalar function `h` given `[h, h', h'', h''']`
    /// evaluated at `self.value()`. Exact through total order 3 by the chain
    /// rule; this is the primitive behind `exp`, `recip` and `sqrt`.
    pub fn compose_smooth(&self, d: &[S; 4]) -> Self {
        // w = self - value has zero constant term, so w^4 vanishes from the
        // truncated table and three terms suffice.
        let mut w = *self;
        w.a[0] = S::zero();
        let w2 = w * w;
        let w3 = w2 * w;
        let half = S::of(0.5);
        let sixth = S::of(1.0 / 6.0);
        let mut out = Jet3::constant(d[0]);
        out = out + w.scale(d[1]);
        out = out + w2.scale(d[2] * half);
        out = out + w3.scale(d[3] * sixth);
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose_smooth(&[e, e, e, e])
    }

    pub fn recip(&self) -> Self {
        let c = self.value();
        let ic = S::one() / c;
        let ic2 = ic * ic;
        self.compose_smooth(&[
            ic,
            -ic2,
            S::of(2.0) * ic2 * ic,
            S::of(-6.0) * ic2 * ic2,
        ])
    }

    pub fn sqrt(&self) -> Self {
        let c = self.value();
        let r = c.sqrt();
        let ir = S::one() / r;
        let ic = S::one() / c;
        self.compose_smooth(&[
            r,
            S::of(0.5) * ir,
            S::of(-0.25) * ir * ic,
            S::of(0.375) * ir * ic * ic,
        ])
    }
}

impl<S: Scalar> Add for Jet3<S> {
    type Output = Jet3<S>;
    fn add(self, rhs: Jet3<S>) -> Jet3<S> {
        let mut a = self.a;
        for (c, r) in a.iter_mut().zip(rhs.a.iter()) {
            *c = *c + *r;
        }
        Jet3 { a }
    }
}

impl<S: Scalar> Sub for Jet3<S> {
    type Output = Jet3<S>;
    fn sub(self, rhs: Jet3<S>) -> Jet3<S> {
        let mut a = self.a;
        for (c, r) in a.iter_mut().zip(rhs.a.iter()) {
            *c = *c - *r;
        }
        Jet3 { a }
    }
}

impl<S: Scalar> Neg for Jet3<S> {
    type Output = Jet3<S>;
    fn neg(self) -> Jet3<S> {
        self.scale(-S::one())
    }
}

impl<S: Scalar> Mul for Jet3<S> {
    type Output = Jet3<S>;
    fn mul(self, rhs: Jet3<S>) -> Jet3<S> {
        let mut a = [S::zero(); 10];
        for (ka, &(ia, ja)) in SLOTS.iter().enumerate() {
            if self.a[ka] == S::zero() {
                continue;
            }
            for (kb, &(ib, jb)) in SLOTS.iter().enumerate() {
                let (i, j) = (ia + ib, ja + jb);
                if i + j <= 3 {
                    a[slot(i, j)] = a[slot(i, j)] + self.a[ka] * rhs.a[kb];
                }
            }
        }
        Jet3 { a }
    }
}

impl<S: Scalar> Div for Jet3<S> {
    type Output = Jet3<S>;
    fn div(self, rhs: Jet3<S>) -> Jet3<S> {
        self * rhs.recip()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly_jet(t: f64, x: f64, coeffs: &[[f64; 4]; 4]) -> Jet3<f64> {
        // Direct evaluation of sum c[i][j] t^i x^j through jet Horner.
        let tj = Jet3::variable_t(t);
        let xj = Jet3::variable_x(x);
        let mut total = Jet3::constant(0.0);
        for i in (0..4).rev() {
            let mut row = Jet3::constant(0.0);
            for j in (0..4).rev() {
                row = row * xj + Jet3::constant(coeffs[i][j]);
            }
            total = total * tj + row;
        }
        total
    }

    #[test]
    fn quadratic_energy_partials() {
        // E = x^2/2 - t x at (0.5, 2)
        let mut c = [[0.0; 4]; 4];
        c[0][2] = 0.5;
        c[1][1] = -1.0;
        let j = poly_jet(0.5, 2.0, &c);
        assert_eq!(j.value(), 1.0);
        assert_eq!(j.dx(), 1.5);
        assert_eq!(j.dxx(), 1.0);
        assert_eq!(j.dxt(), -1.0);
        assert_eq!(j.dt(), -2.0);
        assert_eq!(j.dxxx(), 0.0);
        assert_eq!(j.dxxt(), 0.0);
        assert_eq!(j.dxtt(), 0.0);
        assert_eq!(j.dttt(), 0.0);
    }

    #[test]
    fn product_matches_leibniz() {
        // (t + 2x)^2 * (x - t) has known partials; compare the jet product
        // against direct expansion coefficients.
        let t = 0.3;
        let x = -0.7;
        let p = Jet3::variable_t(t) + Jet3::variable_x(x).scale(2.0);
        let q = Jet3::variable_x(x) - Jet3::variable_t(t);
        let prod = p * p * q;
        // Expand: (t^2 + 4tx + 4x^2)(x - t)
        //  = t^2 x - t^3 + 4 t x^2 - 4 t^2 x + 4 x^3 - 4 t x^2
        //  = -t^3 - 3 t^2 x + 4 x^3
        let mut c = [[0.0; 4]; 4];
        c[3][0] = -1.0;
        c[2][1] = -3.0;
        c[0][3] = 4.0;
        let direct = poly_jet(t, x, &c);
        for (k, &(i, j)) in SLOTS.iter().enumerate() {
            let _ = k;
            assert!(
                (prod.partial(i, j) - direct.partial(i, j)).abs() < 1e-12,
                "slot ({i},{j})"
            );
        }
    }

    #[test]
    fn exp_chain_rule() {
        // f = exp(t x) at (0.4, -1.1): partials known analytically.
        let (t, x): (f64, f64) = (0.4, -1.1);
        let f = (Jet3::variable_t(t) * Jet3::variable_x(x)).exp();
        let e = (t * x).exp();
        assert!((f.value() - e).abs() < 1e-15);
        assert!((f.dt() - x * e).abs() < 1e-14);
        assert!((f.dx() - t * e).abs() < 1e-14);
        assert!((f.dxt() - (1.0 + t * x) * e).abs() < 1e-14);
        assert!((f.dxx() - t * t * e).abs() < 1e-14);
        assert!((f.dxxx() - t * t * t * e).abs() < 1e-14);
        assert!((f.dxxt() - (t * t * x + 2.0 * t) * e).abs() < 1e-13);
    }

    #[test]
    fn reciprocal_and_sqrt() {
        let (t, x): (f64, f64) = (0.9, 0.2);
        let f = Jet3::constant(2.0) + Jet3::variable_t(t) * Jet3::variable_x(x);
        let g = f.recip() * f;
        assert!((g.value() - 1.0).abs() < 1e-14);
        for &(i, j) in SLOTS.iter().skip(1) {
            assert!(g.partial(i, j).abs() < 1e-13, "slot ({i},{j})");
        }
        let s = f.sqrt();
        let back = s * s;
        for &(i, j) in SLOTS.iter() {
            assert!((back.partial(i, j) - f.partial(i, j)).abs() < 1e-12);
        }
    }

    #[test]
    fn mixed_partial_stored_once() {
        // The table has one slot for (1,1); writing and reading agree and
        // there is no separate (x,t)-ordered entry.
        let mut j = Jet3::<f64>::constant(0.0);
        j.set_partial(1, 1, 3.5);
        assert_eq!(j.dxt(), 3.5);
        assert_eq!(SLOTS.len(), 10);
    }
}
