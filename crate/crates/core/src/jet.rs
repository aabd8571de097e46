//! Truncated multivariate Taylor polynomials.
//!
//! A [`Jet`] holds the Taylor coefficients of a function of `nvars` variables
//! about a base point, up to a fixed total order. Arithmetic on jets is the
//! arithmetic of the underlying functions, so any closure written over jets
//! yields exact partial derivatives of every order up to the truncation.
//!
//! Monomials are enumerated by total degree first; within a degree the order
//! does not depend on the truncation order. A space of order `k - 1` is
//! therefore a prefix of the space of order `k` with the same variables,
//! which makes truncation and differentiation index-preserving.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial layout and multiplication tables for a `(nvars, order)` pair.
pub struct JetSpace {
    nvars: usize,
    order: usize,
    exponents: Vec<Vec<u8>>,
    /// `len_upto[d]` is the number of monomials of degree at most `d`.
    len_upto: Vec<usize>,
    products: Vec<(u32, u32, u32)>,
    /// Per variable: `(source, target, factor)` for `d/dx_v`, targets in the
    /// space of order `order - 1`.
    derivatives: Vec<Vec<(u32, u32, f64)>>,
}

impl fmt::Debug for JetSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JetSpace")
            .field("nvars", &self.nvars)
            .field("order", &self.order)
            .field("len", &self.exponents.len())
            .finish()
    }
}

fn monomials_of_degree(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    if nvars == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=degree).rev() {
        for mut rest in monomials_of_degree(nvars - 1, degree - first) {
            let mut e = Vec::with_capacity(nvars);
            e.push(first as u8);
            e.append(&mut rest);
            out.push(e);
        }
    }
    out
}

impl JetSpace {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exponents = Vec::new();
        let mut len_upto = Vec::with_capacity(order + 1);
        for d in 0..=order {
            exponents.extend(monomials_of_degree(nvars, d));
            len_upto.push(exponents.len());
        }
        let index: HashMap<&[u8], usize> = exponents
            .iter()
            .enumerate()
            .map(|(i, e)| (e.as_slice(), i))
            .collect();
        let degree = |e: &[u8]| e.iter().map(|&v| v as usize).sum::<usize>();

        let mut products = Vec::new();
        let mut sum = vec![0u8; nvars];
        for (i, a) in exponents.iter().enumerate() {
            let da = degree(a);
            for (j, b) in exponents[..len_upto[order - da]].iter().enumerate() {
                for v in 0..nvars {
                    sum[v] = a[v] + b[v];
                }
                products.push((i as u32, j as u32, index[sum.as_slice()] as u32));
            }
        }

        let mut derivatives = vec![Vec::new(); nvars];
        for (i, e) in exponents.iter().enumerate() {
            for (v, table) in derivatives.iter_mut().enumerate() {
                if e[v] == 0 {
                    continue;
                }
                let mut lowered = e.clone();
                lowered[v] -= 1;
                table.push((i as u32, index[lowered.as_slice()] as u32, e[v] as f64));
            }
        }

        JetSpace {
            nvars,
            order,
            exponents,
            len_upto,
            products,
            derivatives,
        }
    }

    /// Shared space for `nvars` variables truncated at total degree `order`.
    pub fn get(nvars: usize, order: usize) -> Arc<JetSpace> {
        type Cache = Mutex<HashMap<(usize, usize), Arc<JetSpace>>>;
        static CACHE: OnceLock<Cache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry((nvars, order))
            .or_insert_with(|| Arc::new(JetSpace::build(nvars, order)))
            .clone()
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self, index: usize) -> &[u8] {
        &self.exponents[index]
    }

    pub fn index_of(&self, exponents: &[u8]) -> Option<usize> {
        let d: usize = exponents.iter().map(|&v| v as usize).sum();
        if exponents.len() != self.nvars || d > self.order {
            return None;
        }
        let start = if d == 0 { 0 } else { self.len_upto[d - 1] };
        (start..self.len_upto[d]).find(|&i| self.exponents[i] == exponents)
    }
}

/// Truncated Taylor polynomial of a scalar function.
#[derive(Clone)]
pub struct Jet {
    space: Arc<JetSpace>,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("nvars", &self.space.nvars)
            .field("order", &self.space.order)
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl Jet {
    pub fn constant(space: &Arc<JetSpace>, value: f64) -> Jet {
        let mut coeffs = vec![0.0; space.len()];
        coeffs[0] = value;
        Jet {
            space: space.clone(),
            coeffs,
        }
    }

    pub fn zero(space: &Arc<JetSpace>) -> Jet {
        Jet::constant(space, 0.0)
    }

    /// The coordinate function `x_var` expanded about `value`.
    pub fn variable(space: &Arc<JetSpace>, var: usize, value: f64) -> Jet {
        assert!(var < space.nvars, "variable index out of range");
        let mut j = Jet::constant(space, value);
        if space.order > 0 {
            // degree-one monomials follow the constant, ordered by variable
            j.coeffs[1 + var] = 1.0;
        }
        j
    }

    /// Identity seeds `(p_0 + h_0, ..., p_{m-1} + h_{m-1})` for a base point.
    pub fn seeds(point: &[f64], order: usize) -> Vec<Jet> {
        let space = JetSpace::get(point.len(), order);
        point
            .iter()
            .enumerate()
            .map(|(v, &p)| Jet::variable(&space, v, p))
            .collect()
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.space
    }

    pub fn order(&self) -> usize {
        self.space.order
    }

    pub fn nvars(&self) -> usize {
        self.space.nvars
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Taylor coefficient of the monomial with the given exponents.
    pub fn coeff(&self, exponents: &[u8]) -> f64 {
        self.space
            .index_of(exponents)
            .map_or(0.0, |i| self.coeffs[i])
    }

    /// Mixed partial derivative with the given multiplicities at the base point.
    pub fn partial(&self, exponents: &[u8]) -> f64 {
        let weight: f64 = exponents
            .iter()
            .map(|&e| (1..=e as u64).product::<u64>() as f64)
            .product();
        self.coeff(exponents) * weight
    }

    /// Same function truncated at a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        if order >= self.space.order {
            return self.clone();
        }
        let space = JetSpace::get(self.space.nvars, order);
        let coeffs = self.coeffs[..space.len()].to_vec();
        Jet { space, coeffs }
    }

    /// Partial derivative in variable `var`; the result has one order less.
    pub fn derivative(&self, var: usize) -> Jet {
        assert!(self.space.order > 0, "cannot differentiate an order-0 jet");
        let space = JetSpace::get(self.space.nvars, self.space.order - 1);
        let mut coeffs = vec![0.0; space.len()];
        for &(src, dst, factor) in &self.space.derivatives[var] {
            coeffs[dst as usize] += factor * self.coeffs[src as usize];
        }
        Jet { space, coeffs }
    }

    fn common_space(&self, other: &Jet) -> Arc<JetSpace> {
        assert_eq!(
            self.space.nvars, other.space.nvars,
            "jets over different variable sets"
        );
        if self.space.order <= other.space.order {
            self.space.clone()
        } else {
            other.space.clone()
        }
    }

    fn mul_jet(&self, other: &Jet) -> Jet {
        let space = self.common_space(other);
        let mut coeffs = vec![0.0; space.len()];
        for &(i, j, k) in &space.products {
            let a = self.coeffs[i as usize];
            if a != 0.0 {
                coeffs[k as usize] += a * other.coeffs[j as usize];
            }
        }
        Jet { space, coeffs }
    }

    fn zip_with(&self, other: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        let space = self.common_space(other);
        let coeffs = (0..space.len())
            .map(|i| f(self.coeffs[i], other.coeffs[i]))
            .collect();
        Jet { space, coeffs }
    }

    fn map_coeffs(&self, f: impl Fn(f64) -> f64) -> Jet {
        Jet {
            space: self.space.clone(),
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }

    /// `f(self)` given `derivs[k] = f^(k)(self.value())` for `k = 0..=order`.
    pub fn compose_univariate(&self, derivs: &[f64]) -> Jet {
        let order = self.space.order;
        assert!(derivs.len() > order, "not enough derivatives supplied");
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut factorial = (1..=order as u64).product::<u64>() as f64;
        let mut acc = Jet::constant(&self.space, derivs[order] / factorial);
        for k in (0..order).rev() {
            factorial /= (k + 1) as f64;
            acc = acc.mul_jet(&h);
            acc.coeffs[0] += derivs[k] / factorial;
        }
        acc
    }

    pub fn powf(&self, p: f64) -> Jet {
        let c = self.value();
        let mut derivs = Vec::with_capacity(self.order() + 1);
        let mut falling = 1.0;
        for k in 0..=self.order() {
            derivs.push(falling * c.powf(p - k as f64));
            falling *= p - k as f64;
        }
        self.compose_univariate(&derivs)
    }

    pub fn powi(&self, p: i32) -> Jet {
        if p >= 0 {
            let mut acc = Jet::constant(&self.space, 1.0);
            for _ in 0..p {
                acc = acc.mul_jet(self);
            }
            acc
        } else {
            self.recip().powi(-p)
        }
    }

    pub fn recip(&self) -> Jet {
        let c = self.value();
        let mut derivs = Vec::with_capacity(self.order() + 1);
        let mut term = 1.0 / c;
        for k in 0..=self.order() {
            derivs.push(term);
            term *= -((k + 1) as f64) / c;
        }
        self.compose_univariate(&derivs)
    }

    pub fn sqrt(&self) -> Jet {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Jet {
        let e = self.value().exp();
        self.compose_univariate(&vec![e; self.order() + 1])
    }

    pub fn ln(&self) -> Jet {
        let c = self.value();
        let mut derivs = vec![c.ln()];
        let mut term = 1.0 / c;
        for k in 1..=self.order() {
            derivs.push(term);
            term *= -(k as f64) / c;
        }
        self.compose_univariate(&derivs)
    }

    /// Substitutes `args[v]` for the `v`-th displacement variable of this
    /// Taylor polynomial. Each argument must vanish at its base point; the
    /// result lives in the arguments' space.
    pub fn compose(&self, args: &[Jet]) -> Jet {
        assert_eq!(args.len(), self.space.nvars, "argument count mismatch");
        let target = args[0].space.clone();
        let order = self.space.order.min(target.order);
        let mut powers: Vec<Vec<Jet>> = Vec::with_capacity(args.len());
        for a in args {
            debug_assert!(
                a.value().abs() == 0.0,
                "composition argument with nonzero base"
            );
            let mut row = vec![Jet::constant(&target, 1.0)];
            for e in 1..=order {
                let next = row[e - 1].mul_jet(a);
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Jet::zero(&target);
        for i in 0..self.space.len_upto[order] {
            let c = self.coeffs[i];
            if c == 0.0 {
                continue;
            }
            let mut term = Jet::constant(&target, c);
            for (v, &e) in self.space.exponents[i].iter().enumerate() {
                if e > 0 {
                    term = term.mul_jet(&powers[v][e as usize]);
                }
            }
            out += term;
        }
        out
    }
}

macro_rules! jet_binop {
    ($trait:ident, $method:ident, $jj:expr, $jf:expr, $fj:expr) => {
        impl $trait<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $jj(self, rhs)
            }
        }
        impl $trait<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $jj(&self, &rhs)
            }
        }
        impl $trait<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $jj(&self, rhs)
            }
        }
        impl $trait<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $jj(self, &rhs)
            }
        }
        impl $trait<f64> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                $jf(self, rhs)
            }
        }
        impl $trait<f64> for Jet {
            type Output = Jet;
            fn $method(self, rhs: f64) -> Jet {
                $jf(&self, rhs)
            }
        }
        impl $trait<&Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                $fj(self, rhs)
            }
        }
        impl $trait<Jet> for f64 {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                $fj(self, &rhs)
            }
        }
    };
}

jet_binop!(
    Add,
    add,
    |a: &Jet, b: &Jet| a.zip_with(b, |u, v| u + v),
    |a: &Jet, s: f64| {
        let mut r = a.clone();
        r.coeffs[0] += s;
        r
    },
    |s: f64, a: &Jet| {
        let mut r = a.clone();
        r.coeffs[0] += s;
        r
    }
);
jet_binop!(
    Sub,
    sub,
    |a: &Jet, b: &Jet| a.zip_with(b, |u, v| u - v),
    |a: &Jet, s: f64| {
        let mut r = a.clone();
        r.coeffs[0] -= s;
        r
    },
    |s: f64, a: &Jet| {
        let mut r = a.map_coeffs(|c| -c);
        r.coeffs[0] += s;
        r
    }
);
jet_binop!(
    Mul,
    mul,
    |a: &Jet, b: &Jet| a.mul_jet(b),
    |a: &Jet, s: f64| a.map_coeffs(|c| c * s),
    |s: f64, a: &Jet| a.map_coeffs(|c| c * s)
);
jet_binop!(
    Div,
    div,
    |a: &Jet, b: &Jet| a.mul_jet(&b.recip()),
    |a: &Jet, s: f64| a.map_coeffs(|c| c / s),
    |s: f64, a: &Jet| a.recip().map_coeffs(|c| c * s)
);

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.map_coeffs(|c| -c)
    }
}

impl AddAssign<Jet> for Jet {
    fn add_assign(&mut self, rhs: Jet) {
        *self = &*self + &rhs;
    }
}

impl AddAssign<&Jet> for Jet {
    fn add_assign(&mut self, rhs: &Jet) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Jet> for Jet {
    fn sub_assign(&mut self, rhs: &Jet) {
        *self = &*self - rhs;
    }
}

impl SubAssign<Jet> for Jet {
    fn sub_assign(&mut self, rhs: Jet) {
        *self = &*self - &rhs;
    }
}

impl MulAssign<f64> for Jet {
    fn mul_assign(&mut self, rhs: f64) {
        for c in &mut self.coeffs {
            *c *= rhs;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn prefix_property_holds() {
        let small = JetSpace::get(3, 2);
        let big = JetSpace::get(3, 4);
        for i in 0..small.len() {
            assert_eq!(small.exponents(i), big.exponents(i));
        }
    }

    #[test]
    fn product_matches_hand_expansion() {
        // f = x*y + x^2 at (1, 2): df/dx = y + 2x = 4, d2f/dx2 = 2, d2f/dxdy = 1
        let s = Jet::seeds(&[1.0, 2.0], 3);
        let f = &s[0] * &s[1] + &s[0] * &s[0];
        assert_relative_eq!(f.value(), 3.0);
        assert_relative_eq!(f.partial(&[1, 0]), 4.0);
        assert_relative_eq!(f.partial(&[0, 1]), 1.0);
        assert_relative_eq!(f.partial(&[2, 0]), 2.0);
        assert_relative_eq!(f.partial(&[1, 1]), 1.0);
        assert_relative_eq!(f.partial(&[0, 2]), 0.0);
        assert_relative_eq!(f.partial(&[3, 0]), 0.0);
    }

    #[test]
    fn elementary_functions_match_closed_forms() {
        let s = Jet::seeds(&[0.7], 5);
        let x = &s[0];
        let e = x.exp();
        let r = x.recip();
        let q = x.sqrt();
        let l = x.ln();
        for k in 0..=5u8 {
            let kf = k as i32;
            assert_relative_eq!(e.partial(&[k]), 0.7f64.exp(), max_relative = 1e-13);
            let fall_r: f64 = (0..kf).map(|i| -1.0 - i as f64).product();
            assert_relative_eq!(
                r.partial(&[k]),
                fall_r * 0.7f64.powi(-1 - kf),
                max_relative = 1e-12
            );
            let fall_q: f64 = (0..kf).map(|i| 0.5 - i as f64).product();
            assert_relative_eq!(
                q.partial(&[k]),
                fall_q * 0.7f64.powf(0.5 - k as f64),
                max_relative = 1e-12
            );
        }
        assert_relative_eq!(l.partial(&[3]), 2.0 / 0.7f64.powi(3), max_relative = 1e-12);
        let one = &q * &q / x;
        assert_relative_eq!(one.value(), 1.0, max_relative = 1e-15);
        for k in 1..=5u8 {
            assert!(one.partial(&[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn derivative_lowers_order_and_shifts() {
        let s = Jet::seeds(&[2.0, -1.0], 4);
        let f = s[0].powi(3) * &s[1];
        let fx = f.derivative(0);
        assert_eq!(fx.order(), 3);
        assert_relative_eq!(fx.value(), -12.0);
        assert_relative_eq!(fx.partial(&[1, 0]), -12.0);
        assert_relative_eq!(fx.partial(&[1, 1]), 12.0);
    }

    #[test]
    fn composition_agrees_with_direct_evaluation() {
        // g(u, v) = u^2 v about (1, 3); substitute u = 1 + 2t, v = 3 + t^2 in one variable t
        let s = Jet::seeds(&[1.0, 3.0], 4);
        let g = s[0].powi(2) * &s[1];
        let t = Jet::seeds(&[0.0], 4);
        let du = &t[0] * 2.0;
        let dv = &t[0] * &t[0];
        let composed = g.compose(&[du.clone(), dv.clone()]);
        let direct = (1.0 + &du).powi(2) * (3.0 + &dv);
        for (a, b) in composed.coeffs().iter().zip(direct.coeffs()) {
            assert_relative_eq!(a, b, epsilon = 1e-12);
        }
    }
}
