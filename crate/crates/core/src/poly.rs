//! Sparse multivariate polynomials over the reduced coordinates.
//!
//! Monomials are exponent vectors; coefficients are `f64`. This is enough
//! machinery to carry the elementary-symmetric-polynomial targets, their
//! factorizations, and the monomial bookkeeping behind the lifting
//! transform. Complex-coefficient polynomials are stored as (re, im) pairs.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

/// Exponent vector of a monomial.
pub type Monomial = Vec<u8>;

/// Sparse polynomial in `nvars` real variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    pub nvars: usize,
    pub terms: BTreeMap<Monomial, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Poly::zero(nvars);
        if c != 0.0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars);
        let mut e = vec![0u8; nvars];
        e[i] = 1;
        let mut p = Poly::zero(nvars);
        p.terms.insert(e, 1.0);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, e: Monomial, c: f64) {
        if c == 0.0 && !self.terms.contains_key(&e) {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        if s == 0.0 {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2.iter()).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: &DVector<f64>) -> f64 {
        let mut s = 0.0;
        for (e, c) in &self.terms {
            let mut m = *c;
            for (i, &exp) in e.iter().enumerate() {
                for _ in 0..exp {
                    m *= x[i];
                }
            }
            s += m;
        }
        s
    }

    /// Time derivative of `self(λ(t))` under the linear dynamics
    /// `λ̇ = l λ`, as a polynomial of the same degree.
    pub fn time_derivative(&self, l: &DMatrix<f64>) -> Poly {
        let d = self.nvars;
        let mut out = Poly::zero(d);
        for (e, c) in &self.terms {
            for i in 0..d {
                if e[i] == 0 {
                    continue;
                }
                for j in 0..d {
                    let lij = l[(i, j)];
                    if lij == 0.0 {
                        continue;
                    }
                    let mut k = e.clone();
                    k[i] -= 1;
                    k[j] += 1;
                    out.add_term(k, *c * e[i] as f64 * lij);
                }
            }
        }
        out
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> f64 {
        self.terms.get(&vec![0u8; self.nvars]).copied().unwrap_or(0.0)
    }

    /// Substitute each variable by a fixed value except the ones listed in
    /// `keep` (used for cross-sections in diagnostics).
    pub fn partial_eval(&self, values: &[(usize, f64)]) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = *c;
            let mut e2 = e.clone();
            for &(i, v) in values {
                for _ in 0..e2[i] {
                    coeff *= v;
                }
                e2[i] = 0;
            }
            out.add_term(e2, coeff);
        }
        out
    }

    /// Maximum absolute coefficient.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Drop coefficients below `tol` in magnitude.
    pub fn compress(&self, tol: f64) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(e, c)| (e.clone(), *c))
                .collect(),
        }
    }

    /// The variables that actually occur.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut used = vec![false; self.nvars];
        for e in self.terms.keys() {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    used[i] = true;
                }
            }
        }
        (0..self.nvars).filter(|&i| used[i]).collect()
    }

    /// Quadratic-form representation `P(λ) = λ̃ᵀ M λ̃` over augmented
    /// coordinates `λ̃ = (λ, 1)`, valid when `deg(P) ≤ 2`.
    pub fn quadratic_matrix(&self) -> Option<DMatrix<f64>> {
        if self.degree() > 2 {
            return None;
        }
        let d = self.nvars;
        let mut m = DMatrix::<f64>::zeros(d + 1, d + 1);
        for (e, c) in &self.terms {
            let idxs: Vec<usize> = (0..d).flat_map(|i| std::iter::repeat(i).take(e[i] as usize)).collect();
            match idxs.len() {
                0 => m[(d, d)] += c,
                1 => {
                    m[(idxs[0], d)] += c / 2.0;
                    m[(d, idxs[0])] += c / 2.0;
                }
                2 => {
                    let (i, j) = (idxs[0], idxs[1]);
                    if i == j {
                        m[(i, i)] += c;
                    } else {
                        m[(i, j)] += c / 2.0;
                        m[(j, i)] += c / 2.0;
                    }
                }
                _ => unreachable!(),
            }
        }
        Some(m)
    }
}

/// Complex-coefficient polynomial as a (re, im) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyC {
    pub re: Poly,
    pub im: Poly,
}

impl PolyC {
    pub fn zero(nvars: usize) -> Self {
        PolyC { re: Poly::zero(nvars), im: Poly::zero(nvars) }
    }

    pub fn from_re(re: Poly) -> Self {
        let nvars = re.nvars;
        PolyC { re, im: Poly::zero(nvars) }
    }

    pub fn conj(&self) -> PolyC {
        PolyC { re: self.re.clone(), im: self.im.scale(-1.0) }
    }

    pub fn add(&self, o: &PolyC) -> PolyC {
        PolyC { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &PolyC) -> PolyC {
        PolyC { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &PolyC) -> PolyC {
        PolyC {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn eval(&self, x: &DVector<f64>) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.eval(x), self.im.eval(x))
    }
}

/// Sum of all principal `k×k` minors of a Hermitian matrix of polynomials;
/// this is `e_k` of its eigenvalues as a polynomial in the coordinates.
pub fn elementary_symmetric_poly(m: &[Vec<PolyC>], k: usize) -> Poly {
    let n = m.len();
    let nvars = m[0][0].re.nvars;
    assert!(k >= 1 && k <= n);
    let mut out = Poly::zero(nvars);
    // iterate over k-subsets of 0..n
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let det = det_poly(m, &subset);
        out = out.add(&det.re);
        // advance subset
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if subset[i] != i + n - k {
                subset[i] += 1;
                for j in (i + 1)..k {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn det_poly(m: &[Vec<PolyC>], rows: &[usize]) -> PolyC {
    let k = rows.len();
    let nvars = m[0][0].re.nvars;
    if k == 1 {
        return m[rows[0]][rows[0]].clone();
    }
    // Laplace expansion along the first row of the principal submatrix
    let mut out = PolyC::zero(nvars);
    for (cpos, &cj) in rows.iter().enumerate() {
        let minor_rows: Vec<usize> = rows[1..].to_vec();
        let minor_cols: Vec<usize> = rows.iter().copied().filter(|&x| x != cj).collect();
        let sub = det_poly_rect(m, &minor_rows, &minor_cols);
        let sign = if cpos % 2 == 0 { 1.0 } else { -1.0 };
        let term = m[rows[0]][cj].mul(&sub);
        out = out.add(&PolyC { re: term.re.scale(sign), im: term.im.scale(sign) });
    }
    out
}

fn det_poly_rect(m: &[Vec<PolyC>], rows: &[usize], cols: &[usize]) -> PolyC {
    let k = rows.len();
    let nvars = m[0][0].re.nvars;
    if k == 0 {
        return PolyC::from_re(Poly::constant(nvars, 1.0));
    }
    if k == 1 {
        return m[rows[0]][cols[0]].clone();
    }
    let mut out = PolyC::zero(nvars);
    for (cpos, &cj) in cols.iter().enumerate() {
        let minor_rows: Vec<usize> = rows[1..].to_vec();
        let minor_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != cj).collect();
        let sub = det_poly_rect(m, &minor_rows, &minor_cols);
        let sign = if cpos % 2 == 0 { 1.0 } else { -1.0 };
        let term = m[rows[0]][cj].mul(&sub);
        out = out.add(&PolyC { re: term.re.scale(sign), im: term.im.scale(sign) });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn arithmetic_and_eval() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        // p = (x + 2y)^2 - 3
        let p = x.add(&y.scale(2.0));
        let p = p.mul(&p).add(&Poly::constant(2, -3.0));
        let v = DVector::from_vec(vec![1.5, -0.5]);
        assert_abs_diff_eq!(p.eval(&v), (1.5 - 1.0f64).powi(2) - 3.0, epsilon = 1e-14);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn time_derivative_matches_finite_difference() {
        let l = DMatrix::from_row_slice(2, 2, &[-0.3, 1.0, -2.0, -0.7]);
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).add(&x.mul(&y).scale(-0.5)).add(&y.scale(3.0));
        let dp = p.time_derivative(&l);
        // finite difference along the flow at a point
        let lam = DVector::from_vec(vec![0.8, -0.4]);
        let h = 1e-6;
        let step = |t: f64| {
            let m = DMatrix::<f64>::identity(2, 2) + &l * t + (&l * &l) * (t * t / 2.0);
            p.eval(&(&m * &lam))
        };
        let fd = (step(h) - step(-h)) / (2.0 * h);
        assert_abs_diff_eq!(dp.eval(&lam), fd, epsilon = 1e-6);
    }

    #[test]
    fn quadratic_matrix_round_trip() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = x.mul(&x).scale(2.0).add(&x.mul(&y).scale(-1.0)).add(&y.scale(4.0)).add(&Poly::constant(2, 0.5));
        let m = p.quadratic_matrix().unwrap();
        let lam = DVector::from_vec(vec![0.3, -1.2]);
        let aug = DVector::from_vec(vec![0.3, -1.2, 1.0]);
        assert_abs_diff_eq!((aug.transpose() * &m * &aug)[(0, 0)], p.eval(&lam), epsilon = 1e-14);
    }

    #[test]
    fn e_k_poly_matches_numeric() {
        use num_complex::Complex64 as C64;
        // Hermitian 3x3 with polynomial entries in one variable
        let v = |c: f64| PolyC::from_re(Poly::constant(1, c));
        let x = PolyC::from_re(Poly::var(1, 0));
        let m = vec![
            vec![v(1.0), x.clone(), PolyC::zero(1)],
            vec![x.clone(), v(2.0), v(0.5)],
            vec![PolyC::zero(1), v(0.5), v(-1.0)],
        ];
        let e2 = elementary_symmetric_poly(&m, 2);
        let e3 = elementary_symmetric_poly(&m, 3);
        let xval = 0.7;
        let md = nalgebra::DMatrix::from_row_slice(3, 3, &[1.0, xval, 0.0, xval, 2.0, 0.5, 0.0, 0.5, -1.0])
            .map(|r| C64::new(r, 0.0));
        let e2n = crate::bloch::elementary_symmetric(&md, 2).unwrap();
        let e3n = crate::bloch::elementary_symmetric(&md, 3).unwrap();
        let pt = DVector::from_vec(vec![xval]);
        assert_abs_diff_eq!(e2.eval(&pt), e2n, epsilon = 1e-12);
        assert_abs_diff_eq!(e3.eval(&pt), e3n, epsilon = 1e-12);
    }
}
