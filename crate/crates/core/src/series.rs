//! Truncated Taylor series in one variable, scalar- and matrix-valued.
//!
//! Used for short-time eigenvalue expansions of the process matrix and for
//! exact derivative data of synthesis targets.

use nalgebra::Matrix4;

/// Scalar series `sum_k c[k] t^k`, truncated at a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub c: Vec<f64>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Series { c: vec![0.0; order] }
    }

    pub fn constant(order: usize, v: f64) -> Self {
        let mut s = Series::zero(order);
        s.c[0] = v;
        s
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    /// `e^{a t}`.
    pub fn exp(order: usize, a: f64) -> Self {
        let mut s = Series::zero(order);
        let mut term = 1.0;
        for k in 0..order {
            s.c[k] = term;
            term *= a / (k as f64 + 1.0);
        }
        s
    }

    /// `cos(w t)`.
    pub fn cos(order: usize, w: f64) -> Self {
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for k in 0..order {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 0 {
                let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
                s.c[k] = sign * w.powi(k as i32) / fact;
            }
        }
        s
    }

    /// `sin(w t)`.
    pub fn sin(order: usize, w: f64) -> Self {
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for k in 0..order {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 1 {
                let sign = if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                s.c[k] = sign * w.powi(k as i32) / fact;
            }
        }
        s
    }

    /// `cosh(√a² t)` written through `a²`, valid for negative `a²` as well.
    pub fn cosh_sq(order: usize, a_sq: f64) -> Self {
        // sum a^{2m} t^{2m} / (2m)!
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for k in 0..order {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 0 {
                s.c[k] = a_sq.powi((k / 2) as i32) / fact;
            }
        }
        s
    }

    /// `sinh(√a² t)/√a²` written through `a²`, valid for negative `a²`.
    pub fn sinhc_sq(order: usize, a_sq: f64) -> Self {
        let mut s = Series::zero(order);
        let mut fact = 1.0;
        for k in 0..order {
            if k > 0 {
                fact *= k as f64;
            }
            if k % 2 == 1 {
                s.c[k] = a_sq.powi(((k - 1) / 2) as i32) / fact;
            }
        }
        s
    }

    pub fn add(&self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        Series { c: (0..n).map(|k| self.c[k] + o.c[k]).collect() }
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Series {
        Series { c: self.c.iter().map(|x| x * s).collect() }
    }

    pub fn mul(&self, o: &Series) -> Series {
        let n = self.order().min(o.order());
        let mut out = Series::zero(n);
        for i in 0..n {
            if self.c[i] == 0.0 {
                continue;
            }
            for j in 0..(n - i) {
                out.c[i + j] += self.c[i] * o.c[j];
            }
        }
        out
    }

    /// Series of `1/self`, requiring a nonzero constant term.
    pub fn inv(&self) -> Series {
        let n = self.order();
        assert!(self.c[0] != 0.0, "series inverse needs nonzero constant term");
        let mut out = Series::zero(n);
        out.c[0] = 1.0 / self.c[0];
        for k in 1..n {
            let mut acc = 0.0;
            for j in 0..k {
                acc += out.c[j] * self.c[k - j];
            }
            out.c[k] = -acc / self.c[0];
        }
        out
    }

    /// Series square root of a series with positive constant term.
    pub fn sqrt(&self) -> Series {
        let n = self.order();
        assert!(self.c[0] > 0.0, "series sqrt needs positive constant term");
        let mut out = Series::zero(n);
        out.c[0] = self.c[0].sqrt();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += out.c[j] * out.c[k - j];
            }
            out.c[k] = (self.c[k] - acc) / (2.0 * out.c[0]);
        }
        out
    }

    pub fn derivative(&self) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        for k in 1..n {
            out.c[k - 1] = self.c[k] * k as f64;
        }
        out
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for &ck in self.c.iter().rev() {
            acc = acc * t + ck;
        }
        acc
    }

    /// Index and value of the first coefficient above `tol` in magnitude.
    pub fn leading(&self, tol: f64) -> Option<(usize, f64)> {
        self.c.iter().enumerate().find(|(_, v)| v.abs() > tol).map(|(k, v)| (k, *v))
    }

    /// Shift by `t0`: series of `t ↦ self(t0 + t)`.
    pub fn shift(&self, t0: f64) -> Series {
        let n = self.order();
        let mut out = Series::zero(n);
        // binomial re-expansion
        for (k, &ck) in self.c.iter().enumerate() {
            let mut binom = 1.0;
            let mut pow = 1.0;
            for j in 0..=k {
                // coefficient of t^{k-j} gets ck * C(k, j) t0^j
                out.c[k - j] += ck * binom * pow;
                binom *= (k - j) as f64 / (j as f64 + 1.0);
                pow *= t0;
            }
        }
        out
    }
}

/// 4×4-matrix-valued truncated series.
#[derive(Debug, Clone)]
pub struct MatSeries {
    pub c: Vec<Matrix4<f64>>,
}

impl MatSeries {
    pub fn zero(order: usize) -> Self {
        MatSeries { c: vec![Matrix4::zeros(); order] }
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> Series {
        Series { c: self.c.iter().map(|m| m[(i, j)]).collect() }
    }

    pub fn set_entry(&mut self, i: usize, j: usize, s: &Series) {
        for (k, m) in self.c.iter_mut().enumerate() {
            m[(i, j)] = if k < s.c.len() { s.c[k] } else { 0.0 };
        }
    }

    pub fn add(&self, o: &MatSeries) -> MatSeries {
        let n = self.order().min(o.order());
        MatSeries { c: (0..n).map(|k| self.c[k] + o.c[k]).collect() }
    }

    pub fn scale(&self, s: f64) -> MatSeries {
        MatSeries { c: self.c.iter().map(|m| m * s).collect() }
    }

    /// Left-multiply every coefficient by a constant matrix.
    pub fn lmul(&self, m: &Matrix4<f64>) -> MatSeries {
        MatSeries { c: self.c.iter().map(|x| m * x).collect() }
    }

    /// Coefficient-wise series derivative.
    pub fn derivative(&self) -> MatSeries {
        let n = self.order();
        let mut out = MatSeries::zero(n);
        for k in 1..n {
            out.c[k - 1] = self.c[k] * k as f64;
        }
        out
    }

    pub fn eval(&self, t: f64) -> Matrix4<f64> {
        let mut acc = Matrix4::zeros();
        for m in self.c.iter().rev() {
            acc = acc * t + m;
        }
        acc
    }

    pub fn max_coeff(&self, up_to: usize) -> f64 {
        self.c
            .iter()
            .take(up_to)
            .map(|m| m.iter().fold(0.0f64, |a, &x| a.max(x.abs())))
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn product_and_eval() {
        let n = 12;
        let f = Series::exp(n, -0.7).mul(&Series::cos(n, 1.3));
        let t = 0.3;
        assert_abs_diff_eq!(f.eval(t), (-0.7 * t).exp() * (1.3 * t).cos(), epsilon = 1e-10);
    }

    #[test]
    fn sqrt_and_inv() {
        let n = 10;
        let s = Series { c: (0..n).map(|k| if k == 0 { 4.0 } else { 0.3 / (k as f64) }).collect() };
        let r = s.sqrt();
        assert_abs_diff_eq!(r.mul(&r).eval(0.2), s.eval(0.2), epsilon = 1e-9);
        let i = s.inv();
        assert_abs_diff_eq!(i.mul(&s).eval(0.2), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn cosh_sq_matches_both_branches() {
        let n = 14;
        // a^2 > 0: cosh(a t)
        let s = Series::cosh_sq(n, 2.25);
        assert_abs_diff_eq!(s.eval(0.4), (1.5f64 * 0.4).cosh(), epsilon = 1e-10);
        // a^2 < 0: cos(|a| t)
        let s = Series::cosh_sq(n, -2.25);
        assert_abs_diff_eq!(s.eval(0.4), (1.5f64 * 0.4).cos(), epsilon = 1e-10);
    }

    #[test]
    fn shift_reexpands() {
        let n = 8;
        let f = Series::exp(n, -0.5);
        let g = f.shift(0.3);
        assert_abs_diff_eq!(g.eval(0.1), f.eval(0.4), epsilon = 1e-10);
    }
}
