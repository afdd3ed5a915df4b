//! Expressing a positivity target as a quadratic form: directly when the
//! polynomial has degree at most two, and through the nonlinear lift to
//! closure coordinates `Ξ` otherwise.
//!
//! The lift grows a basis from `Ξ_1 = ±(P − c)` by repeatedly applying the
//! time derivative induced by `λ̇ = l λ` until the span closes; the lifted
//! dynamics is then linear, `Ξ̇ = L̃ Ξ`, and `S̃ = diag(1, 0, …, 0)` turns
//! the degree-`m` target into the quadratic `G = Ξ(0)ᵀS̃Ξ(0) − ΞᵀS̃Ξ`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::models::ReducedSystem;
use crate::poly::{Monomial, Poly};
use crate::{Error, Result};

/// Quadratic form `value(λ) = λ̃(0)ᵀ s λ̃(0) − λ̃ᵀ s λ̃` over augmented
/// coordinates `λ̃ = (λ, 1)`; the augmentation carries affine targets.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    /// Symmetric matrix on the augmented coordinates.
    pub s: DMatrix<f64>,
    /// Whether the augmented constant coordinate is actually used.
    pub augmented: bool,
    pub fit_residual: f64,
}

impl QuadraticForm {
    pub fn dim(&self) -> usize {
        self.s.nrows()
    }

    pub fn value(&self, anchor: &DVector<f64>, lambda: &DVector<f64>) -> f64 {
        let a = augment(anchor, self.augmented);
        let x = augment(lambda, self.augmented);
        (a.transpose() * &self.s * &a)[(0, 0)] - (x.transpose() * &self.s * &x)[(0, 0)]
    }
}

pub fn augment(v: &DVector<f64>, augmented: bool) -> DVector<f64> {
    if !augmented {
        return v.clone();
    }
    let mut out = DVector::zeros(v.len() + 1);
    out.rows_mut(0, v.len()).copy_from(v);
    out[v.len()] = 1.0;
    out
}

/// Strip strictly sign-definite univariate factors from a polynomial in a
/// single variable, returning a sign-equivalent polynomial of lower degree.
/// Used for quartic targets like `(1−λ₁⁴)/4 = (1/4)(1−λ₁²)(1+λ₁²)`.
fn strip_positive_cofactors(p: &Poly) -> Poly {
    let vars = p.support_vars();
    if vars.len() != 1 || p.degree() <= 2 {
        return p.clone();
    }
    let v = vars[0];
    // coefficients of the univariate polynomial
    let deg = p.degree();
    let mut coeffs = vec![0.0; deg + 1];
    for (e, c) in &p.terms {
        coeffs[e[v] as usize] += *c;
    }
    // deflate complex-conjugate root pairs with nonzero imaginary part:
    // such quadratic factors are sign-definite over the reals.
    let roots = univariate_roots(&coeffs);
    let mut quad_factors: Vec<(f64, f64)> = Vec::new(); // x² + b x + c
    let mut used = vec![false; roots.len()];
    for (i, r) in roots.iter().enumerate() {
        if used[i] || r.im.abs() < 1e-9 {
            continue;
        }
        // pair with conjugate
        if let Some((j, _)) = roots
            .iter()
            .enumerate()
            .find(|(j, s)| !used[*j] && *j != i && (s.conj() - r).norm() < 1e-7 * r.norm().max(1.0))
        {
            used[i] = true;
            used[j] = true;
            quad_factors.push((-2.0 * r.re, r.norm_sqr()));
        }
    }
    if quad_factors.is_empty() {
        return p.clone();
    }
    // divide out each strictly positive quadratic factor
    let mut current = coeffs;
    let lead_sign = current.last().map(|c| c.signum()).unwrap_or(1.0);
    for (b, c) in quad_factors {
        // the factor x² + b x + c is positive for all real x when its
        // discriminant is negative
        if b * b - 4.0 * c >= -1e-12 {
            continue;
        }
        if let Some(q) = poly_div_quadratic(&current, b, c) {
            current = q;
        }
    }
    let _ = lead_sign;
    let mut out = Poly::zero(p.nvars);
    for (k, &c) in current.iter().enumerate() {
        if c != 0.0 {
            let mut e: Monomial = vec![0; p.nvars];
            e[v] = k as u8;
            out.add_term(e, c);
        }
    }
    out
}

/// Roots of a univariate polynomial via the companion matrix.
fn univariate_roots(coeffs: &[f64]) -> Vec<num_complex::Complex64> {
    let mut c = coeffs.to_vec();
    while c.last().is_some_and(|x| x.abs() < 1e-14) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -c[i] / lead;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}

/// Exact division of a univariate polynomial by `x² + b x + c`; returns the
/// quotient when the remainder is negligible.
fn poly_div_quadratic(coeffs: &[f64], b: f64, c: f64) -> Option<Vec<f64>> {
    let n = coeffs.len();
    if n < 3 {
        return None;
    }
    let mut rem = coeffs.to_vec();
    let mut quot = vec![0.0; n - 2];
    for k in (2..n).rev() {
        let q = rem[k];
        quot[k - 2] = q;
        rem[k] -= q;
        rem[k - 1] -= q * b;
        rem[k - 2] -= q * c;
    }
    let scale = coeffs.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    if rem[0].abs() < 1e-10 * scale && rem[1].abs() < 1e-10 * scale {
        Some(quot)
    } else {
        None
    }
}

/// Fit the quadratic form whose trajectory difference equals `target`.
///
/// The target must have degree ≤ 2 after substituting conserved
/// sign-definite cofactors; affine terms are carried by the augmented
/// constant coordinate, and the representation requires the target to
/// vanish at the anchor `λ(0)`. The result is verified against direct
/// polynomial evaluation on trajectory samples and perturbed initial
/// conditions.
pub fn fit_quadratic_form(reduced: &ReducedSystem, target: &Poly) -> Result<QuadraticForm> {
    let stripped = strip_positive_cofactors(target);
    if stripped.degree() > 2 {
        return Err(Error::NotQuadratic(f64::INFINITY));
    }
    let p0 = stripped.eval(&reduced.lambda0);
    let scale = stripped.max_coeff().max(1.0);
    if p0.abs() > 1e-9 * scale {
        return Err(Error::NotQuadratic(p0.abs()));
    }
    let m = stripped
        .quadratic_matrix()
        .ok_or(Error::NotQuadratic(f64::INFINITY))?;
    let d = reduced.dim;
    // s = -M on augmented coordinates; the augmentation is only needed for
    // linear terms (constants cancel in the anchored difference)
    let augmented = (0..d).any(|i| m[(i, d)].abs() > 1e-14);
    let s = if augmented {
        -m
    } else {
        -m.view((0, 0), (d, d)).into_owned()
    };
    let form = QuadraticForm { s, augmented, fit_residual: 0.0 };
    // residual over trajectory samples and perturbed starts
    let samples = 10 * d * d + 20;
    let horizon = crate::propagator::default_horizon(reduced);
    let mut resid = 0.0f64;
    let step = (reduced.l.clone() * (horizon / samples as f64)).exp();
    let mut lam = reduced.lambda0.clone();
    for k in 0..samples {
        let direct = stripped.eval(&lam) - stripped.eval(&reduced.lambda0);
        let via_form = -form.value(&reduced.lambda0, &lam) + 0.0;
        // value(λ) = P(anchor) - P(λ) (with P(anchor) = 0): compare signs
        resid = resid.max((via_form - (-direct)).abs());
        // perturbed initial condition inside the invariant subspace
        if k % 7 == 0 {
            let mut pert = reduced.lambda0.clone();
            for i in 0..d {
                pert[i] += 0.05 * ((k * (i + 3)) as f64).sin();
            }
            let dv = stripped.eval(&pert);
            let fv = (augment(&reduced.lambda0, form.augmented).transpose() * &form.s
                * augment(&reduced.lambda0, form.augmented))[(0, 0)]
                - (augment(&pert, form.augmented).transpose() * &form.s * augment(&pert, form.augmented))[(0, 0)];
            resid = resid.max((fv - dv).abs());
        }
        lam = &step * lam;
    }
    if resid > 1e-9 * scale.max(1.0) {
        return Err(Error::NotQuadratic(resid));
    }
    Ok(QuadraticForm { fit_residual: resid, ..form })
}

/// A lifted linear system for a polynomial target of degree ≥ 2.
#[derive(Debug, Clone)]
pub struct LiftedSystem {
    /// Orthonormalized polynomial coordinates; `basis[0]` is
    /// `Ξ_1 = ±(P − c)/xi1_norm`.
    pub basis: Vec<Poly>,
    /// Coefficient-space norm of the raw first coordinate `±(P − c)`.
    pub xi1_norm: f64,
    /// Lifted generator: `Ξ̇ = L̃ Ξ`.
    pub l_tilde: DMatrix<f64>,
    /// `Ξ(0)`.
    pub xi0: DVector<f64>,
    pub c: f64,
    pub sign_upper: bool,
    /// Underlying reduced dynamics (kept for Ω parametrization).
    pub l_reduced: DMatrix<f64>,
    pub lambda0: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftSign {
    /// `Ξ_1 = P − c`
    Upper,
    /// `Ξ_1 = c − P`
    Lower,
}

impl LiftedSystem {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn xi_of(&self, lambda: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.basis.len(), |k, _| self.basis[k].eval(lambda))
    }

    /// `S̃ = diag(1, 0, …, 0)`.
    pub fn s_tilde(&self) -> DMatrix<f64> {
        let mut s = DMatrix::zeros(self.dim(), self.dim());
        s[(0, 0)] = 1.0;
        s
    }

    /// JSON dump of basis multi-indices, lifted generator and `c`.
    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Dump<'a> {
            basis: Vec<Vec<(Vec<u8>, f64)>>,
            l_tilde: Vec<Vec<f64>>,
            c: f64,
            sign_upper: bool,
            xi0: &'a [f64],
        }
        let basis = self
            .basis
            .iter()
            .map(|p| p.terms.iter().map(|(e, c)| (e.clone(), *c)).collect())
            .collect();
        let l_tilde = (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.l_tilde[(i, j)]).collect())
            .collect();
        serde_json::to_value(Dump {
            basis,
            l_tilde,
            c: self.c,
            sign_upper: self.sign_upper,
            xi0: self.xi0.as_slice(),
        })
        .expect("serializable")
    }
}

/// Asymptotic value of `P(λ(t))`: the limit exists when the reduced
/// generator splits into strictly stable modes and a semisimple kernel.
pub fn asymptotic_value(reduced_l: &DMatrix<f64>, lambda0: &DVector<f64>, p: &Poly) -> Result<f64> {
    let d = reduced_l.nrows();
    let eigs = reduced_l.complex_eigenvalues();
    let scale = reduced_l.amax().max(1.0);
    if eigs.iter().any(|z| z.re > 1e-10 * scale) {
        return Err(Error::NoAsymptote);
    }
    let neutral: Vec<_> = eigs.iter().filter(|z| z.re.abs() <= 1e-10 * scale).collect();
    if neutral.iter().any(|z| z.im.abs() > 1e-10 * scale) {
        return Err(Error::NoAsymptote);
    }
    if neutral.is_empty() {
        // strictly stable: λ(∞) = 0
        return Ok(p.eval(&DVector::zeros(d)));
    }
    // project λ(0) onto the kernel along the stable subspace: evaluate the
    // flow at a long but finite horizon (the kernel is semisimple when the
    // projection converges; verified by comparing two horizons).
    let slowest = eigs
        .iter()
        .filter(|z| z.re < -1e-10 * scale)
        .map(|z| -z.re)
        .fold(f64::INFINITY, f64::min);
    if !slowest.is_finite() {
        // pure kernel: constant dynamics
        return Ok(p.eval(lambda0));
    }
    let t1 = 60.0 / slowest;
    let a = (reduced_l.clone() * t1).exp() * lambda0;
    let b = (reduced_l.clone() * (1.5 * t1)).exp() * lambda0;
    if (&a - &b).amax() > 1e-8 * lambda0.amax().max(1.0) {
        return Err(Error::NoAsymptote);
    }
    Ok(p.eval(&b))
}

/// Build the lifted system for `P` with the closure basis grown from
/// `Ξ_1 = ±(P − c)`. `c = None` selects the asymptotic value of `P`.
pub fn lift_polynomial(
    reduced: &ReducedSystem,
    p: &Poly,
    sign: LiftSign,
    c: Option<f64>,
) -> Result<LiftedSystem> {
    lift_polynomial_l(&reduced.l, &reduced.lambda0, p, sign, c)
}

pub fn lift_polynomial_l(
    l: &DMatrix<f64>,
    lambda0: &DVector<f64>,
    p: &Poly,
    sign: LiftSign,
    c: Option<f64>,
) -> Result<LiftedSystem> {
    let cval = match c {
        Some(v) => v,
        None => asymptotic_value(l, lambda0, p)?,
    };
    let d = p.nvars;
    let sgn = match sign {
        LiftSign::Upper => 1.0,
        LiftSign::Lower => -1.0,
    };
    let xi1 = p.sub(&Poly::constant(d, cval)).scale(sgn);
    // Krylov closure in polynomial coefficient space, orthonormalized as it
    // grows (raw derivative chains become numerically dependent fast). The
    // graded monomial closure bounds the dimension, so this terminates.
    let dot = |a: &Poly, b: &Poly| -> f64 {
        a.terms
            .iter()
            .map(|(e, c)| c * b.terms.get(e).copied().unwrap_or(0.0))
            .sum()
    };
    let add_ortho = |q: &Poly, ortho: &mut Vec<Poly>| -> bool {
        let mut w = q.clone();
        // two Gram-Schmidt passes keep the basis orthonormal to roundoff
        for _ in 0..2 {
            for ob in ortho.iter() {
                let co = dot(&w, ob);
                w = w.sub(&ob.scale(co));
            }
        }
        let norm = dot(&w, &w).sqrt();
        if norm > 1e-10 * dot(q, q).sqrt().max(1e-300) {
            ortho.push(w.scale(1.0 / norm));
            true
        } else {
            false
        }
    };
    let xi1_norm = dot(&xi1, &xi1).sqrt();
    if xi1_norm <= 0.0 {
        return Err(Error::Argument("lift target is the constant polynomial".into()));
    }
    let mut ortho: Vec<Poly> = Vec::new();
    add_ortho(&xi1, &mut ortho);
    let mut frontier = vec![xi1];
    while let Some(q) = frontier.pop() {
        let dq = q.time_derivative(l).compress(1e-13 * q.max_coeff().max(1.0) * l.amax().max(1.0));
        if add_ortho(&dq, &mut ortho) {
            frontier.push(ortho.last().unwrap().clone());
        }
    }
    let basis = ortho;
    let dim = basis.len();
    // monomial coordinate matrix of the basis
    let mut monos: Vec<Monomial> = Vec::new();
    for b in &basis {
        for e in b.terms.keys() {
            if !monos.contains(e) {
                monos.push(e.clone());
            }
        }
    }
    monos.sort();
    let midx = |e: &Monomial| monos.iter().position(|m| m == e).unwrap();
    let nm = monos.len();
    let mut bm = DMatrix::<f64>::zeros(dim, nm);
    for (i, b) in basis.iter().enumerate() {
        for (e, c) in &b.terms {
            bm[(i, midx(e))] = *c;
        }
    }
    // L̃ row i: coefficients of d/dt basis_i over the basis (least squares,
    // exact by closure)
    let bt = bm.transpose();
    let solver = crate::linalg::Lstsq::new(&bt, 1e-13);
    let mut l_tilde = DMatrix::<f64>::zeros(dim, dim);
    for (i, b) in basis.iter().enumerate() {
        let db = b.time_derivative(l);
        let mut rhs = DVector::<f64>::zeros(nm);
        for (e, c) in &db.terms {
            rhs[midx(e)] = *c;
        }
        let sol = solver.solve(&rhs);
        let resid = (&bt * &sol - &rhs).amax();
        let scale = db.max_coeff().max(1.0);
        if resid > 1e-7 * scale {
            return Err(Error::Reduction(format!(
                "lift closure residual {resid:.3e} at basis element {i}"
            )));
        }
        for j in 0..dim {
            l_tilde[(i, j)] = sol[j];
        }
    }
    let xi0 = DVector::from_fn(dim, |k, _| basis[k].eval(lambda0));
    Ok(LiftedSystem {
        basis,
        xi1_norm,
        l_tilde,
        xi0,
        c: cval,
        sign_upper: matches!(sign, LiftSign::Upper),
        l_reduced: l.clone(),
        lambda0: lambda0.clone(),
    })
}

/// `G(Ξ) = Ξ(0)ᵀ S̃ Ξ(0) − ΞᵀS̃Ξ` in the raw (unnormalized) convention,
/// i.e. `(P(λ(0)) − c)² − (P(λ) − c)²`.
pub fn eval_g(lifted: &LiftedSystem, xi: &DVector<f64>) -> f64 {
    let n2 = lifted.xi1_norm * lifted.xi1_norm;
    n2 * (lifted.xi0[0] * lifted.xi0[0] - xi[0] * xi[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_model, reduced_system};
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
        kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn jc_quartic_strips_to_printed_form() {
        let model = build_model("jaynes_cummings", &params(&[("gamma", 10.0), ("zeta", 1.0)])).unwrap();
        let reduced = reduced_system(&model).unwrap();
        // target (1 - λ1⁴)/4; the paper's form uses s = diag(1, 0)/4
        let form = fit_quadratic_form(&reduced, &reduced.eh_poly).unwrap();
        assert!(!form.augmented);
        let expected = DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(form.s, expected, epsilon = 1e-12);
    }

    #[test]
    fn reviving_target_gives_printed_s() {
        let model = build_model(
            "reviving_2level",
            &params(&[("gamma1", 0.5), ("gamma2", 0.5), ("omega", 1.0), ("alpha", 4.0)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        // the paper states e_h with s = diag(1, 0): target 1 - λ1²
        let d = reduced.dim;
        let one = Poly::constant(d, 1.0);
        let l1 = Poly::var(d, 0);
        let target = one.sub(&l1.mul(&l1));
        let form = fit_quadratic_form(&reduced, &target).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(form.s, expected, epsilon = 1e-12);
    }

    #[test]
    fn bath_p1_squared_fits_rank_limited_form() {
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", 0.7)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        let p1 = &reduced.factors[0].poly;
        let p1sq = p1.mul(p1);
        let form = fit_quadratic_form(&reduced, &p1sq).unwrap();
        assert!(form.augmented);
        // value equals P1² along the trajectory (lower-bound with equality)
        let traj = crate::propagator::propagate(&reduced, 4.0, 0.05).unwrap();
        for k in (0..traj.len()).step_by(9) {
            let lam = &traj.lambdas[k];
            assert_abs_diff_eq!(
                form.value(&reduced.lambda0, lam),
                p1sq.eval(lam),
                epsilon = 1e-9
            );
        }
    }

    #[test]
    fn lift_closure_and_g_identity_bath_p2() {
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", 0.7)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        let p2 = reduced.factors[1].poly.clone();
        let lifted = lift_polynomial(&reduced, &p2, LiftSign::Lower, None).unwrap();
        assert!(lifted.c > 0.0);
        // Ξ(0) first component carries c (up to the basis normalization)
        // when P2(λ(0)) = 0
        assert_abs_diff_eq!(lifted.xi0[0] * lifted.xi1_norm, lifted.c, epsilon = 1e-10);
        // closure: Ξ(t) from the lifted exponential equals Ξ(λ(t)); and
        // G = 2c P2 - P2² pointwise
        let horizon = 8.0;
        let steps = 40;
        let lam_step = (reduced.l.clone() * (horizon / steps as f64)).exp();
        let xi_step = (lifted.l_tilde.clone() * (horizon / steps as f64)).exp();
        let mut lam = reduced.lambda0.clone();
        let mut xi = lifted.xi0.clone();
        for _ in 0..=steps {
            let xi_direct = lifted.xi_of(&lam);
            let rel = (&xi - &xi_direct).amax() / xi_direct.amax().max(1.0);
            assert!(rel < 1e-8, "closure residual {rel}");
            let p2v = p2.eval(&lam);
            assert_abs_diff_eq!(
                eval_g(&lifted, &xi_direct),
                2.0 * lifted.c * p2v - p2v * p2v,
                epsilon = 1e-8
            );
            // the bounding inequality G <= 2c P2
            assert!(eval_g(&lifted, &xi_direct) <= 2.0 * lifted.c * p2v + 1e-9);
            lam = &lam_step * lam;
            xi = &xi_step * xi;
        }
    }

    #[test]
    fn linear_target_degenerates_to_identity_embedding() {
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", 0.7)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        let p1 = reduced.factors[0].poly.clone(); // degree 1
        let lifted = lift_polynomial(&reduced, &p1, LiftSign::Upper, Some(0.0)).unwrap();
        // degree-1 block: the lifted generator restricted past Ξ1 reproduces
        // the reduced dynamics up to the linear change of coordinates, so
        // its spectrum is contained in that of l (plus the constant mode).
        let mut le: Vec<f64> = lifted.l_tilde.complex_eigenvalues().iter().map(|z| z.re).collect();
        le.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for ev in &le {
            let in_l = reduced
                .l
                .complex_eigenvalues()
                .iter()
                .any(|z| (z.re - ev).abs() < 1e-8 * reduced.l.amax());
            assert!(in_l || ev.abs() < 1e-10, "unexpected lifted eigenvalue {ev}");
        }
        assert!(lifted.dim() <= reduced.dim + 1);
    }

    #[test]
    fn eval_g_cases() {
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", 0.7)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        let p2 = reduced.factors[1].poly.clone();
        let lifted = lift_polynomial(&reduced, &p2, LiftSign::Lower, None).unwrap();
        // anchor point: G(Ξ(0)) = 0 since Ξ1(0) carries c
        assert_abs_diff_eq!(eval_g(&lifted, &lifted.xi0), 0.0, epsilon = 1e-12);
        // xi1 = 0 gives the maximum c²
        let mut xi = lifted.xi0.clone();
        xi[0] = 0.0;
        assert_abs_diff_eq!(eval_g(&lifted, &xi), lifted.c * lifted.c, epsilon = 1e-12);
    }

    #[test]
    fn monomial_closure_terminates_within_bound() {
        let model = build_model(
            "spin_boson",
            &params(&[("omega", 1.0), ("gamma", 1.0), ("delta", 0.2), ("beta", 0.2)]),
        )
        .unwrap();
        let reduced = reduced_system(&model).unwrap();
        let p1 = reduced.factors[0].poly.clone();
        let lifted = lift_polynomial(&reduced, &p1, LiftSign::Lower, None).unwrap();
        // C(d + m, m) with d = 6, m = 2 bounds the basis size
        assert!(lifted.dim() <= 28, "dim = {}", lifted.dim());
    }
}
