//! Constructing a HEOM from a targeted system solution.
//!
//! Given a dynamical map `Λ_1(t)` with `Λ_1(0) = I`, the hierarchy is built
//! level by level in the triangular convention: `𝓛_{i,i+1} = ω·I` and no
//! level skips upward. At level `k` the unknown blocks `𝓛_{k,1..k}` are
//! parametrized by their sandwich coefficients and chosen so that the next
//! auxiliary trajectory vanishes in its leading time orders; the remaining
//! freedom is resolved by the minimum-norm solution. The recursion
//! terminates when the next auxiliary operator vanishes identically.

use nalgebra::{DMatrix, DVector, Matrix4};

use crate::bloch::{transfer_of_chi, ChiMatrix, CMat4, PauliTransfer};
use crate::models::HeomModel;
use crate::series::{MatSeries, Series};
use crate::{Error, Result};

/// Truncation order of the internal Taylor bookkeeping.
const ORDER: usize = 18;

/// A targeted system dynamics: transfer-matrix Taylor data at `t = 0` and a
/// local expansion at arbitrary times for verification.
pub struct TargetDynamics {
    pub name: String,
    /// Taylor series of the transfer matrix at t = 0.
    pub series: MatSeries,
    /// Local Taylor expansion (same order) at an arbitrary time.
    pub local: Box<dyn Fn(f64) -> MatSeries>,
    /// Natural frequency unit `ω` of the triangular convention.
    pub omega_unit: f64,
}

fn coherence_target(f_at: impl Fn(f64) -> Series + 'static, omega_unit: f64, name: &str) -> TargetDynamics {
    // transfer diag(1, f, f, 1)
    let make = move |t0: f64| {
        let f = f_at(t0);
        let mut m = MatSeries::zero(ORDER);
        let mut one = Series::zero(ORDER);
        one.c[0] = 1.0;
        m.set_entry(0, 0, &one);
        m.set_entry(3, 3, &one);
        m.set_entry(1, 1, &f);
        m.set_entry(2, 2, &f);
        m
    };
    TargetDynamics {
        name: name.into(),
        series: make(0.0),
        local: Box::new(make),
        omega_unit,
    }
}

/// Local expansion of `e^{-γ(t0+t)} cos(ω(t0+t))` built from the addition
/// theorem (exact coefficients at every base point).
fn damped_cos_local(gamma: f64, omega: f64, t0: f64) -> Series {
    let env = (-gamma * t0).exp();
    let c = Series::exp(ORDER, -gamma).mul(&Series::cos(ORDER, omega));
    let s = Series::exp(ORDER, -gamma).mul(&Series::sin(ORDER, omega));
    c.scale(env * (omega * t0).cos()).sub(&s.scale(env * (omega * t0).sin()))
}

/// Reviving-coherence target `f(t) = e^{-γt} cos(ωt)`.
pub fn target_reviving(gamma: f64, omega: f64) -> TargetDynamics {
    let f_at = move |t0: f64| damped_cos_local(gamma, omega, t0);
    coherence_target(f_at, omega, "reviving")
}

/// Generalized reviving target `f(t) = e^{-γt}(1 + 2α[cos(ωt) − 1])`.
pub fn target_generalized(gamma: f64, omega: f64, alpha: f64) -> TargetDynamics {
    let f_at = move |t0: f64| {
        let env = (-gamma * t0).exp();
        let exp_part = Series::exp(ORDER, -gamma).scale(env * (1.0 - 2.0 * alpha));
        exp_part.add(&damped_cos_local(gamma, omega, t0).scale(2.0 * alpha))
    };
    coherence_target(f_at, omega, "generalized")
}

/// `cosh(a(t0+t)/2)` and `sinh(a(t0+t)/2)/(a/2)` through `a²` (valid for
/// oscillatory `a² < 0` too), via the hyperbolic addition theorem.
fn cosh_pair_local(a_sq: f64, t0: f64) -> (Series, Series) {
    let q = a_sq / 4.0; // (a/2)²
    let (ch0, sh0) = if q >= 0.0 {
        let r = q.sqrt();
        if r == 0.0 {
            (1.0, t0)
        } else {
            ((r * t0).cosh(), (r * t0).sinh() / r)
        }
    } else {
        let r = (-q).sqrt();
        ((r * t0).cos(), (r * t0).sin() / r)
    };
    let ch = Series::cosh_sq(ORDER, a_sq / 4.0);
    let sh = Series::sinhc_sq(ORDER, a_sq / 4.0);
    // CH(t0+t) = CH(t0)CH(t) + (a²/4) SH(t0) SH(t)
    // SH(t0+t) = SH(t0)CH(t) + CH(t0)SH(t)
    (
        ch.scale(ch0).add(&sh.scale(q * sh0)),
        ch.scale(sh0).add(&sh.scale(ch0)),
    )
}

/// Jaynes–Cummings target with
/// `f(t) = e^{-ζt/2}[cosh(αt/2) + (ζ/α) sinh(αt/2)]`, `α = √(ζ² − 2γζ)`;
/// the transfer picks up the population block `|f|²`.
pub fn target_jaynes_cummings(gamma: f64, zeta: f64) -> TargetDynamics {
    let a_sq = zeta * zeta - 2.0 * gamma * zeta;
    let f_at = move |t0: f64| {
        let (ch, sh) = cosh_pair_local(a_sq, t0);
        let env = (-zeta * t0 / 2.0).exp();
        Series::exp(ORDER, -zeta / 2.0)
            .scale(env)
            .mul(&ch.add(&sh.scale(zeta / 2.0)))
    };
    let make = move |t0: f64| {
        let f = f_at(t0);
        let f2 = f.mul(&f);
        let mut m = MatSeries::zero(ORDER);
        let mut one = Series::zero(ORDER);
        one.c[0] = 1.0;
        m.set_entry(0, 0, &one);
        m.set_entry(1, 1, &f);
        m.set_entry(2, 2, &f);
        m.set_entry(3, 3, &f2);
        m.set_entry(3, 0, &f2.sub(&one));
        m
    };
    TargetDynamics {
        name: "jaynes_cummings".into(),
        series: make(0.0),
        local: Box::new(make),
        omega_unit: zeta,
    }
}

/// A user target from a transfer-valued closure, with derivatives taken by
/// Richardson-extrapolated central differences.
pub fn target_numeric(
    name: &str,
    transfer: Box<dyn Fn(f64) -> Matrix4<f64>>,
    omega_unit: f64,
    max_order: usize,
) -> TargetDynamics {
    let order = max_order.min(8);
    let make = move |t0: f64| {
        let mut m = MatSeries::zero(ORDER);
        let h0 = 1e-3 / omega_unit.abs().max(1e-12);
        for k in 0..=order {
            let d = numeric_derivative(&transfer, t0, k, h0);
            let mut fact = 1.0;
            for j in 1..=k {
                fact *= j as f64;
            }
            m.c[k] = d / fact;
        }
        m
    };
    TargetDynamics { name: name.into(), series: make(0.0), local: Box::new(make), omega_unit }
}

fn numeric_derivative(
    f: &dyn Fn(f64) -> Matrix4<f64>,
    t0: f64,
    order: usize,
    h0: f64,
) -> Matrix4<f64> {
    if order == 0 {
        return f(t0);
    }
    // central differences with two Richardson levels
    let stencil = |h: f64| -> Matrix4<f64> {
        match order {
            1 => (f(t0 + h) - f(t0 - h)) / (2.0 * h),
            2 => (f(t0 + h) - f(t0) * 2.0 + f(t0 - h)) / (h * h),
            3 => (f(t0 + 2.0 * h) - f(t0 + h) * 2.0 + f(t0 - h) * 2.0 - f(t0 - 2.0 * h))
                / (2.0 * h * h * h),
            _ => {
                // recursive second differences
                let g = |t: f64| numeric_derivative(f, t, order - 2, h0);
                (g(t0 + h) - g(t0) * 2.0 + g(t0 - h)) / (h * h)
            }
        }
    };
    let a = stencil(h0);
    let b = stencil(h0 / 2.0);
    // Richardson for O(h²) stencils
    (b * 4.0 - a) / 3.0
}

/// One resolved hierarchy level: the blocks `𝓛_{k,1..k}`.
#[derive(Debug, Clone)]
pub struct LevelBlocks {
    pub level: usize,
    pub blocks: Vec<PauliTransfer>,
    /// Residual of the derivative-condition system at the solution.
    pub residual: f64,
}

/// Result of a synthesis run.
pub struct SynthesisResult {
    pub levels: Vec<LevelBlocks>,
    pub depth: usize,
    pub terminated: bool,
    /// Max norm of the next auxiliary series when terminated.
    pub tail_residual: f64,
    pub omega_unit: f64,
    /// Taylor series of each level's map (for verification).
    pub maps: Vec<MatSeries>,
}

impl SynthesisResult {
    /// Assemble the synthesized HEOM as a model.
    pub fn to_model(&self) -> Result<HeomModel> {
        let n = self.depth;
        let mut blocks = Vec::new();
        for lb in &self.levels {
            for (j, t) in lb.blocks.iter().enumerate() {
                blocks.push(((lb.level - 1, j), t.clone()));
            }
        }
        for i in 0..n.saturating_sub(1) {
            blocks.push(((i, i + 1), PauliTransfer::identity().scale(self.omega_unit)));
        }
        let generator = crate::bloch::assemble_extended_generator(n, &blocks)?;
        let mut initial = DMatrix::zeros(4 * n, 4);
        for i in 0..4 {
            initial[(i, i)] = 1.0;
        }
        Ok(HeomModel {
            name: "synthesized".into(),
            n_levels: n,
            parameters: Default::default(),
            generator,
            initial_extended_map: initial,
            reference_rate: self.omega_unit.abs().max(1e-12),
        })
    }

    /// Export in the user-model JSON schema.
    pub fn to_model_spec(&self) -> crate::models::ModelSpec {
        let conv = crate::bloch::ChiTransferMap::new();
        let mut blocks = Vec::new();
        for lb in &self.levels {
            for (j, t) in lb.blocks.iter().enumerate() {
                if t.0.amax() < 1e-13 {
                    continue;
                }
                let chi = conv.chi_of_transfer(t);
                let mut terms = Vec::new();
                for a in 0..4 {
                    for b in 0..4 {
                        let z = chi.0[(a, b)];
                        if z.norm() > 1e-12 {
                            let names = ["id", "sx", "sy", "sz"];
                            terms.push(crate::models::TermSpec {
                                coeff: [z.re, z.im],
                                left: crate::models::OperatorSpec::Named(names[a].into()),
                                right: crate::models::OperatorSpec::Named(names[b].into()),
                            });
                        }
                    }
                }
                blocks.push(crate::models::BlockSpec { i: lb.level, j: j + 1, terms });
            }
        }
        for i in 1..self.depth {
            blocks.push(crate::models::BlockSpec {
                i,
                j: i + 1,
                terms: vec![crate::models::TermSpec {
                    coeff: [self.omega_unit, 0.0],
                    left: crate::models::OperatorSpec::Named("id".into()),
                    right: crate::models::OperatorSpec::Named("id".into()),
                }],
            });
        }
        crate::models::ModelSpec {
            levels: self.depth,
            blocks,
            initial: None,
            reference_rate: Some(self.omega_unit),
        }
    }
}

/// Hermitian sandwich basis as transfer matrices (the 16 real degrees of
/// freedom of a Hermiticity-preserving superoperator).
fn sandwich_transfer_basis() -> Vec<Matrix4<f64>> {
    let mut out = Vec::with_capacity(16);
    let mut push = |chi: CMat4| {
        out.push(transfer_of_chi(&ChiMatrix(chi)).0);
    };
    for i in 0..4 {
        let mut m = CMat4::zeros();
        m[(i, i)] = num_complex::Complex64::new(1.0, 0.0);
        push(m);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut m = CMat4::zeros();
            m[(i, j)] = num_complex::Complex64::new(1.0, 0.0);
            m[(j, i)] = num_complex::Complex64::new(1.0, 0.0);
            push(m);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut m = CMat4::zeros();
            m[(i, j)] = num_complex::Complex64::new(0.0, 1.0);
            m[(j, i)] = num_complex::Complex64::new(0.0, -1.0);
            push(m);
        }
    }
    out
}

/// Solve the level-`k` blocks given the resolved prior levels.
///
/// `maps[j]` is the Taylor series of `Λ_{j+1}`; the conditions are
/// `∂_t^v ϱ̃_{k+1}(0) = 0` for `v = 0..=vmax` over all initial states,
/// realized on the Bloch basis. `vmax = k − 2` for the plain conditions;
/// the termination attempt extends them to the full valid order.
fn solve_level(
    maps: &[MatSeries],
    k: usize,
    vmax: usize,
    _omega_unit: f64,
) -> (Vec<PauliTransfer>, f64) {
    let basis = sandwich_transfer_basis();
    let rows_per_v = 16;
    let nrows = (vmax + 1) * rows_per_v;
    let ncols = 16 * k;
    let mut a = DMatrix::<f64>::zeros(nrows, ncols);
    let mut b = DVector::<f64>::zeros(nrows);
    for v in 0..=vmax {
        // target: (v+1) * series coefficient v+1 of Λ_k
        let target = maps[k - 1].c[v + 1] * ((v + 1) as f64);
        for r in 0..4 {
            for c in 0..4 {
                b[v * rows_per_v + 4 * r + c] = target[(r, c)];
            }
        }
        for j in 0..k {
            let mj = maps[j].c[v];
            for (m, bm) in basis.iter().enumerate() {
                let prod = bm * mj;
                for r in 0..4 {
                    for c in 0..4 {
                        a[(v * rows_per_v + 4 * r + c, 16 * j + m)] = prod[(r, c)];
                    }
                }
            }
        }
    }
    // minimum-norm solution of the consistent system
    let x = crate::linalg::lstsq(&a, &b, 2e-14);
    let residual = (&a * &x - &b).amax();
    let blocks = (0..k)
        .map(|j| {
            let mut t = Matrix4::zeros();
            for (m, bm) in basis.iter().enumerate() {
                t += bm * x[16 * j + m];
            }
            PauliTransfer(t)
        })
        .collect();
    (blocks, residual)
}

fn next_map(maps: &[MatSeries], blocks: &[PauliTransfer], k: usize, omega_unit: f64) -> MatSeries {
    let mut nxt = MatSeries::zero(ORDER);
    for v in 0..ORDER - 1 {
        let mut acc = maps[k - 1].c[v + 1] * ((v + 1) as f64);
        for (j, t) in blocks.iter().enumerate() {
            acc -= t.0 * maps[j].c[v];
        }
        nxt.c[v] = acc / omega_unit;
    }
    nxt
}

/// Check whether the printed (or any candidate) blocks satisfy the level
/// conditions; returns the residual. With `terminal` the full valid order
/// is imposed (the candidate must close the hierarchy); otherwise only the
/// derivative conditions `v = 0..k-2` of the construction.
pub fn level_residual(
    target: &TargetDynamics,
    resolved: &[LevelBlocks],
    candidate: &[PauliTransfer],
    terminal: bool,
) -> f64 {
    let k = resolved.len() + 1;
    let mut maps = vec![clone_series(&target.series)];
    for lb in resolved {
        let m = next_map(&maps, &lb.blocks, lb.level, target.omega_unit);
        maps.push(m);
    }
    let vmax = if terminal {
        valid_order(k).saturating_sub(2)
    } else {
        k - 1
    };
    // residual of the strong system at the candidate
    let mut resid = 0.0f64;
    for v in 0..=vmax {
        let mut acc = maps[k - 1].c[v + 1] * ((v + 1) as f64);
        for (j, t) in candidate.iter().enumerate() {
            acc -= t.0 * maps[j].c[v];
        }
        resid = resid.max(acc.amax());
    }
    resid
}

fn clone_series(m: &MatSeries) -> MatSeries {
    MatSeries { c: m.c.clone() }
}

fn valid_order(k: usize) -> usize {
    ORDER - k
}

/// Iterate the level construction until the next auxiliary trajectory
/// vanishes identically (series to the valid order plus a grid check), or
/// `max_depth` is reached.
pub fn synthesize_heom(target: &TargetDynamics, max_depth: usize) -> Result<SynthesisResult> {
    if max_depth == 0 {
        return Err(Error::Argument("max_depth must be at least 1".into()));
    }
    let mut maps = vec![clone_series(&target.series)];
    let mut levels: Vec<LevelBlocks> = Vec::new();
    for k in 1..=max_depth {
        let valid = valid_order(k);
        let strong_vmax = valid.saturating_sub(2);
        // try termination first: impose all valid orders
        let (blocks, resid) = solve_level(&maps, k, strong_vmax, target.omega_unit);
        let scale = maps[k - 1].max_coeff(valid).max(1.0);
        if std::env::var("HEOM_SYNTH_DEBUG").is_ok() {
            eprintln!("level {k}: strong vmax {strong_vmax} resid {resid:.3e} scale {scale:.3e}");
        }
        if resid < 1e-9 * scale {
            let nxt = next_map(&maps, &blocks, k, target.omega_unit);
            let tail = nxt.max_coeff(valid.saturating_sub(2));
            // grid confirmation that the next auxiliary vanishes
            let grid_max = verify_tail_on_grid(target, &levels, &blocks, k)?;
            if std::env::var("HEOM_SYNTH_DEBUG").is_ok() {
                eprintln!("level {k}: tail {tail:.3e} grid {grid_max:.3e}");
            }
            if tail < 1e-8 && grid_max < 1e-8 {
                levels.push(LevelBlocks { level: k, blocks, residual: resid });
                return Ok(SynthesisResult {
                    levels,
                    depth: k,
                    terminated: true,
                    tail_residual: tail.max(grid_max),
                    omega_unit: target.omega_unit,
                    maps,
                });
            }
        }
        // plain conditions: the next auxiliary must stay flat through its
        // first k-1 orders (value and k-1 derivatives, as in the worked
        // constructions)
        let vmax = (k - 1).min(valid.saturating_sub(2));
        let (blocks, resid) = solve_level(&maps, k, vmax, target.omega_unit);
        if resid > 1e-9 * scale {
            return Err(Error::Synthesis { level: k, residual: resid });
        }
        let nxt = next_map(&maps, &blocks, k, target.omega_unit);
        levels.push(LevelBlocks { level: k, blocks, residual: resid });
        maps.push(nxt);
    }
    Ok(SynthesisResult {
        levels,
        depth: max_depth,
        terminated: false,
        tail_residual: f64::NAN,
        omega_unit: target.omega_unit,
        maps,
    })
}

/// Evaluate the next auxiliary map on a time grid through the local Taylor
/// data of the target ("identically zero" is decided numerically).
fn verify_tail_on_grid(
    target: &TargetDynamics,
    resolved: &[LevelBlocks],
    candidate: &[PauliTransfer],
    k: usize,
) -> Result<f64> {
    let tau = 1.0 / target.omega_unit.abs().max(1e-12);
    let mut max_dev = 0.0f64;
    for i in 0..200 {
        let t0 = 10.0 * tau * (i as f64 + 0.5) / 200.0;
        let mut local_maps = vec![(target.local)(t0)];
        for lb in resolved {
            let m = next_map(&local_maps, &lb.blocks, lb.level, target.omega_unit);
            local_maps.push(m);
        }
        let nxt = next_map(&local_maps, candidate, k, target.omega_unit);
        max_dev = max_dev.max(nxt.c[0].amax());
    }
    Ok(max_dev)
}

/// Propagate the synthesized HEOM and compare its system block with the
/// target map over the grid; returns the maximum operator deviation.
pub fn verify_synthesis(result: &SynthesisResult, target: &TargetDynamics, t_end: f64, steps: usize) -> Result<f64> {
    let model = result.to_model()?;
    let a = crate::models::vec_generator(&model.generator);
    let dt = t_end / steps as f64;
    let step = (a * dt).exp();
    let mut v = model.vec_initial();
    let mut max_dev = 0.0f64;
    for i in 0..=steps {
        let t = i as f64 * dt;
        let target_t = (target.local)(t).c[0];
        let mut dev = 0.0f64;
        for r in 0..4 {
            for c in 0..4 {
                dev = dev.max((v[4 * r + c] - target_t[(r, c)]).abs());
            }
        }
        max_dev = max_dev.max(dev);
        v = &step * v;
    }
    Ok(max_dev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{dephasing_z_terms, sigma_z, transfer_of_sandwich_sum, SandwichTerm};
    use approx::assert_abs_diff_eq;

    #[test]
    fn reviving_synthesis_depth_two_matches_printed_blocks() {
        let (g, w) = (0.7, 1.0);
        let target = target_reviving(g, w);
        let result = synthesize_heom(&target, 5).unwrap();
        assert!(result.terminated);
        assert_eq!(result.depth, 2);
        // level 1: 𝓛11 = (γ/2) 𝒟z, i.e. χ = diag(-γ, 0, 0, γ)/2
        let dz = transfer_of_sandwich_sum(&dephasing_z_terms(g / 2.0)).unwrap();
        assert_abs_diff_eq!(result.levels[0].blocks[0].0, dz.0, epsilon = 1e-9);
        // printed level-2 blocks are feasible under the derivative conditions
        let l21 = transfer_of_sandwich_sum(&dephasing_z_terms(w / 2.0)).unwrap();
        let l22 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(g, sigma_z())]).unwrap();
        let resid = level_residual(&target, &result.levels[0..1], &[l21, l22], true);
        assert!(resid <= 1e-10, "printed-block residual {resid}");
        // round trip
        let dev = verify_synthesis(&result, &target, 10.0 / w, 200).unwrap();
        assert!(dev <= 1e-8, "deviation {dev}");
    }

    #[test]
    fn generalized_synthesis_depth_three() {
        let (g, w, alpha) = (0.7, 1.0, 0.3);
        let target = target_generalized(g, w, alpha);
        let result = synthesize_heom(&target, 6).unwrap();
        assert!(result.terminated);
        assert_eq!(result.depth, 3);
        // printed triple 𝓛31 = 0, 𝓛32 = ω(1-2α) σz·σz, 𝓛33 = γ σz·σz is feasible
        let zero = PauliTransfer::zero();
        let l32 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(w * (1.0 - 2.0 * alpha), sigma_z())]).unwrap();
        let l33 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(g, sigma_z())]).unwrap();
        let resid = level_residual(&target, &result.levels[0..2], &[zero, l32, l33], true);
        assert!(resid <= 1e-10, "printed-block residual {resid}");
        let dev = verify_synthesis(&result, &target, 10.0 / w, 200).unwrap();
        assert!(dev <= 1e-8, "deviation {dev}");
    }

    #[test]
    fn jaynes_cummings_synthesis_depth_three_overdamped() {
        // ζ > 2γ keeps α real; the closed form covers both regimes
        let (g, z) = (0.5, 3.0);
        let target = target_jaynes_cummings(g, z);
        let result = synthesize_heom(&target, 6).unwrap();
        assert!(result.terminated);
        assert_eq!(result.depth, 3);
        let dev = verify_synthesis(&result, &target, 10.0 / z, 200).unwrap();
        assert!(dev <= 1e-8, "deviation {dev}");
        // underdamped regime too
        let target = target_jaynes_cummings(2.0, 1.0);
        let result = synthesize_heom(&target, 6).unwrap();
        assert_eq!(result.depth, 3);
        let dev = verify_synthesis(&result, &target, 10.0, 200).unwrap();
        assert!(dev <= 1e-8, "deviation {dev}");
    }

    #[test]
    fn perturbed_generator_detected() {
        let (g, w) = (0.7, 1.0);
        let target = target_reviving(g, w);
        let mut result = synthesize_heom(&target, 5).unwrap();
        // nudge one coefficient
        let mut t = result.levels[0].blocks[0].clone();
        t.0[(1, 1)] += 1e-3;
        result.levels[0].blocks[0] = t;
        let dev = verify_synthesis(&result, &target, 10.0 / w, 200).unwrap();
        assert!(dev > 1e-4, "deviation {dev} should grow above 1e-4");
    }
}
