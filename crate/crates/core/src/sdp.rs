//! A small dense semidefinite-program solver.
//!
//! Problems have the linear-matrix-inequality form
//! `min cᵀx  s.t.  F0_b + Σ_i x_i F_i,b ⪰ 0` per block, with optional
//! equality constraints `Ax = b` (eliminated in a presolve step). The
//! solver is a log-barrier path-following method with damped Newton steps
//! and a phase-1 stage for strictly feasible starts. Every solution is
//! meant to be re-verified by direct eigenvalue checks on the caller side;
//! solver status alone is never trusted for certification.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct SdpBlock {
    pub f0: DMatrix<f64>,
    pub fs: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub c: DVector<f64>,
    pub blocks: Vec<SdpBlock>,
    pub eq_a: Option<DMatrix<f64>>,
    pub eq_b: Option<DVector<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DVector<f64>,
    pub objective: f64,
    pub status: SdpStatus,
    /// Minimum eigenvalue over all blocks at the returned point.
    pub min_block_eig: f64,
    /// Equality residual `‖Ax − b‖_∞` (zero when no equalities).
    pub eq_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpTolerances {
    pub gap: f64,
    pub psd: f64,
    pub eq: f64,
    pub max_newton: usize,
}

impl Default for SdpTolerances {
    fn default() -> Self {
        SdpTolerances { gap: 1e-9, psd: 1e-9, eq: 1e-10, max_newton: 400 }
    }
}

fn sym_min_eig(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()).scale(0.5);
    s.symmetric_eigen().eigenvalues.min()
}

/// Orthonormal nullspace basis of a wide matrix via the symmetric
/// eigendecomposition of `AᵀA`.
pub fn nullspace(a: &DMatrix<f64>) -> DMatrix<f64> {
    let p = a.ncols();
    let ata = a.transpose() * a;
    let se = ata.symmetric_eigen();
    let scale = se.eigenvalues.amax().max(1e-300);
    let keep: Vec<usize> = (0..p).filter(|&i| se.eigenvalues[i] <= 1e-20 * scale).collect();
    let mut n = DMatrix::<f64>::zeros(p, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        n.set_column(c, &se.eigenvectors.column(i));
    }
    n
}

/// Direct positive-semidefiniteness check via symmetric eigendecomposition.
/// Fails on matrices that are asymmetric beyond 1e-12 relative.
pub fn check_psd(m: &DMatrix<f64>, tol: f64) -> Result<(bool, f64)> {
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * m.amax().max(1.0) {
        return Err(Error::Argument(format!("matrix asymmetric by {asym:.3e}")));
    }
    let min = sym_min_eig(m);
    Ok((min >= -tol, min))
}

struct Lmi<'a> {
    c: DVector<f64>,
    blocks: &'a [SdpBlock],
    block_scale: Vec<f64>,
}

impl<'a> Lmi<'a> {
    fn s_of(&self, x: &DVector<f64>, b: usize) -> DMatrix<f64> {
        let blk = &self.blocks[b];
        let mut s = blk.f0.clone();
        for (i, f) in blk.fs.iter().enumerate() {
            if x[i] != 0.0 {
                s += f * x[i];
            }
        }
        s / self.block_scale[b]
    }

    fn barrier(&self, x: &DVector<f64>, t: f64) -> f64 {
        let mut v = t * self.c.dot(x);
        for b in 0..self.blocks.len() {
            let s = self.s_of(x, b);
            match s.cholesky() {
                Some(ch) => {
                    let l = ch.l();
                    for i in 0..l.nrows() {
                        let d = l[(i, i)];
                        if d <= 0.0 {
                            return f64::INFINITY;
                        }
                        v -= 2.0 * d.ln();
                    }
                }
                None => return f64::INFINITY,
            }
        }
        v
    }

    fn min_eig(&self, x: &DVector<f64>) -> f64 {
        (0..self.blocks.len())
            .map(|b| sym_min_eig(&self.s_of(x, b)) * self.block_scale[b])
            .fold(f64::INFINITY, f64::min)
    }
}

/// Newton minimization of the barrier at fixed path parameter `t`.
/// Returns the final Newton decrement, or `None` on a hard numerical
/// failure.
fn newton(lmi: &Lmi, x: &mut DVector<f64>, t: f64, iters: usize) -> Option<f64> {
    let p = x.len();
    let debug = std::env::var("HEOM_SDP_DEBUG2").is_ok();
    let mut last = f64::INFINITY;
    for it in 0..iters {
        let mut g = &lmi.c * t;
        let mut h = DMatrix::<f64>::zeros(p, p);
        for b in 0..lmi.blocks.len() {
            let s = lmi.s_of(x, b);
            let Some(ch) = s.clone().cholesky() else { return None };
            let w = ch.inverse();
            let scale = 1.0 / lmi.block_scale[b];
            let gs: Vec<DMatrix<f64>> = lmi.blocks[b]
                .fs
                .iter()
                .map(|f| &w * (f * scale))
                .collect();
            for (i, gi) in gs.iter().enumerate() {
                g[i] -= gi.trace();
                for (j, gj) in gs.iter().enumerate().skip(i) {
                    let mut acc = 0.0;
                    for a in 0..gi.nrows() {
                        for bb in 0..gi.ncols() {
                            acc += gi[(a, bb)] * gj[(bb, a)];
                        }
                    }
                    h[(i, j)] += acc;
                    if i != j {
                        h[(j, i)] = h[(i, j)];
                    }
                }
            }
        }
        // Jacobi-equilibrated, ridge-stabilized solve
        let dscale = DVector::from_fn(p, |i, _| h[(i, i)].abs().sqrt().max(1e-150));
        let mut hs = h.clone();
        let mut gs = g.clone();
        for i in 0..p {
            gs[i] /= dscale[i];
            for j in 0..p {
                hs[(i, j)] /= dscale[i] * dscale[j];
            }
        }
        let mut ridge = 0.0;
        let base = hs.trace().abs() / p as f64;
        let dx = loop {
            let hr = &hs + DMatrix::identity(p, p) * ridge;
            if let Some(ch) = hr.cholesky() {
                let mut dxs = ch.solve(&(-&gs));
                for i in 0..p {
                    dxs[i] /= dscale[i];
                }
                break dxs;
            }
            ridge = if ridge == 0.0 { 1e-13 * base.max(1e-300) } else { ridge * 100.0 };
            if ridge > 1e8 * base.max(1.0) {
                return None;
            }
        };
        // Newton decrement is dimensionless for the self-concordant barrier
        let lam2 = -g.dot(&dx);
        if debug && (it < 3 || it % 10 == 0) {
            eprintln!("    newton it={it} t={t:.1e} lam2={lam2:.3e}");
        }
        if !lam2.is_finite() || lam2 <= 0.0 {
            return Some(last.min(0.0).abs());
        }
        last = lam2;
        if lam2 / 2.0 < 1e-10 {
            return Some(lam2);
        }
        let f0 = lmi.barrier(x, t);
        let mut step = if lam2 > 1.0 { 1.0 / (1.0 + lam2.sqrt()) } else { 1.0 };
        let mut moved = false;
        for _ in 0..80 {
            let xn = x.clone() + &dx * step;
            let fn_ = lmi.barrier(&xn, t);
            if fn_ <= f0 - 0.25 * step * lam2 {
                *x = xn;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            if debug {
                eprintln!("    newton stall at t={t:.1e} lam2={lam2:.3e}");
            }
            return Some(lam2);
        }
    }
    Some(last)
}

/// Barrier path-following on a pure LMI problem from a strictly feasible
/// start.
fn solve_lmi(
    c: &DVector<f64>,
    blocks: &[SdpBlock],
    x0: &DVector<f64>,
    tol: &SdpTolerances,
) -> Option<DVector<f64>> {
    let block_scale: Vec<f64> = blocks
        .iter()
        .map(|b| {
            let m = b.f0.amax().max(b.fs.iter().map(|f| f.amax()).fold(0.0, f64::max));
            m.max(1e-12)
        })
        .collect();
    let lmi = Lmi { c: c.clone(), blocks, block_scale };
    let mut x = x0.clone();
    if lmi.barrier(&x, 1.0).is_infinite() {
        return None;
    }
    let total_dim: usize = blocks.iter().map(|b| b.f0.nrows()).sum();
    let cscale = c.amax().max(1e-12);
    let mut t = (1.0 / cscale).max(1e-8);
    let mut stalled = 0usize;
    for _ in 0..200 {
        let Some(dec) = newton(&lmi, &mut x, t, tol.max_newton) else {
            return Some(x);
        };
        // only follow the path while centered; ramping an uncentered point
        // loses it for good
        if dec > 0.5 {
            stalled += 1;
            if stalled > 10 {
                return Some(x);
            }
            continue;
        }
        stalled = 0;
        if (total_dim as f64) / t < tol.gap * cscale.max(1.0) {
            break;
        }
        t *= 10.0;
        if t > 1e20 {
            break;
        }
    }
    Some(x)
}

/// Solve the SDP. Equalities are eliminated through a nullspace
/// parametrization; a phase-1 stage produces a strictly feasible start when
/// the zero vector is not one.
pub fn solve(problem: &SdpProblem, tol: &SdpTolerances) -> Result<SdpSolution> {
    let p = problem.c.len();
    for (bi, b) in problem.blocks.iter().enumerate() {
        if b.fs.len() != p {
            return Err(Error::Dimension(format!(
                "block {bi} has {} coefficient matrices for {p} variables",
                b.fs.len()
            )));
        }
    }
    // presolve equalities
    let (x_part, nullbasis) = match (&problem.eq_a, &problem.eq_b) {
        (Some(a), Some(b)) => {
            let svd = a.clone().svd(true, true);
            let xp = svd
                .solve(b, 1e-12)
                .map_err(|e| Error::Sdp(format!("equality presolve: {e}")))?;
            if (a * &xp - b).amax() > tol.eq.max(1e-9) * b.amax().max(1.0) {
                return Ok(SdpSolution {
                    x: xp,
                    objective: f64::NAN,
                    status: SdpStatus::Infeasible,
                    min_block_eig: f64::NEG_INFINITY,
                    eq_residual: f64::INFINITY,
                });
            }
            (xp, Some(nullspace(a)))
        }
        _ => (DVector::zeros(p), None),
    };
    // reduced problem in z: x = x_part + N z
    let (cz, blocks_z, back): (DVector<f64>, Vec<SdpBlock>, Box<dyn Fn(&DVector<f64>) -> DVector<f64>>) =
        match &nullbasis {
            Some(n) => {
                let cz = n.transpose() * &problem.c;
                let blocks_z = problem
                    .blocks
                    .iter()
                    .map(|b| {
                        let mut f0 = b.f0.clone();
                        for (i, f) in b.fs.iter().enumerate() {
                            if x_part[i] != 0.0 {
                                f0 += f * x_part[i];
                            }
                        }
                        let fs = (0..n.ncols())
                            .map(|k| {
                                let mut acc = DMatrix::zeros(b.f0.nrows(), b.f0.ncols());
                                for (i, f) in b.fs.iter().enumerate() {
                                    if n[(i, k)] != 0.0 {
                                        acc += f * n[(i, k)];
                                    }
                                }
                                acc
                            })
                            .collect();
                        SdpBlock { f0, fs }
                    })
                    .collect();
                let xp = x_part.clone();
                let nn = n.clone();
                (cz, blocks_z, Box::new(move |z: &DVector<f64>| &xp + &nn * z))
            }
            None => (
                problem.c.clone(),
                problem.blocks.clone(),
                Box::new(|z: &DVector<f64>| z.clone()),
            ),
        };
    let pz = cz.len();
    // strictly feasible start
    let zero = DVector::zeros(pz);
    let lmi_probe = Lmi {
        c: cz.clone(),
        blocks: &blocks_z,
        block_scale: vec![1.0; blocks_z.len()],
    };
    let start = if lmi_probe.min_eig(&zero) > 1e-9 {
        Some(zero)
    } else {
        phase1(&blocks_z, pz, tol)
    };
    let Some(z0) = start else {
        return Ok(SdpSolution {
            x: back(&DVector::zeros(pz)),
            objective: f64::NAN,
            status: SdpStatus::Infeasible,
            min_block_eig: f64::NEG_INFINITY,
            eq_residual: 0.0,
        });
    };
    let zsol = solve_lmi(&cz, &blocks_z, &z0, tol);
    let Some(z) = zsol else {
        return Ok(SdpSolution {
            x: back(&z0),
            objective: f64::NAN,
            status: SdpStatus::NumericalFailure,
            min_block_eig: lmi_probe.min_eig(&z0),
            eq_residual: 0.0,
        });
    };
    let x = back(&z);
    let min_eig = lmi_probe.min_eig(&z);
    let eq_residual = match (&problem.eq_a, &problem.eq_b) {
        (Some(a), Some(b)) => (a * &x - b).amax(),
        _ => 0.0,
    };
    let status = if min_eig >= -tol.psd && eq_residual <= tol.eq.max(1e-9) {
        SdpStatus::Optimal
    } else {
        SdpStatus::NumericalFailure
    };
    Ok(SdpSolution { objective: problem.c.dot(&x), x, status, min_block_eig: min_eig, eq_residual })
}

/// Phase 1: minimize `s` over `(z, s)` with every block shifted by `s·I`;
/// stops as soon as a strictly feasible `z` is found.
fn phase1(blocks: &[SdpBlock], p: usize, tol: &SdpTolerances) -> Option<DVector<f64>> {
    phase1_margin(blocks, p, tol).map(|(z, _)| z)
}

/// Phase 1 with the achieved margin: returns a point maximizing the
/// uniform block margin (in per-block-scaled units) and that margin.
pub(crate) fn phase1_margin(
    blocks: &[SdpBlock],
    p: usize,
    tol: &SdpTolerances,
) -> Option<(DVector<f64>, f64)> {
    let block_scale: Vec<f64> = blocks
        .iter()
        .map(|b| b.f0.amax().max(b.fs.iter().map(|f| f.amax()).fold(0.0, f64::max)).max(1e-12))
        .collect();
    // augmented problem with variable s appended; cap block keeps s bounded
    let mut aug_blocks: Vec<SdpBlock> = blocks
        .iter()
        .zip(&block_scale)
        .map(|(b, &sc)| {
            let d = b.f0.nrows();
            let mut fs: Vec<DMatrix<f64>> = b.fs.iter().map(|f| f / sc).collect();
            fs.push(DMatrix::identity(d, d));
            SdpBlock { f0: &b.f0 / sc, fs }
        })
        .collect();
    let s_cap = 1e6;
    aug_blocks.push(SdpBlock {
        f0: DMatrix::from_element(1, 1, s_cap),
        fs: {
            let mut v = vec![DMatrix::zeros(1, 1); p];
            v.push(DMatrix::from_element(1, 1, 1.0));
            v
        },
    });
    let mut c = DVector::zeros(p + 1);
    c[p] = 1.0;
    // start: z = 0, s large enough to clear every scaled block strictly
    let lmi0 = Lmi { c: c.clone(), blocks, block_scale: block_scale.clone() };
    let mut s0 = 1.0f64;
    for (b, &sc) in blocks.iter().zip(&block_scale) {
        let me = sym_min_eig(&(&b.f0 / sc));
        s0 = s0.max(1.0 - me);
        let _ = b;
    }
    let mut x = DVector::zeros(p + 1);
    x[p] = s0;
    let lmi = Lmi { c: c.clone(), blocks: &aug_blocks, block_scale: vec![1.0; aug_blocks.len()] };
    if lmi.barrier(&x, 1.0).is_infinite() {
        x[p] = x[p].abs() * 100.0 + 100.0;
        if lmi.barrier(&x, 1.0).is_infinite() {
            return None;
        }
    }
    let mut t = 1.0;
    for _ in 0..60 {
        if newton(&lmi, &mut x, t, 50).is_none() {
            break;
        }
        if std::env::var("HEOM_SDP_DEBUG").is_ok() {
            eprintln!("phase1: t={t:.1e} s={:.4e}", x[p]);
        }
        // feasible sets squeezed onto thin slack-relaxed faces only admit
        // tiny negative margins, so keep ramping until s settles
        if x[p] < -1e-7 {
            break;
        }
        t *= 10.0;
        if t > 1e16 {
            break;
        }
        let _ = tol;
    }
    if x[p] >= 0.0 {
        return None;
    }
    let z = x.rows(0, p).into_owned();
    if lmi0.min_eig(&z) > 0.0 {
        Some((z, -x[p]))
    } else {
        None
    }
}

/// JSON round-trip schema for debugging dumps (matrices row-major).
#[derive(Serialize, Deserialize)]
pub struct SdpProblemDump {
    pub c: Vec<f64>,
    pub blocks: Vec<BlockDump>,
    pub eq_a: Option<Vec<Vec<f64>>>,
    pub eq_b: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
pub struct BlockDump {
    pub dim: usize,
    pub f0: Vec<f64>,
    pub fs: Vec<Vec<f64>>,
}

impl SdpProblem {
    pub fn dump(&self) -> SdpProblemDump {
        SdpProblemDump {
            c: self.c.iter().copied().collect(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDump {
                    dim: b.f0.nrows(),
                    f0: row_major(&b.f0),
                    fs: b.fs.iter().map(row_major).collect(),
                })
                .collect(),
            eq_a: self.eq_a.as_ref().map(|a| {
                (0..a.nrows())
                    .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
                    .collect()
            }),
            eq_b: self.eq_b.as_ref().map(|b| b.iter().copied().collect()),
        }
    }

    pub fn load(dump: &SdpProblemDump) -> Result<SdpProblem> {
        let p = dump.c.len();
        let blocks = dump
            .blocks
            .iter()
            .map(|b| {
                let f0 = from_row_major(&b.f0, b.dim)?;
                let fs = b
                    .fs
                    .iter()
                    .map(|f| from_row_major(f, b.dim))
                    .collect::<Result<Vec<_>>>()?;
                if fs.len() != p {
                    return Err(Error::Dimension("coefficient count mismatch".into()));
                }
                Ok(SdpBlock { f0, fs })
            })
            .collect::<Result<Vec<_>>>()?;
        let eq_a = dump
            .eq_a
            .as_ref()
            .map(|rows| {
                let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
                DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
            });
        let eq_b = dump.eq_b.as_ref().map(|b| DVector::from_vec(b.clone()));
        Ok(SdpProblem { c: DVector::from_vec(dump.c.clone()), blocks, eq_a, eq_b })
    }
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..r * c).map(|k| m[(k / c, k % c)]).collect()
}

fn from_row_major(v: &[f64], dim: usize) -> Result<DMatrix<f64>> {
    if v.len() != dim * dim {
        return Err(Error::Dimension("matrix data length mismatch".into()));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| v[dim * i + j]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn scalar_bound() {
        // min v s.t. v >= 0
        let problem = SdpProblem {
            c: DVector::from_vec(vec![1.0]),
            blocks: vec![SdpBlock {
                f0: DMatrix::zeros(1, 1),
                fs: vec![DMatrix::identity(1, 1)],
            }],
            eq_a: None,
            eq_b: None,
        };
        let sol = solve(&problem, &SdpTolerances::default()).unwrap();
        assert!(sol.objective.abs() < 1e-7, "v = {}", sol.objective);
    }

    #[test]
    fn constructed_optimum_recovered() {
        // min <c, x> with x forced near a constructed feasible point:
        // block: diag(x1, x2) - known_psd >= 0 with objective x1 + x2:
        // optimum at x = diag of known matrix.
        let d1 = 0.7;
        let d2 = 1.9;
        let problem = SdpProblem {
            c: DVector::from_vec(vec![1.0, 1.0]),
            blocks: vec![SdpBlock {
                f0: DMatrix::from_row_slice(2, 2, &[-d1, 0.0, 0.0, -d2]),
                fs: vec![
                    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
                    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
                ],
            }],
            eq_a: None,
            eq_b: None,
        };
        let sol = solve(&problem, &SdpTolerances::default()).unwrap();
        assert!(sol.status == SdpStatus::Optimal);
        assert!((sol.objective - (d1 + d2)).abs() < 1e-6, "objective {}", sol.objective);
    }

    #[test]
    fn equality_constraints_respected() {
        // min x1 s.t. x1 + x2 = 2, diag(x1, x2) >= 0
        let problem = SdpProblem {
            c: DVector::from_vec(vec![1.0, 0.0]),
            blocks: vec![SdpBlock {
                f0: DMatrix::zeros(2, 2),
                fs: vec![
                    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]),
                    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]),
                ],
            }],
            eq_a: Some(DMatrix::from_row_slice(1, 2, &[1.0, 1.0])),
            eq_b: Some(DVector::from_vec(vec![2.0])),
        };
        let sol = solve(&problem, &SdpTolerances::default()).unwrap();
        assert!(sol.eq_residual < 1e-9);
        assert!(sol.objective.abs() < 1e-6);
        assert_abs_diff_eq!(sol.x[0] + sol.x[1], 2.0, epsilon = 1e-9);
    }

    #[test]
    fn infeasible_detected() {
        // -I - x * 0 >= 0 is infeasible
        let problem = SdpProblem {
            c: DVector::from_vec(vec![1.0]),
            blocks: vec![SdpBlock {
                f0: -DMatrix::<f64>::identity(2, 2),
                fs: vec![DMatrix::zeros(2, 2)],
            }],
            eq_a: None,
            eq_b: None,
        };
        let sol = solve(&problem, &SdpTolerances::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Infeasible);
    }

    #[test]
    fn scale_invariance() {
        let mk = |s: f64| SdpProblem {
            c: DVector::from_vec(vec![1.0, 1.0]),
            blocks: vec![SdpBlock {
                f0: DMatrix::from_row_slice(2, 2, &[-0.7, 0.1, 0.1, -1.9]).scale(s),
                fs: vec![
                    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]).scale(s),
                    DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]).scale(s),
                ],
            }],
            eq_a: None,
            eq_b: None,
        };
        let a = solve(&mk(1.0), &SdpTolerances::default()).unwrap();
        let b = solve(&mk(1e3), &SdpTolerances::default()).unwrap();
        let rel = (&a.x - &b.x).amax() / a.x.amax().max(1.0);
        assert!(rel <= 1e-6, "scale sensitivity {rel}");
    }

    #[test]
    fn check_psd_cases() {
        let id = DMatrix::<f64>::identity(3, 3);
        let (ok, me) = check_psd(&id, 1e-9).unwrap();
        assert!(ok);
        assert_abs_diff_eq!(me, 1.0, epsilon = 1e-12);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1e-6]);
        let (ok, me) = check_psd(&m, 1e-9).unwrap();
        assert!(!ok);
        assert_abs_diff_eq!(me, -1e-6, epsilon = 1e-12);
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(check_psd(&asym, 1e-9).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let problem = SdpProblem {
            c: DVector::from_vec(vec![1.0, -2.0]),
            blocks: vec![SdpBlock {
                f0: DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 2.0]),
                fs: vec![DMatrix::identity(2, 2), DMatrix::zeros(2, 2)],
            }],
            eq_a: None,
            eq_b: None,
        };
        let dump = problem.dump();
        let text = serde_json::to_string(&dump).unwrap();
        let loaded = SdpProblem::load(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(loaded.c, problem.c);
        assert_eq!(loaded.blocks[0].f0, problem.blocks[0].f0);
    }
}
