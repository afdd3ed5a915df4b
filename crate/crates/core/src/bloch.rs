//! Bloch-coordinate representations of qubit states, superoperators and
//! process matrices.
//!
//! A qubit operator is represented by the real 4-vector `b[j] = tr(σ_j ρ)`
//! with `σ_0 = I`. A Hermiticity-preserving superoperator then acts as a
//! real 4×4 transfer matrix `T[j][k] = ½ tr(σ_j Λ(σ_k))`, and a map `Λ` has
//! the sandwich expansion `Λρ = Σ_ij χ_ij σ_i ρ σ_j†` with Hermitian
//! coefficient matrix `χ`. The map is completely positive exactly when
//! `χ ⪰ 0`.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector4};
use num_complex::Complex64 as C64;

use crate::{Error, Result};

pub type CMat2 = Matrix2<C64>;
pub type CMat4 = Matrix4<C64>;

/// Tolerance on imaginary parts when a transfer matrix must be real.
pub const HERMITICITY_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `σ_0 = I`.
pub fn sigma0() -> CMat2 {
    CMat2::identity()
}

pub fn sigma_x() -> CMat2 {
    CMat2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn sigma_y() -> CMat2 {
    CMat2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn sigma_z() -> CMat2 {
    CMat2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// `σ_+ = (σ_x + iσ_y)/2`.
pub fn sigma_plus() -> CMat2 {
    CMat2::new(c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.))
}

/// `σ_- = (σ_x - iσ_y)/2`.
pub fn sigma_minus() -> CMat2 {
    CMat2::new(c(0., 0.), c(0., 0.), c(1., 0.), c(0., 0.))
}

/// The Pauli basis `[σ_0, σ_x, σ_y, σ_z]` in the index order used throughout.
pub fn paulis() -> [CMat2; 4] {
    [sigma0(), sigma_x(), sigma_y(), sigma_z()]
}

/// Bloch vector of a qubit operator, `b[j] = tr(σ_j ρ)`.
///
/// Physical density operators have `b[0] = 1` and `|b⃗| ≤ 1`; hierarchy
/// auxiliary operators are typically traceless (`b[0] = 0`) and carry no
/// purity bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector(pub Vector4<f64>);

impl BlochVector {
    pub fn from_operator(rho: &CMat2) -> Self {
        let p = paulis();
        let mut b = Vector4::zeros();
        for (j, sj) in p.iter().enumerate() {
            let t = (sj * rho).trace();
            b[j] = t.re;
        }
        BlochVector(b)
    }

    pub fn to_operator(&self) -> CMat2 {
        let p = paulis();
        let mut rho = CMat2::zeros();
        for (j, sj) in p.iter().enumerate() {
            rho += sj.scale(self.0[j] / 2.0);
        }
        rho
    }

    /// `true` when the vector describes a density operator: unit trace and
    /// Bloch norm at most one (within `tol`).
    pub fn is_state(&self, tol: f64) -> bool {
        (self.0[0] - 1.0).abs() <= tol
            && self.0.fixed_rows::<3>(1).norm_squared() <= 1.0 + tol
    }
}

/// One term `c · A ρ B†` of a superoperator in sandwich form.
#[derive(Debug, Clone)]
pub struct SandwichTerm {
    pub coeff: C64,
    pub left: CMat2,
    pub right: CMat2,
}

impl SandwichTerm {
    pub fn new(coeff: C64, left: CMat2, right: CMat2) -> Self {
        SandwichTerm { coeff, left, right }
    }

    /// `c · A ρ A†` with the same operator on both sides.
    pub fn conjugation(coeff: f64, op: CMat2) -> Self {
        SandwichTerm::new(c(coeff, 0.0), op, op)
    }
}

/// Sandwich terms of the commutator generator `-i[H, ρ]`.
pub fn commutator_terms(h: CMat2) -> Vec<SandwichTerm> {
    vec![
        SandwichTerm::new(c(0., -1.), h, sigma0()),
        SandwichTerm::new(c(0., 1.), sigma0(), h),
    ]
}

/// Sandwich terms of the anti-commutator `{A, ρ}`.
pub fn anticommutator_terms(a: CMat2) -> Vec<SandwichTerm> {
    vec![
        SandwichTerm::new(c(1., 0.), a, sigma0()),
        SandwichTerm::new(c(1., 0.), sigma0(), a),
    ]
}

/// Sandwich terms of the Lindblad dissipator
/// `rate · (L ρ L† − ½{L†L, ρ})`.
pub fn lindblad_terms(l: CMat2, rate: f64) -> Vec<SandwichTerm> {
    let ldl = l.adjoint() * l;
    vec![
        SandwichTerm::new(c(rate, 0.), l, l),
        SandwichTerm::new(c(-rate / 2.0, 0.), ldl, sigma0()),
        SandwichTerm::new(c(-rate / 2.0, 0.), sigma0(), ldl),
    ]
}

/// Sandwich terms of the dephasing generator `𝒟_z ρ = σ_z ρ σ_z − ρ`.
pub fn dephasing_z_terms(scale: f64) -> Vec<SandwichTerm> {
    vec![
        SandwichTerm::conjugation(scale, sigma_z()),
        SandwichTerm::conjugation(-scale, sigma0()),
    ]
}

/// Real 4×4 transfer matrix of a Hermiticity-preserving qubit superoperator,
/// `T[j][k] = ½ tr(σ_j Λ(σ_k))`. Composition of maps is matrix product and
/// the identity map is the identity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTransfer(pub Matrix4<f64>);

impl PauliTransfer {
    pub fn identity() -> Self {
        PauliTransfer(Matrix4::identity())
    }

    pub fn zero() -> Self {
        PauliTransfer(Matrix4::zeros())
    }

    pub fn scale(&self, s: f64) -> Self {
        PauliTransfer(self.0 * s)
    }

    /// Apply the map to a Bloch vector.
    pub fn apply(&self, b: &BlochVector) -> BlochVector {
        BlochVector(self.0 * b.0)
    }

    pub fn compose(&self, other: &PauliTransfer) -> PauliTransfer {
        PauliTransfer(self.0 * other.0)
    }
}

/// Transfer matrix of a sum of sandwich terms.
///
/// Rejects superoperators that are not Hermiticity-preserving: those leave
/// imaginary parts above [`HERMITICITY_TOL`] in the transfer entries.
pub fn transfer_of_sandwich_sum(terms: &[SandwichTerm]) -> Result<PauliTransfer> {
    let p = paulis();
    let mut t = Matrix4::zeros();
    let mut max_im = 0.0f64;
    for (j, sj) in p.iter().enumerate() {
        for (k, sk) in p.iter().enumerate() {
            let mut entry = C64::new(0.0, 0.0);
            for term in terms {
                let m = sj * term.left * sk * term.right.adjoint();
                entry += term.coeff * m.trace() * 0.5;
            }
            max_im = max_im.max(entry.im.abs());
            t[(j, k)] = entry.re;
        }
    }
    if max_im > HERMITICITY_TOL {
        return Err(Error::NotHermiticityPreserving(max_im));
    }
    Ok(PauliTransfer(t))
}

/// Hermitian 4×4 process matrix `χ` of a qubit map in the Pauli sandwich
/// basis, `Λρ = Σ_ij χ_ij σ_i ρ σ_j†`. The map is completely positive iff
/// `χ ⪰ 0`; the identity map has `χ = diag(1,0,0,0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiMatrix(pub CMat4);

impl ChiMatrix {
    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.0 - self.0.adjoint();
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Real eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vector4<f64> {
        let se = self.0.symmetric_eigen();
        let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Vector4::from_iterator(ev)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Eigenvalues of `χ` restricted to the orthogonal complement of
    /// `trivial` (columns spanning a common-kernel subspace), ascending.
    pub fn eigenvalues_on_complement(&self, trivial: &DMatrix<C64>) -> Vec<f64> {
        if trivial.ncols() == 0 {
            return self.eigenvalues().iter().copied().collect();
        }
        // orthonormal complement via full SVD of the projector
        let mut proj = DMatrix::<C64>::identity(4, 4);
        let qr = trivial.clone().qr();
        let q = qr.q();
        proj -= &q * q.adjoint();
        let svd = proj.svd(true, false);
        let u = svd.u.unwrap();
        let keep: Vec<usize> = (0..4).filter(|&i| svd.singular_values[i] > 0.5).collect();
        let mut comp = DMatrix::<C64>::zeros(4, keep.len());
        for (cidx, &i) in keep.iter().enumerate() {
            comp.set_column(cidx, &u.column(i));
        }
        let chi_d = DMatrix::<C64>::from_fn(4, 4, |i, j| self.0[(i, j)]);
        let reduced = comp.adjoint() * chi_d * &comp;
        let se = reduced.symmetric_eigen();
        let mut ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

fn chi_basis_index(i: usize, j: usize) -> usize {
    4 * i + j
}

/// The 16×16 real linear map from the Hermitian parametrization of `χ`
/// (4 diagonal entries, 6 real parts, 6 imaginary parts of the upper
/// triangle) to the 16 transfer entries. Computed once per call; callers on
/// hot paths hold on to [`ChiTransferMap`].
pub struct ChiTransferMap {
    fwd: DMatrix<f64>,
    inv: DMatrix<f64>,
}

/// Hermitian parameter order: `χ_00..χ_33`, then `Re χ_ij` (i<j row-major),
/// then `Im χ_ij`.
fn hermitian_basis() -> Vec<CMat4> {
    let mut basis = Vec::with_capacity(16);
    for i in 0..4 {
        let mut m = CMat4::zeros();
        m[(i, i)] = c(1., 0.);
        basis.push(m);
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut m = CMat4::zeros();
            m[(i, j)] = c(1., 0.);
            m[(j, i)] = c(1., 0.);
            basis.push(m);
        }
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            let mut m = CMat4::zeros();
            m[(i, j)] = c(0., 1.);
            m[(j, i)] = c(0., -1.);
            basis.push(m);
        }
    }
    basis
}

impl ChiTransferMap {
    pub fn new() -> Self {
        let p = paulis();
        let basis = hermitian_basis();
        let mut fwd = DMatrix::<f64>::zeros(16, 16);
        for (col, chi_b) in basis.iter().enumerate() {
            // transfer of the basis element
            for (a, sa) in p.iter().enumerate() {
                for (b, sb) in p.iter().enumerate() {
                    let mut entry = C64::new(0., 0.);
                    for i in 0..4 {
                        for j in 0..4 {
                            if chi_b[(i, j)] != C64::new(0., 0.) {
                                let m = sa * p[i] * sb * p[j].adjoint();
                                entry += chi_b[(i, j)] * m.trace() * 0.5;
                            }
                        }
                    }
                    fwd[(chi_basis_index(a, b), col)] = entry.re;
                }
            }
        }
        let inv = fwd
            .clone()
            .try_inverse()
            .expect("chi/transfer correspondence is a bijection");
        ChiTransferMap { fwd, inv }
    }

    /// The unique Hermitian `χ` whose sandwich sum realizes the transfer `T`.
    pub fn chi_of_transfer(&self, t: &PauliTransfer) -> ChiMatrix {
        let tv = DVector::from_fn(16, |k, _| t.0[(k / 4, k % 4)]);
        let params = &self.inv * tv;
        let basis = hermitian_basis();
        let mut chi = CMat4::zeros();
        for (k, b) in basis.iter().enumerate() {
            chi += b.scale(params[k]);
        }
        ChiMatrix(chi)
    }

    /// Transfer matrix of a map given by its process matrix.
    pub fn transfer_of_chi(&self, chi: &ChiMatrix) -> PauliTransfer {
        // project chi onto the Hermitian parameter vector
        let mut params = DVector::zeros(16);
        for i in 0..4 {
            params[i] = chi.0[(i, i)].re;
        }
        let mut k = 4;
        for i in 0..4 {
            for j in (i + 1)..4 {
                params[k] = chi.0[(i, j)].re;
                k += 1;
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                params[k] = chi.0[(i, j)].im;
                k += 1;
            }
        }
        let tv = &self.fwd * params;
        let mut t = Matrix4::zeros();
        for idx in 0..16 {
            t[(idx / 4, idx % 4)] = tv[idx];
        }
        PauliTransfer(t)
    }
}

impl Default for ChiTransferMap {
    fn default() -> Self {
        Self::new()
    }
}

/// Convenience wrapper building the conversion map on the fly.
pub fn chi_of_transfer(t: &PauliTransfer) -> ChiMatrix {
    ChiTransferMap::new().chi_of_transfer(t)
}

pub fn transfer_of_chi(chi: &ChiMatrix) -> PauliTransfer {
    ChiTransferMap::new().transfer_of_chi(chi)
}

/// Elementary symmetric polynomial `e_k` of the eigenvalues of a Hermitian
/// matrix, computed from power traces via Newton's identities, so the result
/// is polynomial in the matrix entries. `e_r` equals the determinant.
pub fn elementary_symmetric(m: &DMatrix<C64>, k: usize) -> Result<f64> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::Dimension("elementary_symmetric needs a square matrix".into()));
    }
    if k == 0 || k > n {
        return Err(Error::Argument(format!("k = {k} out of range 1..={n}")));
    }
    // power sums p_j = tr(M^j)
    let mut pow = m.clone();
    let mut p = vec![0.0f64; k + 1];
    p[1] = pow.trace().re;
    for j in 2..=k {
        pow = &pow * m;
        p[j] = pow.trace().re;
    }
    // k e_k = sum_{i=1..k} (-1)^{i-1} e_{k-i} p_i
    let mut e = vec![0.0f64; k + 1];
    e[0] = 1.0;
    for j in 1..=k {
        let mut acc = 0.0;
        let mut sign = 1.0;
        for i in 1..=j {
            acc += sign * e[j - i] * p[i];
            sign = -sign;
        }
        e[j] = acc / j as f64;
    }
    Ok(e[k])
}

/// Real `(4n)×(4n)` generator of the extended dynamical map in stacked Bloch
/// coordinates, assembled from per-level transfer blocks.
#[derive(Debug, Clone)]
pub struct ExtendedGenerator {
    pub n_levels: usize,
    pub mat: DMatrix<f64>,
}

impl ExtendedGenerator {
    pub fn dim(&self) -> usize {
        4 * self.n_levels
    }

    pub fn block(&self, i: usize, j: usize) -> Matrix4<f64> {
        let mut b = Matrix4::zeros();
        for r in 0..4 {
            for cidx in 0..4 {
                b[(r, cidx)] = self.mat[(4 * i + r, 4 * j + cidx)];
            }
        }
        b
    }
}

/// Assemble the extended generator `𝓛` from an `n×n` grid of transfer
/// blocks (`blocks[(i, j)]` is `𝓛_ij`, zero-indexed; absent entries are
/// zero blocks).
pub fn assemble_extended_generator(
    n: usize,
    blocks: &[((usize, usize), PauliTransfer)],
) -> Result<ExtendedGenerator> {
    if n == 0 {
        return Err(Error::Argument("need at least one hierarchy level".into()));
    }
    let mut mat = DMatrix::<f64>::zeros(4 * n, 4 * n);
    for ((i, j), t) in blocks {
        if *i >= n || *j >= n {
            return Err(Error::Dimension(format!(
                "block ({i}, {j}) outside {n}-level hierarchy"
            )));
        }
        for r in 0..4 {
            for cidx in 0..4 {
                mat[(4 * i + r, 4 * j + cidx)] += t.0[(r, cidx)];
            }
        }
    }
    Ok(ExtendedGenerator { n_levels: n, mat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_sandwich_gives_identity_transfer() {
        let t = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(1.0, sigma0())]).unwrap();
        assert_abs_diff_eq!(t.0, Matrix4::identity(), epsilon = 1e-14);
    }

    #[test]
    fn dephasing_transfer_matches_brute_force() {
        // D_z rho = sz rho sz - rho -> diag(0, -2, -2, 0)
        let t = transfer_of_sandwich_sum(&dephasing_z_terms(1.0)).unwrap();
        let expected = Matrix4::from_diagonal(&Vector4::new(0.0, -2.0, -2.0, 0.0));
        assert_abs_diff_eq!(t.0, expected, epsilon = 1e-14);
    }

    #[test]
    fn amplitude_damping_transfer() {
        // D_- rho = s- rho s+ - {s+s-, rho}/2
        let t = transfer_of_sandwich_sum(&lindblad_terms(sigma_minus(), 1.0)).unwrap();
        let mut expected = Matrix4::zeros();
        expected[(1, 1)] = -0.5;
        expected[(2, 2)] = -0.5;
        expected[(3, 3)] = -1.0;
        expected[(3, 0)] = -1.0;
        assert_abs_diff_eq!(t.0, expected, epsilon = 1e-14);
    }

    #[test]
    fn non_hermiticity_preserving_rejected() {
        // a single lopsided term sx rho sy is not Hermiticity-preserving
        let terms = [SandwichTerm::new(C64::new(1.0, 0.0), sigma_x(), sigma_y())];
        assert!(matches!(
            transfer_of_sandwich_sum(&terms),
            Err(Error::NotHermiticityPreserving(_))
        ));
    }

    #[test]
    fn chi_of_identity_map() {
        let chi = chi_of_transfer(&PauliTransfer::identity());
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == 0 && j == 0 { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(chi.0[(i, j)].re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(chi.0[(i, j)].im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn chi_transfer_round_trip() {
        let map = ChiTransferMap::new();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let t = PauliTransfer(Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
            let chi = map.chi_of_transfer(&t);
            assert!(chi.hermiticity_residual() < 1e-12);
            let back = map.transfer_of_chi(&chi);
            assert_abs_diff_eq!(t.0, back.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn chi_of_dephasing_channel_is_psd() {
        // full dephasing: rho -> (rho + sz rho sz)/2, transfer diag(1,0,0,1)
        let t = PauliTransfer(Matrix4::from_diagonal(&Vector4::new(1.0, 0.0, 0.0, 1.0)));
        let chi = chi_of_transfer(&t);
        assert!(chi.min_eigenvalue() >= -1e-12);
        // amplitude damping channel, p = 0.3
        let p: f64 = 0.3;
        let q = (1.0 - p).sqrt();
        let mut ad = Matrix4::zeros();
        ad[(0, 0)] = 1.0;
        ad[(1, 1)] = q;
        ad[(2, 2)] = q;
        ad[(3, 3)] = 1.0 - p;
        ad[(3, 0)] = p;
        let chi = chi_of_transfer(&PauliTransfer(ad));
        assert!(chi.min_eigenvalue() >= -1e-12);
        // unitary (x rotation by 0.7)
        let a = 0.7f64;
        let mut u = Matrix4::identity();
        u[(2, 2)] = a.cos();
        u[(3, 3)] = a.cos();
        u[(2, 3)] = -a.sin();
        u[(3, 2)] = a.sin();
        let chi = chi_of_transfer(&PauliTransfer(u));
        assert!(chi.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn composition_is_matrix_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t1 = PauliTransfer(Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let t2 = PauliTransfer(Matrix4::from_fn(|_, _| rng.gen_range(-1.0..1.0)));
        let composed = t1.compose(&t2);
        assert_abs_diff_eq!(composed.0, t1.0 * t2.0, epsilon = 1e-14);
    }

    #[test]
    fn elementary_symmetric_against_eigen_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            // random Hermitian 4x4
            let raw = CMat4::from_fn(|_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = (raw + raw.adjoint()).scale(0.5);
            let hd = DMatrix::from_fn(4, 4, |i, j| h[(i, j)]);
            let se = h.symmetric_eigen();
            let ev: Vec<f64> = se.eigenvalues.iter().copied().collect();
            for k in 1..=4 {
                // brute-force subset sums as the oracle
                let mut oracle = 0.0f64;
                let idx: Vec<usize> = (0..4).collect();
                for mask in 0u32..16 {
                    if mask.count_ones() as usize != k {
                        continue;
                    }
                    let mut prod = 1.0;
                    for &i in &idx {
                        if mask & (1 << i) != 0 {
                            prod *= ev[i];
                        }
                    }
                    oracle += prod;
                }
                let got = elementary_symmetric(&hd, k).unwrap();
                let scale = oracle.abs().max(1.0);
                assert!(
                    (got - oracle).abs() / scale < 1e-9,
                    "e_{k}: got {got}, oracle {oracle}"
                );
            }
        }
    }

    #[test]
    fn elementary_symmetric_identity_cases() {
        let chi0 = DMatrix::from_fn(4, 4, |i, j| {
            if i == 0 && j == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        assert_abs_diff_eq!(elementary_symmetric(&chi0, 1).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(elementary_symmetric(&chi0, 2).unwrap(), 0.0, epsilon = 1e-14);
        let id = DMatrix::<C64>::identity(4, 4);
        assert_abs_diff_eq!(elementary_symmetric(&id, 2).unwrap(), 6.0, epsilon = 1e-12);
        assert!(elementary_symmetric(&id, 5).is_err());
        assert!(elementary_symmetric(&id, 0).is_err());
    }

    #[test]
    fn assemble_generator_single_dephasing_block() {
        // gamma/2 D_z scaled by 2 -> diag(0, -gamma, -gamma, 0) with gamma = 1
        let t = transfer_of_sandwich_sum(&dephasing_z_terms(0.5)).unwrap();
        let gen = assemble_extended_generator(1, &[((0, 0), t)]).unwrap();
        let expected = Matrix4::from_diagonal(&Vector4::new(0.0, -1.0, -1.0, 0.0));
        assert_abs_diff_eq!(gen.block(0, 0), expected, epsilon = 1e-14);
    }
}
