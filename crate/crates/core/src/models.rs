//! The built-in HEOM models and their reduced coordinate systems.
//!
//! Each builder assembles the extended generator term by term from sandwich
//! operators. `reduced_system` exposes the few scalar coordinates that
//! govern the process matrix: for the built-in models these are the
//! parametrizations with printed reduced generators, cross-checked against
//! the full dynamics at construction time; user-defined models go through
//! the generic Krylov reduction.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, Matrix4};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::bloch::{
    anticommutator_terms, assemble_extended_generator, commutator_terms, dephasing_z_terms,
    lindblad_terms, paulis, sigma0, sigma_minus, sigma_plus, sigma_x, sigma_y, sigma_z,
    transfer_of_sandwich_sum, ChiTransferMap, ExtendedGenerator, PauliTransfer, SandwichTerm,
};
use crate::poly::{Poly, PolyC};
use crate::{Error, Result};

/// A HEOM instance: generator, initial extended map, parameters.
#[derive(Debug, Clone)]
pub struct HeomModel {
    pub name: String,
    pub n_levels: usize,
    pub parameters: BTreeMap<String, f64>,
    pub generator: ExtendedGenerator,
    /// Stacked transfer matrices of the initial extended map; the default
    /// corresponds to `Λ_1(0) = I`, `Λ_{i≥2}(0) = 0`.
    pub initial_extended_map: DMatrix<f64>,
    /// Reference frequency fixing the time unit (`ω` or `ζ` per model).
    pub reference_rate: f64,
}

impl HeomModel {
    pub fn param(&self, name: &str) -> Result<f64> {
        self.parameters
            .get(name)
            .copied()
            .ok_or_else(|| Error::MissingParameter(name.into()))
    }

    fn identity_initial(n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(4 * n, 4);
        for i in 0..4 {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Row-major vectorization of the stacked extended map.
    pub fn vec_initial(&self) -> DVector<f64> {
        vec_map(&self.initial_extended_map)
    }
}

pub fn vec_map(m: &DMatrix<f64>) -> DVector<f64> {
    let (r, c) = m.shape();
    DVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unvec_map(v: &DVector<f64>, rows: usize) -> DMatrix<f64> {
    let cols = v.len() / rows;
    DMatrix::from_fn(rows, cols, |i, j| v[cols * i + j])
}

/// Generator of vec(Λ) under `Λ̇ = 𝓛 Λ` for the row-major vectorization.
pub fn vec_generator(gen: &ExtendedGenerator) -> DMatrix<f64> {
    let n = gen.dim();
    let mut a = DMatrix::zeros(4 * n, 4 * n);
    for i in 0..n {
        for j in 0..n {
            let g = gen.mat[(i, j)];
            if g == 0.0 {
                continue;
            }
            for c in 0..4 {
                a[(4 * i + c, 4 * j + c)] = g;
            }
        }
    }
    a
}

fn get(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::MissingParameter(key.into()))
}

fn require_positive(name: &str, v: f64) -> Result<f64> {
    if v <= 0.0 {
        return Err(Error::Argument(format!("{name} must be positive, got {v}")));
    }
    Ok(v)
}

/// Build one of the five built-in models.
///
/// Names and parameters:
/// - `jaynes_cummings`: `gamma`, `zeta`
/// - `reviving_2level`: `gamma1`, `gamma2`, `omega`, `alpha`, optional
///   `flat_init` (nonzero selects `ϱ_2(0) = -𝓛_11 ϱ_1(0)`)
/// - `reviving_3level`: `gamma`, `omega`, `alpha`, `beta`
/// - `bath`: `gamma_plus`, `gamma_minus`, `omega`, `xi`
/// - `spin_boson`: `omega`, `gamma`, `delta`, `beta`
pub fn build_model(name: &str, params: &BTreeMap<String, f64>) -> Result<HeomModel> {
    match name {
        "jaynes_cummings" => jaynes_cummings(get(params, "gamma")?, get(params, "zeta")?),
        "reviving_2level" => reviving_2level(
            get(params, "gamma1")?,
            get(params, "gamma2")?,
            get(params, "omega")?,
            get(params, "alpha")?,
            params.get("flat_init").copied().unwrap_or(0.0) != 0.0,
        ),
        "reviving_3level" => reviving_3level(
            get(params, "gamma")?,
            get(params, "omega")?,
            get(params, "alpha")?,
            get(params, "beta")?,
        ),
        "bath" => bath(
            get(params, "gamma_plus")?,
            get(params, "gamma_minus")?,
            get(params, "omega")?,
            get(params, "xi")?,
        ),
        "spin_boson" => spin_boson(
            get(params, "omega")?,
            get(params, "gamma")?,
            get(params, "delta")?,
            get(params, "beta")?,
        ),
        other => Err(Error::UnknownModel(other.into())),
    }
}

/// Damped resonant Jaynes–Cummings HEOM (three levels).
///
/// `ϱ̇_1 = ζ ϱ_2`,
/// `ϱ̇_2 = γ 𝒟_- ϱ_1 + ζ Σ_{i=x,y,z} σ_i ϱ_2 σ_i + ζ ϱ_3`,
/// `ϱ̇_3 = (γ/2) Σ_{i=x,y} σ_i ϱ_2 σ_i − 2ζ σ_z ϱ_3 σ_z`.
pub fn jaynes_cummings(gamma: f64, zeta: f64) -> Result<HeomModel> {
    let dm = transfer_of_sandwich_sum(&lindblad_terms(sigma_minus(), 1.0))?;
    let s_all = transfer_of_sandwich_sum(&[
        SandwichTerm::conjugation(1.0, sigma_x()),
        SandwichTerm::conjugation(1.0, sigma_y()),
        SandwichTerm::conjugation(1.0, sigma_z()),
    ])?;
    let s_xy = transfer_of_sandwich_sum(&[
        SandwichTerm::conjugation(1.0, sigma_x()),
        SandwichTerm::conjugation(1.0, sigma_y()),
    ])?;
    let s_zz = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(1.0, sigma_z())])?;
    let generator = assemble_extended_generator(
        3,
        &[
            ((0, 1), PauliTransfer::identity().scale(zeta)),
            ((1, 0), dm.scale(gamma)),
            ((1, 1), s_all.scale(zeta)),
            ((1, 2), PauliTransfer::identity().scale(zeta)),
            ((2, 1), s_xy.scale(gamma / 2.0)),
            ((2, 2), s_zz.scale(-2.0 * zeta)),
        ],
    )?;
    Ok(HeomModel {
        name: "jaynes_cummings".into(),
        n_levels: 3,
        parameters: [("gamma".to_string(), gamma), ("zeta".to_string(), zeta)].into(),
        generator,
        initial_extended_map: HeomModel::identity_initial(3),
        reference_rate: zeta.abs().max(f64::MIN_POSITIVE),
    })
}

/// Two-level reviving-coherence HEOM.
///
/// `ϱ̇_1 = (γ_1/2) 𝒟_z ϱ_1 + ω ϱ_2`,
/// `ϱ̇_2 = αω 𝒟_z ϱ_1 + γ_2 σ_z ϱ_2 σ_z`.
/// With `flat_init` the auxiliary operator starts at `-𝓛_11 ϱ_1(0)`,
/// removing the initially linear coherence decay.
pub fn reviving_2level(
    gamma1: f64,
    gamma2: f64,
    omega: f64,
    alpha: f64,
    flat_init: bool,
) -> Result<HeomModel> {
    require_positive("omega", omega)?;
    let dz = transfer_of_sandwich_sum(&dephasing_z_terms(1.0))?;
    let s_zz = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(1.0, sigma_z())])?;
    let generator = assemble_extended_generator(
        2,
        &[
            ((0, 0), dz.scale(gamma1 / 2.0)),
            ((0, 1), PauliTransfer::identity().scale(omega)),
            ((1, 0), dz.scale(alpha * omega)),
            ((1, 1), s_zz.scale(gamma2)),
        ],
    )?;
    let mut initial = HeomModel::identity_initial(2);
    if flat_init {
        // Λ_2(0) = -𝓛_11 = -(γ1/2) 𝒟_z
        let l11 = dz.scale(-gamma1 / 2.0);
        for r in 0..4 {
            for c in 0..4 {
                initial[(4 + r, c)] = l11.0[(r, c)];
            }
        }
    }
    Ok(HeomModel {
        name: "reviving_2level".into(),
        n_levels: 2,
        parameters: [
            ("gamma1".to_string(), gamma1),
            ("gamma2".to_string(), gamma2),
            ("omega".to_string(), omega),
            ("alpha".to_string(), alpha),
            ("flat_init".to_string(), if flat_init { 1.0 } else { 0.0 }),
        ]
        .into(),
        generator,
        initial_extended_map: initial,
        reference_rate: omega,
    })
}

/// Three-level extension of the reviving-coherence HEOM with equal damping
/// `γ` on all levels; the third level couples through `βω σ_z · σ_z`.
pub fn reviving_3level(gamma: f64, omega: f64, alpha: f64, beta: f64) -> Result<HeomModel> {
    require_positive("omega", omega)?;
    let dz = transfer_of_sandwich_sum(&dephasing_z_terms(1.0))?;
    let s_zz = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(1.0, sigma_z())])?;
    let generator = assemble_extended_generator(
        3,
        &[
            ((0, 0), dz.scale(gamma / 2.0)),
            ((0, 1), PauliTransfer::identity().scale(omega)),
            ((1, 0), dz.scale(alpha * omega)),
            ((1, 1), s_zz.scale(gamma)),
            ((1, 2), PauliTransfer::identity().scale(omega)),
            ((2, 1), s_zz.scale(beta * omega)),
            ((2, 2), s_zz.scale(gamma)),
        ],
    )?;
    Ok(HeomModel {
        name: "reviving_3level".into(),
        n_levels: 3,
        parameters: [
            ("gamma".to_string(), gamma),
            ("omega".to_string(), omega),
            ("alpha".to_string(), alpha),
            ("beta".to_string(), beta),
        ]
        .into(),
        generator,
        initial_extended_map: HeomModel::identity_initial(3),
        reference_rate: omega,
    })
}

/// Finite-temperature bath HEOM: a thermal Lindblad pair `𝓑_± ` extended by a
/// traceless auxiliary level.
///
/// `ϱ̇_1 = (𝓑_+ + 𝓑_-) ϱ_1 + ω ϱ_2`,
/// `ϱ̇_2 = (ξ/γ_p)(𝓑_+ + 𝓑_-) ϱ_1 + (γ_p/2)(𝒟_x + 𝒟_y) ϱ_2`,
/// with `γ_p = (γ_+ + γ_-)/2`. These rate conventions are fixed by the
/// reduced dynamics: they make the four-coordinate generator and the
/// process-matrix structure of this model hold exactly.
pub fn bath(gamma_plus: f64, gamma_minus: f64, omega: f64, xi: f64) -> Result<HeomModel> {
    require_positive("gamma_plus", gamma_plus)?;
    require_positive("gamma_minus", gamma_minus)?;
    if gamma_plus == gamma_minus {
        return Err(Error::Argument(
            "bath model needs gamma_plus != gamma_minus (gamma_m enters denominators)".into(),
        ));
    }
    let gam_p = (gamma_plus + gamma_minus) / 2.0;
    let mut b_terms = lindblad_terms(sigma_plus(), gamma_plus);
    b_terms.extend(lindblad_terms(sigma_minus(), gamma_minus));
    let b = transfer_of_sandwich_sum(&b_terms)?;
    let dxy = transfer_of_sandwich_sum(&[
        SandwichTerm::conjugation(1.0, sigma_x()),
        SandwichTerm::conjugation(-1.0, sigma0()),
        SandwichTerm::conjugation(1.0, sigma_y()),
        SandwichTerm::conjugation(-1.0, sigma0()),
    ])?;
    let generator = assemble_extended_generator(
        2,
        &[
            ((0, 0), b.clone()),
            ((0, 1), PauliTransfer::identity().scale(omega)),
            ((1, 0), b.scale(xi / gam_p)),
            ((1, 1), dxy.scale(gam_p / 2.0)),
        ],
    )?;
    Ok(HeomModel {
        name: "bath".into(),
        n_levels: 2,
        parameters: [
            ("gamma_plus".to_string(), gamma_plus),
            ("gamma_minus".to_string(), gamma_minus),
            ("omega".to_string(), omega),
            ("xi".to_string(), xi),
        ]
        .into(),
        generator,
        initial_extended_map: HeomModel::identity_initial(2),
        reference_rate: omega.abs().max(gam_p),
    })
}

/// High-temperature spin-Boson HEOM (two levels).
///
/// `ϱ̇_1 = -i(ω/2)[σ_z, ϱ_1] - iΔ[σ_x, ϱ_2]`,
/// `ϱ̇_2 = -iΔ[σ_x, ϱ_1] - (Δβγ/2){σ_x, ϱ_1} - i(ω/2)[σ_z, ϱ_2] - γ ϱ_2`.
pub fn spin_boson(omega: f64, gamma: f64, delta: f64, beta: f64) -> Result<HeomModel> {
    require_positive("omega", omega)?;
    let hz = transfer_of_sandwich_sum(&commutator_terms(sigma_z()))?;
    let hx = transfer_of_sandwich_sum(&commutator_terms(sigma_x()))?;
    let ax = transfer_of_sandwich_sum(&anticommutator_terms(sigma_x()))?;
    let l21 = PauliTransfer(hx.0 * delta - ax.0 * (delta * beta * gamma / 2.0));
    let generator = assemble_extended_generator(
        2,
        &[
            ((0, 0), hz.scale(omega / 2.0)),
            ((0, 1), hx.scale(delta)),
            ((1, 0), l21),
            ((1, 1), PauliTransfer(hz.0 * (omega / 2.0) - Matrix4::identity() * gamma)),
        ],
    )?;
    Ok(HeomModel {
        name: "spin_boson".into(),
        n_levels: 2,
        parameters: [
            ("omega".to_string(), omega),
            ("gamma".to_string(), gamma),
            ("delta".to_string(), delta),
            ("beta".to_string(), beta),
        ]
        .into(),
        generator,
        initial_extended_map: HeomModel::identity_initial(2),
        reference_rate: omega,
    })
}

/// A positivity factor of `det χ` (or of the δ-shifted determinant), with
/// its multiplicity in the factorization.
#[derive(Debug, Clone)]
pub struct EhFactor {
    pub name: String,
    pub poly: Poly,
    pub multiplicity: u32,
}

/// Reduced coordinate dynamics of a model: `λ̇ = l λ` plus the maps linking
/// `λ` to the extended transfer stack and to the process matrix.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub model_name: String,
    pub dim: usize,
    pub l: DMatrix<f64>,
    pub lambda0: DVector<f64>,
    /// λ = extract_mat · vec(Λ) + extract_off
    pub extract_mat: DMatrix<f64>,
    pub extract_off: DVector<f64>,
    /// System block of the map from the reduced coordinates:
    /// vec(Λ_1) = embed_mat · features(λ) on the reachable trajectory, where
    /// `features` are the monomials listed in `embed_features`. (Auxiliary
    /// blocks are generally not polynomial in the printed coordinates.)
    pub embed_mat: DMatrix<f64>,
    pub embed_features: Vec<Poly>,
    /// Process matrix entries as polynomials in λ.
    pub chi_map: Vec<Vec<PolyC>>,
    /// Highest non-trivial elementary-symmetric index of χ over time.
    pub h: usize,
    /// `e_h(χ(λ))` as a polynomial in λ.
    pub eh_poly: Poly,
    /// Positivity factorization of `e_h` (single entry when no
    /// factorization applies).
    pub factors: Vec<EhFactor>,
    /// Positive prefactor relating `e_h` to the factor product.
    pub prefactor: f64,
    /// Reference rate inherited from the model.
    pub reference_rate: f64,
}

impl ReducedSystem {
    pub fn extract(&self, vec_map: &DVector<f64>) -> DVector<f64> {
        &self.extract_mat * vec_map + &self.extract_off
    }

    pub fn chi_at(&self, lambda: &DVector<f64>) -> crate::bloch::ChiMatrix {
        let mut m = crate::bloch::CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m[(i, j)] = self.chi_map[i][j].eval(lambda);
            }
        }
        crate::bloch::ChiMatrix(m)
    }

    /// Evaluate the on-trajectory system-block embedding λ → vec(Λ_1).
    pub fn embed(&self, lambda: &DVector<f64>) -> DVector<f64> {
        let feats = DVector::from_fn(self.embed_features.len(), |k, _| {
            self.embed_features[k].eval(lambda)
        });
        &self.embed_mat * feats
    }
}

fn affine_features(d: usize) -> Vec<Poly> {
    let mut f: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
    f.push(Poly::constant(d, 1.0));
    f
}

fn quadratic_features(d: usize) -> Vec<Poly> {
    let mut f = affine_features(d);
    for i in 0..d {
        for j in i..d {
            f.push(Poly::var(d, i).mul(&Poly::var(d, j)));
        }
    }
    f
}

/// Fit the system block `vec(Λ_1(t))` against feature monomials of `λ(t)`
/// over a probe grid; exact on the reachable set by construction of the
/// reduced coordinates.
fn fit_embedding(
    model: &HeomModel,
    l: &DMatrix<f64>,
    lambda0: &DVector<f64>,
    extract_mat: &DMatrix<f64>,
    extract_off: &DVector<f64>,
    features: &[Poly],
) -> Result<DMatrix<f64>> {
    let a = vec_generator(&model.generator);
    let v0 = model.vec_initial();
    let nt = 160;
    let t_end = 8.0 / model.reference_rate;
    let dt = t_end / nt as f64;
    let step = (a * dt).exp();
    let lstep = (l * dt).exp();
    let mut v = v0.clone();
    let mut lam = lambda0.clone();
    let nf = features.len();
    let raw_scale = v0.amax().max(1.0);
    let mut design = DMatrix::<f64>::zeros(nt + 1, nf);
    let mut target = DMatrix::<f64>::zeros(nt + 1, 16);
    for row in 0..=nt {
        for (k, f) in features.iter().enumerate() {
            design[(row, k)] = f.eval(&lam);
        }
        for j in 0..16 {
            target[(row, j)] = v[j];
        }
        // consistency of the extractor along the way
        let lam_check = extract_mat * &v + extract_off;
        if (&lam_check - &lam).amax() > 1e-7 * lam.amax().max(1.0) {
            return Err(Error::Reduction(format!(
                "extractor drifts from reduced dynamics by {:.3e}",
                (&lam_check - &lam).amax()
            )));
        }
        v = &step * v;
        lam = &lstep * lam;
    }
    // least squares per system-block component
    let solver = crate::linalg::Lstsq::new(&design, 1e-12);
    let mut w = DMatrix::<f64>::zeros(16, nf);
    for j in 0..16 {
        let col = target.column(j).into_owned();
        let sol = solver.solve(&col);
        for k in 0..nf {
            w[(j, k)] = sol[k];
        }
    }
    // residual check, relative to the largest data magnitude (unstable
    // models grow large entries)
    let data_scale = target.amax().max(raw_scale);
    let resid = (&design * w.transpose() - target).amax();
    if resid > 1e-8 * data_scale {
        return Err(Error::Reduction(format!(
            "embedding fit residual {resid:.3e} exceeds tolerance"
        )));
    }
    Ok(w)
}

/// Compose `chi_of_transfer` with the system block of the embedding,
/// yielding χ entries as polynomials in λ.
fn chi_map_from_embedding(embed_mat: &DMatrix<f64>, features: &[Poly]) -> Vec<Vec<PolyC>> {
    let d = features[0].nvars;
    let conv = ChiTransferMap::new();
    let mut chi: Vec<Vec<PolyC>> = vec![vec![PolyC::zero(d); 4]; 4];
    for (k, feat) in features.iter().enumerate() {
        // transfer slice of Λ1 for this feature
        let mut t = Matrix4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                t[(r, c)] = embed_mat[(4 * r + c, k)];
            }
        }
        let chi_k = conv.chi_of_transfer(&PauliTransfer(t));
        for i in 0..4 {
            for j in 0..4 {
                let z = chi_k.0[(i, j)];
                if z.re != 0.0 {
                    chi[i][j].re = chi[i][j].re.add(&feat.scale(z.re));
                }
                if z.im != 0.0 {
                    chi[i][j].im = chi[i][j].im.add(&feat.scale(z.im));
                }
            }
        }
    }
    // compress tiny fitted coefficients
    for row in chi.iter_mut() {
        for e in row.iter_mut() {
            e.re = e.re.compress(1e-11);
            e.im = e.im.compress(1e-11);
        }
    }
    chi
}

/// λ-index helper into vec(Λ): entry (level, row, col).
fn vidx(level: usize, row: usize, col: usize) -> usize {
    4 * (4 * level + row) + col
}

/// Reduce a model to the coordinates that govern complete positivity.
pub fn reduced_system(model: &HeomModel) -> Result<ReducedSystem> {
    match model.name.as_str() {
        "jaynes_cummings" => reduce_jaynes_cummings(model),
        "reviving_2level" => reduce_reviving2(model),
        "reviving_3level" => reduce_reviving3(model),
        "bath" => reduce_bath(model),
        "spin_boson" => reduce_spin_boson(model),
        _ => reduce_generic(model, 64),
    }
}

fn reduce_jaynes_cummings(model: &HeomModel) -> Result<ReducedSystem> {
    let gamma = model.param("gamma")?;
    let zeta = model.param("zeta")?;
    let l = DMatrix::from_row_slice(2, 2, &[0.0, zeta, -gamma / 2.0, -zeta]);
    let lambda0 = DVector::from_vec(vec![1.0, 0.0]);
    let mut e = DMatrix::zeros(2, 48);
    e[(0, vidx(0, 1, 1))] = 1.0; // λ1 = T1[x][x]
    e[(1, vidx(1, 1, 1))] = 1.0; // λ2 = T2[x][x]
    let e_off = DVector::zeros(2);
    let features = quadratic_features(2);
    let embed = fit_embedding(model, &l, &lambda0, &e, &e_off, &features)?;
    // χ structure: entries quadratic in λ1 only.
    let d = 2usize;
    let one = Poly::constant(d, 1.0);
    let l1 = Poly::var(d, 0);
    let l1sq = l1.mul(&l1);
    let q = |p: Poly| PolyC::from_re(p.scale(0.25));
    let qi = |p: Poly| PolyC { re: Poly::zero(d), im: p.scale(0.25) };
    let zero = PolyC::zero(d);
    let chi_map = vec![
        vec![
            q(l1.add(&one).mul(&l1.add(&one))),
            zero.clone(),
            zero.clone(),
            q(l1sq.sub(&one)),
        ],
        vec![
            zero.clone(),
            q(one.sub(&l1sq)),
            qi(one.sub(&l1sq)),
            zero.clone(),
        ],
        vec![
            zero.clone(),
            qi(l1sq.sub(&one)),
            q(one.sub(&l1sq)),
            zero.clone(),
        ],
        vec![
            q(l1sq.sub(&one)),
            zero.clone(),
            zero.clone(),
            q(l1.sub(&one).mul(&l1.sub(&one))),
        ],
    ];
    let h = 2;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-14);
    let factors = vec![EhFactor {
        name: "e_h".into(),
        poly: eh_poly.clone(),
        multiplicity: 1,
    }];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: 2,
        l,
        lambda0,
        extract_mat: e,
        extract_off: e_off,
        embed_mat: embed,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor: 1.0,
        reference_rate: model.reference_rate,
    })
}

fn reviving_chi_map(d: usize) -> Vec<Vec<PolyC>> {
    let one = Poly::constant(d, 1.0);
    let l1 = Poly::var(d, 0);
    let zero = PolyC::zero(d);
    let mut chi = vec![vec![zero; 4]; 4];
    chi[0][0] = PolyC::from_re(one.add(&l1).scale(0.5));
    chi[3][3] = PolyC::from_re(one.sub(&l1).scale(0.5));
    chi
}

fn reduce_reviving2(model: &HeomModel) -> Result<ReducedSystem> {
    let g1 = model.param("gamma1")?;
    let g2 = model.param("gamma2")?;
    let omega = model.param("omega")?;
    let alpha = model.param("alpha")?;
    let flat = model.param("flat_init")? != 0.0;
    let l = DMatrix::from_row_slice(2, 2, &[-g1, omega, -2.0 * alpha * omega, -g2]);
    let lambda0 = if flat {
        DVector::from_vec(vec![1.0, g1 / omega])
    } else {
        DVector::from_vec(vec![1.0, 0.0])
    };
    let mut e = DMatrix::zeros(2, 32);
    e[(0, vidx(0, 1, 1))] = 1.0;
    e[(1, vidx(1, 1, 1))] = 1.0;
    let e_off = DVector::zeros(2);
    let features = affine_features(2);
    let embed = fit_embedding(model, &l, &lambda0, &e, &e_off, &features)?;
    let chi_map = reviving_chi_map(2);
    let h = 2;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-14);
    let factors = vec![EhFactor { name: "e_h".into(), poly: eh_poly.clone(), multiplicity: 1 }];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: 2,
        l,
        lambda0,
        extract_mat: e,
        extract_off: e_off,
        embed_mat: embed,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor: 1.0,
        reference_rate: model.reference_rate,
    })
}

fn reduce_reviving3(model: &HeomModel) -> Result<ReducedSystem> {
    let g = model.param("gamma")?;
    let omega = model.param("omega")?;
    let alpha = model.param("alpha")?;
    let beta = model.param("beta")?;
    let l = DMatrix::from_row_slice(
        3,
        3,
        &[
            -g, omega, 0.0,
            -2.0 * alpha * omega, -g, omega,
            0.0, -beta * omega, -g,
        ],
    );
    let lambda0 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
    let mut e = DMatrix::zeros(3, 48);
    e[(0, vidx(0, 1, 1))] = 1.0;
    e[(1, vidx(1, 1, 1))] = 1.0;
    e[(2, vidx(2, 1, 1))] = 1.0;
    let e_off = DVector::zeros(3);
    let features = affine_features(3);
    let embed = fit_embedding(model, &l, &lambda0, &e, &e_off, &features)?;
    let chi_map = reviving_chi_map(3);
    let h = 2;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-14);
    let factors = vec![EhFactor { name: "e_h".into(), poly: eh_poly.clone(), multiplicity: 1 }];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: 3,
        l,
        lambda0,
        extract_mat: e,
        extract_off: e_off,
        embed_mat: embed,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor: 1.0,
        reference_rate: model.reference_rate,
    })
}

/// Derived thermal rates `γ_p = (γ_+ + γ_-)/2`, `γ_m = (γ_+ - γ_-)/2`.
pub fn bath_derived_rates(model: &HeomModel) -> Result<(f64, f64)> {
    let gp = model.param("gamma_plus")?;
    let gm = model.param("gamma_minus")?;
    Ok(((gp + gm) / 2.0, (gp - gm) / 2.0))
}

fn reduce_bath(model: &HeomModel) -> Result<ReducedSystem> {
    let gplus = model.param("gamma_plus")?;
    let gminus = model.param("gamma_minus")?;
    let omega = model.param("omega")?;
    let xi = model.param("xi")?;
    let (gam_p, gam_m) = bath_derived_rates(model)?;
    let l = -DMatrix::from_row_slice(
        4,
        4,
        &[
            2.0 * gam_p, -omega, 0.0, 0.0,
            2.0 * xi, 2.0 * gam_p, 0.0, 0.0,
            0.0, 0.0, gam_p, -omega,
            0.0, 0.0, xi, gam_p,
        ],
    );
    let lambda0 = DVector::from_vec(vec![-gam_m / gam_p, 0.0, 1.0, 0.0]);
    let mut e = DMatrix::zeros(4, 32);
    e[(0, vidx(0, 3, 0))] = 1.0; // λ1 = T1[z][0] - γm/γp
    e[(1, vidx(1, 3, 0))] = 1.0; // λ2 = T2[z][0]
    e[(2, vidx(0, 1, 1))] = 1.0; // λ3 = T1[x][x]
    e[(3, vidx(1, 1, 1))] = 1.0; // λ4 = T2[x][x]
    let mut e_off = DVector::zeros(4);
    e_off[0] = -gam_m / gam_p;
    let features = affine_features(4);
    let embed = fit_embedding(model, &l, &lambda0, &e, &e_off, &features)?;
    // χ structure: block (0,z) carries λ1, λ3; block (x,y) carries θ = γm + γp λ1.
    let d = 4usize;
    let l1 = Poly::var(d, 0);
    let l3 = Poly::var(d, 2);
    let theta = l1.scale(gam_p).add(&Poly::constant(d, gam_m));
    let zero = PolyC::zero(d);
    let mut chi_map = vec![vec![zero; 4]; 4];
    let diag_part = Poly::constant(d, gam_m).sub(&l1.scale(gam_p));
    chi_map[0][0] = PolyC::from_re(
        l3.scale(2.0 * gam_m).add(&diag_part).scale(1.0 / (4.0 * gam_m)),
    );
    chi_map[3][3] = PolyC::from_re(
        l3.scale(-2.0 * gam_m).add(&diag_part).scale(1.0 / (4.0 * gam_m)),
    );
    chi_map[0][3] = PolyC::from_re(theta.scale(1.0 / (4.0 * gam_p)));
    chi_map[3][0] = chi_map[0][3].clone();
    chi_map[1][1] = PolyC::from_re(theta.scale(1.0 / (4.0 * gam_m)));
    chi_map[2][2] = chi_map[1][1].clone();
    chi_map[1][2] = PolyC { re: Poly::zero(d), im: theta.scale(-1.0 / (4.0 * gam_p)) };
    chi_map[2][1] = chi_map[1][2].conj();
    let h = 4;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-16);
    // det χ = [γ+γ-/c2⁴] · P1² · P2 with c2 = γ-² - γ+²,
    // P1 = γp λ1 + γm,
    // P2 = c1 + (c3/4) λ1 + c4 λ1² − (c2²/4) λ3²,
    // c1 = γ+γ-γm², c3 = γ-⁴ − γ+⁴, c4 = γ+γ-γp².
    let c1 = gplus * gminus * gam_m * gam_m;
    let c2 = gminus * gminus - gplus * gplus;
    let c3 = gminus.powi(4) - gplus.powi(4);
    let c4 = gplus * gminus * gam_p * gam_p;
    let p1 = theta.clone();
    let p2 = Poly::constant(d, c1)
        .add(&l1.scale(c3 / 4.0))
        .add(&l1.mul(&l1).scale(c4))
        .sub(&l3.mul(&l3).scale(c2 * c2 / 4.0));
    let prefactor = gplus * gminus / c2.powi(4);
    let factors = vec![
        EhFactor { name: "P1".into(), poly: p1, multiplicity: 2 },
        EhFactor { name: "P2".into(), poly: p2, multiplicity: 1 },
    ];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: 4,
        l,
        lambda0,
        extract_mat: e,
        extract_off: e_off,
        embed_mat: embed,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor,
        reference_rate: model.reference_rate,
    })
}

/// The spin-Boson positivity factors. `P1 = P2` holds along trajectories
/// started from the identity map; with `δ > 0` the factors split.
pub fn spin_boson_factors(omega: f64, delta: f64, beta: f64, delta_min: f64) -> (Poly, Poly) {
    let d = 6usize;
    let v = |i: usize| Poly::var(d, i);
    let c = |x: f64| Poly::constant(d, x);
    let b = -beta * beta * omega * omega + 4.0;
    let l1 = v(0);
    let l2 = v(1);
    let l3 = v(2);
    let l4 = v(3);
    let l6 = v(5);
    // P1 = -4β²Δ²λ4² - 4β²Δω(λ6-1)λ4 - (λ6-2)λ6(β²ω²-4) - 4(λ1-λ3)² + b
    let p1 = l4
        .mul(&l4)
        .scale(-4.0 * beta * beta * delta * delta)
        .add(&l6.sub(&c(1.0)).mul(&l4).scale(-4.0 * beta * beta * delta * omega))
        .add(&l6.sub(&c(2.0)).mul(&l6).scale(-(beta * beta * omega * omega - 4.0)))
        .add(&l1.sub(&l3).mul(&l1.sub(&l3)).scale(-4.0))
        .add(&c(b));
    // P2 = -4[4λ2² + (λ1+λ3)² - (λ6+1)²] - [2βΔλ4 + βω(λ6-1)]²
    let bracket = l4.scale(2.0 * beta * delta).add(&l6.sub(&c(1.0)).scale(beta * omega));
    let p2 = l2
        .mul(&l2)
        .scale(4.0)
        .add(&l1.add(&l3).mul(&l1.add(&l3)))
        .sub(&l6.add(&c(1.0)).mul(&l6.add(&c(1.0))))
        .scale(-4.0)
        .sub(&bracket.mul(&bracket));
    if delta_min == 0.0 {
        (p1, p2)
    } else {
        // P'1 = P1 + 32δ(1 + 2δ - λ6), P'2 = P2 + 32δ(1 + 2δ + λ6)
        let shift = 32.0 * delta_min;
        let base = c(1.0 + 2.0 * delta_min);
        (
            p1.add(&base.sub(&v(5)).scale(shift)),
            p2.add(&base.add(&v(5)).scale(shift)),
        )
    }
}

fn reduce_spin_boson(model: &HeomModel) -> Result<ReducedSystem> {
    let omega = model.param("omega")?;
    let gamma = model.param("gamma")?;
    let delta = model.param("delta")?;
    let beta = model.param("beta")?;
    let l = DMatrix::from_row_slice(
        6,
        6,
        &[
            0.0, omega, 0.0, 0.0, 0.0, 0.0,
            0.0, 0.0, -omega, 0.0, 0.0, 0.0,
            gamma, 4.0 * delta * delta / omega + omega, -gamma, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, -gamma, -omega, 0.0,
            0.0, 0.0, 0.0, omega, -gamma, -2.0 * delta,
            0.0, 0.0, 0.0, 0.0, 2.0 * delta, 0.0,
        ],
    );
    let lambda0 = DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    let mut e = DMatrix::zeros(6, 32);
    e[(0, vidx(0, 1, 1))] = 1.0; // λ1 = T1[x][x]
    e[(1, vidx(0, 1, 2))] = 1.0; // λ2 = T1[x][y]
    e[(2, vidx(0, 2, 2))] = 1.0; // λ3 = T1[y][y]
    e[(3, vidx(1, 1, 3))] = 1.0; // λ4 = T2[x][z]
    e[(4, vidx(1, 2, 3))] = 1.0; // λ5 = T2[y][z]
    e[(5, vidx(0, 3, 3))] = 1.0; // λ6 = T1[z][z]
    let e_off = DVector::zeros(6);
    let features = affine_features(6);
    let embed = fit_embedding(model, &l, &lambda0, &e, &e_off, &features)?;
    let chi_map = chi_map_from_embedding(&embed, &features);
    let h = 4;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-13);
    let (p1, p2) = spin_boson_factors(omega, delta, beta, 0.0);
    let factors = vec![
        EhFactor { name: "P1".into(), poly: p1, multiplicity: 1 },
        EhFactor { name: "P2".into(), poly: p2, multiplicity: 1 },
    ];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: 6,
        l,
        lambda0,
        extract_mat: e,
        extract_off: e_off,
        embed_mat: embed,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor: 1.0 / 4096.0,
        reference_rate: model.reference_rate,
    })
}

/// Generic reduction for user-defined models: the reachable Krylov subspace
/// of vec(Λ(0)) under the vectorized generator, orthonormalized with rank
/// tolerance 1e-10.
pub fn reduce_generic(model: &HeomModel, dim_cap: usize) -> Result<ReducedSystem> {
    let a = vec_generator(&model.generator);
    let v0 = model.vec_initial();
    let n = v0.len();
    let scale = a.amax().max(1.0);
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut frontier = vec![v0.clone()];
    let tol = 1e-10;
    while let Some(v) = frontier.pop() {
        let mut w = v.clone();
        for b in &basis {
            let c = b.dot(&w);
            w -= b * c;
        }
        let norm = w.norm();
        if norm > tol * v.norm().max(1.0) {
            let b = w / norm;
            frontier.push((&a * &b) / scale);
            basis.push(b);
            if basis.len() > dim_cap {
                return Err(Error::Reduction(format!(
                    "reachable subspace exceeds the configured cap of {dim_cap}; \
                     falling back to full dimension is not implemented for certification"
                )));
            }
        }
    }
    let d = basis.len();
    let mut w = DMatrix::<f64>::zeros(n, d);
    for (k, b) in basis.iter().enumerate() {
        w.set_column(k, b);
    }
    let l = w.transpose() * &a * &w;
    let lambda0 = w.transpose() * &v0;
    // invariance check
    let resid = (&a * &w - &w * &l).amax();
    if resid > 1e-8 * scale {
        return Err(Error::Reduction(format!(
            "Krylov subspace not invariant (residual {resid:.3e})"
        )));
    }
    let features: Vec<Poly> = (0..d).map(|i| Poly::var(d, i)).collect();
    let chi_map = chi_map_from_embedding(&w, &features);
    // h is detected by the propagator for generic models; default to the
    // dimension-4 determinant here and let callers override.
    let h = 4;
    let eh_poly = crate::poly::elementary_symmetric_poly(&chi_map, h).compress(1e-16);
    let factors = vec![EhFactor { name: "e_h".into(), poly: eh_poly.clone(), multiplicity: 1 }];
    Ok(ReducedSystem {
        model_name: model.name.clone(),
        dim: d,
        l,
        lambda0,
        extract_mat: w.transpose(),
        extract_off: DVector::zeros(d),
        embed_mat: w,
        embed_features: features,
        chi_map,
        h,
        eh_poly,
        factors,
        prefactor: 1.0,
        reference_rate: model.reference_rate,
    })
}

/// Positivity factorization of `e_h(χ(+δI))`.
///
/// For `bath` and `spin_boson` the determinant factors into the printed
/// polynomials; other models return the single polynomial `e_h`. A positive
/// `delta_min` shifts the spectrum: the spin-Boson factors take their
/// primed form, the bath factors become the δ-shifted block determinants.
pub fn eh_factorization(model: &HeomModel, delta_min: f64) -> Result<Vec<EhFactor>> {
    if delta_min < 0.0 {
        return Err(Error::Argument("delta_min must be nonnegative".into()));
    }
    let reduced = reduced_system(model)?;
    if delta_min == 0.0 {
        return Ok(reduced.factors);
    }
    match model.name.as_str() {
        "spin_boson" => {
            let omega = model.param("omega")?;
            let delta = model.param("delta")?;
            let beta = model.param("beta")?;
            let (p1, p2) = spin_boson_factors(omega, delta, beta, delta_min);
            Ok(vec![
                EhFactor { name: "P1'".into(), poly: p1, multiplicity: 1 },
                EhFactor { name: "P2'".into(), poly: p2, multiplicity: 1 },
            ])
        }
        "bath" => {
            // δ-shifted block determinants of χ + δI, scaled to reduce to
            // P1², P2 at δ = 0.
            let (gam_p, gam_m) = bath_derived_rates(model)?;
            let gplus = model.param("gamma_plus")?;
            let gminus = model.param("gamma_minus")?;
            let d = 4usize;
            let chi = &reduced.chi_map;
            let dl = Poly::constant(d, delta_min);
            // block (x,y): (χ11+δ)(χ22+δ) − |χ12|²
            let bxy = chi[1][1]
                .re
                .add(&dl)
                .mul(&chi[2][2].re.add(&dl))
                .sub(&chi[1][2].re.mul(&chi[1][2].re))
                .sub(&chi[1][2].im.mul(&chi[1][2].im));
            // block (0,z)
            let b0z = chi[0][0]
                .re
                .add(&dl)
                .mul(&chi[3][3].re.add(&dl))
                .sub(&chi[0][3].re.mul(&chi[0][3].re))
                .sub(&chi[0][3].im.mul(&chi[0][3].im));
            let s1 = 16.0 * gam_m * gam_m * gam_p * gam_p / (gplus * gminus);
            let s2 = 16.0 * gam_m * gam_m * gam_p * gam_p;
            Ok(vec![
                EhFactor { name: "B_xy'".into(), poly: bxy.scale(s1), multiplicity: 1 },
                EhFactor { name: "B_0z'".into(), poly: b0z.scale(s2), multiplicity: 1 },
            ])
        }
        _ => {
            // e_h(χ + δI) for rank-h structure: recompute from the shifted map
            let mut chi = reduced.chi_map.clone();
            for (i, row) in chi.iter_mut().enumerate() {
                let _ = i;
                for _ in row.iter() {}
            }
            for i in 0..4 {
                chi[i][i].re = chi[i][i].re.add(&Poly::constant(reduced.dim, delta_min));
            }
            let eh = crate::poly::elementary_symmetric_poly(&chi, reduced.h).compress(1e-16);
            Ok(vec![EhFactor { name: "e_h'".into(), poly: eh, multiplicity: 1 }])
        }
    }
}

/// JSON schema for user-defined HEOMs.
#[derive(Debug, Serialize, Deserialize)]
pub struct ModelSpec {
    pub levels: usize,
    pub blocks: Vec<BlockSpec>,
    #[serde(default)]
    pub initial: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub reference_rate: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BlockSpec {
    /// 1-based hierarchy indices as in the equations of motion.
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub coeff: [f64; 2],
    pub left: OperatorSpec,
    pub right: OperatorSpec,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorSpec {
    Named(String),
    Matrix(Vec<Vec<[f64; 2]>>),
}

fn operator_of_spec(spec: &OperatorSpec) -> Result<crate::bloch::CMat2> {
    match spec {
        OperatorSpec::Named(name) => match name.as_str() {
            "id" => Ok(sigma0()),
            "sx" => Ok(sigma_x()),
            "sy" => Ok(sigma_y()),
            "sz" => Ok(sigma_z()),
            "sp" => Ok(sigma_plus()),
            "sm" => Ok(sigma_minus()),
            other => Err(Error::ModelSpec(format!("unknown operator '{other}'"))),
        },
        OperatorSpec::Matrix(rows) => {
            if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
                return Err(Error::ModelSpec("operator matrices must be 2x2".into()));
            }
            let mut m = crate::bloch::CMat2::zeros();
            for (i, row) in rows.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    m[(i, j)] = C64::new(z[0], z[1]);
                }
            }
            Ok(m)
        }
    }
}

/// Build a model from the JSON specification.
pub fn model_from_spec(spec: &ModelSpec) -> Result<HeomModel> {
    if spec.levels == 0 {
        return Err(Error::ModelSpec("levels must be at least 1".into()));
    }
    let mut blocks = Vec::new();
    for b in &spec.blocks {
        if b.i == 0 || b.j == 0 || b.i > spec.levels || b.j > spec.levels {
            return Err(Error::ModelSpec(format!(
                "block ({}, {}) outside 1..={}",
                b.i, b.j, spec.levels
            )));
        }
        let mut terms = Vec::new();
        for t in &b.terms {
            terms.push(SandwichTerm::new(
                C64::new(t.coeff[0], t.coeff[1]),
                operator_of_spec(&t.left)?,
                operator_of_spec(&t.right)?,
            ));
        }
        let transfer = transfer_of_sandwich_sum(&terms)?;
        blocks.push(((b.i - 1, b.j - 1), transfer));
    }
    let generator = assemble_extended_generator(spec.levels, &blocks)?;
    let mut initial = HeomModel::identity_initial(spec.levels);
    if let Some(over) = &spec.initial {
        if over.len() != spec.levels {
            return Err(Error::ModelSpec("initial override needs one row of 4 Bloch weights per level".into()));
        }
        // per-level diagonal Bloch overrides of the initial transfer
        for (lvl, row) in over.iter().enumerate() {
            if row.len() != 4 {
                return Err(Error::ModelSpec("initial override rows must have 4 entries".into()));
            }
            for c in 0..4 {
                initial[(4 * lvl + c, c)] = row[c];
            }
        }
    }
    let reference = spec.reference_rate.unwrap_or_else(|| {
        let a = &generator.mat;
        a.amax().max(1e-12)
    });
    Ok(HeomModel {
        name: "user".into(),
        n_levels: spec.levels,
        parameters: BTreeMap::new(),
        generator,
        initial_extended_map: initial,
        reference_rate: reference,
    })
}

/// Trace preservation of the physical map, probed along the dynamics:
/// row 0 of the system-block transfer stays `(1, 0, 0, 0)` whenever the
/// `𝓛_{1j}` blocks annihilate the trace of every operator the hierarchy
/// reaches. True for all built-ins.
pub fn preserves_trace(model: &HeomModel) -> bool {
    let a = vec_generator(&model.generator);
    let dt = 0.1 / model.reference_rate;
    let step = (a * dt).exp();
    let mut v = model.vec_initial();
    for _ in 0..200 {
        for c in 0..4 {
            let want = if c == 0 { 1.0 } else { 0.0 };
            if (v[c] - want).abs() > 1e-10 {
                return false;
            }
        }
        v = &step * v;
    }
    true
}

#[allow(unused)]
fn paulis_unused() -> [crate::bloch::CMat2; 4] {
    paulis()
}
