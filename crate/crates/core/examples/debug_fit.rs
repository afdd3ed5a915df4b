use heom_cp::models::{build_model, vec_generator};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

fn main() {
    let params: BTreeMap<String, f64> = [
        ("omega".to_string(), 1.0),
        ("gamma".to_string(), 3.0),
        ("delta".to_string(), 2.0),
        ("beta".to_string(), 0.8),
    ]
    .into();
    let model = build_model("spin_boson", &params).unwrap();
    let a = vec_generator(&model.generator);
    let v0 = model.vec_initial();
    let (omega, gamma, delta) = (1.0, 3.0, 2.0);
    let l = DMatrix::from_row_slice(6, 6, &[
        0.0, omega, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, -omega, 0.0, 0.0, 0.0,
        gamma, 4.0*delta*delta/omega + omega, -gamma, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -gamma, -omega, 0.0,
        0.0, 0.0, 0.0, omega, -gamma, -2.0*delta,
        0.0, 0.0, 0.0, 0.0, 2.0*delta, 0.0,
    ]);
    let lam0 = DVector::from_vec(vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    let nt = 160;
    let t_end = 8.0;
    let dt = t_end / nt as f64;
    let step = (a * dt).exp();
    let lstep = (l * dt).exp();
    let mut v = v0.clone();
    let mut lam = lam0.clone();
    let nf = 7;
    let mut design = DMatrix::<f64>::zeros(nt + 1, nf);
    let mut target = DMatrix::<f64>::zeros(nt + 1, 32);
    for row in 0..=nt {
        for k in 0..6 {
            design[(row, k)] = lam[k];
        }
        design[(row, 6)] = 1.0;
        for j in 0..32 {
            target[(row, j)] = v[j];
        }
        v = &step * v;
        lam = &lstep * lam;
    }
    let svd = design.clone().svd(true, true);
    println!("singular values: {:?}", svd.singular_values.as_slice());
    let mut w = DMatrix::<f64>::zeros(32, nf);
    for j in 0..32 {
        let col = target.column(j).into_owned();
        let sol = svd.solve(&col, 1e-12).unwrap();
        for k in 0..nf {
            w[(j, k)] = sol[k];
        }
    }
    let resid = (&design * w.transpose() - &target).amax();
    println!("fit residual: {resid:.3e}");
    // normal-equation comparison
    let ata = design.transpose() * &design;
    let atb = design.transpose() * &target;
    let chol = ata.cholesky().unwrap();
    let w2 = chol.solve(&atb);
    let resid2 = (&design * &w2 - &target).amax();
    println!("normal-eq residual: {resid2:.3e}");
}
