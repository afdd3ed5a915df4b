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
    println!("generator:\n{:.3}", model.generator.mat);
    let a = vec_generator(&model.generator);
    let v0 = model.vec_initial();
    // paper l
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
    let dt = 0.05;
    let step = (a.clone() * dt).exp();
    let lstep = (l.clone() * dt).exp();
    let mut v = v0.clone();
    let mut lam = lam0.clone();
    let vidx = |level: usize, row: usize, col: usize| 4 * (4 * level + row) + col;
    let mut maxerr = 0.0f64;
    for k in 0..=120 {
        let got = [
            v[vidx(0, 1, 1)],
            v[vidx(0, 1, 2)],
            v[vidx(0, 2, 2)],
            v[vidx(1, 1, 3)],
            v[vidx(1, 2, 3)],
            v[vidx(0, 3, 3)],
        ];
        let err = (0..6).map(|i| (got[i] - lam[i]).abs()).fold(0.0f64, f64::max);
        if err > maxerr {
            maxerr = err;
            if k < 5 || err > 1e-6 {
                println!("k={k} err={err:.3e} got={got:?} lam={:?}", lam.as_slice());
            }
        }
        v = &step * v;
        lam = &lstep * lam;
    }
    println!("max extractor err: {maxerr:.3e}");
}

#[allow(dead_code)]
fn extra() {}
