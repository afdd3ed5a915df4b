use heom_cp::synthesis::*;
use heom_cp::bloch::{dephasing_z_terms, sigma_z, transfer_of_sandwich_sum, SandwichTerm};

fn main() {
    let (g, w): (f64, f64) = (0.7, 1.0);
    let target = target_reviving(g, w);
    let t0 = 2.0;
    let loc1 = (target.local)(t0);
    // Lambda2 local = (dLambda1 - L11 Lambda1)/w with L11 = (g/2)Dz
    let l11 = transfer_of_sandwich_sum(&dephasing_z_terms(g / 2.0)).unwrap();
    let mut lam2 = heom_cp::series::MatSeries::zero(18);
    for v in 0..17 {
        lam2.c[v] = (loc1.c[v + 1] * ((v + 1) as f64) - l11.0 * loc1.c[v]) / w;
    }
    let h_true = -(-g * t0).exp() * (w * t0).sin();
    println!("Lambda2 local (1,1) value: {} vs true {}", lam2.c[0][(1, 1)], h_true);
    println!("Lambda2 local c[0]:\n{:.6}", lam2.c[0]);
    println!("Lambda2 local c[16][(1,1)]: {:.3e}", lam2.c[16][(1, 1)]);
    println!("Lambda2 local c[17][(1,1)]: {:.3e}", lam2.c[17][(1, 1)]);
    // rho~3 with printed blocks
    let l21 = transfer_of_sandwich_sum(&dephasing_z_terms(w / 2.0)).unwrap();
    let l22 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(g, sigma_z())]).unwrap();
    let mut worst = 0.0f64;
    for v in 0..16 {
        let acc = (lam2.c[v + 1] * ((v + 1) as f64) - l21.0 * loc1.c[v] - l22.0 * lam2.c[v]) / w;
        if v == 0 {
            println!("rho~3 c[0] amax: {:.3e}", acc.amax());
        }
        worst = worst.max(acc.amax());
    }
    println!("rho~3 max over orders: {worst:.3e}");
}
