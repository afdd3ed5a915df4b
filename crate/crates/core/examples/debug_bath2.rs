use heom_cp::certifier::AnchoredSearch;
use heom_cp::sdp::SdpTolerances;
use nalgebra::{DMatrix, DVector};
use std::time::Instant;

fn main() {
    // P1^2 anchored search on the augmented 5-dim system, xi = -1.5
    let (gp_rate, gm_rate, omega, xi) = (1.3, 0.4, 0.9, -1.5);
    let gam_p: f64 = (gp_rate + gm_rate) / 2.0;
    let gam_m: f64 = (gp_rate - gm_rate) / 2.0;
    let l4 = -DMatrix::from_row_slice(4, 4, &[
        2.0*gam_p, -omega, 0.0, 0.0,
        2.0*xi, 2.0*gam_p, 0.0, 0.0,
        0.0, 0.0, gam_p, -omega,
        0.0, 0.0, xi, gam_p,
    ]);
    let mut l = DMatrix::zeros(5, 5);
    l.view_mut((0, 0), (4, 4)).copy_from(&l4);
    let v = DVector::from_vec(vec![gam_p, 0.0, 0.0, 0.0, gam_m]);
    let s = -(&v * v.transpose());
    let anchor = DVector::from_vec(vec![-gam_m / gam_p, 0.0, 1.0, 0.0, 1.0]);
    let t0 = Instant::now();
    let search = AnchoredSearch::new(l, s, anchor);
    let out = search.run(&SdpTolerances::default());
    println!("[{:?}] v {} strict {} rounds {} fail {:?}", t0.elapsed(), out.v, out.strict, out.rounds, out.failure);
    let l2 = {
        let l4b = -DMatrix::from_row_slice(4, 4, &[
            2.0*gam_p, -omega, 0.0, 0.0,
            2.0*xi, 2.0*gam_p, 0.0, 0.0,
            0.0, 0.0, gam_p, -omega,
            0.0, 0.0, xi, gam_p,
        ]);
        let mut l = DMatrix::zeros(5, 5);
        l.view_mut((0, 0), (4, 4)).copy_from(&l4b);
        l
    };
    let q = l2.transpose() * &out.r + &out.r * &l2;
    let qs = (q.clone() + q.transpose()).scale(0.5);
    println!("Q eigs: {:?}", qs.symmetric_eigen().eigenvalues.as_slice());
    println!("R: {:.6}", out.r);
}

// extra diagnostics appended
#[allow(dead_code)]
fn dummy() {}
