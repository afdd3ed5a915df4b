use heom_cp::certifier::AnchoredSearch;
use heom_cp::sdp::SdpTolerances;
use nalgebra::{DMatrix, DVector};

fn main() {
    let (g, z) = (10.0, 1.0);
    let l = DMatrix::from_row_slice(2, 2, &[0.0, z, -g / 2.0, -z]);
    // eh target quadratic (1 - l1^2)/4: s = diag(1,0)/4
    let s = DMatrix::from_row_slice(2, 2, &[0.25, 0.0, 0.0, 0.0]);
    let anchor = DVector::from_vec(vec![1.0, 0.0]);
    let search = AnchoredSearch::new(l, s, anchor);
    let out = search.run(&SdpTolerances::default());
    println!("v {} strict {} rounds {} failure {:?}", out.v, out.strict, out.rounds, out.failure);
    println!("R {:.6}", out.r);
    println!("face cols {}", out.face.ncols());
}
