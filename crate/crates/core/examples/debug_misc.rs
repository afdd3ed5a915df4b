use heom_cp::models::{build_model, reduced_system};
use heom_cp::propagator::*;
use std::collections::BTreeMap;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn main() {
    let model = build_model("jaynes_cummings", &params(&[("gamma", 10.0), ("zeta", 1.0)])).unwrap();
    let reduced = reduced_system(&model).unwrap();
    let traj = propagate(&reduced, 2.0, 1e-2).unwrap();
    let triv = trivial_subspace(&traj, 1e-10);
    println!("trivial subspace cols: {}", triv.ncols());
    let chi0 = &traj.chis[0];
    println!("chi0 eigs: {:?}", chi0.eigenvalues().as_slice());
    println!("on complement at t=0: {:?}", chi0.eigenvalues_on_complement(&triv));
    let chi50 = &traj.chis[50];
    println!("on complement at k=50: {:?}", chi50.eigenvalues_on_complement(&triv));
    println!("tp: {:?}", detect_tp(&reduced, &traj, 1e-8, 10));
    // trace preservation check
    let lam = &traj.lambdas[40];
    let v = reduced.embed(lam);
    println!("embed row0: {:?}", &v.as_slice()[..4]);
}
