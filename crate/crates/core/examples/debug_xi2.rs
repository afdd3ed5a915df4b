use heom_cp::certifier::AnchoredSearch;
use heom_cp::lifting::{lift_polynomial, LiftSign};
use heom_cp::models::{build_model, reduced_system};
use heom_cp::sdp::SdpTolerances;
use std::collections::BTreeMap;

fn main() {
    let params: BTreeMap<String, f64> = [
        ("gamma_plus".to_string(), 1.3),
        ("gamma_minus".to_string(), 0.4),
        ("omega".to_string(), 0.9),
        ("xi".to_string(), 2.0),
    ]
    .into();
    let model = build_model("bath", &params).unwrap();
    let reduced = reduced_system(&model).unwrap();
    let p2 = reduced.factors[1].poly.clone();
    let lifted = lift_polynomial(&reduced, &p2, LiftSign::Lower, None).unwrap();
    println!("L~ amax {:.3e}", lifted.l_tilde.amax());
    let mut search = AnchoredSearch::new(lifted.l_tilde.clone(), lifted.s_tilde(), lifted.xi0.clone());
    search.require_strict = true;
    let out = search.run(&SdpTolerances::default());
    println!("v {:.3e} strict {} rounds {} fail {:?}", out.v, out.strict, out.rounds, out.failure);
}
