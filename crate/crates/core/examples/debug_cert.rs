use heom_cp::certifier::*;
use heom_cp::models::build_model;
use std::collections::BTreeMap;

fn main() {
    let params: BTreeMap<String, f64> =
        [("gamma".to_string(), 10.0), ("zeta".to_string(), 1.0)].into();
    let model = build_model("jaynes_cummings", &params).unwrap();
    let tol = CertTolerances::default();
    let cert = certify(&model, CertMode::FromZero, &tol).unwrap();
    println!("status {:?} v_m {} notes {:?}", cert.status, cert.v_m, cert.notes);
    for p in &cert.parts {
        println!("factor {} v {} mono {} dom {} norm {}", p.factor, p.v, p.margin_monotone, p.margin_dominance, p.normalization_residual);
        println!("R = {:.5}", p.r);
        println!("S = {:.5}", p.s);
        println!("anchor = {:?}", p.anchor.as_slice());
    }
}
