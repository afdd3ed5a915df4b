use heom_cp::certifier::*;
use heom_cp::models::build_model;
use std::collections::BTreeMap;
use std::time::Instant;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn main() {
    let tol = CertTolerances::default();
    // bath P1 boundary sweep
    println!("== bath sweep (boundary at xi = -2 gamma_p^2 / omega = -1.6056)");
    for xi in [-3.0, -1.7, -1.5, -1.0, 0.0, 0.7, 2.0] {
        let t0 = Instant::now();
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", xi)]),
        )
        .unwrap();
        let cert = certify(&model, CertMode::FromZero, &tol).unwrap();
        let ac = analytic_certificate(&model).unwrap();
        println!(
            "xi={xi:+.2}: {:?} v_m={:.2e} analytic-cond={} [{} ms] notes={:?}",
            cert.status,
            cert.v_m,
            ac.certified,
            t0.elapsed().as_millis(),
            cert.notes,
        );
        for p in &cert.parts {
            println!("   {}: v {:.2e} mono {:.1e} dom {:.1e}", p.factor, p.v, p.margin_monotone, p.margin_dominance);
        }
    }
    // spin-Boson from tp
    println!("== spin-Boson certify-after-tp (gamma=3, delta=2, beta=0.8)");
    let t0 = Instant::now();
    let model = build_model(
        "spin_boson",
        &params(&[("omega", 1.0), ("gamma", 3.0), ("delta", 2.0), ("beta", 0.8)]),
    )
    .unwrap();
    let cert = certify(&model, CertMode::FromTp, &tol).unwrap();
    println!("{:?} v_m={:.3e} [{} ms] notes={:?}", cert.status, cert.v_m, t0.elapsed().as_millis(), cert.notes);
    // floor
    println!("== spin-Boson floor (gamma=1, delta=0.2, beta=0.2, dm=1e-2)");
    let t0 = Instant::now();
    let model = build_model(
        "spin_boson",
        &params(&[("omega", 1.0), ("gamma", 1.0), ("delta", 0.2), ("beta", 0.2)]),
    )
    .unwrap();
    let cfg = OmegaSearchConfig::default();
    let cert = bound_eigenvalue_floor(&model, 1e-2, &cfg, &tol).unwrap();
    println!("{:?} v_m={:.3e} [{} ms]", cert.status, cert.v_m, t0.elapsed().as_millis());
    for n in &cert.notes {
        println!("   note: {n}");
    }
}
