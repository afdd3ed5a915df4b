use heom_cp::certifier::*;
use heom_cp::models::build_model;
use std::collections::BTreeMap;
use std::time::Instant;

fn params(kv: &[(&str, f64)]) -> BTreeMap<String, f64> {
    kv.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn main() {
    let tol = CertTolerances::default();
    println!("boundary xi* = {:.4}", -2.0 * 0.85f64 * 0.85 / 0.9);
    for xi in [-3.0, -2.0, -1.7, -1.62, -1.59, -1.5, -1.0, 0.0, 0.7, 2.0] {
        let t0 = Instant::now();
        let model = build_model(
            "bath",
            &params(&[("gamma_plus", 1.3), ("gamma_minus", 0.4), ("omega", 0.9), ("xi", xi)]),
        )
        .unwrap();
        let cert = certify(&model, CertMode::FromZero, &tol).unwrap();
        let ac = analytic_certificate(&model).unwrap();
        let pstat: Vec<String> = cert
            .parts
            .iter()
            .map(|p| format!("{}:{:.1e}{}", p.factor, p.v, p.failure.as_deref().map(|f| format!(" ({f})")).unwrap_or_default()))
            .collect();
        // propagation oracle: min eig chi and min P2 over 20 characteristic times
        let reduced = heom_cp::models::reduced_system(&model).unwrap();
        let horizon = heom_cp::propagator::default_horizon(&reduced);
        let traj = heom_cp::propagator::propagate(&reduced, horizon, horizon / 2000.0).unwrap();
        let min_eig = traj
            .eigenvalues
            .iter()
            .map(|e| e[0])
            .fold(f64::INFINITY, f64::min);
        let p2 = &reduced.factors[1].poly;
        let min_p2 = traj
            .lambdas
            .iter()
            .skip(1)
            .map(|l| p2.eval(l))
            .fold(f64::INFINITY, f64::min);
        println!(
            "xi={xi:+.2}: {:?} parts={pstat:?} analytic={} mineig={min_eig:+.2e} minP2={min_p2:+.2e} [{} ms]",
            cert.status,
            ac.certified,
            t0.elapsed().as_millis()
        );
    }
}
