use heom_cp::certifier::*;
use heom_cp::lifting::{lift_polynomial, LiftSign};
use heom_cp::models::{build_model, reduced_system};
use heom_cp::sdp::SdpTolerances;
use std::collections::BTreeMap;

fn main() {
    let params: BTreeMap<String, f64> = [
        ("gamma_plus".to_string(), 1.3),
        ("gamma_minus".to_string(), 0.4),
        ("omega".to_string(), 0.9),
        ("xi".to_string(), 0.7),
    ]
    .into();
    let model = build_model("bath", &params).unwrap();
    let reduced = reduced_system(&model).unwrap();
    let p2 = reduced.factors[1].poly.clone();
    let lifted = lift_polynomial(&reduced, &p2, LiftSign::Lower, None).unwrap();
    let mut search = AnchoredSearch::new(lifted.l_tilde.clone(), lifted.s_tilde(), lifted.xi0.clone());
    search.require_strict = true;
    let out = search.run(&SdpTolerances::default());
    println!("v {:.3e} strict {} fail {:?}", out.v, out.strict, out.failure);
    // cascade coefficients by hand
    let l = &lifted.l_tilde;
    let scale = l.amax();
    let ls = l / scale;
    let q = ls.transpose() * &out.r + &out.r * &ls;
    let x0 = &lifted.xi0;
    let mut pow = vec![x0.clone()];
    for _ in 0..20 {
        let nxt = &ls * pow.last().unwrap();
        pow.push(nxt);
    }
    for k in 0..12 {
        let mut c = 0.0;
        let mut bb = 1.0;
        for j in 0..=k {
            c += bb * (pow[j].transpose() * &q * &pow[k - j])[(0, 0)];
            bb *= (k - j) as f64 / (j as f64 + 1.0);
        }
        println!("cascade c[{k}] = {c:+.6e}");
    }
    println!("tol = {:.3e}", 1e-11 * q.amax() * x0.norm_squared());
    println!("decision: {:?}", monotone_leading_decrease(l, &out.r, x0));
    // direct q(t) = d/dt F at t=0.2
    let qphys = lifted.l_tilde.transpose() * &out.r + &out.r * &lifted.l_tilde;
    let xi02 = (lifted.l_tilde.clone() * 0.2).exp() * &lifted.xi0;
    println!("q_phys(0.2) = {:.6e}", (xi02.transpose() * &qphys * &xi02)[(0,0)]);
    let xi00 = (lifted.l_tilde.clone() * 0.001).exp() * &lifted.xi0;
    println!("q_phys(0.001) = {:.6e}", (xi00.transpose() * &qphys * &xi00)[(0,0)]);
    println!("q_phys(0) = {:.6e}", (lifted.xi0.transpose() * &qphys * &lifted.xi0)[(0,0)]);
    // and via scaled powers reconstruction at tau corresponding to t=0.2
    let tau = 0.2 * scale;
    let mut xts = nalgebra::DVector::<f64>::zeros(lifted.dim());
    let mut fact = 1.0;
    for j in 0..16 {
        if j > 0 { fact *= j as f64; }
        xts += &pow[j] * (tau.powi(j as i32) / fact);
    }
    println!("xi(0.2) reconstruction err = {:.3e}", (&xts - &xi02).amax());
    println!("sanity c1: loopstyle {:.6e} expected {:.6e}",
        2.0 * (pow[1].transpose() * &q * &pow[0])[(0, 0)],
        4.31e-4 / (scale * scale));
    println!("pow[1] amax {:.3e}; ls*x0 amax {:.3e}", pow[1].amax(), (&ls * x0).amax());
    let lx0 = &lifted.l_tilde * &lifted.xi0;
    let llx0 = &lifted.l_tilde * &lx0;
    println!("q'(0) direct = {:.6e}", 2.0 * (lx0.transpose() * &qphys * &lifted.xi0)[(0,0)]);
    println!("q''(0) direct = {:.6e}", 2.0 * (llx0.transpose() * &qphys * &lifted.xi0)[(0,0)] + 2.0 * (lx0.transpose() * &qphys * &lx0)[(0,0)]);
    // finite differences of q
    let qat = |t: f64| {
        let xi = (lifted.l_tilde.clone() * t).exp() * &lifted.xi0;
        (xi.transpose() * &qphys * &xi)[(0,0)]
    };
    let h = 1e-4;
    println!("q'(0) fd = {:.6e}", (qat(h) - qat(-h)) / (2.0*h));
    println!("q''(0) fd = {:.6e}", (qat(h) - 2.0*qat(0.0) + qat(-h)) / (h*h));
    // F along trajectory directly
    let dt = 0.05;
    let step = (l.clone() * dt).exp();
    let mut xi = lifted.xi0.clone();
    for k in 0..8 {
        let f = (xi.transpose() * &out.r * &xi)[(0, 0)];
        println!("F({:.2}) = {:.9e}", k as f64 * dt * 4.0, f);
        for _ in 0..4 { xi = &step * xi; }
    }
}
