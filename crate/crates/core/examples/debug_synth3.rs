use heom_cp::synthesis::*;

fn main() {
    let (g, w): (f64, f64) = (0.7, 1.0);
    let target = target_reviving(g, w);
    // local series sanity at t0 = 2.0
    let t0 = 2.0;
    let loc = (target.local)(t0);
    let f_true = (-g * t0).exp() * (w * t0).cos();
    println!("local entry(1,1) value at t0: {} vs true {}", loc.c[0][(1, 1)], f_true);
    // derivative
    let fd = {
        let h = 1e-6;
        ((-g * (t0 + h)).exp() * (w * (t0 + h)).cos() - (-g * (t0 - h)).exp() * (w * (t0 - h)).cos()) / (2.0 * h)
    };
    println!("local d/dt(1,1): {} vs fd {}", loc.c[1][(1, 1)], fd);
    println!("local entry(0,0): {} (should be 1)", loc.c[0][(0, 0)]);
    println!("local entry(3,3): {} (should be 1)", loc.c[0][(3, 3)]);
}
