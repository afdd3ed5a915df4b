use heom_cp::synthesis::*;

fn main() {
    let (g, w) = (0.7, 1.0);
    let target = target_reviving(g, w);
    println!("target series entry (1,1) coeffs: {:?}", &target.series.entry(1,1).c[..8]);
    // expected: e^{-0.7t}cos(t) coefficients
    let result = synthesize_heom(&target, 5);
    match result {
        Ok(r) => {
            println!("depth {:?} terminated {} tail {:?}", r.depth, r.terminated, r.tail_residual);
            for lb in &r.levels {
                println!("level {} residual {:.2e}", lb.level, lb.residual);
                for (j, b) in lb.blocks.iter().enumerate() {
                    println!("  block ({},{}):\n{:.4}", lb.level, j+1, b.0);
                }
            }
        }
        Err(e) => println!("error: {e}"),
    }
}
