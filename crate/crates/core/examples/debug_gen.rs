use heom_cp::synthesis::*;
use heom_cp::bloch::{dephasing_z_terms, sigma_z, transfer_of_sandwich_sum, SandwichTerm, PauliTransfer};

fn main() {
    let (g, w, alpha) = (0.7, 1.0, 0.3);
    let target = target_generalized(g, w, alpha);
    let result = synthesize_heom(&target, 6).unwrap();
    println!("depth {} terminated {}", result.depth, result.terminated);
    for lb in &result.levels {
        println!("level {}:", lb.level);
        for (j, b) in lb.blocks.iter().enumerate() {
            println!("  L[{}][{}]:\n{:.4}", lb.level, j + 1, b.0);
        }
    }
    // printed level-2 blocks
    let l21p = transfer_of_sandwich_sum(&dephasing_z_terms(alpha * w)).unwrap();
    let l22p = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(g, sigma_z())]).unwrap();
    let r2 = level_residual(&target, &result.levels[0..1], &[l21p, l22p], false);
    println!("printed LEVEL-2 residual: {r2:.3e}");
    let zero = PauliTransfer::zero();
    let l32 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(w * (1.0 - 2.0 * alpha), sigma_z())]).unwrap();
    let l33 = transfer_of_sandwich_sum(&[SandwichTerm::conjugation(g, sigma_z())]).unwrap();
    let r3 = level_residual(&target, &result.levels[0..2], &[zero, l32, l33], true);
    println!("printed LEVEL-3 residual (after min-norm level2): {r3:.3e}");
}
