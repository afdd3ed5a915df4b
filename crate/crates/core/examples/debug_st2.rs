use heom_cp::models::{build_model, reduced_system};
use heom_cp::propagator::short_time_analysis;
use std::collections::BTreeMap;

fn main() {
    let params: BTreeMap<String, f64> = [
        ("omega".to_string(), 1.0),
        ("gamma".to_string(), 3.0),
        ("delta".to_string(), 2.0),
        ("beta".to_string(), 0.8),
    ]
    .into();
    let model = build_model("spin_boson", &params).unwrap();
    let reduced = reduced_system(&model).unwrap();
    let branches = short_time_analysis(&reduced, 6).unwrap();
    for (i, b) in branches.iter().enumerate() {
        println!("branch {i}: {:?} leading {:?}", b.class, b.leading);
        println!("   {:?}", b.series.c);
    }
}
