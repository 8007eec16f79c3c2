//! Monodromic volume of a curve degeneration with a double component,
//! restricted to subgroups and with the action forgotten.

use std::collections::BTreeMap;

use mvk::equivariant::{
    forget_action, lcm_mult, restrict_action, vol_equivariant, EquivModelSpec, SncModelWithCovers,
};

fn main() {
    let spec: EquivModelSpec = serde_json::from_str(
        r#"{
            "fiber_dim": 1,
            "components": [{ "name": "E", "mult": 2 }, { "name": "F", "mult": 1 }],
            "intersections": [["E", "F"]],
            "covers": [
                { "of": ["E"], "pieces": [{ "atom": "Ẽ°", "order": 2 }] },
                { "of": ["F"], "pieces": [{ "atom": "F°" }] },
                { "of": ["E", "F"], "pieces": [{ "atom": "q", "order": 2 }] }
            ]
        }"#,
    )
    .unwrap();
    let model = SncModelWithCovers::from_spec(&spec).unwrap();
    let n = lcm_mult(&model).unwrap();
    let v = vol_equivariant(&model, 1).unwrap();
    println!("lcm of multiplicities: {n}");
    println!("vol_mu = {v}");
    for m in 1..=n {
        println!("restricted to ker(mu -> mu_{m}): {}", restrict_action(&v, m));
    }
    println!("forgotten: {}", forget_action(&v, &BTreeMap::new()));
}
