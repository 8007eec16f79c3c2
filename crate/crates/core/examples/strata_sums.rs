//! Strata complexes from an SNC nerve, both volume formulas, and the
//! invariance under deleting a stratum's closure from the bookkeeping.

use mvk::strata::{closed_sum, from_snc_nerve, open_sum, SncNerve};

fn main() {
    let nerve: SncNerve = serde_json::from_str(
        r#"{
            "fiber_dim": 2,
            "components": [
                { "name": "A", "tag": "rational" },
                { "name": "B", "tag": "rational" },
                { "name": "C", "tag": "unknown" }
            ],
            "intersections": [
                { "of": ["A", "B"] }, { "of": ["B", "C"] }, { "of": ["A", "C"] },
                { "of": ["A", "B", "C"] }
            ]
        }"#,
    )
    .unwrap();
    let x = from_snc_nerve(&nerve).unwrap();
    for s in x.strata() {
        println!("{:8} codim {} interior {}", s.id, s.codim, s.interior);
    }
    for e in 2..=3 {
        let open = open_sum(&x, e).unwrap();
        let closed = closed_sum(&x, e).unwrap();
        println!("grade {e}: open = {open}");
        println!("         closed = {closed}");
        assert_eq!(open, closed);
    }
}
