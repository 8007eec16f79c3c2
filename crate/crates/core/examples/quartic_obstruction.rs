//! The quartic fourfold degeneration: two isomorphic components whose
//! intersection is a very general quartic double solid.

use mvk::volume::{obstruct_rational, obstruct_stable, parity_rule, vol, vol_bir, vol_sb};

fn main() {
    let text = include_str!("../corpus/ex-4.3-quartic.json");
    let loaded = mvk::scenario::load_str(text).unwrap();
    let x = loaded.complex().unwrap();
    let store = &loaded.store;

    println!("vol[4]  = {}", vol(x, 4).unwrap());
    println!("vol_bir = {}", vol_bir(x).unwrap());
    println!("vol_sb  = {}", vol_sb(x, store).unwrap());
    println!("{}", obstruct_stable(x, store, 12).unwrap());
    println!("{}", obstruct_rational(x, store, 12, false).unwrap());
    println!("{}", parity_rule(x, store).unwrap());
}
