//! Free groups on birational and stable birational types, and the merge
//! search deciding whether unknown labels could make two classes equal.

use mvk::birational::{
    can_equal, render_witness, sb_of, BirClass, Label, LabelStoreBuilder, MergeOutcome,
    RationalityStatus, SbClass,
};

fn main() {
    let mut b = LabelStoreBuilder::new();
    b.declare("V", 3, RationalityStatus::NotStablyRational).unwrap();
    b.declare("U", 3, RationalityStatus::Unknown).unwrap();
    b.declare("W", 2, RationalityStatus::Unknown).unwrap();
    let store = b.build().unwrap();

    let v = Label::named("V", 3);
    let u = Label::named("U", 3);
    let w = Label::named("W", 2);

    let x = BirClass::term(u.clone(), 2) - BirClass::term(w.times_projective(1), 1)
        + BirClass::term(Label::rational(3), 1);
    println!("bir class: {x}");
    let sb = sb_of(&x, &store);
    println!("sb class:  {sb}");

    let point = SbClass::term(Label::Point, 1);
    match can_equal(&point, &sb, &store, 12).unwrap() {
        MergeOutcome::Yes(w) => println!("could be a point, merging {:?}", render_witness(&w)),
        MergeOutcome::No => println!("never a point"),
    }

    let y = SbClass::term(v, 1) + SbClass::term(Label::Point, 1) - SbClass::term(w, 1);
    println!("{y}: point reachable = {}", can_equal(&point, &y, &store, 12).unwrap().is_yes());
}
