//! Graded classes, their three reductions and the blow-up relation.

use mvk::ring::{
    blowup_delta, in_ideal, projective_class, reduce, tau_to_one, Atom, AtomFlags, GradedClass,
    IdealGenerator, Reduction,
};

fn main() {
    let p2 = projective_class(2, 2).unwrap();
    println!("[P^2]_2 = {p2}");
    println!("[P^2]_4 = {}", projective_class(2, 4).unwrap());

    // [P^n]_d - t^d is divisible by [A^1]_2 = tL once d > n.
    let diff = projective_class(3, 5).unwrap() - GradedClass::tau_pow(5);
    match in_ideal(&diff, IdealGenerator::TauLef) {
        Some(q) => println!("[P^3]_5 - t^5 = tL * ({q})"),
        None => println!("[P^3]_5 - t^5 is not in (tL)"),
    }

    let s = GradedClass::generator(Atom::new("S", 2, AtomFlags::default()));
    let x = &s * &GradedClass::lef() + p2.shift(1);
    println!("x = {x}");
    for mode in [Reduction::TauToOne, Reduction::ModTau, Reduction::ModTauLef] {
        println!("  {mode:?}: {}", reduce(&x, mode));
    }
    println!("  classical: {}", tau_to_one(&x));

    // Blowing up a curve in a threefold, read in grade 3.
    let curve = GradedClass::generator(Atom::new("C", 1, AtomFlags::default()));
    println!("[Bl_C Y]_3 - [Y]_3 = {}", blowup_delta(&curve, 3, 1, 3).unwrap());
}
