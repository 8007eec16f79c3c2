//! Face lattice of a rational polyhedral cone and its class P in the
//! graded ring.

use mvk::toric::{cone_from_rays, euler_number, p_class_from_cone};

fn main() {
    let cones: [(&str, Vec<Vec<i64>>); 3] = [
        ("orthant", vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]),
        ("square", vec![vec![1, 0, 1], vec![0, 1, 1], vec![-1, 0, 1], vec![0, -1, 1]]),
        // (1,1,1) is interior to the cone and gets dropped.
        ("redundant", vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]]),
    ];
    for (name, rays) in cones {
        let c = cone_from_rays(3, &rays).unwrap();
        let fl = c.face_lattice();
        println!(
            "{name}: {} extremal rays, f-vector {:?}, euler {}",
            c.rays().len(),
            fl.f_vector(),
            euler_number(fl)
        );
        println!("  P = {}", p_class_from_cone(&c, c.dim() as u32 - 1).unwrap());
    }
}
