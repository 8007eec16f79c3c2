mod common;

use mvk::strata::{closed_sum, from_snc_nerve, open_sum, product, StrataComplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complexes(seed: u64, count: usize) -> Vec<StrataComplex> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nerve = common::random_nerve(&mut rng, 6);
            from_snc_nerve(&nerve).unwrap_or_else(|e| panic!("{e}\n{}", serde_json::to_string(&nerve).unwrap()))
        })
        .collect()
}

/// Signed count over the closed interval, straight from the order relation.
fn interval_sum(x: &StrataComplex, lo: usize, hi: usize) -> i64 {
    (0..x.len())
        .filter(|&k| x.le(lo, k) && x.le(k, hi))
        .map(|k| if x.strata()[k].codim % 2 == 0 { 1 } else { -1 })
        .sum()
}

#[test]
fn generated_nerves_satisfy_the_interval_condition() {
    for x in complexes(11, 150) {
        for i in 0..x.len() {
            for j in 0..x.len() {
                if !x.le(i, j) {
                    continue;
                }
                let expected = if i == j {
                    if x.strata()[i].codim % 2 == 0 { 1 } else { -1 }
                } else {
                    0
                };
                assert_eq!(interval_sum(&x, i, j), expected);
            }
        }
    }
}

#[test]
fn open_and_closed_sums_agree() {
    let xs = complexes(7, 150);
    let strata: usize = xs.iter().map(|x| x.len()).sum();
    assert!(strata > 600, "generator too sparse: {strata} strata");
    for x in xs {
        let n = x.fiber_dim();
        for e in n..=n + 2 {
            assert_eq!(open_sum(&x, e).unwrap(), closed_sum(&x, e).unwrap());
        }
    }
}

#[test]
fn products_keep_the_identity() {
    let xs = complexes(3, 24);
    for pair in xs.chunks(2) {
        let p = product(&pair[0], &pair[1]);
        let n = p.fiber_dim();
        assert_eq!(open_sum(&p, n).unwrap(), closed_sum(&p, n).unwrap());
        assert_eq!(open_sum(&p, n).unwrap(), &open_sum(&pair[0], pair[0].fiber_dim()).unwrap() * &open_sum(&pair[1], pair[1].fiber_dim()).unwrap());
    }
}

#[test]
fn deleting_a_non_minimal_stratum_is_caught() {
    for x in complexes(5, 120) {
        let minimal = x.minimal();
        for i in 0..x.len() {
            let result = x.without(i);
            if x.len() == 1 {
                assert!(result.is_err());
            } else if minimal.contains(&i) {
                // Nothing lies below a minimal stratum, so no interval changes.
                assert!(result.is_ok(), "{}", result.unwrap_err());
            } else {
                assert!(result.is_err(), "deleting {} went unnoticed", x.strata()[i].id);
            }
        }
    }
}
