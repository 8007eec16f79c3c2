//! Seeded generator of SNC nerves with disconnected intersections.
//!
//! Pieces of `E_J` are created over tuples of parent pieces (one piece of
//! each `E_{J - i}`) that agree on every `E_{J - i - j}`, so each generated
//! stratum sits below exactly one piece of every face of its simplex.

#![allow(dead_code)]

use std::collections::BTreeMap;

use mvk::strata::{ComponentSpec, IntersectionSpec, PieceSpec, SncNerve, Tag};
use rand::Rng;

const TAGS: [Tag; 4] = [Tag::Rational, Tag::StablyRational, Tag::Irrational, Tag::Unknown];

struct Piece {
    name: String,
    /// Parent piece index in each immediate subset, keyed by that subset.
    parents: BTreeMap<u64, usize>,
}

fn piece_count<R: Rng>(rng: &mut R, size: u32) -> usize {
    let r: f64 = rng.gen();
    let (p0, p1) = if size == 2 { (0.3, 0.8) } else { (0.35, 0.9) };
    if r < p0 {
        0
    } else if r < p1 {
        1
    } else {
        2
    }
}

pub fn random_nerve<R: Rng>(rng: &mut R, max_components: usize) -> SncNerve {
    let k = rng.gen_range(1..=max_components);
    let names: Vec<String> = (0..k).map(|i| format!("E{}", i + 1)).collect();
    let mut pieces: BTreeMap<u64, Vec<Piece>> = BTreeMap::new();
    for (i, n) in names.iter().enumerate() {
        pieces.insert(
            1 << i,
            vec![Piece {
                name: n.clone(),
                parents: BTreeMap::new(),
            }],
        );
    }
    let mut masks: Vec<u64> = (1u64..(1 << k)).filter(|m| m.count_ones() >= 2).collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));

    let mut max_depth = 0;
    let mut intersections = Vec::new();
    for mask in masks {
        let members: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let subs: Vec<u64> = members.iter().map(|i| mask & !(1 << i)).collect();
        if subs.iter().any(|s| !pieces.contains_key(s)) {
            continue;
        }
        let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
        for s in &subs {
            let n = pieces[s].len();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    (0..n).map(move |p| {
                        let mut t = t.clone();
                        t.push(p);
                        t
                    })
                })
                .collect();
        }
        let compatible = |t: &Vec<usize>| {
            for a in 0..subs.len() {
                for b in a + 1..subs.len() {
                    let common = subs[a] & subs[b];
                    if common == 0 {
                        continue;
                    }
                    let pa = pieces[&subs[a]][t[a]].parents.get(&common);
                    let pb = pieces[&subs[b]][t[b]].parents.get(&common);
                    if pa != pb {
                        return false;
                    }
                }
            }
            true
        };
        let mut created = Vec::new();
        for t in tuples.into_iter().filter(compatible) {
            for _ in 0..piece_count(rng, mask.count_ones()) {
                let name = format!("S{mask}_{}", created.len() + 1);
                let parents = subs.iter().copied().zip(t.iter().copied()).collect();
                created.push((Piece { name, parents }, t.clone()));
            }
        }
        if created.is_empty() {
            continue;
        }
        max_depth = max_depth.max(mask.count_ones() - 1);
        let specs = created
            .iter()
            .map(|(p, t)| PieceSpec {
                name: Some(p.name.clone()),
                tag: TAGS[rng.gen_range(0..4)],
                label: None,
                inside: subs
                    .iter()
                    .zip(t)
                    .map(|(s, &q)| pieces[s][q].name.clone())
                    .collect(),
            })
            .collect();
        intersections.push(IntersectionSpec {
            of: members.iter().map(|&i| names[i].clone()).collect(),
            pieces: specs,
        });
        pieces.insert(mask, created.into_iter().map(|(p, _)| p).collect());
    }
    SncNerve {
        fiber_dim: max_depth + rng.gen_range(0..=2),
        components: names
            .into_iter()
            .map(|name| ComponentSpec {
                name,
                tag: TAGS[rng.gen_range(0..4)],
                label: None,
            })
            .collect(),
        intersections,
    }
}
