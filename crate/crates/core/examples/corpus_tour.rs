//! Runs every bundled scenario and prints each verdict.

use mvk::birational::DEFAULT_BUDGET;
use mvk::corpus::{entries, run_corpus, run_scenario};

fn main() {
    for e in entries().unwrap() {
        let run = run_scenario(&e.scenario, DEFAULT_BUDGET).unwrap();
        println!("{}", e.name);
        for r in run["results"].as_array().unwrap() {
            for v in r["output"]["verdicts"].as_array().into_iter().flatten() {
                println!("  {:8} {:15} {}", v["rule"].as_str().unwrap(), v["status"].as_str().unwrap(), v["class"].as_str().unwrap());
            }
        }
    }
    println!("{}", run_corpus(DEFAULT_BUDGET).unwrap().text().lines().last().unwrap());
}
