//! Recovery experiment on the ten reference mechanisms.
//!
//! `cargo run --release -p tarclust-core --example recovery -- [n_per_dgm] [replicates] [seed]`

use tarclust_core::simlab::{run_scenario, summarize, ScenarioConfig};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cfg = ScenarioConfig::default();
    cfg.n_per_dgm = args.first().and_then(|v| v.parse().ok()).unwrap_or(5);
    cfg.replicates = args.get(1).and_then(|v| v.parse().ok()).unwrap_or(10);
    if let Some(seed) = args.get(2).and_then(|v| v.parse().ok()) {
        cfg.seed = seed;
    }
    let results = run_scenario(&cfg).expect("valid scenario");
    for r in &results {
        println!(
            "replicate {:>2}: c = {:?}, exact = {:.1}, at true c = {:.1}",
            r.replicate,
            r.chosen_c.unwrap_or(0),
            r.exact_grouping_pct.unwrap_or(f64::NAN),
            r.exact_grouping_at_true_c.unwrap_or(f64::NAN)
        );
    }
    let s = summarize(&cfg, &results);
    println!(
        "exact {:.2}% at true c {:.2}% mean ari {:.3} true c chosen {}/{} ({} failed)",
        s.exact_grouping_pct.unwrap_or(f64::NAN),
        s.exact_grouping_at_true_c.unwrap_or(f64::NAN),
        s.mean_ari.unwrap_or(f64::NAN),
        s.true_c_chosen,
        s.replicates,
        s.failed
    );
}
