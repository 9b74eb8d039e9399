//! Regenerates `data/panel.csv`, the bundled synthetic price panel.
//!
//! Twelve monthly series from 1970-01 to 2014-12. Log returns follow one of
//! two mechanisms and four series switch mechanism at window boundaries; see
//! `PLAN` for the planted membership.
//!
//! `cargo run -p tarclust-cli --example make_panel -- data/panel.csv`

use std::fmt::Write as _;

use chrono::{Months, NaiveDate};
use tarclust_core::rng::derive_seed;
use tarclust_core::simlab::{reference_dgm, simulate};
use tarclust_core::{DgmKind, DgmSpec};

const WINDOW: usize = 180;
const SEED: u64 = 2024;

/// Mechanism per series in the early, middle and late window
/// (`A` = persistent AR(1), `B` = three-regime threshold process).
const PLAN: [(&str, [char; 3]); 12] = [
    ("ALUMINUM", ['A', 'A', 'A']),
    ("COPPER", ['A', 'A', 'A']),
    ("LEAD", ['A', 'A', 'A']),
    ("NICKEL", ['A', 'A', 'A']),
    ("TIN", ['A', 'B', 'B']),
    ("ZINC", ['A', 'B', 'B']),
    ("GOLD", ['B', 'B', 'A']),
    ("SILVER", ['B', 'B', 'A']),
    ("PLATINUM", ['B', 'B', 'B']),
    ("CRUDE", ['B', 'B', 'B']),
    ("NGAS", ['B', 'B', 'B']),
    ("COAL", ['B', 'B', 'B']),
];

fn main() {
    let out = std::env::args().nth(1).unwrap_or_else(|| "data/panel.csv".into());
    let a = DgmSpec::linear("A", DgmKind::Arma, &[(1, 0.6)], &[]);
    let b = reference_dgm("ser07").expect("reference mechanism");
    let start = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
    let columns: Vec<Vec<f64>> = PLAN
        .iter()
        .enumerate()
        .map(|(i, (_, plan))| {
            let mut log_price = 100f64.ln();
            let mut prices = Vec::with_capacity(3 * WINDOW);
            for (w, m) in plan.iter().enumerate() {
                let spec = if *m == 'A' { &a } else { &b };
                let seed = derive_seed(SEED, &[i as u64, w as u64]);
                let returns = simulate(spec, WINDOW, 200, seed).expect("simulation");
                for r in returns.values() {
                    log_price += 0.02 * r;
                    prices.push(log_price.exp());
                }
            }
            prices
        })
        .collect();
    let mut csv = String::from("date");
    for (name, _) in PLAN {
        write!(csv, ",{name}").unwrap();
    }
    csv.push('\n');
    for t in 0..3 * WINDOW {
        let date = start + Months::new(t as u32);
        write!(csv, "{}", date.format("%Y-%m-%d")).unwrap();
        for col in &columns {
            write!(csv, ",{:.6}", col[t]).unwrap();
        }
        csv.push('\n');
    }
    std::fs::write(&out, csv).expect("write panel");
    eprintln!("wrote {out}");
}
