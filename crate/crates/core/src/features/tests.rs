use super::*;
use crate::series::StationarizeMode;
use crate::simlab::{reference_dgm, simulate};

fn sim_config() -> PipelineConfig {
    PipelineConfig {
        stationarize: StationarizeMode::None,
        ..PipelineConfig::default()
    }
}

fn sim(name: &str, seed: u64) -> TimeSeries {
    simulate(&reference_dgm(name).unwrap(), 400, 200, seed).unwrap()
}

#[test]
fn default_layout_has_81_entries() {
    let layout = FeatureLayout::from_config(&PipelineConfig::default());
    assert_eq!(layout.dim(), 3 * 3 + 12 + 5 * 12);
    let names = layout.names();
    assert_eq!(names.len(), layout.dim());
    assert_eq!(names[0], "setar_r1_lag1");
    assert_eq!(names[9], "resid_acf_1");
    assert_eq!(names[names.len() - 1], "ar_lag12");
}

#[test]
fn vector_matches_layout_and_masks() {
    let cfg = sim_config();
    let ex = extract_detailed(&sim("ser07", 1), &cfg).unwrap();
    let f = &ex.features;
    assert_eq!(f.values().len(), 81);
    assert_eq!(f.setar_coeffs.len(), 9);
    assert_eq!(f.ar_coeffs.len(), 12);
    let band = critical_value(0.05) / (ex.setar.standardized_residuals.len() as f64).sqrt();
    for v in f.resid_acf.iter().chain(&f.resid_pacf).chain(&f.resid_ccf_sq) {
        assert!(*v == 0.0 || v.abs() >= band);
    }
    // the AR block is zero beyond the selected order
    assert!(f.ar_coeffs[ex.ar.order()..].iter().all(|&v| v == 0.0));
    for (j, r) in ex.setar.regimes.iter().enumerate() {
        let block = &f.setar_coeffs[j * 3..(j + 1) * 3];
        assert!(block[r.order()..].iter().all(|&v| v == 0.0));
    }
}

#[test]
fn seasonal_series_has_a_lag_12_signature() {
    let f = extract_features(&sim("ser01", 2), &sim_config()).unwrap();
    assert!(f.series_acf[11] > 0.5, "{:?}", f.series_acf);
    assert!(f.ar_coeffs[11] > 0.3, "{:?}", f.ar_coeffs);
}

#[test]
fn failures_carry_the_label() {
    let short = TimeSeries::new((0..50).map(|i| (i as f64 * 0.7).sin() + 2.0).collect())
        .unwrap()
        .with_label("tiny");
    match extract_features(&short, &PipelineConfig::default()) {
        Err(Error::FeatureExtraction { label, .. }) => assert_eq!(label, "tiny"),
        other => panic!("unexpected {other:?}"),
    }
    let negative = sim("ser03", 1);
    assert!(extract_features(&negative, &PipelineConfig::default()).is_err());
}

#[test]
fn row_standardization() {
    let cols = vec![vec![1.0, 5.0, 2.0], vec![3.0, 5.0, 2.0], vec![5.0, 5.0, 8.0]];
    let (out, scaling) = standardize_rows(&cols);
    assert_eq!(scaling[1].scale, 0.0);
    assert!(out.iter().all(|c| c[1] == 0.0));
    for r in [0, 2] {
        let mean: f64 = out.iter().map(|c| c[r]).sum::<f64>() / 3.0;
        let var: f64 = out.iter().map(|c| c[r] * c[r]).sum::<f64>() / 3.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }
}

#[test]
fn assembling_checks_dimensions() {
    let cfg = sim_config();
    let a = extract_features(&sim("ser03", 1), &cfg).unwrap();
    let mut b = a.clone();
    b.label = "other".into();
    b.ar_coeffs.pop();
    assert!(assemble_matrix(&[a.clone(), b], true).is_err());
    assert!(assemble_matrix(&[], true).is_err());
    let m = assemble_matrix(&[a.clone(), a], false).unwrap();
    assert_eq!(m.n(), 2);
    assert_eq!(m.distances()[0][1], 0.0);
}

#[test]
fn extraction_is_deterministic() {
    let cfg = sim_config();
    let s = sim("ser09", 3);
    assert_eq!(extract_features(&s, &cfg).unwrap(), extract_features(&s, &cfg).unwrap());
}

#[test]
fn same_mechanism_is_closer_than_seasonal_versus_integrated() {
    let cfg = PipelineConfig {
        stationarize: StationarizeMode::Auto,
        ..PipelineConfig::default()
    };
    let dist = |a: &FeatureVector, b: &FeatureVector| {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
    };
    let (mut within, mut between) = (0.0, 0.0);
    for seed in 0..30 {
        let a = extract_features(&sim("ser01", 2 * seed), &cfg).unwrap();
        let b = extract_features(&sim("ser01", 2 * seed + 1), &cfg).unwrap();
        let c = extract_features(&sim("ser06", seed), &cfg).unwrap();
        within += dist(&a, &b);
        between += dist(&a, &c);
    }
    assert!(within < between, "within {within} between {between}");
}

fn nonzero(f: &FeatureVector) -> usize {
    f.values().iter().filter(|v| **v != 0.0).count()
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]

    #[test]
    fn stricter_level_never_adds_entries(seed in 0u64..1000, which in 0usize..10, strict in 0.001f64..0.05) {
        let cfg = PipelineConfig {
            stationarize: StationarizeMode::Auto,
            ..PipelineConfig::default()
        };
        let s = sim(&format!("ser{:02}", which + 1), seed);
        let loose = extract_features(&s, &PipelineConfig { significance_level: 0.1, ..cfg.clone() }).unwrap();
        let tight = extract_features(&s, &PipelineConfig { significance_level: strict, ..cfg }).unwrap();
        proptest::prop_assert!(nonzero(&tight) <= nonzero(&loose));
    }

    #[test]
    fn standardizing_twice_changes_nothing(
        cols in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 6), 2..12)
    ) {
        let (once, _) = standardize_rows(&cols);
        let (twice, _) = standardize_rows(&once);
        for (a, b) in once.iter().flatten().zip(twice.iter().flatten()) {
            proptest::prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
    }
}
