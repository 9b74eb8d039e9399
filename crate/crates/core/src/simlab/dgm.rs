//! Parametric data-generating mechanisms and their simulation.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DgmKind {
    Arma,
    SeasonalArma,
    IntegratedArma,
    /// Multi-regime SETAR switched by `y_{t-delay}`.
    Setar3,
}

impl DgmKind {
    pub const ALL: [&'static str; 4] = ["arma", "seasonal_arma", "integrated_arma", "setar3"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetarRegimeSpec {
    pub intercept: f64,
    /// `(lag, coefficient)` pairs.
    pub ar: Vec<(usize, f64)>,
}

/// `y_t = sum ar_i y_{t-i} + e_t + sum ma_j e_{t-j}` for the linear kinds;
/// for `Setar3` the regime with `r_{j-1} < y_{t-delay} <= r_j` supplies an
/// intercept and AR terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgmSpec {
    pub name: String,
    pub kind: DgmKind,
    #[serde(default)]
    pub ar: Vec<(usize, f64)>,
    #[serde(default)]
    pub ma: Vec<(usize, f64)>,
    #[serde(default)]
    pub regimes: Vec<SetarRegimeSpec>,
    #[serde(default)]
    pub thresholds: Vec<f64>,
    #[serde(default = "one")]
    pub delay: usize,
}

fn one() -> usize {
    1
}

impl DgmSpec {
    pub fn linear(name: &str, kind: DgmKind, ar: &[(usize, f64)], ma: &[(usize, f64)]) -> Self {
        Self {
            name: name.to_string(),
            kind,
            ar: ar.to_vec(),
            ma: ma.to_vec(),
            regimes: Vec::new(),
            thresholds: Vec::new(),
            delay: 1,
        }
    }

    pub fn setar(name: &str, regimes: &[(f64, &[f64])], thresholds: &[f64], delay: usize) -> Self {
        Self {
            name: name.to_string(),
            kind: DgmKind::Setar3,
            ar: Vec::new(),
            ma: Vec::new(),
            regimes: regimes
                .iter()
                .map(|(c, phi)| SetarRegimeSpec {
                    intercept: *c,
                    ar: phi.iter().enumerate().map(|(i, &v)| (i + 1, v)).collect(),
                })
                .collect(),
            thresholds: thresholds.to_vec(),
            delay,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let lags = self
            .ar
            .iter()
            .chain(&self.ma)
            .chain(self.regimes.iter().flat_map(|r| &r.ar));
        if lags.clone().any(|(l, _)| *l == 0) {
            return Err(Error::invalid(format!("{}: lag indices must be positive", self.name)));
        }
        if self.kind == DgmKind::Setar3 {
            if self.regimes.len() != self.thresholds.len() + 1 || self.regimes.is_empty() {
                return Err(Error::invalid(format!(
                    "{}: {} regimes need {} thresholds",
                    self.name,
                    self.regimes.len(),
                    self.regimes.len().saturating_sub(1)
                )));
            }
            if self.thresholds.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!(
                    "{}: thresholds must be strictly increasing",
                    self.name
                )));
            }
            if self.delay == 0 {
                return Err(Error::invalid(format!("{}: delay must be positive", self.name)));
            }
        }
        Ok(())
    }

    pub fn max_lag(&self) -> usize {
        let lin = self.ar.iter().chain(&self.ma).map(|(l, _)| *l);
        let reg = self.regimes.iter().flat_map(|r| r.ar.iter().map(|(l, _)| *l));
        let delay = if self.kind == DgmKind::Setar3 { self.delay } else { 0 };
        lin.chain(reg).max().unwrap_or(0).max(delay)
    }

    fn regime_for(&self, z: f64) -> usize {
        self.thresholds.iter().filter(|&&r| r < z).count()
    }

    /// Run the recursion from a given pre-sample history (most recent last)
    /// with given innovations; returns one value per innovation. Pre-sample
    /// innovations are zero.
    pub fn generate(&self, history: &[f64], innovations: &[f64]) -> Vec<f64> {
        let h = history.len();
        let mut y = history.to_vec();
        y.reserve(innovations.len());
        let mut e = vec![0.0; h];
        e.extend_from_slice(innovations);
        let at = |v: &[f64], t: usize, lag: usize| if t >= lag { v[t - lag] } else { 0.0 };
        for t in h..h + innovations.len() {
            let value = match self.kind {
                DgmKind::Setar3 => {
                    let regime = &self.regimes[self.regime_for(at(&y, t, self.delay))];
                    regime.intercept
                        + regime.ar.iter().map(|&(l, c)| c * at(&y, t, l)).sum::<f64>()
                        + e[t]
                }
                _ => {
                    self.ar.iter().map(|&(l, c)| c * at(&y, t, l)).sum::<f64>()
                        + e[t]
                        + self.ma.iter().map(|&(l, c)| c * at(&e, t, l)).sum::<f64>()
                }
            };
            y.push(value);
        }
        y.split_off(h)
    }
}

/// Simulate `length` observations after discarding `burn_in` from a zero
/// start, with standard normal innovations drawn from `seed`.
pub fn simulate(spec: &DgmSpec, length: usize, burn_in: usize, seed: u64) -> Result<TimeSeries> {
    spec.validate()?;
    if length == 0 {
        return Err(Error::invalid("length must be positive"));
    }
    if burn_in < spec.max_lag() {
        return Err(Error::invalid(format!(
            "burn-in {burn_in} shorter than the largest lag {}",
            spec.max_lag()
        )));
    }
    let mut rng = stream(seed, &[]);
    let innovations: Vec<f64> = (0..burn_in + length)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let history = vec![0.0; spec.max_lag()];
    let mut path = spec.generate(&history, &innovations);
    if let Some(pos) = path.iter().position(|v| !v.is_finite()) {
        return Err(Error::GenerationFailure(format!(
            "{} overflowed at step {pos}",
            spec.name
        )));
    }
    let kept = path.split_off(burn_in);
    Ok(TimeSeries::new(kept)?.with_label(spec.name.clone()))
}

/// The ten mechanisms of the reference recovery experiment.
pub fn reference_dgms() -> Vec<DgmSpec> {
    use DgmKind::*;
    vec![
        DgmSpec::linear("ser01", SeasonalArma, &[(12, 0.80)], &[(12, 0.70)]),
        DgmSpec::linear("ser02", SeasonalArma, &[(24, -0.70)], &[(6, 0.80)]),
        DgmSpec::linear(
            "ser03",
            Arma,
            &[(1, 0.80), (2, -0.40), (3, 0.15)],
            &[(1, -0.20), (2, 0.25)],
        ),
        DgmSpec::linear(
            "ser04",
            Arma,
            &[(1, 0.90), (2, -0.80), (3, 0.55)],
            &[(1, 0.80), (2, 0.50)],
        ),
        DgmSpec::linear(
            "ser05",
            Arma,
            &[(1, 1.10), (2, -0.60), (3, -0.20)],
            &[(1, 0.30), (2, -0.70)],
        ),
        DgmSpec::linear(
            "ser06",
            IntegratedArma,
            &[(1, 2.55), (2, -2.30), (3, 0.75)],
            &[(1, 0.80), (2, 0.50)],
        ),
        DgmSpec::setar(
            "ser07",
            &[(2.0, &[-0.40, -0.10]), (-0.05, &[0.20, 0.70]), (0.05, &[-0.45, 0.15])],
            &[-1.0, 1.0],
            1,
        ),
        DgmSpec::setar(
            "ser08",
            &[(-0.50, &[0.40, -0.10]), (0.05, &[0.20, 0.80]), (0.05, &[-0.45, 0.15])],
            &[0.0, 4.0],
            1,
        ),
        DgmSpec::setar(
            "ser09",
            &[(-0.15, &[0.74, -0.15]), (1.90, &[0.20, -1.30]), (1.00, &[0.50, -1.15])],
            &[-1.2, 1.2],
            1,
        ),
        DgmSpec::setar(
            "ser10",
            &[(3.0, &[0.50, -0.80, 0.40]), (6.0, &[0.90]), (4.0, &[0.70, -0.80])],
            &[3.0, 9.0],
            1,
        ),
    ]
}

/// Look up a reference mechanism by name (`ser01` .. `ser10`).
pub fn reference_dgm(name: &str) -> Result<DgmSpec> {
    reference_dgms()
        .into_iter()
        .find(|d| d.name == name)
        .ok_or_else(|| {
            let names: Vec<String> = reference_dgms().into_iter().map(|d| d.name).collect();
            Error::invalid(format!(
                "unknown DGM `{name}`; valid names: {}; custom kinds: {}",
                names.join(", "),
                DgmKind::ALL.join(", ")
            ))
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::acf_values;

    #[test]
    fn simulation_is_deterministic_per_seed() {
        for spec in reference_dgms() {
            let a = simulate(&spec, 200, 100, 5).unwrap();
            let b = simulate(&spec, 200, 100, 5).unwrap();
            let c = simulate(&spec, 200, 100, 6).unwrap();
            assert_eq!(a.values(), b.values(), "{}", spec.name);
            assert_ne!(&a.values()[..10], &c.values()[..10], "{}", spec.name);
        }
    }

    #[test]
    fn stationary_mechanisms_stay_bounded() {
        for name in ["ser01", "ser02", "ser03", "ser04", "ser05", "ser07", "ser08", "ser09"] {
            let spec = reference_dgm(name).unwrap();
            for seed in 0..30 {
                let s = simulate(&spec, 5000, 200, seed).unwrap();
                let peak = s.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
                assert!(peak < 1e3, "{name} seed {seed}: {peak}");
            }
        }
    }

    #[test]
    fn integrated_mechanism_variance_grows() {
        let spec = reference_dgm("ser06").unwrap();
        let var = |v: &[f64]| {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64
        };
        let mut grew = 0;
        for seed in 0..20 {
            let s = simulate(&spec, 4000, 200, seed).unwrap();
            if var(&s.values()[..400]) < var(s.values()) {
                grew += 1;
            }
        }
        assert!(grew >= 16, "{grew}/20");
    }

    /// Theoretical ACF of an ARMA process from its psi-weights.
    fn arma_acf(ar: &[(usize, f64)], ma: &[(usize, f64)], lags: usize) -> Vec<f64> {
        let n = 400;
        let mut psi = vec![0.0; n];
        psi[0] = 1.0;
        for j in 1..n {
            let theta = ma.iter().find(|(l, _)| *l == j).map_or(0.0, |(_, c)| *c);
            psi[j] = theta + ar.iter().filter(|(l, _)| *l <= j).map(|(l, c)| c * psi[j - l]).sum::<f64>();
        }
        let gamma = |h: usize| (0..n - h).map(|j| psi[j] * psi[j + h]).sum::<f64>();
        let g0 = gamma(0);
        (1..=lags).map(|h| gamma(h) / g0).collect()
    }

    #[test]
    fn arma_sample_acf_matches_theory() {
        let spec = reference_dgm("ser03").unwrap();
        let theory = arma_acf(&spec.ar, &spec.ma, 6);
        let s = simulate(&spec, 40_000, 500, 11).unwrap();
        let sample = acf_values(s.values(), 6).unwrap();
        for (h, (t, e)) in theory.iter().zip(&sample).enumerate() {
            assert!((t - e).abs() < 0.03, "lag {}: theory {t:.3} sample {e:.3}", h + 1);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let zero_lag = DgmSpec::linear("x", DgmKind::Arma, &[(0, 0.5)], &[]);
        assert!(zero_lag.validate().is_err());
        let mut unordered = reference_dgm("ser07").unwrap();
        unordered.thresholds = vec![1.0, -1.0];
        assert!(unordered.validate().is_err());
        let mut missing = reference_dgm("ser07").unwrap();
        missing.thresholds.pop();
        assert!(missing.validate().is_err());
        let mut no_delay = reference_dgm("ser07").unwrap();
        no_delay.delay = 0;
        assert!(no_delay.validate().is_err());
        assert!(simulate(&reference_dgm("ser02").unwrap(), 100, 10, 0).is_err());
        assert!(simulate(&reference_dgm("ser03").unwrap(), 0, 10, 0).is_err());
        assert!(reference_dgm("ser11").unwrap_err().to_string().contains("ser10"));
    }

    #[test]
    fn thresholds_are_half_open_from_below() {
        let spec = DgmSpec::setar("step", &[(-1.0, &[]), (0.0, &[]), (1.0, &[])], &[-1.0, 1.0], 1);
        let next = |z: f64| spec.generate(&[z], &[0.0])[0];
        assert_eq!(next(-1.0), -1.0);
        assert_eq!(next(-0.999), 0.0);
        assert_eq!(next(1.0), 0.0);
        assert_eq!(next(1.001), 1.0);
    }
}
