use std::fmt;
use std::str::FromStr;

use crate::datagen::{Ar1Noise, FactorFamily};
use crate::error::{Error, Result};
use crate::estimators::{
    monte_carlo_sw_pp, sw_gaussian_uncentered, sw_hat, EmpiricalDistribution, ProjectionLaw,
    SwEstimate,
};

/// Synthetic data regime of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scenario {
    GaussianNonCentered,
    GaussianCentered,
    GammaNonCentered,
    GammaCentered,
    Ar1Gaussian,
    Ar1StudentT,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::GaussianNonCentered,
        Scenario::GaussianCentered,
        Scenario::GammaNonCentered,
        Scenario::GammaCentered,
        Scenario::Ar1Gaussian,
        Scenario::Ar1StudentT,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::GaussianNonCentered => "gaussian-noncentered",
            Scenario::GaussianCentered => "gaussian-centered",
            Scenario::GammaNonCentered => "gamma-noncentered",
            Scenario::GammaCentered => "gamma-centered",
            Scenario::Ar1Gaussian => "ar1-gaussian",
            Scenario::Ar1StudentT => "ar1-student-t",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        self as u64 + 1
    }

    pub fn factor_family(self) -> Option<FactorFamily> {
        match self {
            Scenario::GaussianNonCentered | Scenario::GaussianCentered => {
                Some(FactorFamily::GaussianFactors)
            }
            Scenario::GammaNonCentered | Scenario::GammaCentered => {
                Some(FactorFamily::GammaFactors)
            }
            Scenario::Ar1Gaussian | Scenario::Ar1StudentT => None,
        }
    }

    pub fn ar1_noise(self) -> Option<Ar1Noise> {
        match self {
            Scenario::Ar1Gaussian => Some(Ar1Noise::Gaussian01),
            Scenario::Ar1StudentT => Some(Ar1Noise::StudentT10),
            _ => None,
        }
    }

    pub fn is_ar1(self) -> bool {
        self.ar1_noise().is_some()
    }

    pub fn is_centered(self) -> bool {
        matches!(self, Scenario::GaussianCentered | Scenario::GammaCentered)
    }

    /// The approximation whose error the convergence experiment tracks.
    ///
    /// Centered data use the mean-corrected estimator. Non-centered factor data
    /// use the raw-moment Gaussian approximation, whose error does not vanish.
    /// AR(1) data have zero population mean and use the raw-moment form too, so
    /// the finite-sample mean estimate does not enter the error.
    pub fn convergence_method(self) -> MethodSpec {
        if self.is_centered() {
            MethodSpec::Deterministic
        } else {
            MethodSpec::GaussianUncentered
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .iter()
            .copied()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
                Error::InvalidConfig(format!(
                    "unknown scenario {s:?}; expected one of {}",
                    names.join(", ")
                ))
            })
    }
}

/// What the estimates are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reference {
    /// Exact value: the isotropic-Gaussian closed form, or 0 for AR(1) pairs
    /// drawn from the same law.
    ClosedForm,
    /// Sphere Monte Carlo with this many projections, on a stream disjoint
    /// from every method.
    MonteCarlo { projections: usize },
}

/// Reference projection count used where no closed form exists.
pub const REFERENCE_PROJECTIONS: usize = 20_000;

/// An estimator to evaluate in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Deterministic,
    GaussianUncentered,
    MonteCarlo {
        law: ProjectionLaw,
        projections: usize,
    },
}

impl MethodSpec {
    pub fn label(&self) -> String {
        match self {
            MethodSpec::Deterministic => "deterministic".into(),
            MethodSpec::GaussianUncentered => "gaussian-uncentered".into(),
            MethodSpec::MonteCarlo { law, projections } => {
                format!("{}-L{projections}", law.method().label())
            }
        }
    }

    pub fn evaluate(
        &self,
        x: &EmpiricalDistribution,
        y: &EmpiricalDistribution,
        seed: u64,
    ) -> Result<SwEstimate> {
        match *self {
            MethodSpec::Deterministic => sw_hat(x, y),
            MethodSpec::GaussianUncentered => sw_gaussian_uncentered(x, y),
            MethodSpec::MonteCarlo { law, projections } => {
                Ok(monte_carlo_sw_pp(x, y, projections, 2.0, law, seed)?.estimate)
            }
        }
    }
}

/// Declarative description of a convergence or timing experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    /// Strictly increasing dimensions.
    pub d_grid: Vec<usize>,
    pub n: usize,
    pub runs: usize,
    /// AR(1) coefficients; ignored for factor scenarios.
    pub alpha_list: Vec<f64>,
    pub reference: Reference,
    pub methods: Vec<MethodSpec>,
    pub master_seed: u64,
    /// AR(1) burn-in steps.
    pub burn_in: usize,
    /// Worker threads for independent cells; 0 uses the ambient rayon pool.
    pub workers: usize,
    /// Timed repetitions per estimator call in the timing experiment.
    pub timing_repetitions: usize,
}

pub const DESK_D_GRID: [usize; 5] = [10, 32, 100, 316, 1000];
pub const DESK_RUNS: usize = 20;
pub const DESK_N: usize = 2000;
pub const DESK_BURN_IN: usize = 1000;
pub const FULL_RUNS: usize = 100;
pub const FULL_N: usize = 10_000;
pub const FULL_BURN_IN: usize = 10_000;
pub const DEFAULT_ALPHAS: [f64; 3] = [0.2, 0.5, 0.8];
pub const TIMING_PROJECTIONS: [usize; 3] = [100, 1000, 5000];

impl ExperimentConfig {
    /// Convergence experiment at desk scale.
    pub fn desk(scenario: Scenario) -> Self {
        let reference = match scenario.factor_family() {
            Some(FactorFamily::GammaFactors) => Reference::MonteCarlo {
                projections: REFERENCE_PROJECTIONS,
            },
            _ => Reference::ClosedForm,
        };
        Self {
            scenario,
            d_grid: DESK_D_GRID.to_vec(),
            n: DESK_N,
            runs: DESK_RUNS,
            alpha_list: if scenario.is_ar1() {
                DEFAULT_ALPHAS.to_vec()
            } else {
                Vec::new()
            },
            reference,
            methods: vec![scenario.convergence_method()],
            master_seed: 0,
            burn_in: DESK_BURN_IN,
            workers: 0,
            timing_repetitions: 3,
        }
    }

    /// Convergence experiment at full size: n = 10⁴, 100 runs.
    pub fn full_scale(scenario: Scenario) -> Self {
        Self {
            n: FULL_N,
            runs: FULL_RUNS,
            burn_in: FULL_BURN_IN,
            ..Self::desk(scenario)
        }
    }

    /// Accuracy/time comparison on centered Gamma data at desk scale.
    pub fn timing_desk() -> Self {
        let mut methods = vec![MethodSpec::Deterministic];
        methods.extend(TIMING_PROJECTIONS.iter().map(|&l| MethodSpec::MonteCarlo {
            law: ProjectionLaw::SphereUniform,
            projections: l,
        }));
        Self {
            methods,
            reference: Reference::MonteCarlo {
                projections: REFERENCE_PROJECTIONS,
            },
            ..Self::desk(Scenario::GammaCentered)
        }
    }

    pub fn timing_full_scale() -> Self {
        Self {
            n: FULL_N,
            runs: FULL_RUNS,
            burn_in: FULL_BURN_IN,
            ..Self::timing_desk()
        }
    }

    /// AR(1) coefficients of the cells, or a single `None` for factor scenarios.
    pub(crate) fn alphas(&self) -> Vec<Option<f64>> {
        if self.scenario.is_ar1() {
            self.alpha_list.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.d_grid.is_empty() {
            return bad("d_grid is empty".into());
        }
        if self.d_grid[0] == 0 || self.d_grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "d_grid must be positive and strictly increasing, got {:?}",
                self.d_grid
            ));
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("no methods to evaluate".into());
        }
        if self.timing_repetitions == 0 {
            return bad("timing repetitions must be at least 1".into());
        }
        for m in &self.methods {
            if let MethodSpec::MonteCarlo { projections: 0, .. } = m {
                return bad("Monte Carlo methods need at least one projection".into());
            }
        }
        if self.scenario.is_ar1() {
            if self.alpha_list.is_empty() {
                return bad(format!("{} needs at least one alpha", self.scenario));
            }
            if let Some(a) = self.alpha_list.iter().find(|a| !(0.0..1.0).contains(*a)) {
                return bad(format!("alpha must lie in [0, 1), got {a}"));
            }
        }
        match self.reference {
            Reference::ClosedForm
                if self.scenario.factor_family() == Some(FactorFamily::GammaFactors) =>
            {
                bad(format!("{} has no closed-form reference", self.scenario))
            }
            Reference::MonteCarlo { projections: 0 } => {
                bad("reference needs at least one projection".into())
            }
            _ => Ok(()),
        }
    }
}
