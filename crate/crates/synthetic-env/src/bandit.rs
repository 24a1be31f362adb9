use aos_core::ArmId;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("a bandit needs at least one arm")]
    NoArms,
    #[error("mean of arm {arm} is {mean}, outside [0, 1]")]
    MeanOutOfRange { arm: usize, mean: f64 },
    #[error("jitter width must be a finite non-negative number, got {0}")]
    BadWidth(f64),
    #[error("drift describes {got} arms but the bandit has {expected}")]
    DriftShape { expected: usize, got: usize },
    #[error("drift rate for arm {arm} is not finite")]
    BadRate { arm: usize },
    #[error("controller has {controller} arms but the bandit has {bandit}")]
    ArmCount { controller: usize, bandit: usize },
    #[error("an episode needs at least one step")]
    NoSteps,
    #[error(transparent)]
    Aos(#[from] aos_core::AosError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    /// 1 with probability `mean`, else 0.
    Bernoulli,
    /// `mean + u` with `u ~ Uniform(-width/2, width/2)`, clamped to `[0, 1]`.
    UniformJitter(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Drift {
    /// Each step adds `rates[arm]` to that arm's mean.
    Linear(Vec<f64>),
    /// From step `at` onward the means are replaced by `means`.
    Switch { at: u64, means: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BanditSpec {
    pub arm_means: Vec<f64>,
    pub noise: Noise,
    pub drift: Option<Drift>,
}

fn check_means(means: &[f64]) -> Result<(), EnvError> {
    for (arm, &mean) in means.iter().enumerate() {
        if !(0.0..=1.0).contains(&mean) {
            return Err(EnvError::MeanOutOfRange { arm, mean });
        }
    }
    Ok(())
}

impl BanditSpec {
    pub fn stationary(arm_means: Vec<f64>, noise: Noise) -> Self {
        BanditSpec {
            arm_means,
            noise,
            drift: None,
        }
    }

    pub fn with_drift(mut self, drift: Drift) -> Self {
        self.drift = Some(drift);
        self
    }

    pub fn n_arms(&self) -> usize {
        self.arm_means.len()
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        if self.arm_means.is_empty() {
            return Err(EnvError::NoArms);
        }
        check_means(&self.arm_means)?;
        if let Noise::UniformJitter(w) = self.noise {
            if !w.is_finite() || w < 0.0 {
                return Err(EnvError::BadWidth(w));
            }
        }
        let (got, rates) = match &self.drift {
            None => return Ok(()),
            Some(Drift::Linear(rates)) => (rates.len(), Some(rates)),
            Some(Drift::Switch { means, .. }) => {
                check_means(means)?;
                (means.len(), None)
            }
        };
        if got != self.n_arms() {
            return Err(EnvError::DriftShape {
                expected: self.n_arms(),
                got,
            });
        }
        if let Some(arm) = rates.and_then(|r| r.iter().position(|x| !x.is_finite())) {
            return Err(EnvError::BadRate { arm });
        }
        Ok(())
    }

    /// Mean of `arm` at `step`, always within `[0, 1]`.
    ///
    /// # Panics
    ///
    /// If `arm` is out of range.
    pub fn mean(&self, arm: ArmId, step: u64) -> f64 {
        let base = self.arm_means[arm.index()];
        let m = match &self.drift {
            None => base,
            Some(Drift::Linear(rates)) => base + rates[arm.index()] * step as f64,
            Some(Drift::Switch { at, means }) if step >= *at => means[arm.index()],
            Some(Drift::Switch { .. }) => base,
        };
        m.clamp(0.0, 1.0)
    }

    /// Arm with the highest mean at `step`; ties go to the lowest index.
    pub fn best_arm(&self, step: u64) -> ArmId {
        let mut best = ArmId(0);
        for a in 1..self.n_arms() {
            if self.mean(ArmId(a), step) > self.mean(best, step) {
                best = ArmId(a);
            }
        }
        best
    }
}

/// One noisy reward from `arm` at `step`.
///
/// # Panics
///
/// If `arm` is out of range.
pub fn pull<R: Rng + ?Sized>(spec: &BanditSpec, arm: ArmId, step: u64, rng: &mut R) -> f64 {
    let mean = spec.mean(arm, step);
    match spec.noise {
        Noise::Bernoulli => {
            if rng.gen::<f64>() < mean {
                1.0
            } else {
                0.0
            }
        }
        Noise::UniformJitter(width) => (mean + (rng.gen::<f64>() - 0.5) * width).clamp(0.0, 1.0),
    }
}
