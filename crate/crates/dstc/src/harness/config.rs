use crate::system::SystemConfig;
use crate::{Error, Result};

/// Transmission scheme under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    /// Spatial multiplexing through the relay, no space-time code.
    Sm,
    /// Alamouti re-encoding with the fixed identity code bank.
    DAlamouti,
    /// Alamouti re-encoding with random sphere code matrices per frame.
    RAlamouti,
    /// Adaptive code matrices, stochastic-gradient optimizer.
    CArmoSg,
    /// Adaptive code matrices, RLS optimizer.
    CArmoRls,
    /// Fully distributed determinant-based selection, no feedback.
    FdArmo,
}

impl Scheme {
    pub fn is_adaptive(self) -> bool {
        matches!(self, Scheme::CArmoSg | Scheme::CArmoRls)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sm" => Ok(Scheme::Sm),
            "d-alamouti" => Ok(Scheme::DAlamouti),
            "r-alamouti" => Ok(Scheme::RAlamouti),
            "c-armo-sg" => Ok(Scheme::CArmoSg),
            "c-armo-rls" => Ok(Scheme::CArmoRls),
            "fd-armo" => Ok(Scheme::FdArmo),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Sm => "sm",
            Scheme::DAlamouti => "d-alamouti",
            Scheme::RAlamouti => "r-alamouti",
            Scheme::CArmoSg => "c-armo-sg",
            Scheme::CArmoRls => "c-armo-rls",
            Scheme::FdArmo => "fd-armo",
        }
    }
}

/// When the destination pushes code matrices to the relay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeedbackSchedule {
    /// After every adaptation step.
    PerIteration,
    /// Once per frame, at the end of the pilot preamble.
    PerFrame,
}

/// Full experiment description; see the README for the file format.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub snr_grid_db: Vec<f64>,
    pub frames: usize,
    pub frame_len: usize,
    pub pilot_len: usize,
    pub master_seed: u64,
    pub direct_link: bool,
    pub relay_power: f64,
    /// SG step sizes.
    pub beta: f64,
    pub mu: f64,
    /// RLS forgetting factor; delta follows the SNR regime.
    pub lambda: f64,
    /// Quantized feedback: None models a perfect feedback link.
    pub feedback_p: Option<f64>,
    pub feedback_schedule: FeedbackSchedule,
    /// Sphere candidates for FD-ARMO.
    pub candidates: usize,
    /// Sliding window width for convergence traces.
    pub window: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scheme: Scheme::DAlamouti,
            snr_grid_db: vec![0.0, 5.0, 10.0],
            frames: 200,
            frame_len: 100,
            pilot_len: 50,
            master_seed: 1,
            direct_link: false,
            relay_power: 1.0,
            beta: 0.01,
            mu: 0.03,
            lambda: 0.998,
            feedback_p: None,
            feedback_schedule: FeedbackSchedule::PerFrame,
            candidates: 500,
            window: 20,
        }
    }
}

impl ExperimentConfig {
    /// System parameters at a given noise level.
    pub fn system(&self, noise_var: f64) -> SystemConfig {
        let mut sys = SystemConfig::alamouti(noise_var, self.direct_link);
        sys.relay_power = self.relay_power;
        sys
    }

    /// Parse the flat key-value format: one `key = value` per line, `#`
    /// starts a comment, unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |what: &str| Error::Config(format!("line {}: bad {what} '{value}'", lineno + 1));
            match key {
                "scheme" => cfg.scheme = Scheme::parse(value)?,
                "snr_db" => {
                    cfg.snr_grid_db = value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("snr list"))?;
                }
                "frames" => cfg.frames = value.parse().map_err(|_| bad("integer"))?,
                "frame_len" => cfg.frame_len = value.parse().map_err(|_| bad("integer"))?,
                "pilot_len" => cfg.pilot_len = value.parse().map_err(|_| bad("integer"))?,
                "seed" => cfg.master_seed = value.parse().map_err(|_| bad("integer"))?,
                "direct_link" => cfg.direct_link = value.parse().map_err(|_| bad("bool"))?,
                "relay_power" => cfg.relay_power = value.parse().map_err(|_| bad("number"))?,
                "beta" => cfg.beta = value.parse().map_err(|_| bad("number"))?,
                "mu" => cfg.mu = value.parse().map_err(|_| bad("number"))?,
                "lambda" => cfg.lambda = value.parse().map_err(|_| bad("number"))?,
                "feedback_p" => {
                    cfg.feedback_p = if value == "off" {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("probability"))?)
                    };
                }
                "feedback_schedule" => {
                    cfg.feedback_schedule = match value {
                        "iteration" => FeedbackSchedule::PerIteration,
                        "frame" => FeedbackSchedule::PerFrame,
                        _ => return Err(bad("schedule")),
                    };
                }
                "candidates" => cfg.candidates = value.parse().map_err(|_| bad("integer"))?,
                "window" => cfg.window = value.parse().map_err(|_| bad("integer"))?,
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        lineno + 1
                    )))
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::Config("empty SNR grid".into()));
        }
        if self.frames == 0 || self.frame_len == 0 {
            return Err(Error::Config("frames and frame_len must be positive".into()));
        }
        if self.pilot_len >= self.frame_len && self.scheme.is_adaptive() {
            return Err(Error::Config("pilot_len must be below frame_len".into()));
        }
        if self.relay_power <= 0.0 {
            return Err(Error::Config("relay_power must be positive".into()));
        }
        if let Some(p) = self.feedback_p {
            if !(0.0..=0.5).contains(&p) {
                return Err(Error::Config("feedback_p must lie in [0, 0.5]".into()));
            }
            if !self.scheme.is_adaptive() {
                return Err(Error::Config(
                    "feedback_p only applies to the adaptive C-ARMO schemes".into(),
                ));
            }
        }
        if self.scheme == Scheme::FdArmo && self.candidates == 0 {
            return Err(Error::Config("candidates must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: &str) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = ExperimentConfig::parse(
            "# experiment\n\
             scheme = c-armo-sg\n\
             snr_db = 0, 5, 10  # grid\n\
             frames = 50\n\
             frame_len = 200\n\
             pilot_len = 40\n\
             seed = 99\n\
             direct_link = true\n\
             beta = 0.02\n\
             mu = 0.01\n\
             feedback_p = 0.001\n\
             feedback_schedule = frame\n",
        )
        .unwrap();
        assert_eq!(cfg.scheme, Scheme::CArmoSg);
        assert_eq!(cfg.snr_grid_db, vec![0.0, 5.0, 10.0]);
        assert_eq!(cfg.frames, 50);
        assert_eq!(cfg.master_seed, 99);
        assert!(cfg.direct_link);
        assert_eq!(cfg.feedback_p, Some(0.001));
        assert_eq!(cfg.feedback_schedule, FeedbackSchedule::PerFrame);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(ExperimentConfig::parse("nope = 1").is_err());
        assert!(ExperimentConfig::parse("scheme = warp").is_err());
        assert!(ExperimentConfig::parse("frames = 0").is_err());
        assert!(ExperimentConfig::parse("scheme = sm\nfeedback_p = 0.001").is_err());
        assert!(ExperimentConfig::parse("snr_db = ").is_err());
        assert!(ExperimentConfig::parse("scheme = c-armo-sg\nframe_len = 10\npilot_len = 10").is_err());
    }

    #[test]
    fn defaults_follow_protocol() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.beta, 0.01);
        assert_eq!(cfg.mu, 0.03);
        assert_eq!(cfg.pilot_len, 50);
        assert_eq!(cfg.frame_len, 100);
        assert_eq!(cfg.candidates, 500);
        assert!(cfg.feedback_p.is_none());
        cfg.validate().unwrap();
    }
}
