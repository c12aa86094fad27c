use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use super::matrix_file::{parse_matrix_file, Deviations};
use super::montecarlo::DEFAULT_SAMPLES;
use super::report::Format;
use crate::channels::DecayRate;
use crate::dynamics::{uniform_grid, ChannelFamily, SweepConfig, DEFAULT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::qstate::{bell_phi_plus, make_x_state, remark_state, DensityMatrix, XStateParams};

/// Named or parametrized input state.
///
/// Accepted forms: `state1`, `state2`, `remark`, `bell`, and `x:c,b,z,w`
/// (the `x:` prefix is optional).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    X(XStateParams),
    Remark,
    Bell,
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix> {
        match self {
            StateSpec::X(p) => make_x_state(*p),
            StateSpec::Remark => Ok(remark_state()),
            StateSpec::Bell => Ok(bell_phi_plus()),
        }
    }

    /// X-state parameters, when the state has that form.
    pub fn x_params(&self) -> Option<XStateParams> {
        match self {
            StateSpec::X(p) => Some(*p),
            StateSpec::Remark => Some(XStateParams {
                c: 0.25,
                b: 0.25,
                z: 0.25,
                w: 0.25,
            }),
            StateSpec::Bell => Some(XStateParams {
                c: 0.5,
                b: 0.0,
                z: 0.0,
                w: 0.5,
            }),
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "state1" => return Ok(StateSpec::X(XStateParams::STATE_1)),
            "state2" => return Ok(StateSpec::X(XStateParams::STATE_2)),
            "remark" => return Ok(StateSpec::Remark),
            "bell" => return Ok(StateSpec::Bell),
            _ => {}
        }
        let body = t.strip_prefix("x:").unwrap_or(&t);
        let values: Vec<f64> = body
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownState(s.to_string()))?;
        match values.as_slice() {
            [c, b, z, w] => Ok(StateSpec::X(XStateParams::new(*c, *b, *z, *w)?)),
            _ => Err(Error::UnknownState(s.to_string())),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::X(p) if *p == XStateParams::STATE_1 => f.write_str("state1"),
            StateSpec::X(p) if *p == XStateParams::STATE_2 => f.write_str("state2"),
            StateSpec::X(p) => write!(f, "x:{},{},{},{}", p.c, p.b, p.z, p.w),
            StateSpec::Remark => f.write_str("remark"),
            StateSpec::Bell => f.write_str("bell"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Spec(StateSpec),
    MatrixFile(PathBuf),
}

/// A loaded input state together with any projection diagnostics.
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: DensityMatrix,
    pub deviations: Option<Deviations>,
    pub matrix: Option<super::MatrixFile>,
}

impl StateSource {
    pub fn load(&self) -> Result<LoadedState> {
        match self {
            StateSource::Spec(spec) => Ok(LoadedState {
                state: spec.build()?,
                deviations: None,
                matrix: None,
            }),
            StateSource::MatrixFile(path) => {
                let parsed = parse_matrix_file(path)?;
                Ok(LoadedState {
                    state: parsed.state,
                    deviations: Some(parsed.deviations),
                    matrix: Some(parsed.file),
                })
            }
        }
    }
}

/// Everything a CLI run needs.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub state: StateSource,
    pub channel: ChannelFamily,
    pub gamma: f64,
    pub grid_points: usize,
    pub sweep: SweepConfig,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            state: StateSource::Spec(StateSpec::X(XStateParams::STATE_1)),
            channel: ChannelFamily::PhaseDamping,
            gamma: 1.0,
            grid_points: DEFAULT_GRID_POINTS,
            sweep: SweepConfig::default(),
            samples: DEFAULT_SAMPLES,
            seed: 0,
            out: None,
            format: Format::Csv,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        DecayRate::new(self.gamma)?;
        if self.grid_points == 0 {
            return Err(Error::Grid("grid needs at least one point".into()));
        }
        let s = &self.sweep;
        let o = &s.optimizer;
        if o.theta_steps < 2 || o.phi_steps < 2 {
            return Err(Error::Config(
                "optimizer grid needs at least 2x2 points".into(),
            ));
        }
        if o.basins == 0 {
            return Err(Error::Config("optimizer needs at least one basin".into()));
        }
        let tolerances = [
            ("optimizer tolerance", o.tolerance),
            ("plateau tolerance", s.plateau_tol),
            ("monotone slack", s.monotone_slack),
            ("jump angle", s.jump_angle),
            ("jump value tolerance", s.jump_value_tol),
            ("bisection tolerance", s.bisection_tol),
        ];
        for (name, v) in tolerances {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        uniform_grid(self.grid_points)
    }

    /// Sweep thresholds with the configured decay rate.
    pub fn sweep_config(&self) -> Result<SweepConfig> {
        Ok(SweepConfig {
            decay_rate: DecayRate::new(self.gamma)?,
            ..self.sweep
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_specs_parse() {
        assert_eq!(
            "state1".parse::<StateSpec>().unwrap(),
            StateSpec::X(XStateParams::STATE_1)
        );
        assert_eq!(
            "STATE2".parse::<StateSpec>().unwrap(),
            StateSpec::X(XStateParams::STATE_2)
        );
        assert_eq!("remark".parse::<StateSpec>().unwrap(), StateSpec::Remark);
        let x: StateSpec = "x:0.4,0.1,0.1,0.4".parse().unwrap();
        assert_eq!(x, StateSpec::X(XStateParams::STATE_1));
        let bare: StateSpec = "0.3,0.2,0.1,0.05".parse().unwrap();
        assert_eq!(bare.to_string(), "x:0.3,0.2,0.1,0.05");
        assert!("x:0.3,0.2,0.1".parse::<StateSpec>().is_err());
        assert!("nonsense".parse::<StateSpec>().is_err());
        assert!(matches!(
            "x:0.6,0.1,0,0".parse::<StateSpec>(),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn named_states_match_their_x_params() {
        for spec in [StateSpec::Remark, StateSpec::Bell] {
            let direct = spec.build().unwrap();
            let via = make_x_state(spec.x_params().unwrap()).unwrap();
            assert!(direct.max_abs_diff(&via) < 1e-15, "{spec}");
        }
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let mut c = RunConfig {
            gamma: 0.0,
            ..RunConfig::default()
        };
        assert!(c.validate().is_err());
        c.gamma = 2.0;
        c.sweep.plateau_tol = -1.0;
        assert!(c.validate().is_err());
        c.sweep.plateau_tol = 1e-6;
        c.grid_points = 0;
        assert!(c.validate().is_err());
        c.grid_points = 3;
        assert_eq!(c.grid().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(c.sweep_config().unwrap().decay_rate.gamma(), 2.0);
    }
}
