//! Scenario files: physical inputs as ratios to `Delta_b`, a Hilbert-space
//! cutoff, and one experiment description selected by `kind`.

use std::f64::consts::PI;
use std::path::Path;

use mixedopt::fock::HilbertConfig;
use mixedopt::ode::Tolerances;
use mixedopt::params::{self, ModelParams};
use mixedopt::tomography::WignerGridSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Either a number or the keyword `"match"`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Setting {
    Value(f64),
    Keyword(Keyword),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Keyword {
    Match,
}

impl Setting {
    pub const MATCH: Setting = Setting::Keyword(Keyword::Match);
}

/// Model inputs as written in a scenario. `theta_d: "match"` selects the
/// phase that makes the steady displacement real and positive, and
/// `r_e: "match"` tunes the reservoir to the stationary squeezing.
/// `eps_projected` gives `Re[eps e^{i theta_d}]` instead of `eps`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamSpec {
    pub delta_b: f64,
    pub chi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_projected: Option<f64>,
    pub theta_d: Setting,
    pub omega_p2: f64,
    pub theta_p: f64,
    pub kappa_a: f64,
    pub kappa_b: f64,
    pub n_th: f64,
    pub r_e: Setting,
    pub theta_e: f64,
}

impl Default for ParamSpec {
    fn default() -> Self {
        Self {
            delta_b: 1.0,
            chi: 0.0,
            eps: None,
            eps_projected: None,
            theta_d: Setting::MATCH,
            omega_p2: 0.0,
            theta_p: PI,
            kappa_a: 0.0,
            kappa_b: 0.0,
            n_th: 0.0,
            r_e: Setting::MATCH,
            theta_e: 0.0,
        }
    }
}

impl ParamSpec {
    pub fn resolve(&self) -> CliResult<ModelParams> {
        let mut p = ModelParams {
            delta_b: self.delta_b,
            chi: self.chi,
            eps: 0.0,
            theta_d: 0.0,
            omega_p2: self.omega_p2,
            theta_p: self.theta_p,
            kappa_a: self.kappa_a,
            kappa_b: self.kappa_b,
            n_th: self.n_th,
            r_e: 0.0,
            theta_e: self.theta_e,
        };
        p.theta_d = match self.theta_d {
            Setting::Value(v) => v,
            Setting::Keyword(Keyword::Match) => params::required_drive_phase(&p),
        };
        p.eps = match (self.eps, self.eps_projected) {
            (Some(_), Some(_)) => {
                return Err(CliError::Scenario("give either eps or eps_projected, not both".into()));
            }
            (Some(e), None) => e,
            (None, Some(x)) => params::eps_from_projection(x, p.theta_d)?,
            (None, None) => 0.0,
        };
        p.r_e = match self.r_e {
            Setting::Value(v) => v,
            Setting::Keyword(Keyword::Match) => params::stationary_r(&p)?,
        };
        p.validate()?;
        Ok(p)
    }

    fn set(&mut self, param: SweepParam, v: f64) {
        match param {
            SweepParam::OmegaP2 => self.omega_p2 = v,
            SweepParam::KappaB => self.kappa_b = v,
            SweepParam::Chi => self.chi = v,
            SweepParam::Eps => {
                self.eps = Some(v);
                self.eps_projected = None;
            }
            SweepParam::EpsProjected => {
                self.eps = None;
                self.eps_projected = Some(v);
            }
            SweepParam::RE => self.r_e = Setting::Value(v),
            SweepParam::ThetaE => self.theta_e = v,
            SweepParam::DeltaR => {}
        }
    }

    /// Copy with one swept parameter replaced.
    pub fn with(&self, param: SweepParam, v: f64) -> Self {
        let mut s = self.clone();
        s.set(param, v);
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimSpec {
    pub n_a: usize,
    pub n_b: usize,
}

impl Default for DimSpec {
    fn default() -> Self {
        Self { n_a: 2, n_b: 40 }
    }
}

impl DimSpec {
    pub fn config(&self) -> CliResult<HilbertConfig> {
        Ok(HilbertConfig::new(self.n_a, self.n_b)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepParam {
    OmegaP2,
    KappaB,
    Chi,
    Eps,
    EpsProjected,
    RE,
    ThetaE,
    /// `r_e - r`, with `r` the bath reference squeezing.
    DeltaR,
}

impl SweepParam {
    pub fn column(self) -> &'static str {
        match self {
            SweepParam::OmegaP2 => "omega_p_over_Delta_b",
            SweepParam::KappaB => "kappa_b_over_Delta_b",
            SweepParam::Chi => "chi_over_Delta_b",
            SweepParam::Eps => "eps_over_Delta_b",
            SweepParam::EpsProjected => "re_eps_exp_i_theta_d_over_Delta_b",
            SweepParam::RE => "r_e",
            SweepParam::ThetaE => "theta_e_rad",
            SweepParam::DeltaR => "delta_r",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        if self.points == 0 || !self.min.is_finite() || !self.max.is_finite() || (self.points > 1 && self.max < self.min) {
            return Err(CliError::Scenario(format!("bad axis {:?}", self.param)));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let n = self.points - 1;
        Ok((0..=n).map(|k| self.min + (self.max - self.min) * k as f64 / n as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    R,
    AlphaSs,
    AlphaSsOverEps,
    NSs,
    MSsRe,
    MSsIm,
    OmegaB,
    OmegaA,
    OmegaAPrime,
    G1,
    G2,
    G2p,
    G1OverOmegaB,
    G2OverOmegaB,
    G2pOverOmegaB,
    TC,
}

impl Quantity {
    pub fn column(self) -> &'static str {
        match self {
            Quantity::R => "r",
            Quantity::AlphaSs => "alpha_ss",
            Quantity::AlphaSsOverEps => "alpha_ss_over_eps_over_Delta_b",
            Quantity::NSs => "N_ss",
            Quantity::MSsRe => "re_M_ss",
            Quantity::MSsIm => "im_M_ss",
            Quantity::OmegaB => "omega_b_over_Delta_b",
            Quantity::OmegaA => "omega_a_over_Delta_b",
            Quantity::OmegaAPrime => "omega_a_prime_over_Delta_b",
            Quantity::G1 => "g1_over_Delta_b",
            Quantity::G2 => "g2_over_Delta_b",
            Quantity::G2p => "g2p_over_Delta_b",
            Quantity::G1OverOmegaB => "g1_over_omega_b",
            Quantity::G2OverOmegaB => "g2_over_omega_b",
            Quantity::G2pOverOmegaB => "g2p_over_omega_b",
            Quantity::TC => "t_c_times_Delta_b",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// One axis gives a curve, two give a heatmap with the first axis outer.
    pub axes: Vec<Axis>,
    pub quantities: Vec<Quantity>,
    /// Fixed squeezing used for the bath quantities instead of the
    /// stationary value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath_r: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialState {
    /// `|photons>_a |beta>_b`.
    Product { photons: usize, beta_re: f64, beta_im: f64 },
    /// `(|0>_a + |1>_a)|0>_b / sqrt 2`.
    Superposition,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    /// End time in units of `1/Delta_b`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// End time in units of the cat time `t_c`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end_tc: Option<f64>,
    pub samples: usize,
}

impl TimeSpec {
    pub fn grid(&self, t_c: f64) -> CliResult<Vec<f64>> {
        let end = match (self.t_end, self.t_end_tc) {
            (Some(t), None) => t,
            (None, Some(k)) => k * t_c,
            _ => return Err(CliError::Scenario("time grid needs exactly one of t_end, t_end_tc".into())),
        };
        if !(end > 0.0) || !end.is_finite() || self.samples < 2 {
            return Err(CliError::Scenario("time grid needs a positive end and at least two samples".into()));
        }
        let n = self.samples - 1;
        Ok((0..=n).map(|k| end * k as f64 / n as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub x: Axis,
    pub y: Axis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedSpec {
    pub initial: InitialState,
    /// Fidelity curve over a time grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<TimeSpec>,
    /// Fidelity at `t_c` over a parameter plane.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpenSpec {
    pub initial: InitialState,
    pub times: TimeSpec,
}

fn default_samples() -> usize {
    41
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WignerSpec {
    #[serde(default)]
    pub k: u32,
    #[serde(default)]
    pub grid: WignerGridSpec,
    /// Output samples along `[0, t]` at which hygiene is checked.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    #[serde(default)]
    pub dr: f64,
    #[serde(default)]
    pub dphi: f64,
    #[serde(default)]
    pub dalpha_re: f64,
    #[serde(default)]
    pub dalpha_im: f64,
    pub horizon: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    /// Name of the preset whose probe metrics are tracked.
    pub base: String,
    pub n_b_values: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    ParamSweep(SweepSpec),
    FidelityClosed(ClosedSpec),
    FidelityOpen(OpenSpec),
    CatWigner(WignerSpec),
    SqueezedWigner(WignerSpec),
    FlowCheck(FlowSpec),
    Convergence(ConvergenceSpec),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::ParamSweep(_) => "param-sweep",
            Experiment::FidelityClosed(_) => "fidelity-closed",
            Experiment::FidelityOpen(_) => "fidelity-open",
            Experiment::CatWigner(_) => "cat-wigner",
            Experiment::SqueezedWigner(_) => "squeezed-wigner",
            Experiment::FlowCheck(_) => "flow-check",
            Experiment::Convergence(_) => "convergence",
        }
    }
}

fn default_convergence_step() -> usize {
    20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    #[serde(default)]
    pub params: ParamSpec,
    #[serde(default)]
    pub dims: DimSpec,
    #[serde(default)]
    pub tol: Option<Tolerances>,
    /// Cutoff increase for the convergence re-run; 0 disables it.
    #[serde(default = "default_convergence_step")]
    pub convergence_step: usize,
    #[serde(flatten)]
    pub experiment: Experiment,
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tol.unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn match_keyword_and_projection() {
        let s = Scenario::from_json(
            r#"{"name": "t", "kind": "flow-check", "horizon": 10, "samples": 3,
                "params": {"chi": 0.01, "eps_projected": 0.3, "omega_p2": 0.49, "kappa_b": 0.02, "r_e": "match"}}"#,
        )
        .unwrap();
        let p = s.params.resolve().unwrap();
        assert!((p.r_e - 0.25 * 99f64.ln()).abs() < 1e-12);
        assert!(((p.eps * (p.theta_d).cos()).abs() - 0.3).abs() < 1e-12);
        assert_eq!(s.convergence_step, 20);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rejects_conflicting_drive() {
        let spec = ParamSpec { eps: Some(0.1), eps_projected: Some(0.1), omega_p2: 0.3, ..Default::default() };
        assert!(spec.resolve().is_err());
        assert!(Scenario::from_json(r#"{"name": "t", "kind": "nope"}"#).is_err());
        assert!(Scenario::from_json(r#"{"name": "t", "kind": "flow-check", "horizon": 1, "samples": 2, "params": {"bogus": 1}}"#).is_err());
    }

    #[test]
    fn axis_and_time_grids() {
        let a = Axis { param: SweepParam::Chi, min: 0.01, max: 0.05, points: 5 };
        assert_eq!(a.values().unwrap().len(), 5);
        let t = TimeSpec { t_end: None, t_end_tc: Some(2.0), samples: 3 };
        assert_eq!(t.grid(5.0).unwrap(), vec![0.0, 5.0, 10.0]);
        assert!(TimeSpec { t_end: Some(1.0), t_end_tc: Some(1.0), samples: 3 }.grid(1.0).is_err());
    }
}
