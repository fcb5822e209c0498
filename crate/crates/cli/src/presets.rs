//! Built-in scenarios for each figure panel.

use std::f64::consts::PI;

use mixedopt::tomography::WignerGridSpec;

use crate::error::{CliError, CliResult};
use crate::scenario::{
    Axis, ClosedSpec, ConvergenceSpec, DimSpec, Experiment, FlowSpec, InitialState, MapSpec, OpenSpec, ParamSpec, Quantity,
    Scenario, Setting, SweepParam, SweepSpec, TimeSpec, WignerSpec,
};

const PRESETS: &[&str] = &[
    "fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3", "fig4a1", "fig4a2", "fig4a3", "fig4a4", "fig4b", "fig4c",
    "fig4d1", "fig4d2", "fig5a", "fig5b", "fig5c", "fig5d", "fig5e", "fig5f", "fig5g", "fig5h", "fig6a", "fig6b", "fig6c",
    "fig6d", "fig6e", "fig6f", "fig6g", "fig6h", "flow", "convergence",
];

pub fn names() -> &'static [&'static str] {
    PRESETS
}

fn scenario(name: &str, description: &str, params: ParamSpec, dims: DimSpec, experiment: Experiment) -> Scenario {
    Scenario {
        name: name.into(),
        description: description.into(),
        params,
        dims,
        tol: None,
        convergence_step: 20,
        experiment,
    }
}

fn sweep(axes: Vec<Axis>, quantities: Vec<Quantity>, bath_r: Option<f64>) -> Experiment {
    Experiment::ParamSweep(SweepSpec { axes, quantities, bath_r })
}

fn axis(param: SweepParam, min: f64, max: f64, points: usize) -> Axis {
    Axis { param, min, max, points }
}

/// Model inputs used throughout the fidelity and cat figures.
fn strong_pump(chi: f64) -> ParamSpec {
    ParamSpec { chi, omega_p2: 0.49, ..Default::default() }
}

const BETA_01: InitialState = InitialState::Product { photons: 1, beta_re: 0.1, beta_im: 0.0 };

fn fig4a(name: &str, chi: f64, eps: f64) -> Scenario {
    scenario(
        name,
        &format!("closed-system fidelity, chi = {chi}, eps = {eps}, Omega_p = 0.49 (pump value taken from panel b)"),
        ParamSpec { eps: Some(eps), ..strong_pump(chi) },
        DimSpec { n_a: 2, n_b: 80 },
        Experiment::FidelityClosed(ClosedSpec {
            initial: BETA_01,
            times: Some(TimeSpec { t_end: None, t_end_tc: Some(2.0), samples: 401 }),
            map: None,
        }),
    )
}

fn fig4d(name: &str, chi: f64, projected: f64) -> Scenario {
    scenario(
        name,
        &format!("open-system fidelity, chi = {chi}, Re[eps e^(i theta_d)] = {projected}, kappa_a = kappa_b = 0.02"),
        ParamSpec { eps_projected: Some(projected), kappa_a: 0.02, kappa_b: 0.02, ..strong_pump(chi) },
        DimSpec { n_a: 2, n_b: 40 },
        Experiment::FidelityOpen(OpenSpec {
            initial: BETA_01,
            times: TimeSpec { t_end: Some(300.0), t_end_tc: None, samples: 301 },
        }),
    )
}

/// Decay rates of the four columns of the cat figures.
fn column_rates(panel: char) -> (f64, f64) {
    match panel {
        'a' | 'e' => (0.0, 0.0),
        'b' | 'f' => (0.02, 0.02),
        'c' | 'g' => (0.02, 0.1),
        _ => (0.02, 0.5),
    }
}

fn wigner_panel(name: &str, panel: char, squeezed: bool) -> Scenario {
    let (kappa_a, kappa_b) = column_rates(panel);
    let row = if "abcd".contains(panel) { "W_+" } else { "W_-" };
    let projected = if squeezed { 0.38 } else { 0.3 };
    let spec = WignerSpec { k: 0, grid: WignerGridSpec::default(), samples: 41 };
    let (what, experiment) = if squeezed {
        ("squeezed superposition at t_s", Experiment::SqueezedWigner(spec))
    } else {
        ("cat state at t_c", Experiment::CatWigner(spec))
    };
    scenario(
        name,
        &format!("{what}, kappa_a = {kappa_a}, kappa_b = {kappa_b}; panel shows {row} (both rows are written)"),
        ParamSpec { eps_projected: Some(projected), kappa_a, kappa_b, ..strong_pump(0.01) },
        DimSpec { n_a: 2, n_b: 50 },
        experiment,
    )
}

pub fn preset(name: &str) -> CliResult<Scenario> {
    let fixed_bath = ParamSpec { r_e: Setting::Value(1.12), ..Default::default() };
    let s = match name {
        "fig2a" => scenario(
            name,
            "stationary squeezing r versus Omega_p",
            ParamSpec::default(),
            DimSpec::default(),
            sweep(vec![axis(SweepParam::OmegaP2, 0.0, 0.4999, 500)], vec![Quantity::R], None),
        ),
        "fig2b" => scenario(
            name,
            "alpha_ss/(eps/Delta_b) over (kappa_b, Omega_p)",
            ParamSpec { eps: Some(1.0), ..Default::default() },
            DimSpec::default(),
            sweep(
                vec![axis(SweepParam::KappaB, 0.0, 0.1, 41), axis(SweepParam::OmegaP2, 0.0, 0.49, 41)],
                vec![Quantity::AlphaSsOverEps],
                None,
            ),
        ),
        "fig2c" | "fig2d" => scenario(
            name,
            "transformed bath N_ss and M_ss over (r_e, theta_e) at r = 1.12",
            fixed_bath,
            DimSpec::default(),
            sweep(
                vec![axis(SweepParam::RE, 0.0, 2.5, 41), axis(SweepParam::ThetaE, -PI, PI, 41)],
                if name == "fig2c" { vec![Quantity::NSs] } else { vec![Quantity::MSsRe, Quantity::MSsIm] },
                Some(1.12),
            ),
        ),
        "fig2e" => scenario(
            name,
            "N_ss, Re M_ss, Im M_ss versus r_e - r at theta_e = 0, r = 1.12",
            fixed_bath,
            DimSpec::default(),
            sweep(
                vec![axis(SweepParam::DeltaR, -1.0, 1.0, 201)],
                vec![Quantity::NSs, Quantity::MSsRe, Quantity::MSsIm],
                Some(1.12),
            ),
        ),
        "fig2f" => scenario(
            name,
            "N_ss, Re M_ss, Im M_ss versus theta_e at r_e = r = 1.12",
            fixed_bath,
            DimSpec::default(),
            sweep(
                vec![axis(SweepParam::ThetaE, -PI, PI, 201)],
                vec![Quantity::NSs, Quantity::MSsRe, Quantity::MSsIm],
                Some(1.12),
            ),
        ),
        "fig3" => scenario(
            name,
            "effective frequency and couplings versus Omega_p at chi = 0.05, eps = 0.001, theta_d = 0",
            ParamSpec { chi: 0.05, eps: Some(0.001), theta_d: Setting::Value(0.0), ..Default::default() },
            DimSpec::default(),
            sweep(
                vec![axis(SweepParam::OmegaP2, 0.0, 0.49, 99)],
                vec![
                    Quantity::OmegaB,
                    Quantity::G1,
                    Quantity::G2,
                    Quantity::G2pOverOmegaB,
                    Quantity::G1OverOmegaB,
                    Quantity::G2OverOmegaB,
                ],
                None,
            ),
        ),
        "fig4a1" => fig4a(name, 0.01, 0.1),
        "fig4a2" => fig4a(name, 0.01, 0.5),
        "fig4a3" => fig4a(name, 0.05, 0.005),
        "fig4a4" => fig4a(name, 0.05, 0.01),
        "fig4b" => scenario(
            name,
            "F_c(t_c) over (chi, eps) at Omega_p = 0.49",
            strong_pump(0.01),
            DimSpec { n_a: 2, n_b: 60 },
            Experiment::FidelityClosed(ClosedSpec {
                initial: InitialState::Superposition,
                times: None,
                map: Some(MapSpec {
                    x: axis(SweepParam::Chi, 0.01, 0.05, 41),
                    y: axis(SweepParam::Eps, 0.001, 0.1, 41),
                }),
            }),
        ),
        "fig4c" => scenario(
            name,
            "F_c(t_c) over (chi, Omega_p) at eps = 0.01",
            ParamSpec { eps: Some(0.01), ..strong_pump(0.01) },
            DimSpec { n_a: 2, n_b: 60 },
            Experiment::FidelityClosed(ClosedSpec {
                initial: InitialState::Superposition,
                times: None,
                map: Some(MapSpec {
                    x: axis(SweepParam::Chi, 0.01, 0.05, 41),
                    y: axis(SweepParam::OmegaP2, 0.3, 0.49, 41),
                }),
            }),
        ),
        "fig4d1" => fig4d(name, 0.01, 0.05),
        "fig4d2" => fig4d(name, 0.05, 0.01),
        "flow" => scenario(
            name,
            "frame flow relaxing from a displaced alpha at kappa_b = 0.02",
            ParamSpec { eps_projected: Some(0.3), kappa_a: 0.02, kappa_b: 0.02, ..strong_pump(0.01) },
            DimSpec::default(),
            Experiment::FlowCheck(FlowSpec { dr: 0.0, dphi: 0.0, dalpha_re: 0.1, dalpha_im: 0.05, horizon: 1500.0, samples: 301 }),
        ),
        "convergence" => scenario(
            name,
            "cat-state probes of fig5b versus the mode-b cutoff",
            ParamSpec::default(),
            DimSpec::default(),
            Experiment::Convergence(ConvergenceSpec { base: "fig5b".into(), n_b_values: vec![30, 40, 50, 60, 70] }),
        ),
        _ => {
            let panel = name.chars().nth(4).filter(|c| ('a'..='h').contains(c));
            match (name.get(..4), panel, name.len()) {
                (Some("fig5"), Some(c), 5) => wigner_panel(name, c, false),
                (Some("fig6"), Some(c), 5) => wigner_panel(name, c, true),
                _ => return Err(CliError::UnknownPreset(name.into())),
            }
        }
    };
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves_and_round_trips() {
        for name in names() {
            let s = preset(name).unwrap();
            assert_eq!(&s.name, name);
            s.params.resolve().unwrap();
            assert_eq!(Scenario::from_json(&s.to_json()).unwrap(), s);
        }
        assert!(preset("fig7a").is_err());
        assert!(preset("fig5i").is_err());
    }
}
