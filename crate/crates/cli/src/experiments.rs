//! Numerical experiments behind each scenario kind. Nothing here touches
//! the file system; results come back as tables and summaries.

use mixedopt::analytic::{self, Sign};
use mixedopt::evolve::{self, Frame, PropagationOptions, PropagationReport, SchrodingerMethod};
use mixedopt::fock::{self, DensityMatrix, HilbertConfig, Space, StateVector, TAIL_LIMIT};
use mixedopt::hamiltonians;
use mixedopt::ode::{OdeStats, Tolerances};
use mixedopt::params::{self, DerivedParams, FlowState, FlowTrajectory, ModelParams};
use mixedopt::tomography::{self, WignerGrid, WignerGridSpec};
use mixedopt::{Error, C64};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::scenario::{ClosedSpec, FlowSpec, InitialState, MapSpec, ParamSpec, Quantity, Scenario, SweepParam, SweepSpec};

/// A CSV-ready table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegratorRecord {
    pub label: String,
    pub stats: OdeStats,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HygieneRecord {
    pub label: String,
    pub report: PropagationReport,
}

/// Named scalar that summarizes a run and is compared across cutoffs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Probe {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: serde_json::Map<String, serde_json::Value>,
    pub integrator: Vec<IntegratorRecord>,
    pub hygiene: Vec<HygieneRecord>,
    pub probes: Vec<Probe>,
    pub notes: Vec<String>,
}

impl Outcome {
    fn probe(&mut self, name: &str, value: f64) {
        self.probes.push(Probe { name: name.into(), value });
        self.summary.insert(name.into(), value.into());
    }

    pub fn probe_value(&self, name: &str) -> Option<f64> {
        self.probes.iter().find(|p| p.name == name).map(|p| p.value)
    }
}

pub fn initial_state(init: InitialState, dims: HilbertConfig) -> CliResult<StateVector> {
    match init {
        InitialState::Product { photons, beta_re, beta_im } => {
            let a = StateVector::basis(Space::ModeA(dims.n_a), photons)?;
            let b = StateVector::coherent(C64::new(beta_re, beta_im), dims.n_b)?;
            Ok(StateVector::tensor(&a, &b)?)
        }
        InitialState::Superposition => {
            let mut amps = vec![C64::from(0.0); dims.dim()];
            let h = std::f64::consts::FRAC_1_SQRT_2;
            amps[dims.index(0, 0)] = C64::from(h);
            amps[dims.index(1, 0)] = C64::from(h);
            Ok(StateVector::new(dims.joint(), amps.into())?)
        }
    }
}

/// Tail mass of the mode-`b` marginal of a joint state.
pub fn b_tail(populations: &[f64], dims: HilbertConfig) -> f64 {
    let mut marginal = vec![0.0; dims.n_b];
    for m in 0..dims.n_a {
        for (n, slot) in marginal.iter_mut().enumerate() {
            *slot += populations[dims.index(m, n)];
        }
    }
    fock::tail_mass(&marginal)
}

fn ensure_tail(tail: f64) -> CliResult<()> {
    if tail > TAIL_LIMIT {
        return Err(Error::CutoffInsufficient { tail, limit: TAIL_LIMIT }.into());
    }
    Ok(())
}

fn derived(p: &ModelParams) -> CliResult<DerivedParams> {
    Ok(params::effective_params(p)?)
}

pub fn cat_time(p: &ModelParams) -> CliResult<f64> {
    Ok(params::analytic_params(&derived(p)?)?.t_c(0))
}

#[derive(Clone, Debug)]
pub struct ClosedCurve {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub max_tail: f64,
}

impl ClosedCurve {
    pub fn min(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `F_c(t) = |<psi_ext(t)|psi_app(t)>|` with the transformed Hamiltonian as
/// the exact reference and the mixed approximation as the candidate.
pub fn closed_fidelity(p: &ModelParams, dims: HilbertConfig, init: InitialState, times: &[f64]) -> CliResult<ClosedCurve> {
    let d = derived(p)?;
    let h_ext = hamiltonians::build_transformed_stationary(&d, dims)?;
    let h_app = hamiltonians::build_mixed_approx(&d, dims)?;
    let psi0 = initial_state(init, dims)?;
    let ext = evolve::propagate_schrodinger(&psi0, &h_ext, times, SchrodingerMethod::Eigen)?;
    let app = evolve::propagate_schrodinger(&psi0, &h_app, times, SchrodingerMethod::Eigen)?;
    let mut fidelity = Vec::with_capacity(times.len());
    let mut max_tail: f64 = 0.0;
    for (x, y) in ext.states.iter().zip(&app.states) {
        max_tail = max_tail.max(b_tail(&x.populations(), dims)).max(b_tail(&y.populations(), dims));
        fidelity.push(tomography::fidelity_pure(x, y)?);
    }
    ensure_tail(max_tail)?;
    Ok(ClosedCurve { times: times.to_vec(), fidelity, max_tail })
}

#[derive(Clone, Debug)]
pub struct OpenCurve {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub exact: PropagationReport,
    pub approx: PropagationReport,
    pub max_tail: f64,
}

impl OpenCurve {
    pub fn min(&self) -> f64 {
        self.fidelity.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Uhlmann fidelity between master-equation solutions under the transformed
/// and the approximate Hamiltonian, with the steady transformed channels.
pub fn open_fidelity(
    p: &ModelParams,
    dims: HilbertConfig,
    init: InitialState,
    times: &[f64],
    opts: &PropagationOptions,
) -> CliResult<OpenCurve> {
    let d = derived(p)?;
    let channels = evolve::make_channels(p, Frame::Transformed, Some(&d))?;
    let rho0 = initial_state(init, dims)?.projector();
    let l_ext = evolve::Liouvillian::new(&hamiltonians::build_transformed_stationary(&d, dims)?, &channels)?;
    let l_app = evolve::Liouvillian::new(&hamiltonians::build_mixed_approx(&d, dims)?, &channels)?;
    let mut exact_states = Vec::with_capacity(times.len());
    let mut max_tail: f64 = 0.0;
    let exact = evolve::propagate_master_with(&rho0, &l_ext, times, opts, |_, _, rho, _| {
        max_tail = max_tail.max(b_tail(&rho.populations(), dims));
        exact_states.push(rho.clone());
        Ok(())
    })?;
    let mut fidelity = Vec::with_capacity(times.len());
    let approx = evolve::propagate_master_with(&rho0, &l_app, times, opts, |i, _, rho, _| {
        max_tail = max_tail.max(b_tail(&rho.populations(), dims));
        fidelity.push(tomography::fidelity_mixed(&exact_states[i], rho)?);
        Ok(())
    })?;
    ensure_tail(max_tail)?;
    Ok(OpenCurve { times: times.to_vec(), fidelity, exact, approx, max_tail })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// Coherent-state superposition at `t_c`.
    Cat,
    /// Squeezed superposition at `t_s`.
    Squeezed,
}

#[derive(Clone, Debug)]
pub struct CatRun {
    pub time: f64,
    pub probabilities: [f64; 2],
    pub states: [DensityMatrix; 2],
    pub wigner: [WignerGrid; 2],
    pub report: PropagationReport,
    /// Fidelity of each conditional state with the closed-form component,
    /// present when all decay rates vanish.
    pub analytic_fidelity: Option<[f64; 2]>,
    pub max_tail: f64,
}

impl CatRun {
    pub fn depth(&self, sign: Sign) -> f64 {
        self.wigner[sign_index(sign)].negativity_depth()
    }
}

fn sign_index(sign: Sign) -> usize {
    match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    }
}

/// Evolves `(|0>_a + |1>_a)|0>_b / sqrt 2` under the mixed approximation with
/// the transformed channels, measures mode `a` in `|0> +- |1>` and samples the
/// Wigner functions of both conditional states.
pub fn cat_run(
    p: &ModelParams,
    dims: HilbertConfig,
    target: Target,
    k: u32,
    grid: &WignerGridSpec,
    samples: usize,
    opts: &PropagationOptions,
) -> CliResult<CatRun> {
    if samples < 2 {
        return Err(CliError::Scenario("need at least two time samples".into()));
    }
    let d = derived(p)?;
    let ap = params::analytic_params(&d)?;
    let time = match target {
        Target::Cat => ap.t_c(k),
        Target::Squeezed => ap.t_s(k),
    };
    let channels = evolve::make_channels(p, Frame::Transformed, Some(&d))?;
    let l = evolve::Liouvillian::new(&hamiltonians::build_mixed_approx(&d, dims)?, &channels)?;
    let rho0 = initial_state(InitialState::Superposition, dims)?.projector();
    let times: Vec<f64> = (0..samples).map(|i| time * i as f64 / (samples - 1) as f64).collect();
    let mut last = None;
    let mut max_tail: f64 = 0.0;
    let report = evolve::propagate_master_with(&rho0, &l, &times, opts, |_, _, rho, _| {
        max_tail = max_tail.max(b_tail(&rho.populations(), dims));
        last = Some(rho.clone());
        Ok(())
    })?;
    ensure_tail(max_tail)?;
    let rho = last.expect("grid has samples");
    let (plus, p_plus) = analytic::measure_mode_a_mixed(&rho, Sign::Plus)?;
    let (minus, p_minus) = analytic::measure_mode_a_mixed(&rho, Sign::Minus)?;
    let wigner = [tomography::wigner(&plus, grid)?, tomography::wigner(&minus, grid)?];
    let closed = p.kappa_a == 0.0 && p.kappa_b == 0.0;
    let analytic_fidelity = if closed {
        let c = match target {
            Target::Cat => analytic::cat_components(&ap, k, dims.n_b)?,
            Target::Squeezed => analytic::squeezed_components(&ap, k, dims.n_b)?,
        };
        let overlap = |rho: &DensityMatrix, psi: &StateVector| -> CliResult<f64> {
            let proj = fock::Operator::new(psi.space(), psi.projector().matrix().clone())?;
            Ok(tomography::expectation_mixed(rho, &proj)?.re.max(0.0).sqrt())
        };
        Some([overlap(&plus, &c.plus_state)?, overlap(&minus, &c.minus_state)?])
    } else {
        None
    };
    Ok(CatRun { time, probabilities: [p_plus, p_minus], states: [plus, minus], wigner, report, analytic_fidelity, max_tail })
}

/// Starting point displaced from the fixed point of the frame flow.
pub fn perturbed_flow_start(p: &ModelParams, spec: &FlowSpec) -> CliResult<FlowState> {
    let fp = params::flow_fixed_point(p)?;
    Ok(FlowState { r: fp.r + spec.dr, phi: fp.phi + spec.dphi, alpha: fp.alpha + C64::new(spec.dalpha_re, spec.dalpha_im) })
}

pub fn flow_check(p: &ModelParams, spec: &FlowSpec, tol: Tolerances) -> CliResult<FlowTrajectory> {
    let start = perturbed_flow_start(p, spec)?;
    Ok(params::flow_integrate(start, p, spec.horizon, spec.samples, tol)?)
}

fn sweep_point(spec: &ParamSpec, sweep: &SweepSpec, coords: &[(SweepParam, f64)]) -> CliResult<Vec<f64>> {
    let mut ps = spec.clone();
    for &(param, v) in coords {
        ps = ps.with(param, v);
    }
    let mut p = ps.resolve()?;
    let needs_derived = sweep.quantities.iter().any(|q| !matches!(q, Quantity::NSs | Quantity::MSsRe | Quantity::MSsIm))
        || sweep.bath_r.is_none();
    let d = if needs_derived { Some(derived(&p)?) } else { None };
    let r_bath = match (sweep.bath_r, &d) {
        (Some(r), _) => r,
        (None, Some(d)) => d.r,
        (None, None) => unreachable!("derived parameters are computed when no bath_r is given"),
    };
    if let Some(&(_, dr)) = coords.iter().find(|(param, _)| *param == SweepParam::DeltaR) {
        p.r_e = r_bath + dr;
        if p.r_e < 0.0 {
            return Err(CliError::Scenario(format!("r_e = r + delta_r is negative at delta_r = {dr}")));
        }
    }
    let (n_ss, m_ss) = params::steady_bath(p.r_e, p.theta_e, r_bath);
    let mut row: Vec<f64> = coords.iter().map(|&(_, v)| v).collect();
    for q in &sweep.quantities {
        let need = || d.as_ref().expect("derived parameters present");
        let v = match q {
            Quantity::R => need().r,
            Quantity::AlphaSs => need().alpha_ss,
            Quantity::AlphaSsOverEps => {
                let unit = ModelParams { eps: 1.0, ..p };
                params::steady_alpha(&unit, need().r)?.0 * p.delta_b
            }
            Quantity::NSs => n_ss,
            Quantity::MSsRe => m_ss.re,
            Quantity::MSsIm => m_ss.im,
            Quantity::OmegaB => need().omega_b_eff,
            Quantity::OmegaA => need().omega_a_eff,
            Quantity::OmegaAPrime => need().omega_a_eff_prime,
            Quantity::G1 => need().g1,
            Quantity::G2 => need().g2,
            Quantity::G2p => need().g2p,
            Quantity::G1OverOmegaB => need().g1 / need().omega_b_eff,
            Quantity::G2OverOmegaB => need().g2 / need().omega_b_eff,
            Quantity::G2pOverOmegaB => need().g2p / need().omega_b_eff,
            Quantity::TC => params::analytic_params(need())?.t_c(0),
        };
        row.push(v);
    }
    Ok(row)
}

/// Derived quantities over one or two parameter axes.
pub fn sweep(spec: &ParamSpec, sweep: &SweepSpec) -> CliResult<Table> {
    let axes = &sweep.axes;
    if axes.is_empty() || axes.len() > 2 || sweep.quantities.is_empty() {
        return Err(CliError::Scenario("a sweep needs one or two axes and at least one quantity".into()));
    }
    let mut columns: Vec<&str> = axes.iter().map(|a| a.param.column()).collect();
    columns.extend(sweep.quantities.iter().map(|q| q.column()));
    let mut table = Table::new("sweep", &columns);
    let first = axes[0].values()?;
    let second = match axes.get(1) {
        Some(a) => Some(a.values()?),
        None => None,
    };
    for &x in &first {
        match &second {
            None => table.rows.push(sweep_point(spec, sweep, &[(axes[0].param, x)])?),
            Some(ys) => {
                for &y in ys {
                    table.rows.push(sweep_point(spec, sweep, &[(axes[0].param, x), (axes[1].param, y)])?);
                }
            }
        }
    }
    Ok(table)
}

/// `F_c(t_c)` over a parameter plane, computed point by point in parallel.
pub fn closed_map(spec: &ParamSpec, dims: HilbertConfig, init: InitialState, map: &MapSpec) -> CliResult<Table> {
    let xs = map.x.values()?;
    let ys = map.y.values()?;
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let rows: Vec<CliResult<Vec<f64>>> = points
        .par_iter()
        .map(|&(x, y)| {
            let p = spec.with(map.x.param, x).with(map.y.param, y).resolve()?;
            let t_c = cat_time(&p)?;
            let curve = closed_fidelity(&p, dims, init, &[0.0, t_c])?;
            Ok(vec![x, y, t_c, curve.fidelity[1]])
        })
        .collect();
    let mut table = Table::new("fidelity_map", &[map.x.param.column(), map.y.param.column(), "t_c_times_Delta_b", "F_c"]);
    table.rows = rows.into_iter().collect::<CliResult<_>>()?;
    Ok(table)
}

fn propagation_options(s: &Scenario) -> PropagationOptions {
    PropagationOptions { tol: s.tolerances(), ..Default::default() }
}

fn insert<T: Serialize>(o: &mut Outcome, key: &str, value: &T) {
    o.summary.insert(key.into(), serde_json::to_value(value).expect("summary value serializes"));
}

fn wigner_table(name: &str, w: &WignerGrid) -> Table {
    let mut t = Table::new(name, &["re_zeta", "im_zeta", "W"]);
    for (i, &y) in w.im_axis.iter().enumerate() {
        for (j, &x) in w.re_axis.iter().enumerate() {
            t.rows.push(vec![x, y, w.values[[i, j]]]);
        }
    }
    t
}

/// Runs one scenario (without the convergence re-run).
pub fn run_experiment(s: &Scenario) -> CliResult<Outcome> {
    use crate::scenario::Experiment as E;
    let mut o = Outcome::default();
    let dims = s.dims.config();
    match &s.experiment {
        E::ParamSweep(sw) => {
            o.tables.push(sweep(&s.params, sw)?);
        }
        E::FidelityClosed(ClosedSpec { initial, times, map }) => {
            if times.is_some() == map.is_some() {
                return Err(CliError::Scenario("fidelity-closed needs exactly one of times, map".into()));
            }
            let dims = dims?;
            if let Some(map) = map {
                let table = closed_map(&s.params, dims, *initial, map)?;
                let f = table.column("F_c").expect("column exists");
                o.probe("min_F_c", f.iter().copied().fold(f64::INFINITY, f64::min));
                o.probe("mean_F_c", f.iter().sum::<f64>() / f.len() as f64);
                let mut flagged = 0;
                for row in &table.rows {
                    let p = s.params.with(map.x.param, row[0]).with(map.y.param, row[1]).resolve()?;
                    flagged += usize::from(!hamiltonians::rwa_advisory(&derived(&p)?, dims).is_empty());
                }
                if flagged > 0 {
                    o.notes.push(format!("rotating-wave advisory raised at {flagged} of {} map points", table.rows.len()));
                }
                o.tables.push(table);
            } else if let Some(ts) = times {
                let p = s.params.resolve()?;
                let t_c = cat_time(&p)?;
                let curve = closed_fidelity(&p, dims, *initial, &ts.grid(t_c)?)?;
                let mut table = Table::new("fidelity_closed", &["t_times_Delta_b", "F_c"]);
                table.rows = curve.times.iter().zip(&curve.fidelity).map(|(&t, &f)| vec![t, f]).collect();
                o.probe("min_F_c", curve.min());
                o.probe("final_F_c", *curve.fidelity.last().unwrap());
                insert(&mut o, "t_c", &t_c);
                insert(&mut o, "max_tail", &curve.max_tail);
                o.tables.push(table);
                o.notes.extend(hamiltonians::rwa_advisory(&derived(&p)?, dims));
            }
        }
        E::FidelityOpen(spec) => {
            let dims = dims?;
            let p = s.params.resolve()?;
            let times = spec.times.grid(cat_time(&p)?)?;
            let curve = open_fidelity(&p, dims, spec.initial, &times, &propagation_options(s))?;
            let mut table = Table::new("fidelity_open", &["t_times_Delta_b", "F_o"]);
            table.rows = curve.times.iter().zip(&curve.fidelity).map(|(&t, &f)| vec![t, f]).collect();
            o.probe("min_F_o", curve.min());
            o.probe("final_F_o", *curve.fidelity.last().unwrap());
            insert(&mut o, "max_tail", &curve.max_tail);
            o.integrator.push(IntegratorRecord { label: "exact".into(), stats: curve.exact.stats });
            o.integrator.push(IntegratorRecord { label: "approx".into(), stats: curve.approx.stats });
            o.hygiene.push(HygieneRecord { label: "exact".into(), report: curve.exact.clone() });
            o.hygiene.push(HygieneRecord { label: "approx".into(), report: curve.approx.clone() });
            o.tables.push(table);
            o.notes.extend(hamiltonians::rwa_advisory(&derived(&p)?, dims));
        }
        E::CatWigner(spec) | E::SqueezedWigner(spec) => {
            let dims = dims?;
            let p = s.params.resolve()?;
            let target = if matches!(s.experiment, E::CatWigner(_)) { Target::Cat } else { Target::Squeezed };
            let run = cat_run(&p, dims, target, spec.k, &spec.grid, spec.samples, &propagation_options(s))?;
            o.tables.push(wigner_table("wigner_plus", &run.wigner[0]));
            o.tables.push(wigner_table("wigner_minus", &run.wigner[1]));
            o.probe("min_W_plus", run.wigner[0].min());
            o.probe("min_W_minus", run.wigner[1].min());
            o.probe("P_plus", run.probabilities[0]);
            insert(&mut o, "time", &run.time);
            insert(&mut o, "max_tail", &run.max_tail);
            insert(&mut o, "P_minus", &run.probabilities[1]);
            insert(&mut o, "fringe_depth", &[run.depth(Sign::Plus), run.depth(Sign::Minus)]);
            insert(&mut o, "wigner_normalization", &[run.wigner[0].normalization, run.wigner[1].normalization]);
            insert(&mut o, "wigner_imaginary_residue", &[run.wigner[0].imaginary_residue, run.wigner[1].imaginary_residue]);
            insert(&mut o, "purity", &[run.states[0].purity(), run.states[1].purity()]);
            if let Some(f) = run.analytic_fidelity {
                insert(&mut o, "analytic_fidelity", &f);
            }
            o.integrator.push(IntegratorRecord { label: "master".into(), stats: run.report.stats });
            o.hygiene.push(HygieneRecord { label: "master".into(), report: run.report });
            o.notes.extend(hamiltonians::rwa_advisory(&derived(&p)?, dims));
        }
        E::FlowCheck(spec) => {
            let p = s.params.resolve()?;
            let traj = flow_check(&p, spec, s.tolerances())?;
            let mut table = Table::new("flow", &["t_times_Delta_b", "r", "phi_rad", "re_alpha", "im_alpha", "distance"]);
            for (t, st) in traj.times.iter().zip(&traj.states) {
                table.rows.push(vec![*t, st.r, st.phi, st.alpha.re, st.alpha.im, params::flow_distance(st, &traj.fixed_point)]);
            }
            let rhs = params::flow_rhs(&traj.fixed_point, &p)?;
            insert(&mut o, "fixed_point", &traj.fixed_point);
            insert(&mut o, "terminal_distance", &traj.terminal_distance);
            insert(&mut o, "rhs_at_fixed_point", &rhs);
            o.integrator.push(IntegratorRecord { label: "flow".into(), stats: traj.stats });
            o.tables.push(table);
        }
        E::Convergence(spec) => {
            let base = crate::presets::preset(&spec.base)?;
            if matches!(base.experiment, E::Convergence(_)) {
                return Err(CliError::Scenario("convergence base cannot itself be a convergence scenario".into()));
            }
            // Runs that fail the cutoff check still get a row, with the
            // tail that tripped it and NaN probes.
            let mut runs = Vec::new();
            for &n_b in &spec.n_b_values {
                let mut sc = base.clone();
                sc.dims.n_b = n_b;
                sc.tol = s.tol.or(sc.tol);
                match run_experiment(&sc) {
                    Ok(out) => {
                        let tail = out.summary.get("max_tail").and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
                        runs.push((n_b, Some(out), tail));
                    }
                    Err(CliError::Core(Error::CutoffInsufficient { tail, .. })) => runs.push((n_b, None, tail)),
                    Err(e) => return Err(e),
                }
            }
            let names: Vec<String> = runs
                .iter()
                .find_map(|(_, out, _)| out.as_ref())
                .map(|out| out.probes.iter().map(|p| p.name.clone()).collect())
                .unwrap_or_default();
            let mut columns = vec!["n_b", "max_b_tail"];
            columns.extend(names.iter().map(String::as_str));
            let mut table = Table::new("convergence", &columns);
            for (n_b, out, tail) in &runs {
                let mut row = vec![*n_b as f64, *tail];
                row.extend(names.iter().map(|n| out.as_ref().and_then(|o| o.probe_value(n)).unwrap_or(f64::NAN)));
                table.rows.push(row);
            }
            insert(&mut o, "base", &spec.base);
            o.tables.push(table);
        }
    }
    Ok(o)
}
