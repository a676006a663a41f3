//! One function per subcommand. Each writes its files into the output
//! directory and returns the paths it produced.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qwalk::closed_form::{first_step_amplitudes, lambda_table, LambdaMethod};
use qwalk::gauge::continuum_potential_shift;
use qwalk::invariance::check_characteristic_conditions;
use qwalk::observables::{
    ballistic_slope, chirality_probabilities, measured_slope, mean_position, symmetry_residuals, write_comparison_csv,
    write_pmf_csv, write_trajectory_csv,
};
use qwalk::{
    closed_form_amplitudes_with, efield_invariance_residual, electric_field, evolve, exact_transform,
    potentials_from_transform, quasi_invariant_phases, step_inhomogeneous, transform_coin_field,
    verify_exact_invariance, verify_phase_invariance, verify_quasi_invariance, CoinAngles, CoinField, Domain,
    InitialState, PhaseField, ScalarField, SmoothPhasePair, SpinorField, UnitSystem, Window,
};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Context {
    pub config: RunConfig,
    pub out_dir: PathBuf,
}

type Outcome = Result<Vec<PathBuf>, CliError>;

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.path(name);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        }
        let file = File::create(&path).map_err(|e| io_error(&path, e))?;
        Ok((path, BufWriter::new(file)))
    }

    fn write_with(
        &self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> qwalk::Result<()>,
    ) -> Result<PathBuf, CliError> {
        let (path, mut w) = self.create(name)?;
        f(&mut w)?;
        w.flush().map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    fn write_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let (path, mut w) = self.create(name)?;
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }

    fn init(&self) -> Result<InitialState, CliError> {
        Ok(InitialState::new(self.config.angle_or("eta", 0.0)?, self.config.angle_or("gamma", 0.0)?))
    }

    fn homogeneous(&self) -> Result<CoinAngles, CliError> {
        Ok(CoinAngles::new(
            self.config.require_angle("theta")?,
            self.config.angle_or("alpha", 0.0)?,
            self.config.angle_or("beta", 0.0)?,
            self.config.angle_or("chi", 0.0)?,
        ))
    }

    /// The configured coin: a file when `coin_file` is set, else homogeneous.
    fn coin_field(&self, t_final: usize) -> Result<CoinField, CliError> {
        match &self.config.coin_file {
            None => Ok(self.homogeneous()?.into()),
            Some(path) => {
                let file = File::open(path).map_err(|e| CliError::config("coin_file", format!("{}: {e}", path.display())))?;
                let window = Window::light_cone(t_final.saturating_sub(1));
                CoinField::read_csv(file, window).map_err(|e| CliError::config("coin_file", e.to_string()))
            }
        }
    }

    fn require_homogeneous(&self, command: &str) -> Result<CoinAngles, CliError> {
        if self.config.coin_file.is_some() {
            return Err(CliError::config("coin_file", format!("`{command}` needs a homogeneous coin")));
        }
        self.homogeneous()
    }
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}

fn breach_if(failed: bool, message: String) -> Result<(), CliError> {
    if failed {
        Err(CliError::Tolerance(message))
    } else {
        Ok(())
    }
}

pub fn evolve_cmd(ctx: &Context) -> Outcome {
    let t_final = ctx.config.require_t_final()?;
    let field = ctx.coin_field(t_final)?;
    let init = ctx.init()?;
    let mut files = Vec::new();
    if ctx.config.every_step.unwrap_or(false) {
        let mut state = qwalk::localized_state(init);
        for t in 0..=t_final {
            if t > 0 {
                state = step_inhomogeneous(&state, &field)?;
            }
            files.push(ctx.write_with(&format!("spinors/spinor_t{t:05}.csv"), |w| state.write_csv(w))?);
        }
    }
    let run = evolve(init, &field, t_final, true)?;
    let trajectory = run.trajectory.expect("trajectory was requested");
    files.push(ctx.write_with(&format!("spinor_t{t_final}.csv"), |w| run.final_state.write_csv(w))?);
    files.push(ctx.write_with("pmf.csv", |w| write_pmf_csv(w, &run.final_state))?);
    files.push(ctx.write_with("observables.csv", |w| write_trajectory_csv(w, &trajectory))?);
    Ok(files)
}

pub fn closedform_cmd(ctx: &Context) -> Outcome {
    let t_final = ctx.config.require_t_final()?;
    let coin = ctx.require_homogeneous("closedform")?;
    let init = ctx.init()?;
    let tolerance = ctx.config.tolerance_or(1e-10)?;
    let analytic = closed_form_amplitudes_with(init, coin, t_final, LambdaMethod::Auto)?;
    let stepped = evolve(init, &coin.into(), t_final, false)?.final_state;
    let deviation = analytic
        .sites()
        .map(|n| {
            (analytic.psi_plus(n) - stepped.psi_plus(n))
                .norm()
                .max((analytic.psi_minus(n) - stepped.psi_minus(n)).norm())
        })
        .fold(0.0, f64::max);
    let (seed_plus, seed_minus) = first_step_amplitudes(init, coin);
    let files = vec![
        ctx.write_with(&format!("closedform_t{t_final}.csv"), |w| analytic.write_csv(w))?,
        ctx.write_with("lambda.csv", |w| lambda_table(coin.theta, t_final + 1).write_csv(w))?,
        ctx.write_json(
            "deviation.json",
            &json!({
                "t_final": t_final,
                "max_deviation": deviation,
                "tolerance": tolerance,
                "seed_plus": [seed_plus.re, seed_plus.im],
                "seed_minus": [seed_minus.re, seed_minus.im],
            }),
        )?,
    ];
    breach_if(deviation > tolerance, format!("closed form deviates from stepping by {deviation:e} > {tolerance:e}"))?;
    Ok(files)
}

#[derive(Serialize)]
struct ObservableSummary {
    t_final: usize,
    phi: Option<f64>,
    p_plus: f64,
    p_minus: f64,
    mean_x: f64,
    measured_slope: Option<f64>,
    ballistic_slope: Option<f64>,
    symmetry_residuals: Option<(f64, f64)>,
}

pub fn observables_cmd(ctx: &Context) -> Outcome {
    let t_final = ctx.config.require_t_final()?;
    let field = ctx.coin_field(t_final)?;
    let init = ctx.init()?;
    let run = evolve(init, &field, t_final, true)?;
    let trajectory = run.trajectory.expect("trajectory was requested");
    let homogeneous = field.as_homogeneous();
    let phi = homogeneous.map(|c| c.alpha + c.beta - init.gamma);
    let mut files = vec![
        ctx.write_with("pmf.csv", |w| write_pmf_csv(w, &run.final_state))?,
        ctx.write_with("trajectory.csv", |w| write_trajectory_csv(w, &trajectory))?,
    ];
    if let (Some(c), Some(phi)) = (homogeneous, phi) {
        files.push(ctx.write_with("comparison.csv", |w| write_comparison_csv(w, &run.final_state, c.theta, init.eta, phi))?);
    }
    let (p_plus, p_minus) = chirality_probabilities(&run.final_state);
    let summary = ObservableSummary {
        t_final,
        phi,
        p_plus,
        p_minus,
        mean_x: mean_position(&run.final_state, 1.0),
        measured_slope: (trajectory.len() >= 4).then(|| measured_slope(&trajectory)),
        ballistic_slope: homogeneous.zip(phi).and_then(|(c, phi)| ballistic_slope(c.theta, init.eta, phi).ok()),
        symmetry_residuals: homogeneous.zip(phi).and_then(|(c, phi)| symmetry_residuals(c.theta, init.eta, phi).ok()),
    };
    files.push(ctx.write_json("summary.json", &summary)?);
    Ok(files)
}

enum Family {
    Quasi(PhaseField),
    Exact(PhaseField),
    General(PhaseField),
}

fn phase_family(ctx: &Context, t_final: usize) -> Result<(Family, serde_json::Value), CliError> {
    let cfg = &ctx.config;
    let name = cfg.phases.family.as_deref().ok_or_else(|| CliError::config("phases.family", "required"))?;
    match name {
        "quasi" => {
            let beta0 = cfg.angle_or("phases.beta0", 0.0)?;
            let beta1 = cfg.require_angle("phases.beta1")?;
            Ok((Family::Quasi(quasi_invariant_phases(beta0, beta1)), json!({"family": "quasi", "beta0": beta0, "beta1": beta1})))
        }
        "linear" => {
            let a = cfg.require_angle("phases.a")?;
            let phases = PhaseField::equal(ScalarField::formula(move |n, t| a * (n * t) as f64));
            Ok((Family::Exact(phases), json!({"family": "linear", "a": a})))
        }
        "file" => {
            let path = cfg.phases.path.as_ref().ok_or_else(|| CliError::config("phases.path", "required for family `file`"))?;
            let file = File::open(path).map_err(|e| CliError::config("phases.path", format!("{}: {e}", path.display())))?;
            let window = Window::light_cone(t_final);
            let phases = PhaseField::read_csv(file, window).map_err(|e| CliError::config("phases.path", e.to_string()))?;
            let equal = window.iter().all(|(n, t)| phases.xi.value(n, t) == phases.zeta.value(n, t));
            let quasi = t_final > 0 && check_characteristic_conditions(&phases, Window::light_cone(t_final - 1)).is_ok();
            let descriptor = json!({"family": "file", "path": path.display().to_string()});
            let family = match (equal, quasi) {
                (true, _) => Family::Exact(phases),
                (false, true) => Family::Quasi(phases),
                (false, false) => Family::General(phases),
            };
            Ok((family, descriptor))
        }
        other => Err(CliError::config("phases.family", format!("unknown family {other:?}; use quasi, linear or file"))),
    }
}

pub fn invariance_cmd(ctx: &Context) -> Outcome {
    let t_final = ctx.config.require_t_final()?;
    let reference = ctx.coin_field(t_final)?;
    let init = ctx.init()?;
    let tolerance = ctx.config.tolerance_or(1e-11)?;
    let (family, descriptor) = phase_family(ctx, t_final)?;
    let (report, level) = match &family {
        Family::Quasi(p) => (verify_quasi_invariance(init, &reference, p, t_final)?, "quasi"),
        Family::Exact(p) => (verify_exact_invariance(init, &reference, p, t_final)?, "exact"),
        Family::General(p) => (verify_phase_invariance(init, &reference, p, t_final)?, "general"),
    };
    let inputs = json!({
        "phases": descriptor,
        "invariance": level,
        "t_final": t_final,
        "tolerance": tolerance,
        "initial_state": init,
        "reference_coin": reference.descriptor,
    });
    let files = vec![ctx.write_json("invariance_report.json", &report.to_json(&inputs)?)?];
    let worst = match level {
        "quasi" => report.max_modulus_deviation.max(report.max_pmf_deviation),
        _ => report.max_ray_deviation.max(report.max_pmf_deviation),
    };
    breach_if(worst > tolerance, format!("{level} invariance deviation {worst:e} > {tolerance:e}"))?;
    Ok(files)
}

fn smooth_pair(name: &str) -> Result<SmoothPhasePair, CliError> {
    match name {
        "equal" => Ok(SmoothPhasePair::equal(|x, t| (PI * x).sin() * (1.0 + t * t))),
        "null" => Ok(SmoothPhasePair::new(|x, t| (2.0 * (x - t)).sin(), |x, t| ((x + t) * (x + t)).cos())),
        "wave" => Ok(SmoothPhasePair::new(
            |x, t| (x - t).sin() + 0.5 * (2.0 * (x + t)).cos(),
            |x, t| (-(x + t) * (x + t)).exp() + (x - t) * (x - t),
        )),
        other => Err(CliError::config("gauge.pair", format!("unknown pair {other:?}; use equal, null or wave"))),
    }
}

pub fn gauge_cmd(ctx: &Context) -> Outcome {
    let units = UnitSystem::default();
    let pair_name = ctx.config.gauge.pair.clone().unwrap_or_else(|| "null".into());
    let resolution = ctx.config.gauge.resolution.unwrap_or(64);
    let pair = smooth_pair(&pair_name)?;
    if resolution < 4 {
        return Err(CliError::config("gauge.resolution", "must be at least 4"));
    }
    let domain = Domain::new(-1.0, 1.0, 0.0, 1.0)?;
    let (max_residual, residual) = efield_invariance_residual(&pair, domain, resolution, units)?;
    let (refined, _) = efield_invariance_residual(&pair, domain, 2 * resolution, units)?;
    let (shift_t, shift_x) = continuum_potential_shift(&pair, 0.0, 0.5, 1e-4, units);
    let mut files = vec![ctx.write_with("residual.csv", |w| residual.write_csv(w))?];

    if ctx.config.phases.family.is_some() {
        let t_final = ctx.config.require_t_final()?;
        if t_final == 0 {
            return Err(CliError::config("t_final", "gauge potentials need at least one step"));
        }
        let reference = ctx.coin_field(t_final)?;
        let window = Window::light_cone(t_final - 1);
        let transformed = match phase_family(ctx, t_final)?.0 {
            Family::Exact(p) => exact_transform(&reference, &p, window)?,
            Family::Quasi(p) | Family::General(p) => transform_coin_field(&reference, &p, window)?,
        };
        let potentials = potentials_from_transform(&reference, &transformed, window, units)?;
        let e = electric_field(&potentials, units)?;
        files.push(ctx.write_with("potentials.csv", |w| potentials.write_csv(w))?);
        files.push(ctx.write_with("efield.csv", |w| {
            let mut csv = csv_writer(w);
            csv.write_record(["x", "t", "e_x"])?;
            for ((j, i), v) in e.indexed_iter() {
                csv.write_record([fmt(potentials.x_at(i)), fmt(potentials.t_at(j)), fmt(*v)])?;
            }
            csv.flush()?;
            Ok(())
        })?);
    }
    files.push(ctx.write_json(
        "gauge_summary.json",
        &json!({
            "pair": pair_name,
            "resolution": resolution,
            "max_residual": max_residual,
            "refined_max_residual": refined,
            "refinement_ratio": max_residual / refined,
            "potential_shift_at_origin": {"a_t": shift_t, "a_x": shift_x},
        }),
    )?);
    if let Some(tol) = ctx.config.tolerance {
        breach_if(max_residual > tol, format!("field-invariance residual {max_residual:e} > {tol:e}"))?;
    }
    Ok(files)
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::Writer::from_writer(w)
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_spinor_pair<W: Write>(w: W, reference: &SpinorField, moved: &SpinorField) -> qwalk::Result<()> {
    let mut csv = csv_writer(w);
    csv.write_record([
        "n", "re_plus_ref", "im_plus_ref", "re_minus_ref", "im_minus_ref", "re_plus", "im_plus", "re_minus", "im_minus",
    ])?;
    for n in reference.sites() {
        let (a, b, c, d) = (reference.psi_plus(n), reference.psi_minus(n), moved.psi_plus(n), moved.psi_minus(n));
        csv.write_record([
            n.to_string(),
            fmt(a.re),
            fmt(a.im),
            fmt(b.re),
            fmt(b.im),
            fmt(c.re),
            fmt(c.im),
            fmt(d.re),
            fmt(d.im),
        ])?;
    }
    csv.flush()?;
    Ok(())
}

pub fn figures_cmd(ctx: &Context, which: &str) -> Outcome {
    match which {
        "1a" | "1b" => {
            let (theta, eta) = if which == "1a" { (FRAC_PI_4, PI / 16.0) } else { (FRAC_PI_8, 3.0 * PI / 16.0) };
            let phi = PI;
            // φ = α + β − γ with α = β = 0
            let init = InitialState::new(eta, -phi);
            let run = evolve(init, &CoinAngles::rotation(theta).into(), 100, false)?;
            Ok(vec![ctx.write_with(&format!("fig{which}.csv"), |w| write_comparison_csv(w, &run.final_state, theta, eta, phi))?])
        }
        "2" => {
            let (theta, eta) = (FRAC_PI_6, FRAC_PI_6);
            let run = evolve(InitialState::new(eta, 0.0), &CoinAngles::rotation(theta).into(), 40, true)?;
            let records = run.trajectory.expect("trajectory was requested");
            let p = theta.cos().powi(2);
            let slope = ballistic_slope(theta, eta, 0.0)?;
            Ok(vec![ctx.write_with("fig2.csv", |w| {
                let mut csv = csv_writer(w);
                csv.write_record(["t", "mean_x", "classical_mean", "ballistic"])?;
                for r in &records {
                    let t = r.t as f64;
                    csv.write_record([r.t.to_string(), fmt(r.mean_x), fmt((2.0 * p - 1.0) * t), fmt(slope * t)])?;
                }
                csv.flush()?;
                Ok(())
            })?])
        }
        "3" => {
            let t_final = 16;
            let init = InitialState::new(FRAC_PI_3, 0.0);
            let reference: CoinField = CoinAngles::rotation(FRAC_PI_3).into();
            let phases = quasi_invariant_phases(0.0, 0.1);
            let drifting = transform_coin_field(&reference, &phases, Window::light_cone(t_final - 1))?;
            let a = evolve(init, &reference, t_final, false)?.final_state;
            let b = evolve(init, &drifting, t_final, false)?.final_state;
            let report = verify_quasi_invariance(init, &reference, &phases, t_final)?;
            let inputs = json!({"phases": {"family": "quasi", "beta0": 0.0, "beta1": 0.1}, "t_final": t_final});
            Ok(vec![
                ctx.write_with("fig3.csv", |w| write_spinor_pair(w, &a, &b))?,
                ctx.write_json("fig3_report.json", &report.to_json(&inputs)?)?,
            ])
        }
        other => Err(CliError::config("which", format!("unknown figure {other:?}; use 1a, 1b, 2 or 3"))),
    }
}
