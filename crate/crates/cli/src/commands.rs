use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use maglev_core::constants::{self, PHI_0};
use maglev_core::dynamics::{
    lorentzian_fit, ringdown_q, ringdown_two_segment, simulate, simulate_sweep, welch_psd,
    LorentzianFit, SimConfig, TimeSeries,
};
use maglev_core::isolation::{normal_modes, transfer_function, yield_check, IsolationStack};
use maglev_core::noise::{ground_state_budget, sensing_budget, vibration_budget, BudgetReport, RlFilter};
use maglev_core::pickup::{coupling_nu_analytic, coupling_nu_numeric, measurement_noise, squid_coupling, Axis};
use maglev_core::pickup::{optimize_pickup, LoopGeometry, SquidCircuit};
use maglev_core::sphere::{gravity_sag, stiffness, trap_frequencies};
use maglev_core::Error;

use crate::error::CliError;
use crate::report::{Report, Table};
use crate::scenario::{Channel, PsdSection, Scenario, SweepParameter};

fn budget_table(name: &str, b: &BudgetReport) -> Table {
    let mut t = Table::quantities(name);
    for l in &b.lines {
        t.quantity(&l.quantity, l.value, &l.units, &l.anchor);
    }
    t
}

fn circuit(sc: &Scenario) -> Result<SquidCircuit, CliError> {
    let p = *Scenario::require(&sc.squid, "squid")?;
    Ok(SquidCircuit::new(p)?)
}

pub fn constants_table() -> Table {
    let mut t = Table::new("constants", &["name", "value", "units"]);
    for (name, value, units) in constants::table() {
        t.push(vec![name.into(), value.into(), units.into()]);
    }
    t
}

pub fn frequencies(sc: &Scenario) -> Result<Report, CliError> {
    let sphere = Scenario::require(&sc.sphere, "sphere")?;
    let qf = Scenario::require(&sc.field, "field")?.resolve()?;
    let f = trap_frequencies(&qf, sphere.density())?;
    let k = stiffness(&qf, sphere);
    let mut t = Table::new("frequencies", &["f_x_Hz", "f_y_Hz", "f_z_Hz"])
        .meta_num("b_x_T_per_m", qf.b_x())
        .meta_num("b_y_T_per_m", qf.b_y())
        .meta_num("b_z_T_per_m", qf.b_z())
        .meta_num("rho_kg_per_m3", sphere.density())
        .meta_num("mass_kg", sphere.mass())
        .meta("stiffness_N_per_m", format!("{:e} {:e} {:e}", k[0], k[1], k[2]))
        .meta_num("gravity_sag_m", gravity_sag(f[2])?);
    t.push(f.iter().map(|v| (*v).into()).collect());
    let mut r = Report::new("frequencies");
    r.tables.push(t);
    Ok(r)
}

pub fn coupling(sc: &Scenario) -> Result<Report, CliError> {
    let sphere = Scenario::require(&sc.sphere, "sphere")?;
    let qf = Scenario::require(&sc.field, "field")?.resolve()?;
    let grid = Scenario::require(&sc.coupling, "coupling")?;
    let circuit = sc.squid.map(SquidCircuit::new).transpose()?;
    let mut columns = vec!["r_p_m", "z_p_m", "nu_closed_form_Wb_per_m", "nu_quadrature_Wb_per_m", "relative_difference"];
    if circuit.is_some() {
        columns.extend(["eta_Phi0_per_m", "sqrt_s_nn_m_per_sqrt_Hz"]);
    }
    let mut t = Table::new("coupling", &columns);
    for &r_p in &grid.r_p {
        for &z_p in &grid.z_p {
            let closed = coupling_nu_analytic(qf.b_z(), sphere.radius(), r_p, z_p)?;
            let lp = LoopGeometry::coaxial_circle(r_p, z_p)?;
            let numeric = coupling_nu_numeric(&qf, sphere, &lp, Axis::Z)?;
            let diff = (numeric - closed).abs() / closed.abs().max(numeric.abs());
            let mut row = vec![r_p.into(), z_p.into(), closed.into(), numeric.into(), diff.into()];
            if let Some(c) = &circuit {
                row.push((squid_coupling(closed, c) / PHI_0).into());
                row.push(measurement_noise(closed, c)?.sqrt().into());
            }
            t.push(row);
        }
    }
    let mut r = Report::new("coupling");
    r.tables.push(t);
    Ok(r)
}

pub fn optimize(sc: &Scenario) -> Result<Report, CliError> {
    let sphere = Scenario::require(&sc.sphere, "sphere")?;
    let qf = Scenario::require(&sc.field, "field")?.resolve()?;
    let pickup = Scenario::require(&sc.pickup, "pickup")?;
    let c = circuit(sc)?;
    let o = optimize_pickup(sphere, qf.b_z().abs(), &c, pickup.wire_width, pickup.gap, &pickup.optimizer)?;
    let g = o.grid;
    let mut t = Table::quantities("optimum")
        .meta("inner_radius_range_m", format!("{:e} {:e}", g.inner_radius_range[0], g.inner_radius_range[1]))
        .meta("z_range_m", format!("{:e} {:e}", g.z_range[0], g.z_range[1]))
        .meta("grid_points", g.grid_points)
        .meta("n_max", g.n_max)
        .meta("refine_rounds", g.refine_rounds);
    t.quantity("inner_radius", o.inner_radius, "m", "optimised");
    t.quantity("z_p", o.z_p, "m", "optimised");
    t.quantity("n_turns", o.n_turns as f64, "1", "optimised");
    t.quantity("nu", o.nu, "Wb/m", "sum of single-turn closed forms");
    t.quantity("l_p", o.l_p, "H", "K1 mu0 N^2 d_avg / (1 + K2 fill)");
    t.quantity("eta", o.eta, "Wb/m", "M nu / (L_P + L_I + L_W)");
    t.quantity("eta_phi0", o.eta_phi0_per_m, "Phi0/m", "eta / Phi0");
    t.quantity("s_nn", o.s_nn, "m^2/Hz", "S_phiphi / eta^2");
    t.quantity("sqrt_s_nn", o.sqrt_s_nn, "m/sqrt(Hz)", "sqrt(S_nn)");
    t.quantity("z_constraint_active", f64::from(u8::from(o.z_constraint_active)), "bool", "z_p at lower bound");
    let mut r = Report::new("optimize-pickup");
    r.tables.push(t);
    Ok(r)
}

pub fn isolation(sc: &Scenario) -> Result<Report, CliError> {
    let sec = Scenario::require(&sc.isolation, "isolation")?;
    let stack = IsolationStack::new(sec.stages.clone())?;
    let yields = yield_check(&stack)?;
    let fv = stack.stage_frequencies()?;
    let mut stages = Table::new(
        "stages",
        &[
            "stage",
            "mass_kg",
            "spring_constant_N_per_m",
            "frequency_Hz",
            "horizontal_frequency_Hz",
            "load_ratio",
            "yield_warning",
        ],
    );
    for (i, (s, y)) in stack.stages.iter().zip(&yields).enumerate() {
        stages.push(vec![
            i.into(),
            s.mass.into(),
            s.spring_constant().into(),
            fv[i].into(),
            s.horizontal_frequency().into(),
            y.ratio.into(),
            y.warning.into(),
        ]);
    }
    let mut modes = Table::new("modes", &["mode", "frequency_Hz"]);
    for (i, f) in normal_modes(&stack)?.iter().enumerate() {
        modes.push(vec![i.into(), (*f).into()]);
    }
    let freqs = match &sec.frequencies {
        Some(f) => f.clone(),
        None => sec.sweep.frequencies()?,
    };
    let mut curve = Table::new("transmissibility", &["f_Hz", "transmissibility"])
        .meta_num("dc_gain", transfer_function(&stack, 0.0)?);
    for f in freqs {
        if !(f.is_finite() && f >= 0.0) {
            return Err(CliError::Validation(format!("isolation.frequencies: {f} is not a frequency")));
        }
        let t = match transfer_function(&stack, f) {
            Ok(t) => t,
            Err(Error::OnResonance { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        curve.push(vec![f.into(), t.into()]);
    }
    let mut r = Report::new("isolation");
    r.tables.extend([stages, modes, curve]);
    Ok(r)
}

pub fn budget(sc: &Scenario) -> Result<Report, CliError> {
    let mode = Scenario::require(&sc.mode, "mode")?;
    let noise = sc.noise.clone().unwrap_or_default();
    noise.validate()?;
    let bin = sc.readout.and_then(|r| r.bin_width);
    let mut r = Report::new("budget");
    r.tables.push(budget_table("sensing", &sensing_budget(mode, noise.s_nn, bin)?));
    if !noise.s_epseps.is_zero() {
        r.tables.push(budget_table("vibration", &vibration_budget(mode, &noise.s_epseps)?));
    }
    if let Some(eta) = sc.readout.and_then(|r| r.eta) {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(CliError::Validation(format!("readout.eta: must be finite and > 0, got {eta}")));
        }
        let c = circuit(sc)?;
        let g = ground_state_budget(mode, &c, eta * PHI_0, &noise.s_epseps, &noise.s_deltadelta)?;
        r.tables.push(budget_table("ground_state", &g));
    }
    Ok(r)
}

pub fn filter(sc: &Scenario) -> Result<Report, CliError> {
    let sec = Scenario::require(&sc.filter, "filter")?;
    let f = match (sec.kappa, sec.r_c, sec.l_c) {
        (Some(k), _, _) => RlFilter::from_kappa(k).map_err(|e| CliError::invalid("filter.kappa", e))?,
        (None, Some(r), Some(l)) => RlFilter::new(r, l).map_err(|e| CliError::invalid("filter", e))?,
        _ => return Err(CliError::Validation("filter: kappa or R_C and L_C required".into())),
    };
    let mut resp = Table::new(
        "response",
        &["f_Hz", "amplitude", "amplitude_dB", "psd_attenuation", "psd_dB"],
    )
    .meta_num("kappa_per_s", f.kappa);
    for &freq in &sec.frequencies {
        if !(freq.is_finite() && freq >= 0.0) {
            return Err(CliError::Validation(format!("filter.frequencies: {freq} is not a frequency")));
        }
        let x = f.response(freq);
        resp.push(vec![
            freq.into(),
            x.amplitude.into(),
            x.amplitude_db.into(),
            x.psd_attenuation.into(),
            x.psd_db.into(),
        ]);
    }
    let mut r = Report::new("filter");
    r.tables.push(resp);
    if !sec.step_times.is_empty() {
        let mut step = Table::new("step", &["t_s", "response"]);
        for &t in &sec.step_times {
            step.push(vec![t.into(), f.step_response(t).into()]);
        }
        r.tables.push(step);
    }
    Ok(r)
}

fn series_table(name: &str, s: &TimeSeries) -> Table {
    let mut t = Table::new(name, &["t", "x", "y_meas"])
        .meta("seed", s.metadata.seed)
        .meta("config_digest", &s.metadata.config_digest)
        .meta("f0_Hz", format!("{:e}", s.metadata.f0))
        .meta("sample_interval_s", format!("{:e}", s.sample_interval));
    for i in 0..s.len() {
        t.push(vec![s.time(i).into(), s.x[i].into(), s.y_meas[i].into()]);
    }
    t
}

fn lorentzian_table(fit: &LorentzianFit) -> Table {
    let mut t = Table::quantities("lorentzian");
    t.quantity("f0", fit.f0, "Hz", "fit");
    t.quantity("gamma", fit.gamma, "1/s", "fit");
    t.quantity("linewidth", fit.linewidth, "Hz", "gamma / 2 pi");
    t.quantity("area", fit.area, "psd*Hz", "fit");
    t.quantity("background", fit.background, "psd", "fit");
    t.quantity("resolution_limited", f64::from(u8::from(fit.resolution_limited)), "bool", "linewidth < 2 df");
    t.quantity("residual", fit.residual, "1", "rms relative residual");
    t.quantity("bins", fit.bins as f64, "1", "bins in band");
    t
}

/// PSD table and, when a band is given, the Lorentzian fit.
fn spectral_tables(samples: &[f64], fs: f64, p: &PsdSection) -> Result<Vec<Table>, CliError> {
    let overlap = p.overlap.unwrap_or(p.segment / 2);
    let psd = welch_psd(samples, fs, p.segment, overlap, p.window)?;
    let mut t = Table::new("psd", &["f_Hz", "psd"])
        .meta("segments", psd.segments)
        .meta("df_Hz", format!("{:e}", psd.df));
    for (k, v) in psd.psd.iter().enumerate() {
        t.push(vec![psd.frequency(k).into(), (*v).into()]);
    }
    let mut out = vec![t];
    if let Some([lo, hi]) = p.fit_band {
        out.push(lorentzian_table(&lorentzian_fit(&psd, lo, hi)?));
    }
    Ok(out)
}

fn sim_config(sc: &Scenario, seed: u64) -> Result<SimConfig, CliError> {
    let sim = Scenario::require(&sc.sim, "sim")?;
    let mode = *Scenario::require(&sc.mode, "mode")?;
    let mut c = SimConfig::new(mode, sim.dt, sim.duration, seed);
    c.noise = sc.noise.clone().unwrap_or_default();
    c.feedback = sim.feedback;
    c.initial = sim.initial;
    c.integrator = sim.integrator;
    c.record_every = sim.record_every;
    c.spectral = sim.spectral;
    c.validate()?;
    Ok(c)
}

fn rms(v: &[f64]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / v.len().max(1) as f64).sqrt()
}

/// Seed precedence: command line, `[sim]`, top level, zero.
pub fn resolve_seed(sc: &Scenario, flag: Option<u64>) -> u64 {
    flag.or(sc.sim.as_ref().and_then(|s| s.seed)).or(sc.seed).unwrap_or(0)
}

pub fn simulate_cmd(sc: &Scenario, seed: u64, sweep: bool) -> Result<Report, CliError> {
    let base = sim_config(sc, seed)?;
    let sim = Scenario::require(&sc.sim, "sim")?;
    let mut r = Report::new("simulate");
    r.seed = Some(seed);
    if !sweep {
        let s = simulate(&base)?;
        r.tables.push(series_table("series", &s));
        if let Some(p) = &sim.psd {
            r.tables.extend(spectral_tables(&s.y_meas, s.sample_rate(), p)?);
        }
        return Ok(r);
    }
    let sw = sim
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sim.sweep: section is required by --sweep".into()))?;
    let mut configs = Vec::with_capacity(sw.values.len());
    for &v in &sw.values {
        let mut c = base.clone();
        match sw.parameter {
            SweepParameter::FeedbackGain => {
                c.feedback.enabled = true;
                c.feedback.gain = v;
            }
            SweepParameter::FeedbackPhase => c.feedback.phase = v,
            SweepParameter::MeasurementNoise => c.noise.s_nn = v,
            SweepParameter::BathTemperature => {
                c.mode = c.mode.with_t0(v).map_err(|e| CliError::invalid("sim.sweep.values", e))?
            }
            SweepParameter::Replica => {}
        }
        c.validate().map_err(|e| CliError::invalid("sim.sweep.values", e))?;
        configs.push(c);
    }
    let runs = simulate_sweep(&configs, seed);
    let mut summary = Table::new(
        "sweep",
        &["index", sw.parameter.key(), "seed", "config_digest", "x_rms_second_half_m", "y_meas_rms_second_half_m"],
    );
    let mut series = Vec::with_capacity(runs.len());
    for (i, (run, v)) in runs.into_iter().zip(&sw.values).enumerate() {
        let s = run?;
        let half = s.len() / 2;
        summary.push(vec![
            i.into(),
            (*v).into(),
            s.metadata.seed.to_string().into(),
            s.metadata.config_digest.clone().into(),
            rms(&s.x[half..]).into(),
            rms(&s.y_meas[half..]).into(),
        ]);
        series.push(series_table(&format!("series_{i}"), &s));
    }
    r.tables.push(summary);
    r.tables.extend(series);
    Ok(r)
}

pub fn analyze(sc: &Scenario, input: &Path) -> Result<Report, CliError> {
    let sec = Scenario::require(&sc.analysis, "analysis")?;
    let file = File::open(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let s = TimeSeries::read_csv(BufReader::new(file))?;
    let samples = match sec.channel {
        Channel::X => &s.x,
        Channel::YMeas => &s.y_meas,
    };
    let fs = s.sample_rate();
    let mut r = Report::new("analyze");
    if let Some(p) = &sec.psd {
        r.tables.extend(spectral_tables(samples, fs, p)?);
    }
    if let Some(guess) = sec.ringdown {
        let fit = ringdown_q(samples, s.sample_interval, guess)?;
        let mut t = Table::quantities("ringdown");
        t.quantity("f0", fit.f0, "Hz", "demodulated carrier");
        t.quantity("gamma", fit.gamma, "1/s", "-2 d ln(amplitude)/dt");
        t.quantity("gamma_sigma", fit.gamma_sigma, "1/s", "standard error");
        t.quantity("Q", fit.q, "1", "2 pi f0 / gamma");
        t.quantity("residual", fit.residual, "1", "rms of ln(amplitude) residual");
        if sec.two_segment {
            let two = ringdown_two_segment(samples, s.sample_interval, guess)?;
            t.quantity("break_time", two.break_time, "s", "best breakpoint");
            t.quantity("gamma_before", two.gamma_before, "1/s", "fit before break");
            t.quantity("gamma_after", two.gamma_after, "1/s", "fit after break");
            t.quantity("jump", f64::from(u8::from(two.jump)), "bool", "rates differ beyond 10% and 5 sigma");
        }
        r.tables.push(t);
    }
    if r.tables.is_empty() {
        return Err(CliError::Validation(
            "analysis: request at least one of `psd` and `ringdown`".into(),
        ));
    }
    Ok(r)
}
