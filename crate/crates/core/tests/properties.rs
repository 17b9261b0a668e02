use std::f64::consts::PI;

use maglev_core::constants::{HBAR, K_B, MU_0};
use maglev_core::dynamics::{simulate, split_seed, welch_psd, SimConfig, Window};
use maglev_core::field::{biot_savart_field, extract_gradients, CoilPair, QuadrupoleField};
use maglev_core::isolation::{normal_modes, transfer_function, tridiagonal_eigenvalues, IsolationStack, Stage};
use maglev_core::noise::{
    feedback_phonon_number, optimal_eta, sql_psd, susceptibility, vibration_displacement_psd, vibration_rms,
    NoiseCurve, OscillatorMode, RlFilter,
};
use maglev_core::pickup::{
    coupling_nu_analytic, coupling_nu_numeric, measurement_noise, squid_coupling, Axis, LoopGeometry, SquidCircuit,
    SquidParams,
};
use maglev_core::quadrature::integrate_adaptive;
use maglev_core::sphere::{force_analytic, force_stress_tensor, solve_coefficients, stiffness, trap_frequencies, SphereParams};
use maglev_core::Vec3;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn circuit(product: f64, l_eff: f64) -> SquidCircuit {
    SquidCircuit::new(SquidParams {
        l_s: 15e-12,
        l_i: 0.53e-6,
        l_w: 100e-9,
        l_p: 50e-9,
        k: Some(0.8),
        mutual: None,
        s_phiphi: product * HBAR * l_eff,
        s_jj: Some(product * HBAR / l_eff),
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coil_gradients_are_trace_free_and_symmetric(
        radius in 2e-3..20e-3f64,
        sep_frac in 0.3..2.0f64,
        current in 0.1..50.0f64,
    ) {
        let coils = CoilPair::circular(radius, sep_frac * radius, 10, current).unwrap();
        let g = extract_gradients(&coils).unwrap();
        prop_assert!(g.trace_residual.abs() < 1e-6, "{}", g.trace_residual);
        prop_assert!(close(g.raw[0], g.raw[1], 1e-6));
    }

    #[test]
    fn biot_savart_is_linear_and_scale_covariant(
        radius in 2e-3..20e-3f64,
        current in 0.1..50.0f64,
        k in 0.5..4.0f64,
        px in -0.3..0.3f64, py in -0.3..0.3f64, pz in -0.3..0.3f64,
    ) {
        let coils = CoilPair::circular(radius, radius, 5, current).unwrap();
        let p = Vec3::new(px, py, pz) * radius;
        let b = biot_savart_field(&coils, p).unwrap();
        let doubled = biot_savart_field(&coils.scaled_current(2.0), p).unwrap();
        prop_assert!((doubled - 2.0 * b).norm() <= 1e-12 * b.norm());
        // B · L / I is invariant under uniform scaling of geometry and point
        let scaled = biot_savart_field(&coils.scaled_geometry(k), p * k).unwrap();
        prop_assert!((scaled * k - b).norm() <= 1e-8 * b.norm(), "{} {}", scaled * k, b);
    }

    #[test]
    fn surface_field_is_tangential(
        bx in 10.0..200.0f64, by in 10.0..200.0f64,
        ox in -0.3..0.3f64, oy in -0.3..0.3f64, oz in -0.3..0.3f64,
        theta in 0.0..PI, phi in 0.0..2.0 * PI,
    ) {
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        let qf = QuadrupoleField::new(bx, by);
        let sol = solve_coefficients(&qf, Vec3::new(ox, oy, oz) * s.radius(), &s);
        let n = Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
        let b = sol.total_field(n * s.radius()).unwrap();
        let scale = qf.b_z().abs() * s.radius();
        prop_assert!(b.dot(&n).abs() < 1e-10 * scale);
    }

    #[test]
    fn stress_tensor_matches_force_law(
        bx in 10.0..200.0f64, by in 10.0..200.0f64,
        ox in -0.2..0.2f64, oy in -0.2..0.2f64, oz in -0.2..0.2f64,
    ) {
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        let qf = QuadrupoleField::new(bx, by);
        let off = Vec3::new(ox, oy, oz) * s.radius() / 3f64.sqrt();
        prop_assume!(off.norm() > 1e-3 * s.radius());
        let sol = solve_coefficients(&qf, off, &s);
        let st = force_stress_tensor(&sol, &s, 32).unwrap().force;
        let an = force_analytic(&qf, off, &s);
        prop_assert!((st - an).norm() < 1e-3 * an.norm());
    }

    #[test]
    fn frequencies_consistent_with_stiffness_and_homogeneous(
        bx in 10.0..200.0f64, by in 10.0..200.0f64, rho in 1e3..2e4f64, k in 0.1..10.0f64,
    ) {
        let s = SphereParams::new(50e-6, rho).unwrap();
        let qf = QuadrupoleField::new(bx, by);
        let f = trap_frequencies(&qf, rho).unwrap();
        let kk = stiffness(&qf, &s);
        for i in 0..3 {
            prop_assert!(close((2.0 * PI * f[i]).powi(2), kk[i] / s.mass(), 1e-12));
            prop_assert!(close((2.0 * PI * f[i]).powi(2), 3.0 * qf.gradients()[i].powi(2) / (2.0 * MU_0 * rho), 1e-12));
        }
        let g = trap_frequencies(&qf.scaled(k), rho).unwrap();
        for i in 0..3 {
            prop_assert!(close(g[i], k * f[i], 1e-12));
        }
    }

    #[test]
    fn coupling_closed_form_matches_quadrature(rp in 5e-6..250e-6f64, zp in 55e-6..300e-6f64) {
        let s = SphereParams::new(50e-6, 10.9e3).unwrap();
        let qf = QuadrupoleField::new(57.0, 90.0);
        let lp = LoopGeometry::coaxial_circle(rp, zp).unwrap();
        let numeric = coupling_nu_numeric(&qf, &s, &lp, Axis::Z).unwrap();
        let closed = coupling_nu_analytic(qf.b_z(), s.radius(), rp, zp).unwrap();
        prop_assert!(close(numeric, closed, 5e-3), "{numeric} {closed}");
    }

    #[test]
    fn coupling_is_scale_invariant(rp in 0.1..5.0f64, zp in 1.1..5.0f64, big_r in 1e-6..1e-3f64, b in 1.0..500.0f64) {
        let nu = coupling_nu_analytic(b, big_r, rp * big_r, zp * big_r).unwrap();
        let unit = coupling_nu_analytic(1.0, 1.0, rp, zp).unwrap();
        prop_assert!(close(nu / (b * big_r * big_r), unit, 1e-12));
    }

    #[test]
    fn noise_times_coupling_squared_is_flux_noise(nu in 1e-8..1e-2f64, product in 1.0..20.0f64) {
        let c = circuit(product, 20e-12);
        let eta = squid_coupling(nu, &c);
        let s_nn = measurement_noise(nu, &c).unwrap();
        prop_assert!(close(s_nn * eta * eta, c.s_phiphi(), 1e-12));
    }

    #[test]
    fn vibration_psd_integrates_to_rms(q in 10.0..1e4f64, f0 in 5.0..500.0f64, s in 1e-24..1e-16f64) {
        let mode = OscillatorMode::from_quality(1e-9, f0, q, 0.0).unwrap();
        let curve = NoiseCurve::Constant(s);
        let hw = mode.gamma() / (4.0 * PI);
        // f = f0 + hw tan(u) resolves the resonance
        let lo = (-f0 / hw).atan();
        let integral = integrate_adaptive(
            |u| {
                let f = f0 + hw * u.tan();
                vibration_displacement_psd(&mode, &curve, 2.0 * PI * f) * hw / u.cos().powi(2)
            },
            lo,
            0.5 * PI * (1.0 - 1e-12),
            1e-10,
            0.0,
        );
        let rms = vibration_rms(&mode, &curve).unwrap();
        prop_assert!(close(integral, rms * rms, 1e-2), "{integral} {}", rms * rms);
    }

    #[test]
    fn measured_psd_respects_quantum_limit(log_eta in -2.0..2.0f64, product in 1.0..10.0f64, t0 in 0.0..0.05f64) {
        let mode = OscillatorMode::from_quality(5.6e-9, 212.0, 1e5, t0).unwrap();
        let c = circuit(product, 15e-12);
        let w0 = mode.omega0();
        let chi = susceptibility(&mode, w0).norm();
        let floor = 2.0 * chi * c.noise_product() + chi * chi * 4.0 * K_B * t0 * mode.mass() * mode.gamma();
        let eta_opt = optimal_eta(&mode, &c, w0);
        let measured = sql_psd(&mode, &c, eta_opt * 10f64.powf(log_eta), w0);
        prop_assert!(measured >= floor * (1.0 - 1e-12));
        prop_assert!(close(sql_psd(&mode, &c, eta_opt, w0), floor, 1e-12));
    }

    #[test]
    fn thermal_occupation_scalings(k in 0.2..5.0f64) {
        let base = OscillatorMode::new(5.6e-9, 2.0 * PI * 212.0, 1e-6, 15e-3).unwrap();
        let c = circuit(1.0, 15e-12);
        let eta = 1e-7;
        let n0 = feedback_phonon_number(&base, &c, eta).thermal;
        let t = OscillatorMode::new(5.6e-9, base.omega0(), 1e-6, 15e-3 * k).unwrap();
        let g = OscillatorMode::new(5.6e-9, base.omega0(), 1e-6 * k, 15e-3).unwrap();
        let m = OscillatorMode::new(5.6e-9 * k, base.omega0(), 1e-6, 15e-3).unwrap();
        prop_assert!(close(feedback_phonon_number(&t, &c, eta).thermal, k * n0, 1e-12));
        prop_assert!(close(feedback_phonon_number(&g, &c, eta).thermal, k * n0, 1e-12));
        prop_assert!(close(feedback_phonon_number(&m, &c, eta).thermal, k * n0, 1e-12));
        prop_assert!(close(feedback_phonon_number(&base, &circuit(1.0, 15e-12 * k), eta).thermal, k * n0, 1e-12));
        prop_assert!(close(feedback_phonon_number(&base, &c, eta * k).thermal, n0 / (k * k), 1e-12));
    }

    #[test]
    fn filter_power_is_amplitude_squared(kappa in 1e-4..10.0f64, f in 0.0..1e4f64) {
        let r = RlFilter::from_kappa(kappa).unwrap().response(f);
        prop_assert_eq!(r.psd_attenuation, r.amplitude * r.amplitude);
    }

    #[test]
    fn chain_modes_satisfy_determinant_identity_and_interlace(
        masses in prop::collection::vec(0.05..2.0f64, 1..7),
        lengths in prop::collection::vec(0.02..0.3f64, 7),
        wires in prop::collection::vec(1u32..5, 7),
    ) {
        let stages: Vec<Stage> = masses
            .iter()
            .enumerate()
            .map(|(i, &m)| Stage::new(m, wires[i], lengths[i], 50e-6, 1e3).unwrap())
            .collect();
        let stack = IsolationStack::new(stages.clone()).unwrap();
        let fv: f64 = stack.stage_frequencies().unwrap().iter().map(|f| f * f).product();
        let modes = normal_modes(&stack).unwrap();
        let fnn: f64 = modes.iter().map(|f| f * f).product();
        prop_assert!(close(fv, fnn, 1e-8));
        prop_assert_eq!(transfer_function(&stack, 0.0).unwrap(), 1.0);
        // Cauchy interlacing against the leading principal submatrix
        let n = stages.len();
        if n > 1 {
            let k: Vec<f64> = stages.iter().map(Stage::spring_constant).collect();
            let diag: Vec<f64> = (0..n - 1).map(|i| (k[i] + k[i + 1]) / masses[i]).collect();
            let off: Vec<f64> = (0..n - 2).map(|i| -k[i + 1] / (masses[i] * masses[i + 1]).sqrt()).collect();
            let sub = tridiagonal_eigenvalues(&diag, &off);
            let full: Vec<f64> = modes.iter().map(|f| (2.0 * PI * f).powi(2)).collect();
            for i in 0..n - 1 {
                prop_assert!(full[i] <= sub[i] * (1.0 + 1e-10));
                prop_assert!(sub[i] <= full[i + 1] * (1.0 + 1e-10));
            }
        }
    }

    #[test]
    fn single_stage_transfer_is_textbook(m in 0.05..2.0f64, f in 0.1..500.0f64) {
        let st = Stage::new(m, 1, 0.05, 40e-6, 10.0).unwrap();
        let fv = st.frequency().unwrap();
        prop_assume!((f - fv).abs() > 1e-6 * fv);
        let stack = IsolationStack::new(vec![st]).unwrap();
        let t = transfer_function(&stack, f).unwrap();
        prop_assert!(close(t, (fv * fv / (fv * fv - f * f)).abs(), 1e-10));
    }

    #[test]
    fn replay_is_bit_identical(seed in any::<u64>()) {
        let mode = OscillatorMode::from_quality(1e-9, 20.0, 30.0, 1e-3).unwrap();
        let mut c = SimConfig::new(mode, 1e-3, 0.5, seed);
        c.noise.s_nn = 1e-22;
        c.noise.s_epseps = NoiseCurve::Constant(1e-24);
        prop_assert_eq!(simulate(&c).unwrap(), simulate(&c).unwrap());
    }

    #[test]
    fn split_seeds_are_distinct(master in any::<u64>()) {
        let seeds: Vec<u64> = (0..64).map(|i| split_seed(master, i)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), seeds.len());
    }

    #[test]
    fn rectangular_welch_obeys_parseval(values in prop::collection::vec(-1e3..1e3f64, 64..512)) {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        prop_assume!(var > 0.0);
        let p = welch_psd(&values, 7.0, n, 0, Window::Rectangular).unwrap();
        prop_assert!(close(p.total_power(), var, 1e-10));
    }

    #[test]
    fn noise_table_is_exact_at_nodes(psd in prop::collection::vec(1e-30..1e-10f64, 2..8)) {
        let f: Vec<f64> = (0..psd.len()).map(|i| 10f64.powi(i as i32)).collect();
        let curve = NoiseCurve::table(f.clone(), psd.clone()).unwrap();
        for (fi, si) in f.iter().zip(&psd) {
            prop_assert_eq!(curve.eval(*fi), *si);
        }
    }
}
