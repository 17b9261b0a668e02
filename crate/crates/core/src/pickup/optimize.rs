use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coupling::coupling_nu_analytic;
use super::squid::SquidCircuit;
use super::wheeler::WheelerCoefficients;
use crate::constants::{MU_0, PHI_0};
use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::golden_section_min;
use crate::sphere::SphereParams;

/// Search box and resolution of the pickup optimiser. Lengths default to
/// multiples of the sphere radius when left unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSettings {
    /// Lower bound on the coil height above the sphere centre (default R).
    pub z_min: Option<f64>,
    /// Upper bound on the coil height (default 4R).
    pub z_max: Option<f64>,
    /// Upper bound on the inner radius (default 2R).
    pub inner_radius_max: Option<f64>,
    pub n_max: usize,
    pub grid_points: usize,
    pub refine_rounds: usize,
    pub wheeler: WheelerCoefficients,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        OptimizerSettings {
            z_min: None,
            z_max: None,
            inner_radius_max: None,
            n_max: 400,
            grid_points: 41,
            refine_rounds: 8,
            wheeler: WheelerCoefficients::default(),
        }
    }
}

/// Planar spiral of concentric turns read out by a fixed SQUID circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralProblem {
    pub sphere_radius: f64,
    pub b_z: f64,
    pub circuit: SquidCircuit,
    pub wire_width: f64,
    pub gap: f64,
    pub wheeler: WheelerCoefficients,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpiralPoint {
    pub nu: f64,
    pub l_p: f64,
    pub s_nn: f64,
}

impl SpiralProblem {
    fn pitch(&self) -> f64 {
        self.wire_width + self.gap
    }

    fn turn_radius(&self, inner_radius: f64, i: usize) -> f64 {
        inner_radius + 0.5 * self.wire_width + i as f64 * self.pitch()
    }

    fn l_p(&self, inner_radius: f64, n: usize) -> f64 {
        let nf = n as f64;
        let d_in = 2.0 * inner_radius;
        let d_out = 2.0 * (inner_radius + nf * self.wire_width + (nf - 1.0) * self.gap);
        let fill = (d_out - d_in) / (d_out + d_in);
        self.wheeler.k1 * MU_0 * nf * nf * 0.5 * (d_in + d_out) / (1.0 + self.wheeler.k2 * fill)
    }

    fn s_nn(&self, nu: f64, l_p: f64) -> f64 {
        let c = &self.circuit;
        let l = l_p + c.l_i() + c.l_w();
        c.s_phiphi() * l * l / (nu * nu * c.mutual() * c.mutual())
    }

    /// Coupling, Wheeler inductance and position noise of one geometry.
    pub fn evaluate(&self, inner_radius: f64, z_p: f64, n: usize) -> Result<SpiralPoint> {
        let mut nu = 0.0;
        for i in 0..n {
            nu += coupling_nu_analytic(self.b_z, self.sphere_radius, self.turn_radius(inner_radius, i), z_p)?;
        }
        if nu == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        let l_p = self.l_p(inner_radius, n);
        Ok(SpiralPoint {
            nu,
            l_p,
            s_nn: self.s_nn(nu, l_p),
        })
    }

    /// `S_nn` for every turn count `1..=n_max` at one `(inner_radius, z_p)`;
    /// infeasible entries are `+∞`.
    fn sweep_turns(&self, inner_radius: f64, z_p: f64, n_max: usize) -> Vec<f64> {
        let mut nu = 0.0;
        let mut out = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            match coupling_nu_analytic(self.b_z, self.sphere_radius, self.turn_radius(inner_radius, n - 1), z_p) {
                Ok(v) => nu += v,
                Err(_) => {
                    out.resize(n_max, f64::INFINITY);
                    return out;
                }
            }
            let s = if nu == 0.0 {
                f64::INFINITY
            } else {
                self.s_nn(nu, self.l_p(inner_radius, n))
            };
            out.push(s);
        }
        out
    }

    fn objective(&self, inner_radius: f64, z_p: f64, n: usize) -> f64 {
        self.evaluate(inner_radius, z_p, n).map(|p| p.s_nn).unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridMetadata {
    pub inner_radius_range: [f64; 2],
    pub z_range: [f64; 2],
    pub grid_points: usize,
    pub n_max: usize,
    pub refine_rounds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PickupOptimum {
    pub inner_radius: f64,
    pub z_p: f64,
    pub n_turns: usize,
    pub nu: f64,
    pub l_p: f64,
    /// Wb/m.
    pub eta: f64,
    pub eta_phi0_per_m: f64,
    /// m²/Hz.
    pub s_nn: f64,
    pub sqrt_s_nn: f64,
    pub z_constraint_active: bool,
    pub grid: GridMetadata,
}

#[derive(Clone, Copy)]
struct Candidate {
    s: f64,
    n: usize,
    r: f64,
    z: f64,
}

impl Candidate {
    /// Strictly lower noise wins; ties go to fewer turns, then smaller radius.
    fn better_than(&self, other: &Candidate) -> bool {
        if self.s != other.s {
            return self.s < other.s;
        }
        if self.n != other.n {
            return self.n < other.n;
        }
        self.r < other.r
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Minimises the position noise over the inner radius, height and turn count
/// of a planar spiral. Deterministic: a coarse grid followed by alternating
/// turn-count scans and golden-section line searches.
pub fn optimize_pickup(
    sphere: &SphereParams,
    b_z: f64,
    template: &SquidCircuit,
    wire_width: f64,
    gap: f64,
    settings: &OptimizerSettings,
) -> Result<PickupOptimum> {
    ensure_positive("b_z", b_z)?;
    ensure_positive("wire_width", wire_width)?;
    crate::error::ensure_non_negative("gap", gap)?;
    if settings.n_max < 1 || settings.grid_points < 2 {
        return Err(Error::InvalidParameter {
            name: "optimizer.grid_points",
            reason: "need n_max >= 1 and at least 2 grid points".into(),
        });
    }
    let radius = sphere.radius();
    let z_min = settings.z_min.unwrap_or(radius);
    let z_max = settings.z_max.unwrap_or(4.0 * radius);
    let r_max = settings.inner_radius_max.unwrap_or(2.0 * radius);
    crate::error::ensure_non_negative("optimizer.z_min", z_min)?;
    if !(z_max > z_min) || !(r_max > 0.0) {
        return Err(Error::InfeasibleConstraint(format!(
            "empty search box: z in [{z_min}, {z_max}], inner radius in [0, {r_max}]"
        )));
    }
    let problem = SpiralProblem {
        sphere_radius: radius,
        b_z,
        circuit: *template,
        wire_width,
        gap,
        wheeler: settings.wheeler,
    };

    let rs = linspace(0.0, r_max, settings.grid_points);
    let zs = linspace(z_min, z_max, settings.grid_points);
    let cells: Vec<(f64, f64)> = rs.iter().flat_map(|&r| zs.iter().map(move |&z| (r, z))).collect();
    let coarse: Vec<Candidate> = cells
        .par_iter()
        .map(|&(r, z)| best_turns(&problem, r, z, settings.n_max))
        .collect();
    let mut best = coarse
        .into_iter()
        .reduce(|a, b| if b.better_than(&a) { b } else { a })
        .expect("grid is non-empty");
    if !best.s.is_finite() {
        return Err(Error::InfeasibleConstraint(
            "no geometry in the search box keeps every turn outside the sphere".into(),
        ));
    }

    let mut dr = r_max / (settings.grid_points - 1) as f64;
    let mut dz = (z_max - z_min) / (settings.grid_points - 1) as f64;
    for _ in 0..settings.refine_rounds {
        let n = best.n;
        let (r, _) = golden_section_min(
            |r| problem.objective(r, best.z, n),
            (best.r - dr).max(0.0),
            (best.r + dr).min(r_max),
            1e-6 * dr,
        );
        let (z, _) = golden_section_min(
            |z| problem.objective(r, z, n),
            (best.z - dz).max(z_min),
            (best.z + dz).min(z_max),
            1e-6 * dz,
        );
        let cand = best_turns(&problem, r, z, settings.n_max);
        if cand.better_than(&best) {
            best = cand;
        }
        dr *= 0.5;
        dz *= 0.5;
    }

    let point = problem.evaluate(best.r, best.z, best.n)?;
    let eta = point.nu * template.mutual() / (point.l_p + template.l_i() + template.l_w());
    Ok(PickupOptimum {
        inner_radius: best.r,
        z_p: best.z,
        n_turns: best.n,
        nu: point.nu,
        l_p: point.l_p,
        eta,
        eta_phi0_per_m: eta / PHI_0,
        s_nn: point.s_nn,
        sqrt_s_nn: point.s_nn.sqrt(),
        z_constraint_active: (best.z - z_min).abs() <= 1e-3 * radius,
        grid: GridMetadata {
            inner_radius_range: [0.0, r_max],
            z_range: [z_min, z_max],
            grid_points: settings.grid_points,
            n_max: settings.n_max,
            refine_rounds: settings.refine_rounds,
        },
    })
}

fn best_turns(problem: &SpiralProblem, r: f64, z: f64, n_max: usize) -> Candidate {
    let sweep = problem.sweep_turns(r, z, n_max);
    let mut best = Candidate {
        s: f64::INFINITY,
        n: 1,
        r,
        z,
    };
    for (i, &s) in sweep.iter().enumerate() {
        if s < best.s {
            best = Candidate { s, n: i + 1, r, z };
        }
    }
    best
}
