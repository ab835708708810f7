//! Two-component Gross-Pitaevskii solver on a cylindrical (ρ, z) grid.
//!
//! Internally everything is in oscillator units of the geometric-mean trap
//! frequency ω̄: length a_ho = √(ħ/mω̄), time 1/ω̄, energy ħω̄. Fields are
//! normalised so that ∫(|ψ₁|² + |ψ₂|²) dV = N. Time stepping is Strang
//! splitting: exact pointwise potential plus mean-field phase, and a kinetic
//! step made of two commuting Crank-Nicolson line solves (ρ and z).

mod grid;
mod tridiag;

use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by std methods when std is linked
use num_traits::Float;

pub use grid::{apply_pi, apply_pi_half, interference_visibility, output_fraction, CylGrid, SpinorField};
use tridiag::Cayley;

use crate::analysis::{fit_sinusoid_fixed_freq, FitResult, FringeDataset};
use crate::atomphys::{tf_chemical_potential, tf_peak_density, AtomSpecies, TrapConfig};
use crate::constants::{HBAR, TAU};
use crate::error::{positive, Error, Result};

/// Grid resolution and extent, the latter in multiples of the larger of the
/// Thomas-Fermi radius and the oscillator length along each axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_rho: usize,
    pub n_z: usize,
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_rho: 128, n_z: 256, extent: 4.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpeConfig {
    pub species: AtomSpecies,
    pub trap: TrapConfig,
    pub n: f64,
    pub grid: GridSpec,
    /// s
    pub dt_real: f64,
    /// s
    pub dt_imag: f64,
    /// Relative energy change per imaginary-time step at which the ground
    /// state counts as converged.
    pub convergence_tol: f64,
    /// Multiplier on a₁₂.
    pub a12_scale: f64,
    pub max_imag_steps: usize,
}

impl GpeConfig {
    /// N = 10⁶ in the ω_{ρ,z} = 2π×{55, 30} Hz trap.
    pub fn experiment() -> Self {
        Self {
            species: AtomSpecies::rb87(),
            trap: TrapConfig::gpe_default(),
            n: 1e6,
            grid: GridSpec::default(),
            dt_real: 2e-6,
            dt_imag: 1e-6,
            convergence_tol: 1e-12,
            a12_scale: 1.0,
            max_imag_steps: 200_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.species.validate()?;
        if !self.trap.is_cylindrical() {
            return Err(Error::InvalidParameter {
                name: "trap",
                value: self.trap.omega_y,
                reason: "cylindrical solver needs omega_x == omega_y",
            });
        }
        positive("atom_number", self.n)?;
        positive("dt_real", self.dt_real)?;
        positive("dt_imag", self.dt_imag)?;
        positive("convergence_tol", self.convergence_tol)?;
        crate::error::non_negative("a12_scale", self.a12_scale)?;
        positive("grid extent", self.grid.extent)?;
        let period_limit = 0.1 * TAU / self.trap.max_frequency();
        if self.dt_real > period_limit {
            return Err(Error::StepTooLarge { dt: self.dt_real, limit: period_limit });
        }
        if self.species.a11 > 0.0 {
            let mu = tf_chemical_potential(&self.species, &self.trap, self.n)?;
            let limit = HBAR / (2.0 * mu);
            if self.dt_real > limit {
                return Err(Error::StepTooLarge { dt: self.dt_real, limit });
            }
        }
        Ok(())
    }
}

/// SI scales of the oscillator units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorUnits {
    /// ω̄, rad/s
    pub omega: f64,
    /// a_ho, m
    pub length: f64,
    /// 1/ω̄, s
    pub time: f64,
    /// ħω̄, J
    pub energy: f64,
}

impl OscillatorUnits {
    pub fn new(species: &AtomSpecies, trap: &TrapConfig) -> Self {
        let omega = trap.mean_frequency();
        Self {
            omega,
            length: (HBAR / (species.mass * omega)).sqrt(),
            time: 1.0 / omega,
            energy: HBAR * omega,
        }
    }
}

/// Energy split into its three contributions, in ħω̄ (total, not per atom).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub potential: f64,
    pub interaction: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.potential + self.interaction
    }

    /// (2E_kin − 2E_pot + 3E_int) relative to the sum of magnitudes.
    pub fn virial_residual(&self) -> f64 {
        let v = 2.0 * self.kinetic - 2.0 * self.potential + 3.0 * self.interaction;
        v / (2.0 * self.kinetic.abs() + 2.0 * self.potential.abs() + 3.0 * self.interaction.abs())
    }
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub field: SpinorField,
    pub energy: EnergyParts,
    /// ħω̄ per atom
    pub chemical_potential: f64,
    pub steps: usize,
    /// Relative energy change on the last step.
    pub final_change: f64,
    /// Total energy after each step (ħω̄), across all stages.
    pub energy_trace: Vec<f64>,
    /// Indices into `energy_trace` where a new imaginary time step began.
    pub stage_starts: Vec<usize>,
}

/// Density and phase profiles at one instant, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    /// s
    pub t: f64,
    pub rho: Vec<f64>,
    pub z: Vec<f64>,
    /// m⁻³, row-major (ρ, z)
    pub density1: Vec<f64>,
    pub density2: Vec<f64>,
    /// arg(ψ₂ψ₁*)
    pub relative_phase: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RamseyOptions {
    /// s
    pub interrogation_time: f64,
    pub spin_echo: bool,
    pub phase_samples: usize,
    /// s, each ≤ interrogation_time
    pub snapshot_times: Vec<f64>,
}

impl RamseyOptions {
    pub fn new(interrogation_time: f64, spin_echo: bool) -> Self {
        Self { interrogation_time, spin_echo, phase_samples: 16, snapshot_times: Vec::new() }
    }
}

#[derive(Debug, Clone)]
pub struct RamseyResult {
    pub interrogation_time: f64,
    pub spin_echo: bool,
    /// p = N₂/N against final pulse phase.
    pub fringe: FringeDataset,
    pub fit: FitResult,
    pub visibility_fit: f64,
    pub visibility_overlap: f64,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
    /// Field just before the final pulse.
    pub final_field: SpinorField,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityPoint {
    /// s
    pub t: f64,
    pub visibility_fit: f64,
    pub visibility_overlap: f64,
    /// Fit visibility times e^{−T/τ}, or equal to it without an envelope.
    pub enveloped: f64,
}

#[derive(Debug, Clone)]
struct Propagator {
    dt: f64,
    rho: Cayley,
    z: Cayley,
}

/// Precomputed operators for one configuration.
#[derive(Debug, Clone)]
pub struct GpeSimulator {
    pub config: GpeConfig,
    pub grid: Arc<CylGrid>,
    pub units: OscillatorUnits,
    potential: Vec<f64>,
    g11: f64,
    g12: f64,
    g22: f64,
    real: Propagator,
}

fn propagator(grid: &CylGrid, s: Complex64, dt: f64) -> Propagator {
    Propagator { dt, rho: Cayley::new(grid.radial_kinetic(), s), z: Cayley::new(grid.axial_kinetic(), s) }
}

impl GpeSimulator {
    pub fn new(config: GpeConfig) -> Result<Self> {
        config.validate()?;
        let units = OscillatorUnits::new(&config.species, &config.trap);
        let sp = &config.species;
        let lr = config.trap.omega_x / units.omega;
        let lz = config.trap.omega_z / units.omega;
        let (tf_r, tf_z) = if sp.a11 > 0.0 {
            let mu = tf_chemical_potential(sp, &config.trap, config.n)? / units.energy;
            ((2.0 * mu).sqrt() / lr, (2.0 * mu).sqrt() / lz)
        } else {
            (0.0, 0.0)
        };
        let rho_max = config.grid.extent * tf_r.max(1.0 / lr.sqrt());
        let z_max = config.grid.extent * tf_z.max(1.0 / lz.sqrt());
        let grid = Arc::new(CylGrid::new(config.grid.n_rho, config.grid.n_z, rho_max, z_max, units.length)?);
        let mut potential = Vec::with_capacity(grid.len());
        for &r in &grid.rho {
            for &z in &grid.z {
                potential.push(0.5 * (lr * lr * r * r + lz * lz * z * z));
            }
        }
        let g = |a: f64| 4.0 * crate::constants::PI * a / units.length;
        let dt = config.dt_real / units.time;
        let real = propagator(&grid, Complex64::new(0.0, 0.5 * dt), dt);
        Ok(Self {
            g11: g(sp.a11),
            g12: g(sp.a12 * config.a12_scale),
            g22: g(sp.a22),
            config,
            grid,
            units,
            potential,
            real,
        })
    }

    /// Largest grid spacing over half the healing length at the TF peak
    /// density; values above one mean the healing length is under-resolved.
    pub fn healing_resolution(&self) -> Result<f64> {
        let c = &self.config;
        let n0 = tf_peak_density(&c.species, &c.trap, c.n)?;
        let xi = 1.0 / (8.0 * crate::constants::PI * n0 * c.species.a11).sqrt() / self.units.length;
        Ok(self.grid.d_rho.max(self.grid.d_z) / (0.5 * xi))
    }

    fn kinetic(&self, p: &Propagator, psi: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let nz = self.grid.n_z;
        for row in psi.chunks_exact_mut(nz) {
            p.z.apply_line(row);
        }
        p.rho.apply_strided(psi, nz, scratch);
    }

    /// (Kψ) with the same discrete operator used by the propagator.
    fn apply_kinetic(&self, psi: &[Complex64]) -> Vec<Complex64> {
        let g = &self.grid;
        let (kr, kz) = (g.radial_kinetic(), g.axial_kinetic());
        let (nr, nz) = (g.n_rho, g.n_z);
        let zero = Complex64::new(0.0, 0.0);
        let mut out = Vec::with_capacity(psi.len());
        for i in 0..nr {
            for j in 0..nz {
                let k = i * nz + j;
                let up_r = if i + 1 < nr { psi[k + nz] } else { zero };
                let dn_r = if i > 0 { psi[k - nz] } else { zero };
                let up_z = if j + 1 < nz { psi[k + 1] } else { zero };
                let dn_z = if j > 0 { psi[k - 1] } else { zero };
                out.push(kr.apply_at(i, dn_r, psi[k], up_r) + kz.apply_at(j, dn_z, psi[k], up_z));
            }
        }
        out
    }

    pub fn energy(&self, f: &SpinorField) -> EnergyParts {
        let w = &self.grid.weights;
        let k1 = self.apply_kinetic(&f.psi1);
        let k2 = self.apply_kinetic(&f.psi2);
        let (mut ek, mut ep, mut ei) = (0.0, 0.0, 0.0);
        for k in 0..w.len() {
            let (n1, n2) = (f.psi1[k].norm_sqr(), f.psi2[k].norm_sqr());
            ek += w[k] * ((f.psi1[k].conj() * k1[k]).re + (f.psi2[k].conj() * k2[k]).re);
            ep += w[k] * self.potential[k] * (n1 + n2);
            ei += w[k] * (0.5 * self.g11 * n1 * n1 + 0.5 * self.g22 * n2 * n2 + self.g12 * n1 * n2);
        }
        EnergyParts { kinetic: ek, potential: ep, interaction: ei }
    }

    pub fn chemical_potential(&self, f: &SpinorField) -> f64 {
        let e = self.energy(f);
        (e.kinetic + e.potential + 2.0 * e.interaction) / f.norm()
    }

    fn initial_guess(&self) -> SpinorField {
        let c = &self.config;
        let mut f = SpinorField::zeros(self.grid.clone());
        let mu = if self.g11 > 0.0 {
            tf_chemical_potential(&c.species, &c.trap, c.n).map(|m| m / self.units.energy).unwrap_or(0.0)
        } else {
            0.0
        };
        for (k, v) in self.potential.iter().enumerate() {
            let tf = if self.g11 > 0.0 { ((mu - v).max(0.0) / self.g11).sqrt() } else { 0.0 };
            f.psi1[k] = Complex64::new(tf + (-v).exp(), 0.0);
        }
        renormalize(&mut f.psi1, &self.grid, c.n);
        f
    }

    /// Imaginary-time ground state of component 1 with component 2 empty.
    pub fn ground_state(&self) -> Result<GroundState> {
        let c = &self.config;
        let mut f = self.initial_guess();
        let mut scratch = Vec::new();
        let mut trace = Vec::new();
        let mut stage_starts = Vec::new();
        let final_dt = c.dt_imag / self.units.time;
        // Keep the nonlinear phase per step small so the normalised flow
        // decreases the energy monotonically.
        let mu = self.chemical_potential(&f).max(1.0);
        let cap = (0.05 / mu).max(final_dt);
        let mut e_prev = self.energy(&f).total();
        let mut steps = 0usize;
        let mut change = f64::INFINITY;
        for (stage, mult) in [32.0, 8.0, 2.0, 1.0].into_iter().enumerate() {
            let last = stage == 3;
            let dt = (final_dt * mult).min(cap);
            let p = propagator(&self.grid, Complex64::new(0.5 * dt, 0.0), dt);
            let tol = if last { c.convergence_tol } else { c.convergence_tol.max(1e-10) };
            stage_starts.push(trace.len());
            loop {
                if steps >= c.max_imag_steps {
                    return Err(Error::NotConverged { what: "ground state", iterations: steps, residual: change });
                }
                // Renormalising before each nonlinear half-step keeps the
                // fixed point free of an O(dτ) bias.
                self.imag_phase(&mut f.psi1, 0.5 * dt);
                self.kinetic(&p, &mut f.psi1, &mut scratch);
                renormalize(&mut f.psi1, &self.grid, c.n);
                self.imag_phase(&mut f.psi1, 0.5 * dt);
                renormalize(&mut f.psi1, &self.grid, c.n);
                steps += 1;
                let e = self.energy(&f).total();
                if !e.is_finite() {
                    return Err(Error::NonFinite { time: steps as f64 * dt, step: steps });
                }
                change = ((e - e_prev) / e).abs();
                e_prev = e;
                trace.push(e);
                if change < tol {
                    break;
                }
            }
        }
        let energy = self.energy(&f);
        let chemical_potential = self.chemical_potential(&f);
        Ok(GroundState { field: f, energy, chemical_potential, steps, final_change: change, energy_trace: trace, stage_starts })
    }

    fn imag_phase(&self, psi: &mut [Complex64], dt: f64) {
        for (x, v) in psi.iter_mut().zip(&self.potential) {
            *x *= (-dt * (v + self.g11 * x.norm_sqr())).exp();
        }
    }

    fn real_phase(&self, f: &mut SpinorField, dt: f64) {
        for k in 0..self.potential.len() {
            let (n1, n2) = (f.psi1[k].norm_sqr(), f.psi2[k].norm_sqr());
            let v = self.potential[k];
            let t1 = -dt * (v + self.g11 * n1 + self.g12 * n2);
            let t2 = -dt * (v + self.g22 * n2 + self.g12 * n1);
            f.psi1[k] *= Complex64::from_polar(1.0, t1);
            f.psi2[k] *= Complex64::from_polar(1.0, t2);
        }
    }

    /// Time step in oscillator units.
    pub fn dt(&self) -> f64 {
        self.real.dt
    }

    /// Number of steps used for `duration` seconds.
    pub fn steps_for(&self, duration: f64) -> usize {
        let x = duration / self.config.dt_real;
        (x - 1e-9).ceil().max(0.0) as usize
    }

    /// Advance by `duration` seconds.
    pub fn evolve(&self, field: &mut SpinorField, duration: f64) -> Result<usize> {
        crate::error::non_negative("duration", duration)?;
        let steps = self.steps_for(duration);
        if steps == 0 {
            return Ok(0);
        }
        let dt = duration / self.units.time / steps as f64;
        if (dt - self.real.dt).abs() <= 1e-12 * dt {
            self.evolve_steps(field, steps, &self.real)?;
        } else {
            let p = propagator(&self.grid, Complex64::new(0.0, 0.5 * dt), dt);
            self.evolve_steps(field, steps, &p)?;
        }
        Ok(steps)
    }

    /// Advance by `steps` steps of the configured size.
    pub fn evolve_fixed(&self, field: &mut SpinorField, steps: usize) -> Result<()> {
        self.evolve_steps(field, steps, &self.real)
    }

    fn evolve_steps(&self, f: &mut SpinorField, steps: usize, p: &Propagator) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        let mut scratch = Vec::new();
        let second = f.psi2.iter().any(|x| *x != Complex64::new(0.0, 0.0));
        let first = f.psi1.iter().any(|x| *x != Complex64::new(0.0, 0.0));
        self.real_phase(f, 0.5 * p.dt);
        for s in 0..steps {
            if first {
                self.kinetic(p, &mut f.psi1, &mut scratch);
            }
            if second {
                self.kinetic(p, &mut f.psi2, &mut scratch);
            }
            let last = s + 1 == steps;
            self.real_phase(f, if last { 0.5 * p.dt } else { p.dt });
            f.t += p.dt;
            if (s % 256 == 255 || last) && !f.norm().is_finite() {
                return Err(Error::NonFinite { time: f.t * self.units.time, step: s + 1 });
            }
        }
        Ok(())
    }

    pub fn snapshot(&self, f: &SpinorField) -> Snapshot {
        let l = self.units.length;
        let l3 = l * l * l;
        Snapshot {
            t: f.t * self.units.time,
            rho: self.grid.rho.iter().map(|r| r * l).collect(),
            z: self.grid.z.iter().map(|z| z * l).collect(),
            density1: f.psi1.iter().map(|x| x.norm_sqr() / l3).collect(),
            density2: f.psi2.iter().map(|x| x.norm_sqr() / l3).collect(),
            relative_phase: f.relative_phase(),
        }
    }

    /// π/2, evolve T (π at T/2 with echo), then scan the final pulse phase.
    pub fn ramsey(&self, ground: &SpinorField, opts: &RamseyOptions) -> Result<RamseyResult> {
        let t_total = opts.interrogation_time;
        crate::error::non_negative("interrogation_time", t_total)?;
        if opts.phase_samples < 8 {
            return Err(Error::NotEnoughData { needed: 8, got: opts.phase_samples });
        }
        let mut f = ground.clone();
        f.t = 0.0;
        apply_pi_half(&mut f, 0.0);
        // Events in time order: snapshots and the echo pulse.
        let mut events: Vec<(f64, bool)> = opts
            .snapshot_times
            .iter()
            .filter(|&&t| t >= 0.0 && t <= t_total)
            .map(|&t| (t, false))
            .collect();
        if opts.spin_echo {
            events.push((0.5 * t_total, true));
        }
        events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        let mut now = 0.0;
        let mut steps = 0;
        let mut snapshots = Vec::new();
        for (t, is_pulse) in events {
            steps += self.evolve(&mut f, t - now)?;
            now = t;
            if is_pulse {
                apply_pi(&mut f);
            } else {
                snapshots.push(self.snapshot(&f));
            }
        }
        steps += self.evolve(&mut f, t_total - now)?;
        let (fringe, fit) = fringe_scan(&f, opts.phase_samples)?;
        let visibility_fit = fit.value("visibility").unwrap_or(f64::NAN);
        Ok(RamseyResult {
            interrogation_time: t_total,
            spin_echo: opts.spin_echo,
            fringe,
            fit,
            visibility_fit,
            visibility_overlap: interference_visibility(&f)?,
            snapshots,
            steps,
            final_field: f,
        })
    }

    /// Visibility against interrogation time. Without echo a single
    /// evolution is sampled at each T; with echo every T is a separate run.
    pub fn visibility_curve(
        &self,
        ground: &SpinorField,
        times: &[f64],
        spin_echo: bool,
        phase_samples: usize,
        decoherence_tau: Option<f64>,
    ) -> Result<Vec<VisibilityPoint>> {
        if times.is_empty() {
            return Err(Error::NotEnoughData { needed: 1, got: 0 });
        }
        let envelope = |t: f64| decoherence_tau.map_or(1.0, |tau| (-t / tau).exp());
        let mut out = Vec::with_capacity(times.len());
        if spin_echo {
            for &t in times {
                let mut o = RamseyOptions::new(t, true);
                o.phase_samples = phase_samples;
                let r = self.ramsey(ground, &o)?;
                out.push(VisibilityPoint {
                    t,
                    visibility_fit: r.visibility_fit,
                    visibility_overlap: r.visibility_overlap,
                    enveloped: r.visibility_fit * envelope(t),
                });
            }
            return Ok(out);
        }
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
        let mut f = ground.clone();
        f.t = 0.0;
        apply_pi_half(&mut f, 0.0);
        let mut now = 0.0;
        let mut results = alloc::vec![None; times.len()];
        for idx in order {
            let t = times[idx];
            crate::error::non_negative("interrogation_time", t)?;
            self.evolve(&mut f, t - now)?;
            now = t;
            let (_, fit) = fringe_scan(&f, phase_samples)?;
            let v = fit.value("visibility").unwrap_or(f64::NAN);
            results[idx] = Some(VisibilityPoint {
                t,
                visibility_fit: v,
                visibility_overlap: interference_visibility(&f)?,
                enveloped: v * envelope(t),
            });
        }
        out.extend(results.into_iter().flatten());
        Ok(out)
    }
}

fn renormalize(psi: &mut [Complex64], grid: &CylGrid, n: f64) {
    let norm = grid.integrate(|k| psi[k].norm_sqr());
    if norm > 0.0 {
        let s = (n / norm).sqrt();
        psi.iter_mut().for_each(|x| *x *= s);
    }
}

/// Fringe p(φ) = N₂/N on a uniform φ grid over [0, 2π) and its sinusoid fit.
pub fn fringe_scan(field: &SpinorField, samples: usize) -> Result<(FringeDataset, FitResult)> {
    if samples < 8 {
        return Err(Error::NotEnoughData { needed: 8, got: samples });
    }
    let mut x = Vec::with_capacity(samples);
    let mut y = Vec::with_capacity(samples);
    for i in 0..samples {
        let phi = TAU * i as f64 / samples as f64;
        x.push(phi);
        y.push(output_fraction(field, phi)?);
    }
    let data = FringeDataset::new(x, y)?;
    let fit = fit_sinusoid_fixed_freq(&data)?;
    Ok((data, fit))
}

/// Ground state followed by one Ramsey sequence.
pub fn simulate_ramsey(config: &GpeConfig, opts: &RamseyOptions) -> Result<RamseyResult> {
    let sim = GpeSimulator::new(*config)?;
    let g = sim.ground_state()?;
    sim.ramsey(&g.field, opts)
}

/// Ground state followed by a visibility curve.
pub fn visibility_curve(
    config: &GpeConfig,
    times: &[f64],
    spin_echo: bool,
    decoherence_tau: Option<f64>,
) -> Result<Vec<VisibilityPoint>> {
    let sim = GpeSimulator::new(*config)?;
    let g = sim.ground_state()?;
    sim.visibility_curve(&g.field, times, spin_echo, 16, decoherence_tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: f64) -> GpeConfig {
        let mut c = GpeConfig::experiment();
        c.n = n;
        c.grid = GridSpec { n_rho: 32, n_z: 64, extent: 3.0 };
        c.dt_real = 10e-6;
        c.dt_imag = 10e-6;
        c.convergence_tol = 1e-11;
        c
    }

    #[test]
    fn noninteracting_gaussian() {
        let mut c = small(1e3);
        c.species = c.species.with_scattering_bohr(0.0, 0.0, 0.0);
        c.grid = GridSpec { n_rho: 160, n_z: 320, extent: 4.0 };
        let sim = GpeSimulator::new(c).unwrap();
        let g = sim.ground_state().unwrap();
        let (lr, lz) = (c.trap.omega_x / sim.units.omega, c.trap.omega_z / sim.units.omega);
        let grid = &sim.grid;
        let mut peak: f64 = 0.0;
        let mut err: f64 = 0.0;
        let norm = c.n * (lr * lr * lz).sqrt() / core::f64::consts::PI.powf(1.5);
        for i in 0..grid.n_rho {
            for j in 0..grid.n_z {
                let exact = norm * (-(lr * grid.rho[i].powi(2) + lz * grid.z[j].powi(2))).exp();
                let got = g.field.psi1[grid.index(i, j)].norm_sqr();
                peak = peak.max(exact);
                err = err.max((got - exact).abs());
            }
        }
        assert!(err / peak < 1e-4, "{}", err / peak);
        assert!((g.chemical_potential - 0.5 * (2.0 * lr + lz)).abs() < 1e-3);
    }

    #[test]
    fn imaginary_time_energy_decreases() {
        let sim = GpeSimulator::new(small(2e4)).unwrap();
        let g = sim.ground_state().unwrap();
        for (a, w) in g.energy_trace.windows(2).enumerate() {
            if g.stage_starts.contains(&(a + 1)) {
                continue;
            }
            assert!(w[1] <= w[0] * (1.0 + 1e-13), "step {a}: {} -> {}", w[0], w[1]);
        }
        assert!(g.energy.virial_residual().abs() < 0.01, "{}", g.energy.virial_residual());
    }

    #[test]
    fn real_time_conserves_norm() {
        let sim = GpeSimulator::new(small(2e4)).unwrap();
        let g = sim.ground_state().unwrap();
        let mut f = g.field.clone();
        apply_pi_half(&mut f, 0.0);
        let n0 = f.norm();
        sim.evolve_fixed(&mut f, 1000).unwrap();
        assert!((f.norm() / n0 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn zero_time_ramsey_has_full_visibility() {
        let sim = GpeSimulator::new(small(2e4)).unwrap();
        let g = sim.ground_state().unwrap();
        let r = sim.ramsey(&g.field, &RamseyOptions::new(0.0, false)).unwrap();
        assert!((r.visibility_fit - 1.0).abs() < 1e-10);
        assert!((r.visibility_overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oversized_step_rejected() {
        let mut c = small(1e6);
        c.dt_real = 1e-3;
        assert!(matches!(GpeSimulator::new(c), Err(Error::StepTooLarge { .. })));
    }
}
