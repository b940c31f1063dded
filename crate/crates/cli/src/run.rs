//! One run: dispatch on the experiment kind, write the artifacts, and
//! always leave a manifest behind.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hylab::hybrid::{
    init_hybrid, run_hybrid, AttachedBasis, ForceLaw, HybridScenario, HybridState, TrajectoryRecord,
    GRID_STEPS_PER_PERIOD, KEPLER_STEPS,
};
use hylab::oracle::{
    compare_with_hybrid, hybrid_counterpart, proton_purity, run_oracle, ComparableRun, OracleRecord, OracleRun,
    BOUNDARY_TOLERANCE, MOMENTUM_TOLERANCE,
};
use hylab::reference::{
    build_packet, default_plane, electron_kernel_width, kepler_period, particle_centers, particle_density,
    proton_kernel_width, sample_density_plane, spreading_time, CircularPacket, ComMode, ComState, Particle,
    PlanarDensity, PlaneGeometry,
};
use hylab::softcore::SoftCore;
use hylab::spectral::Grid1d;
use hylab::{AtomParams, Error, C64};
use thiserror::Error as ThisError;

use crate::config::{ExperimentKind, HybridModel, ScenarioConfig};
use crate::csv::Table;
use crate::manifest::{Bound, RunManifest};
use crate::plot::{heatmap, line_plot, Heatmap, PlotError, PlotStyle, Series};
use crate::snapshot::{Axis, Snapshot, SnapshotMeta};

/// Base sampling of analytic and hybrid series, per period; `stride` thins it.
pub const SAMPLES_PER_PERIOD: usize = 64;
/// Norm tolerance per 10⁴ propagator steps.
pub const NORM_TOLERANCE: f64 = 1e-10;
pub const HYBRID_ENERGY_TOLERANCE: f64 = 1e-8;
pub const ORACLE_MOMENTUM_TOLERANCE: f64 = 1e-8;
pub const CENTER_OF_MASS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, ThisError)]
pub enum RunError {
    #[error(transparent)]
    Module(#[from] Error),

    #[error("writing {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Plot(#[from] PlotError),
}

/// Artifact writer bound to one run directory.
struct Ctx<'a> {
    config: &'a ScenarioConfig,
    dir: &'a Path,
    manifest: &'a mut RunManifest,
}

impl Ctx<'_> {
    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.artifacts.push(name.into());
        self.dir.join(name)
    }

    fn csv(&mut self, name: &str, table: &Table) -> Result<(), RunError> {
        let path = self.path(name);
        table.write(&path).map_err(|source| RunError::Io { path, source })
    }

    fn snapshot(&mut self, name: &str, snap: Snapshot) -> Result<(), RunError> {
        if !self.config.snapshots {
            return Ok(());
        }
        let path = self.path(name);
        snap.write(&path).map_err(|source| RunError::Io { path, source })
    }

    fn lines(&mut self, name: &str, style: PlotStyle, series: &[Series]) -> Result<(), RunError> {
        if !self.config.plots {
            return Ok(());
        }
        let path = self.path(name);
        Ok(line_plot(&path, &style, series)?)
    }

    fn heat(&mut self, name: &str, style: PlotStyle, map: &Heatmap) -> Result<(), RunError> {
        if !self.config.plots {
            return Ok(());
        }
        let path = self.path(name);
        Ok(heatmap(&path, &style, map)?)
    }

    fn derive(&mut self, name: &str, value: f64, unit: &str) {
        self.manifest.derive(name, value, unit);
    }

    fn check(&mut self, name: &str, measured: f64, bound: Bound, limit: f64) {
        self.manifest.check(name, measured, bound, limit);
    }
}

/// Execute a validated config; the manifest is written even when the run
/// aborts. Only failing to create the directory or the manifest is an `Err`.
pub fn run(config: &ScenarioConfig) -> std::io::Result<RunManifest> {
    let dir = config.output_dir();
    std::fs::create_dir_all(&dir)?;
    let mut manifest = RunManifest::start(config);
    manifest.decisions = decisions(config);
    let result = {
        let mut ctx = Ctx { config, dir: &dir, manifest: &mut manifest };
        match config.kind {
            ExperimentKind::QuantumReference => quantum_reference(&mut ctx),
            ExperimentKind::Hybrid => hybrid(&mut ctx),
            ExperimentKind::Oracle => oracle(&mut ctx, "trajectory").map(|_| ()),
            ExperimentKind::Compare => compare(&mut ctx),
        }
    };
    match result {
        Ok(()) => manifest.complete = true,
        Err(e) => manifest.error = Some(e.to_string()),
    }
    manifest.write(&dir)?;
    Ok(manifest)
}

fn decisions(config: &ScenarioConfig) -> Vec<String> {
    let three_d = "coulomb-singularity: the 3-d 1/r potential is never sampled at a point. Level energies and \
                   dipole elements are closed forms, the adiabatic force differentiates the attached-basis energy \
                   under a rigid shift, and point-field quadrature refuses proton offsets inside the electron cloud.";
    let soft = |s: f64| {
        format!("coulomb-singularity: 1-d interactions use -1/sqrt(x^2 + s^2) with s = {s}, finite at coincidence.")
    };
    match config.kind {
        ExperimentKind::QuantumReference => vec![
            three_d.into(),
            "relative motion carries the reduced mass; densities are sampled on the orbital plane z = 0.".into(),
        ],
        ExperimentKind::Hybrid => match config.hybrid.model {
            HybridModel::Circular => vec![
                three_d.into(),
                "the hybrid electron carries the electron mass, so its levels differ from the relative-motion levels by mu/m_e.".into(),
            ],
            HybridModel::SoftCore => vec![soft(config.hybrid.softening)],
        },
        ExperimentKind::Oracle => vec![soft(config.oracle.softening)],
        ExperimentKind::Compare => vec![
            soft(config.oracle.softening),
            "hybrid counterpart: electron-mass soft-core levels with the oracle's relative coefficients; the proton \
             starts at <x_p>(0) with p_p = <p_p>(0)."
                .into(),
            "discrepancy ratio: oracle proton swing over hybrid proton swing (half peak-to-peak after removing the \
             linear drift); infinite when the hybrid proton does not oscillate."
                .into(),
        ],
    }
}

fn horizon(config: &ScenarioConfig) -> f64 {
    config.horizon.expect("resolved config has a horizon")
}

fn plane_snapshot(d: &PlanarDensity, quantity: &str, t: f64) -> Snapshot {
    let g = d.geometry;
    let meta = SnapshotMeta {
        quantity: quantity.into(),
        unit: "bohr^-2".into(),
        t,
        axes: vec![
            Axis { name: "y".into(), origin: g.y0, spacing: g.dy, unit: "bohr".into() },
            Axis { name: "x".into(), origin: g.x0, spacing: g.dx, unit: "bohr".into() },
        ],
    };
    Snapshot::real(vec![g.ny, g.nx], meta, d.values.clone())
}

fn plane_heatmap(d: &PlanarDensity) -> Heatmap<'_> {
    let g = d.geometry;
    Heatmap { nx: g.nx, ny: g.ny, x0: g.x0, y0: g.y0, dx: g.dx, dy: g.dy, values: &d.values }
}

fn quantum_reference(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.config;
    let params = cfg.params()?;
    let spec = cfg.packet.spec()?;
    let packet = build_packet(&spec, &params)?;
    let tk = kepler_period(&spec, &packet.coulomb);
    let t_rev = spec.n_bar / 3.0 * tk;
    let t_spread = match spreading_time(&packet, tk, t_rev) {
        Ok(t) => t,
        Err(Error::NoSpreading { .. }) => f64::NAN,
        Err(e) => return Err(e.into()),
    };
    let ew = electron_kernel_width(spec.sigma_com, &params);
    let pw = proton_kernel_width(spec.sigma_com, &params);
    let r0 = packet.relative_center(0.0).norm();
    ctx.derive("t_kepler", tk, "au_time");
    ctx.derive("t_rev", t_rev, "au_time");
    ctx.derive("t_full_revival", 2.0 * t_rev, "au_time");
    ctx.derive("t_rev_over_t_kepler", t_rev / tk, "1");
    ctx.derive("t_spread", t_spread, "au_time");
    ctx.derive("t_spread_over_t_kepler", t_spread / tk, "1");
    ctx.derive("n_lo", f64::from(packet.n_lo()), "1");
    ctx.derive("n_hi", f64::from(packet.n_hi()), "1");
    ctx.derive("initial_radius", r0, "bohr");
    ctx.derive("mean_energy", packet.mean_energy(), "hartree");
    ctx.derive("electron_kernel_width", ew, "bohr");
    ctx.derive("proton_kernel_width", pw, "bohr");
    ctx.derive("kernel_ratio", pw / ew, "1");
    ctx.derive("total_over_electron_mass", params.total_mass() / params.electron_mass(), "1");

    let t_end = horizon(cfg) * tk;
    let n = ((t_end / tk) * SAMPLES_PER_PERIOD as f64 / cfg.stride as f64).ceil().max(1.0) as usize;
    let mut table = Table::new(
        "quantum-reference",
        &[
            ("t", "au_time"),
            ("t_over_kepler", "1"),
            ("rel_x", "bohr"),
            ("rel_y", "bohr"),
            ("rel_p_x", "au_momentum"),
            ("rel_p_y", "au_momentum"),
            ("electron_x", "bohr"),
            ("electron_y", "bohr"),
            ("proton_x", "bohr"),
            ("proton_y", "bohr"),
            ("localization", "1"),
            ("autocorrelation", "1"),
            ("norm", "1"),
        ],
    );
    let (mut norm_dev, mut center_dev, mut auto_max) = (0.0f64, 0.0f64, 0.0f64);
    let m = params.total_mass();
    for k in 0..=n {
        let t = t_end * k as f64 / n as f64;
        let r = packet.relative_center(t);
        let p = packet.relative_momentum(t);
        let (re, rp) = particle_centers(&r, &params);
        let (loc, auto, norm) = (packet.localization(t), packet.autocorrelation(t), packet.norm_sq(t));
        norm_dev = norm_dev.max((norm - 1.0).abs());
        auto_max = auto_max.max(auto);
        if r.norm() > 0.0 {
            // ⟨r_e⟩ - ⟨r_p⟩ = ⟨r⟩ and the mass-weighted sum vanishes
            let d1 = (re - rp - r).norm() / r.norm();
            let d2 = (re * params.electron_mass() + rp * params.proton_mass()).norm() / (m * r.norm());
            center_dev = center_dev.max(d1).max(d2);
        }
        table.push(vec![t, t / tk, r.x, r.y, p.x, p.y, re.x, re.y, rp.x, rp.y, loc, auto, norm]);
    }
    ctx.check("norm deviation", norm_dev, Bound::Below, 1e-12);
    ctx.check("center identities (relative)", center_dev, Bound::Below, 1e-12);
    ctx.check(
        "kernel ratio vs mass ratio (relative)",
        (pw / ew / params.mass_ratio() - 1.0).abs(),
        Bound::Below,
        1e-12,
    );
    ctx.check("autocorrelation excess over 1", auto_max - 1.0, Bound::Below, 1e-12);
    if t_end >= 1.05 * t_rev {
        let loc = table.column("localization").unwrap();
        let t = table.column("t").unwrap();
        let near = |lo: f64, hi: f64| {
            t.iter().zip(&loc).filter(|(t, _)| **t >= lo && **t <= hi).map(|(_, l)| *l).fold(f64::NAN, f64::max)
        };
        let peak = near(0.95 * t_rev, 1.05 * t_rev);
        let dip = t
            .iter()
            .zip(&loc)
            .filter(|(s, _)| **s > tk && **s < 0.95 * t_rev)
            .map(|(_, l)| *l)
            .fold(f64::NAN, f64::min);
        ctx.derive("revival_peak_localization", peak, "1");
        ctx.derive("minimum_localization_before_revival", dip, "1");
        ctx.check("localization recovers near t_rev", peak, Bound::AtLeast, 0.5);
        ctx.check("localization dips before t_rev", dip, Bound::Below, 0.1);
    }
    ctx.csv("trajectory.csv", &table)?;

    let t_axis = table.column("t_over_kepler").unwrap();
    let style = |title: &str, y: &str| PlotStyle::new(title, "t / t_kepler", y);
    ctx.lines(
        "localization.svg",
        style("packet localization", "|<r>(t)| / |<r>(0)|"),
        &[Series::new("", &t_axis, &table.column("localization").unwrap())],
    )?;
    ctx.lines(
        "autocorrelation.svg",
        style("autocorrelation", "|<psi(0)|psi(t)>|^2"),
        &[Series::new("", &t_axis, &table.column("autocorrelation").unwrap())],
    )?;
    ctx.lines(
        "proton_center.svg",
        style("proton center", "<r_p> [bohr]"),
        &[
            Series::new("x", &t_axis, &table.column("proton_x").unwrap()),
            Series::new("y", &t_axis, &table.column("proton_y").unwrap()),
        ],
    )?;
    if cfg.snapshots || cfg.plots {
        densities(ctx, &packet, &params)?;
    }
    Ok(())
}

/// Relative, electron and proton plane densities at t = 0.
fn densities(ctx: &mut Ctx, packet: &CircularPacket, params: &AtomParams) -> Result<(), RunError> {
    let spec = &packet.spec;
    let points = ctx.config.packet.plane_points;
    let com = ComState::new(spec.sigma_com, params, ComMode::Frozen)?;
    let rel = sample_density_plane(packet, 0.0, &default_plane(packet, points)?)?;
    let electron = particle_density(&rel, &com, Particle::Electron, params, 0.0)?;
    // the proton kernel is ~M/m_e times wider, so it needs a wider relative plane
    let wide = PlaneGeometry::square(
        points,
        rel.geometry.x(rel.geometry.nx - 1).max(4.0 * proton_kernel_width(spec.sigma_com, params)),
    )?;
    let proton = particle_density(&sample_density_plane(packet, 0.0, &wide)?, &com, Particle::Proton, params, 0.0)?;

    let r0 = packet.relative_center(0.0);
    let (re, rp) = particle_centers(&r0, params);
    let ec = electron.azimuthal_contrast((0.0, 0.0), re.norm(), 256);
    let pc = proton.azimuthal_contrast((0.0, 0.0), rp.norm(), 256);
    ctx.derive("electron_azimuthal_contrast", ec, "1");
    ctx.derive("proton_azimuthal_contrast", pc, "1");

    ctx.snapshot("relative_density_t0.bin", plane_snapshot(&rel, "relative density, z = 0", 0.0))?;
    ctx.snapshot("electron_density_t0.bin", plane_snapshot(&electron, "electron density, z = 0", 0.0))?;
    ctx.snapshot("proton_density_t0.bin", plane_snapshot(&proton, "proton density, z = 0", 0.0))?;
    let style = |title: &str| PlotStyle::new(title, "x [bohr]", "y [bohr]");
    ctx.heat("relative_density_t0.svg", style("relative density (raw), t = 0"), &plane_heatmap(&rel))?;
    ctx.heat("electron_density_t0.svg", style("electron density (coarse-grained), t = 0"), &plane_heatmap(&electron))?;
    ctx.heat("proton_density_t0.svg", style("proton density (coarse-grained), t = 0"), &plane_heatmap(&proton))?;
    Ok(())
}

fn hybrid_initial(cfg: &ScenarioConfig, params: &AtomParams) -> Result<(HybridState, usize), Error> {
    let h = &cfg.hybrid;
    match h.model {
        HybridModel::Circular => {
            let st = init_hybrid(&cfg.packet.spec()?, h.proton_position(), h.proton_momentum(), params)?;
            Ok((st, KEPLER_STEPS))
        }
        HybridModel::SoftCore => {
            let grid = Grid1d::centered(h.grid_points, h.half_width)?;
            let basis =
                AttachedBasis::relax(grid, SoftCore::new(h.softening)?, params.electron_mass(), h.coeffs.len().max(2))?;
            let basis = Arc::new(basis);
            let mut c = h.coeffs.clone();
            c.resize(basis.count(), C64::new(0.0, 0.0));
            let st = HybridState::soft_core(basis, c, h.proton_position[0], h.proton_momentum[0])?;
            match cfg.law {
                ForceLaw::AdiabaticGradient => Ok((st, KEPLER_STEPS)),
                ForceLaw::Ehrenfest => Ok((st.to_grid()?, GRID_STEPS_PER_PERIOD)),
            }
        }
    }
}

fn trajectory_table(rec: &TrajectoryRecord) -> Table {
    let mut table = Table::new("hybrid-trajectory", &[("t", "au_time")]);
    for (q, unit) in [
        ("r_p", "bohr"),
        ("p_p", "au_momentum"),
        ("electron", "bohr"),
        ("p_e", "au_momentum"),
        ("total_p", "au_momentum"),
    ] {
        for axis in ["x", "y", "z"] {
            table.add_column(format!("{q}_{axis}"), unit);
        }
    }
    table.add_column("energy", "hartree");
    table.add_column("norm", "1");
    let levels = rec.populations.first().map_or(0, Vec::len);
    for k in 0..levels {
        table.add_column(format!("population_{k}"), "1");
    }
    for k in 0..rec.len() {
        let mut row = vec![rec.t[k]];
        for v in [&rec.r_p[k], &rec.p_p[k], &rec.electron_center[k], &rec.electron_momentum[k], &rec.total_momentum[k]]
        {
            row.extend([v.x, v.y, v.z]);
        }
        row.push(rec.energy[k]);
        row.push(rec.norm[k]);
        row.extend(rec.populations[k].iter().take(levels));
        table.push(row);
    }
    table
}

fn norm_limit(steps: usize) -> f64 {
    NORM_TOLERANCE * (steps as f64 / 1e4).max(1.0)
}

fn hybrid(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.config;
    let params = cfg.params()?;
    let (initial, default_steps) = hybrid_initial(cfg, &params)?;
    let per_period = cfg.hybrid.steps_per_period.unwrap_or(default_steps);
    let period = initial.period;
    let stride = (per_period / SAMPLES_PER_PERIOD).max(1) * cfg.stride;
    let scenario = HybridScenario::periods(initial, params, horizon(cfg), per_period)?.with_stride(stride);
    let rec = run_hybrid(&scenario, cfg.law)?;

    ctx.derive("period", period, "au_time");
    ctx.derive("dt", scenario.dt, "au_time");
    ctx.derive("steps", scenario.steps as f64, "1");
    ctx.derive("proton_displacement", rec.proton_displacement(), "bohr");
    ctx.derive("momentum_excursion", rec.momentum_excursion(), "au_momentum");
    ctx.derive("relative_energy_drift", rec.relative_energy_drift(), "1");
    ctx.derive("norm_drift", rec.norm_drift(), "1");
    if cfg.hybrid.model == HybridModel::Circular {
        let scale = params.reduced_mass() / cfg.packet.n_bar;
        ctx.derive("momentum_scale_mu_over_n_bar", scale, "au_momentum");
        ctx.derive("momentum_excursion_over_scale", rec.momentum_excursion() / scale, "1");
        ctx.derive("level_mass_offset_mu_over_m_e", params.reduced_mass() / params.electron_mass(), "1");
    }
    ctx.check("norm drift", rec.norm_drift(), Bound::Below, norm_limit(scenario.steps));
    ctx.check("relative energy drift", rec.relative_energy_drift(), Bound::Below, HYBRID_ENERGY_TOLERANCE);
    match cfg.law {
        ForceLaw::AdiabaticGradient => {
            let p0 = rec.p_p[0];
            let dp = rec.p_p.iter().map(|p| (p - p0).norm()).fold(0.0, f64::max);
            let r0 = rec.r_p[0];
            let flight = rec
                .t
                .iter()
                .zip(&rec.r_p)
                .map(|(t, r)| {
                    let want = r0 + p0 * ((t - rec.t[0]) / params.proton_mass());
                    (r - want).norm() / want.norm().max(1.0)
                })
                .fold(0.0, f64::max);
            ctx.derive("population_drift", rec.population_drift(), "1");
            ctx.check("adiabatic population drift", rec.population_drift(), Bound::Below, 1e-10);
            ctx.check("proton momentum change", dp, Bound::Below, 1e-12);
            ctx.check("proton free flight (relative)", flight, Bound::Below, 1e-12);
        }
        ForceLaw::Ehrenfest => {
            ctx.check("total momentum drift", rec.momentum_excursion(), Bound::Below, MOMENTUM_TOLERANCE);
        }
    }
    let table = trajectory_table(&rec);
    ctx.csv("trajectory.csv", &table)?;
    hybrid_plots(ctx, &rec, period, "")?;
    Ok(())
}

fn hybrid_plots(ctx: &mut Ctx, rec: &TrajectoryRecord, period: f64, prefix: &str) -> Result<(), RunError> {
    let t: Vec<f64> = rec.t.iter().map(|t| t / period).collect();
    let style = |title: &str, y: &str| PlotStyle::new(title, "t / period", y);
    let offset: Vec<f64> = rec.electron_center.iter().zip(&rec.r_p).map(|(e, p)| (e - p).norm()).collect();
    ctx.lines(
        &format!("{prefix}electron_offset.svg"),
        style("electron offset", "|<r_e> - r_p| [bohr]"),
        &[Series::new("", &t, &offset)],
    )?;
    let comp = |k: usize| rec.total_momentum.iter().map(|v| v[k]).collect::<Vec<_>>();
    let axes: Vec<Series> =
        ["P_x", "P_y", "P_z"].iter().enumerate().map(|(k, n)| Series::new(n, &t, &comp(k))).collect();
    ctx.lines(&format!("{prefix}total_momentum.svg"), style("total momentum", "P [au]"), &axes)?;
    let px: Vec<f64> = rec.r_p.iter().map(|v| v.x).collect();
    ctx.lines(
        &format!("{prefix}proton_position.svg"),
        style("proton position", "x_p [bohr]"),
        &[Series::new("", &t, &px)],
    )?;
    let levels = rec.populations.first().map_or(0, Vec::len);
    if levels > 0 {
        let shown = levels.min(8);
        let pops: Vec<Series> = (0..shown)
            .map(|k| Series::new(&format!("level {k}"), &t, &rec.populations.iter().map(|p| p[k]).collect::<Vec<_>>()))
            .collect();
        ctx.lines(&format!("{prefix}populations.svg"), style("adiabatic populations", "|a_n|^2"), &pops)?;
    }
    Ok(())
}

/// Runs the oracle block and writes its observables as `<name>.csv`.
fn oracle(ctx: &mut Ctx, name: &str) -> Result<OracleRun, RunError> {
    let cfg = ctx.config;
    let mut scenario = cfg.oracle_scenario();
    scenario.sample_every *= cfg.stride;
    let run = run_oracle(&scenario)?;
    let r = &run.record;
    let params = run.final_field.params;
    let steps = scenario.steps();
    let rel_swing = OracleRecord::swing(&r.relative_center());
    let proton_swing = OracleRecord::swing(&r.x_p);
    let expected = params.electron_mass() / params.total_mass() * rel_swing;
    ctx.derive("dt", scenario.dt, "au_time");
    ctx.derive("steps", steps as f64, "1");
    ctx.derive("relative_center_swing", rel_swing, "bohr");
    ctx.derive("proton_center_swing", proton_swing, "bohr");
    ctx.derive("proton_swing_over_expected", proton_swing / expected, "1");
    ctx.derive("initial_total_momentum", r.total_momentum[0], "au_momentum");
    ctx.derive("initial_energy", r.energy[0], "hartree");
    ctx.derive("relative_energy_drift", r.relative_energy_drift(), "1");
    ctx.derive("proton_purity_initial", proton_purity(&run.prepared.field), "1");
    ctx.derive("proton_purity_final", proton_purity(&run.final_field), "1");
    let boundary = r.boundary.iter().copied().fold(0.0, f64::max);
    ctx.check("norm drift", r.norm_drift(), Bound::Below, norm_limit(steps));
    ctx.check("total momentum drift", r.momentum_drift(), Bound::Below, ORACLE_MOMENTUM_TOLERANCE);
    ctx.check("center of mass deviation", r.center_of_mass_deviation(&params), Bound::Below, CENTER_OF_MASS_TOLERANCE);
    ctx.check("boundary density", boundary, Bound::Below, BOUNDARY_TOLERANCE);

    let mut table = Table::new(
        "oracle-trajectory",
        &[
            ("t", "au_time"),
            ("x_e", "bohr"),
            ("x_p", "bohr"),
            ("p_e", "au_momentum"),
            ("p_p", "au_momentum"),
            ("total_p", "au_momentum"),
            ("energy", "hartree"),
            ("norm", "1"),
            ("boundary", "1"),
        ],
    );
    for k in 0..r.len() {
        table.push(vec![
            r.t[k],
            r.x_e[k],
            r.x_p[k],
            r.p_e[k],
            r.p_p[k],
            r.total_momentum[k],
            r.energy[k],
            r.norm[k],
            r.boundary[k],
        ]);
    }
    ctx.csv(&format!("{name}.csv"), &table)?;

    let s = &run.final_field.spectral;
    let (gx, gy) = (s.gx, s.gy);
    let t_end = run.final_field.t;
    if cfg.snapshots {
        let axis = |n: &str, g: &Grid1d| Axis { name: n.into(), origin: g.x(0), spacing: g.dx, unit: "bohr".into() };
        let meta = SnapshotMeta {
            quantity: "two-body wave function psi(x_e, x_p)".into(),
            unit: "bohr^-1".into(),
            t: t_end,
            axes: vec![axis("x_e", &gx), axis("x_p", &gy)],
        };
        ctx.snapshot(
            &format!("{name}_psi_final.bin"),
            Snapshot::complex(vec![gx.n, gy.n], meta, run.final_field.psi.clone()),
        )?;
        let history = |which: &str, g: &Grid1d, rows: &[Vec<f64>]| {
            let meta = SnapshotMeta {
                quantity: format!("{which} marginal density per sample"),
                unit: "bohr^-1".into(),
                t: t_end,
                axes: vec![Axis { name: "sample".into(), origin: 0.0, spacing: 1.0, unit: "1".into() }, axis(which, g)],
            };
            Snapshot::real(vec![rows.len(), g.n], meta, rows.concat())
        };
        ctx.snapshot(&format!("{name}_electron_marginals.bin"), history("x_e", &gx, &r.electron_density))?;
        ctx.snapshot(&format!("{name}_proton_marginals.bin"), history("x_p", &gy, &r.proton_density))?;
    }
    let style = |title: &str, y: &str| PlotStyle::new(title, "t [au]", y);
    ctx.lines(
        &format!("{name}_centers.svg"),
        style("marginal centers", "<x> [bohr]"),
        &[Series::new("electron", &r.t, &r.x_e), Series::new("proton", &r.t, &r.x_p)],
    )?;
    ctx.lines(
        &format!("{name}_proton_center.svg"),
        style("proton center", "<x_p> [bohr]"),
        &[Series::new("", &r.t, &r.x_p)],
    )?;
    ctx.lines(
        &format!("{name}_total_momentum.svg"),
        style("total momentum", "<P> [au]"),
        &[Series::new("", &r.t, &r.total_momentum)],
    )?;
    let density: Vec<f64> = run.final_field.psi.iter().map(|v| v.norm_sqr()).collect();
    // psi is stored [i * ny + j]: x_p runs along the rows
    let map = Heatmap { nx: gy.n, ny: gx.n, x0: gy.x(0), y0: gx.x(0), dx: gy.dx, dy: gx.dx, values: &density };
    ctx.heat(
        &format!("{name}_density_final.svg"),
        PlotStyle::new("|psi(x_e, x_p)|^2 at the final time", "x_p [bohr]", "x_e [bohr]"),
        &map,
    )?;
    Ok(run)
}

fn compare(ctx: &mut Ctx) -> Result<(), RunError> {
    let cfg = ctx.config;
    let run = oracle(ctx, "oracle")?;
    let reference = ComparableRun::from_oracle(&run)?;
    let (candidate, rec) = hybrid_counterpart(&run, cfg.law)?;
    let report = compare_with_hybrid(&reference, &candidate)?;

    ctx.derive("discrepancy_ratio", report.discrepancy_ratio, "1");
    ctx.derive("reference_proton_swing", report.reference_proton_swing, "bohr");
    ctx.derive("candidate_proton_swing", report.candidate_proton_swing, "bohr");
    ctx.derive("proton_discrepancy_max", report.proton_discrepancy_max, "bohr");
    ctx.derive("proton_discrepancy_rms", report.proton_discrepancy_rms, "bohr");
    ctx.derive("reference_momentum_drift", report.reference_momentum_drift, "au_momentum");
    ctx.derive("candidate_momentum_drift", report.candidate_momentum_drift, "au_momentum");
    ctx.derive("minimum_electron_overlap", report.min_overlap(), "1");
    ctx.derive("hybrid_relative_energy_drift", rec.relative_energy_drift(), "1");
    ctx.check("hybrid norm drift", rec.norm_drift(), Bound::Below, NORM_TOLERANCE);
    if cfg.law == ForceLaw::AdiabaticGradient {
        ctx.check("hybrid adiabatic population drift", rec.population_drift(), Bound::Below, 1e-10);
    }

    let mut table = Table::new(
        "comparison",
        &[
            ("t", "au_time"),
            ("oracle_x_p", "bohr"),
            ("hybrid_x_p", "bohr"),
            ("oracle_total_p", "au_momentum"),
            ("hybrid_total_p", "au_momentum"),
            ("electron_overlap", "1"),
        ],
    );
    for k in 0..report.samples {
        table.push(vec![
            reference.t[k],
            reference.proton_center[k],
            candidate.proton_center[k],
            reference.total_momentum[k],
            candidate.total_momentum[k],
            report.electron_overlap[k],
        ]);
    }
    ctx.csv("comparison.csv", &table)?;
    ctx.csv("hybrid.csv", &trajectory_table(&rec))?;

    let path = ctx.path("comparison.json");
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    std::fs::write(&path, text).map_err(|source| RunError::Io { path, source })?;
    let path = ctx.path("verdicts.md");
    std::fs::write(&path, verdict_markdown(&report.verdicts)).map_err(|source| RunError::Io { path, source })?;
    ctx.manifest.verdicts = report.verdicts.clone();

    let t = &reference.t;
    let style = |title: &str, y: &str| PlotStyle::new(title, "t [au]", y);
    ctx.lines(
        "proton_centers.svg",
        style("proton center", "<x_p> [bohr]"),
        &[
            Series::new(&reference.label, t, &reference.proton_center),
            Series::new(&candidate.label, t, &candidate.proton_center),
        ],
    )?;
    ctx.lines(
        "total_momenta.svg",
        style("total momentum", "P [au]"),
        &[
            Series::new(&reference.label, t, &reference.total_momentum),
            Series::new(&candidate.label, t, &candidate.total_momentum),
        ],
    )?;
    ctx.lines(
        "electron_overlap.svg",
        style("electron density overlap", "overlap"),
        &[Series::new("", t, &report.electron_overlap)],
    )?;
    Ok(())
}

pub fn verdict_markdown(rows: &[hylab::oracle::VerdictRow]) -> String {
    let mut out = String::from("| aspect | full quantum | hybrid | measured |\n|---|---|---|---|\n");
    for r in rows {
        out.push_str(&format!("| {} | {} | {} | {} |\n", r.aspect, r.full_quantum, r.hybrid, r.measured));
    }
    out
}
