//! Single points and parameter sweeps of the battery ergotropy.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::config::{effective_temperature, ConfigMap, Scenario, Warning};
use crate::ergotropy::{battery_state_on_manifold, battery_ergotropy, evaluate_battery, ErgotropyResult};
use crate::error::{Error, Result};
use crate::liouvillian::Superoperator;
use crate::model::{CouplingMode, SystemConfig, MAX_QUBITS};
use crate::steadystate::{stationary_manifold, steady_state, SteadyStateOptions};

/// Version of the CSV column layout.
pub const CSV_SCHEMA_VERSION: u32 = 1;
pub const CSV_HEADER: &str = "axis,family,W,ergotropy,residual,unique,wall_ms";
pub const DEFAULT_MAX_POINTS: usize = 2001;
/// Slack when counting adjacent increases and decreases of W.
pub const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    Mu,
    DeltaMu,
    Temperature,
    CouplingJ,
    NCells,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] =
        [SweepParam::Mu, SweepParam::DeltaMu, SweepParam::Temperature, SweepParam::CouplingJ, SweepParam::NCells];

    /// Name used in config files and CSV headers.
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Mu => "mu",
            SweepParam::DeltaMu => "delta_mu",
            SweepParam::Temperature => "temperature",
            SweepParam::CouplingJ => "j",
            SweepParam::NCells => "n",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown sweep parameter `{s}`")))
    }

    /// Sets this parameter on `s`.
    pub fn apply(self, s: &mut Scenario, value: f64) -> Result<Option<Warning>> {
        match self {
            SweepParam::Mu => s.mu = value,
            SweepParam::DeltaMu => s.delta_mu = value,
            SweepParam::CouplingJ => s.coupling_j = value,
            SweepParam::Temperature => {
                let (t, w) = effective_temperature(value, s.omega)?;
                s.temperature = t;
                return Ok(w);
            }
            SweepParam::NCells => s.n_qubits = integer_cells(value)?,
        }
        Ok(None)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn integer_cells(v: f64) -> Result<usize> {
    let r = v.round();
    if (v - r).abs() > 1e-9 || r < 1.0 || r > MAX_QUBITS as f64 {
        return Err(Error::InvalidConfig(format!("cell count must be an integer in 1..={MAX_QUBITS}, got {v}")));
    }
    Ok(r as usize)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Grid {
    /// Evenly spaced values with both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.stop } else { self.start + (self.stop - self.start) * i as f64 / last })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Family {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: SweepParam,
    pub grid: Grid,
    pub family: Option<Family>,
    pub output_path: PathBuf,
    /// Optional two-column companion file for plotting.
    pub plot_path: Option<PathBuf>,
    /// Record wall-clock times; off by default so output is reproducible.
    pub timing: bool,
    pub max_points: usize,
}

/// Built-in sweeps. The temperature list
/// of `fig2` and the μ list of `fig4` are stand-ins.
pub const PRESETS: &[&str] = &["fig2", "fig4", "fig5", "fig6", "fig7"];

pub fn preset(name: &str) -> Result<SweepSpec> {
    let eq = Scenario { n_qubits: 3, ..Scenario::default() };
    let neq = Scenario { mode: CouplingMode::NonEquilibriumIndividual, ..eq.clone() };
    let spec = |base, axis, grid: (f64, f64, usize), family: Option<(SweepParam, &[f64])>| SweepSpec {
        base,
        axis,
        grid: Grid { start: grid.0, stop: grid.1, points: grid.2 },
        family: family.map(|(param, v)| Family { param, values: v.to_vec() }),
        output_path: PathBuf::from(format!("{name}.csv")),
        plot_path: None,
        timing: false,
        max_points: DEFAULT_MAX_POINTS,
    };
    Ok(match name {
        "fig2" => spec(eq, SweepParam::Mu, (0.0, 20.0, 81), Some((SweepParam::Temperature, &[0.5, 1.0, 2.0, 4.0]))),
        "fig4" => spec(
            Scenario { temperature: 1.0, ..neq },
            SweepParam::DeltaMu,
            (0.0, 12.0, 49),
            Some((SweepParam::Mu, &[0.0, 1.0, 2.0, 4.0, 8.0])),
        ),
        "fig5" => spec(
            Scenario { mu: 1.0, delta_mu: 2.0, temperature: 1.0, ..neq },
            SweepParam::CouplingJ,
            (0.0, 5.0, 51),
            None,
        ),
        "fig6" => spec(
            Scenario { mu: 0.0, temperature: 1.0, ..neq },
            SweepParam::DeltaMu,
            (0.0, 12.0, 49),
            Some((SweepParam::NCells, &[2.0, 3.0, 4.0, 5.0, 6.0])),
        ),
        "fig7" => spec(
            Scenario { mu: 1.0, delta_mu: 2.0, coupling_j: 1.0, ..neq },
            SweepParam::Temperature,
            (0.1, 10.0, 100),
            None,
        ),
        _ => return Err(Error::InvalidConfig(format!("unknown preset `{name}` (one of {})", PRESETS.join(", ")))),
    })
}

impl SweepSpec {
    /// Reads a sweep from config keys, starting from `preset` when given.
    pub fn from_map(map: &ConfigMap) -> Result<(Self, Vec<Warning>)> {
        let mut spec = match map.get("preset") {
            Some(name) => preset(name)?,
            None => SweepSpec {
                base: Scenario::default(),
                axis: SweepParam::Mu,
                grid: Grid { start: 0.0, stop: 1.0, points: 2 },
                family: None,
                output_path: PathBuf::from("sweep.csv"),
                plot_path: None,
                timing: false,
                max_points: DEFAULT_MAX_POINTS,
            },
        };
        if map.get("preset").is_none() {
            for key in ["axis", "start", "stop", "points"] {
                if !map.contains(key) {
                    return Err(Error::InvalidConfig(format!("sweep needs `{key}` (or a preset)")));
                }
            }
        }
        let (base, warnings) = spec.base.clone().apply(map)?;
        spec.base = base;
        if let Some(a) = map.get("axis") {
            spec.axis = SweepParam::parse(a)?;
        }
        if let Some(v) = map.get_f64("start")? {
            spec.grid.start = v;
        }
        if let Some(v) = map.get_f64("stop")? {
            spec.grid.stop = v;
        }
        if let Some(v) = map.get_usize("points")? {
            spec.grid.points = v;
        }
        match (map.get("family"), map.get_list("family_values")?) {
            (Some("none"), _) => spec.family = None,
            (Some(p), Some(values)) => spec.family = Some(Family { param: SweepParam::parse(p)?, values }),
            (Some(p), None) => {
                let param = SweepParam::parse(p)?;
                match &mut spec.family {
                    Some(f) if f.param == param => {}
                    _ => return Err(Error::InvalidConfig("`family` needs `family_values`".into())),
                }
            }
            (None, Some(values)) => match &mut spec.family {
                Some(f) => f.values = values,
                None => return Err(Error::InvalidConfig("`family_values` needs `family`".into())),
            },
            (None, None) => {}
        }
        if let Some(o) = map.get("output") {
            spec.output_path = PathBuf::from(o);
        }
        if let Some(p) = map.get("plot") {
            spec.plot_path = Some(PathBuf::from(p));
        }
        if let Some(t) = map.get_bool("timing")? {
            spec.timing = t;
        }
        if let Some(m) = map.get_usize("max_points")? {
            spec.max_points = m;
        }
        spec.validate()?;
        Ok((spec, warnings))
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if !g.start.is_finite() || !g.stop.is_finite() || g.start >= g.stop {
            return Err(Error::InvalidConfig(format!("grid start {} must be below stop {}", g.start, g.stop)));
        }
        if g.points < 2 || g.points > self.max_points {
            return Err(Error::InvalidConfig(format!("grid points must be in 2..={}, got {}", self.max_points, g.points)));
        }
        if self.axis == SweepParam::NCells {
            for v in g.values() {
                integer_cells(v)?;
            }
        }
        if let Some(f) = &self.family {
            if f.values.is_empty() {
                return Err(Error::InvalidConfig("family list is empty".into()));
            }
            if f.param == self.axis {
                return Err(Error::InvalidConfig(format!("family and axis are both `{}`", f.param)));
            }
            if f.param == SweepParam::NCells {
                for &v in &f.values {
                    integer_cells(v)?;
                }
            }
        }
        Ok(())
    }

    /// `(family, axis)` pairs in output order: family-major, axis-minor.
    pub fn points(&self) -> Vec<(Option<f64>, f64)> {
        let axis = self.grid.values();
        let families: Vec<Option<f64>> = match &self.family {
            Some(f) => f.values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        families.into_iter().flat_map(|f| axis.iter().map(move |&a| (f, a))).collect()
    }

    /// The scenario at one grid point.
    pub fn scenario_at(&self, family: Option<f64>, axis: f64) -> Result<(Scenario, Vec<Warning>)> {
        let mut s = self.base.clone();
        let mut warnings = Vec::new();
        if let (Some(f), Some(v)) = (&self.family, family) {
            warnings.extend(f.param.apply(&mut s, v)?);
        }
        warnings.extend(self.axis.apply(&mut s, axis)?);
        Ok((s, warnings))
    }
}

/// Outcome of one steady-state solve and battery evaluation.
#[derive(Clone, Debug)]
pub struct PointResult {
    /// Normalized ergotropy; `None` when the battery state is not
    /// determined (degenerate steady state that moves the battery).
    pub normalized: Option<f64>,
    pub ergotropy: Option<f64>,
    /// `‖L vec(ρ)‖₂` of the reported state, or the worst kernel residual on
    /// the degenerate path.
    pub residual: f64,
    pub unique: bool,
    /// Dimension of the generator kernel (1 when unique).
    pub kernel_dim: usize,
    pub sigma_min: f64,
    pub sigma_next: f64,
    pub battery: Option<ErgotropyResult>,
    pub wall_ms: u64,
}

/// Hamiltonian → generator → steady state → battery reduction → ergotropy.
///
/// A degenerate generator still yields W when every steady state leaves the
/// battery in the same reduced state; the row is then flagged non-unique.
pub fn run_point(cfg: &SystemConfig) -> Result<PointResult> {
    run_point_with(cfg, &SteadyStateOptions::default())
}

pub fn run_point_with(cfg: &SystemConfig, opts: &SteadyStateOptions) -> Result<PointResult> {
    let clock = Instant::now();
    cfg.validate()?;
    let l = Superoperator::build(cfg)?;
    let mut out = match steady_state(&l, opts) {
        Ok(report) => {
            let battery = evaluate_battery(&report.state, cfg)?;
            PointResult {
                normalized: Some(battery.normalized),
                ergotropy: Some(battery.ergotropy),
                residual: report.residual,
                unique: true,
                kernel_dim: 1,
                sigma_min: report.null_gap.sigma_min,
                sigma_next: report.null_gap.sigma_next,
                battery: Some(battery),
                wall_ms: 0,
            }
        }
        Err(Error::DegenerateSteadyState { .. }) => {
            let manifold = stationary_manifold(&l, opts)?;
            let battery = match battery_state_on_manifold(&manifold, cfg.n_qubits) {
                Ok((rho_b, _)) => Some(battery_ergotropy(&rho_b, cfg)?),
                Err(Error::AmbiguousBatteryState { .. }) => None,
                Err(e) => return Err(e),
            };
            PointResult {
                normalized: battery.as_ref().map(|b| b.normalized),
                ergotropy: battery.as_ref().map(|b| b.ergotropy),
                residual: manifold.residual,
                unique: false,
                kernel_dim: manifold.kernel_dim,
                sigma_min: manifold.null_gap.sigma_min,
                sigma_next: manifold.null_gap.sigma_next,
                battery,
                wall_ms: 0,
            }
        }
        Err(e) => return Err(e),
    };
    if let Some(w) = out.normalized {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidDensity(format!("normalized ergotropy {w} outside [0, 1]")));
        }
    }
    out.wall_ms = clock.elapsed().as_millis() as u64;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub family_value: Option<f64>,
    pub normalized_ergotropy: Option<f64>,
    pub raw_ergotropy: Option<f64>,
    pub residual: f64,
    pub unique: bool,
    pub wall_time_ms: u64,
}

/// Plain decimal for moderate magnitudes, scientific otherwise. Both forms
/// are the shortest strings that round-trip.
pub fn format_number(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

impl SweepRow {
    pub fn from_point(axis: f64, family: Option<f64>, p: &PointResult, timing: bool) -> Self {
        Self {
            axis_value: axis,
            family_value: family,
            normalized_ergotropy: p.normalized,
            raw_ergotropy: p.ergotropy,
            residual: p.residual,
            unique: p.unique,
            wall_time_ms: if timing { p.wall_ms } else { 0 },
        }
    }

    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(format_number).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{}",
            format_number(self.axis_value),
            opt(self.family_value),
            opt(self.normalized_ergotropy),
            opt(self.raw_ergotropy),
            format_number(self.residual),
            self.unique,
            self.wall_time_ms
        )
    }
}

/// A grid point that could not be computed.
#[derive(Clone, Debug, PartialEq)]
pub struct PointFailure {
    pub axis_value: f64,
    pub family_value: Option<f64>,
    pub kind: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySummary {
    pub family_value: Option<f64>,
    pub points: usize,
    /// Points with a defined W.
    pub defined: usize,
    /// Fraction of adjacent defined pairs where W increases.
    pub increase_fraction: f64,
    /// Adjacent pairs where W drops by more than the slack.
    pub decreases: usize,
    pub w_min: f64,
    pub w_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepStatus {
    Complete,
    Partial,
    Failed,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<PointFailure>,
    pub summary: Vec<FamilySummary>,
    pub warnings: Vec<Warning>,
}

impl SweepOutcome {
    pub fn status(&self) -> SweepStatus {
        match (self.rows.is_empty(), self.failures.is_empty()) {
            (_, true) => SweepStatus::Complete,
            (false, false) => SweepStatus::Partial,
            (true, false) => SweepStatus::Failed,
        }
    }
}

/// Runs every grid point on a pool of `jobs` workers (all cores when
/// `None`); the result order never depends on scheduling.
pub fn run_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepOutcome> {
    spec.validate()?;
    let points = spec.points();
    let work = |&(family, axis): &(Option<f64>, f64)| -> (Vec<Warning>, Result<PointResult>) {
        match spec.scenario_at(family, axis) {
            Ok((s, w)) => (w, s.to_config().and_then(|cfg| run_point(&cfg))),
            Err(e) => (Vec::new(), Err(e)),
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let results: Vec<_> = pool.install(|| points.par_iter().map(work).collect());

    let curves: Vec<Option<f64>> =
        results.iter().map(|(_, r)| r.as_ref().ok().and_then(|p| p.normalized)).collect();
    let summary = points
        .chunks(spec.grid.points)
        .zip(curves.chunks(spec.grid.points))
        .map(|(pts, ws)| summarize(pts[0].0, ws))
        .collect();

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut warnings: Vec<Warning> = Vec::new();
    for (&(family, axis), (w, res)) in points.iter().zip(results) {
        for x in w {
            if !warnings.contains(&x) {
                warnings.push(x);
            }
        }
        match res {
            Ok(p) => rows.push(SweepRow::from_point(axis, family, &p, spec.timing)),
            Err(e) => failures.push(PointFailure {
                axis_value: axis,
                family_value: family,
                kind: e.kind(),
                message: e.to_string(),
            }),
        }
    }
    Ok(SweepOutcome { rows, failures, summary, warnings })
}

fn summarize(family: Option<f64>, curve: &[Option<f64>]) -> FamilySummary {
    let ws: Vec<f64> = curve.iter().flatten().copied().collect();
    let pairs = ws.len().saturating_sub(1);
    let ups = ws.windows(2).filter(|p| p[1] > p[0] + MONOTONE_SLACK).count();
    let downs = ws.windows(2).filter(|p| p[1] < p[0] - MONOTONE_SLACK).count();
    FamilySummary {
        family_value: family,
        points: curve.len(),
        defined: ws.len(),
        increase_fraction: if pairs > 0 { ups as f64 / pairs as f64 } else { 0.0 },
        decreases: downs,
        w_min: ws.iter().copied().fold(f64::INFINITY, f64::min),
        w_max: ws.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn write_csv(spec: &SweepSpec, rows: &[SweepRow], mut w: impl Write) -> Result<()> {
    let family = spec.family.as_ref().map_or("none", |f| f.param.name());
    writeln!(w, "# qbss sweep schema={CSV_SCHEMA_VERSION} axis={} family={family}", spec.axis)?;
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.to_csv())?;
    }
    Ok(())
}

/// One block per family, `axis W` per line, blocks separated by two blank
/// lines (the gnuplot `index` convention).
pub fn write_plot_data(spec: &SweepSpec, rows: &[SweepRow], mut w: impl Write) -> Result<()> {
    let fam_name = spec.family.as_ref().map_or("none", |f| f.param.name());
    let mut current: Option<Option<f64>> = None;
    for r in rows {
        if current != Some(r.family_value) {
            if current.is_some() {
                writeln!(w, "\n")?;
            }
            match r.family_value {
                Some(v) => writeln!(w, "# {fam_name}={}", format_number(v))?,
                None => writeln!(w, "# {}", spec.axis)?,
            }
            current = Some(r.family_value);
        }
        if let Some(wv) = r.normalized_ergotropy {
            writeln!(w, "{} {}", format_number(r.axis_value), format_number(wv))?;
        }
    }
    Ok(())
}

pub fn write_error_manifest(failures: &[PointFailure], mut w: impl Write) -> Result<()> {
    writeln!(w, "axis,family,kind,message")?;
    for f in failures {
        let fam = f.family_value.map(format_number).unwrap_or_default();
        writeln!(w, "{},{},{},\"{}\"", format_number(f.axis_value), fam, f.kind, f.message.replace('"', "\"\""))?;
    }
    Ok(())
}

/// Path of the error manifest written next to `output`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".errors.csv");
    PathBuf::from(s)
}

/// Runs the sweep and writes the CSV, the plot file when requested and the
/// error manifest when any point failed.
pub fn execute_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepOutcome> {
    let outcome = run_sweep(spec, jobs)?;
    if let Some(dir) = spec.output_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::io::BufWriter::new(std::fs::File::create(&spec.output_path)?);
    write_csv(spec, &outcome.rows, &mut f)?;
    f.flush()?;
    if let Some(p) = &spec.plot_path {
        let mut f = std::io::BufWriter::new(std::fs::File::create(p)?);
        write_plot_data(spec, &outcome.rows, &mut f)?;
        f.flush()?;
    }
    let manifest = manifest_path(&spec.output_path);
    if outcome.failures.is_empty() {
        if manifest.exists() {
            std::fs::remove_file(&manifest)?;
        }
    } else {
        write_error_manifest(&outcome.failures, std::fs::File::create(&manifest)?)?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_hits_both_endpoints() {
        let g = Grid { start: 0.1, stop: 10.0, points: 100 };
        let v = g.values();
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[99], 10.0);
    }

    #[test]
    fn single_qubit_point_follows_the_closed_form() {
        let cfg = SystemConfig::equilibrium(1, 3.0, 1.0);
        let p = run_point(&cfg).unwrap();
        let b = p.battery.unwrap();
        assert!((b.rho_battery.populations()[0] - 0.880797077977882).abs() < 1e-10);
        assert!((p.normalized.unwrap() - 0.761594155955765).abs() < 1e-10);
        assert!(p.unique);

        let p = run_point(&SystemConfig::equilibrium(1, 1.0, 1.0)).unwrap();
        assert!(p.normalized.unwrap().abs() < 1e-12);
    }

    #[test]
    fn collective_three_cells_reports_a_flagged_row() {
        let p = run_point(&SystemConfig::equilibrium(3, 0.0, 1.0)).unwrap();
        assert!(!p.unique);
        assert!(p.kernel_dim >= 2);
        assert!(p.normalized.unwrap() < 0.01);
    }

    #[test]
    fn spec_validation() {
        let mut s = preset("fig2").unwrap();
        assert!(s.validate().is_ok());
        s.grid.points = 1;
        assert!(s.validate().is_err());
        s.grid.points = 5000;
        assert!(s.validate().is_err());
        let mut s = preset("fig5").unwrap();
        s.grid.start = 6.0;
        assert!(s.validate().is_err());
        let mut s = preset("fig6").unwrap();
        s.family = Some(Family { param: SweepParam::NCells, values: vec![2.5] });
        assert!(s.validate().is_err());
        assert!(preset("fig3").is_err());
    }

    #[test]
    fn from_map_overrides_a_preset() {
        let map = ConfigMap::parse("preset = fig4\npoints = 3\nfamily_values = 2\noutput = x.csv").unwrap();
        let (s, _) = SweepSpec::from_map(&map).unwrap();
        assert_eq!(s.axis, SweepParam::DeltaMu);
        assert_eq!(s.grid.points, 3);
        assert_eq!(s.family.unwrap().values, vec![2.0]);
        assert_eq!(s.output_path, PathBuf::from("x.csv"));
        assert!(SweepSpec::from_map(&ConfigMap::parse("axis = mu").unwrap()).is_err());
    }

    #[test]
    fn duplicate_family_entries_give_identical_rows() {
        let spec = SweepSpec {
            base: Scenario { n_qubits: 2, mode: CouplingMode::NonEquilibriumIndividual, ..Scenario::default() },
            axis: SweepParam::DeltaMu,
            grid: Grid { start: 0.0, stop: 4.0, points: 2 },
            family: Some(Family { param: SweepParam::Mu, values: vec![1.0, 1.0] }),
            output_path: PathBuf::from("unused.csv"),
            plot_path: None,
            timing: false,
            max_points: DEFAULT_MAX_POINTS,
        };
        let out = run_sweep(&spec, Some(2)).unwrap();
        assert_eq!(out.rows.len(), 4);
        assert_eq!(out.rows[0].to_csv(), out.rows[2].to_csv());
        assert_eq!(out.rows[1].to_csv(), out.rows[3].to_csv());
        assert_eq!(out.summary.len(), 2);
        assert_eq!(out.summary[0], out.summary[1]);
        assert_eq!(out.status(), SweepStatus::Complete);
    }
}
