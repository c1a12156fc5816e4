use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use hykg::audit::{format_float as f, report_csv, run_audit_config, AuditConfig};
use hykg::oracle::{numerov_shoot, oracle_state, OracleSettings, OracleState, RadialGrid};
use hykg::pipeline::{format_flags, mark_order_violations, LevelFlag, Levels, ScanSettings};
use hykg::selftest::{run_selftest, FixtureResult};
use hykg::wavefunction::{closed_form_radial, count_nodes, normalize, ode_residual, overlap, WaveVariant};
use hykg::{pipeline, Engine, EnergyLevel, HylleraasParams};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{json_string, opt_float, paint, use_color, write_atomic, Csv};

/// One parameter point: everything a command needs besides the output dir.
#[derive(Debug, Clone)]
pub struct Point {
    pub params: HylleraasParams,
    pub grid: RadialGrid,
    pub engines: BTreeSet<Engine>,
    pub n_max: u32,
    pub formats: BTreeSet<Format>,
    pub wf_engine: Engine,
}

impl Point {
    pub fn new(config: &RunConfig, params: HylleraasParams) -> Result<Self, CliError> {
        Ok(Point {
            params,
            grid: config.grid_for(&params)?,
            engines: config.run.engines.clone(),
            n_max: config.run.n_max,
            formats: config.run.formats.clone(),
            wf_engine: config.run.wf_engine,
        })
    }

    fn wants(&self, format: Format) -> bool {
        self.formats.contains(&format)
    }
}

fn oracle_levels(p: &Point, n: u32) -> Result<(Levels, Option<OracleState>), CliError> {
    match oracle_state(&p.params, n, &p.grid, &OracleSettings::default()) {
        Ok(s) => Ok((Levels { levels: vec![s.level.clone()], flags: BTreeSet::new() }, Some(s))),
        Err(hykg::Error::NoRoot(_)) => {
            let mut l = Levels::default();
            l.flags.insert(LevelFlag::NoRoot);
            Ok((l, None))
        }
        Err(e) => Err(e.into()),
    }
}

/// Levels of one engine for `n = 0..=n_max`, computed in parallel over `n`.
pub fn engine_levels(p: &Point, engine: Engine) -> Result<Vec<Levels>, CliError> {
    let settings = ScanSettings::default();
    let mut out = (0..=p.n_max)
        .into_par_iter()
        .map(|n| -> Result<Levels, CliError> {
            Ok(match engine {
                Engine::Eq45Verbatim => pipeline::energy_eq45(&p.params, n, &settings)?,
                Engine::ImplicitLambda => pipeline::energy_implicit(&p.params, n, &settings)?,
                Engine::MechanicalNU => pipeline::energy_mechanical(&p.params, n, &settings)?,
                Engine::Oracle => oracle_levels(p, n)?.0,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    mark_order_violations(&mut out);
    Ok(out)
}

/// Rows ordered by `n`, then engine.
pub fn spectrum_levels(p: &Point) -> Result<Vec<EnergyLevel>, CliError> {
    let per_engine = p
        .engines
        .iter()
        .map(|&e| engine_levels(p, e))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for n in 0..=p.n_max as usize {
        for levels in &per_engine {
            rows.extend(levels[n].levels.iter().cloned());
        }
    }
    Ok(rows)
}

pub fn spectrum_csv(levels: &[EnergyLevel]) -> String {
    let mut csv = Csv::new(&["n", "engine", "E", "Ebar", "residual", "flags"]);
    for l in levels {
        csv.row([
            l.n.to_string(),
            l.engine.name().to_string(),
            f(l.energy),
            f(l.ebar),
            f(l.residual),
            format_flags(&l.flags),
        ]);
    }
    csv.finish()
}

pub fn cmd_spectrum(p: &Point, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let levels = spectrum_levels(p)?;
    let mut written = Vec::new();
    if p.wants(Format::Csv) {
        written.push(write_atomic(out, "spectrum.csv", &spectrum_csv(&levels))?);
    }
    if p.wants(Format::Json) {
        written.push(write_atomic(out, "spectrum.json", &json_string(&levels))?);
    }
    Ok(written)
}

pub fn audit_config(p: &Point) -> Result<AuditConfig, CliError> {
    let mut c = AuditConfig::new(p.params, p.n_max)?;
    c.grid = p.grid;
    Ok(c)
}

pub fn cmd_audit(p: &Point, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = run_audit_config(&audit_config(p)?)?;
    // Both formats are always written: the CSV is the flat view of the JSON.
    Ok(vec![
        write_atomic(out, "audit.json", &report.to_json())?,
        write_atomic(out, "audit.csv", &report_csv(&report))?,
    ])
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub level: EnergyLevel,
    pub nodes: usize,
    /// The same root from Numerov shooting near the matrix energy.
    pub e_numerov: Option<f64>,
}

pub fn oracle_rows(p: &Point) -> Result<Vec<OracleRow>, CliError> {
    (0..=p.n_max)
        .into_par_iter()
        .map(|n| {
            let (_, state) = oracle_levels(p, n)?;
            Ok(state.map(|s| {
                let m = p.params.mass;
                let e = s.level.energy;
                let width = 1e-4 * m;
                let bracket = ((e - width).max(-m), (e + width).min(m));
                let e_numerov = numerov_shoot(&p.params, n, &p.grid, bracket).ok().map(|l| l.energy);
                OracleRow { nodes: count_nodes(&s.vector), level: s.level, e_numerov }
            }))
        })
        .collect::<Result<Vec<_>, CliError>>()
        .map(|rows| rows.into_iter().flatten().collect())
}

pub fn cmd_oracle(p: &Point, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let rows = oracle_rows(p)?;
    let mut written = Vec::new();
    if p.wants(Format::Csv) {
        let mut csv = Csv::new(&["n", "E", "Ebar", "residual", "nodes", "E_numerov", "flags"]);
        for r in &rows {
            csv.row([
                r.level.n.to_string(),
                f(r.level.energy),
                f(r.level.ebar),
                f(r.level.residual),
                r.nodes.to_string(),
                opt_float(r.e_numerov),
                format_flags(&r.level.flags),
            ]);
        }
        written.push(write_atomic(out, "oracle.csv", &csv.finish())?);
    }
    if p.wants(Format::Json) {
        written.push(write_atomic(out, "oracle.json", &json_string(&rows))?);
    }
    Ok(written)
}

/// Sidecar of `wf_n{n}.csv`.
#[derive(Debug, Clone, Serialize)]
pub struct WaveSidecar {
    pub n: u32,
    pub engine: Engine,
    #[serde(rename = "E")]
    pub energy: f64,
    pub variant: &'static str,
    /// `|⟨R_closed, R_oracle⟩|` on the shared grid, before normalization.
    pub overlap_closed_oracle: Option<f64>,
    pub ode_residual_closed: Option<f64>,
    pub closed_nodes: Option<usize>,
    pub oracle_nodes: Option<usize>,
    pub flags: Vec<String>,
}

fn level_for(p: &Point, n: u32) -> Result<Option<EnergyLevel>, CliError> {
    let settings = ScanSettings::default();
    let levels = match p.wf_engine {
        Engine::Eq45Verbatim => pipeline::energy_eq45(&p.params, n, &settings)?,
        Engine::ImplicitLambda => pipeline::energy_implicit(&p.params, n, &settings)?,
        Engine::MechanicalNU => pipeline::energy_mechanical(&p.params, n, &settings)?,
        Engine::Oracle => oracle_levels(p, n)?.0,
    };
    Ok(levels.first().cloned())
}

/// Writes `wf_n{n}.csv` (`r,R_closed,R_oracle`) and its sidecar.
pub fn write_wavefunction(p: &Point, n: u32, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let Some(level) = level_for(p, n)? else {
        return Err(CliError::MissingLevel { n, engine: p.wf_engine.name() });
    };
    let grid = p.grid.points();
    let mut flags = Vec::new();
    let mut sidecar = WaveSidecar {
        n,
        engine: p.wf_engine,
        energy: level.energy,
        variant: WaveVariant::DEFAULT.label(),
        overlap_closed_oracle: None,
        ode_residual_closed: None,
        closed_nodes: None,
        oracle_nodes: None,
        flags: Vec::new(),
    };

    let closed = match closed_form_radial(&p.params, &level, WaveVariant::DEFAULT, &grid) {
        Ok(rf) => {
            sidecar.ode_residual_closed = ode_residual(&p.params, level.energy, &rf.grid, &rf.values).ok();
            Some(rf)
        }
        Err(e) => {
            flags.push(format!("ClosedFormUnavailable({e})"));
            None
        }
    };
    let oracle = if p.engines.contains(&Engine::Oracle) {
        let (_, state) = oracle_levels(p, n)?;
        if state.is_none() {
            flags.push("OracleLevelMissing".into());
        }
        state
    } else {
        None
    };
    if let (Some(c), Some(o)) = (&closed, &oracle) {
        sidecar.overlap_closed_oracle = overlap(&grid, &c.values, &o.vector).ok().filter(|x| x.is_finite());
    }

    let closed_values = closed.map(|rf| match normalize(rf.clone()) {
        Ok(norm) => norm.values,
        Err(e) => {
            flags.push(format!("ClosedNotNormalized({e})"));
            let m = rf.max_abs();
            if m > 0.0 && m.is_finite() {
                rf.values.iter().map(|v| v / m).collect()
            } else {
                rf.values
            }
        }
    });
    let oracle_values = oracle.map(|s| {
        let rf = hykg::wavefunction::RadialFunction::new(s.level.clone(), s.grid, s.vector);
        let mut values = match normalize(rf.clone()) {
            Ok(norm) => norm.values,
            Err(e) => {
                flags.push(format!("OracleNotNormalized({e})"));
                rf.values
            }
        };
        // Fix the sign: agree with the closed form, else start positive.
        let reference: f64 = match &closed_values {
            Some(c) => c.iter().zip(&values).map(|(x, y)| x * y).sum(),
            None => values.iter().copied().find(|v| v.abs() > 0.0).unwrap_or(1.0),
        };
        if reference < 0.0 {
            values.iter_mut().for_each(|v| *v = -*v);
        }
        values
    });
    sidecar.closed_nodes = closed_values.as_deref().map(count_nodes);
    sidecar.oracle_nodes = oracle_values.as_deref().map(count_nodes);
    sidecar.flags = flags;

    let mut csv = Csv::new(&["r", "R_closed", "R_oracle"]);
    for (i, &r) in grid.iter().enumerate() {
        csv.row([
            f(r),
            opt_float(closed_values.as_ref().map(|v| v[i])),
            opt_float(oracle_values.as_ref().map(|v| v[i])),
        ]);
    }
    Ok(vec![
        write_atomic(out, &format!("wf_n{n}.csv"), &csv.finish())?,
        write_atomic(out, &format!("wf_n{n}.json"), &json_string(&sidecar))?,
    ])
}

/// All `n ≤ n_max` (or just `only`); a missing level is reported after the
/// others have been written.
pub fn cmd_wavefunction(p: &Point, only: Option<u32>, out: &Path) -> Result<Vec<PathBuf>, CliError> {
    let ns: Vec<u32> = match only {
        Some(n) if n > p.n_max => {
            return Err(CliError::MissingLevel { n, engine: p.wf_engine.name() });
        }
        Some(n) => vec![n],
        None => (0..=p.n_max).collect(),
    };
    let results: Vec<_> = ns.par_iter().map(|&n| write_wavefunction(p, n, out)).collect();
    let mut written = Vec::new();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(paths) => written.extend(paths),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(written),
    }
}

pub fn selftest_table(results: &[FixtureResult], color: bool) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut out = String::new();
    for r in results {
        let status = paint(if r.passed { "PASS" } else { "FAIL" }, r.passed, color);
        out.push_str(&format!(
            "{status}  {:<width$}  worst {:.3e}  tol {:.0e}\n",
            r.name, r.worst, r.tolerance
        ));
    }
    out
}

pub fn cmd_selftest(perturb: Option<&str>) -> Result<String, CliError> {
    let results = run_selftest(perturb);
    let table = selftest_table(&results, use_color());
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        print!("{table}");
        return Err(CliError::SelftestFailed { failed });
    }
    Ok(table)
}
