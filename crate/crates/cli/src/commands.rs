//! Subcommand bodies: resolved configuration in, named CSV/JSON documents out.

use serde::Serialize;
use serde_json::{json, Value};
use supercharge::counterdiabatic::{compare_protocols, FloquetConfig, GaugeExpansion, Protocol, ProtocolConfig};
use supercharge::diagnostics::{advantage_csv, advantage_table, gap_probe_csv, gap_probe_uniform, loglog_fit};
use supercharge::dynamics::{ising_max_power_scan, parallel_max_power_scan, power_scan_csv, PowerRow};
use supercharge::export::{Cell, CsvTable};
use supercharge::grover::{grover_max_power_scan, power_scan_csv as grover_scan_csv, PowerScanRow};
use supercharge::models::Schedule;
use supercharge::Error;

use crate::config::{
    AdvantageConfig, CdFidelityConfig, GroverBrachConfig, GroverScanConfig, IsingGapConfig, IsingPowerConfig,
};

/// Documents produced by one subcommand, plus extra manifest fields.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
    pub manifest_extra: serde_json::Map<String, Value>,
}

impl Artifacts {
    fn csv(&mut self, name: impl Into<String>, table: &CsvTable) {
        self.files.push((name.into(), table.render()));
    }

    fn json(&mut self, name: impl Into<String>, value: &impl Serialize) {
        let text = serde_json::to_string_pretty(value).expect("plain data serializes") + "\n";
        self.files.push((name.into(), text));
    }
}

fn range(nmin: usize, nmax: usize) -> Result<Vec<usize>, Error> {
    if nmin > nmax {
        return Err(Error::InvalidInput(format!("nmin {nmin} exceeds nmax {nmax}")));
    }
    Ok((nmin..=nmax).collect())
}

fn fit_json(points: Vec<(f64, f64)>) -> Result<Value, Error> {
    let fit = loglog_fit(&points)?;
    Ok(serde_json::to_value(fit).expect("plain data serializes"))
}

pub fn grover_scan(c: &GroverScanConfig) -> Result<Artifacts, Error> {
    if c.nmin < 2 || c.nmax > 40 {
        return Err(Error::InvalidInput(format!("grover-scan needs 2 <= nmin <= nmax <= 40, got {}..{}", c.nmin, c.nmax)));
    }
    if c.schedules.is_empty() {
        return Err(Error::InvalidInput("grover-scan needs at least one schedule".into()));
    }
    let dims: Vec<u64> = range(c.nmin, c.nmax)?.into_iter().map(|k| 1u64 << k).collect();
    let mut out = Artifacts::default();
    let mut exponents = serde_json::Map::new();
    for kind in &c.schedules {
        let rows: Vec<PowerScanRow> = grover_max_power_scan(&dims, *kind)?;
        out.csv(format!("grover_scan_{}.csv", kind.name()), &grover_scan_csv(&rows));
        exponents.insert(kind.name().into(), fit_json(rows.iter().map(|r| (r.dim as f64, r.p_max)).collect())?);
    }
    out.json("exponents.json", &exponents);
    Ok(out)
}

pub fn grover_brach(c: &GroverBrachConfig) -> Result<Artifacts, Error> {
    if c.dims.is_empty() || c.points < 2 {
        return Err(Error::InvalidInput("grover-brach needs dims and at least two points".into()));
    }
    let schedules: Vec<Schedule> = c.dims.iter().map(|&dim| Schedule::Brachistochrone { dim }).collect();
    for s in &schedules {
        s.validate()?;
    }
    let mut header = vec!["s".to_string()];
    header.extend(c.dims.iter().map(|d| format!("f_{d}")));
    let mut table = CsvTable::new(&header);
    for s in supercharge::dynamics::uniform_grid(c.points) {
        let mut row: Vec<Cell> = vec![s.into()];
        for sch in &schedules {
            row.push(sch.eval(s)?.f.into());
        }
        table.push(row);
    }
    let mut out = Artifacts::default();
    out.csv("grover_brach.csv", &table);
    Ok(out)
}

fn power_fit(rows: &[PowerRow]) -> Result<Value, Error> {
    fit_json(rows.iter().map(|r| (r.n as f64, r.pbar_max)).collect())
}

pub fn ising_power(c: &IsingPowerConfig) -> Result<Artifacts, Error> {
    let ns = range(c.nmin, c.nmax)?;
    let mut out = Artifacts::default();
    let mut exponents = serde_json::Map::new();
    let ising = ising_max_power_scan(&ns)?;
    out.csv("ising_power.csv", &power_scan_csv(&ising));
    exponents.insert("ising".into(), power_fit(&ising)?);
    if c.parallel_baseline {
        let parallel = parallel_max_power_scan(&ns)?;
        out.csv("parallel_power.csv", &power_scan_csv(&parallel));
        exponents.insert("parallel".into(), power_fit(&parallel)?);
    }
    let worst = ising.iter().map(|r| r.bookkeeping_error.abs()).fold(0.0, f64::max);
    out.manifest_extra.insert("max_bookkeeping_error".into(), json!(worst));
    out.json("exponents.json", &exponents);
    Ok(out)
}

pub fn ising_gap(c: &IsingGapConfig) -> Result<Artifacts, Error> {
    if c.ns.is_empty() {
        return Err(Error::InvalidInput("ising-gap needs at least one n".into()));
    }
    let mut ns = c.ns.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut out = Artifacts::default();
    let mut flagged = serde_json::Map::new();
    for n in ns {
        let rows = gap_probe_uniform(n, c.points)?;
        let degenerate: Vec<f64> = rows.iter().filter(|r| r.degenerate).map(|r| r.lambda).collect();
        flagged.insert(n.to_string(), json!(degenerate));
        out.csv(format!("ising_gap_n{n}.csv"), &gap_probe_csv(&rows));
    }
    out.manifest_extra.insert("degenerate_lambdas".into(), Value::Object(flagged));
    Ok(out)
}

pub fn cd_fidelity(c: &CdFidelityConfig) -> Result<Artifacts, Error> {
    if c.ell.is_empty() || c.ell.iter().any(|l| !(1..=2).contains(l)) {
        return Err(Error::InvalidInput(format!("ell must be a subset of {{1, 2}}, got {:?}", c.ell)));
    }
    let config = ProtocolConfig {
        n: c.n,
        tau: c.tau,
        omega_ratio_1: c.omega_ratio_1,
        omega_ratio_2: c.omega_ratio_2,
        integrator: c.integrator.clone(),
    };
    let has = |l: usize| c.ell.contains(&l);
    let mut protocols = vec![Protocol::Ua];
    protocols.extend([(1, Protocol::Cd1), (2, Protocol::Cd2)].iter().filter(|p| has(p.0)).map(|p| p.1));
    protocols.extend([(1, Protocol::Fe1), (2, Protocol::Fe2)].iter().filter(|p| has(p.0)).map(|p| p.1));
    let cmp = compare_protocols(&config, &protocols)?;

    let model = config.model();
    let mut floquet = Vec::new();
    for (order, ratio) in [(1, c.omega_ratio_1), (2, c.omega_ratio_2)] {
        if has(order) {
            let fc = FloquetConfig::new(model.omega0, ratio, &GaugeExpansion::build(&model, order)?)?;
            floquet.push(fc);
        }
    }
    let finals: serde_json::Map<String, Value> = cmp
        .runs
        .iter()
        .map(|r| (format!("F_{}", r.protocol.label()), json!(r.final_fidelity())))
        .collect();
    let drift = cmp.runs.iter().map(|r| r.trace.drift_per_10k_steps()).fold(0.0, f64::max);

    let mut out = Artifacts::default();
    out.csv("cd_fidelity.csv", &cmp.to_csv());
    out.manifest_extra.insert("floquet".into(), json!(floquet));
    out.manifest_extra.insert("final_fidelity".into(), Value::Object(finals));
    out.manifest_extra.insert("max_norm_drift_per_10k_steps".into(), json!(drift));
    Ok(out)
}

pub fn advantage(c: &AdvantageConfig) -> Result<Artifacts, Error> {
    let rows = advantage_table(&range(c.nmin, c.nmax)?)?;
    let mut out = Artifacts::default();
    out.csv("advantage.csv", &advantage_csv(&rows));
    Ok(out)
}
