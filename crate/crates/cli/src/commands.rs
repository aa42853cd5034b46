//! One function per subcommand: resolve config, compute, emit a table.

use std::f64::consts::PI;
use std::io::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use nhlatt_core::charpoly::CharPolyParams;
use nhlatt_core::continuum::{continuum_rta, ContinuumParams};
use nhlatt_core::dynamics::{scatter_detailed, RtaPoint, WavepacketSpec};
use nhlatt_core::experiments::{
    classify_ep_structure, dump_eigenstate_profiles, extract_gamma_star, scan_gamma_star, scan_q,
    scan_rta, EpStructure, ScanGrid, ScanVariable,
};
use nhlatt_core::lattice::central_site;
use nhlatt_core::spectral::{
    bound_state, locate_ep_with, occupancies, order_eigenpairs, solve_charpoly,
    solve_dense_seeded, EpClass, GapMetric,
};
use nhlatt_core::table::{rta_columns, spectrum_columns, Cell, Format, Table};
use nhlatt_core::{Complex64, Error, LatticeParams, Result};

use crate::args::*;
use crate::config::resolve;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Spectrum(a) => spectrum(a),
        Command::Scatter(a) => scatter(a),
        Command::ScanGamma(a) => scan_gamma(a),
        Command::ScanK(a) => scan_k(a),
        Command::ScanQ(a) => scan_q_cmd(a),
        Command::BoundState(a) => bound(a),
        Command::EpLocate(a) => ep_locate(a),
        Command::ClassifyEp(a) => classify(a),
        Command::Profiles(a) => profiles(a),
        Command::Continuum(a) => continuum(a),
    }
}

fn meta(command: &str, config: Value) -> Value {
    json!({ "command": command, "config": config, "version": env!("CARGO_PKG_VERSION") })
}

fn emit(table: &Table, common: &Common, meta: &Value) -> Result<()> {
    let format = match common.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
    };
    match &common.out {
        Some(path) => table.write(Path::new(path), format, meta),
        None => {
            let text = match format {
                Format::Csv => table.to_csv(),
                Format::Json => format!("{:#}\n", table.to_json(meta)),
            };
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|source| Error::Io { path: "<stdout>".into(), source })
        }
    }
}

fn site(g: &Geometry) -> usize {
    g.q.unwrap_or_else(|| central_site(g.l))
}

fn impurity(gamma: Option<f64>, v: Option<f64>) -> Result<Complex64> {
    match (gamma, v) {
        (Some(g), None) => Ok(Complex64::new(0.0, -g)),
        (None, Some(v)) => Ok(Complex64::new(v, 0.0)),
        _ => Err(Error::InvalidParameter("give exactly one of --gamma and --V".into())),
    }
}

fn wavevector(k: &Wavevector) -> Result<f64> {
    match (k.k, k.k_pi) {
        (Some(k), None) => Ok(k),
        (None, Some(f)) => Ok(f * PI),
        _ => Err(Error::InvalidParameter("give exactly one of --k and --k-pi".into())),
    }
}

fn packet(l: usize, p: &Packet) -> Result<WavepacketSpec> {
    let k = wavevector(&p.k)?;
    let mut spec = WavepacketSpec::for_chain(l, p.sigma, k);
    if let Some(j0) = p.j0 {
        spec.j0 = j0;
    }
    Ok(spec)
}

fn gamma_values(g: &GammaGrid) -> Result<Vec<f64>> {
    Ok(ScanGrid::linspace(ScanVariable::Gamma, g.gamma_min, g.gamma_max, g.points)?.values().to_vec())
}

fn rta_row(p: &RtaPoint) -> Vec<Cell> {
    [p.gamma, p.k, p.r, p.t, p.a, p.t_obs, p.norm_final, p.absorbed_integral].map(Cell::Float).to_vec()
}

fn occ_cells(v: &[Complex64]) -> impl Iterator<Item = Cell> {
    occupancies(v).into_iter().map(Cell::Float)
}

fn spectrum(a: SpectrumArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let params = LatticeParams::new(a.geometry.l, site(&a.geometry), impurity(a.gamma, a.v)?)?;
    let spec = match a.backend {
        BackendArg::Dense => solve_dense_seeded(&params, a.vectors, a.common.seed)?,
        BackendArg::Charpoly => {
            if a.vectors {
                return Err(Error::InvalidParameter("the charpoly backend has no eigenvectors".into()));
            }
            solve_charpoly(&CharPolyParams::from_lattice(&params)?)?
        }
    };
    let spec = order_eigenpairs(&spec);
    let mut table = Table::new(spectrum_columns(a.vectors.then_some(params.l)));
    for (i, lam) in spec.eigenvalues.iter().enumerate() {
        let mut row = vec![Cell::from(i), Cell::Float(lam.re), Cell::Float(lam.im)];
        if let Some(vecs) = &spec.eigenvectors {
            row.extend(occ_cells(&vecs[i]));
        }
        table.push(row)?;
    }
    emit(&table, &a.common, &meta("spectrum", echo))
}

fn scatter(a: ScatterArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let l = a.geometry.l;
    let q = site(&a.geometry);
    let spec = packet(l, &a.packet)?;
    let (point, _) = scatter_detailed(l, q, &spec, a.gamma, a.common.tol, a.t_obs)?;
    let mut table = Table::new(rta_columns());
    table.push(rta_row(&point))?;
    emit(&table, &a.common, &meta("scatter", echo))
}

fn scan_gamma(a: ScanGammaArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let l = a.geometry.l;
    let q = site(&a.geometry);
    let spec = packet(l, &a.packet)?;
    let gammas = gamma_values(&a.grid)?;
    let scan = scan_rta(&gammas, l, q, &spec, a.common.tol);
    let mut table = Table::new(rta_columns());
    let mut first_error = None;
    for p in scan.points {
        match p.outcome {
            Ok(point) => table.push(rta_row(&point))?,
            Err(e) => {
                eprintln!("gamma = {}: {e}", p.gamma);
                first_error.get_or_insert(e);
            }
        }
    }
    let d = scan.diagnostics;
    let mut m = meta("scan-gamma", echo);
    m["diagnostics"] = json!(d);
    emit(&table, &a.common, &m)?;
    first_error.map_or(Ok(()), Err)
}

fn scan_k(a: ScanKArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let l = a.geometry.l;
    let q = site(&a.geometry);
    let gammas = gamma_values(&a.grid)?;
    let ks: Vec<f64> = a.k_pi.iter().map(|f| f * PI).collect();
    let results = scan_gamma_star(&ks, &gammas, l, q, a.sigma, a.common.tol);
    let cp = ContinuumParams::default();
    let mut table = Table::new(["k", "gamma_star", "lattice_law", "continuum_gamma_star"]);
    let mut first_error = None;
    for r in results {
        let lattice = match r.gamma_star {
            Ok(g) => g,
            Err(e) => {
                eprintln!("k = {}: {e}", r.k);
                first_error.get_or_insert(e);
                f64::NAN
            }
        };
        let continuum: Vec<RtaPoint> = gammas
            .iter()
            .map(|&g| {
                let (rr, tt, aa) = continuum_rta(&cp, g, r.k)?;
                Ok(RtaPoint { gamma: g, k: r.k, r: rr, t: tt, a: aa, norm_final: rr + tt, absorbed_integral: aa, t_obs: 0.0 })
            })
            .collect::<Result<_>>()?;
        let cont = extract_gamma_star(&continuum).unwrap_or(f64::NAN);
        table.push([r.k, lattice, 2.0 * r.k.sin(), cont].map(Cell::Float).to_vec())?;
    }
    emit(&table, &a.common, &meta("scan-k", echo))?;
    first_error.map_or(Ok(()), Err)
}

fn scan_q_cmd(a: ScanQArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let qs = if a.qs.is_empty() { (1..=a.l / 2).collect() } else { a.qs.clone() };
    let entries = scan_q(a.l, &qs)?;
    let mut table = Table::new(["q", "gamma_c", "min_gap", "parity_consistent"]);
    for e in entries {
        table.push(vec![
            Cell::from(e.q),
            Cell::Float(e.gamma_c),
            Cell::Float(e.min_gap),
            Cell::Int(e.parity_consistent as i64),
        ])?;
    }
    emit(&table, &a.common, &meta("scan-q", echo))
}

fn bound(a: BoundStateArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let params = LatticeParams::new(a.geometry.l, site(&a.geometry), impurity(a.gamma, a.v)?)?;
    let spec = order_eigenpairs(&solve_dense_seeded(&params, true, a.common.seed)?);
    let info = bound_state(&spec)?;
    let mut cols: Vec<String> =
        ["index", "re_lambda", "im_lambda", "alpha", "r_squared"].iter().map(|s| s.to_string()).collect();
    cols.extend((1..=params.l).map(|j| format!("occ_{j}")));
    let mut table = Table::new(cols);
    let mut row = vec![
        Cell::from(info.index),
        Cell::Float(info.eigenvalue.re),
        Cell::Float(info.eigenvalue.im),
        Cell::Float(info.fit.alpha),
        Cell::Float(info.fit.r_squared),
    ];
    row.extend(info.profile.iter().map(|&p| Cell::Float(p)));
    table.push(row)?;
    emit(&table, &a.common, &meta("bound-state", echo))
}

fn class_name(c: EpClass) -> &'static str {
    match c {
        EpClass::AllPairedEp => "all-paired-ep",
        EpClass::SingleExtraEp => "single-extra-ep",
        EpClass::ThirdOrderEp => "third-order-ep",
        EpClass::NoEp => "no-ep",
    }
}

fn ep_locate(a: EpLocateArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let metric = match a.metric {
        MetricArg::MinPair => GapMetric::MinPair,
        MetricArg::CentralPair => GapMetric::CentralPair,
    };
    let loc = locate_ep_with(a.geometry.l, site(&a.geometry), (a.gamma_min, a.gamma_max), metric)?;
    let mut table = Table::new(["gamma_c", "min_gap", "ep_pairs", "class", "symmetry_residual"]);
    table.push(vec![
        Cell::Float(loc.gamma_c),
        Cell::Float(loc.min_gap),
        Cell::from(loc.report.ep_pairs().count()),
        Cell::from(class_name(loc.report.classification)),
        Cell::Float(loc.report.symmetry_residual),
    ])?;
    emit(&table, &a.common, &meta("ep-locate", echo))
}

fn classify(a: ClassifyEpArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let mut table = Table::new(["L", "q", "class", "gamma_c", "gamma1"]);
    for &l in &a.l {
        let q = a.q.unwrap_or_else(|| central_site(l));
        let c = classify_ep_structure(l, q)?;
        let (name, gc, g1) = match c.structure {
            EpStructure::AllPaired { gamma_c } => ("all-paired-ep", gamma_c, f64::NAN),
            EpStructure::ExtraEp { gamma_c, gamma1 } => ("extra-ep", gamma_c, gamma1),
            EpStructure::ThirdOrder { gamma_c } => ("third-order-ep", gamma_c, f64::NAN),
            EpStructure::NoEp => ("no-ep", f64::NAN, f64::NAN),
        };
        table.push(vec![Cell::from(l), Cell::from(q), Cell::from(name), Cell::Float(gc), Cell::Float(g1)])?;
    }
    emit(&table, &a.common, &meta("classify-ep", echo))
}

fn profiles(a: ProfilesArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let l = a.geometry.l;
    let indices = (!a.indices.is_empty()).then_some(a.indices.as_slice());
    let dump = dump_eigenstate_profiles(l, site(&a.geometry), a.gamma, indices)?;
    let mut cols: Vec<String> =
        ["index", "re_lambda", "im_lambda", "participation", "nodes"].iter().map(|s| s.to_string()).collect();
    cols.extend((1..=l).map(|j| format!("occ_{j}")));
    let mut table = Table::new(cols);
    for i in 0..dump.indices.len() {
        let lam = dump.eigenvalues[i];
        let mut row = vec![
            Cell::from(dump.indices[i]),
            Cell::Float(lam.re),
            Cell::Float(lam.im),
            Cell::Float(dump.participation[i]),
            Cell::from(dump.nodes[i]),
        ];
        row.extend(dump.profiles[i].iter().map(|&p| Cell::Float(p)));
        table.push(row)?;
    }
    emit(&table, &a.common, &meta("profiles", echo))
}

fn continuum(a: ContinuumArgs) -> Result<()> {
    let cfg = a.common.config.clone();
    let (a, echo) = resolve(a, cfg.as_deref())?;
    let k = wavevector(&a.k)?;
    let cp = ContinuumParams { hbar: a.hbar, mass: a.mass };
    let mut table = Table::new(["gamma", "k", "R", "T", "A"]);
    for g in gamma_values(&a.grid)? {
        let (r, t, ab) = continuum_rta(&cp, g, k)?;
        table.push([g, k, r, t, ab].map(Cell::Float).to_vec())?;
    }
    emit(&table, &a.common, &meta("continuum", echo))
}
