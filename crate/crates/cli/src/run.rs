//! Command implementations. Each returns an [`Outcome`] held in memory;
//! nothing touches the filesystem until the caller writes it out.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::time::Instant;

use splitflow::formulas::{
    asymmetry_index, generate, instance_seeds, reflection_symmetric, verify_aps_splitting,
    verify_splitting, FamilyKind, Instance, SplittingReport, DEFAULT_SCALE,
};
use splitflow::mode_model::{
    aps_vs_continuation, aps_vs_swapped, projection_difference_report, random_block_path,
    split_and_reduce, CappedCylinder, ReductionSetup, TangentialSpectrum, DEFAULT_ORDER,
    LARGE_SINGULAR_VALUE, SWEEP_ORDERS,
};
use splitflow::operator_lab::{Mat2, OperatorFamily};
use splitflow::symplectic::{maslov_crossing, maslov_unitary, random, SymplecticSpace};
use splitflow::{Error, HalfInteger, Result};

use crate::config::{Command, Experiment, FamilyName, Kind, Settings};

/// Singular values compared in the stabilisation check.
const STABLE_J: usize = 8;
/// Allowed relative change of those between the last two orders.
const STABLE_REL: f64 = 0.05;

/// Everything a run produces, before it is written anywhere.
pub struct Outcome {
    pub passed: bool,
    pub report: Value,
    /// `(file name, contents)`, all deterministic in the seed.
    pub tables: Vec<(String, Vec<u8>)>,
    /// Wall-clock seconds per instance; kept apart from the tables because
    /// they differ between runs.
    pub timings: Vec<(usize, f64)>,
}

/// One instance of a batch run.
#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub instance: usize,
    pub seed: u64,
    /// Seed of the accepted family, for family-based verifications.
    pub family_seed: Option<u64>,
    /// `name=value` terms separated by `;`.
    pub terms: String,
    pub residual: Option<HalfInteger>,
    pub rejections: usize,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn run(exp: &Experiment) -> Result<Outcome> {
    match exp.command {
        Command::Split | Command::ApsSplit => single_split(exp),
        Command::Asymmetry => asymmetry(exp),
        Command::ApsCompare => aps_compare(exp),
        Command::Maslov | Command::Reduce | Command::Sweep => batch(exp),
    }
}

fn terms(pairs: &[(&str, HalfInteger)]) -> String {
    pairs
        .iter()
        .map(|(n, v)| format!("{n}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn family(name: FamilyName, seed: Option<u64>) -> Result<OperatorFamily> {
    let seeded = || {
        let seed = seed.expect("validated: random families carry a seed");
        ChaCha8Rng::seed_from_u64(seed)
    };
    match name {
        FamilyName::Ramp => OperatorFamily::ramp(),
        FamilyName::Zero => OperatorFamily::constant(Mat2::zeros()),
        FamilyName::RandomTrig => OperatorFamily::random_trig(&mut seeded(), 1.5),
        FamilyName::Mirrored => {
            reflection_symmetric(&OperatorFamily::random_trig(&mut seeded(), 1.0)?)
        }
        FamilyName::Random | FamilyName::RandomLoop => {
            unreachable!("drawn through the instance generator")
        }
    }
}

fn splitting(s: &Settings, aps: bool, fam: &OperatorFamily) -> Result<SplittingReport> {
    if aps {
        verify_aps_splitting(fam, s.zero_rule(), s.convention())
    } else {
        verify_splitting(fam, s.convention())
    }
}

/// The splitting identity holds, and for a loop family with spectral
/// boundary conditions both corrections vanish.
fn splitting_passes(r: &SplittingReport, is_loop: bool) -> bool {
    r.holds() && !(is_loop && (!r.hormander_minus.is_zero() || !r.hormander_plus.is_zero()))
}

fn split_instance(
    s: &Settings,
    aps: bool,
    id: usize,
    seed: u64,
    kind: FamilyKind,
) -> Result<Instance<SplittingReport>> {
    generate(id, seed, kind, |fam| {
        let r = splitting(s, aps, fam)?;
        let stretch = r.near_zero_stretch;
        Ok((r, stretch))
    })
}

fn single_split(exp: &Experiment) -> Result<Outcome> {
    let s = &exp.settings;
    let aps = exp.command == Command::ApsSplit;
    let name = s.family.expect("validated");
    let (report, is_loop, family_seed, rejections) = match name {
        FamilyName::Random | FamilyName::RandomLoop => {
            let kind = if name == FamilyName::Random {
                FamilyKind::Piecewise
            } else {
                FamilyKind::Loop
            };
            let inst = split_instance(s, aps, 0, s.seed.expect("validated"), kind)?;
            (
                inst.result,
                kind == FamilyKind::Loop,
                Some(inst.seed),
                inst.rejections,
            )
        }
        _ => (
            splitting(s, aps, &family(name, s.seed)?)?,
            name == FamilyName::Zero,
            None,
            vec![],
        ),
    };
    let passed = splitting_passes(&report, is_loop);
    Ok(Outcome {
        passed,
        report: json!({
            "family_seed": family_seed,
            "rejections": rejections,
            "loop": is_loop,
            "result": report,
        }),
        tables: vec![],
        timings: vec![],
    })
}

fn asymmetry(exp: &Experiment) -> Result<Outcome> {
    let s = &exp.settings;
    let name = s.family.expect("validated");
    let fam = match name {
        FamilyName::Random | FamilyName::RandomLoop => {
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed.expect("validated"));
            OperatorFamily::random_piecewise(
                &mut rng,
                name == FamilyName::RandomLoop,
                DEFAULT_SCALE,
            )?
        }
        _ => family(name, s.seed)?,
    };
    let r = asymmetry_index(&fam, s.t.unwrap_or(0.0), s.zero_rule(), s.convention())?;
    let mut passed = r.path_independent();
    if let Some(d) = &r.decomposition {
        passed &= d.consistent();
    }
    if r.symmetric() {
        passed &= r.value.is_zero();
        passed &= r.certificate.as_ref().is_some_and(|c| c.vanishes());
    }
    Ok(Outcome {
        passed,
        report: json!({ "symmetric": r.symmetric(), "result": r }),
        tables: vec![],
        timings: vec![],
    })
}

fn spectrum(s: &Settings) -> Result<TangentialSpectrum> {
    match &s.spectrum {
        Some(p) => TangentialSpectrum::load(p),
        None => TangentialSpectrum::linear(s.order.unwrap_or(DEFAULT_ORDER), s.n0.unwrap_or(1)),
    }
}

fn csv_bytes<F>(write: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut Vec<u8>) -> Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn aps_compare(exp: &Experiment) -> Result<Outcome> {
    let s = &exp.settings;
    let spec = spectrum(s)?;
    let orders = s.orders.clone().unwrap_or_else(|| SWEEP_ORDERS.to_vec());
    let cyl = CappedCylinder {
        seed: s.seed.unwrap_or(0),
        ..CappedCylinder::default()
    };
    let table = projection_difference_report(|k| aps_vs_continuation(&spec, &cyl, k), &orders)?;
    let f: BTreeSet<usize> = s.f_pairs.iter().flatten().copied().collect();
    let swapped = projection_difference_report(|k| aps_vs_swapped(&spec, &f, k), &orders)?;
    let stable = table.stabilizes(STABLE_J, STABLE_REL);
    let rank_ok = swapped.rank_at_most(2 * f.len());
    let summary: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "K": r.k,
                "norm": r.norm(),
                "large": r.count_above(LARGE_SINGULAR_VALUE),
                "leading": r.singular_values.iter().take(STABLE_J).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Outcome {
        passed: stable && rank_ok,
        report: json!({
            "orders": orders,
            "stabilizes": stable,
            "relative_changes": table.last_relative_changes(STABLE_J),
            "rows": summary,
            "f_pairs": f,
            "rank_bound": 2 * f.len(),
            "rank_bound_holds": rank_ok,
        }),
        tables: vec![
            ("decay.csv".into(), csv_bytes(|b| table.write_csv(b))?),
            (
                "decay_finite_rank.csv".into(),
                csv_bytes(|b| swapped.write_csv(b))?,
            ),
        ],
        timings: vec![],
    })
}

fn maslov_row(s: &Settings, id: usize, seed: u64) -> Result<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Dimensions 2, 4, 6, 8 in turn unless fixed; every fourth path a loop.
    let n = s.dim.map(|d| d / 2).unwrap_or(1 + id % 4);
    let space = SymplecticSpace::standard(n);
    let is_loop = id % 4 == 3;
    let path = if is_loop {
        random::smooth_loop(&mut rng, &space)?
    } else {
        random::smooth_path(&mut rng, &space, s.scale.unwrap_or(2.5))?
    };
    let reference = random::lagrangian(&mut rng, &space)?;
    let c = maslov_crossing(&path, &reference, s.convention())?;
    let u = maslov_unitary(&path, &reference, s.convention())?;
    Ok(Row {
        instance: id,
        seed,
        family_seed: None,
        terms: format!(
            "dim={};loop={};{}",
            2 * n,
            is_loop,
            terms(&[("crossing", c.value), ("unitary", u.value)])
        ),
        residual: Some(c.value - u.value),
        rejections: 0,
        passed: c.value == u.value,
        error: None,
    })
}

fn reduce_row(s: &Settings, setup: &ReductionSetup, id: usize, seed: u64) -> Result<Row> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let path = random_block_path(&mut rng, setup, s.scale.unwrap_or(3.0))?;
    let r = split_and_reduce(setup, &path, s.convention())?;
    Ok(Row {
        instance: id,
        seed,
        family_seed: None,
        terms: terms(&[("before", r.before.value), ("after", r.after.value)]),
        residual: Some(r.before.value - r.after.value),
        rejections: 0,
        passed: r.agrees(),
        error: None,
    })
}

fn split_row(s: &Settings, aps: bool, id: usize, seed: u64) -> Result<Row> {
    let kind = match s.kind.unwrap_or(Kind::Mixed) {
        Kind::Piecewise => FamilyKind::Piecewise,
        Kind::Loop => FamilyKind::Loop,
        Kind::Mixed => FamilyKind::Mixed,
    };
    let is_loop = match kind {
        FamilyKind::Piecewise => false,
        FamilyKind::Loop => true,
        FamilyKind::Mixed => id % 2 == 1,
    };
    let inst = split_instance(s, aps, id, seed, kind)?;
    let r = &inst.result;
    let mut t = vec![
        ("sf_total", r.sf_total),
        ("sf_minus", r.sf_minus),
        ("sf_plus", r.sf_plus),
        ("maslov_minus", r.maslov_minus),
        ("maslov_plus", r.maslov_plus),
    ];
    if aps {
        t.extend([
            ("hormander_minus", r.hormander_minus),
            ("hormander_plus", r.hormander_plus),
        ]);
    }
    Ok(Row {
        instance: id,
        seed,
        family_seed: Some(inst.seed),
        terms: format!("loop={is_loop};{}", terms(&t)),
        residual: Some(r.residual),
        rejections: inst.rejections.len(),
        passed: splitting_passes(r, is_loop),
        error: None,
    })
}

fn failed_row(id: usize, seed: u64, e: &Error) -> Row {
    Row {
        instance: id,
        seed,
        family_seed: None,
        terms: String::new(),
        residual: None,
        rejections: 0,
        passed: false,
        error: Some(e.to_string()),
    }
}

fn rows_csv(rows: &[Row]) -> Result<Vec<u8>> {
    let io = |e: csv::Error| Error::InvalidInput(format!("writing CSV: {e}"));
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "instance",
        "seed",
        "family_seed",
        "terms",
        "residual",
        "rejections",
        "status",
    ])
    .map_err(io)?;
    for r in rows {
        let status = match (&r.error, r.passed) {
            (Some(e), _) => format!("error: {e}"),
            (None, true) => "pass".into(),
            (None, false) => "fail".into(),
        };
        w.write_record([
            r.instance.to_string(),
            r.seed.to_string(),
            r.family_seed.map(|s| s.to_string()).unwrap_or_default(),
            r.terms.clone(),
            r.residual.map(|v| v.to_string()).unwrap_or_default(),
            r.rejections.to_string(),
            status,
        ])
        .map_err(io)?;
    }
    w.into_inner()
        .map_err(|e| Error::InvalidInput(format!("writing CSV: {e}")))
}

/// Runs `count` seeded instances concurrently. A failing instance is
/// recorded and the rest still run.
fn batch(exp: &Experiment) -> Result<Outcome> {
    let s = &exp.settings;
    let base = exp.base();
    let count = s.count.unwrap_or(match base {
        Command::Split | Command::ApsSplit => 50,
        _ => 100,
    });
    let setup = match base {
        Command::Reduce => Some(ReductionSetup::new(spectrum(s)?)),
        _ => None,
    };
    let seeds = instance_seeds(s.seed.expect("validated"), count);
    let results: Vec<(Row, f64)> = seeds
        .par_iter()
        .enumerate()
        .map(|(id, &seed)| {
            let start = Instant::now();
            let row = match base {
                Command::Maslov => maslov_row(s, id, seed),
                Command::Reduce => reduce_row(s, setup.as_ref().expect("built above"), id, seed),
                Command::Split => split_row(s, false, id, seed),
                Command::ApsSplit => split_row(s, true, id, seed),
                _ => unreachable!("not a batch verification"),
            };
            let row = row.unwrap_or_else(|e| failed_row(id, seed, &e));
            (row, start.elapsed().as_secs_f64())
        })
        .collect();
    let timings = results.iter().map(|(r, t)| (r.instance, *t)).collect();
    let rows: Vec<Row> = results.into_iter().map(|(r, _)| r).collect();
    let failures: Vec<usize> = rows
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.instance)
        .collect();
    let rejections: usize = rows.iter().map(|r| r.rejections).sum();
    let table = match base {
        Command::Maslov => "paths.csv",
        Command::Reduce => "reductions.csv",
        _ => "instances.csv",
    };
    Ok(Outcome {
        passed: failures.is_empty(),
        report: json!({
            "verification": base.name(),
            "instances": rows.len(),
            "failures": failures,
            "rejections": rejections,
            "rejection_rate": rejections as f64 / (rejections + rows.len()) as f64,
            "table": table,
        }),
        tables: vec![(table.into(), rows_csv(&rows)?)],
        timings,
    })
}
