use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use super::config::{OutputFormat, RunConfig, DEFAULT_SWEEP_STEPS};
use crate::bate::{self, BateDistribution, BOUNDING_SET_LABEL, QUANTILE_RULE};
use crate::delta_star::{self, DeltaStarReport};
use crate::error::{Error, Result};
use crate::grid::{self, Region};
use crate::identified_sets::{self, IdentifiedSets};
use crate::model_inputs::{simulate_dgp, summarize, RegressionSummary};
use crate::{fmt_human, fmt_machine};

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(dir.join(name))
}

fn with_file(dir: &Path, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
    let mut w = create(dir, name)?;
    f(&mut w)?;
    w.flush()?;
    Ok(dir.join(name))
}

fn opt_human(v: Option<f64>) -> String {
    v.map(fmt_human).unwrap_or_else(|| "NA".into())
}

/// `fit`: summary statistics from a CSV.
pub fn cmd_fit(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let s = summarize(&cfg.dataset()?)?;
    let path = write_json(&cfg.out_dir(), "summary.json", &s)?;
    writeln!(out, "beta_short  se_short  r2_short  beta_int  se_int  r2_int")?;
    writeln!(
        out,
        "{}  {}  {}  {}  {}  {}",
        fmt_human(s.beta_short),
        opt_human(s.se_short),
        fmt_human(s.r2_short),
        fmt_human(s.beta_int),
        opt_human(s.se_int),
        fmt_human(s.r2_int)
    )?;
    writeln!(out, "(classical standard errors)")?;
    Ok(vec![path])
}

/// `bounds`: bias field, contour matrix and quantile tables for every box.
pub fn cmd_bounds(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let started = Instant::now();
    let s = cfg.resolve_summary()?;
    let dir = cfg.out_dir();
    let step = cfg.step();
    let boxes = cfg.box_specs()?.iter().map(|b| b.resolve(&s, step)).collect::<Result<Vec<_>>>()?;

    let mut written = vec![write_json(&dir, "summary.json", &s)?];
    let mut dists: Vec<(String, BateDistribution)> = Vec::new();
    let mut box_records = Vec::new();
    for (k, bx) in boxes.iter().enumerate() {
        let label = format!("Box {}", k + 1);
        let t0 = Instant::now();
        let field = grid::run(&s, bx)?;
        let dist = if cfg.strict { bate::distribution_strict(&field, &s)? } else { bate::distribution(&field, &s)? };
        let runtime = t0.elapsed().as_secs_f64();
        written.push(with_file(&dir, &format!("field_box{}.csv", k + 1), |w| field.write_long_csv(w))?);
        written.push(with_file(&dir, &format!("contour_box{}.csv", k + 1), |w| field.write_contour_csv(w))?);

        let in_box: Vec<_> = field.in_box().collect();
        let warnings = field.continuity_warnings();
        box_records.push(json!({
            "label": label,
            "box": bx,
            "case_used": field.case_used,
            "extension": field.extension,
            "cells": in_box.len(),
            "urr": field.count_in_box(Region::Urr),
            "nurr": field.count_in_box(Region::Nurr),
            "flags": {
                "multiplicity": in_box.iter().filter(|c| !c.multiplicity_ok).count(),
                "ambiguous": in_box.iter().filter(|c| c.ambiguous).count(),
                "shifted": in_box.iter().filter(|c| c.shifted).count(),
            },
            "continuity_warnings": warnings,
            "bounding_set": dist.bounding_set,
            "contains_zero": dist.contains_zero,
            "strict": dist.strict,
            "runtime_secs": runtime,
        }));
        dists.push((label, dist));
    }

    let entries: Vec<(String, &BateDistribution)> = dists.iter().map(|(l, d)| (l.clone(), d)).collect();
    let rows = bate::quantile_rows(&entries);
    if cfg.wants(OutputFormat::Csv) {
        written.push(with_file(&dir, "quantiles.csv", |w| bate::write_quantile_csv(&rows, w, false))?);
    }
    if cfg.wants(OutputFormat::Json) {
        written.push(write_json(
            &dir,
            "quantiles.json",
            &json!({
                "quantile_rule": QUANTILE_RULE,
                "rows": rows,
            }),
        )?);
    }
    written.push(write_json(
        &dir,
        "manifest.json",
        &json!({
            "summary": s,
            "step": step,
            "strict": cfg.strict,
            "quantile_rule": QUANTILE_RULE,
            "boxes": box_records,
            "runtime_secs": started.elapsed().as_secs_f64(),
        }),
    )?);

    bate::write_quantile_csv(&rows, &mut *out, true)?;
    for (label, d) in &dists {
        writeln!(out, "{label}: {BOUNDING_SET_LABEL} = {} (contains zero: {})", d.bounding_set, d.contains_zero)?;
        if let Some(st) = &d.strict {
            writeln!(out, "{label}: excluding {} flagged cells = {}", st.excluded, st.bounding_set)?;
        }
    }
    Ok(written)
}

fn delta_star_rows(s: &RegressionSummary, rmax: &[f64]) -> Vec<(String, DeltaStarReport)> {
    let p = delta_star::profile(s);
    rmax.iter().map(|&r| (format!("rmax={}", fmt_human(r)), delta_star::report(&p, r))).collect()
}

/// `delta-star`: the zero-effect diagnostic at each requested `R_max`.
pub fn cmd_delta_star(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let s = cfg.resolve_summary()?;
    let rmax = cfg.require_rmax()?;
    let dir = cfg.out_dir();
    let profile = delta_star::profile(&s);
    let rows = delta_star_rows(&s, rmax);
    let checks: Vec<_> = rmax.iter().map(|&r| delta_star::zero_effect_consistency(&s, r).ok()).collect();

    let mut written = Vec::new();
    if cfg.wants(OutputFormat::Csv) {
        written.push(with_file(&dir, "delta_star.csv", |w| delta_star::write_report_csv(&rows, w, false))?);
    }
    if cfg.wants(OutputFormat::Json) {
        let reports: Vec<&DeltaStarReport> = rows.iter().map(|(_, r)| r).collect();
        written.push(write_json(
            &dir,
            "delta_star.json",
            &json!({
                "profile": profile,
                "reports": reports,
                "zero_effect_checks": checks,
            }),
        )?);
    }
    delta_star::write_report_csv(&rows, &mut *out, true)?;
    Ok(written)
}

/// `id-sets`: equal-selection identified sets, composed with the delta* columns.
pub fn cmd_id_sets(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let s = cfg.resolve_summary()?;
    let rmax = cfg.require_rmax()?;
    let dir = cfg.out_dir();
    let sets: Vec<(String, IdentifiedSets)> = rmax
        .iter()
        .map(|&r| Ok((format!("rmax={}", fmt_human(r)), identified_sets::identified_sets(&s, r)?)))
        .collect::<Result<_>>()?;
    let stars = delta_star_rows(&s, rmax);

    let table = |w: &mut dyn Write, human: bool| -> Result<()> {
        let fmt = if human { fmt_human } else { fmt_machine };
        let iv = |i: &crate::bate::Interval| format!("[{},{}]", fmt(i.lo), fmt(i.hi));
        let mut c = csv::Writer::from_writer(w);
        c.write_record(["rmax", "D", "id_set_1", "id_set_2", "delta_star", "discont", "slope"])?;
        for ((_, set), (_, star)) in sets.iter().zip(&stars) {
            c.write_record([
                fmt(set.rmax),
                fmt(set.discriminant_d),
                iv(&set.set1),
                set.set2.as_ref().map(iv).unwrap_or_else(|| "NA".into()),
                star.delta_star.map(fmt).unwrap_or_else(|| "NA".into()),
                if star.discontinuity { "TRUE" } else { "FALSE" }.into(),
                star.slope.label().into(),
            ])?;
        }
        c.flush()?;
        Ok(())
    };

    let mut written = Vec::new();
    if cfg.wants(OutputFormat::Csv) {
        written.push(with_file(&dir, "id_sets.csv", |w| identified_sets::write_csv(&sets, w, false))?);
        written.push(with_file(&dir, "sets_and_delta_star.csv", |w| table(w, false))?);
    }
    if cfg.wants(OutputFormat::Json) {
        let body: Vec<_> = sets
            .iter()
            .zip(&stars)
            .map(|((_, set), (_, star))| json!({ "identified_sets": set, "delta_star": star }))
            .collect();
        written.push(write_json(&dir, "id_sets.json", &body)?);
    }
    table(out, true)?;
    for (_, set) in &sets {
        if set.conclusions_differ {
            writeln!(out, "rmax={}: the two sets disagree on whether zero is excluded", fmt_human(set.rmax))?;
        }
    }
    Ok(written)
}

/// `simulate`: a synthetic CSV and its analytic truth.
pub fn cmd_simulate(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let mut spec =
        cfg.dgp.clone().ok_or_else(|| Error::Config("simulate needs --dgp or a `dgp` config entry".into()))?;
    if let Some(seed) = cfg.seed {
        spec.seed = seed;
    }
    let (data, truth) = simulate_dgp(&spec)?;
    let dir = cfg.out_dir();
    let written = vec![
        with_file(&dir, "data.csv", |w| data.write_csv(w))?,
        write_json(&dir, "truth.json", &json!({ "spec": spec, "truth": truth }))?,
    ];
    writeln!(
        out,
        "n = {}, beta = {}, nu = {}, delta = {}, R_max = {}",
        spec.n,
        fmt_human(truth.beta),
        fmt_human(truth.nu),
        fmt_human(truth.delta),
        fmt_human(truth.rmax)
    )?;
    Ok(written)
}

/// `sweep`: quantiles of the first box at several step sizes.
pub fn cmd_sweep(cfg: &RunConfig, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let s = cfg.resolve_summary()?;
    let spec = cfg.box_specs()?[0];
    let steps: Vec<f64> = if cfg.steps.is_empty() { DEFAULT_SWEEP_STEPS.to_vec() } else { cfg.steps.clone() };
    let bx = spec.resolve(&s, steps[0])?;
    let rows = bate::step_size_sweep(&s, &bx, &steps)?;
    let dir = cfg.out_dir();
    let mut written = Vec::new();
    if cfg.wants(OutputFormat::Csv) {
        written.push(with_file(&dir, "sweep.csv", |w| bate::write_sweep_csv(&rows, w))?);
    }
    if cfg.wants(OutputFormat::Json) {
        written.push(write_json(&dir, "sweep.json", &json!({ "box": bx, "rows": rows }))?);
    }
    writeln!(out, "step      time(s)  2.5%    5%      50%     95%     97.5%")?;
    for r in &rows {
        let q = r.beta_star_quantiles.values().map(fmt_human).join("  ");
        writeln!(out, "{:<8.4}  {:<7.3}  {q}", r.step, r.runtime_secs)?;
    }
    Ok(written)
}
