use std::io::Write;
use std::sync::atomic::Ordering;

use eigencond::critical::{exact_critical_energy_minus, free_fermion_spectrum};
use eigencond::ensemble::{
    default_beta_grid, ff_scaling_points, near_degeneracy_curve, scaling_transform,
    write_scaling_csv, EnsembleCurve, NearDegeneracy,
};
use eigencond::models::{self, Family, ModelSpec};
use eigencond::statespace::{DegeneracyPolicy, Spectrum, DENSE_LIMIT};
use serde::Serialize;

use super::Context;
use crate::config::sizes_or;
use crate::error::{CliError, CliResult};
use crate::manifest::Run;

#[derive(Serialize)]
struct SizeSummary {
    #[serde(rename = "V")]
    sites: usize,
    provenance: String,
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    eps_c_minus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    near_degeneracy: Option<NearDegeneracy>,
}

fn free_fermion_capable(spec: &ModelSpec) -> bool {
    matches!(spec.family, Family::Tfim1d | Family::Paramagnet) && free_fermion_spectrum(spec).is_ok()
}

fn spectrum_of(spec: &ModelSpec, policy: DegeneracyPolicy) -> CliResult<Spectrum> {
    if free_fermion_capable(spec) && spec.sites <= 24 {
        let ff = free_fermion_spectrum(spec)?;
        return Ok(Spectrum::from_energies(spec.sites, &ff.many_body_energies(), policy)?);
    }
    let h = models::build(spec)?;
    Ok(h.spectrum()?.clone())
}

fn write_curve(run: &mut Run, name: &str, curve: &EnsembleCurve, ff: bool) -> CliResult<()> {
    let mut w = run.create(name)?;
    if ff {
        curve.write_ff_csv(&mut w)?;
    } else {
        curve.write_csv(&mut w)?;
    }
    w.flush().map_err(|e| CliError::io(run.path(name), e))
}

fn one_size(ctx: &Context, run: &mut Run, spec: &ModelSpec) -> CliResult<SizeSummary> {
    let section = &ctx.config.ensemble;
    let v = spec.sites;
    let n = (v as f64).exp2();
    let betas = section
        .betas
        .clone()
        .unwrap_or_else(|| default_beta_grid(n, section.points));
    let use_ff = free_fermion_capable(spec)
        && (section.free_fermion || n as usize > DENSE_LIMIT && !spec.family.is_random());

    let mut summary = SizeSummary {
        sites: v,
        provenance: String::new(),
        rows: 0,
        eps_c_minus: None,
        near_degeneracy: None,
    };

    if use_ff {
        let ff = free_fermion_spectrum(spec)?;
        let curve = EnsembleCurve::from_free_fermions(&ff, &betas)?;
        curve.check_monotone()?;
        write_curve(run, &format!("ensemble-V{v}.csv"), &curve, true)?;
        summary.provenance = "free-fermion-quadrature".into();
        summary.rows = curve.rows.len();
        summary.eps_c_minus = Some(ff.critical_energy()? / v as f64);
        if section.scaling {
            let pts = ff_scaling_points(&ff, section.eta_max, section.points)?;
            let name = format!("scaling-V{v}.csv");
            let mut w = run.create(&name)?;
            write_scaling_csv(&pts, &mut w)?;
            w.flush().map_err(|e| CliError::io(run.path(&name), e))?;
        }
    } else {
        let spectrum = spectrum_of(spec, spec.policy())?;
        let curve = match &section.betas {
            Some(b) => EnsembleCurve::from_spectrum(&spectrum, b)?,
            None => EnsembleCurve::two_sided(&spectrum, section.points)?,
        };
        curve.check_monotone()?;
        write_curve(run, &format!("ensemble-V{v}.csv"), &curve, false)?;
        let ec = exact_critical_energy_minus(&spectrum)?;
        summary.provenance = "spectral-sum".into();
        summary.rows = curve.rows.len();
        summary.eps_c_minus = Some(ec / v as f64);
        if section.scaling {
            let moments = spectrum.moments(2);
            let positive: Vec<_> = curve.rows.iter().filter(|r| r.beta > 0.0).copied().collect();
            let pts: Vec<_> = scaling_transform(&positive, v, &moments, ec / v as f64)
                .into_iter()
                .filter(|p| p.eta.abs() <= section.eta_max)
                .collect();
            let name = format!("scaling-V{v}.csv");
            let mut w = run.create(&name)?;
            write_scaling_csv(&pts, &mut w)?;
            w.flush().map_err(|e| CliError::io(run.path(&name), e))?;
        }
    }

    if section.near_degeneracy {
        let spectrum = spectrum_of(spec, DegeneracyPolicy::ExactOnly)?;
        let (curve, info) = near_degeneracy_curve(&spectrum, &betas)?;
        curve.check_monotone()?;
        write_curve(run, &format!("near-degeneracy-V{v}.csv"), &curve, false)?;
        eprintln!(
            "V={v}: gap {:.3e}, ε_c1 = {:.4}, ε_c0 = {:.4}",
            info.gap, info.eps_c1, info.eps_c0
        );
        summary.near_degeneracy = Some(info);
    }
    Ok(summary)
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let spec = ctx.config.model()?.clone();
    let section = &ctx.config.ensemble;
    if section.points < 2 {
        return Err(CliError::Config("ensemble.points must be at least 2".into()));
    }
    let sizes = sizes_or(&section.sizes, &spec);
    let mut run = Run::begin(
        &ctx.out,
        "ensemble",
        Some(spec.clone()),
        serde_json::to_value(section).map_err(eigencond::Error::from)?,
        vec![spec.seed],
    )?;
    let result = (|| {
        let mut summaries = Vec::new();
        for &v in &sizes {
            if ctx.stop.load(Ordering::Relaxed) {
                return Err(CliError::Interrupted);
            }
            let mut s = spec.clone();
            s.sites = v;
            let summary = one_size(ctx, &mut run, &s)?;
            eprintln!(
                "V={v}: {} rows ({}), ε_c− = {}",
                summary.rows,
                summary.provenance,
                summary.eps_c_minus.map_or("-".into(), |e| format!("{e:.6}"))
            );
            summaries.push(summary);
        }
        let mut w = run.create("summary.json")?;
        serde_json::to_writer_pretty(&mut w, &summaries).map_err(eigencond::Error::from)?;
        writeln!(w).map_err(|e| CliError::io("summary.json", e))
    })();
    super::close(run, result)
}
