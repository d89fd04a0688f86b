use std::io::Write;
use std::sync::atomic::Ordering;

use eigencond::critical::{
    critical_report, default_method, stochastic_critical_energy_adaptive, CriticalEnergyReport,
    CriticalMethod,
};
use eigencond::models::{self, ModelSpec};
use eigencond::stats::{mean, std_dev};
use rayon::prelude::*;

use super::Context;
use crate::config::sizes_or;
use crate::error::{CliError, CliResult};
use crate::manifest::Run;

fn fmt_opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map_or_else(String::new, |v| v.to_string())
}

fn report_for(ctx: &Context, spec: &ModelSpec, method: Option<CriticalMethod>) -> CliResult<CriticalEnergyReport> {
    let section = &ctx.config.critical;
    let mut opts = section.stochastic_options();
    if let Some(seed) = ctx.seed {
        opts.seed = seed;
    }
    let chosen = method.unwrap_or_else(|| default_method(spec));
    match (chosen, section.target_rel_stderr) {
        (CriticalMethod::StochasticTrace, Some(target)) => {
            let h = models::build(spec)?;
            Ok(stochastic_critical_energy_adaptive(&h, &opts, target, section.max_probes)?)
        }
        _ => Ok(critical_report(spec, Some(chosen), &opts)?),
    }
}

fn distribution(ctx: &Context, run: &mut Run, spec: &ModelSpec, sizes: &[usize]) -> CliResult<()> {
    let seeds = &ctx.config.critical.seeds;
    let method = ctx.method.or(ctx.config.critical.method);
    let mut dist = run.create("critical-distribution.csv")?;
    let mut stats = run.create("critical-stats.csv")?;
    let io = |e| CliError::io("critical-distribution.csv", e);
    writeln!(dist, "V,seed,eps_c_minus,eps_c_plus").map_err(io)?;
    writeln!(stats, "V,samples,mean_eps_c_minus,std_eps_c_minus").map_err(io)?;
    for &v in sizes {
        if ctx.stop.load(Ordering::Relaxed) {
            return Err(CliError::Interrupted);
        }
        let mut s = spec.clone();
        s.sites = v;
        let reports: Vec<CriticalEnergyReport> = seeds
            .par_iter()
            .map(|&seed| report_for(ctx, &s.clone().with_seed(seed), method))
            .collect::<CliResult<_>>()?;
        for (seed, r) in seeds.iter().zip(&reports) {
            writeln!(dist, "{v},{seed},{:e},{:e}", r.eps_c_minus, r.eps_c_plus).map_err(io)?;
        }
        let ec: Vec<f64> = reports.iter().map(|r| r.eps_c_minus).collect();
        writeln!(stats, "{v},{},{:e},{:e}", ec.len(), mean(&ec), std_dev(&ec)).map_err(io)?;
        eprintln!("V={v}: ε_c− = {:.6} ± {:.6} over {} seeds", mean(&ec), std_dev(&ec), ec.len());
    }
    dist.flush().map_err(io)?;
    stats.flush().map_err(io)?;
    Ok(())
}

fn per_size(ctx: &Context, run: &mut Run, spec: &ModelSpec, sizes: &[usize]) -> CliResult<()> {
    let forced = ctx.method.or(ctx.config.critical.method);
    let mut rows = Vec::new();
    for &v in sizes {
        if ctx.stop.load(Ordering::Relaxed) {
            return Err(CliError::Interrupted);
        }
        let mut s = spec.clone();
        s.sites = v;
        let report = report_for(ctx, &s, forced)?;
        let name = format!("critical-V{v}.json");
        let mut w = run.create(&name)?;
        serde_json::to_writer_pretty(&mut w, &report).map_err(eigencond::Error::from)?;
        writeln!(w).map_err(|e| CliError::io(run.path(&name), e))?;

        // cross-check a forced stochastic estimate against the deterministic default
        let default = default_method(&s);
        let reference = if report.method == CriticalMethod::StochasticTrace
            && matches!(default, CriticalMethod::FreeFermion | CriticalMethod::ExactSum)
        {
            let r = report_for(ctx, &s, Some(default))?;
            let z = |a: f64, b: f64, se: Option<f64>| se.map(|se| (a - b) / se);
            let zm = z(report.eps_c_minus, r.eps_c_minus, report.stderr);
            let zp = z(report.eps_c_plus, r.eps_c_plus, report.stderr_plus);
            let worst = zm.unwrap_or(0.0).abs().max(zp.unwrap_or(0.0).abs());
            eprintln!(
                "V={v}: stochastic vs {:?}: {:.2} standard errors{}",
                default,
                worst,
                if worst > 3.0 { " (exceeds 3)" } else { "" }
            );
            Some(r)
        } else {
            None
        };
        eprintln!(
            "V={v}: ε_c− = {:.8}, ε_c+ = {:.8} ({:?})",
            report.eps_c_minus, report.eps_c_plus, report.method
        );
        rows.push((report, reference));
    }
    let mut w = run.create("critical.csv")?;
    let io = |e| CliError::io("critical.csv", e);
    writeln!(
        w,
        "method,model,V,eps_c_minus,eps_c_plus,stderr,stderr_plus,m,reference_method,reference_eps_c_minus,reference_eps_c_plus"
    )
    .map_err(io)?;
    for (r, reference) in &rows {
        let method = serde_json::to_value(r.method).map_err(eigencond::Error::from)?;
        let ref_method = reference
            .as_ref()
            .map(|x| serde_json::to_value(x.method).map(|m| m.as_str().unwrap_or("").to_string()))
            .transpose()
            .map_err(eigencond::Error::from)?;
        writeln!(
            w,
            "{},{},{},{:e},{:e},{},{},{},{},{},{}",
            method.as_str().unwrap_or(""),
            r.model,
            r.sites,
            r.eps_c_minus,
            r.eps_c_plus,
            fmt_opt(r.stderr),
            fmt_opt(r.stderr_plus),
            fmt_opt(r.m),
            ref_method.unwrap_or_default(),
            fmt_opt(reference.as_ref().map(|x| x.eps_c_minus)),
            fmt_opt(reference.as_ref().map(|x| x.eps_c_plus)),
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(())
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let spec = ctx.config.model()?.clone();
    let section = &ctx.config.critical;
    let sizes = sizes_or(&section.sizes, &spec);
    let random_run = !section.seeds.is_empty();
    if random_run && !spec.family.is_random() {
        return Err(CliError::Config(format!(
            "critical.seeds needs a random-matrix family, got `{}`",
            spec.family.entry().name
        )));
    }
    let mut params = serde_json::to_value(section).map_err(eigencond::Error::from)?;
    if let Some(m) = ctx.method {
        params["method"] = serde_json::to_value(m).map_err(eigencond::Error::from)?;
    }
    let mut seeds = vec![ctx.seed.unwrap_or(section.seed)];
    seeds.extend(&section.seeds);
    let mut run = Run::begin(&ctx.out, "critical", Some(spec.clone()), params, seeds)?;
    let result = if random_run {
        distribution(ctx, &mut run, &spec, &sizes)
    } else {
        per_size(ctx, &mut run, &spec, &sizes)
    };
    super::close(run, result)
}
