use std::io::Write;

use eigencond::critical::exact_critical_energies;
use eigencond::models;
use eigencond::sampler::{
    bin_weights, nested_sampling_with, RecordLine, RunSummary, StopReason, Tail, WeightedSample,
};
use eigencond::statespace::DENSE_LIMIT;
use rayon::prelude::*;
use serde::Serialize;

use super::Context;
use crate::config::Tails;
use crate::error::{CliError, CliResult};
use crate::manifest::{Run, RunStatus};

#[derive(Serialize)]
struct Line<'a> {
    chain: usize,
    tail: Tail,
    #[serde(flatten)]
    record: &'a RecordLine,
}

#[derive(Serialize)]
struct UnitSummary {
    chain: usize,
    tail: Tail,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<RunSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize)]
struct Summary {
    #[serde(rename = "V")]
    sites: usize,
    dim: usize,
    width: f64,
    eps_c_minus: Option<f64>,
    eps_c_plus: Option<f64>,
    bins: usize,
    /// ε of bins holding samples from both tails.
    pooled_bins: Vec<f64>,
    partial: bool,
    units: Vec<UnitSummary>,
}

struct UnitOutput {
    chain: usize,
    tail: Tail,
    lines: Vec<RecordLine>,
    samples: Vec<WeightedSample>,
    result: eigencond::Result<RunSummary>,
}

pub fn run(ctx: &Context) -> CliResult<()> {
    let spec = ctx.config.model()?.clone();
    let mut section = ctx.config.sampler.clone();
    if let Some(seed) = ctx.seed {
        section.seed = seed;
    }
    if section.chains == 0 {
        return Err(CliError::Config("sampler.chains must be positive".into()));
    }
    let cfg = section.sampler_config(spec.sites);
    cfg.validate()?;

    let mut h = models::build(&spec)?;
    if h.dim() <= DENSE_LIMIT {
        h = h.to_eigenbasis()?;
    }
    let reflected = h.reflected();
    let width = h.width();

    let mut run = Run::begin(
        &ctx.out,
        "sample",
        Some(spec.clone()),
        serde_json::to_value(&section).map_err(eigencond::Error::from)?,
        vec![section.seed],
    )?;

    let tails: &[Tail] = match section.tails {
        Tails::Both => &[Tail::Lower, Tail::Upper],
        Tails::Lower => &[Tail::Lower],
        Tails::Upper => &[Tail::Upper],
    };
    let units: Vec<(usize, Tail)> = (0..section.chains)
        .flat_map(|c| tails.iter().map(move |&t| (c, t)))
        .collect();
    let outputs: Vec<UnitOutput> = units
        .par_iter()
        .map(|&(chain, tail)| {
            let (op, unit) = match tail {
                Tail::Lower => (&h, 2 * chain as u64),
                Tail::Upper => (&reflected, 2 * chain as u64 + 1),
            };
            let mut lines = Vec::new();
            let mut samples = Vec::new();
            let result = nested_sampling_with(op, &cfg, unit, Some(&ctx.stop), &mut |r| {
                lines.push(r.line());
                samples.push(WeightedSample::from_record(r, tail, width));
                Ok(())
            });
            UnitOutput {
                chain,
                tail,
                lines,
                samples,
                result,
            }
        })
        .collect();

    {
        let mut w = run.create("records.ndjson")?;
        for u in &outputs {
            for record in &u.lines {
                eigencond::io::write_ndjson(
                    &mut w,
                    &Line {
                        chain: u.chain,
                        tail: u.tail,
                        record,
                    },
                )?;
            }
        }
        w.flush().map_err(|e| CliError::io(run.path("records.ndjson"), e))?;
    }

    let samples: Vec<WeightedSample> = outputs.iter().flat_map(|u| u.samples.iter().copied()).collect();
    let mut pooled_bins = Vec::new();
    let mut n_bins = 0;
    if !samples.is_empty() {
        let bins = bin_weights(&samples, spec.sites, section.bin_width)?;
        let mut w = run.create("bins.csv")?;
        bins.write_csv(&mut w)?;
        w.flush().map_err(|e| CliError::io(run.path("bins.csv"), e))?;
        n_bins = bins.counts.len();
        pooled_bins = bins
            .bin_centers
            .iter()
            .zip(&bins.pooled)
            .filter(|(_, &p)| p)
            .map(|(&c, _)| c)
            .collect();
    }

    let (eps_c_minus, eps_c_plus) = match h.dim() <= DENSE_LIMIT {
        true => {
            let (m, p) = exact_critical_energies(h.spectrum()?)?;
            (Some(m / spec.sites as f64), Some(p / spec.sites as f64))
        }
        false => (None, None),
    };
    let first_error = outputs
        .iter()
        .find_map(|u| u.result.as_ref().err().map(|e| e.to_string()));
    let interrupted = outputs
        .iter()
        .any(|u| matches!(&u.result, Ok(s) if s.stop == StopReason::Interrupted));
    let summary = Summary {
        sites: spec.sites,
        dim: h.dim(),
        width,
        eps_c_minus,
        eps_c_plus,
        bins: n_bins,
        pooled_bins,
        partial: first_error.is_some() || interrupted,
        units: outputs
            .iter()
            .map(|u| UnitSummary {
                chain: u.chain,
                tail: u.tail,
                summary: u.result.as_ref().ok().copied(),
                error: u.result.as_ref().err().map(|e| e.to_string()),
            })
            .collect(),
    };
    {
        let mut w = run.create("summary.json")?;
        serde_json::to_writer_pretty(&mut w, &summary).map_err(eigencond::Error::from)?;
        writeln!(w).map_err(|e| CliError::io(run.path("summary.json"), e))?;
    }

    if let Some(msg) = first_error {
        run.finish(RunStatus::Failed, Some(msg))?;
        let err = outputs.into_iter().find_map(|u| u.result.err()).unwrap();
        return Err(err.into());
    }
    if interrupted {
        run.finish(RunStatus::Interrupted, None)?;
        return Err(CliError::Interrupted);
    }
    run.finish(RunStatus::Complete, None)?;
    eprintln!(
        "sampled {} records into {} bins ({})",
        samples.len(),
        n_bins,
        ctx.out.display()
    );
    Ok(())
}
