pub mod critical;
pub mod ensemble;
pub mod sample;

use std::path::PathBuf;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use eigencond::critical::{exact_critical_energies, CriticalMethod};
use eigencond::ensemble::ensemble_point;
use eigencond::freefermion::jordan_wigner_spectrum;
use eigencond::models::{self, ModelSpec, CATALOG};
use eigencond::sampler::{nested_sampling, SamplerConfig};
use eigencond::statespace::{DegeneracyPolicy, Spectrum};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::manifest::{Run, RunStatus};

pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub method: Option<CriticalMethod>,
    pub stop: Arc<AtomicBool>,
}

/// Finalizes the manifest according to `result`.
pub fn close(run: Run, result: CliResult<()>) -> CliResult<()> {
    match result {
        Ok(()) => {
            run.finish(RunStatus::Complete, None)?;
            Ok(())
        }
        Err(CliError::Interrupted) => {
            run.finish(RunStatus::Interrupted, None)?;
            Err(CliError::Interrupted)
        }
        Err(e) => {
            run.finish(RunStatus::Failed, Some(e.to_string()))?;
            Err(e)
        }
    }
}

pub fn models_list() {
    for e in CATALOG {
        let params: Vec<String> = e
            .params
            .iter()
            .map(|(name, default)| match default {
                Some(d) => format!("{name}={d}"),
                None => format!("{name} (required)"),
            })
            .collect();
        println!("{:<13} {}", e.name, e.description);
        if !params.is_empty() {
            println!("{:<13} params: {}", "", params.join(", "));
        }
    }
}

fn check(name: &str, f: impl FnOnce() -> eigencond::Result<bool>) -> bool {
    let ok = matches!(f(), Ok(true));
    println!("{} {name}", if ok { "PASS" } else { "FAIL" });
    ok
}

/// Fast end-to-end sanity checks of the numerical core.
pub fn selftest() -> CliResult<()> {
    let mut ok = true;
    ok &= check("critical energy of the four-level spectrum is 18/11", || {
        let s = Spectrum::from_energies(1, &[0.0, 1.0, 2.0, 3.0], DegeneracyPolicy::Tolerance)?;
        let (m, _) = exact_critical_energies(&s)?;
        Ok((m - 18.0 / 11.0).abs() < 1e-14)
    });
    ok &= check("Jordan-Wigner spectrum matches exact diagonalization", || {
        let ff = jordan_wigner_spectrum(6, 1.0, 0.8)?;
        let mut a = ff.many_body_energies();
        let h = models::build(&ModelSpec::tfim1d(6, 0.8))?;
        let mut b = h.spectrum()?.energies.clone();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        Ok(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9))
    });
    ok &= check("free-fermion partition function matches the direct sum", || {
        let ff = jordan_wigner_spectrum(6, 1.0, 1.7)?;
        let s = Spectrum::from_energies(6, &ff.many_body_energies(), DegeneracyPolicy::Tolerance)?;
        let mut good = true;
        for beta in [1e-3, 1.0, 1e3] {
            let direct = ensemble_point(&s, beta)?;
            good &= (ff.stable_z(beta)? / direct.z - 1.0).abs() < 1e-9;
        }
        Ok(good)
    });
    ok &= check("nested sampling thresholds decrease", || {
        let h = models::build(&ModelSpec::tfim1d(4, 1.0))?.to_eigenbasis()?;
        let cfg = SamplerConfig {
            max_iterations: 50,
            ns_moves: 2,
            path_length: 4.0,
            ..Default::default()
        };
        let rec = nested_sampling(&h, &cfg)?;
        Ok(rec.windows(2).all(|w| w[1].e_star < w[0].e_star))
    });
    if ok {
        Ok(())
    } else {
        Err(CliError::Numerical(eigencond::Error::Invariant("selftest failed".into())))
    }
}
