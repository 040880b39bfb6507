use super::output::Artifacts;
use super::ExperimentSpec;
use crate::channel::{verify_lemma1, GaussianMixInput};
use crate::error::Result;

pub const CASES: [(f64, f64); 3] = [(3.0, 4.0), (1.0, 1.0), (0.5, 2.0)];
pub const SAMPLES: usize = 1_000_000;

pub(super) fn run_lemma1(spec: &ExperimentSpec, out: &Artifacts) -> Result<Vec<String>> {
    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for (i, &(rho, delta)) in CASES.iter().enumerate() {
        let r = verify_lemma1(&GaussianMixInput {
            rho,
            delta,
            samples: SAMPLES,
            seed: spec.seeds[0].wrapping_add(i as u64),
        })?;
        log::info!(
            "rho={rho} delta={delta}: var {:.4} (expected {}), KS p={:.3}",
            r.variance,
            r.expected_variance,
            r.ks_p_value
        );
        if !r.pass {
            failures.push(format!("lemma check failed for rho={rho} delta={delta}"));
        }
        reports.push(r);
    }
    out.write_json(&spec.out.join("lemma1").join("report.json"), &reports)?;
    Ok(failures)
}
