//! `spinsync fuzz`: conjecture fuzzing and bit-exact replay of findings.
//!
//! The findings document is JSON. With several workers the trial range is
//! chunked and findings merge by trial index, so the file bytes do not
//! depend on --jobs.

use std::io::Write;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};

use spinsync_core::budget::Budgets;
use spinsync_core::fuzz::{
    evaluate_setwise, evaluate_sp_generalization, fuzz_trial, ConjectureKind, Finding, FuzzCaps,
    TrialOutcome,
};
use spinsync_core::rational::format_ratio;
use spinsync_core::rng::GENERATOR_NAME;

use crate::args::{FuzzArgs, FuzzKind};
use crate::error::CliError;
use crate::modelfile::ModelFile;
use crate::output::Sink;

#[derive(Debug, Serialize, Deserialize)]
pub struct FindingsFile {
    pub kind: String,
    pub seed: u64,
    pub trials: u64,
    pub generator: String,
    pub skipped: u64,
    pub findings: Vec<FindingRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FindingRecord {
    pub trial: u64,
    pub quantity: String,
    pub u: String,
    pub w: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub violated: bool,
    pub model: ModelFile,
}

impl FindingRecord {
    fn from_finding(f: &Finding) -> FindingRecord {
        FindingRecord {
            trial: f.trial,
            quantity: f.quantity.clone(),
            u: f.u.clone(),
            w: f.w.clone(),
            lhs: format_ratio(&f.lhs),
            rhs: format_ratio(&f.rhs),
            violated: true,
            model: ModelFile::from_model(&f.model),
        }
    }
}

pub fn run(a: FuzzArgs) -> Result<(), CliError> {
    if let Some(path) = &a.replay {
        return replay(&a, path);
    }
    let kind = match a.kind.expect("clap enforces kind unless replaying") {
        FuzzKind::SpGeneral => ConjectureKind::SpGeneralization,
        FuzzKind::Setwise => ConjectureKind::Setwise,
    };
    let seed = a.seed.expect("clap enforces seed unless replaying");
    let caps = FuzzCaps::default();
    let budgets = a.budgets.to_budgets();

    let jobs = a.jobs.max(1);
    let mut outcomes: Vec<(u64, TrialOutcome)> = if jobs == 1 {
        (0..a.trials)
            .map(|t| (t, fuzz_trial(kind, seed, t, &caps, &budgets)))
            .collect()
    } else {
        let chunk = a.trials.div_ceil(jobs);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for j in 0..jobs {
                let lo = (j * chunk).min(a.trials);
                let hi = ((j + 1) * chunk).min(a.trials);
                let caps = &caps;
                let budgets = &budgets;
                handles.push(scope.spawn(move || {
                    (lo..hi)
                        .map(|t| (t, fuzz_trial(kind, seed, t, caps, budgets)))
                        .collect::<Vec<_>>()
                }));
            }
            let mut all = Vec::new();
            for h in handles {
                all.extend(h.join().expect("fuzz worker panicked"));
            }
            all
        })
    };
    outcomes.sort_by_key(|(t, _)| *t);

    let mut findings = Vec::new();
    let mut skipped = 0;
    for (_, out) in outcomes {
        match out {
            TrialOutcome::NoViolation => {}
            TrialOutcome::Skipped => skipped += 1,
            TrialOutcome::Violation(f) => findings.push(FindingRecord::from_finding(&f)),
        }
    }
    let file = FindingsFile {
        kind: String::from(kind.name()),
        seed,
        trials: a.trials,
        generator: String::from(GENERATOR_NAME),
        skipped,
        findings,
    };

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    serde_json::to_writer_pretty(&mut sink, &file).map_err(CliError::internal)?;
    writeln!(sink).map_err(CliError::internal)?;
    sink.flush().map_err(CliError::internal)?;
    if !file.findings.is_empty() {
        eprintln!(
            "{} violation(s) found in {} trials; replay with --replay",
            file.findings.len(),
            file.trials
        );
    }
    Ok(())
}

/// Recomputes each stored finding and compares the exact values digit for
/// digit. Any mismatch is a determinism bug and exits nonzero.
fn replay(a: &FuzzArgs, path: &std::path::Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read findings file {}", path.display()))
        .map_err(CliError::Input)?;
    let file: FindingsFile = serde_json::from_str(&text)
        .context("invalid findings JSON")
        .map_err(CliError::Input)?;
    let budgets = a.budgets.to_budgets();

    let mut sink = Sink::create(a.out.out.as_deref()).map_err(CliError::Internal)?;
    let mut all_match = true;
    for rec in &file.findings {
        let model = rec.model.to_model().map_err(CliError::Input)?;
        let wrefs: Vec<&str> = rec.w.iter().map(|s| s.as_str()).collect();
        let (lhs, rhs) = match rec.quantity.as_str() {
            "I2(X_u;X_v|Y) <= path-sum" => {
                evaluate_sp_generalization(&model, &rec.u, wrefs[0], &budgets)
                    .map_err(|e| CliError::input(anyhow!("{e}")))?
            }
            "I2(X_u;X_W|Y) <= sum_w I2(X_u;X_w|Y)" => {
                let ev = evaluate_setwise(&model, &rec.u, &wrefs, &budgets)
                    .map_err(|e| CliError::input(anyhow!("{e}")))?;
                (ev.i2_lhs, ev.i2_rhs)
            }
            "IKL(X_u;X_W|Y) <= sum_w IKL(X_u;X_w|Y)" => {
                let ev = evaluate_setwise(&model, &rec.u, &wrefs, &budgets)
                    .map_err(|e| CliError::input(anyhow!("{e}")))?;
                (ev.kl_lhs_hp, ev.kl_rhs_hp)
            }
            other => {
                return Err(CliError::input(anyhow!("unknown quantity `{other}`")));
            }
        };
        let ok = format_ratio(&lhs) == rec.lhs && format_ratio(&rhs) == rec.rhs;
        all_match &= ok;
        writeln!(
            sink,
            "trial {}: {}",
            rec.trial,
            if ok { "replayed exactly" } else { "MISMATCH" }
        )
        .map_err(CliError::internal)?;
    }
    writeln!(
        sink,
        "replayed {} finding(s): {}",
        file.findings.len(),
        if all_match { "all match" } else { "MISMATCH" }
    )
    .map_err(CliError::internal)?;
    sink.flush().map_err(CliError::internal)?;
    if !all_match {
        return Err(CliError::internal(anyhow!(
            "replay mismatch: stored values are not reproducible"
        )));
    }
    Ok(())
}

/// Shared with tests: run the fuzz command over a trial range, no threads.
pub fn fuzz_to_file_string(
    kind: ConjectureKind,
    trials: u64,
    seed: u64,
    budgets: &Budgets,
) -> String {
    let caps = FuzzCaps::default();
    let mut findings = Vec::new();
    let mut skipped = 0;
    for t in 0..trials {
        match fuzz_trial(kind, seed, t, &caps, budgets) {
            TrialOutcome::NoViolation => {}
            TrialOutcome::Skipped => skipped += 1,
            TrialOutcome::Violation(f) => findings.push(FindingRecord::from_finding(&f)),
        }
    }
    let file = FindingsFile {
        kind: String::from(kind.name()),
        seed,
        trials,
        generator: String::from(GENERATOR_NAME),
        skipped,
        findings,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}
