//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.
mod common;

use std::collections::HashMap;
use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabilizer_learn::dense::{
    bell_distribution, bell_distribution_by_projection, conjugation_label, coset_offset, find_conjugation_set,
    label_index, quadratic_form_extract, StateVector,
};
use stabilizer_learn::f2linalg::in_span;
use stabilizer_learn::learner::{
    learn, spanning_failure_probability, tableau_bell_sample, Backend, CosetAccess, CosetSampler,
};
use stabilizer_learn::{BitVector, PauliString, Phase, StabilizerTableau};

type Outcome = Result<String, String>;

const ROOT_SEED: u64 = 0x5eed;

fn stream(n: usize, trial: u64) -> ChaCha8Rng {
    let mut g = ChaCha8Rng::seed_from_u64(ROOT_SEED);
    g.set_stream(((n as u64) << 32) | trial);
    g
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn bell_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut states = 0;
    for n in 1..=5 {
        let mut g = stream(n, 1_000_000);
        for _ in 0..100 {
            let t = StabilizerTableau::random_state(n, &mut g).unwrap();
            let psi = StateVector::from_tableau(&t).unwrap();
            let formula = bell_distribution(&psi).unwrap();
            let projection = bell_distribution_by_projection(&psi).unwrap();
            let tv = formula.total_variation(&projection);
            worst = worst.max(tv);
            ensure(tv < 1e-9, || format!("n={n}: TV {tv:e}"))?;
            coset_offset(&formula, &t.group_subspace(), 1e-10).map_err(|e| format!("n={n}: {e}"))?;
            states += 1;
        }
    }
    Ok(format!("{states} states, max TV {worst:.1e}, every support a uniform coset"))
}

fn simulation_fidelity() -> Outcome {
    let samples = 100_000;
    let (mut worst_dense, mut worst_coset): (f64, f64) = (0.0, 0.0);
    for n in 1..=4 {
        let mut g = stream(n, 2_000_000);
        for _ in 0..3 {
            let t = StabilizerTableau::random_state(n, &mut g).unwrap();
            let dist = bell_distribution(&StateVector::from_tableau(&t).unwrap()).unwrap();
            let mut tab = vec![0u64; 1 << (2 * n)];
            let mut coset = vec![0u64; 1 << (2 * n)];
            let sampler = CosetSampler::from_state(&t, &mut g);
            for _ in 0..samples {
                tab[label_index(&tableau_bell_sample(&t, &mut g))] += 1;
                coset[label_index(&sampler.sample(&mut g))] += 1;
            }
            let d = dist.total_variation_to_counts(&tab);
            let c = tv_counts(&coset, &tab);
            worst_dense = worst_dense.max(d);
            worst_coset = worst_coset.max(c);
            ensure(d <= 0.02 && c <= 0.02, || format!("n={n}: TV tableau/dense {d:.4}, coset/tableau {c:.4}"))?;
        }
    }
    Ok(format!("max TV tableau vs dense {worst_dense:.4}, coset vs tableau {worst_coset:.4}"))
}

struct TrialStats {
    trials: u64,
    failures: u64,
    bad_copies: u64,
    successes: u64,
    wrong: u64,
}

/// Criteria 3-5 share one pass over the learner.
fn run_learning_trials() -> HashMap<usize, TrialStats> {
    let mut out = HashMap::new();
    for n in 1..=64 {
        let trials: u64 = if (2..=10).contains(&n) { 10_000 } else { 25 };
        let mut stats = TrialStats { trials, failures: 0, bad_copies: 0, successes: 0, wrong: 0 };
        for trial in 0..trials {
            let mut g = stream(n, trial);
            let truth = StabilizerTableau::random_state(n, &mut g).unwrap();
            let mut access = Backend::Tableau.access(&truth, ChaCha8Rng::from_rng(&mut g).unwrap()).unwrap();
            let report = learn(&mut access).unwrap();
            if report.success {
                stats.successes += 1;
                stats.bad_copies += u64::from(report.copies_used != 5 * n + 2);
                stats.wrong += u64::from(!report.tableau.unwrap().same_state(&truth));
            } else {
                stats.failures += 1;
                stats.bad_copies += u64::from(report.copies_used != 4 * n + 2);
            }
        }
        out.insert(n, stats);
    }
    out
}

fn failure_probability(stats: &HashMap<usize, TrialStats>) -> Outcome {
    let mut rows = Vec::new();
    for n in 2..=10 {
        let s = &stats[&n];
        let trials = s.trials as f64;
        let rate = s.failures as f64 / trials;
        let bound = 0.5f64.powi(n as i32);
        let exact = spanning_failure_probability(n, 2 * n);
        let slack = 3.0 * (bound * (1.0 - bound) / trials).sqrt();
        let se = (exact * (1.0 - exact) / trials).sqrt();
        ensure(rate <= bound + slack, || format!("n={n}: rate {rate} above bound {bound} + {slack:.4}"))?;
        ensure((rate - exact).abs() <= 5.0 * se, || format!("n={n}: rate {rate} vs exact {exact:.5} (se {se:.5})"))?;
        rows.push(format!("n={n} {}/{}", s.failures, s.trials));
    }
    Ok(rows.join(", "))
}

fn copy_counts(stats: &HashMap<usize, TrialStats>) -> Outcome {
    let total: u64 = (2..=10).map(|n| stats[&n].trials).sum();
    let bad: u64 = (2..=10).map(|n| stats[&n].bad_copies).sum();
    ensure(bad == 0, || format!("{bad} of {total} trials had the wrong copy count"))?;
    Ok(format!("{total} trials, copies 5n+2 on success and 4n+2 on failure"))
}

fn correctness(stats: &HashMap<usize, TrialStats>) -> Outcome {
    let successes: u64 = stats.values().map(|s| s.successes).sum();
    let wrong: u64 = stats.values().map(|s| s.wrong).sum();
    ensure(successes >= 1000, || format!("only {successes} successful trials"))?;
    ensure(wrong == 0, || format!("{wrong} of {successes} learned states differ from the truth"))?;
    Ok(format!("{successes} successful trials over n=1..64, all canonical forms equal"))
}

fn scaling() -> Outcome {
    let sizes = [(64usize, 40u64), (128, 20), (256, 8), (512, 4)];
    let mut means = Vec::new();
    for &(n, trials) in &sizes {
        let mut total = 0.0;
        for trial in 0..trials {
            let mut g = stream(n, 3_000_000 + trial);
            let truth = StabilizerTableau::random_state(n, &mut g).unwrap();
            let mut access = CosetAccess::new(truth.clone(), ChaCha8Rng::from_rng(&mut g).unwrap());
            let start = Instant::now();
            let report = learn(&mut access).unwrap();
            total += start.elapsed().as_secs_f64();
            ensure(!report.success || report.tableau.unwrap().same_state(&truth), || format!("n={n}: wrong state"))?;
        }
        means.push(total / trials as f64);
    }
    let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
    let at_512 = means[3];
    let table = sizes.iter().zip(&means).map(|((n, _), t)| format!("n={n} {t:.4}s")).collect::<Vec<_>>().join(", ");
    let ratio_text = ratios.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>().join("/");
    ensure(at_512 < 5.0, || format!("n=512 mean {at_512:.3}s ({table})"))?;
    ensure(ratios.iter().all(|&r| r <= 10.0), || format!("ratios {ratio_text} ({table})"))?;
    Ok(format!("{table}; ratios {ratio_text}"))
}

fn conjugation_sets() -> Outcome {
    let mut states = 0;
    for n in 1..=8 {
        let mut g = stream(n, 4_000_000);
        for _ in 0..200 {
            let t = StabilizerTableau::random_state(n, &mut g).unwrap();
            let psi = StateVector::from_tableau(&t).unwrap();
            let set = find_conjugation_set(&psi).map_err(|e| format!("n={n}: {e}"))?;
            let label = conjugation_label(n, &set);
            let basis = t.group_subspace();
            let empirical = tableau_bell_sample(&t, &mut g);
            ensure(in_span(&(&label ^ &empirical), &basis).unwrap(), || {
                format!("n={n}: S={set:?} does not encode the sampled coset")
            })?;
            if n <= 5 {
                let offset = coset_offset(&bell_distribution(&psi).unwrap(), &basis, 1e-10).unwrap();
                ensure(in_span(&(&label ^ &offset), &basis).unwrap(), || format!("n={n}: exact offset mismatch"))?;
            }
            states += 1;
        }
    }
    Ok(format!("{states} states, every S encodes its Bell coset"))
}

fn algebra() -> Outcome {
    let labels = all_labels(3);
    let mut pairs = 0;
    for s in &labels {
        for t in &labels {
            let p = PauliString::new(s.clone(), Phase::ONE).unwrap();
            let q = PauliString::new(t.clone(), Phase::ONE).unwrap();
            let prod = p.multiply(&q).unwrap();
            ensure(prod.bits() == &(s ^ t), || format!("{s}·{t}: label not XOR"))?;
            let dense = matmul(&pauli_matrix(&p), &pauli_matrix(&q));
            ensure(mat_close(&pauli_matrix(&prod), &dense), || format!("{s}·{t}: matrix mismatch"))?;
            pairs += 1;
        }
    }
    let mut g = stream(0, 5_000_000);
    for _ in 0..10_000 {
        let n = g.gen_range(1..=300);
        let a = PauliString::new(BitVector::random(2 * n, &mut g), Phase::from_exponent(g.gen())).unwrap();
        let b = PauliString::new(BitVector::random(2 * n, &mut g), Phase::from_exponent(g.gen())).unwrap();
        ensure(a.multiply(&b).unwrap().bits() == &(a.bits() ^ b.bits()), || format!("XOR rule broken at n={n}"))?;
    }
    Ok(format!("{pairs} pairs match dense products; XOR rule on 10000 random pairs"))
}

fn quadratic_round_trip() -> Outcome {
    let mut worst: f64 = 1.0;
    for n in 1..=8 {
        let mut g = stream(n, 6_000_000);
        for _ in 0..200 {
            let t = StabilizerTableau::random_state(n, &mut g).unwrap();
            let psi = StateVector::from_tableau(&t).unwrap();
            let form = quadratic_form_extract(&psi).map_err(|e| format!("n={n}: {e}"))?;
            let f = form.to_state().unwrap().fidelity(&psi).unwrap();
            worst = worst.min(f);
            ensure(f >= 1.0 - 1e-10, || format!("n={n}: fidelity {f}"))?;
        }
    }
    Ok(format!("1600 states, min fidelity {worst:.12}"))
}

fn main() {
    let mut failed = 0;
    let mut report = |k: usize, name: &str, outcome: Outcome, elapsed: f64| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {k} {name:<22} {tag} [{elapsed:.1}s] {detail}");
    };

    let timed = |f: &dyn Fn() -> Outcome| {
        let start = Instant::now();
        let out = f();
        (out, start.elapsed().as_secs_f64())
    };

    let (o, t) = timed(&bell_equivalence);
    report(1, "bell-equivalence", o, t);
    let (o, t) = timed(&simulation_fidelity);
    report(2, "simulation-fidelity", o, t);

    let start = Instant::now();
    let stats = run_learning_trials();
    let shared = start.elapsed().as_secs_f64();
    report(3, "failure-probability", failure_probability(&stats), shared);
    report(4, "copy-count", copy_counts(&stats), 0.0);
    report(5, "correctness", correctness(&stats), 0.0);

    let (o, t) = timed(&scaling);
    report(6, "scaling", o, t);
    let (o, t) = timed(&conjugation_sets);
    report(7, "conjugation-set", o, t);
    let (o, t) = timed(&algebra);
    report(8, "pauli-algebra", o, t);
    let (o, t) = timed(&quadratic_round_trip);
    report(9, "quadratic-round-trip", o, t);

    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 9 criteria passed");
}
