use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use omv_core::parallel::{available_jobs, with_jobs};
use omv_core::search::{check_entailment, find_model, Bounds};
use omv_core::suite::builtin_theory;

fn searches(c: &mut Criterion) {
    // One worker takes the sequential path; two or more go through rayon.
    let mut jobs = vec![1];
    if cfg!(feature = "parallel") {
        jobs.push(available_jobs().max(2));
    }
    let mut group = c.benchmark_group("search");
    group.sample_size(10);

    let cases: [(&str, &str, Option<&str>, Bounds); 4] = [
        ("scott_find_model", "scott_kb_possibilist", None, Bounds::new(2, 1)),
        ("scott_mc_d2", "scott_kb_actualist", Some("MC"), Bounds::new(2, 2)),
        ("simplified_theorem3", "simplified_k", Some("THEOREM3"), Bounds::new(2, 2)),
        ("godel_unsat", "godel_kb_possibilist", None, Bounds::new(2, 2)),
    ];
    for (name, id, conjecture, bounds) in cases {
        let theory = builtin_theory(id).unwrap();
        for &n in &jobs {
            group.bench_with_input(BenchmarkId::new(name, format!("{n}-jobs")), &n, |b, &n| {
                b.iter(|| {
                    with_jobs(n, || match conjecture {
                        Some(c) => black_box(check_entailment(&theory, c, &bounds).unwrap()),
                        None => black_box(find_model(&theory, &bounds).unwrap()),
                    })
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, searches);
criterion_main!(benches);
