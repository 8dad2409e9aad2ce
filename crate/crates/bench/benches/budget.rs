use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use thabound_core::budget::{plan_budget, required_isolation, ComponentCatalog, PlanConstraints};
use thabound_core::characterization::{parse_trace, reflectivity_bound};

const TRACE: &str = include_str!("../../core/tests/fixtures/transmitter_trace.csv");

fn planner(c: &mut Criterion) {
    let catalog = ComponentCatalog::default();
    let constraints = PlanConstraints::default();
    let target = required_isolation(1e-6, 1e20, 1e6).unwrap();
    c.bench_function("plan_budget_1MHz", |b| {
        b.iter(|| plan_budget(black_box(target), &catalog, &constraints))
    });
}

fn reflectivity(c: &mut Criterion) {
    c.bench_function("parse_and_bound_trace", |b| {
        b.iter(|| {
            let peaks = parse_trace(black_box(TRACE)).unwrap();
            reflectivity_bound(&peaks, (0.5, 10.0))
        })
    });
}

criterion_group!(benches, planner, reflectivity);
criterion_main!(benches);
