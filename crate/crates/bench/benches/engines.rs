//! Per-step cost of the return engines and the environments.
//!
//! The point of comparison: the iterative recursion is O(m) per step, the
//! incremental engine O(1) amortized, and the eligibility-trace baseline
//! O(|visited states|) per step.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use ttd_core::env::{
    car_quantizer, car_step, cartpole_quantizer, cartpole_step, CarAction, CarGeometry, CarState,
    CartPoleAction, CartPoleParams, CartPoleState,
};
use ttd_core::{
    boltzmann_select, choose_m, ttd_return_iterative, ExperienceBuffer, ExperienceRecord,
    IncrementalEngine, TdConfig, TraceTable,
};

fn random_buffer(rng: &mut StdRng, m: usize) -> ExperienceBuffer {
    let mut buffer = ExperienceBuffer::new(m);
    for _ in 0..m {
        buffer.push(ExperienceRecord::new(
            0,
            0,
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ));
    }
    buffer
}

fn bench_return_engines(c: &mut Criterion) {
    let mut group = c.benchmark_group("return_per_step");
    for &m in &[5usize, 25, 200] {
        let config = TdConfig::incremental(0.95, 0.9, m).unwrap();
        let mut rng = StdRng::seed_from_u64(1);
        let mut buffer = random_buffer(&mut rng, m);

        group.bench_with_input(BenchmarkId::new("iterative", m), &m, |b, _| {
            b.iter(|| {
                let departing = *buffer.oldest().unwrap();
                buffer.push(ExperienceRecord::new(
                    0,
                    0,
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ));
                black_box(departing.reward);
                black_box(ttd_return_iterative(&buffer, &config).unwrap())
            })
        });

        let mut engine_rng = StdRng::seed_from_u64(2);
        let mut engine_buffer = random_buffer(&mut engine_rng, m);
        let mut engine = IncrementalEngine::new(&config, 1000).unwrap();
        engine.prime(&engine_buffer, &config).unwrap();
        group.bench_with_input(BenchmarkId::new("incremental", m), &m, |b, _| {
            b.iter(|| {
                let departing = *engine_buffer.oldest().unwrap();
                engine_buffer.push(ExperienceRecord::new(
                    0,
                    0,
                    engine_rng.random_range(-1.0..1.0),
                    engine_rng.random_range(-1.0..1.0),
                ));
                black_box(engine.advance(&departing, &engine_buffer, &config).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_trace_baseline(c: &mut Criterion) {
    let mut group = c.benchmark_group("traces_per_step");
    for &states in &[162usize, 1260] {
        let config = TdConfig::iterative(0.95, 0.9, 1).unwrap();
        let mut traces = TraceTable::new();
        for s in 0..states as u32 {
            traces.visit(s, &config);
        }
        let mut next = 0u32;
        group.bench_with_input(BenchmarkId::new("visit", states), &states, |b, _| {
            b.iter(|| {
                traces.visit(next % states as u32, &config);
                next = next.wrapping_add(1);
                black_box(traces.len())
            })
        });
    }
    group.finish();
}

fn bench_policy(c: &mut Criterion) {
    let mut rng = StdRng::seed_from_u64(3);
    let merits3 = [0.4, -0.2, 0.1];
    c.bench_function("boltzmann_select_3", |b| {
        b.iter(|| black_box(boltzmann_select(&merits3, 0.02, &mut rng).unwrap()))
    });
}

fn bench_environments(c: &mut Criterion) {
    let geometry = CarGeometry::default();
    let quantizer = car_quantizer();
    let mut state = CarState::INITIAL;
    let mut rng = StdRng::seed_from_u64(4);
    c.bench_function("car_step_quantize", |b| {
        b.iter(|| {
            let action = CarAction::from_index(rng.random_range(0..3)).unwrap();
            match car_step(&state, action, &geometry) {
                Ok(out) if out.terminal == ttd_core::env::Terminal::None => {
                    state = out.next_state
                }
                _ => state = CarState::INITIAL,
            }
            black_box(quantizer.quantize(&[state.x, state.y, state.theta]))
        })
    });

    let params = CartPoleParams::default();
    let pole_quant = cartpole_quantizer();
    let mut pole = CartPoleState::START;
    c.bench_function("cartpole_step_quantize", |b| {
        b.iter(|| {
            let action = CartPoleAction::from_index(rng.random_range(0..2)).unwrap();
            match cartpole_step(&pole, action, &params) {
                Ok(out) if out.terminal == ttd_core::env::Terminal::None => {
                    pole = out.next_state
                }
                _ => pole = CartPoleState::START,
            }
            black_box(pole_quant.quantize(&[pole.x, pole.x_dot, pole.theta, pole.theta_dot]))
        })
    });
}

fn bench_choose_m(c: &mut Criterion) {
    c.bench_function("choose_m_0.99", |b| b.iter(|| black_box(choose_m(black_box(0.99)).unwrap())));
}

criterion_group!(
    benches,
    bench_return_engines,
    bench_trace_baseline,
    bench_policy,
    bench_environments,
    bench_choose_m
);
criterion_main!(benches);
