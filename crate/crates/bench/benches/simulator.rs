use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use tagflow::bench::chain_of_diamonds;
use tagflow::{CoefficientMode, Simulator};

fn diamonds(c: &mut Criterion) {
    let mut group = c.benchmark_group("chain_of_diamonds_step");
    for arcs in [100, 500, 2000] {
        let net = chain_of_diamonds(arcs, 25).unwrap();
        let mut sim = Simulator::new(&net, CoefficientMode::Static).unwrap();
        let mut state = sim.init_state();
        let dt = sim.stable_dt(0.5).unwrap();
        group.throughput(Throughput::Elements(net.total_cells() as u64));
        group.bench_with_input(BenchmarkId::from_parameter(arcs), &arcs, |b, _| {
            b.iter(|| sim.step(&mut state, dt).unwrap())
        });
    }
    group.finish();
}

fn roundabout(c: &mut Criterion) {
    let net = tagflow_bench::roundabout(50);
    let mut sim = Simulator::new(&net, CoefficientMode::Dynamic).unwrap();
    let mut state = sim.init_state();
    let dt = sim.stable_dt(0.5).unwrap();
    c.bench_function("roundabout_step_50_cells", |b| b.iter(|| sim.step(&mut state, dt).unwrap()));
}

criterion_group!(benches, diamonds, roundabout);
criterion_main!(benches);
