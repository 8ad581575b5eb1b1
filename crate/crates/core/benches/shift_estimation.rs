use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use phasechain::phase::{estimate_batch, estimate_sequence, CorrelationConfig};
use phasechain::synth::{script_to_frames, textured_base, DriveScript};
use phasechain::{Execution, Frame};

const SIZE: usize = 256;
const PAIRS: usize = 24;

fn frames() -> Vec<Frame> {
    let base = textured_base(SIZE, SIZE, 42).unwrap();
    let script = DriveScript::parse("F F F L(3) F F F R(2) F F F F F F F F F F F F F", 42).unwrap();
    let seq = script_to_frames(&script, &base).unwrap();
    assert_eq!(seq.frames.len(), PAIRS + 1);
    seq.frames
}

fn modes() -> [(&'static str, Execution); 2] {
    [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ]
}

fn bench_sequence(c: &mut Criterion) {
    let frames = frames();
    let cfg = CorrelationConfig::default();
    let mut group = c.benchmark_group("estimate_sequence_256");
    group
        .sample_size(10)
        .throughput(Throughput::Elements(PAIRS as u64));
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_sequence(&frames, &cfg, exec).unwrap())
        });
    }
    group.finish();
}

fn bench_batch(c: &mut Criterion) {
    let frames = frames();
    let pairs: Vec<(Frame, Frame)> = frames
        .windows(2)
        .map(|w| (w[0].clone(), w[1].clone()))
        .collect();
    let cfg = CorrelationConfig::default();
    let mut group = c.benchmark_group("estimate_batch_256");
    group
        .sample_size(10)
        .throughput(Throughput::Elements(PAIRS as u64));
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| estimate_batch(&pairs, &cfg, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sequence, bench_batch);
criterion_main!(benches);
