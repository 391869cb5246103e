use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use socrisk::community::CrossingEdges;
use socrisk::diversity::{Averaging, DiversityOptions};
use socrisk::measures::settlement_measures;
use socrisk::synth::{generate_network, NetworkSpec};
use socrisk::{Exec, SettlementId};

fn bench_measures(c: &mut Criterion) {
    let spec = NetworkSpec {
        n_towns: 60,
        users: (150, 250),
        ..Default::default()
    };
    let net = generate_network(&spec, Exec::Parallel).expect("valid spec");
    let graph = net.graph().expect("consistent network");
    let settlements: Vec<SettlementId> = graph.settlements().to_vec();

    let mut group = c.benchmark_group("settlement_measures");
    group.sample_size(10);
    for (label, exec) in [
        ("parallel", Exec::Parallel),
        ("sequential", Exec::Sequential),
    ] {
        let opts = DiversityOptions {
            seed: 1,
            averaging: Averaging::IncludedOnly,
            exec,
        };
        group.bench_function(label, |b| {
            b.iter(|| {
                settlement_measures(
                    black_box(&graph),
                    &settlements,
                    CrossingEdges::BothGroups,
                    &opts,
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_measures);
criterion_main!(benches);
