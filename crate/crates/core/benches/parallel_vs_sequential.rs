use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vicsek::decim::Decimation;
use vicsek::graph::{Capacity, VicsekGraph};
use vicsek::lattice::{build_blowup_tree, OmegaSeq};
use vicsek::{Exec, Params};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn graph_build(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph_build");
    group.sample_size(10);
    for (d, n, m) in [(2, 3, 4), (3, 2, 4)] {
        let p = Params::new(d, n).unwrap();
        for (name, exec) in POLICIES {
            group.bench_with_input(BenchmarkId::new(name, format!("d{d}n{n}m{m}")), &exec, |b, &exec| {
                b.iter(|| VicsekGraph::build(&p, m, Capacity::default(), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn neumann_spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("neumann_spectrum");
    group.sample_size(10);
    for (d, n, m) in [(2, 2, 5), (2, 3, 3)] {
        let p = Params::new(d, n).unwrap();
        for (name, exec) in POLICIES {
            let dec = Decimation::new(p).unwrap().with_exec(exec);
            group.bench_with_input(BenchmarkId::new(name, format!("d{d}n{n}m{m}")), &m, |b, &m| {
                b.iter(|| dec.neumann_spectrum(m).unwrap())
            });
        }
    }
    group.finish();
}

fn blowup_tree(c: &mut Criterion) {
    let mut group = c.benchmark_group("blowup_tree");
    group.sample_size(10);
    let p = Params::new(2, 2).unwrap();
    let w = OmegaSeq::parse(&p, "(1,1)|(2,1),0").unwrap();
    for (name, exec) in POLICIES {
        group.bench_with_input(BenchmarkId::new(name, "d2n2h6"), &exec, |b, &exec| {
            b.iter(|| build_blowup_tree(&p, &w, 6, Capacity::default(), exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, graph_build, neumann_spectrum, blowup_tree);
criterion_main!(benches);
