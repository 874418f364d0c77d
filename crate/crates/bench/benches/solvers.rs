use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spanforge::adversary::{adv_minimax, MinimaxOptions};
use spanforge::formula::index_to_bits;
use spanforge::span::{compose_formula, witness, Objective};
use spanforge::spectra::{biadjacency, build_nand_tree, spectral_report};
use spanforge::sweep::balanced_andor;
use spanforge::GateSpec;

fn witness_solves(c: &mut Criterion) {
    let mut group = c.benchmark_group("witness");
    for n in [4, 8, 16] {
        let formula = balanced_andor(n).unwrap();
        let composed = compose_formula(&formula).unwrap();
        let x = composed
            .input_from_vars(&index_to_bits(0b1010_0110_1100_0011 % (1 << n), n))
            .unwrap();
        for objective in [Objective::Size, Objective::Full] {
            let id = BenchmarkId::new(format!("{objective:?}"), n);
            group.bench_with_input(id, &x, |b, x| {
                b.iter(|| {
                    witness(
                        composed.program(),
                        black_box(x),
                        composed.input_costs(),
                        objective,
                    )
                    .unwrap()
                })
            });
        }
    }
    group.finish();
}

fn composition(c: &mut Criterion) {
    let formula = balanced_andor(16).unwrap();
    c.bench_function("compose/balanced16", |b| {
        b.iter(|| compose_formula(black_box(&formula)).unwrap())
    });
}

fn minimax(c: &mut Criterion) {
    let options = MinimaxOptions::default();
    let mut group = c.benchmark_group("minimax");
    group.sample_size(10);
    group.bench_function("maj3", |b| {
        b.iter(|| adv_minimax(&GateSpec::maj3(), &[1.0, 1.5, 2.0], &options).unwrap())
    });
    group.bench_function("and2", |b| {
        b.iter(|| adv_minimax(&GateSpec::and(2), &[1.0, 2.0], &options).unwrap())
    });
    group.finish();
}

fn spectra(c: &mut Criterion) {
    let formula = balanced_andor(16).unwrap();
    let composed = compose_formula(&formula).unwrap();
    let graph = biadjacency(composed.program());
    let adjacency = graph.adjacency();
    c.bench_function("spectrum/program16", |b| {
        b.iter(|| spectral_report(black_box(&adjacency), None))
    });
    let tree = build_nand_tree(&formula, &[true; 16], None).unwrap();
    c.bench_function("spectrum/nand16", |b| {
        b.iter(|| spectral_report(black_box(tree.adjacency()), None))
    });
}

criterion_group!(benches, witness_solves, composition, minimax, spectra);
criterion_main!(benches);
