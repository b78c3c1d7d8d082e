use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sphereconf::laplacian::assemble_cotangent_laplacian;
use sphereconf::mdem::{run_mdem, MdemOptions};
use sphereconf::shapes;
use sphereconf::sparse::SparseCholesky;

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for level in [3, 4, 5] {
        let mesh = shapes::icosphere(level);
        group.bench_with_input(BenchmarkId::from_parameter(mesh.n_vertices()), &mesh, |b, m| {
            b.iter(|| assemble_cotangent_laplacian(m).unwrap())
        });
    }
    group.finish();
}

fn factorization(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor");
    for level in [3, 4, 5] {
        let mesh = shapes::icosphere(level);
        let sys = assemble_cotangent_laplacian(&mesh).unwrap();
        // Drop one vertex so the block is positive definite.
        let keep: Vec<usize> = (1..mesh.n_vertices()).collect();
        let block = sys.matrix().select(&keep, &keep);
        group.bench_with_input(BenchmarkId::from_parameter(mesh.n_vertices()), &block, |b, a| {
            b.iter(|| SparseCholesky::factor(a).unwrap())
        });
    }
    group.finish();
}

fn mdem(c: &mut Criterion) {
    let mut group = c.benchmark_group("mdem");
    group.sample_size(10);
    for level in [3, 4] {
        let mesh = shapes::icosphere(level);
        let options = MdemOptions { certify: false, ..Default::default() };
        group.bench_with_input(BenchmarkId::from_parameter(mesh.n_vertices()), &mesh, |b, m| {
            b.iter(|| run_mdem(m, &options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, factorization, mdem);
criterion_main!(benches);
