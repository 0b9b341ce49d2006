use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use perpot::greens::HeatSum;
use perpot::potentials::{assemble, assemble_heat, OperatorKind};
use perpot::{BoundaryGeometry, CurveShape, HeatRepresentation, KernelFamily, LameParams, UnitCell, WaveParams};

fn points(n: usize, dim: usize) -> Vec<[f64; 3]> {
    // a fixed low-discrepancy set away from the lattice
    (1..=n)
        .map(|i| {
            let f = |a: f64| 0.1 + 0.8 * (i as f64 * a).fract();
            let z = if dim == 3 { f(0.2451223) } else { 0.0 };
            [f(0.7548777), f(0.5698403), z]
        })
        .collect()
}

fn green_evaluation(c: &mut Criterion) {
    let cube = UnitCell::new(&[1.0, 1.0, 1.0]).unwrap();
    let square = UnitCell::new(&[1.0, 1.0]).unwrap();
    let p3 = points(64, 3);
    let p2 = points(64, 2);
    let mut g = c.benchmark_group("green_64_points");

    let lap = KernelFamily::laplace(cube.clone());
    g.bench_function("laplace_3d", |b| b.iter(|| p3.iter().map(|x| lap.laplace_green(black_box(x)).unwrap()).sum::<f64>()));
    let hel = KernelFamily::helmholtz(cube.clone(), WaveParams::real(1.3, [0.2, 0.1, 0.0])).unwrap();
    g.bench_function("helmholtz_3d", |b| b.iter(|| p3.iter().map(|x| hel.helmholtz_green(black_box(x)).unwrap().re).sum::<f64>()));
    let lame = KernelFamily::lame(cube.clone(), LameParams::new(1.0, 3).unwrap()).unwrap();
    g.bench_function("lame_3d", |b| b.iter(|| p3.iter().map(|x| lame.lame_green(black_box(x)).unwrap()[0][1]).sum::<f64>()));
    let lap2 = KernelFamily::laplace(square.clone());
    g.bench_function("laplace_2d", |b| b.iter(|| p2.iter().map(|x| lap2.laplace_green(black_box(x)).unwrap()).sum::<f64>()));
    for rep in [HeatRepresentation::Spatial, HeatRepresentation::Spectral] {
        let sum = HeatSum::new(&square, 0.1, rep).unwrap();
        g.bench_function(format!("heat_2d_{rep:?}").to_lowercase(), |b| {
            b.iter(|| p2.iter().map(|x| sum.eval(black_box(x)).0).sum::<f64>())
        });
    }
    g.finish();
}

fn nystrom_assembly(c: &mut Criterion) {
    let square = UnitCell::new(&[1.0, 1.0]).unwrap();
    let lap = KernelFamily::laplace(square.clone());
    let mut g = c.benchmark_group("assembly");
    g.sample_size(10);
    for n in [64, 128, 256] {
        let curve = BoundaryGeometry::curve(CurveShape::Kite { scale: 0.15 }, [0.5, 0.5, 0.0], n).unwrap();
        g.bench_with_input(BenchmarkId::new("laplace_double_layer_kite", n), &curve, |b, curve| {
            b.iter(|| assemble(&lap, curve, OperatorKind::DoubleLayer).unwrap())
        });
    }
    let cube = UnitCell::new(&[3.0, 3.0, 3.0]).unwrap();
    let hel = KernelFamily::helmholtz(cube, WaveParams::real(0.7, [0.3, 0.0, 0.0])).unwrap();
    for l in [6, 8] {
        let sphere = BoundaryGeometry::sphere([1.5; 3], 1.0, l).unwrap();
        g.bench_with_input(BenchmarkId::new("helmholtz_single_layer_sphere", l), &sphere, |b, s| {
            b.iter(|| assemble(&hel, s, OperatorKind::SingleLayer).unwrap())
        });
    }
    let heat = KernelFamily::heat(square);
    let circle = BoundaryGeometry::curve(CurveShape::Circle { radius: 0.25 }, [0.5, 0.5, 0.0], 64).unwrap();
    for steps in [16, 32] {
        g.bench_with_input(BenchmarkId::new("heat_double_layer_circle64", steps), &steps, |b, &m| {
            b.iter(|| assemble_heat(&heat, &circle, OperatorKind::DoubleLayer, 0.25, m).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, green_evaluation, nystrom_assembly);
criterion_main!(benches);
