use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use submax::algorithms::{derive_params_mono_with, mono_fw_run, AdversaryEnv, ObjectiveSequence, ParamOverrides};
use submax::objectives::{make_random_set_objective, SetFamilyKind, SetFamilyParams};
use submax::rounding::pipage_round;
use submax::{
    ConstraintSet, Matroid, MultilinearExtension, OracleBank, OracleSpec, Point, QuadraticDR, Region, SeedTree,
};

fn lmo(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dir: Vec<f64> = (0..64).map(|_| rng.random::<f64>() - 0.5).collect();
    let sets = [
        ("box", ConstraintSet::unit_box(64).unwrap()),
        ("simplex", ConstraintSet::simplex(4.0, 64).unwrap()),
        ("uniform", ConstraintSet::uniform_matroid(8, 64).unwrap()),
    ];
    for (name, set) in sets {
        c.bench_function(&format!("lmo/{name}/d64"), |b| b.iter(|| set.lmo(black_box(&dir)).unwrap()));
    }
}

fn pipage(c: &mut Criterion) {
    let set = ConstraintSet::uniform_matroid(8, 64).unwrap();
    let matroid = Matroid::from_polytope(&set).unwrap();
    let x = vec![8.0 / 64.0; 64];
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    c.bench_function("pipage/uniform8/d64", |b| b.iter(|| pipage_round(black_box(&x), &matroid, &mut rng).unwrap()));
}

fn multilinear(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = SetFamilyParams { ground: 12, universe: 40, clients: 20 };
    let f = make_random_set_objective(SetFamilyKind::Coverage, params, &mut rng).unwrap();
    let ext = MultilinearExtension::new(f);
    let x: Vec<f64> = (0..12).map(|_| rng.random()).collect();
    c.bench_function("multilinear/value/coverage_d12", |b| b.iter(|| ext.multilinear_value(black_box(&x)).unwrap()));
    c.bench_function("multilinear/grad/coverage_d12", |b| b.iter(|| ext.multilinear_grad(black_box(&x)).unwrap()));
}

fn mono_block(c: &mut Criterion) {
    let set = ConstraintSet::uniform_matroid(2, 8).unwrap();
    let plan = derive_params_mono_with(64, &ParamOverrides { k: Some(64), ..Default::default() }).unwrap();
    let seeds = SeedTree::new(4);
    let f = QuadraticDR::random(Point::filled(8, 1.0), 0.5, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    c.bench_function("mono_fw/one_block/K64_d8", |b| {
        b.iter_batched(
            || {
                let env = AdversaryEnv::continuous(ObjectiveSequence::fixed(f.clone(), plan.t_effective), seeds);
                let bank =
                    OracleBank::new(plan.steps, Region::Base(set.clone()), OracleSpec::default(), &seeds).unwrap();
                (env, bank)
            },
            |(mut env, mut bank)| mono_fw_run(&mut env, &set, &mut bank, &plan, &seeds).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, lmo, pipage, multilinear, mono_block);
criterion_main!(benches);
