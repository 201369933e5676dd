use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use misty_zc_core::attack::{generate_pairs, Attack, AttackVariant};
use misty_zc_core::MasterKey;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("attack");
    g.sample_size(10);
    for v in [AttackVariant::ToyWithFl, AttackVariant::NoFl] {
        let a = Attack::new(v);
        let params = v.params();
        let key = MasterKey::random(&params, &mut ChaCha8Rng::seed_from_u64(1));
        let pairs = generate_pairs(v, &key, 1 << 14, 2).unwrap();
        let guess = a.right_guess(&key);

        g.bench_function(format!("initial_counters/{v}"), |b| b.iter(|| a.build_initial_counters(black_box(&pairs)).unwrap()));

        let init = a.build_initial_counters(&pairs).unwrap();
        let first = &a.stages()[0];
        let k: Vec<u64> = first.fragments.iter().map(|f| guess.get(&f.name).unwrap()).collect();
        g.bench_function(format!("first_fold/{v}"), |b| {
            b.iter_batched(|| init.clone(), |s| a.partial_sum_fold(&s, &k).unwrap(), BatchSize::LargeInput)
        });
        g.bench_function(format!("evaluate/{v}"), |b| b.iter(|| a.evaluate(&init, black_box(&guess)).unwrap()));
        g.bench_function(format!("naive_oracle/{v}"), |b| b.iter(|| a.naive_parity_oracle(&pairs, black_box(&guess)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, stages);
criterion_main!(benches);
