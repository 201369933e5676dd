use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion, Throughput};
use misty_zc_core::{Cipher, CipherParams, MasterKey};

fn encrypt(c: &mut Criterion) {
    let mut g = c.benchmark_group("encrypt");
    g.throughput(Throughput::Elements(1));
    for params in [CipherParams::misty1(), CipherParams::toy()] {
        let key = MasterKey::new(&params, [1, 2, 3, 4, 5, 6, 7, 8].map(|w| w & params.word_mask())).unwrap();
        let name = format!("{:?}", params.variant);
        let block = 0x0123_4567_89ab_cdef_u64 & (u64::MAX >> (64 - params.block_bits()));
        let cipher = Cipher::new(params, &key).unwrap();
        g.bench_function(&name, |b| b.iter(|| cipher.encrypt(black_box(block))));
    }
    g.finish();
}

fn fi(c: &mut Criterion) {
    let p = CipherParams::misty1();
    c.bench_function("fi/misty1", |b| b.iter(|| p.fi(black_box(0x1234), black_box(0xbeef))));
}

criterion_group!(benches, encrypt, fi);
criterion_main!(benches);
