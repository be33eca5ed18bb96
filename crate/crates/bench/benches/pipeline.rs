use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use preattr::attribution::{attribute_closest, attribute_closest_pair, embed_quotes};
use preattr::forest::{fit_forest, ForestParams};
use preattr::{EmbeddingProvider, FeatureExtractor, HashEmbedder};
use preattr_bench::{corpus, texts};

fn features(c: &mut Criterion) {
    let corpus = corpus();
    let texts = texts(&corpus);
    let extractor = FeatureExtractor::fit(&texts).unwrap();
    c.bench_function("extract_features/500", |b| b.iter(|| extractor.extract_all(black_box(&texts))));
    c.bench_function("fit_ngrams/500", |b| b.iter(|| FeatureExtractor::fit(black_box(&texts)).unwrap()));
}

fn forest(c: &mut Criterion) {
    let corpus = corpus();
    let texts = texts(&corpus);
    let extractor = FeatureExtractor::fit(&texts).unwrap();
    let rows = extractor.extract_all(&texts);
    let labels = corpus.corpus.labels();
    let params = ForestParams::default();
    let mut group = c.benchmark_group("forest");
    group.sample_size(10);
    group.bench_function("fit/100x500", |b| b.iter(|| fit_forest(black_box(&rows), &labels, &params).unwrap()));
    let model = fit_forest(&rows, &labels, &params).unwrap();
    group.bench_function("predict/500", |b| b.iter(|| model.predict_all(black_box(&rows)).unwrap()));
    group.finish();
}

fn attribution(c: &mut Criterion) {
    let corpus = corpus();
    let embedder = HashEmbedder::new();
    let sample = &corpus.samples[0];
    let quotes = embed_quotes(&sample.quotes, &embedder).unwrap();
    let sentence = embedder.embed(&sample.answers[0][0].text).unwrap();
    c.bench_function("embed/hash", |b| b.iter(|| embedder.embed(black_box(&sample.quotes[0].text)).unwrap()));
    c.bench_function("closest/5", |b| b.iter(|| attribute_closest(black_box(&sentence), &quotes).unwrap()));
    c.bench_function("closest_pair/5", |b| b.iter(|| attribute_closest_pair(black_box(&sentence), &quotes).unwrap()));
}

criterion_group!(benches, features, forest, attribution);
criterion_main!(benches);
