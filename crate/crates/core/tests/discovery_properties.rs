use miscon::discover::{
    cluster_metrics, distance, k_distances, select_epsilon, tsne, Normalizers, TedMatrix, TsneConfig,
};
use miscon::Ast;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cloud(seed: u64, n: usize) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)]).collect()
}

proptest! {
    #[test]
    fn epsilon_scales_with_the_data(seed in any::<u64>(), n in 6usize..40, s in 0.01f64..100.0) {
        let pts = cloud(seed, n);
        let scaled: Vec<[f64; 2]> = pts.iter().map(|p| [p[0] * s, p[1] * s]).collect();
        let (a, b) = (select_epsilon(&pts, 3).unwrap(), select_epsilon(&scaled, 3).unwrap());
        prop_assert_eq!(a.knee_index, b.knee_index);
        prop_assert!((b.epsilon - s * a.epsilon).abs() <= 1e-9 * s * a.epsilon.max(1e-12));
    }

    #[test]
    fn kl_is_finite_and_non_negative(seed in 0u64..1000, n in 5usize..25) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let cfg = TsneConfig { iterations: 300, seed, ..TsneConfig::default() };
        let proj = tsne(&pts, &cfg).unwrap();
        prop_assert!(!proj.kl_log.is_empty());
        for &(_, kl) in &proj.kl_log {
            prop_assert!(kl.is_finite() && kl >= 0.0);
        }
        prop_assert!(proj.coords.iter().all(|c| c[0].is_finite() && c[1].is_finite()));
    }

    #[test]
    fn cluster_metrics_ignore_member_order(seed in any::<u64>(), shift in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let srcs: Vec<String> = (0..8)
            .map(|_| (0..rng.random_range(1..5)).map(|_| format!("move {}", rng.random_range(1..4))).collect::<Vec<_>>().join(" "))
            .collect();
        let asts: Vec<Ast> = srcs.iter().map(|s| miscon::turtlelang::parse(s).unwrap()).collect();
        let teds = TedMatrix::compute(&asts.iter().collect::<Vec<_>>());
        let emb: Vec<Vec<f64>> = (0..8).map(|_| (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let coords: Vec<Vec<f64>> = (0..8).map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect();
        let all: Vec<usize> = (0..8).collect();
        let norm = Normalizers::compute(&emb, &teds, &coords, &all);
        let members = vec![1, 3, 4, 6, 7, 0];
        let k = shift % members.len();
        let rotated: Vec<usize> = members[k..].iter().chain(&members[..k]).copied().collect();
        let (a, b) = (cluster_metrics(&members, &emb, &coords, &teds, &norm), cluster_metrics(&rotated, &emb, &coords, &teds, &norm));
        prop_assert!((a.ed - b.ed).abs() < 1e-12 && (a.ted - b.ted).abs() < 1e-12);
    }
}

#[test]
fn blobs_and_noise_epsilon_separates_them() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut pts = Vec::new();
    for centre in [[0.0, 0.0], [20.0, 0.0]] {
        for _ in 0..30 {
            pts.push([centre[0] + rng.random_range(-1.0..1.0), centre[1] + rng.random_range(-1.0..1.0)]);
        }
    }
    let blob = pts.len();
    for p in [[10.0, 12.0], [-9.0, -11.0], [31.0, 9.0], [10.0, -14.0], [-12.0, 10.0]] {
        pts.push(p);
    }
    let minpts = 4;
    let kd = k_distances(&pts, minpts);
    let max_intra = kd[..blob].iter().copied().fold(0.0, f64::max);
    let to_noise = (blob..pts.len())
        .flat_map(|i| (0..blob).map(move |j| (i, j)))
        .map(|(i, j)| distance(&pts[i], &pts[j]))
        .fold(f64::INFINITY, f64::min);
    let eps = select_epsilon(&pts, minpts).unwrap().epsilon;
    assert!(max_intra <= eps && eps < to_noise, "{max_intra} <= {eps} < {to_noise}");
}
