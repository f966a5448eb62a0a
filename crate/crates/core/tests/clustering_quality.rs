use tswarp::ingest::{generate_synthetic, Shape, SyntheticSpec};
use tswarp::metrics::adjusted_rand_index;
use tswarp::som::{classify, u_matrix};
use tswarp::{extract_clusters, kmeans_cluster, train, Dataset, KmeansConfig, SomConfig, WindowSpec};

fn dataset(shapes: &[Shape], n_per_cluster: usize, m: usize, noise_frac: f64, seed: u64) -> Dataset {
    let mut spec = SyntheticSpec {
        n_per_cluster,
        length: m,
        shapes: shapes.to_vec(),
        noise_sigma: 0.0,
        seed,
    };
    spec.noise_sigma = noise_frac * spec.template_separation().unwrap_or(1.0);
    generate_synthetic(&spec).unwrap()
}

const THREE: [Shape; 3] = [Shape::Sine, Shape::Ramp, Shape::Square];

#[test]
fn auto_mesh_training_recovers_three_clusters() {
    let d = dataset(&THREE, 30, 64, 0.2, 1);
    let cfg = SomConfig {
        epochs: 100,
        seed: 2,
        ..SomConfig::default()
    };
    let run = train(&d, &cfg).unwrap();
    let labels = extract_clusters(&run, 3, &cfg.window).unwrap();
    let ari = adjusted_rand_index(&labels, &d.label_partition().unwrap()).unwrap();
    assert!(ari >= 0.9, "ARI {ari}");
}

#[test]
fn classify_two_clusters_over_five_seeds() {
    for seed in 0..5 {
        let d = dataset(&[Shape::Sine, Shape::Ramp], 30, 64, 0.2, 10 + seed);
        let cfg = SomConfig {
            epochs: 10,
            seed,
            ..SomConfig::default()
        };
        let p = classify(&d, 2, &cfg).unwrap();
        let ari = adjusted_rand_index(&p, &d.label_partition().unwrap()).unwrap();
        assert!(ari >= 0.9, "seed {seed}: ARI {ari}");
    }
}

#[test]
fn kmeans_three_clusters_over_five_seeds() {
    let passed = (0..5)
        .filter(|&seed| {
            let d = dataset(&THREE, 30, 64, 0.2, 20 + seed);
            let run = kmeans_cluster(
                &d,
                &KmeansConfig {
                    seed,
                    ..KmeansConfig::new(3)
                },
            )
            .unwrap();
            adjusted_rand_index(&run.partition, &d.label_partition().unwrap()).unwrap() >= 0.9
        })
        .count();
    assert!(passed >= 4, "{passed} of 5 seeds reached ARI 0.9");
}

#[test]
fn u_matrix_contrast_grows_with_cluster_structure() {
    let ratio = |d: &Dataset| {
        let cfg = SomConfig {
            epochs: 30,
            seed: 1,
            ..SomConfig::default()
        };
        let run = train(d, &cfg).unwrap();
        let grid = u_matrix(&run.final_mesh, &cfg.window).unwrap();
        assert_eq!(grid.len(), run.final_mesh.side());
        assert!(grid.iter().all(|row| row.len() == run.final_mesh.side()));
        let values: Vec<f64> = grid.into_iter().flatten().collect();
        let max = values.iter().cloned().fold(f64::MIN, f64::max);
        let min = values.iter().cloned().fold(f64::MAX, f64::min);
        max / min.max(1e-12)
    };
    // one shape with low noise
    let single = generate_synthetic(&SyntheticSpec {
        n_per_cluster: 60,
        length: 48,
        shapes: vec![Shape::Sine],
        noise_sigma: 0.05,
        seed: 3,
    })
    .unwrap();
    let three = dataset(&THREE, 20, 48, 0.1, 3);
    let (r1, r3) = (ratio(&single), ratio(&three));
    assert!(r1 < r3, "single-cluster ratio {r1} vs three-cluster {r3}");
}

#[test]
fn zero_window_runs_as_euclidean() {
    let d = dataset(&THREE, 10, 32, 0.1, 4);
    let cfg = SomConfig {
        epochs: 5,
        window: WindowSpec::Fraction(0.0),
        ..SomConfig::default()
    };
    let run = train(&d, &cfg).unwrap();
    assert_eq!(run.bmu_per_series.len(), d.len());
}
