#![allow(dead_code)]

/// A grid small enough to sweep in well under a second: 12×12 phantoms,
/// 40 columns per dataset.
pub const SMALL: &str = r#"
[dataset]
kinds = ["frontal"]
snr_db = [10.0, 0.0, -10.0]
frontal_size = 12
frontal_subjects = 2
frontal_orientations = 20

[training]
algorithms = ["DAE", "SVD"]
hidden = 20
stacked_sizes = [32, 16, 8]
outer_iterations = 5
ista_iterations = 50

[experiment]
seeds = [0, 1]
timing_passes = 2
"#;

pub fn small() -> rdae_bench::ExperimentConfig {
    rdae_bench::ExperimentConfig::parse(SMALL).expect("small config parses")
}
