//! Experiment runners, method registry, file formats and CSV reporting.
//!
//! All runners are deterministic in their seed: every trial draws from its
//! own RNG stream (see [`crate::synth::stream_rng`]) and trials run in
//! parallel with an ordered collect.

mod data;
mod methods;
mod pipeline;
mod records;
mod sensitivity;
mod sfm;

pub use data::{
    format_cameras, format_correspondences, format_points, parse_cameras, parse_correspondences, parse_points,
    read_cameras, read_correspondences, read_points, write_cameras, write_correspondences, write_points,
    CorrespondenceSet, Observation,
};
pub use methods::{parse_methods, Method};
pub use pipeline::{
    estimate_cameras, reconstruct, triangulate_tracks, EstimatedCameras, Reconstruction, MIN_PAIR_CORRESPONDENCES,
};
pub use records::{
    read_csv, sort_records, summarize, write_csv, write_csv_to, ErrorKind, Summary, TrialRecord, CSV_HEADER,
};
pub use sensitivity::{run_sensitivity, SensitivityConfig};
pub use sfm::{run_sfm_real, run_sfm_synth, synth_trial_set, SfmRealConfig, SfmSynthConfig};
