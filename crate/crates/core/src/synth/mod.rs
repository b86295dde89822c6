//! Synthetic radar signatures and their corruption.
//!
//! The pipeline for the simulated datasets is
//! [`gait_trajectory`] → [`radar_returns`] (through a [`ChannelModel`]) →
//! [`spectrogram`] or [`hrrp`] → [`to_db_normalize`] → image stacks, with
//! [`add_noise`], [`add_point_clutter`] and [`shuffle_labels`] producing the
//! corrupt and mismatched training data. [`frontal_phantom`] stands in for
//! measured frontal images.

mod channel;
mod corrupt;
mod dataset;
mod gait;
mod hrrp;
pub mod io;
mod normalize;
mod phantom;
mod returns;
mod stack;
mod stft;

pub use channel::{channel_response, ChannelModel, ChannelRealization, ImageWall, WallClass};
pub use corrupt::{
    add_noise, add_noise_with_reference, add_point_clutter, add_point_clutter_with_reference,
    clutter_sites, gaussian_noise_field, shuffle_labels, shuffle_pixels, ClutterGrid, ClutterSite,
    LabelShuffle,
};
pub use dataset::{generate_pair, DatasetSpec, PairedDataset, SignatureKind};
pub use gait::{gait_trajectory, GaitParams, RadarPosition, ScattererTrack};
pub use hrrp::{hrrp, range_axes, HrrpConfig, RangeProfile};
pub use io::{load_dataset, read_stack, save_dataset, write_stack, StackRole};
pub use normalize::{signal_reference, to_db_normalize, DynamicRange};
pub use phantom::{frontal_phantom, PhantomParams};
pub use returns::{radar_returns, RadarConfig};
pub use stack::{ColumnMeta, ImageStack};
pub use stft::{spectrogram, Spectrogram, StftConfig};
