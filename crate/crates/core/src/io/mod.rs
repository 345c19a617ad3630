//! Tensor container files and PPM video frames.

pub mod container;
pub mod ppm;

pub use container::{
    decode, encode, read_container, read_mask, read_real, write_container, write_mask, write_real,
    Dtype, TensorData,
};
pub use ppm::{export_ppm_dir, import_ppm_dir};
