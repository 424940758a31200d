//! Figure reproduction, parameter sweeps and dataset output.

pub mod dataset;
pub mod emit;
pub mod figures;
pub mod sweep;
pub mod trajectory;

pub use dataset::{Axes, Axis, Dataset, Provenance, Series};
pub use emit::{emit, render, OutputFormat};
pub use figures::{reproduce_figure, FigureId, FigureOverrides, FigureSetup};
pub use sweep::{sweep, Metric, SweepParameter, SweepSpec};
pub use trajectory::{trajectory, TrajectoryRow};
