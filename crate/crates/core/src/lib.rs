//! Camera trajectories from frame sequences without GPS.
//!
//! Consecutive frames are registered by phase correlation; the horizontal
//! component of each shift drives a four-direction chain code whose forward
//! steps trace a normalized 2D path.
//!
//! ```
//! use phasechain::{chain, phase, synth, Execution};
//!
//! let base = synth::textured_base(64, 64, 7).unwrap();
//! let frames = synth::shifted_sequence(&base, &[(3, 0), (-2, 1)], 0.0, 0).unwrap();
//! let shifts = phase::estimate_sequence(&frames, &Default::default(), Execution::Sequential).unwrap();
//! assert_eq!((shifts[0].dx, shifts[1].dx), (3, -2));
//! let records = chain::fold_chain(&shifts, &Default::default()).unwrap();
//! assert!(records.iter().all(|r| r.mscc == chain::MSCC_FORWARD));
//! ```

pub mod chain;
pub mod error;
pub mod exec;
pub mod fft;
pub mod frame;
pub mod ingest;
pub mod io;
pub mod phase;
pub mod pipeline;
pub mod synth;
pub mod trajectory;

pub use error::{Error, ExitClass, Result};
pub use exec::Execution;
pub use frame::{Frame, WindowKind};
pub use phase::ShiftEstimate;
