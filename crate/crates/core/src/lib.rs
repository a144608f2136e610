pub mod classify;
pub mod dsp;
pub mod features;
pub mod iq;
pub mod manifest;
pub mod simulate;
pub mod pipeline;
