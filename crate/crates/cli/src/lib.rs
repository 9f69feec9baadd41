//! Episode orchestration: headless runs with simulated designers, log
//! analysis, and the local HTTP service used by the designer UI.

pub mod analyze;
pub mod headless;
pub mod service;
