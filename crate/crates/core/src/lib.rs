//! Bi-objective dwell-time optimization for stepping-source treatment plans.
//!
//! The crate models a simplified planning problem: a patient case holds
//! applicator channels with dwell positions and a set of regions of interest,
//! a dose engine maps dwell times to dose at sampled calculation points, and
//! dose-volume indices feed two aggregate objectives (coverage and sparing)
//! that are maximized simultaneously by a model-based evolutionary optimizer.
//! On top of the optimizer sits an adaptive loop that tightens or relaxes the
//! aspiration values of prioritized planning aims between low-fidelity
//! optimization rounds.
//!
//! The crate is `no_std` compatible (with `alloc`); all IO lives in the
//! companion CLI crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![deny(unsafe_code)]

extern crate alloc;

pub mod adaptive;
pub mod convergence;
pub mod dose;
pub mod dvi;
pub mod eval;
pub mod evaluator;
pub mod geometry;
pub mod moea;
pub mod objective;
pub mod patient;
pub mod phantom;
pub mod protocol;
pub mod seed;
pub mod stats;

pub(crate) mod math;
