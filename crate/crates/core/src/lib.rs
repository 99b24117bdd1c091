//! Core kernels for studying the contractibility of Vietoris–Rips complexes
//! built over random point clouds.
//!
//! The crate is organised around a pipeline: sample a point cloud from a
//! domain ([`domains`]), build the radius graph ([`proximity`]), and then
//! interrogate its clique complex from two independent directions —
//! dominated-vertex dismantling, which *certifies* contractibility
//! ([`dismantle`]), and GF(2) simplicial homology, which can only *refute*
//! it ([`complex`]). The [`geometry`] module supplies the explicit witness
//! constructions (the `W(x,y,r)` absorption set and inner-ball dilations)
//! that make the certificates quantitative, and [`covernerve`] assembles
//! them into a good-cover construction with a nerve-condition verifier.
//!
//! Everything here is pure computation: no IO, no clocks, no global RNG.
//! Randomised operations take an explicit seed and are deterministic given
//! their inputs. The crate is `no_std`-compatible (with `alloc`).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod complex;
pub mod covernerve;
pub mod dismantle;
pub mod domains;
pub mod geometry;
mod pointgrid;
pub mod proximity;

pub use complex::{BettiProfile, CliqueComplex};
pub use covernerve::{Cover, NerveReport};
pub use dismantle::{EliminationRecord, PursuitTranscript};
pub use domains::{DensitySpec, Domain, PointCloud};
pub use geometry::{Ball, Point, WitnessBall};
pub use proximity::{GeometricGraph, Graph};

/// Absolute tolerance for closed-ball comparisons.
///
/// All containment and adjacency predicates compare distances with a
/// `<= bound + ABS_TOL` convention: under continuous sampling, exact ties
/// have probability zero, and the closed comparison avoids strict-inequality
/// flakiness at boundaries.
pub const ABS_TOL: f64 = 1e-12;

pub(crate) mod math {
    //! Thin wrappers over `libm` so the same float kernels are used in both
    //! `std` and `no_std` builds.

    #[inline]
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    #[inline]
    pub fn floor(x: f64) -> f64 {
        libm::floor(x)
    }

    #[inline]
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }

    #[inline]
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }

    #[inline]
    pub fn powi(x: f64, mut n: u32) -> f64 {
        let mut out = 1.0;
        let mut base = x;
        while n > 0 {
            if n & 1 == 1 {
                out *= base;
            }
            base *= base;
            n >>= 1;
        }
        out
    }

    #[inline]
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }

    #[inline]
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }

    #[inline]
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }

    /// Volume of the unit ball in `d` dimensions, via the two-step recurrence
    /// v_d = 2π v_{d-2} / d.
    pub fn unit_ball_volume(d: usize) -> f64 {
        let mut even = 1.0; // v_0
        let mut odd = 2.0; // v_1
        if d == 0 {
            return even;
        }
        if d == 1 {
            return odd;
        }
        let mut k = 1;
        loop {
            k += 1;
            let next = 2.0 * core::f64::consts::PI / (k as f64);
            if k % 2 == 0 {
                even *= next;
                if k == d {
                    return even;
                }
            } else {
                odd *= next;
                if k == d {
                    return odd;
                }
            }
        }
    }
}
