#![allow(dead_code)]

use renorm_core::fixed_point::solve_default;
use renorm_core::horseshoe::{build_branch_system, BranchSystem, DEFAULT_EPSILONS};
use renorm_core::quadratic::CriticalPoint;
use renorm_core::scaling::{scaling_from_critical, Period, ScalingFactor};
use renorm_core::tower::ScalingSequence;

pub fn c_star(period: Period) -> f64 {
    solve_default(period, 1e-13).unwrap().1.c_star
}

pub fn factor(period: Period) -> ScalingFactor {
    scaling_from_critical(period, CriticalPoint::new(c_star(period)).unwrap())
}

pub fn stationary(period: Period) -> ScalingSequence {
    ScalingSequence::stationary(factor(period))
}

pub fn default_system() -> BranchSystem {
    build_branch_system(&DEFAULT_EPSILONS).unwrap()
}
