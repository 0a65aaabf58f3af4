#![allow(dead_code)]

use cantor_scaling::branch::{BranchSystem, PerturbationShape};

pub fn middle_thirds() -> BranchSystem {
    BranchSystem::affine(2, &[1.0 / 3.0; 3]).unwrap()
}

pub fn affine3() -> BranchSystem {
    BranchSystem::affine(3, &[0.2, 0.1, 0.2, 0.1, 0.4]).unwrap()
}

pub fn power3() -> BranchSystem {
    BranchSystem::power_example(3, 2, 0.5).unwrap()
}

pub fn power2() -> BranchSystem {
    BranchSystem::power_example(2, 1, 0.5).unwrap()
}

pub fn perturbed3() -> BranchSystem {
    BranchSystem::perturbed_affine(
        3,
        &[0.2, 0.1, 0.2, 0.1, 0.4],
        1e-2,
        PerturbationShape::Sine { harmonic: 1 },
    )
    .unwrap()
}

/// The systems every geometric invariant is checked on.
pub fn suite() -> Vec<(&'static str, BranchSystem)> {
    vec![
        ("middle thirds", middle_thirds()),
        ("affine d=3", affine3()),
        ("power example d=3", power3()),
        ("power example d=2", power2()),
        ("perturbed affine d=3", perturbed3()),
    ]
}
