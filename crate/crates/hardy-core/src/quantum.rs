//! Born-rule statistics for two qubits measured in the X-Z plane.
//!
//! The shared state is `cos(θ/2)|00> - sin(θ/2)|11>`. An observable
//! `c_z Z + c_x X` has angle `φ = atan2(c_x, c_z)`; outcome 0 projects on its
//! +1 eigenvector `(cos φ/2, sin φ/2)` and outcome 1 on `(-sin φ/2, cos φ/2)`.

use crate::bell::{Behavior, Scenario};

/// Unit vector of the X-Z plane observable `c_z Z + c_x X`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XzObservable {
    pub c_z: f64,
    pub c_x: f64,
}

impl XzObservable {
    pub fn from_angle(phi: f64) -> Self {
        XzObservable { c_z: phi.cos(), c_x: phi.sin() }
    }

    pub fn angle(&self) -> f64 {
        self.c_x.atan2(self.c_z)
    }

    pub fn norm_error(&self) -> f64 {
        (self.c_z * self.c_z + self.c_x * self.c_x - 1.0).abs()
    }

    /// Eigenvector for outcome `k` in the computational basis.
    #[inline]
    pub fn eigvec(&self, k: usize) -> [f64; 2] {
        // Half-angle from the coefficients directly, stable at φ = ±π.
        let half = 0.5 * self.angle();
        let (s, c) = half.sin_cos();
        if k == 0 {
            [c, s]
        } else {
            [-s, c]
        }
    }
}

/// `P(a, b)` for one setting pair on `cos(θ/2)|00> - sin(θ/2)|11>`.
#[inline]
pub fn xz_prob(theta: f64, alice: &XzObservable, bob: &XzObservable, a: usize, b: usize) -> f64 {
    let (s, c) = (0.5 * theta).sin_cos();
    let u = alice.eigvec(a);
    let v = bob.eigvec(b);
    let amp = c * u[0] * v[0] - s * u[1] * v[1];
    amp * amp
}

/// Full 2-input/2-output table, without validation, for use inside
/// optimizers.
pub fn xz_table(theta: f64, alice: &[XzObservable; 2], bob: &[XzObservable; 2]) -> [f64; 16] {
    let s = Scenario::CHSH;
    let mut t = [0.0; 16];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    t[s.index(a, b, x, y)] = xz_prob(theta, &alice[x], &bob[y], a, b);
                }
            }
        }
    }
    t
}

/// Validated behavior of the two-qubit X-Z plane strategy.
pub fn xz_behavior(theta: f64, alice: &[XzObservable; 2], bob: &[XzObservable; 2]) -> Behavior {
    Behavior::new(Scenario::CHSH, xz_table(theta, alice, bob).to_vec())
        .expect("projective measurements on a pure state give a valid behavior")
}
