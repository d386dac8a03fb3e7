//! The exact invariant splitting of the suspension's cotangent space.
//!
//! For the mapping torus of a hyperbolic matrix A the tangent bundle
//! splits into the flow direction and the expanding/contracting
//! eigendirections of A. Dually, the cotangent space splits into
//! * the flow codirection (annihilator of the torus directions),
//! * the expanding codirection: the eigenvector of A^T with eigenvalue
//!   1/lambda (it annihilates flow + expanding tangents and grows under
//!   the transpose-inverse covector flow), and
//! * the contracting codirection: the eigenvector of A^T with eigenvalue
//!   lambda, which decays forward in time.

use crate::orbits::HyperbolicToralMap;

/// Dual basis adapted to the invariant splitting, plus the tangent
/// eigenvectors used for pairing checks. Covectors are (xi1, xi2, eta).
#[derive(Debug, Clone, Copy)]
pub struct SplittingData {
    /// Expanding codirection (grows like e^{t log lambda} under the lifted
    /// flow); unit norm, first nonzero coordinate positive.
    pub u_covector: [f64; 3],
    /// Contracting codirection (decays forward).
    pub s_covector: [f64; 3],
    /// Flow codirection.
    pub zero_covector: [f64; 3],
    /// Unit tangent eigenvector of A with eigenvalue lambda.
    pub tangent_u: [f64; 2],
    /// Unit tangent eigenvector of A with eigenvalue 1/lambda.
    pub tangent_s: [f64; 2],
    pub expansion_log: f64,
}

impl SplittingData {
    pub fn compute(map: &HyperbolicToralMap) -> Self {
        let [a, b, c, d] = map.entries().map(|e| e as f64);
        let lambda = map.expansion_factor();
        let lambda_signed = if map.trace() > 0 { lambda } else { -lambda };
        // tangent eigenvectors of A = [[a, b], [c, d]]
        let tangent_u = normalize2(eigvec2(a, b, c, d, lambda_signed));
        let tangent_s = normalize2(eigvec2(a, b, c, d, 1.0 / lambda_signed));
        // covector eigenvectors of A^T = [[a, c], [b, d]]
        let cov_expanding = normalize2(eigvec2(a, c, b, d, 1.0 / lambda_signed));
        let cov_contracting = normalize2(eigvec2(a, c, b, d, lambda_signed));
        Self {
            u_covector: [cov_expanding[0], cov_expanding[1], 0.0],
            s_covector: [cov_contracting[0], cov_contracting[1], 0.0],
            zero_covector: [0.0, 0.0, 1.0],
            tangent_u,
            tangent_s,
            expansion_log: map.expansion_log(),
        }
    }

    /// Coefficients (c_u, c_s) of a torus covector in the dual basis.
    pub fn covector_coefficients(&self, xi: [f64; 2]) -> (f64, f64) {
        let u = [self.u_covector[0], self.u_covector[1]];
        let s = [self.s_covector[0], self.s_covector[1]];
        let det = u[0] * s[1] - u[1] * s[0];
        let cu = (xi[0] * s[1] - xi[1] * s[0]) / det;
        let cs = (u[0] * xi[1] - u[1] * xi[0]) / det;
        (cu, cs)
    }
}

/// Eigenvector of [[a, b], [c, d]] for eigenvalue mu, picking the more
/// robust of the two cofactor expressions; sign convention: first nonzero
/// coordinate positive.
fn eigvec2(a: f64, b: f64, c: f64, d: f64, mu: f64) -> [f64; 2] {
    let v1 = [b, mu - a];
    let v2 = [mu - d, c];
    let n1 = v1[0] * v1[0] + v1[1] * v1[1];
    let n2 = v2[0] * v2[0] + v2[1] * v2[1];
    let v = if n1 >= n2 { v1 } else { v2 };
    if v[0] < 0.0 || (v[0] == 0.0 && v[1] < 0.0) {
        [-v[0], -v[1]]
    } else {
        v
    }
}

fn normalize2(v: [f64; 2]) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}
