//! Central tolerance configuration.
//!
//! Every threshold used by the library and its verification suites lives
//! here, so a run can be tightened or relaxed from one place (the CLI
//! exposes overrides through `--tol`).

use serde::{Deserialize, Serialize};

/// Tolerance bundle shared by all operations.
///
/// The defaults are the contract values the verification suites assert
/// against; overriding them loosens or tightens every dependent check at
/// once.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Norm axioms (homogeneity, triangle inequality) on random samples.
    pub norm_axiom: f64,
    /// Cached dual norm vs. recomputation.
    pub dual_recompute: f64,
    /// Membership of a functional in the dual unit sphere.
    pub dual_sphere: f64,
    /// Support functional: |dual norm - 1|.
    pub support_dual: f64,
    /// Support functional: f(x) >= ||x|| - support_value.
    pub support_value: f64,
    /// Hyperplane distance vs. |f(x)|/||f||* (Ascoli agreement).
    pub ascoli: f64,
    /// Deduplication of enumerated extreme points.
    pub extreme_dedup: f64,
    /// Translation invariance of the bordered determinant (absolute).
    pub det_translation: f64,
    /// Scaling homogeneity of the bordered determinant (relative).
    pub det_homogeneity: f64,
    /// Sylvester identity check (relative).
    pub sylvester: f64,
    /// Pivot block magnitude below which the Sylvester reduction is
    /// declared degenerate rather than regularized.
    pub sylvester_pivot: f64,
    /// Certificate re-evaluation for exact volume strategies.
    pub volume_exact_cert: f64,
    /// Certificate re-evaluation for iterative volume strategies.
    pub volume_iter_cert: f64,
    /// Alternating maximization stops below this improvement.
    pub volume_improvement: f64,
    /// Rank decisions in degeneracy tests (relative to scale).
    pub rank: f64,
    /// Witness vectors: |(norm) - 1| after radial projection.
    pub witness_norm: f64,
    /// Witness sum condition ||sum x_i|| >= (k+1)(1 - witness_sum).
    pub witness_sum: f64,
    /// Modulus estimate internal consistency at the witness.
    pub witness_value: f64,
    /// Determinant decay floor for Chebyshev-style diagnostics.
    pub decay_floor: f64,
    /// Membership slack for near-projection samples.
    pub membership: f64,
    /// Subspace containment in kernel intersections (quotient sweeps).
    pub kernel_containment: f64,
    /// Product witness identity (Thm-style staircase construction).
    pub product_identity: f64,
    /// Quotient basis / vertex-set validation.
    pub descriptor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            norm_axiom: 1e-9,
            dual_recompute: 1e-10,
            dual_sphere: 1e-9,
            support_dual: 1e-8,
            support_value: 1e-6,
            ascoli: 1e-8,
            extreme_dedup: 1e-12,
            det_translation: 1e-10,
            det_homogeneity: 1e-9,
            sylvester: 1e-8,
            sylvester_pivot: 1e-12,
            volume_exact_cert: 1e-8,
            volume_iter_cert: 1e-5,
            volume_improvement: 1e-9,
            rank: 1e-9,
            witness_norm: 1e-7,
            witness_sum: 1e-6,
            witness_value: 1e-7,
            decay_floor: 1e-3,
            membership: 1e-9,
            kernel_containment: 1e-10,
            product_identity: 1e-10,
            descriptor: 1e-9,
        }
    }
}

impl Tolerances {
    /// Apply `key=value` overrides (the CLI `--tol` syntax).
    pub fn apply_override(&mut self, key: &str, value: f64) -> Result<(), String> {
        match key {
            "norm_axiom" => self.norm_axiom = value,
            "dual_recompute" => self.dual_recompute = value,
            "dual_sphere" => self.dual_sphere = value,
            "support_dual" => self.support_dual = value,
            "support_value" => self.support_value = value,
            "ascoli" => self.ascoli = value,
            "extreme_dedup" => self.extreme_dedup = value,
            "det_translation" => self.det_translation = value,
            "det_homogeneity" => self.det_homogeneity = value,
            "sylvester" => self.sylvester = value,
            "sylvester_pivot" => self.sylvester_pivot = value,
            "volume_exact_cert" => self.volume_exact_cert = value,
            "volume_iter_cert" => self.volume_iter_cert = value,
            "volume_improvement" => self.volume_improvement = value,
            "rank" => self.rank = value,
            "witness_norm" => self.witness_norm = value,
            "witness_sum" => self.witness_sum = value,
            "witness_value" => self.witness_value = value,
            "decay_floor" => self.decay_floor = value,
            "membership" => self.membership = value,
            "kernel_containment" => self.kernel_containment = value,
            "product_identity" => self.product_identity = value,
            "descriptor" => self.descriptor = value,
            other => return Err(format!("unknown tolerance key `{other}`")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_positive() {
        let t = Tolerances::default();
        for v in [
            t.norm_axiom,
            t.dual_recompute,
            t.ascoli,
            t.det_translation,
            t.det_homogeneity,
            t.sylvester,
            t.decay_floor,
            t.product_identity,
        ] {
            assert!(v > 0.0);
        }
    }

    #[test]
    fn override_roundtrip() {
        let mut t = Tolerances::default();
        t.apply_override("ascoli", 1e-6).unwrap();
        assert_eq!(t.ascoli, 1e-6);
        assert!(t.apply_override("bogus", 1.0).is_err());
    }
}
