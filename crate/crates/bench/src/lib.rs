//! Fixtures shared by the benchmarks.

use vw_core::{BasisPair, BundleTuple, SurfaceKind, ToricSurface};

/// Surface and bundles of a basis pair `(surface, β^i = k_i K)`.
pub fn basis_fixture(kind: SurfaceKind, canonical_multiples: &[i64]) -> (ToricSurface, BundleTuple) {
    BasisPair::new(kind, canonical_multiples.to_vec()).bundles()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_rank() {
        let (_, l) = basis_fixture(SurfaceKind::P2, &[1, 0]);
        assert_eq!(l.rank(), 3);
    }
}
