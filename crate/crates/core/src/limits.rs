/// Enumeration guards shared by every exhaustive procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of monotone maps enumerated for one `C(X, Y)`.
    pub max_maps: usize,
    /// Maximum size of a function poset whose full pointwise order or
    /// comparability graph is materialized.
    pub max_function_poset: usize,
    /// Maximum ground-set size for down-set enumeration and topology
    /// generation from a set family.
    pub max_topology_ground: usize,
    /// Maximum size of a generated topology (number of open sets).
    pub max_topology_sets: usize,
    /// Maximum number of simplices in an order complex.
    pub max_simplices: usize,
    /// Maximum `|C(P,Q)| * |C(Q,P)|` homotopy-class pairs examined by the
    /// brute-force homotopy-equivalence oracle.
    pub max_oracle_pairs: u128,
    /// Sizes up to which the longest simple comparability path is exact.
    pub exact_path_limit: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_maps: 1_000_000,
            max_function_poset: 4096,
            max_topology_ground: 20,
            max_topology_sets: 1 << 20,
            max_simplices: 200_000,
            max_oracle_pairs: 1 << 32,
            exact_path_limit: crate::poset::EXACT_PATH_LIMIT,
        }
    }
}
