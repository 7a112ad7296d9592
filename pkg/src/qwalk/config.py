"""Numerical tolerances used across the package.

All comparisons share this one table so that tests, validation and the CLI
agree on what counts as "equal". Values are absolute unless named *_rel.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    row_sum: float = 1e-10            # row of P sums to 1
    stationary: float = 1e-10         # ||pi P - pi||_inf
    detailed_balance: float = 1e-9    # max |diag(pi)P - P^T diag(pi)|
    symmetry: float = 1e-12           # discriminant symmetry
    unit_eigenvalue: float = 1e-10    # top discriminant eigenvalue vs 1
    orthonormality: float = 1e-9      # eigenvector / edge-image frames
    reconstruction: float = 1e-9      # ||D - sum lambda |v><v|||_max
    degeneracy_cluster: float = 1e-9  # eigenvalues treated as one cluster
    hitting_denominator: float = 1e-12
    hitting_identity_rel: float = 1e-8
    ht_plus_equality_rel: float = 1e-6
    hermiticity: float = 1e-12
    unitarity: float = 1e-10
    locality: float = 1e-10
    walk_identity: float = 1e-12
    search_annihilation: float = 1e-10
    norm_drift: float = 1e-9
    lazy_pi_drift: float = 1e-12
    degenerate_top: float = 1e-12


TOL = Tolerances()
