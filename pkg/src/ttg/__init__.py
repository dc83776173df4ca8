"""Finite models of relative tensor-triangular spectra.

Submodule lattices, their prime spectra and support data, lattice-level
actions of a base category, and the geometric examples built on them.
"""

from .order import (
    FinitePoset,
    JoinSemilattice,
    SubmoduleLattice,
    covers,
    down_sets,
    is_local,
    krull_dimension,
)
from .spectrum import (
    SpectrumSpace,
    SupportDatum,
    check_support_datum,
    classify,
    is_quasi_s_prime,
    is_s_prime,
    prime_decomposition,
    spectrum,
    supp,
    support_data_enumerate,
    universal_map,
)
from .datum import (
    LatticeDatum,
    base_point_of_prime,
    check_sub_sheaf,
    fiber,
    fin_topology,
    quotient_spectrum,
    spectrum_decomposition,
    validate_admissible,
)

__all__ = [
    "FinitePoset",
    "JoinSemilattice",
    "SubmoduleLattice",
    "covers",
    "down_sets",
    "is_local",
    "krull_dimension",
    "SpectrumSpace",
    "SupportDatum",
    "check_support_datum",
    "classify",
    "is_quasi_s_prime",
    "is_s_prime",
    "prime_decomposition",
    "spectrum",
    "supp",
    "support_data_enumerate",
    "universal_map",
    "LatticeDatum",
    "base_point_of_prime",
    "check_sub_sheaf",
    "fiber",
    "fin_topology",
    "quotient_spectrum",
    "spectrum_decomposition",
    "validate_admissible",
]
