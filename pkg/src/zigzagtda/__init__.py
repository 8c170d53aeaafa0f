"""Zigzag persistent homology over Z/2: topological bootstrapping,
homological thresholding, and witness-complex comparison."""

from .complexes import (Bicomplex, SimplicialComplex, biwitness_complex,
                        boundary, chain_boundary, lazy_witness_complex,
                        project_chain, vietoris_rips, vietoris_rips_filtration,
                        weak_witness_complex)
from .filters import FilterValues, codensity, gaussian_kde, top_percent
from .homology import (HomologyBasis, PersistenceIntervals, betti_numbers,
                       classes_equal, homology_basis, is_boundary,
                       persistent_homology)
from .metric import (DistanceMatrix, PointCloud, distance_matrix, generate,
                     maxmin_landmarks, random_subsample)
from .zigzag import (Barcode, Interval, bicomplex_zigzag, interval,
                     intersection_zigzag, pairwise_compatibility_graph,
                     suppress_half_integral, union_zigzag)

__version__ = "0.1.0"

__all__ = [
    "Barcode", "Bicomplex", "DistanceMatrix", "FilterValues", "HomologyBasis",
    "Interval", "PersistenceIntervals", "PointCloud", "SimplicialComplex",
    "betti_numbers", "bicomplex_zigzag", "biwitness_complex", "boundary",
    "chain_boundary", "classes_equal", "codensity", "distance_matrix",
    "gaussian_kde", "generate", "homology_basis", "intersection_zigzag",
    "interval", "is_boundary", "lazy_witness_complex", "maxmin_landmarks",
    "pairwise_compatibility_graph", "persistent_homology", "project_chain",
    "random_subsample", "suppress_half_integral", "top_percent", "union_zigzag",
    "vietoris_rips", "vietoris_rips_filtration", "weak_witness_complex",
]
