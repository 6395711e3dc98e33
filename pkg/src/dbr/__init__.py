"""Reproducing kernels, rational Schur functions and defect calculus for
finitely atomic weighted Dirichlet spaces and shift-invariant tuples."""

__version__ = "0.1.0"

from .poly import ComplexPoly, HermitianLaurent, fejer_riesz, laurent_modulus_product, poly_roots, taylor_shift
from .hardy import AtomicMeasure, StableRational, dmu_inner, h2_inner, local_dirichlet, local_dirichlet_m
from .kernel import KernelModel, build_model, kernel_eval, schur_extract, verify_model
from .defect import InnerProduct, atomic_defect_identity, classify, defect_form
from .tuples import (
    CircleDistribution,
    CirclePoint,
    TupleSpec,
    dirichlet_integral,
    dlambda_closed_form,
    multi_tuple,
    rank_one_tuple,
    vecmu_norm,
)

__all__ = [
    "ComplexPoly",
    "HermitianLaurent",
    "fejer_riesz",
    "laurent_modulus_product",
    "poly_roots",
    "taylor_shift",
    "AtomicMeasure",
    "StableRational",
    "dmu_inner",
    "h2_inner",
    "local_dirichlet",
    "local_dirichlet_m",
    "KernelModel",
    "build_model",
    "kernel_eval",
    "schur_extract",
    "verify_model",
    "InnerProduct",
    "atomic_defect_identity",
    "classify",
    "defect_form",
    "CircleDistribution",
    "CirclePoint",
    "TupleSpec",
    "dirichlet_integral",
    "dlambda_closed_form",
    "multi_tuple",
    "rank_one_tuple",
    "vecmu_norm",
]
