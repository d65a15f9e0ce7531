"""Exact symmetric-function, Hurwitz, ribbon-graph and Gaussian-matrix toolkit."""
from .partitions import Partition, conjugate, partition, partitions_of, to_frobenius, from_frobenius
from .symfunc import PowerSumPolynomial, PowerSumValues, eval_schur, schur_in_powersums
from .characters import character_table, phi, zeta
from .hurwitz import HurwitzInstance, hurwitz_bruteforce, hurwitz_frobenius
from .ribbon import RibbonGraph, SourceAssignment
from .ginibre import EnsembleSpec, TraceObservable, mc_expect, wick_exact

__version__ = "0.1.0"

__all__ = [
    "Partition", "conjugate", "partition", "partitions_of", "to_frobenius", "from_frobenius",
    "PowerSumPolynomial", "PowerSumValues", "eval_schur", "schur_in_powersums",
    "character_table", "phi", "zeta",
    "HurwitzInstance", "hurwitz_bruteforce", "hurwitz_frobenius",
    "RibbonGraph", "SourceAssignment",
    "EnsembleSpec", "TraceObservable", "mc_expect", "wick_exact",
]
