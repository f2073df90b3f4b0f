"""Congruence lattices of regular variants of finite full transformation monoids."""

from .congruence import (CapExceeded, EquivalenceRelation, congruence_closure,
                         enumerate_all_congruences, is_congruence,
                         principal_congruences)
from .lattice import FiniteLattice, bell, height_formula, stirling2
from .malcev import lift_sharp, malcev_chain, rank_of_theta, rank_of_xi
from .semigroup import FiniteSemigroup, eggbox_dot, eggbox_text
from .synthesis import (CongDecomposition, classify, enumerate_structurally,
                        fuse, kappa_fuse, kappa_split, split)
from .systems import (CrossSectionFamily, PartitionFamily, assemble_lambda,
                      assemble_rho, enumerate_csystems, enumerate_psystems,
                      psi_extract_lambda, psi_extract_rho)
from .transform import (SandwichElement, Transformation, compose, image,
                        kernel, normalize_sandwich, parse_transformation, rank)
from .variant import VariantContext, build_context

__all__ = [
    "CapExceeded",
    "CongDecomposition",
    "CrossSectionFamily",
    "EquivalenceRelation",
    "FiniteLattice",
    "FiniteSemigroup",
    "PartitionFamily",
    "SandwichElement",
    "Transformation",
    "VariantContext",
    "assemble_lambda",
    "assemble_rho",
    "bell",
    "build_context",
    "classify",
    "compose",
    "congruence_closure",
    "eggbox_dot",
    "eggbox_text",
    "enumerate_all_congruences",
    "enumerate_csystems",
    "enumerate_psystems",
    "enumerate_structurally",
    "fuse",
    "height_formula",
    "image",
    "is_congruence",
    "kappa_fuse",
    "kappa_split",
    "kernel",
    "lift_sharp",
    "malcev_chain",
    "normalize_sandwich",
    "parse_transformation",
    "principal_congruences",
    "psi_extract_lambda",
    "psi_extract_rho",
    "rank",
    "rank_of_theta",
    "rank_of_xi",
    "split",
    "stirling2",
]
