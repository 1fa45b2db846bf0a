"""Cactus group actions on sl2 tensor products, compared three ways.

Crystals (combinatorial commutors), bracketing labels moved by the
associator, and eigenlines of Gaudin Hamiltonians transported along
degenerations all carry an action of the cactus group; this package
computes each and checks that they agree.
"""

from .cactus import CactusGenerator, CactusWord, Permutation, is_pure, project_to_symmetric, relation_instances, word
from .crystal import CrystalElem, bracketing_label, cactus_act, commutor, e_tilde, f_tilde, highest_elements
from .gaudin import (
    ExactOperator,
    ModuliPointZ,
    SingularSubspace,
    bracketing_eigenbasis,
    casimir_on_subset,
    check_simple_spectrum,
    hamiltonian,
    rep_matrices,
    singular_basis,
)
from .hives import associator_psi, cactus_act_labels, occurrence_set
from .transport import GramDiagonal, Pencil, TransportReport, edge_transport, loop_monodromy, pencil_track, symmetrize
from .trees import LabelState, Leaf, Move, Node
from .verify import ExperimentConfig, VerificationReport, emit, run_verification

__version__ = "0.1.0"

__all__ = [
    "CactusGenerator",
    "CactusWord",
    "CrystalElem",
    "ExactOperator",
    "ExperimentConfig",
    "GramDiagonal",
    "LabelState",
    "Leaf",
    "ModuliPointZ",
    "Move",
    "Node",
    "Pencil",
    "Permutation",
    "SingularSubspace",
    "TransportReport",
    "VerificationReport",
    "associator_psi",
    "bracketing_eigenbasis",
    "bracketing_label",
    "cactus_act",
    "cactus_act_labels",
    "casimir_on_subset",
    "check_simple_spectrum",
    "commutor",
    "e_tilde",
    "edge_transport",
    "emit",
    "f_tilde",
    "hamiltonian",
    "highest_elements",
    "is_pure",
    "loop_monodromy",
    "occurrence_set",
    "pencil_track",
    "project_to_symmetric",
    "relation_instances",
    "rep_matrices",
    "run_verification",
    "singular_basis",
    "symmetrize",
    "word",
]
