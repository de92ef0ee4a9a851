"""Mathematical morphology on propositional model sets, with revision,
merging and abduction operators built from dilations and erosions."""

from .abduction import (
    RELATIONS,
    ExplanationResult,
    TheoryContext,
    central,
    explains,
    explains_f,
    last_consistent_erosion,
    preferred_explanation,
    revise_f,
)
from .errors import MorphlogError, SemanticError, UsageError
from .formula import Alphabet, equivalent, entails, minimize, models, parse, render, to_cnf, to_dnf
from .merging import Profile, merge, merge_via_dilation_tuples
from .morphology import (
    closing,
    connected_components,
    dilate,
    erode,
    iterate,
    last_dilation,
    last_erosion,
    opening,
    reconstruct,
    skeleton,
    stratify,
    ultimate_erosion,
)
from .revision import revise
from .worlds import Explicit, HammingBall, Restricted, RestrictedExact2, WorldSet, parse_se

__all__ = [
    "RELATIONS", "ExplanationResult", "TheoryContext", "central", "explains", "explains_f",
    "last_consistent_erosion", "preferred_explanation", "revise_f",
    "MorphlogError", "SemanticError", "UsageError",
    "Alphabet", "equivalent", "entails", "minimize", "models", "parse", "render", "to_cnf", "to_dnf",
    "Profile", "merge", "merge_via_dilation_tuples",
    "closing", "connected_components", "dilate", "erode", "iterate", "last_dilation", "last_erosion",
    "opening", "reconstruct", "skeleton", "stratify", "ultimate_erosion",
    "revise",
    "Explicit", "HammingBall", "Restricted", "RestrictedExact2", "WorldSet", "parse_se",
]
