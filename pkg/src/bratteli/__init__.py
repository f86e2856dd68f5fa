"""Exact arithmetic for Bratteli diagrams, their full groups, invariant
measures on the path space, and fixed-point characters."""

from .clopen import ClopenSet, HalvingWitness, boolean, can_halve
from .character import (
    INF,
    CharacterSpec,
    make_character,
    centrality_check,
    eval_character,
    gram_matrix,
    multiplicativity_harness,
    phi,
    projection_limit_check,
    psd_check,
    realize_invariant_set,
    trace_projection,
)
from .diagram import (
    BratteliDiagram,
    BRTail,
    ExplicitTail,
    OdometerTail,
    PathTable,
    ProductTail,
    StationaryTail,
    br_diagram,
    build_diagram,
    find_even_telescoping,
    is_simple,
    odometer,
    product_matrix,
    stationary,
    telescope,
)
from .group import (
    CycleData,
    GroupElement,
    HnResult,
    SiFamily,
    claim1_pair,
    conjugate_at_level,
    disagreement_set,
    make_hn,
    metric_d,
    si_family,
)
from .measure import (
    HullEstimate,
    InvariantMeasure,
    builtin_measure,
    ergodic_hull_estimate,
    measure_of,
    validate_certificate,
)
from .rperm import (
    RationalPermutation,
    char_r,
    decode_digits,
    encode_digits,
    from_rperm,
    to_rperm,
)
from .values import RatInterval

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
