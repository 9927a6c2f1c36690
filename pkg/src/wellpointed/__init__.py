"""Finite coalgebras for intersection-preserving set functors.

Functor expressions, well-founded parts and folds, simple quotients, the
well-pointed modification with canonical forms, the rational fixed point, and
adapters for Moore machines, streams, trees and hereditarily finite sets.
"""

from .coalgebra import (
    Coalgebra,
    Hom,
    Partition,
    PointedCoalgebra,
    canonical_graph,
    check_homomorphism,
    reachable_part,
    simple_quotient,
    wp,
)
from .errors import (
    CoalgebraError,
    DecodeError,
    EnumerationTooLarge,
    FullExpansionDiverges,
    FunctorMismatch,
    NotWellFounded,
    NotWellPointed,
    ParseError,
    TermTypeError,
)
from .functor import (
    ConstVal,
    Inj,
    Pair,
    SetOf,
    StateRef,
    Tab,
    canonicalize_term,
    map_term,
    parse_functor,
    parse_term,
    support,
)
from .rational import (
    CanonicalForm,
    RhoElement,
    a_plus,
    canonical_form,
    enumerate_wp,
    in_mu,
    is_isomorphic,
    rho_structure,
)
from .wellfounded import WfReport, fold, next_time, well_founded_part

__version__ = "0.1.0"
