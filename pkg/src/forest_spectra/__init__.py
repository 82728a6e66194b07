"""Signless rooted-forest formulas for determinants, minors, characteristic
polynomials and eigenvectors, with leading-order spectra of matrices whose
entries are exponentially small."""

from .errors import (
    ComputationError,
    DegenerateSlopes,
    ForestSpectraError,
    InputError,
    InvalidIndex,
    InvalidQuery,
    MissingArc,
    NegationAttempted,
    TooLarge,
    ZeroDenominator,
)
from .forest_calculus import (
    CharPolynomial,
    EigenvectorResult,
    char_poly,
    cofactor,
    denominator_poly,
    determinant,
    diagonal_minor_det,
    eigenvector_components,
    kirchhoff_char_poly,
    kirchhoff_matrix,
    numerator_poly,
)
from .graph_core import (
    AugmentedDigraph,
    Digraph,
    Forest,
    ForestQuery,
    GeneralizedAdjacencyMatrix,
    build_augmented,
    enumerate_forests,
    forest_sums,
    has_path,
    productivity,
)
from .tropical_asymptotics import (
    AsymptoticScalar,
    AsymptoticSpectrum,
    ExponentialMarkovInput,
    eigenvalue_asymptotics,
    newton_polygon,
    realize_at_epsilon,
    tropical_char_poly,
    tropical_spectrum,
    validate_asymptotics,
)

__version__ = "0.1.0"
