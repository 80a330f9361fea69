"""Exact signed mixing measures for finitely exchangeable laws.

An exchangeable law on S^n need not be a mixture of i.i.d. laws, but it is
always a *signed* mixture. This package builds such mixtures exactly over
finite alphabets, checks them, and computes functionals of them.
"""

__version__ = "0.1.0"

from .dyson import DysonPair, build_pair, build_w, finite_difference_identity, m_row, verify_hompol
from .exactla import RatMatrix, SingularMatrixError, SizeError, inverse, rank, solve
from .extend import ExtensionProblem, extend_check, gaussian_extension_check, marginalize
from .measureops import cell_probability, laplace, moment, reconstruct, validate_mixing
from .measures import (
    ConeParametrization,
    CylinderEvent,
    DensityPiece,
    ExchangeableLaw,
    FunctionTable,
    SchemaError,
    SignedMixingMeasure,
)
from .mixing import canonical_xi, cone_parametrize, psi_of_type, t_independence_check, tv_norm, tv_sweep
from .typecomb import Alphabet, TypeIndex, TypeVector, enumerate_types, multinomial, type_of
