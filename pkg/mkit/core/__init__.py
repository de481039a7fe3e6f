# Core engine modules: exact algebra, decomposition, normal forms, numeric oracle

from .errors import MalformedInputError, MkitError, PreconditionError, VerificationError
from .weights import A1_WEIGHTS, MORSE_WEIGHTS, WeightSystem, parse_weights
from .poly import Monomial, Poly
from .forms import DifferentialForm, exterior_derivative, interior_euler, wedge, wedge_df
from .series import SeriesT, compose_series, series_power
from .maps import PlaneMap, compose_maps, flow_map, invert_map, pullback
from .local_algebra import (BoundaryGerm, ReductionCertificate, detect_weights, graded_reduce,
                            milnor_boundary, milnor_ordinary, simple_boundary_germ)
from .francoise import (DecompositionResult, decompose, decompose_ordinary, divide_by_df,
                        euler_invert, homotopy_potential, verify_certificate)
from .normalizer import (NormalizationResult, build_morse_normalizer, flatten_martinet_curve,
                         normalize_A1_boundary, normalize_pair, solve_vey_ode)
from .classifier import ClassificationReport, LagrangianGerm, classify, gauge_reduce, genericity_check
from .flux import FluxSample, check_flux_relation, flux_V, flux_V0, recover_invariant


__all__ = [
    'MkitError',
    'MalformedInputError',
    'PreconditionError',
    'VerificationError',
    'WeightSystem',
    'A1_WEIGHTS',
    'MORSE_WEIGHTS',
    'parse_weights',
    'Monomial',
    'Poly',
    'DifferentialForm',
    'exterior_derivative',
    'interior_euler',
    'wedge',
    'wedge_df',
    'SeriesT',
    'compose_series',
    'series_power',
    'PlaneMap',
    'compose_maps',
    'flow_map',
    'invert_map',
    'pullback',
    'BoundaryGerm',
    'ReductionCertificate',
    'detect_weights',
    'graded_reduce',
    'milnor_boundary',
    'milnor_ordinary',
    'simple_boundary_germ',
    'DecompositionResult',
    'decompose',
    'decompose_ordinary',
    'divide_by_df',
    'euler_invert',
    'homotopy_potential',
    'verify_certificate',
    'NormalizationResult',
    'build_morse_normalizer',
    'flatten_martinet_curve',
    'normalize_A1_boundary',
    'normalize_pair',
    'solve_vey_ode',
    'ClassificationReport',
    'LagrangianGerm',
    'classify',
    'gauge_reduce',
    'genericity_check',
    'FluxSample',
    'check_flux_relation',
    'flux_V',
    'flux_V0',
    'recover_invariant',
]
