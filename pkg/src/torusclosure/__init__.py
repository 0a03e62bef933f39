"""Euclidean and Zariski closures of finitely generated subgroups of tori over Q."""

from .arith import Ball, SignVerdict, ball_det, det_exact_zero_by_skew, sign_certified
from .density import (closure, closure_is_algebraic, conjecture2_test, dual_basis, lemma1c_determinant_check,
                      log_embedding, unit_log_lattice)
from .errors import (ConsistencyError, DivisionByZero, InputError, IsotropicError, NotGaloisError, NotUnitError,
                     ParseError, PrecisionExhausted, RankError, ReducibleError, SearchEmpty, TorusClosureError)
from .field import (FieldElement, NumberField, conjugate_group_rank, galois_automorphisms, make_field, norm,
                    trace)
from .parsing import parse_element, parse_field
from .relations import Status, find_integer_relations, linear_dependencies, saturate
from .scenarios import four_exp_matrix_check, run_counterexample, run_example2
from .torus import (compute_XF, embed_in_norm_one_product, norm_one_torus, product, restriction_torus,
                    split_torus, zariski_closure)
from .units import cubic_unit_search, quadratic_fundamental_unit, verify_units

__all__ = [
    "Ball",
    "SignVerdict",
    "ball_det",
    "det_exact_zero_by_skew",
    "sign_certified",
    "closure",
    "closure_is_algebraic",
    "conjecture2_test",
    "dual_basis",
    "lemma1c_determinant_check",
    "log_embedding",
    "unit_log_lattice",
    "ConsistencyError",
    "DivisionByZero",
    "InputError",
    "IsotropicError",
    "NotGaloisError",
    "NotUnitError",
    "ParseError",
    "PrecisionExhausted",
    "RankError",
    "ReducibleError",
    "SearchEmpty",
    "TorusClosureError",
    "FieldElement",
    "NumberField",
    "conjugate_group_rank",
    "galois_automorphisms",
    "make_field",
    "norm",
    "trace",
    "parse_element",
    "parse_field",
    "Status",
    "find_integer_relations",
    "linear_dependencies",
    "saturate",
    "four_exp_matrix_check",
    "run_counterexample",
    "run_example2",
    "compute_XF",
    "embed_in_norm_one_product",
    "norm_one_torus",
    "product",
    "restriction_torus",
    "split_torus",
    "zariski_closure",
    "cubic_unit_search",
    "quadratic_fundamental_unit",
    "verify_units",
]

__version__ = "0.1.0"
