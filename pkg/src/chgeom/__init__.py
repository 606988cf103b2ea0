"""Numerical toolkit for reflections, bendings, and pentagons in the complex hyperbolic plane."""

from .core import (
    DEFAULT_TOL,
    J,
    SIGNATURE,
    Gram,
    LineType,
    Point,
    alpha,
    beta,
    form,
    gram,
    line_type,
    point,
    polar_point,
    project_orthogonal,
    projectively_equal,
    realize_gram,
    self_product,
    tance,
    tau,
    tau_complex,
)
from .isometry import (
    CubeRoot,
    Isometry,
    center_reduce,
    centralizer_basis,
    conjugator,
    is_regular,
    isometry_log,
    nearest_cube_root,
    project_to_su,
    project_to_su_algebra,
    rank_one_map,
    reflection,
    split_two_reflections,
    stabilizer_algebra,
    star,
    su_basis,
    trace_formula,
)
from .paths import (
    Bending,
    PathSample,
    TangentAtPoint,
    bend_pair,
    bending,
    follow_path,
    hat,
    make_hyperbolic,
    normalized_lift,
    orthogonal_partner,
    path_sample,
    tangent,
)
from .triples import (
    Move,
    SCoords,
    Triple,
    TripleClass,
    apply_bend_program,
    classify_triple,
    connect_triples,
    decompose_three_reflections,
    horizontal_line,
    s_coords,
    standard_gram,
    tangent_ef_residual,
    triple,
    triple_from_coords,
    validate_coords,
    vertical_line,
)
from .holonomy import (
    VerticalPart,
    b_commutator,
    b_fields,
    holonomy_dimension,
    holonomy_samples,
    omega_commutator,
    rectangle_holonomy,
    vertical_part,
)
from .pentagons import (
    Pentagon,
    apply_pentagon_moves,
    build_pentagon,
    connect_pentagons,
    is_real_pentagon,
    pentagon,
    pentagon_from_moduli,
    pentagon_moduli,
    verify_pentagon,
)
from .sampling import (
    default_rng,
    random_isometry,
    random_negative_point,
    random_point,
    random_strongly_regular_coords,
    random_strongly_regular_triple,
    random_su_element,
    random_vector,
)
from . import errors

__all__ = [
    "DEFAULT_TOL",
    "J",
    "SIGNATURE",
    "Bending",
    "CubeRoot",
    "Gram",
    "Isometry",
    "LineType",
    "Move",
    "PathSample",
    "Pentagon",
    "Point",
    "SCoords",
    "TangentAtPoint",
    "Triple",
    "TripleClass",
    "VerticalPart",
    "alpha",
    "apply_bend_program",
    "apply_pentagon_moves",
    "b_commutator",
    "b_fields",
    "bend_pair",
    "bending",
    "beta",
    "build_pentagon",
    "center_reduce",
    "centralizer_basis",
    "classify_triple",
    "conjugator",
    "connect_pentagons",
    "connect_triples",
    "decompose_three_reflections",
    "default_rng",
    "errors",
    "follow_path",
    "form",
    "gram",
    "hat",
    "holonomy_dimension",
    "holonomy_samples",
    "horizontal_line",
    "is_real_pentagon",
    "is_regular",
    "isometry_log",
    "line_type",
    "make_hyperbolic",
    "nearest_cube_root",
    "normalized_lift",
    "omega_commutator",
    "orthogonal_partner",
    "path_sample",
    "pentagon",
    "pentagon_from_moduli",
    "pentagon_moduli",
    "point",
    "polar_point",
    "project_orthogonal",
    "project_to_su",
    "project_to_su_algebra",
    "projectively_equal",
    "random_isometry",
    "random_negative_point",
    "random_point",
    "random_strongly_regular_coords",
    "random_strongly_regular_triple",
    "random_su_element",
    "random_vector",
    "rank_one_map",
    "realize_gram",
    "rectangle_holonomy",
    "reflection",
    "s_coords",
    "self_product",
    "split_two_reflections",
    "stabilizer_algebra",
    "standard_gram",
    "star",
    "su_basis",
    "tance",
    "tangent",
    "tangent_ef_residual",
    "tau",
    "tau_complex",
    "trace_formula",
    "triple",
    "triple_from_coords",
    "validate_coords",
    "verify_pentagon",
    "vertical_line",
    "vertical_part",
]
