"""Focal structure of hypersurfaces in compact symmetric spaces, OT-FKM
isoparametric hypersurfaces and their Hopf-fibration invariants."""

__version__ = "0.1.0"

from .symspace import (
    AmbientSpace,
    RootSpectrum,
    SpaceError,
    SpaceKind,
    focal_lower_bound,
    load_root_table,
    make_space,
    parse_space,
    spectrum_at,
)
from .jacobi import (
    JacobiState,
    cot_form,
    d1_apply,
    d2_apply,
    endpoint_differential,
    propagate,
)
from .focal import (
    FocalError,
    FocalProfile,
    ResolutionError,
    ScanOptions,
    ShapeOperator,
    count_and_bound,
    cut_focal_check,
    focal_scan,
    focal_scan_adapted,
    is_curvature_adapted,
    principal_curvature_constancy,
    verify_equifocal,
)
from .otfkm import (
    CliffordSystem,
    HypersurfaceSample,
    Membership,
    build_clifford,
    eval_F,
    focal_membership,
    grad_F,
    hess_F,
    sample_level,
    shape_operator_at,
)
from .hopf import (
    ComplexStructure,
    alpha_invariant,
    homogeneity_probe,
    make_J,
    make_Jprime,
    omega_F,
    phi_map,
    s1_orbit,
    thorbergsson_check,
)
