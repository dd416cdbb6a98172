"""Python access to the curvlab verification library."""

from ._core import (
    CurvlabError,
    catalog_names,
    config_hash,
    exp_integrability_F,
    g_alpha,
    h_alpha,
    houdre_kagan,
    isoperimetric_I,
    lyapunov,
    mehler_apply,
    mfunction_value,
    potential_gradient,
    psd_check,
    rho_min,
    run_preset,
    verify_local,
)

__all__ = [
    "CurvlabError",
    "catalog_names",
    "config_hash",
    "exp_integrability_F",
    "g_alpha",
    "h_alpha",
    "houdre_kagan",
    "isoperimetric_I",
    "lyapunov",
    "mehler_apply",
    "mfunction_value",
    "potential_gradient",
    "psd_check",
    "rho_min",
    "run_preset",
    "verify_local",
]
