"""Stable 3-forms, almost complex structures and curvature on su(2) + su(2)."""

from .acs import (
    G_NK,
    I0,
    J_I0,
    GeneralACS,
    HermitianPair,
    OrthogonalACS,
    alpha_map,
    hermitian_pair,
    omega_of,
    project_polar,
    sample,
    su3_compatibility,
    projection_closed_form,
    validate,
)
from .curvature import CurvatureReport, LeftInvariantMetric, nk_defect, proper_frame, ricci, ricci_closed_form
from .exterior import KForm, dual_iso_A, interior, wedge
from .hitchin import HitchinStructure, Orbit, classify_orbit, dual_three_form, hitchin_J, hitchin_K, tau
from .liealg import FrameChange, LieAlgebraSpec, bracket, change_frame, mc_differential, standard_su2_su2

__version__ = "0.1.0"
