"""Explicit Z2 harmonic functions and 1-forms with numerical verification."""

from .branch import (BranchState, HalfPower, continue_branch, continue_straight,
                     monodromy, principal_half_power, principal_state,
                     winding_number)
from .defining import (BivariatePolynomial, DefiningFunction, Node,
                       ProductOfLines, RamifiedCover, UnivariatePolynomial)
from .forms import (AxialForm, PlanarForm, ReHPowerForm, eval_planar,
                    eval_r3_form, family_nodal, sample_sigma,
                    vanishing_order)
from .paths import Polyline, circle
from .report import Check, VerificationReport
from .suites import normalize_descriptor, run_suite
from .sun import Cutoff, DoubleCoverGrid, SunPipeline, ZonalPoly, zonal

__all__ = [
    "BranchState", "HalfPower", "continue_branch", "continue_straight",
    "monodromy", "principal_half_power", "principal_state", "winding_number",
    "BivariatePolynomial", "DefiningFunction", "Node", "ProductOfLines",
    "RamifiedCover", "UnivariatePolynomial",
    "AxialForm", "PlanarForm", "ReHPowerForm", "eval_planar", "eval_r3_form",
    "family_nodal", "sample_sigma", "vanishing_order",
    "Polyline", "circle",
    "Check", "VerificationReport", "normalize_descriptor", "run_suite",
    "Cutoff", "DoubleCoverGrid", "SunPipeline", "ZonalPoly", "zonal",
]

__version__ = "0.1.0"
