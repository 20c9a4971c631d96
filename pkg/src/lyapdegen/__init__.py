"""Lyapunov exponents of degenerating one-parameter families of rational maps."""
from .certs import Certificate, SampleResult, bound_at, build_certificate, sample_unit, strong_bound
from .escape import (
    ContentLedger,
    EscapeEstimate,
    ExactOrbit,
    choose_depth,
    escape_beta,
    escape_complex,
    escape_inf,
    escape_tree,
    lyapunov,
)
from .families import load_family, preset
from .forms import BiForm, ScaledC, content_split, size_functionals, specialize
from .harness import ExperimentConfig, ReportRow, emit_report, fit_asymptotic, run_family
from .pushforward import Lift, PreimageTree, hom_height, jacobian, preimage_tree, pushforward, res_binary
from .scalars import Place, Rat, SPoly, SRat, content, gcd_content, height, hplus_of_coeffs, liouville_floor, log_norm, root_bound

__all__ = [
    "BiForm", "Certificate", "ContentLedger", "EscapeEstimate", "ExactOrbit", "ExperimentConfig",
    "Lift", "Place", "PreimageTree", "Rat", "ReportRow", "SPoly", "SRat", "SampleResult", "ScaledC",
    "bound_at", "build_certificate", "choose_depth", "content", "content_split", "emit_report",
    "escape_beta", "escape_complex", "escape_inf", "escape_tree", "fit_asymptotic", "gcd_content",
    "height", "hom_height", "hplus_of_coeffs", "jacobian", "liouville_floor", "load_family",
    "log_norm", "lyapunov", "preimage_tree", "preset", "pushforward", "res_binary", "root_bound",
    "run_family", "sample_unit", "size_functionals", "specialize", "strong_bound",
]
