"""Finite fibrations, their duals, and the models built on them."""
from .category import CatFunctor, FiniteCategory, ValidationReport, validate_category, validate_functor
from .cartesian import Cleavage, is_cartesian, is_fibration, make_cleavage, vh_factorize
from .dual import build_dual, classify_dual_arrow, double_dual_iso
from .glue import GlueData, extract_comparison, glue_functor, restrict, verify_glue_conditions

__version__ = "0.1.0"
