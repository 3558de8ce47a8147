"""Folding of nonautonomous planar ODE systems into scalar second-order equations."""

from .folding import FoldedForm, PlanarSystem, fold, semi_invert, synthesize_g

__version__ = "0.1.0"

__all__ = ["FoldedForm", "PlanarSystem", "fold", "semi_invert", "synthesize_g"]
