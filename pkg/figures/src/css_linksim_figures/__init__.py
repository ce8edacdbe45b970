"""Figure rendering for css-linksim sweep CSVs."""

from .recipes import CurveSpec, FigureRecipe, load_recipe, load_reference
from .render import render

__all__ = ["CurveSpec", "FigureRecipe", "load_recipe", "load_reference", "render"]

__version__ = "0.1.0"
