"""Analysis toolkit for 3D Filippov piecewise smooth vector fields."""
from .core import DEFAULT_TOL, PiecewiseSystem, RegionTag, ToleranceConfig, region_of
from .polynomial import Poly

__version__ = "0.1.0"

__all__ = ["DEFAULT_TOL", "PiecewiseSystem", "Poly", "RegionTag", "ToleranceConfig", "region_of", "__version__"]
