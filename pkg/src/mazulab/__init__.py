"""Grid lab for the Mazurkiewicz distance and boundary connectivity of bounded domains."""

__version__ = "0.1.0"

TAU_2D = 1.5
TAU_3D = 1.8
LINK_2D = 1.55
LINK_3D = 1.8


def contact_tau(dim: int) -> float:
    """Closure-contact threshold multiplier for cell spacing h."""
    return TAU_2D if dim == 2 else TAU_3D


def link_sigma(dim: int) -> float:
    """Sample-graph linking threshold multiplier for cell spacing h."""
    return LINK_2D if dim == 2 else LINK_3D
