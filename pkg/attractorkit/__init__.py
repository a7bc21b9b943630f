"""
AttractorKit package.
Certified fractal-dimension bounds for exponential attractors of retarded
functional differential equations and retarded reaction-diffusion equations.
"""

__version__ = '0.1.0'
