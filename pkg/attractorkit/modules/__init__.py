"""
Modules package for AttractorKit.
This package contains the numerical modules of the toolkit.
"""
