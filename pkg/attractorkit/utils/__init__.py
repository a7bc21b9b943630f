"""
Utilities package for AttractorKit.
Report emission and bounded parallel helpers.
"""
