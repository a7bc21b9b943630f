"""
Per-run result storage for AttractorKit.
"""
