"""
graphrfd - residual finite-dimensionality toolkit for graph C*-algebras.
"""
__version__ = "0.1.0"
