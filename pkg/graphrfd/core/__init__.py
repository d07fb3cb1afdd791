"""
Core analysis modules: graph structure, exact symbolic arithmetic, matrix
representations, amalgamation data and certificates.
"""
