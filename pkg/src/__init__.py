"""
Record Lab: record numbers of random walks, exact and simulated.
"""

__version__ = "1.0.0"
