"""
Chronological character co-occurrence networks and their analysis.
"""

__version__ = "0.1.0"
