"""Modified Riemann extensions, their curvature, and Ricci flow verification."""

__version__ = "0.1.0"
