"""latticeplan: verification and resource planning for surface-code
computations driven by adaptive CCZ resource states."""

__version__ = "0.1.0"
