"""Sharp bounds for the k-th Taylor coefficient on H^p, 0 < p < 1."""
__version__ = "0.1.0"
