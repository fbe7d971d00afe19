"""Dense coding capacities under symmetry-restricted encoders."""

__version__ = "0.1.0"
