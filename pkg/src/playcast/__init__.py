"""playcast: sparse-output trajectory prediction for team sports."""

__version__ = "0.1.0"
