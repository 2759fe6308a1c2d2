"""Document spanners with a skyline operator."""

__version__ = "0.1.0"
