"""Interior transmission eigenvalues for radial media with low-regularity coefficients."""
__version__ = "0.1.0"
