"""Self-Bäcklund centroaffine curves and polygons."""

__version__ = "0.1.0"
