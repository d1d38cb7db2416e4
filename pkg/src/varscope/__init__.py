"""varscope: C preprocessor variability analysis and recursive-disk layout."""

__version__ = "0.1.0"
