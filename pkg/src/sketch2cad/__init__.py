"""Two-stage set-prediction parsing of hand-drawn sketches into parametric
CAD primitives and inter-primitive constraints."""

__version__ = "0.1.0"
