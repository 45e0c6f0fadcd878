"""Heights on elliptic curves and polynomial maps, and the entropy of the
diagonal actions they induce on the adeles."""

__version__ = "0.1.0"
