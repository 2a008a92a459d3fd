"""Fine hierarchy of k-partitions at desk scale."""

__version__ = "0.1.0"
