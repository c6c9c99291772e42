"""scottlab: finite posets, their intrinsic topologies, and the countable
dcpo counterexamples of non-Hausdorff topology, with brute-force oracles."""

__version__ = "0.1.0"
