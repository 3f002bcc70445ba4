"""smallbase: explicit small bases for primitive group actions.

Construction of base candidates (subset, partition, subspace, vector actions),
independent certification engines, and exact bound checking.
"""

__version__ = "0.1.0"
