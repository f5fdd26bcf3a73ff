"""Discrete Hodge theory on geometric simplicial complexes.

Submodules:

- ``complexes``: oriented simplicial complexes, chains/cochains, file I/O
- ``geometry``: constant-curvature simplex realization, quadrature, meshes
- ``quadrature``: simplex quadrature rules
- ``linalg``: exact ranks, kernel bases, positive-definite solves
- ``whitney``: mass matrices, Hodge decomposition, coexact spectral gap
- ``norms``: chain/cochain norms and comparison-constant reports
- ``duality``: dual celluations, the duality chain map, fan subdivision
- ``lp``: equality-form linear programs (exact rational and float)
- ``isoperimetry``: filling norms, scl bounds, geodesic tracing, the
  gap-to-scl inequality chain
- ``growth``: the integer symplectic growth engine and decay curves
- ``reporting``/``cli``: deterministic delimited reports and the front end

Importing this package pulls no numerical dependency; import the submodule
you need.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
