"""Process-wide numeric knobs.

All checks that need a tolerance read ``TOL`` unless the caller passes one
explicitly, so a single assignment (``ccsim.config.TOL = 1e-8``) loosens or
tightens every comparison in the package.
"""

TOL = 1e-9

# angles are stored as numerator / 2**MAX_LEVEL of a full turn
MAX_LEVEL = 62

# widest composite gate accepted (9 = 2**3 + 1, the light cone of a
# two-qubit gate through three layers)
COMPOSITE_ARITY = 9

# dense statevector cap, 2**24 complex doubles = 256 MiB
MAX_QUBITS = 24

# output-count cap for the 2**l subset sums and the l-qubit weak-sim state
MAX_OUTPUTS = 20

# coarsest-first dyadic snapping for composite diagonal phases
SNAP_MAX_LEVEL = 20


def tol(value=None):
    return TOL if value is None else value
