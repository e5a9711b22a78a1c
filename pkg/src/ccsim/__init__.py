"""Commuting-circuit constructions with oracle-checked classical simulators."""
from .circuit import Circuit, Role, INPUT, ZERO, product, compose, embed, inverse, depth, layer_decomposition, validate
from .gates import Gate, unitary_of
from .phase import DyadicPhase
from .statevector import Distribution, total_variation

__version__ = "0.1.0"
