"""
Python Switched-system ISS.

PSISS is a python package that certifies input-to-state stability of switched
systems whose switching signal obeys rate bounds on activation durations and
switch counts. It ships sampled checks of the Lyapunov data of each mode,
checks of switching signals, signal generators, a certificate assembler and a
switch-aligned simulator to confront certificates with trajectories.

"""

from .switched_iss import SwitchedISS

__version__ = "0.1.0"
