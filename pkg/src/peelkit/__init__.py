"""peelkit: peeling processes on random planar quadrangulations.

Exact peeling laws for the uniform infinite half-planar quadrangulation
with simple boundary and for free Boltzmann disks, samplers built on them,
gluing constructions decorated by a self-avoiding interface, and the Monte
Carlo experiments that probe their scaling behaviour.
"""

from peelkit.boltzmann import PartitionTable
from peelkit.peellaw import PeelIndicator, HALF_PLANE, Disk

__all__ = ["PartitionTable", "PeelIndicator", "HALF_PLANE", "Disk"]

__version__ = "0.1.0"
