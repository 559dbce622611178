"""Exception types raised by the toolkit.

Every failure that carries mathematical meaning (a gap closing, an
obstruction, a vanishing section) gets its own class so callers can
branch on outcomes instead of parsing messages.
"""

from __future__ import annotations

from typing import Optional, Tuple


class FragtopError(Exception):
    """Base class for all toolkit errors."""


class GapClosure(FragtopError):
    """Spectral gap below tolerance at a grid node.

    Attributes
    ----------
    node : tuple of int
        Grid indices of the offending node.
    gap : float
        Size of the gap found there.
    """

    def __init__(self, node: Tuple[int, ...], gap: float):
        self.node = tuple(int(m) for m in node)
        self.gap = float(gap)
        super().__init__(f"spectral gap {self.gap:.3e} below tolerance at node {self.node}")


class RankDrift(FragtopError):
    """Number of states inside the band window changes across the grid."""


class GridMismatch(FragtopError):
    """Two grid objects do not share the same lattice and node set."""


class SymmetryViolation(FragtopError):
    """A projector family fails to commute with the reality operator."""


class PlaquetteDegenerate(FragtopError):
    """A plaquette link determinant is too small to define a phase."""


class NotOrientable(FragtopError):
    """Euler number requested for a bundle with nonzero w1."""


class RankError(FragtopError):
    """Operation requires a specific bundle rank."""


class SectionVanishes(FragtopError):
    """No usable nowhere-zero section found after the retry budget."""


class DegenerateTriangle(FragtopError):
    """Solid-angle denominator vanishes; the map hits antipodal data."""


class ChernObstruction(FragtopError):
    """Smooth periodic frame refused: a first Chern number is nonzero.

    Attributes
    ----------
    plane : tuple of int
        Coordinate plane (i, j) carrying the obstruction.
    value : int
        The nonzero Chern number found there.
    """

    def __init__(self, plane: Tuple[int, int], value: int):
        self.plane = (int(plane[0]), int(plane[1]))
        self.value = int(value)
        super().__init__(f"chern number {self.value} on plane {self.plane} obstructs a smooth frame")


class PlanObstructed(FragtopError):
    """A line-bundle decomposition plan has an obstructed verdict."""


class MissingEuler(FragtopError):
    """Planner needs an Euler number for the oriented rank-2 case."""


class ShapeMismatch(FragtopError):
    """Array shape incompatible with the grid or fiber dimensions."""


class WindowTooSmall(FragtopError):
    """Supercell too small for the requested tail-fit window."""


class CutoffTooSmall(FragtopError):
    """Momentum-space cutoff below the minimum trustworthy radius."""


class NoMagicInRange(FragtopError):
    """Coupling scan found no flat-band minimum inside the range."""


class KernelDimDrift(FragtopError):
    """Kernel dimension is not constant over the sampled grid."""


class MissingLClass(FragtopError):
    """Wannier center request needs the line-bundle class label."""
