"""Lattices, momentum grids, Hamiltonian families, and projector bundles.

Frames are stored on the closed grid: axis i runs over 0..N_i inclusive and
the final layer holds the frame at the wrapped momentum, produced by the
family's boundary unitaries (or copied when the family is periodic). Loop
algorithms downstream then walk contiguous indices with no modular math,
and every shared edge is evaluated on the same stored data, which is what
makes the integer invariants exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from ._util import (
    iter_index,
    phase_fix,
    realify_operator,
    rng_for,
    takagi_symmetric_unitary,
)
from .errors import GapClosure, GridMismatch, RankDrift, RankError, SymmetryViolation

ORTHONORMAL_TOL = 1e-10
REALITY_TOL = 1e-9
COMMUTANT_TOL = 1e-8
GAP_TOL_FACTOR = 1e-6

PAULI = (
    np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
)


@dataclass(frozen=True)
class Lattice:
    """Bravais lattice with its dual, in row convention.

    Attributes
    ----------
    basis : ndarray, shape (d, d)
        Rows are the lattice vectors e_i.
    dual : ndarray, shape (d, d)
        Rows are the dual vectors v_j, with <e_i, v_j> = 2 pi delta_ij.
    """

    basis: np.ndarray
    dual: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=float)
        d = basis.shape[0]
        if d not in (2, 3) or basis.shape != (d, d):
            raise ValueError("basis must be a square 2x2 or 3x3 matrix")
        object.__setattr__(self, "basis", basis)
        dual = self.dual
        if dual is None:
            dual = 2.0 * np.pi * np.linalg.inv(basis).T
        dual = np.asarray(dual, dtype=float)
        object.__setattr__(self, "dual", dual)
        pairing = basis @ dual.T
        if np.max(np.abs(pairing - 2.0 * np.pi * np.eye(d))) > 1e-12:
            raise ValueError("basis and dual fail the 2 pi pairing identity")

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @staticmethod
    def square(d: int = 2) -> "Lattice":
        return Lattice(np.eye(d))

    @staticmethod
    def triangular() -> "Lattice":
        """Unit triangular lattice, e1 = (1, 0) and e2 at 120 degrees."""
        return Lattice(np.array([[1.0, 0.0], [-0.5, 0.5 * np.sqrt(3.0)]]))

    def reduced(self, k: np.ndarray) -> np.ndarray:
        """Lattice coordinates t_i = <k, e_i> of a momentum vector."""
        return self.basis @ np.asarray(k, dtype=float)


DEFAULT_GRID_SIZE = {2: 32, 3: 16}


@dataclass(frozen=True)
class KGrid:
    """Uniform grid on the momentum torus.

    Nodes are k(m) = sum_i (m_i / N_i) v_i for m_i in 0..N_i - 1. The closed
    extension adds the wrapped layer m_i = N_i used for frame storage.
    """

    lattice: Lattice
    sizes: Tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.sizes)
        if len(sizes) != self.lattice.dim:
            raise ValueError("one grid size per torus dimension")
        if any(n < 2 for n in sizes):
            raise ValueError("grid sizes must be at least 2")
        object.__setattr__(self, "sizes", sizes)

    @staticmethod
    def standard(d: int = 2, size: Optional[int] = None, lattice: Optional[Lattice] = None) -> "KGrid":
        if lattice is None:
            lattice = Lattice.square(d)
        n = size if size is not None else DEFAULT_GRID_SIZE[d]
        return KGrid(lattice, (n,) * d)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.sizes

    @property
    def closed_shape(self) -> Tuple[int, ...]:
        return tuple(n + 1 for n in self.sizes)

    def frac(self, m: Sequence[int]) -> np.ndarray:
        return np.array([mi / ni for mi, ni in zip(m, self.sizes)], dtype=float)

    def node(self, m: Sequence[int]) -> np.ndarray:
        """Momentum vector at integer grid index m (closed indices allowed)."""
        return self.frac(m) @ self.lattice.dual

    def compatible(self, other: "KGrid") -> bool:
        return (
            self.sizes == other.sizes
            and np.allclose(self.lattice.basis, other.lattice.basis, atol=1e-12)
        )


def _check_compatible(a: KGrid, b: KGrid) -> None:
    if not a.compatible(b):
        raise GridMismatch("grids differ in lattice or node set")


@dataclass
class HermitianFamily:
    """Smooth family of Hermitian matrices over the momentum torus.

    Attributes
    ----------
    fiber_dim : int
        Matrix size n.
    func : callable
        Map from a momentum vector to an (n, n) Hermitian matrix.
    band_window : (float, float)
        Energy window selecting the bands of interest.
    tau : tuple of ndarray, optional
        Boundary unitaries, one per dual generator, satisfying
        H(k + v_j) = tau_j H(k) tau_j^dagger. None means H is periodic.
    unit_map : callable, optional
        Unit-vector map behind two-band models, for degree cross-checks.
    """

    fiber_dim: int
    func: Callable[[np.ndarray], np.ndarray]
    band_window: Tuple[float, float]
    tau: Optional[Tuple[np.ndarray, ...]] = None
    unit_map: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __call__(self, k: np.ndarray) -> np.ndarray:
        h = np.asarray(self.func(np.asarray(k, dtype=float)))
        if h.shape != (self.fiber_dim, self.fiber_dim):
            raise ValueError("family returned a matrix of the wrong size")
        return h

    def boundary_unitary(self, j: int) -> Optional[np.ndarray]:
        if self.tau is None:
            return None
        return self.tau[j]


@dataclass(frozen=True)
class RealStructure:
    """Antiunitary reality operator v -> S conj(v) squaring to the identity.

    S is unitary with S conj(S) = I, hence symmetric. The Takagi factor A
    satisfies A A^T = S and maps real vectors onto the fixed locus.
    """

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=complex)
        n = s.shape[0]
        if s.shape != (n, n):
            raise ValueError("square matrix required")
        if np.linalg.norm(s @ np.conj(s.T) - np.eye(n)) > 1e-10 * n:
            raise ValueError("reality operator must be unitary")
        if np.linalg.norm(s @ np.conj(s) - np.eye(n)) > 1e-10 * n:
            raise ValueError("reality operator must square to the identity")
        object.__setattr__(self, "s", s)

    @property
    def dim(self) -> int:
        return self.s.shape[0]

    @cached_property
    def takagi(self) -> np.ndarray:
        return takagi_symmetric_unitary(self.s)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Apply to vectors or frames indexed (..., n) or (..., n, r)."""
        v = np.asarray(v)
        if v.ndim >= 2 and v.shape[-2] == self.dim:
            return np.einsum("ij,...jr->...ir", self.s, np.conj(v))
        return np.einsum("ij,...j->...i", self.s, np.conj(v))

    @staticmethod
    def identity(n: int) -> "RealStructure":
        return RealStructure(np.eye(n, dtype=complex))


class ProjectorGrid:
    """Rank-r complex projector family sampled on a closed momentum grid.

    Parameters
    ----------
    kgrid : KGrid
        The underlying grid.
    frames : ndarray
        Orthonormal frames of shape closed_shape + (n, r).
    tau : tuple of ndarray, optional
        Boundary unitaries tying the wrapped layers to layer zero.
    unit_map : callable, optional
        Carried through from the family when present.
    """

    def __init__(
        self,
        kgrid: KGrid,
        frames: np.ndarray,
        tau: Optional[Tuple[np.ndarray, ...]] = None,
        unit_map: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    ):
        frames = np.asarray(frames, dtype=complex)
        expected = kgrid.closed_shape
        if frames.shape[: kgrid.dim] != expected or frames.ndim != kgrid.dim + 2:
            raise ValueError("frames must be stored on the closed grid")
        gram = np.einsum("...ia,...ib->...ab", np.conj(frames), frames)
        eye = np.eye(frames.shape[-1])
        if np.max(np.abs(gram - eye)) > ORTHONORMAL_TOL * 10:
            raise ValueError("frames must be orthonormal at every node")
        self.kgrid = kgrid
        self.frames = frames
        self.tau = tau
        self.unit_map = unit_map

    @property
    def rank(self) -> int:
        return self.frames.shape[-1]

    @property
    def ambient_dim(self) -> int:
        return self.frames.shape[-2]

    def frame_at(self, m: Sequence[int]) -> np.ndarray:
        return self.frames[tuple(m)]

    def projector_at(self, m: Sequence[int]) -> np.ndarray:
        f = self.frame_at(m)
        return f @ np.conj(f.T)


class RealProjectorGrid:
    """Real rank-r subbundle in a fixed reality-diagonalizing basis.

    Frames Y are real n x r matrices; the complex frame is A Y with A the
    Takagi factor of the reality operator. The oriented flag records whether
    the stored frames carry a consistent fiber orientation, which pins the
    sign of the Euler number for rank 2.
    """

    def __init__(
        self,
        kgrid: KGrid,
        structure: RealStructure,
        frames: np.ndarray,
        oriented: bool = False,
        tau: Optional[Tuple[np.ndarray, ...]] = None,
    ):
        frames = np.asarray(frames, dtype=float)
        expected = kgrid.closed_shape
        if frames.shape[: kgrid.dim] != expected or frames.ndim != kgrid.dim + 2:
            raise ValueError("frames must be stored on the closed grid")
        if frames.shape[-2] != structure.dim:
            raise ValueError("frame ambient dimension mismatches the reality operator")
        gram = np.einsum("...ia,...ib->...ab", frames, frames)
        eye = np.eye(frames.shape[-1])
        if np.max(np.abs(gram - eye)) > ORTHONORMAL_TOL * 10:
            raise ValueError("real frames must be orthonormal at every node")
        self.kgrid = kgrid
        self.structure = structure
        self.frames = frames
        self.oriented = oriented
        self.tau = tau

    @property
    def rank(self) -> int:
        return self.frames.shape[-1]

    @property
    def ambient_dim(self) -> int:
        return self.frames.shape[-2]

    def frame_at(self, m: Sequence[int]) -> np.ndarray:
        return self.frames[tuple(m)]

    def complex_frames(self) -> np.ndarray:
        """Frames as complex columns in the ambient basis, A Y."""
        a = self.structure.takagi
        return np.einsum("ij,...jr->...ir", a, self.frames.astype(complex))

    def real_projector_at(self, m: Sequence[int]) -> np.ndarray:
        y = self.frame_at(m)
        return y @ y.T

    def aligned_frames(self) -> np.ndarray:
        """Closed frames with wrap layers rebuilt from layer zero.

        Replaces each wrapped layer by the boundary image of layer zero
        (a plain copy when the identification is trivial), so cycle and
        seam computations close through the declared identification and
        shared edges cancel exactly.
        """
        kgrid = self.kgrid
        d = kgrid.dim
        out = self.frames.copy()
        for j in range(d):
            src = [slice(None)] * d
            dst = [slice(None)] * d
            src[j] = 0
            dst[j] = kgrid.sizes[j]
            layer = out[tuple(src)]
            if self.tau is not None and self.tau[j] is not None:
                layer = np.einsum("ij,...jr->...ir", self.tau[j], layer)
            out[tuple(dst)] = layer
        return out


def _fill_closed(kgrid: KGrid, interior: np.ndarray, tau: Optional[Tuple[np.ndarray, ...]]) -> np.ndarray:
    """Extend interior frames to the closed grid with tau-image wrap layers."""
    d = kgrid.dim
    closed = np.zeros(kgrid.closed_shape + interior.shape[d:], dtype=interior.dtype)
    closed[tuple(slice(0, n) for n in kgrid.sizes)] = interior
    for j in range(d):
        src = [slice(None)] * d
        dst = [slice(None)] * d
        src[j] = 0
        dst[j] = kgrid.sizes[j]
        layer = closed[tuple(src)]
        if tau is not None and tau[j] is not None:
            layer = np.einsum("ij,...jr->...ir", tau[j], layer)
        closed[tuple(dst)] = layer
    return closed


def sample_projector(family: HermitianFamily, kgrid: KGrid) -> ProjectorGrid:
    """Diagonalize the family on the grid and collect band-window frames.

    Raises RankDrift if the window holds a varying number of states,
    RankError if it is empty, and GapClosure when the spectral gap between
    the window and its complement falls below 1e-6 of the spectral radius.
    """
    lo, hi = family.band_window
    n = family.fiber_dim
    shape = kgrid.shape
    all_evals = np.zeros(shape + (n,))
    all_vecs = np.zeros(shape + (n, n), dtype=complex)
    for m in iter_index(shape):
        h = family(kgrid.node(m))
        evals, vecs = np.linalg.eigh(h)
        all_evals[m] = evals
        all_vecs[m] = vecs
    spectral_radius = float(np.max(np.abs(all_evals)))
    gap_tol = GAP_TOL_FACTOR * max(spectral_radius, 1e-300)

    counts = np.zeros(shape, dtype=int)
    for m in iter_index(shape):
        counts[m] = int(np.sum((all_evals[m] > lo) & (all_evals[m] < hi)))
    values, freq = np.unique(counts, return_counts=True)
    rank = int(values[np.argmax(freq)])
    for m in iter_index(shape):
        if counts[m] != rank:
            # A count mismatch at a near-degenerate node is a closing gap,
            # not a genuinely different band content.
            evals = all_evals[m]
            local_gap = float(np.min(np.diff(np.sort(evals)))) if n > 1 else np.inf
            if local_gap < gap_tol:
                raise GapClosure(m, local_gap)
            raise RankDrift(
                f"band window holds {rank} states typically but {counts[m]} at {m}"
            )
    if rank == 0:
        raise RankError("band window selects no states")

    frames = np.zeros(shape + (n, rank), dtype=complex)
    for m in iter_index(shape):
        evals = all_evals[m]
        inside = (evals > lo) & (evals < hi)
        sel = np.where(inside)[0]
        out = np.where(~inside)[0]
        if out.size:
            gap = float(np.min(np.abs(evals[sel][:, None] - evals[out][None, :])))
            if gap < gap_tol:
                raise GapClosure(m, gap)
        cols = [phase_fix(all_vecs[m][:, i]) for i in sel]
        frames[m] = np.stack(cols, axis=-1)

    closed = _fill_closed(kgrid, frames, family.tau)
    return ProjectorGrid(kgrid, closed, family.tau, unit_map=family.unit_map)


def sample_unit_map(family: HermitianFamily, kgrid: KGrid) -> np.ndarray:
    """Interior grid of the family's unit-vector map, for degree checks."""
    if family.unit_map is None:
        raise ValueError("family carries no unit-vector map")
    shape = kgrid.shape
    out = np.zeros(shape + (3,))
    for m in iter_index(shape):
        v = np.asarray(family.unit_map(kgrid.node(m)), dtype=float)
        out[m] = v / np.linalg.norm(v)
    return out


def verify_equivariance(
    family: HermitianFamily,
    kgrid: KGrid,
    count: int = 8,
    seed: int = 7,
) -> float:
    """Max projector mismatch between shifted-by-dual and tau-conjugated data.

    Returns the largest operator-norm residual over randomly chosen nodes
    and boundary directions. The comparison is projector against projector,
    so frame gauge freedom drops out.
    """
    rng = rng_for(seed, 0)
    lo, hi = family.band_window
    worst = 0.0
    for _ in range(count):
        m = tuple(int(rng.integers(0, s)) for s in kgrid.sizes)
        j = int(rng.integers(0, kgrid.dim))
        k = kgrid.node(m)
        v_j = kgrid.lattice.dual[j]
        p0 = _window_projector(family(k), lo, hi)
        p1 = _window_projector(family(k + v_j), lo, hi)
        u = family.boundary_unitary(j)
        if u is not None:
            p0 = u @ p0 @ np.conj(u.T)
        worst = max(worst, float(np.linalg.norm(p1 - p0, ord=2)))
    return worst


def _window_projector(h: np.ndarray, lo: float, hi: float) -> np.ndarray:
    evals, vecs = np.linalg.eigh(h)
    sel = (evals > lo) & (evals < hi)
    f = vecs[:, sel]
    return f @ np.conj(f.T)


def model_qwz(m: float) -> HermitianFamily:
    """Two-band square-lattice model with Chern transitions at |m| in {0, 2}.

    The lower band carries Chern number -1 for m in (0, 2), +1 for m in
    (-2, 0), and 0 for |m| > 2.
    """

    def nvec(k: np.ndarray) -> np.ndarray:
        k1, k2 = float(k[0]), float(k[1])
        return np.array([np.sin(k1), np.sin(k2), m - np.cos(k1) - np.cos(k2)])

    def h(k: np.ndarray) -> np.ndarray:
        n = nvec(k)
        return n[0] * PAULI[0] + n[1] * PAULI[1] + n[2] * PAULI[2]

    window = (-(abs(m) + 3.0), 0.0)
    return HermitianFamily(2, h, window, tau=None, unit_map=nvec)


def _qwz_unit(k1: float, k2: float) -> np.ndarray:
    n = np.array([np.sin(k1), np.sin(k2), 1.0 - np.cos(k1) - np.cos(k2)])
    return n / np.linalg.norm(n)


def model_nvec(target_degree: int) -> HermitianFamily:
    """Real four-band family whose lower rank-2 bundle has Euler number g.

    Built by realifying the two-band unit-vector Hamiltonian of a degree-g
    sphere map: the complex lower eigenline complexifies to a rank-2 real
    bundle with w1 = 0 and Euler number equal to the degree.
    """
    g = int(target_degree)
    if abs(g) > 4:
        raise ValueError("target degree limited to |g| <= 4")

    def nvec(k: np.ndarray) -> np.ndarray:
        return _qwz_unit(-g * float(k[0]), float(k[1]))

    def h(k: np.ndarray) -> np.ndarray:
        n = nvec(k)
        hc = n[0] * PAULI[0] + n[1] * PAULI[1] + n[2] * PAULI[2]
        return realify_operator(hc)

    return HermitianFamily(4, h, (-2.0, 0.0), tau=None, unit_map=nvec)


def _lower_eigenvector(n: np.ndarray) -> np.ndarray:
    """Analytic lower eigenvector of n.sigma for a unit vector n.

    Two patches keep the formula regular everywhere; the phase convention
    is fixed separately, so only the span matters here.
    """
    n1, n2, n3 = float(n[0]), float(n[1]), float(n[2])
    if n3 <= 0.0:
        v = np.array([n3 - 1.0, n1 + 1j * n2], dtype=complex)
    else:
        v = np.array([-(n1 - 1j * n2), n3 + 1.0], dtype=complex)
    return v / np.linalg.norm(v)


def nvec_real_bundle(target_degree: int, kgrid: KGrid) -> RealProjectorGrid:
    """Oriented real rank-2 bundle of the degree-g family on a grid.

    Frames are the realified pair (v, iv) of the phase-fixed complex lower
    eigenvector, which orients every fiber consistently and makes the Euler
    number equal +g with a fixed sign convention.
    """
    family = model_nvec(target_degree)
    if kgrid.dim != 2:
        raise ValueError("this model lives on a two dimensional torus")
    shape = kgrid.shape
    frames = np.zeros(shape + (4, 2))
    for m in iter_index(shape):
        n = family.unit_map(kgrid.node(m))
        v = phase_fix(_lower_eigenvector(n))
        frames[m][:, 0] = np.concatenate([np.real(v), np.imag(v)])
        frames[m][:, 1] = np.concatenate([np.real(1j * v), np.imag(1j * v)])
    closed = _fill_closed(kgrid, frames, None)
    return RealProjectorGrid(kgrid, RealStructure.identity(4), closed, oriented=True)


def model_line_lc(c: Sequence[int], kgrid: KGrid) -> RealProjectorGrid:
    """Real line bundle with holonomy signs (-1)^(c_j) around the torus cycles.

    The frame rotates by half the pairing angle, so odd components of c give
    an antiperiodic frame whose wrapped layers carry the sign explicitly.
    """
    c = np.asarray([int(x) for x in c])
    d = kgrid.dim
    if c.shape != (d,):
        raise ValueError("one integer label per torus dimension")
    closed = np.zeros(kgrid.closed_shape + (2, 1))
    for m in iter_index(kgrid.closed_shape):
        theta = np.pi * float(sum(ci * mi / ni for ci, mi, ni in zip(c, m, kgrid.sizes)))
        closed[m][:, 0] = (np.cos(theta), -np.sin(theta))
    return RealProjectorGrid(kgrid, RealStructure.identity(2), closed, oriented=False)


def direct_sum(a, b):
    """Blockwise direct sum of two projector grids over the same grid."""
    _check_compatible(a.kgrid, b.kgrid)
    if isinstance(a, RealProjectorGrid) and isinstance(b, RealProjectorGrid):
        s = _blockdiag(a.structure.s, b.structure.s)
        structure = RealStructure(s)
        fa = a.complex_frames()
        fb = b.complex_frames()
        shape = a.kgrid.closed_shape
        n = a.ambient_dim + b.ambient_dim
        r = a.rank + b.rank
        frames_c = np.zeros(shape + (n, r), dtype=complex)
        frames_c[..., : a.ambient_dim, : a.rank] = fa
        frames_c[..., a.ambient_dim :, a.rank :] = fb
        y = np.einsum("ij,...jr->...ir", np.conj(structure.takagi.T), frames_c)
        if np.max(np.abs(np.imag(y))) > REALITY_TOL:
            raise SymmetryViolation("direct sum frames failed to realify")
        tau = None
        if a.tau is not None or b.tau is not None:
            tau = tuple(
                _blockdiag(
                    a.tau[j] if a.tau is not None else np.eye(a.ambient_dim),
                    b.tau[j] if b.tau is not None else np.eye(b.ambient_dim),
                )
                for j in range(a.kgrid.dim)
            )
        return RealProjectorGrid(a.kgrid, structure, np.real(y), oriented=False, tau=tau)
    if isinstance(a, ProjectorGrid) and isinstance(b, ProjectorGrid):
        shape = a.kgrid.closed_shape
        n = a.ambient_dim + b.ambient_dim
        r = a.rank + b.rank
        frames = np.zeros(shape + (n, r), dtype=complex)
        frames[..., : a.ambient_dim, : a.rank] = a.frames
        frames[..., a.ambient_dim :, a.rank :] = b.frames
        tau = None
        if a.tau is not None or b.tau is not None:
            tau = tuple(
                _blockdiag(
                    a.tau[j] if a.tau is not None else np.eye(a.ambient_dim),
                    b.tau[j] if b.tau is not None else np.eye(b.ambient_dim),
                )
                for j in range(a.kgrid.dim)
            )
        return ProjectorGrid(a.kgrid, frames, tau)
    raise TypeError("direct sum needs two grids of the same kind")


def _blockdiag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n + m, n + m), dtype=np.result_type(a, b))
    out[:n, :n] = a
    out[n:, n:] = b
    return out


def tensor_line(e: RealProjectorGrid, c: Sequence[int]) -> RealProjectorGrid:
    """Twist a real bundle by the line with holonomy label c.

    The ambient space doubles and each frame column tensors with the
    rotating line frame. The reality operator becomes S kron I_2.
    """
    c = np.asarray([int(x) for x in c])
    kgrid = e.kgrid
    if c.shape != (kgrid.dim,):
        raise ValueError("one integer label per torus dimension")
    line = model_line_lc(c, kgrid)
    structure = RealStructure(np.kron(e.structure.s, np.eye(2)))
    shape = kgrid.closed_shape
    n = e.ambient_dim * 2
    frames = np.zeros(shape + (n, e.rank))
    for m in iter_index(shape):
        f = line.frames[m][:, 0]
        for a in range(e.rank):
            frames[m][:, a] = np.kron(e.frames[m][:, a], f)
    tau = None
    if e.tau is not None:
        tau = tuple(np.kron(t, np.eye(2)) for t in e.tau)
    return RealProjectorGrid(kgrid, structure, frames, oriented=False, tau=tau)


def real_subbundle(e: ProjectorGrid, structure: RealStructure) -> RealProjectorGrid:
    """Extract the real form of a projector family fixed by a reality operator.

    Checks the commutator of the projector with the operator, then rotates
    each frame by the Takagi square root of its reality Gram matrix and
    expresses it in the basis where the fixed locus is the real subspace.
    """
    if structure.dim != e.ambient_dim:
        raise ValueError("reality operator size mismatches the ambient space")
    a_amb = structure.takagi
    shape = e.kgrid.closed_shape
    frames_y = np.zeros(shape + (e.ambient_dim, e.rank))
    for m in iter_index(shape):
        f = e.frames[m]
        p = f @ np.conj(f.T)
        sp = structure.s @ np.conj(p) - p @ structure.s
        if np.linalg.norm(sp, ord=2) > COMMUTANT_TOL:
            raise SymmetryViolation(
                f"projector fails to commute with the reality operator at {m}"
            )
        s_f = np.conj(f.T) @ structure.s @ np.conj(f)
        b = takagi_symmetric_unitary(s_f)
        g = f @ b
        y = np.conj(a_amb.T) @ g
        if np.max(np.abs(np.imag(y))) > REALITY_TOL:
            raise SymmetryViolation(f"fixed-locus frame failed to realify at {m}")
        frames_y[m] = np.real(y)
    tau_real = None
    if e.tau is not None:
        taus = []
        for t in e.tau:
            tr = np.conj(a_amb.T) @ t @ a_amb
            if np.max(np.abs(np.imag(tr))) > COMMUTANT_TOL:
                raise SymmetryViolation("boundary unitary incompatible with the reality operator")
            taus.append(np.real(tr))
        tau_real = tuple(taus)
    return RealProjectorGrid(e.kgrid, structure, frames_y, oriented=False, tau=tau_real)


def apply_gauge(e: ProjectorGrid, phases: np.ndarray) -> ProjectorGrid:
    """Multiply interior frames by per-node unitaries, mirrored to wrap layers.

    The gauge array has interior shape plus (r, r). Wrapped copies inherit
    the gauge of the node they identify with, so closed-grid consistency is
    preserved and integer invariants must not move.
    """
    kgrid = e.kgrid
    r = e.rank
    if phases.shape != kgrid.shape + (r, r):
        raise ValueError("gauge array must be interior-shaped with r x r blocks")
    closed = np.zeros(kgrid.closed_shape + (r, r), dtype=complex)
    closed[tuple(slice(0, n) for n in kgrid.sizes)] = phases
    for j in range(kgrid.dim):
        src = [slice(None)] * kgrid.dim
        dst = [slice(None)] * kgrid.dim
        src[j] = 0
        dst[j] = kgrid.sizes[j]
        closed[tuple(dst)] = closed[tuple(src)]
    new_frames = np.einsum("...ir,...rs->...is", e.frames, closed)
    return ProjectorGrid(kgrid, new_frames, e.tau, unit_map=e.unit_map)


def apply_real_gauge(e: RealProjectorGrid, rotations: np.ndarray) -> RealProjectorGrid:
    """Same as apply_gauge but with orthogonal blocks acting on real frames."""
    kgrid = e.kgrid
    r = e.rank
    if rotations.shape != kgrid.shape + (r, r):
        raise ValueError("gauge array must be interior-shaped with r x r blocks")
    closed = np.zeros(kgrid.closed_shape + (r, r))
    closed[tuple(slice(0, n) for n in kgrid.sizes)] = rotations
    for j in range(kgrid.dim):
        src = [slice(None)] * kgrid.dim
        dst = [slice(None)] * kgrid.dim
        src[j] = 0
        dst[j] = kgrid.sizes[j]
        closed[tuple(dst)] = closed[tuple(src)]
    new_frames = np.einsum("...ir,...rs->...is", e.frames, closed)
    still_oriented = e.oriented and bool(np.all(np.linalg.det(rotations) > 0))
    return RealProjectorGrid(kgrid, e.structure, new_frames, oriented=still_oriented, tau=e.tau)
