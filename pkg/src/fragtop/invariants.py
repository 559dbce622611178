"""Integer and mod-2 invariants of projector bundles on momentum grids.

All integer outputs come from sums of branch-wrapped angles. On a closed
grid every shared edge contributes twice with opposite signs, so the total
is an exact multiple of 2 pi up to float rounding and the final rounding
step is certified by a residual check rather than hoped for.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ._util import rng_for, wrap_angle
from .bundles import ProjectorGrid, RealProjectorGrid
from .errors import (
    DegenerateTriangle,
    NotOrientable,
    PlaquetteDegenerate,
    RankError,
    SectionVanishes,
)

LINK_DET_TOL = 1e-8
INTEGER_RESIDUAL_TOL = 1e-6
SECTION_TOL = 1e-3
SECTION_RETRIES = 16
SECTION_SEED = 20240

PlaneName = Tuple[int, int]


def _plane_axes(d: int, plane: PlaneName) -> Tuple[int, int]:
    i, j = int(plane[0]), int(plane[1])
    if not (1 <= i < j <= d):
        raise ValueError(f"plane {plane} does not exist on a {d}-torus")
    return i - 1, j - 1


def plane_names(d: int) -> List[PlaneName]:
    return [(i + 1, j + 1) for i, j in itertools.combinations(range(d), 2)]


def plane_key(plane: PlaneName) -> str:
    return f"{plane[0]}{plane[1]}"


def _closed_slice(frames: np.ndarray, d: int, axes: Tuple[int, int]) -> np.ndarray:
    """2D closed-grid slice through the origin of the remaining axes."""
    idx: List[Union[int, slice]] = [0] * d
    idx[axes[0]] = slice(None)
    idx[axes[1]] = slice(None)
    sliced = frames[tuple(idx)]
    if axes[0] > axes[1]:
        sliced = np.swapaxes(sliced, 0, 1)
    return sliced


def _chain(frames: np.ndarray, d: int, axis: int, offsets: Sequence[int]) -> np.ndarray:
    idx: List[Union[int, slice]] = list(offsets)
    idx[axis] = slice(None)
    return frames[tuple(idx)]


@dataclass(frozen=True)
class ChernRecord:
    """First Chern numbers of a complex bundle, one per coordinate plane.

    Attributes
    ----------
    values : dict
        Plane key like ``"12"`` to the integer Chern number of the slice
        through the origin in that plane.
    """

    values: Dict[str, int]

    def get(self, plane: PlaneName) -> int:
        return self.values[plane_key(plane)]

    @property
    def total_vanishes(self) -> bool:
        return all(v == 0 for v in self.values.values())


@dataclass(frozen=True)
class SWClassData:
    """First and second mod-2 classes measured from holonomy data.

    Attributes
    ----------
    w1 : tuple of int
        Component j is the holonomy sign bit around the j-th cycle.
    w2 : dict
        Plane key to the mod-2 class of that coordinate plane slice.
    """

    w1: Tuple[int, ...]
    w2: Dict[str, int]

    @property
    def orientable(self) -> bool:
        return not any(self.w1)


@dataclass(frozen=True)
class EulerRecord:
    """Euler number of an oriented rank-2 real bundle on a plane slice."""

    value: int
    plane: PlaneName = (1, 2)


def _plaquette_angle_sum(
    f00: np.ndarray, f10: np.ndarray, f11: np.ndarray, f01: np.ndarray, node
) -> float:
    """Wrapped argument of the counterclockwise link-determinant product."""
    z = 1.0 + 0.0j
    for a, b in ((f00, f10), (f10, f11), (f11, f01), (f01, f00)):
        det = np.linalg.det(np.conj(a.T) @ b)
        if abs(det) < LINK_DET_TOL:
            raise PlaquetteDegenerate(f"link determinant {abs(det):.3e} at plaquette {node}")
        z *= det / abs(det)
    return float(np.angle(z))


def _round_integer(total_over_2pi: float, what: str) -> int:
    value = int(np.rint(total_over_2pi))
    if abs(total_over_2pi - value) > INTEGER_RESIDUAL_TOL:
        raise ArithmeticError(
            f"{what} sum {total_over_2pi!r} is not integral; grid data inconsistent"
        )
    return value


def chern_number(e: ProjectorGrid, plane: PlaneName = (1, 2)) -> int:
    """Integer Chern number of the plane slice through the origin.

    Sums branch-wrapped plaquette phases of link-determinant products; the
    total telescopes to an exact multiple of 2 pi on the closed grid.
    """
    d = e.kgrid.dim
    axes = _plane_axes(d, plane)
    frames = _closed_slice(e.frames, d, axes)
    n1 = e.kgrid.sizes[axes[0]]
    n2 = e.kgrid.sizes[axes[1]]
    total = 0.0
    for m1 in range(n1):
        for m2 in range(n2):
            total += _plaquette_angle_sum(
                frames[m1, m2], frames[m1 + 1, m2], frames[m1 + 1, m2 + 1], frames[m1, m2 + 1],
                (m1, m2),
            )
    return _round_integer(-total / (2.0 * np.pi), "plaquette phase")


def chern_record(e: ProjectorGrid) -> ChernRecord:
    d = e.kgrid.dim
    return ChernRecord({plane_key(p): chern_number(e, p) for p in plane_names(d)})


def berry_phase(e, cycle_direction: int, transverse_offset: Optional[Sequence[int]] = None) -> float:
    """Berry phase in [0, 2 pi) of a rank-1 family around a torus cycle.

    Works on any object holding closed-grid frames (a projector grid or a
    frame field). Per-node phase choices cancel in the overlap product, so
    the result is gauge invariant to rounding.
    """
    frames = np.asarray(e.frames)
    kgrid = e.kgrid
    d = kgrid.dim
    if frames.shape[-1] != 1:
        raise RankError("berry phase needs a rank-1 family")
    axis = int(cycle_direction) - 1
    if not 0 <= axis < d:
        raise ValueError("cycle direction out of range")
    offsets = [0] * d if transverse_offset is None else list(transverse_offset)
    chain = _chain(frames, d, axis, offsets)[..., 0]
    n = kgrid.sizes[axis]
    z = 1.0 + 0.0j
    for m in range(n):
        ov = np.vdot(chain[m], chain[m + 1])
        if abs(ov) < LINK_DET_TOL:
            raise PlaquetteDegenerate(f"overlap collapsed on link {m} of cycle {cycle_direction}")
        z *= ov / abs(ov)
    return float(np.mod(-np.angle(z), 2.0 * np.pi))


def w1_bits(e: RealProjectorGrid) -> Tuple[int, ...]:
    """Orientation holonomy bits, one per torus cycle through the origin.

    Cycles close through the bundle's boundary identification, so the final
    link compares transported data against the identified base frame.
    """
    kgrid = e.kgrid
    d = kgrid.dim
    aligned = e.aligned_frames()
    bits = []
    for axis in range(d):
        chain = _chain(aligned, d, axis, [0] * d)
        sign = 1.0
        for m in range(kgrid.sizes[axis]):
            det = np.linalg.det(chain[m].T @ chain[m + 1])
            if abs(det) < LINK_DET_TOL:
                raise PlaquetteDegenerate(f"frame overlap degenerate on cycle {axis + 1}")
            sign *= np.sign(det)
        bits.append(0 if sign > 0 else 1)
    return tuple(bits)


def _orient_slice(frames: np.ndarray) -> np.ndarray:
    """Flip second columns so every link determinant is positive.

    Possible exactly when the slice is orientable; a leftover negative link
    after propagation means it is not.
    """
    out = frames.copy()
    n1 = out.shape[0] - 1
    n2 = out.shape[1] - 1

    def link_det(a, b) -> float:
        return float(np.linalg.det(a.T @ b))

    for m1 in range(1, n1 + 1):
        if link_det(out[m1 - 1, 0], out[m1, 0]) < 0:
            out[m1, 0, :, 1] *= -1.0
    for m1 in range(n1 + 1):
        for m2 in range(1, n2 + 1):
            if link_det(out[m1, m2 - 1], out[m1, m2]) < 0:
                out[m1, m2, :, 1] *= -1.0
    for m1 in range(n1 + 1):
        for m2 in range(n2 + 1):
            if m1 < n1 and link_det(out[m1, m2], out[m1 + 1, m2]) < 0:
                raise NotOrientable("orientation fails to propagate across the slice")
    return out


def _link_angle(a: np.ndarray, b: np.ndarray, where: str) -> float:
    """Rotation angle of the orthogonal alignment between oriented frames."""
    o = a.T @ b
    num = o[1, 0] - o[0, 1]
    den = o[0, 0] + o[1, 1]
    if num * num + den * den < LINK_DET_TOL**2:
        raise PlaquetteDegenerate(f"alignment angle undefined at {where}")
    return float(np.arctan2(num, den))


def euler_number(e: RealProjectorGrid, plane: PlaneName = (1, 2)) -> EulerRecord:
    """Euler number of an oriented rank-2 slice through the origin.

    Raises RankError off rank 2 and NotOrientable when the slice has
    nonzero w1. Unoriented inputs get an orientation propagated from the
    origin, which fixes the overall sign only up to convention; bundles
    built by oriented constructors keep their stored orientation.
    """
    if e.rank != 2:
        raise RankError("euler number needs a rank-2 bundle")
    d = e.kgrid.dim
    axes = _plane_axes(d, plane)
    w1 = w1_bits(e)
    if w1[axes[0]] or w1[axes[1]]:
        raise NotOrientable("slice has nonzero w1")
    frames = _closed_slice(e.aligned_frames(), d, axes)
    if not e.oriented:
        frames = _orient_slice(frames)
    n1 = e.kgrid.sizes[axes[0]]
    n2 = e.kgrid.sizes[axes[1]]
    total = 0.0
    for m1 in range(n1):
        for m2 in range(n2):
            s = (
                _link_angle(frames[m1, m2], frames[m1 + 1, m2], (m1, m2))
                + _link_angle(frames[m1 + 1, m2], frames[m1 + 1, m2 + 1], (m1, m2))
                + _link_angle(frames[m1 + 1, m2 + 1], frames[m1, m2 + 1], (m1, m2))
                + _link_angle(frames[m1, m2 + 1], frames[m1, m2], (m1, m2))
            )
            total += wrap_angle(s)
    value = _round_integer(-total / (2.0 * np.pi), "euler angle")
    return EulerRecord(value, plane)


def _slice_w1_bits(frames: np.ndarray) -> Tuple[int, int]:
    """w1 of a 2D closed slice along its two boundary cycles."""
    bits = []
    for axis in range(2):
        chain = frames[:, 0] if axis == 0 else frames[0, :]
        sign = 1.0
        n = chain.shape[0] - 1
        for m in range(n):
            det = np.linalg.det(chain[m].T @ chain[m + 1])
            if abs(det) < LINK_DET_TOL:
                raise PlaquetteDegenerate("frame overlap degenerate on slice cycle")
            sign *= np.sign(det)
        bits.append(0 if sign > 0 else 1)
    return bits[0], bits[1]


def _polar_orthogonal(m: np.ndarray) -> np.ndarray:
    u, _, vh = np.linalg.svd(m)
    return u @ vh


def _section_on_slice(frames: np.ndarray, seed_tag: int, attempt: int) -> np.ndarray:
    """Generic real section of the slice bundle, normalized per node.

    Returns coordinates in the stored frames, shape grid + (r,). Raises
    SectionVanishes when the projected seed vector collapses at some node.
    """
    n = frames.shape[-2]
    rng = rng_for(SECTION_SEED, seed_tag, attempt)
    xi = rng.standard_normal(n)
    xi /= np.linalg.norm(xi)
    coords = np.einsum("...ir,i->...r", frames, xi)
    norms = np.linalg.norm(coords, axis=-1)
    if float(np.min(norms)) < SECTION_TOL:
        raise SectionVanishes("generic section collapses on the grid")
    return coords / norms[..., None]


def _rank2_zero_count_parity(frames: np.ndarray, seed_tag: int) -> int:
    """Mod-2 zero count of a generic section of a rank-2 slice bundle.

    Walks each plaquette in transported frame coordinates and accumulates
    the winding of the section around zero. Branch fidelity needs section
    corners away from zero, so degenerate seeds are retried.
    """
    n1 = frames.shape[0] - 1
    n2 = frames.shape[1] - 1
    last_err: Optional[Exception] = None
    for attempt in range(SECTION_RETRIES):
        try:
            coords = _section_on_slice(frames, seed_tag, attempt)
        except SectionVanishes as err:
            last_err = err
            continue
        total = 0
        ok = True
        for m1 in range(n1):
            for m2 in range(n2):
                corners = [(m1, m2), (m1 + 1, m2), (m1 + 1, m2 + 1), (m1, m2 + 1)]
                etas = [coords[corners[0]]]
                transport = np.eye(2)
                for a, b in zip(corners, corners[1:] + corners[:1]):
                    t = _polar_orthogonal(frames[a].T @ frames[b])
                    transport = transport @ t
                    etas.append(transport @ coords[b])
                if min(float(np.linalg.norm(v)) for v in etas) < SECTION_TOL:
                    ok = False
                    break
                angles = [np.arctan2(v[1], v[0]) for v in etas]
                swept = sum(wrap_angle(b - a) for a, b in zip(angles, angles[1:]))
                total += int(np.rint(swept / (2.0 * np.pi)))
            if not ok:
                break
        if ok:
            return total % 2
        last_err = SectionVanishes("section too close to zero at a plaquette corner")
    raise last_err if last_err is not None else SectionVanishes("no usable section found")


def _complement_frames(frames: np.ndarray, coords: np.ndarray) -> np.ndarray:
    """Orthonormal frames of the complement of a unit section, per node."""
    grid_shape = frames.shape[:-2]
    n, r = frames.shape[-2:]
    out = np.zeros(grid_shape + (n, r - 1))
    for m in np.ndindex(*grid_shape):
        y = frames[m]
        s = y @ coords[m]
        p_perp = y @ y.T - np.outer(s, s)
        u, sv, _ = np.linalg.svd(p_perp)
        if sv[r - 2] < 0.5 or (r - 1 < n and sv[r - 1] > 0.5):
            raise ArithmeticError("complement projector rank unexpected")
        out[m] = u[:, : r - 1]
    return out


def _w2_slice(frames: np.ndarray, seed_tag: int) -> int:
    """Mod-2 second class of a closed 2D slice of real frames."""
    r = frames.shape[-1]
    if r == 1:
        return 0
    if r == 2:
        return _rank2_zero_count_parity(frames, seed_tag)
    last_err: Optional[Exception] = None
    for attempt in range(SECTION_RETRIES):
        try:
            coords = _section_on_slice(frames, seed_tag + 101 * attempt, attempt)
            comp = _complement_frames(frames, coords)
        except (SectionVanishes, ArithmeticError) as err:
            last_err = err
            continue
        line = np.einsum("...ir,...r->...i", frames, coords)[..., None]
        alpha = _slice_w1_bits(line)
        gamma = _slice_w1_bits(comp)
        cross = (alpha[0] * gamma[1] + alpha[1] * gamma[0]) % 2
        return (_w2_slice(comp, seed_tag + 1) + cross) % 2
    raise last_err if last_err is not None else SectionVanishes("no usable section found")


def sw_class_data(e: RealProjectorGrid) -> SWClassData:
    """Measure w1 and per-plane w2 of a real bundle from its frames."""
    d = e.kgrid.dim
    w1 = w1_bits(e)
    aligned = e.aligned_frames()
    w2: Dict[str, int] = {}
    for idx, plane in enumerate(plane_names(d)):
        axes = _plane_axes(d, plane)
        frames = _closed_slice(aligned, d, axes)
        w2[plane_key(plane)] = _w2_slice(frames, seed_tag=idx)
    return SWClassData(w1, w2)


def degree_oracle(vectors: np.ndarray) -> int:
    """Degree of a unit-vector map on the 2-torus via summed solid angles.

    Each grid plaquette splits into two spherical triangles whose signed
    solid angles come from the half-angle arctangent formula. The sum over
    the torus is 4 pi times the degree.
    """
    v = np.asarray(vectors, dtype=float)
    if v.ndim != 3 or v.shape[2] != 3:
        raise ValueError("expected an (N1, N2, 3) array of vectors")
    norms = np.linalg.norm(v, axis=2)
    if np.max(np.abs(norms - 1.0)) > 1e-9:
        raise ValueError("vectors must be unit length")
    n1, n2 = v.shape[:2]
    total = 0.0
    for m1 in range(n1):
        for m2 in range(n2):
            p00 = v[m1, m2]
            p10 = v[(m1 + 1) % n1, m2]
            p11 = v[(m1 + 1) % n1, (m2 + 1) % n2]
            p01 = v[m1, (m2 + 1) % n2]
            total += _solid_angle(p00, p10, p11)
            total += _solid_angle(p00, p11, p01)
    return _round_integer(total / (4.0 * np.pi), "solid angle")


def _solid_angle(a: np.ndarray, b: np.ndarray, c: np.ndarray) -> float:
    num = float(np.dot(a, np.cross(b, c)))
    den = float(1.0 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a))
    if num * num + den * den < 1e-20:
        raise DegenerateTriangle("solid angle undefined for antipodal triangle data")
    return 2.0 * float(np.arctan2(num, den))


def invariants_report(e: Union[ProjectorGrid, RealProjectorGrid]) -> Dict[str, object]:
    """Full invariant report with nulls where a field does not apply.

    Complex bundles report Chern numbers; real bundles report w1, w2,
    orientability, and the Euler number when rank 2 and orientable.
    """
    d = e.kgrid.dim
    planes = [plane_key(p) for p in plane_names(d)]
    report: Dict[str, object] = {
        "chern": {p: None for p in planes},
        "w1": None,
        "w2": {p: None for p in planes},
        "euler": None,
        "orientable": None,
    }
    if isinstance(e, ProjectorGrid):
        rec = chern_record(e)
        report["chern"] = {p: int(rec.values[p]) for p in planes}
        return report
    sw = sw_class_data(e)
    report["w1"] = list(sw.w1)
    report["w2"] = {p: int(sw.w2[p]) for p in planes}
    report["orientable"] = sw.orientable
    if e.rank == 2 and sw.orientable:
        if d == 2:
            report["euler"] = int(euler_number(e).value)
        else:
            report["euler"] = {
                plane_key(p): int(euler_number(e, p).value) for p in plane_names(d)
            }
    return report
