"""Integer and mod-2 invariant tests against independent expectations.

Chern expectations come from the solid-angle degree oracle, which shares no
code with the plaquette algorithm. Euler and Stiefel-Whitney expectations
come from closed-form line-bundle data and the Whitney formula.
"""

from __future__ import annotations

from types import SimpleNamespace

import numpy as np
import pytest

from fragtop._util import rng_for
from fragtop.bundles import (
    KGrid,
    ProjectorGrid,
    apply_gauge,
    apply_real_gauge,
    direct_sum,
    model_line_lc,
    model_qwz,
    nvec_real_bundle,
    sample_projector,
    sample_unit_map,
)
from fragtop.errors import (
    DegenerateTriangle,
    NotOrientable,
    PlaquetteDegenerate,
    RankError,
)
from fragtop.invariants import (
    berry_phase,
    chern_number,
    chern_record,
    degree_oracle,
    euler_number,
    invariants_report,
    sw_class_data,
    w1_bits,
)

QWZ_CHERN = [(-3.0, 0), (-1.0, 1), (1.0, -1), (3.0, 0)]


class TestDegreeOracle:
    def test_constant_map_degree_zero(self):
        v = np.zeros((8, 8, 3))
        v[..., 2] = 1.0
        assert degree_oracle(v) == 0

    @pytest.mark.parametrize("m,want", QWZ_CHERN)
    def test_qwz_unit_maps(self, m, want):
        grid = KGrid.standard(2, 16)
        assert degree_oracle(sample_unit_map(model_qwz(m), grid)) == want

    def test_resolution_independent(self):
        fam = model_qwz(1.0)
        d32 = degree_oracle(sample_unit_map(fam, KGrid.standard(2, 32)))
        d64 = degree_oracle(sample_unit_map(fam, KGrid.standard(2, 64)))
        assert d32 == d64 == -1

    def test_nonunit_rejected(self):
        v = np.ones((4, 4, 3))
        with pytest.raises(ValueError):
            degree_oracle(v)

    def test_antipodal_data_degenerate(self):
        v = np.zeros((2, 2, 3))
        v[0, 0] = [0.0, 0.0, 1.0]
        v[1, 0] = [0.0, 0.0, -1.0]
        v[0, 1] = [1.0, 0.0, 0.0]
        v[1, 1] = [-1.0, 0.0, 0.0]
        with pytest.raises(DegenerateTriangle):
            degree_oracle(v)


class TestChern:
    @pytest.mark.parametrize("m,want", QWZ_CHERN)
    def test_qwz_table(self, m, want):
        e = sample_projector(model_qwz(m), KGrid.standard(2, 16))
        assert chern_number(e) == want

    @pytest.mark.parametrize("m", [-1.0, 1.0, 3.0])
    def test_matches_degree_oracle(self, m):
        grid = KGrid.standard(2, 16)
        e = sample_projector(model_qwz(m), grid)
        assert chern_number(e) == degree_oracle(sample_unit_map(model_qwz(m), grid))

    def test_gauge_invariance_bit_identical(self):
        grid = KGrid.standard(2, 12)
        e = sample_projector(model_qwz(1.0), grid)
        rng = rng_for(11, 3)
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, grid.shape))[..., None, None]
        before = chern_number(e)
        after = chern_number(apply_gauge(e, phases.astype(complex)))
        assert before == after == -1

    def test_record_covers_all_planes(self):
        e = sample_projector(model_qwz(1.0), KGrid.standard(2, 8))
        rec = chern_record(e)
        assert set(rec.values) == {"12"}
        assert rec.get((1, 2)) == -1

    def test_degenerate_plaquette_raises(self):
        grid = KGrid.standard(2, 2)
        frames = np.zeros(grid.closed_shape + (2, 1), dtype=complex)
        for m1 in range(3):
            for m2 in range(3):
                frames[m1, m2, (m1 + m2) % 2, 0] = 1.0
        e = ProjectorGrid(grid, frames)
        with pytest.raises(PlaquetteDegenerate):
            chern_number(e)


def _line_section_frames(c, grid):
    """Closed-grid frames of the symmetry-compatible unit section of L_c."""
    frames = np.zeros(grid.closed_shape + (2, 1), dtype=complex)
    for m in np.ndindex(*grid.closed_shape):
        theta = np.pi * sum(ci * mi / ni for ci, mi, ni in zip(c, m, grid.sizes))
        frames[m][:, 0] = np.exp(-1j * theta) * np.array([np.cos(theta), -np.sin(theta)])
    return SimpleNamespace(frames=frames, kgrid=grid)


class TestBerryPhase:
    def test_line_section_phases(self):
        grid = KGrid.standard(2, 16)
        sec = _line_section_frames((1, 0), grid)
        assert berry_phase(sec, 1) == pytest.approx(np.pi, abs=1e-9)
        assert berry_phase(sec, 2) == pytest.approx(0.0, abs=1e-9)

    def test_offset_independence(self):
        grid = KGrid.standard(2, 12)
        sec = _line_section_frames((1, 1), grid)
        phases = [berry_phase(sec, 1, (0, t)) for t in (0, 3, 7)]
        assert np.ptp(phases) < 1e-9
        assert phases[0] == pytest.approx(np.pi, abs=1e-9)

    def test_rank_guard(self):
        e = sample_projector(model_qwz(1.0), KGrid.standard(2, 8))
        two = direct_sum(e, e)
        with pytest.raises(RankError):
            berry_phase(two, 1)


class TestW1:
    @pytest.mark.parametrize("c", [(0, 0), (1, 0), (0, 1), (1, 1)])
    def test_line_labels(self, c):
        assert w1_bits(model_line_lc(c, KGrid.standard(2, 12))) == c

    @pytest.mark.parametrize("c", [(1, 0, 1), (0, 1, 0), (1, 1, 1)])
    def test_t3_line_labels(self, c):
        assert w1_bits(model_line_lc(c, KGrid.standard(3, 6))) == c

    def test_whitney_additivity(self):
        g = KGrid.standard(2, 12)
        s = direct_sum(model_line_lc((1, 0), g), model_line_lc((1, 1), g))
        assert w1_bits(s) == (0, 1)


class TestEuler:
    @pytest.mark.parametrize("g", [-2, -1, 0, 1, 2])
    def test_oriented_value_single_sign(self, g):
        b = nvec_real_bundle(g, KGrid.standard(2, 24))
        assert euler_number(b).value == g

    def test_rank_guard(self):
        line = model_line_lc((0, 0), KGrid.standard(2, 8))
        with pytest.raises(RankError):
            euler_number(line)

    def test_not_orientable(self):
        g = KGrid.standard(2, 12)
        s = direct_sum(model_line_lc((1, 0), g), model_line_lc((0, 1), g))
        with pytest.raises(NotOrientable):
            euler_number(s)

    def test_rotation_gauge_keeps_value(self):
        grid = KGrid.standard(2, 16)
        b = nvec_real_bundle(2, grid)
        rng = rng_for(4, 9)
        rots = np.zeros(grid.shape + (2, 2))
        for m in np.ndindex(*grid.shape):
            t = rng.uniform(0, 2 * np.pi)
            rots[m] = [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]
        assert euler_number(apply_real_gauge(b, rots)).value == 2

    def test_orientation_scramble_keeps_magnitude(self):
        grid = KGrid.standard(2, 16)
        b = nvec_real_bundle(2, grid)
        rng = rng_for(4, 10)
        rots = np.zeros(grid.shape + (2, 2))
        for m in np.ndindex(*grid.shape):
            t = rng.uniform(0, 2 * np.pi)
            r = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
            if rng.uniform() < 0.5:
                r = r @ np.diag([1.0, -1.0])
            rots[m] = r
        scrambled = apply_real_gauge(b, rots)
        assert not scrambled.oriented
        assert abs(euler_number(scrambled).value) == 2


class TestW2:
    def test_two_odd_lines(self):
        g = KGrid.standard(2, 16)
        s = direct_sum(model_line_lc((1, 0), g), model_line_lc((0, 1), g))
        data = sw_class_data(s)
        assert data.w1 == (1, 1)
        assert data.w2 == {"12": 1}
        assert not data.orientable

    def test_cup_structure(self):
        g = KGrid.standard(2, 16)
        s = direct_sum(model_line_lc((1, 1), g), model_line_lc((1, 0), g))
        assert sw_class_data(s).w2 == {"12": 1}

    def test_trivial_pair(self):
        g = KGrid.standard(2, 12)
        s = direct_sum(model_line_lc((1, 0), g), model_line_lc((1, 0), g))
        data = sw_class_data(s)
        assert data.w1 == (0, 0)
        assert data.w2 == {"12": 0}

    @pytest.mark.parametrize("g", [1, 2])
    def test_euler_parity(self, g):
        b = nvec_real_bundle(g, KGrid.standard(2, 24))
        data = sw_class_data(b)
        assert data.orientable
        assert data.w2["12"] == g % 2
        assert euler_number(b).value % 2 == data.w2["12"]

    def test_rank3_recursion(self):
        g = KGrid.standard(2, 16)
        s = direct_sum(
            direct_sum(model_line_lc((1, 0), g), model_line_lc((0, 1), g)),
            model_line_lc((0, 0), g),
        )
        data = sw_class_data(s)
        assert data.w1 == (1, 1)
        assert data.w2 == {"12": 1}

    def test_t3_rank2(self):
        g = KGrid.standard(3, 8)
        s = direct_sum(model_line_lc((1, 0, 0), g), model_line_lc((0, 1, 1), g))
        data = sw_class_data(s)
        assert data.w1 == (1, 1, 1)
        assert data.w2 == {"12": 1, "13": 1, "23": 0}


class TestReport:
    def test_complex_report_schema(self):
        e = sample_projector(model_qwz(1.0), KGrid.standard(2, 8))
        rep = invariants_report(e)
        assert rep["chern"] == {"12": -1}
        assert rep["w1"] is None
        assert rep["w2"] == {"12": None}
        assert rep["euler"] is None
        assert rep["orientable"] is None

    def test_real_report_schema(self):
        b = nvec_real_bundle(1, KGrid.standard(2, 16))
        rep = invariants_report(b)
        assert rep["chern"] == {"12": None}
        assert rep["w1"] == [0, 0]
        assert rep["w2"] == {"12": 1}
        assert rep["euler"] == 1
        assert rep["orientable"] is True

    def test_nonorientable_report_has_null_euler(self):
        g = KGrid.standard(2, 12)
        s = direct_sum(model_line_lc((1, 0), g), model_line_lc((0, 1), g))
        rep = invariants_report(s)
        assert rep["euler"] is None
        assert rep["orientable"] is False
