"""Mode solver boundary contract, splitting round-trip, sampled-field I/O."""

import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from helpers import (
    ALL_BCS,
    complex_amp,
    draw_mode,
    manufacture_solution,
    solution_sup_gap,
)
from stokesbc import (
    BcSpec,
    FluidConstants,
    GridSpec,
    InvalidModeError,
    ProfileError,
    canonical_json,
    derive_mode,
    field_manifest,
    forward_data,
    read_field_csv,
    read_manifest,
    solve_mode,
    splitting_solve_mode,
    synthesize_field,
    write_field_csv,
    write_manifest,
)
from stokesbc.halfspace import ModeSolution, graded_grid
from stokesbc.profiles import ScalarModeProfile, VectorModeProfile

Y = np.linspace(0.0, 30.0, 41)


def trio_scales(sol):
    vel = np.max(np.abs(sol.velocity.evaluate(Y)))
    prs = np.max(np.abs(sol.pressure(Y)))
    return vel, prs


@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_BCS))
def test_solve_mode_contract(seed, bc):
    rng = np.random.default_rng(seed)
    mode = draw_mode(rng)
    h_w = complex(rng.uniform(0.5, 2.0), rng.uniform(-1.0, 1.0))
    sol = solve_mode(mode, bc, h_w)
    vel, prs = trio_scales(sol)
    mom_scale = max(abs(mode.omega**2) * vel, prs * max(mode.abs_xi, mode.rate_slow, 1.0))

    resid = sol.momentum_residual()
    assert np.max(np.abs(resid.evaluate(Y))) < 1e-9 * mom_scale
    assert np.max(np.abs(sol.divergence()(Y))) < 1e-10 * vel * max(mode.abs_xi, 1.0)
    assert abs(sol.normal_row() - h_w) < 1e-9 * abs(h_w)
    assert np.max(np.abs(sol.tangential_row())) < 1e-9 * mom_scale


def test_solve_mode_two_rate_structure():
    rng = np.random.default_rng(1)
    mode = draw_mode(rng)
    sol = solve_mode(mode, BcSpec(0, 0), 1.0)
    rates = {t.rate for t in sol.velocity.normal.terms}
    assert rates <= {complex(mode.rate_fast), complex(mode.rate_slow)}
    # pressure rides only on the slow (harmonic) rate
    assert {t.rate for t in sol.pressure.terms} <= {complex(mode.rate_slow)}


@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_BCS))
def test_forward_data_recovers_interior_forcing(seed, bc):
    rng = np.random.default_rng(seed)
    mode = draw_mode(rng)
    made = manufacture_solution(mode, bc, rng)
    f, g, h_w = forward_data(made, require_zero_tangential=True, tol=1e-7)
    rho = mode.constants.rho
    # rho f = omega^2 u - mu u'' + grad p, g = div u, h_w = the normal row
    resid = made.momentum_residual()
    for want, got in zip(resid.tangential, f.tangential):
        assert np.allclose(rho * got(Y), want(Y), rtol=0, atol=1e-11 * (np.max(np.abs(want(Y))) + 1))
    assert np.allclose(rho * f.normal(Y), resid.normal(Y), rtol=0, atol=1e-11 * (np.max(np.abs(resid.normal(Y))) + 1))
    assert np.allclose(g(Y), made.divergence()(Y), rtol=0, atol=1e-13)
    assert h_w == pytest.approx(made.normal_row(), rel=1e-12)


def test_forward_data_rejects_inhomogeneous_tangential_row():
    mode = derive_mode(FluidConstants(1.0, 1.0, 1.0), 2.0j, (1.0,))
    v = ScalarModeProfile(mode.xi, [(1.0, 1.0, 0)])  # v(0) = 1
    w = ScalarModeProfile(mode.xi, [(0.5, 2.0, 0)])
    p = ScalarModeProfile(mode.xi, [(0.2, 1.5, 0)])
    bad = ModeSolution(mode, BcSpec(0, 0), VectorModeProfile(mode.xi, (v,), w), p)
    with pytest.raises(ProfileError, match="tangential"):
        forward_data(bad, require_zero_tangential=True, tol=1e-9)


@given(st.integers(0, 2**32 - 1), st.sampled_from(ALL_BCS))
def test_splitting_round_trip(seed, bc):
    rng = np.random.default_rng(seed)
    mode = draw_mode(rng)
    made = manufacture_solution(mode, bc, rng)
    f, g, h_w = forward_data(made, require_zero_tangential=True, tol=1e-7)
    recovered = splitting_solve_mode(mode, bc, f, g, h_w)
    y = np.linspace(0.0, 20.0, 81)
    assert solution_sup_gap(made, recovered, y) < 1e-8


def test_splitting_pure_boundary_drive_matches_solve_mode():
    rng = np.random.default_rng(7)
    mode = draw_mode(rng)
    for bc in ALL_BCS:
        direct = solve_mode(mode, bc, 0.8 - 0.3j)
        zero_vec = VectorModeProfile(
            mode.xi, (ScalarModeProfile.zero(mode.xi),), ScalarModeProfile.zero(mode.xi)
        )
        split = splitting_solve_mode(
            mode, bc, zero_vec, ScalarModeProfile.zero(mode.xi), 0.8 - 0.3j
        )
        y = np.linspace(0.0, 20.0, 81)
        assert solution_sup_gap(direct, split, y) < 1e-10


def test_graded_grid_shape():
    y = graded_grid(10.0, 65, a=4.0)
    assert y[0] == 0.0
    assert y[-1] == pytest.approx(10.0)
    assert np.all(np.diff(y) > 0.0)
    # grading concentrates points near the wall
    assert y[32] < 5.0
    fine = graded_grid(10.0, 129, a=4.0)
    assert np.allclose(fine[::2], y, atol=1e-12)


def test_grid_spec_validation_and_wavenumber():
    with pytest.raises(ValueError):
        GridSpec(2 * np.pi, 8, 8.0, 33, y_kind="spline")
    grid = GridSpec(4.0 * np.pi, 16, 8.0, 33)
    assert grid.wavenumber(1) == pytest.approx(0.5)
    assert grid.wavenumber(3) == pytest.approx(1.5)


def synthesized_field(tmp_path=None):
    constants = FluidConstants(1.0, 1.0, 1.0)
    grid = GridSpec(2.0 * np.pi, 16, 8.0, 33)
    mode = derive_mode(constants, 0.5j, (grid.wavenumber(1),))
    sol = solve_mode(mode, BcSpec(0, 1), 1.0 + 0.7j)
    return synthesize_field(constants, {1: sol}, grid)


def test_synthesize_field_is_real_and_shaped():
    field = synthesized_field()
    assert field.velocity.shape == (2, 16, 33)
    assert field.pressure.shape == (16, 33)
    assert field.velocity.dtype.kind == "f"
    assert np.max(np.abs(field.velocity)) > 0.0


def test_field_csv_round_trip(tmp_path):
    field = synthesized_field()
    path = tmp_path / "field.csv"
    write_field_csv(path, field)
    data = read_field_csv(path)
    assert np.array_equal(data["u_x"], field.velocity[0])
    assert np.array_equal(data["u_y"], field.velocity[1])
    assert np.array_equal(data["p"], field.pressure)
    assert np.array_equal(data["x"], field.x)
    assert np.array_equal(data["y"], field.y)
    # repr-formatted floats survive a second trip byte-identically
    write_field_csv(tmp_path / "again.csv", field)
    assert (tmp_path / "again.csv").read_bytes() == path.read_bytes()


def test_manifest_round_trip_bit_exact(tmp_path):
    field = synthesized_field()
    manifest = field_manifest(field, "field.csv", config={"modes": [1], "note": 7})
    path = tmp_path / "manifest.json"
    write_manifest(path, manifest)
    loaded = read_manifest(path)
    assert loaded == manifest
    write_manifest(tmp_path / "again.json", loaded)
    assert (tmp_path / "again.json").read_bytes() == path.read_bytes()
    # canonical serialization is key-sorted with a trailing newline
    text = path.read_text()
    assert text == canonical_json(manifest)
    assert text.endswith("\n")
    parsed = json.loads(text)
    assert parsed == loaded
