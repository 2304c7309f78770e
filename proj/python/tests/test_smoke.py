import math

import pytest

import gpbounds as gp


def test_linear_ground_state():
    sol = gp.ground_state(gp.TrapPotential.harmonic(), a=0.0)
    assert abs(sol["energy"] - 3.0) < 1e-3


def test_interacting_ground_state():
    sol = gp.ground_state(gp.TrapPotential.harmonic(), a=1.0, grid=gp.Grid(h=0.04))
    assert sol["energy"] == pytest.approx(3.62244, rel=1e-4)
    assert sol["mu"] > sol["energy"]


def test_scattering():
    res = gp.scattering(gp.InteractionPotential.square_barrier(2.0, 1.0))
    assert abs(res["a"] - (1.0 - math.tanh(1.0))) < 1e-8
    assert gp.scattering(gp.InteractionPotential.hard_sphere(2.0))["a"] == pytest.approx(2.0)


def test_thomas_fermi():
    tf = gp.thomas_fermi(gp.TrapPotential.harmonic(), 1.0, 1.0)
    assert tf["mu"] == pytest.approx(15 ** 0.4, rel=1e-9)


def test_sandwich_ordering():
    rep = gp.sandwich(gp.TrapPotential.harmonic(), gp.InteractionPotential.hard_sphere(1.0), 1.0, 1e12)
    assert rep["lower_assembled"]["value"] <= rep["gp_reference"] <= rep["upper"]["value"]


def test_run_and_errors():
    rep = gp.run("solve", "[physics]\nN = 1\na = 0\n")
    assert rep["ok"] is True
    assert rep["command"] == "solve"
    with pytest.raises(gp.ConfigError):
        gp.run("solve", "[physics]\nNN = 1\n")
    with pytest.raises(gp.DomainError):
        gp.Grid(h=0.5, R=8.0)
    with pytest.raises(ValueError):
        gp.InteractionPotential.hard_sphere(-1.0)
