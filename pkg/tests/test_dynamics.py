import csv
import math

import numpy as np
import pytest

from polarsuper import catalog, dynamics
from polarsuper import jets as J
from polarsuper.errors import ConfigurationError, DomainError
from polarsuper.phasecore import (AngularProfile, Coulomb, Oscillator, PhasePoint, PotentialModel,
                                  UFunc, eval_H)


def oscillator(a=0.5):
    return catalog.make_smoro1(a, 0.0, 0.0)


def kepler():
    return catalog.make_smoro2(-1.0, 0.0, 0.0)


def test_oscillator_circular_period():
    tr = dynamics.integrate(oscillator(), PhasePoint(1.0, 0.0, 0.0, 1.0), 30.0)
    cl = dynamics.detect_closure(tr, 1e-9)
    assert cl.bounded and cl.period == pytest.approx(2 * math.pi, rel=1e-9)


def test_oscillator_eccentric_period():
    a = 2.0
    tr = dynamics.integrate(oscillator(a), PhasePoint(1.0, 0.7, 0.3, 0.2), 20.0)
    cl = dynamics.detect_closure(tr, 1e-8)
    assert cl.period == pytest.approx(2 * math.pi / math.sqrt(2 * a), rel=1e-9)


def test_kepler_circular_period():
    tr = dynamics.integrate(kepler(), PhasePoint(1.0, 0.0, 0.0, 1.0), 20.0)
    cl = dynamics.detect_closure(tr, 1e-9)
    assert cl.period == pytest.approx(2 * math.pi, rel=1e-9)


def test_energy_drift_long_run():
    m = kepler()
    tr = dynamics.integrate(m, PhasePoint(1.0, 0.0, 0.0, 1.1), 100 * 2 * math.pi * 1.5, tol=1e-12)
    assert dynamics.drift(tr, "H") < 1e-10


@pytest.mark.parametrize("tol", [1e-8, 1e-10, 1e-12])
def test_energy_drift_contract(tol):
    m = catalog.make_smoro2(-1.0, 0.1, 0.05)
    p0 = PhasePoint(1.0, 0.1, 0.1, 0.8)
    tr = dynamics.integrate(m, p0, 30.0, tol=tol, n_samples=301)
    H0 = eval_H(m, p0)
    assert dynamics.drift(tr, "H") * max(1.0, abs(H0)) <= 100 * tol * max(abs(H0), 1.0)


def test_drift_of_constant_is_zero():
    tr = dynamics.integrate(oscillator(), PhasePoint(1.0, 0.0, 0.0, 1.0), 3.0, n_samples=11)
    assert dynamics.drift(tr, lambda p: 3.0) == 0.0


def test_X_drift_separable():
    m = catalog.make_smoro1(0.5, 0.1, 0.2)
    tr = dynamics.integrate(m, PhasePoint(1.0, 0.7, 0.3, 0.2), 40.0, n_samples=401)
    assert dynamics.drift(tr, "X") < 1e-8


def test_calogero_Y_drift_over_recurrence_times():
    m = catalog.make_calogero(0.7)
    p0 = PhasePoint(math.cos(0.4), math.sin(0.4), 0.2, 0.5)
    tr = dynamics.integrate(m, p0, 5.0, tol=1e-12)
    assert dynamics.drift(tr, "Y") < 1e-8


def test_smoro2_bounded_orbit_closes():
    m = catalog.make_smoro2(-1.0, 0.1, 0.05)
    tr = dynamics.integrate(m, PhasePoint(1.0, 0.1, 0.1, 0.8), 200.0, n_samples=201,
                            observables=False)
    cl = dynamics.detect_closure(tr, 1e-6)
    assert cl.bounded and cl.period is not None and cl.mismatch < 1e-6


def test_smoro1_bounded_orbit_closes():
    m = catalog.make_smoro1(0.5, 0.1, 0.2)
    tr = dynamics.integrate(m, PhasePoint(1.0, 0.7, 0.3, 0.2), 60.0, n_samples=201,
                            observables=False)
    assert dynamics.detect_closure(tr, 1e-6).period is not None


def test_generic_angular_orbit_does_not_close():
    S = UFunc(lambda t: 0.3 + 0.2 * J.cos(t) + 0.1 * J.sin(3 * t))
    m = PotentialModel(Coulomb(-1.0), AngularProfile(S), name="generic")
    tr = dynamics.integrate(m, PhasePoint(1.0, 0.1, 0.1, 0.9), 200.0, n_samples=201,
                            observables=False)
    cl = dynamics.detect_closure(tr, 1e-6)
    assert cl.bounded and cl.period is None


def test_unbounded_orbit_flagged():
    tr = dynamics.integrate(kepler(), PhasePoint(1.0, 0.0, 0.0, 2.0), 200.0, n_samples=201,
                            observables=False)
    cl = dynamics.detect_closure(tr)
    assert not cl.bounded and cl.period is None


def test_time_reversal():
    m = catalog.make_smoro2(-1.0, 0.1, 0.05)
    for tol in (1e-8, 1e-10, 1e-12):
        assert dynamics.time_reversal_error(m, PhasePoint(1.0, 0.1, 0.1, 0.8), 20.0, tol) < 10 * tol


def test_singular_guard_truncates():
    # an attractive angular term pulls the orbit into the singular ray theta = pi/3
    m = catalog.make_calogero(-0.7)
    tr = dynamics.integrate(m, PhasePoint(math.cos(0.9), math.sin(0.9), 0.0, 0.0), 5.0, n_samples=51)
    assert tr.truncated and "singular" in tr.reason


def test_input_validation():
    m = oscillator()
    with pytest.raises(ConfigurationError):
        dynamics.integrate(m, PhasePoint(1, 0, 0, 1), 1.0, tol=1e-3)
    with pytest.raises(ConfigurationError):
        dynamics.integrate(m, PhasePoint(1, 0, 0, 1), 0.0)
    with pytest.raises(DomainError):
        dynamics.integrate(catalog.make_calogero(0.7), PhasePoint(1.0, 0.0, 0.0, 1.0), 1.0)
    with pytest.raises(ConfigurationError):
        dynamics.integrate(catalog.make_weierstrass_c1(None, 1.0, -2.0, 0.0, 0.0),
                           PhasePoint(0.8, 0.5, 0, 0), 1.0)


def test_backward_integration():
    tr = dynamics.integrate(oscillator(), PhasePoint(1.0, 0.0, 0.0, 1.0), -math.pi, n_samples=3)
    assert tr.end.x == pytest.approx(-1.0, abs=1e-11)
    assert np.all(np.diff(tr.t) < 0)


def test_times_strictly_monotone():
    tr = dynamics.integrate(oscillator(), PhasePoint(1.0, 0.0, 0.0, 1.0), 5.0, n_samples=101)
    assert np.all(np.diff(tr.t) > 0)


def test_csv_export(tmp_path):
    m = catalog.make_calogero(0.7)
    tr = dynamics.integrate(m, PhasePoint(math.cos(0.4), math.sin(0.4), 0.2, 0.5), 1.0, n_samples=11)
    f = tmp_path / "orbit.csv"
    tr.to_csv(f, period=1.5)
    rows = list(csv.reader(open(f)))
    assert rows[0] == ["t", "x", "y", "px", "py", "H", "X", "Y", "period"]
    assert len(rows) == 12
    assert float(rows[3][1]) == tr.states[2, 0]
    assert rows[1][-1] == "1.5"


def test_observables_include_labelled_integrals():
    m = catalog.make_weierstrass_c1(None, 1.0, -2.0, 0.0, 0.0)
    names = set(dynamics.observable_functions(m.with_integral(m.integral, hbar=0.0)))
    assert {"H", "X", "Y2"} <= names
