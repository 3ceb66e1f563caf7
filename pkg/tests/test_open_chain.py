import itertools

import numpy as np
import pytest

from vacuum_engines import open_chain as oc
from vacuum_engines import qubit_exact as qe
from vacuum_engines.errors import RegimeWarning


def _exact(spec):
    return qe.engine_metrics_exact(spec.exact_spec())


@pytest.mark.parametrize("n", [2, 4, 6])
def test_weak_limit_against_exact(n):
    spec = oc.OpenChainSpec.uniform(n, 1.0, 0.05)
    weak = oc.weak_coupling_metrics(spec)
    ed = _exact(spec)
    assert weak.metrics.work == pytest.approx(ed.work, rel=1e-3)
    assert weak.metrics.gap == pytest.approx(ed.gap, rel=1e-3)
    assert weak.metrics.std_dev == pytest.approx(ed.std_dev, rel=1e-2)


def test_weak_nonuniform_against_exact():
    spec = oc.OpenChainSpec((1.0, 1.6, 0.7, 1.2), (0.02, 0.05, 0.03))
    weak = oc.weak_coupling_metrics(spec)
    ed = _exact(spec)
    assert weak.metrics.work == pytest.approx(ed.work, rel=2e-3)
    assert weak.metrics.gap == pytest.approx(ed.gap, rel=2e-3)
    assert sum(weak.pair_probabilities) + weak.ground_probability == pytest.approx(1.0)


def test_strong_limit_against_exact():
    spec = oc.OpenChainSpec.uniform(4, 1.0, 50.0)
    strong = oc.strong_coupling_metrics(spec)
    ed = _exact(spec)
    assert strong.work == pytest.approx(ed.work, rel=0.02)
    assert strong.efficiency == pytest.approx(ed.efficiency, rel=0.02)
    assert strong.std_dev == pytest.approx(ed.std_dev, rel=0.02)
    # the zeroth-order gap misses a -N omega / 2 shift, i.e. 2.7% at g = 50
    deeper = oc.OpenChainSpec.uniform(4, 1.0, 100.0)
    assert oc.strong_coupling_metrics(deeper).gap == pytest.approx(_exact(deeper).gap, rel=0.02)


@pytest.mark.parametrize("omegas", [(1.0, 2.0), (1.0, 1.5, 0.5), (0.3, 1.1, 0.9, 2.0)])
def test_strong_variance_by_enumeration(omegas):
    n = len(omegas)
    energies = [
        np.dot(bits, omegas) for bits in itertools.product((0, 1), repeat=n) if sum(bits) % 2 == 0
    ]
    assert oc.strong_coupling_distribution_variance(omegas) == pytest.approx(np.var(energies), rel=1e-12)


def test_regime_warnings():
    with pytest.warns(RegimeWarning):
        oc.weak_coupling_metrics(oc.OpenChainSpec.uniform(3, 1.0, 1.0))
    with pytest.warns(RegimeWarning):
        oc.strong_coupling_metrics(oc.OpenChainSpec.uniform(3, 1.0, 1.0))


def test_spec_validation():
    with pytest.raises(ValueError):
        oc.OpenChainSpec((1.0, 1.0), (1.0, 1.0))
    with pytest.raises(ValueError):
        oc.OpenChainSpec((1.0,), ())
