from fractions import Fraction

import numpy as np

from symcone.certifier import Verdict, classify
from symcone.lattice import build_surface_model, square
from symcone.sampling import random_class, random_gap_class, sample_report


def test_empty_report():
    r = sample_report(3, 0, 1)
    assert r.records == [] and r.success_rate is None and r.max_distance is None
    assert "certified: 0/0" in r.format()


def test_fixed_seed_is_reproducible():
    a = sample_report(4, 25, 9)
    b = sample_report(4, 25, 9)
    assert a.as_dict() == b.as_dict()
    assert a.format() == b.format()


def test_parallel_matches_sequential():
    a = sample_report(3, 16, 4, workers=1)
    b = sample_report(3, 16, 4, workers=2)
    assert a.as_dict() == b.as_dict()


def test_all_certifiable_samples_certified():
    for n in (3, 4):
        r = sample_report(n, 60, 123, tail_density=0.0)
        assert r.certifiable, "sample should contain certifiable classes"
        assert len(r.certified) == len(r.certifiable)
        assert r.max_distance <= Fraction(1, 1024)


def test_conjectural_listed():
    m3 = build_surface_model(3)
    seed = next(s for s in range(500)
                if classify(m3, random_class(m3, np.random.default_rng([s, 0]))).verdict
                == Verdict.CONJECTURAL_NON_SPIN)
    r = sample_report(3, 1, seed)
    assert r.conjectural == [0]
    assert "conjectural, not certified: 0" in r.format()


def test_gap_classes_are_conjectural():
    m3 = build_surface_model(3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        x = random_gap_class(m3, rng)
        beta = x[1]
        assert 0 < square(m3, x) <= beta * beta
        assert classify(m3, x).verdict == Verdict.CONJECTURAL_NON_SPIN


def test_timings_optional():
    r = sample_report(3, 3, 2)
    assert "seconds" not in r.as_dict()
    assert len(r.as_dict(timings=True)["seconds"]) == 3
