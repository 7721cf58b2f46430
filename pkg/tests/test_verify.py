import pytest

from heckeroot.verify import (REDUCED, Sabotage, run_suite, suite_gauss,
                              suite_tower)


def test_reports_list_every_instance():
    r = suite_tower()
    assert len(r.instances) == 30 + 98
    assert all(i.ok for i in r.instances)
    assert r.passed == len(r.instances) and r.failed == 0


def test_suites_are_deterministic():
    a = run_suite("distribution")
    b = run_suite("distribution")
    assert [(i.key, i.expected, i.got, i.ok) for i in a.instances] == \
        [(i.key, i.expected, i.got, i.ok) for i in b.instances]


def test_sabotage_from_seed_is_reproducible():
    s1 = Sabotage.from_seed(42, ("a", "b", "c"))
    s2 = Sabotage.from_seed(42, ("a", "b", "c"))
    assert s1 == s2


def test_each_mutation_target_detected():
    for target in ("char-value", "legendre", "conductor"):
        r = suite_gauss(sabotage=Sabotage(target, 5), fail_fast=True,
                        scale=REDUCED)
        assert not r.ok, target


def test_unknown_suite_rejected():
    with pytest.raises(ValueError):
        run_suite("nope")


def test_fail_fast_stops_early():
    r = suite_gauss(sabotage=Sabotage("legendre", 0), fail_fast=True,
                    scale=REDUCED)
    assert not r.instances[-1].ok
    assert all(i.ok for i in r.instances[:-1])
