import pytest

from gaussphase import verification as ver


@pytest.fixture(scope="module")
def results():
    return ver.run_checks()


def test_all_checks_pass(results):
    failed = [(r.name, r.deviation, r.message) for r in results if not r.passed]
    assert failed == []


def test_check_names_unique(results):
    names = [r.name for r in results]
    assert len(names) == len(set(names)) == 12


def test_errors_become_failures():
    from gaussphase.errors import GridTooCoarse

    def boom(cutoff):
        raise GridTooCoarse("too coarse")

    res = ver.run_check(ver.Check("boom", "x", boom, 1.0))
    assert not res.passed and "GridTooCoarse" in res.message


def test_nan_deviation_fails():
    res = ver.run_check(ver.Check("nan", "x", lambda c: float("nan"), 1.0))
    assert not res.passed


def test_warnings_content():
    warn = ver.discrepancy_warnings()
    assert len(warn) == 2
    assert all(w.startswith("WARN ") for w in warn)
    assert "xi = 2" in warn[0]
    assert "4.47214" in warn[1] and "3.16228" in warn[1]


def test_warnings_fall_back_on_small_cutoff():
    warn = ver.discrepancy_warnings(cutoff=8)
    assert "covariance propagation" in warn[1]
