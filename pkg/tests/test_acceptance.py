"""Acceptance suite for the bundled example.

Each test runs one criterion at its stated tolerance through
:mod:`sectorbound.checks` (the same implementations the ``sectorbound
check`` command ships) and prints one pass/fail line.
"""
import pytest

from sectorbound import checks

RESULTS = {}


def _run(criterion):
    result = checks.ALL_CHECKS[criterion]()
    RESULTS[criterion] = result
    print(f"{criterion} {'PASS' if result.passed else 'FAIL'} "
          f"[{result.seconds:.2f}s]: {result.detail}")
    return result


def test_A1_reference_p_near_feasibility():
    assert _run("A1").passed


def test_A2_own_certificate_both_modes():
    assert _run("A2").passed


def test_A3_bound_reproduction_window():
    # Known red: the bound-minimizing P is substantially cheaper than the
    # published one, so the optimum (~2.03) undershoots the [6.0, 12.3]
    # window this criterion pins.  The comparison-block half of the
    # criterion holds; the range check is reported honestly.
    assert _run("A3").passed


def test_A4_schur_equivalence_random_instances():
    assert _run("A4").passed


def test_A5_embedding_spectra():
    assert _run("A5").passed


@pytest.mark.slow
def test_A6_simulation_within_bound():
    assert _run("A6").passed


def test_A7_commutator_identities():
    assert _run("A7").passed


def test_A8_sector_suite():
    assert _run("A8").passed


def test_A9_scalar_formulas():
    assert _run("A9").passed
