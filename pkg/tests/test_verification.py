import unittest

import pytest

from isac_drt.verification import (
    SUITES,
    Failure,
    VerifySettings,
    check_eigen,
    check_inflection,
    check_kkt,
    check_moments,
    check_rate,
    check_tangent,
    run_verification,
)

SMALL = VerifySettings(
    fuzz_cases=20,
    fuzz_grid_size=30,
    eigen_scenarios=5,
    eigen_covariances=20,
    inflection_cases=5,
    moment_trials=20_000,
)


class TestSuites(unittest.TestCase):
    def test_tangent(self) -> None:
        self.assertEqual(check_tangent(SMALL), [])

    def test_kkt(self) -> None:
        self.assertEqual(check_kkt(SMALL), [])

    def test_eigen(self) -> None:
        self.assertEqual(check_eigen(SMALL), [])

    def test_inflection(self) -> None:
        self.assertEqual(check_inflection(SMALL), [])

    def test_moments(self) -> None:
        self.assertEqual(check_moments(SMALL), [])

    def test_rate(self) -> None:
        self.assertEqual(check_rate(SMALL), [])


class TestFaultInjection(unittest.TestCase):
    def test_swapped_weights(self) -> None:
        settings = VerifySettings(inject_fault="weights")
        checks = {f.check for f in check_kkt(settings)}
        self.assertIn("mean_constraint", checks)

    def test_moved_atom(self) -> None:
        settings = VerifySettings(inject_fault="atom")
        checks = {f.check for f in check_kkt(settings)}
        self.assertIn("off_envelope", checks)
        self.assertIn("mean_constraint", checks)

    def test_unknown_fault(self) -> None:
        with self.assertRaises(ValueError):
            VerifySettings(inject_fault="threshold")


class TestRunVerification(unittest.TestCase):
    def test_selected_suites(self) -> None:
        self.assertEqual(run_verification(SMALL, ["tangent", "inflection"]), [])

    def test_unknown_suite(self) -> None:
        with self.assertRaises(ValueError):
            run_verification(SMALL, ["tangent", "speed"])

    def test_failure_record(self) -> None:
        record = Failure("kkt", "dominance", "budget 1").record()
        self.assertEqual(list(record), ["suite", "check", "detail"])

    @pytest.mark.slow
    def test_full_verification(self) -> None:
        names = ["tangent", "fuzz", "kkt", "eigen", "inflection", "moments", "rate"]
        self.assertEqual(list(SUITES), names)
        self.assertEqual(run_verification(VerifySettings()), [])
