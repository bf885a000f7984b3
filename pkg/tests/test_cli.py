import contextlib
import csv
import io
import json
import tempfile
import unittest
from pathlib import Path

from isac_drt.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, main
from isac_drt.io.tables import read_table

VERIFY_SIZES = [
    "--fuzz-cases",
    "20",
    "--fuzz-grid-size",
    "30",
    "--moment-trials",
    "20000",
]


class TestCli(unittest.TestCase):
    def setUp(self) -> None:
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.grid = self.dir / "grid.csv"
        self.grid.write_text("design_id,cost,perf\na,0,1\nb,1,0.9\nc,2,0.4\n")
        self.scenario = self.dir / "scenario.json"
        self.scenario.write_text(
            json.dumps(
                {
                    "gram": [[1.0]],
                    "pfa": 1e-5,
                    "power_budget": 1.0,
                    "comm_channel": [[1.0]],
                }
            )
        )

    def tearDown(self) -> None:
        self.tmp.cleanup()

    def run_cli(self, *argv: str):
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            code = main(list(argv))
        return code, stdout.getvalue(), stderr.getvalue()

    def test_front(self) -> None:
        code, out, _ = self.run_cli("front", "--grid", str(self.grid))
        self.assertEqual(code, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(lines[0], "xi,g,g_equality,is_contact,lambda,mu")
        self.assertEqual(len(lines), 4)
        contacts = [row["is_contact"] for row in csv_rows(out)]
        self.assertEqual(contacts, ["true", "false", "true"])

    def test_envelope(self) -> None:
        code, out, _ = self.run_cli(
            "envelope", "--grid", str(self.grid), "--format", "json"
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual([r["xi"] for r in json.loads(out)], [0.0, 2.0])

    def test_envelope_of_scenario(self) -> None:
        code, out, _ = self.run_cli(
            "envelope", "--scenario", str(self.scenario), "--resolution", "41"
        )
        self.assertEqual(code, EXIT_OK)
        xis = [float(line.split(",")[0]) for line in out.splitlines()[1:]]
        self.assertEqual(xis[0], 0.0)
        self.assertGreater(xis[1], 9.0)

    def test_plan(self) -> None:
        out = self.dir / "figures"
        code, _, _ = self.run_cli(
            "plan",
            "--scenario",
            str(self.scenario),
            "--budgets",
            "1",
            "7",
            "15",
            "--out",
            str(out),
        )
        self.assertEqual(code, EXIT_OK)
        plan = read_table(out / "plan.csv")
        self.assertEqual([r["n_atoms"] for r in plan], [2, 2, 1])
        self.assertAlmostEqual(plan[0]["P_t"], 9.4070, delta=5e-4)
        self.assertAlmostEqual(plan[0]["expected_pd"], 0.03517, delta=1e-5)
        self.assertGreater(plan[0]["expected_pd"], plan[0]["deterministic_pd"])
        distribution = read_table(out / "distribution.csv")
        self.assertEqual([r["budget"] for r in distribution], [1, 1, 7, 7, 15])
        self.assertTrue((out / "curve.csv").exists())

    def test_malformed_scenario(self) -> None:
        self.scenario.write_text(json.dumps({"gram": [[1.0]], "pfa": 2.0}))
        code, _, err = self.run_cli("plan", "--scenario", str(self.scenario))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn("pfa", err)

    def test_missing_file(self) -> None:
        code, _, _ = self.run_cli("front", "--grid", str(self.dir / "missing.csv"))
        self.assertEqual(code, EXIT_USAGE)

    def test_usage_error(self) -> None:
        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                main(["front"])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)

    def test_simulate_reproducible(self) -> None:
        argv = ("simulate", "--scenario", str(self.scenario), "--trials", "2000")
        code, first, _ = self.run_cli(*argv, "--seed", "4")
        self.assertEqual(code, EXIT_OK)
        _, second, _ = self.run_cli(*argv, "--seed", "4")
        self.assertEqual(first, second)
        rows = csv_rows(first)
        self.assertEqual([r["hypothesis"] for r in rows], ["h0", "h1"])

    def test_simulate_mixture(self) -> None:
        code, out, _ = self.run_cli(
            "simulate",
            "--scenario",
            str(self.scenario),
            "--trials",
            "2000",
            "--hypothesis",
            "mixture",
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(csv_rows(out)[0]["hypothesis"], "mixture")

    def test_verify(self) -> None:
        code, out, _ = self.run_cli(
            "verify", "--suites", "tangent", "kkt", "fuzz", *VERIFY_SIZES
        )
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(out, "suite,check,detail\n")

    def test_verify_injected_fault(self) -> None:
        code, out, _ = self.run_cli(
            "verify", "--suites", "kkt", "--inject-fault", "weights"
        )
        self.assertEqual(code, EXIT_FAILURE)
        self.assertIn("mean_constraint", [r["check"] for r in csv_rows(out)])

    def test_fuzz(self) -> None:
        code, out, _ = self.run_cli("fuzz", "--cases", "10", "--grid-size", "20")
        self.assertEqual(code, EXIT_OK)
        self.assertEqual(len(csv_rows(out)), 10)

    def test_rate(self) -> None:
        code, out, _ = self.run_cli(
            "rate", "--scenario", str(self.scenario), "--budget", "1"
        )
        self.assertEqual(code, EXIT_OK)
        rates = {r["strategy"]: float(r["rate_bits"]) for r in csv_rows(out)}
        self.assertLess(rates["sensing_optimal"], rates["water_filling"])


def csv_rows(text: str):
    return list(csv.DictReader(io.StringIO(text)))
