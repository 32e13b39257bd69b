# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

from __future__ import annotations

import unittest
from unittest import mock
import contextlib
import importlib
import sys
import io
import os
import json
import tempfile
from pathlib import Path

_FAST = ["--nodes", "401", "--max-refinements", "6"]


def run(*argv):
    """Run the command line; returns (exit status, stdout, stderr)."""
    from qslkit.__main__ import main
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        status = main(list(argv))
    return status, out.getvalue(), err.getvalue()


class ModuleImportTestCase(unittest.TestCase):

    def test_import_does_not_run(self):

        import qslkit.__main__ as cli
        with mock.patch.object(sys, "argv", ["qslkit", "bogus"]):
            module = importlib.reload(cli)
        self.assertEqual(module.__name__, "qslkit.__main__")
        self.assertTrue(callable(module.main))


class PointCommandTestCase(unittest.TestCase):

    def test_jc_text(self):

        status, out, _ = run("jc", "--lambda", "15", "--gamma0", "40",
                             "--coherence", "0.6", "--sz", "0.6", "--tau", "1", *_FAST)
        self.assertEqual(status, 0)
        lines = dict(line.split(None, 1) for line in out.splitlines())
        self.assertEqual(lines["model"], "jc")
        self.assertEqual(lines["regime"], "NonMarkovian")
        self.assertEqual(lines["branch"], "underdamped")
        self.assertEqual(lines["clamped"], "false")
        self.assertLess(float(lines["tau_qsl_unified"]), 1.0)
        self.assertIn("gamma0=40", lines["params"])

    def test_jc_json(self):

        status, out, _ = run("jc", "--lambda", "15", "--gamma0", "5", "--rx", "0.6",
                             "--rz", "0.6", "--tau", "1", "--format", "json", *_FAST)
        self.assertEqual(status, 0)
        document = json.loads(out)
        self.assertEqual(document["model"], "jc")
        self.assertEqual(document["state"], dict(rx=0.6, ry=0.0, rz=0.6))
        self.assertEqual(document["regime"], "Markovian")
        result = document["result"]
        self.assertAlmostEqual(result["tau_qsl_closed"] / result["tau_qsl_op"], 1.0, delta=1e-6)
        self.assertEqual(result["tau"], 1.0)

    def test_dephasing_json(self):

        status, out, _ = run("dephasing", "--eta", "0.5", "--s", "3", "--coherence", "0.6",
                             "--tau", "3", "--format", "json", *_FAST)
        self.assertEqual(status, 0)
        document = json.loads(out)
        self.assertEqual(document["params"]["s"], 3.0)
        self.assertEqual(document["params"]["temperature"], 0.0)
        (start, end), = document["negative_rate_intervals"]
        self.assertAlmostEqual(start, 3 ** 0.5, delta=1e-12)
        self.assertEqual(end, 3.0)

    def test_dephasing_text(self):

        status, out, _ = run("dephasing", "--eta", "0.5", "--s", "1", "--coherence", "0.6",
                             "--tau", "2", *_FAST)
        self.assertEqual(status, 0)
        lines = dict(line.split(None, 1) for line in out.splitlines())
        self.assertEqual(lines["negative_rate_intervals"], "none")
        self.assertAlmostEqual(float(lines["tau_qsl_unified"]), 1.2, delta=1e-6)


class ExitStatusTestCase(unittest.TestCase):

    def test_invalid_parameters(self):

        status, _, err = run("jc", "--lambda", "15", "--gamma0", "5", "--coherence", "0.6",
                             "--rx", "0.2", "--tau", "1")
        self.assertEqual(status, 2)
        self.assertIn("not both", err)
        status, _, err = run("jc", "--lambda", "15", "--gamma0", "5", "--coherence", "0.9",
                             "--sz", "0.9", "--tau", "1")
        self.assertEqual(status, 2)
        self.assertIn("invalid parameters", err)
        status, _, _ = run("dephasing", "--eta", "1", "--s", "0.01", "--tau", "1")
        self.assertEqual(status, 2)

    def test_usage_errors(self):

        with contextlib.redirect_stderr(io.StringIO()):
            with self.assertRaises(SystemExit) as ctx:
                run("jc", "--lambda", "15")
        self.assertEqual(ctx.exception.code, 2)

    def test_non_convergence(self):

        status, _, err = run("jc", "--lambda", "15", "--gamma0", "40", "--coherence", "0.6",
                             "--tau", "1", "--rel-tol", "1e-16", "--max-refinements", "1")
        self.assertEqual(status, 1)
        self.assertIn("achieved relative tolerance", err)

    def test_unreadable_config(self):

        with tempfile.TemporaryDirectory() as tmp:
            status, _, err = run("jc", "--config", str(Path(tmp, "missing.cfg")),
                                 "--lambda", "15", "--gamma0", "5", "--tau", "1")
        self.assertEqual(status, 3)
        self.assertIn("missing.cfg", err)

    def test_failed_verification(self):

        from qslkit.verify import CheckResult

        def failing(opts):
            return CheckResult("special-values", False, 2.0, 1.0, "forced failure")

        with mock.patch.dict("qslkit.verify._CHECKS", {"special-values": failing}):
            status, out, _ = run("verify", "--check", "special-values")
        self.assertEqual(status, 4)
        self.assertIn("FAIL", out)
        self.assertIn("1 check(s) failed", out)


class ConfigFileTestCase(unittest.TestCase):

    def test_precedence(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "run.cfg")
            path.write_text("lambda = 15\ngamma0 = 5\ntau = 1\ncoherence = 0.6\n"
                            "rel-tol = 1e-8\nunrelated = 1\n", encoding="utf-8")
            status, out, _ = run("jc", "--config", str(path), "--format", "json", *_FAST)
            self.assertEqual(status, 0)
            self.assertEqual(json.loads(out)["params"]["gamma0"], 5.0)
            status, out, _ = run("jc", "--config", str(path), "--gamma0", "40",
                                 "--format", "json", *_FAST)
            self.assertEqual(status, 0)
            document = json.loads(out)
            self.assertEqual(document["params"]["gamma0"], 40.0)
            self.assertEqual(document["state"]["rx"], 0.6)


class ScanCommandTestCase(unittest.TestCase):

    def test_scan_to_files(self):

        with tempfile.TemporaryDirectory() as tmp:
            csv_path, json_path = Path(tmp, "scan.csv"), Path(tmp, "scan.json")
            argv = ["scan", "--model", "jc", "--axis1", "gamma0:1:40:3", "--gamma0-log",
                    "--axis2", "coherence:0:1:3", "--lambda", "15", "--tau", "1",
                    "--threads", "1", *_FAST]
            status, out, _ = run(*argv, "-o", str(csv_path))
            self.assertEqual(status, 0)
            self.assertTrue(out.startswith("cells=9 feasible=9 "))
            lines = csv_path.read_text(encoding="utf-8").splitlines()
            self.assertEqual(len(lines), 10)
            self.assertTrue(lines[1].startswith("jc,gamma0,1,coherence,0,"))
            status, _, _ = run(*argv, "-o", str(json_path))
            self.assertEqual(status, 0)
            document = json.loads(json_path.read_text(encoding="utf-8"))
            self.assertEqual(document["grid"]["axis1"]["log"], True)
            self.assertEqual(len(document["records"]), 9)
            self.assertAlmostEqual(document["records"][3]["gamma0"], 40 ** 0.5, delta=1e-12)

    def test_scan_thread_variable(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "scan.csv")
            with mock.patch.dict(os.environ, {"QSLKIT_THREADS": "2"}):
                status, _, _ = run("scan", "--model", "dephasing", "--axis1", "s:1:3:2",
                                   "--axis2", "tau:1:2:2", "--eta", "0.5",
                                   "--coherence", "0.6", "--format", "csv",
                                   "-o", str(path), *_FAST)
            self.assertEqual(status, 0)
            self.assertEqual(len(path.read_text(encoding="utf-8").splitlines()), 5)

    def test_scan_rejections(self):

        status, _, err = run("scan", "--model", "jc", "--axis1", "gamma0:1:40:3",
                             "--axis2", "coherence:0:1:3", "--lambda", "15", "--tau", "1",
                             "--rz", "0.5")
        self.assertEqual(status, 2)
        status, _, _ = run("scan", "--model", "jc", "--axis1", "eta:0.1:1:3",
                           "--axis2", "coherence:0:1:3", "--lambda", "15", "--tau", "1")
        self.assertEqual(status, 2)

    def test_scan_to_stdout(self):

        status, out, err = run("scan", "--model", "jc", "--axis1", "gamma0:1:40:2",
                               "--axis2", "coherence:0:1:2", "--lambda", "15", "--tau", "1",
                               "--threads", "1", *_FAST)
        self.assertEqual(status, 0)
        lines = out.splitlines()
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[0].startswith("model,axis1_name,"))
        self.assertTrue(err.startswith("cells=4 feasible=4 "))
        status, out, _ = run("scan", "--model", "jc", "--axis1", "gamma0:1:40:2",
                             "--axis2", "coherence:0:1:2", "--lambda", "15", "--tau", "1",
                             "--threads", "1", "--format", "json", *_FAST)
        self.assertEqual(status, 0)
        self.assertEqual(len(json.loads(out)["records"]), 4)
        self.assertEqual(status, 2)


class VerifyCommandTestCase(unittest.TestCase):

    def test_verify_table(self):

        with mock.patch.dict(os.environ, {"COLUMNS": "200"}):
            status, out, _ = run("verify", "--check", "special-values",
                                 "--check", "norm-ordering", "--samples", "100", *_FAST)
        self.assertEqual(status, 0)
        self.assertIn("special-values", out)
        self.assertIn("norm-ordering", out)
        self.assertIn("seed 20190101", out)
        self.assertNotIn("FAIL", out)


if __name__ == "__main__":
    unittest.main()
