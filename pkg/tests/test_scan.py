# Copyright (c) 2024 qslkit developers
# SPDX-License-Identifier: Zlib

from __future__ import annotations

import unittest
from unittest import mock
import io
import os
import csv
import json
import tempfile
from pathlib import Path

from deepdiff import DeepDiff

from . import fast_quad

_FLOAT_COLUMNS = {"axis1_value", "axis2_value", "lambda", "gamma0", "eta", "s",
                  "coherence", "sz", "tau", "theta", "purity0",
                  "lambda_op", "lambda_hs", "lambda_tr",
                  "tau_qsl_op", "tau_qsl_hs", "tau_qsl_tr", "tau_qsl_unified"}
_BOOL_COLUMNS = {"clamped", "degenerate", "infeasible"}


def _typed(row):
    out = {}
    for name, text in row.items():
        if text == "":
            out[name] = None
        elif name in _FLOAT_COLUMNS:
            out[name] = float(text)
        elif name in _BOOL_COLUMNS:
            out[name] = {"true": True, "false": False}[text]
        else:
            out[name] = text
    return out


def _jc_grid():
    from qslkit import ScanGrid, Axis
    return ScanGrid("jc", Axis.parse("coherence:0:1:3"), Axis.parse("sz:0:1:3"),
                    {"lambda": 15.0, "gamma0": 40.0, "tau": 1.0})


class AxisTestCase(unittest.TestCase):

    def test_parse(self):

        from qslkit import Axis

        axis = Axis.parse("coherence:0:1:5")
        self.assertEqual((axis.name, axis.lo, axis.hi, axis.count, axis.log),
                         ("coherence", 0.0, 1.0, 5, False))
        self.assertEqual(list(axis.values()), [0.0, 0.25, 0.5, 0.75, 1.0])
        axis = Axis.parse("gamma0:1:100:3", log=True)
        values = axis.values()
        self.assertAlmostEqual(values[1], 10.0, delta=1e-12)
        self.assertEqual(axis.to_dict(), dict(name="gamma0", min=1.0, max=100.0,
                                              count=3, log=True))

    def test_rejections(self):

        from qslkit import Axis, ParameterError

        for text in ("foo:0:1:3", "coherence:0:1", "coherence:a:1:3", "sz:-1:1:1",
                     "sz:1:-1:3", "tau:0:inf:3", "coherence:0:1:2.5"):
            with self.subTest(text=text), self.assertRaises(ParameterError):
                Axis.parse(text)
        with self.assertRaises(ParameterError):
            Axis.parse("gamma0:0:40:5", log=True)
        with self.assertRaises(ParameterError):
            Axis.parse("tau:1:4:5", log=True)


class ScanGridTestCase(unittest.TestCase):

    def test_cells_are_row_major(self):

        from qslkit import ScanModel

        grid = _jc_grid()
        self.assertIs(grid.model, ScanModel.JC)
        self.assertEqual(grid.shape, (3, 3))
        cells = list(grid.cells())
        self.assertEqual([(v1, v2) for v1, v2, _ in cells[:4]],
                         [(0.0, 0.0), (0.0, 0.5), (0.0, 1.0), (0.5, 0.0)])
        self.assertEqual(cells[4][2], {"lambda": 15.0, "gamma0": 40.0, "tau": 1.0,
                                       "coherence": 0.5, "sz": 0.5})

    def test_validation(self):

        from qslkit import ScanGrid, Axis, ParameterError

        coherence, sz = Axis.parse("coherence:0:1:3"), Axis.parse("sz:0:1:3")
        fixed = {"lambda": 15.0, "gamma0": 5.0, "tau": 1.0}
        with self.assertRaises(ParameterError):
            ScanGrid("jc", coherence, Axis.parse("coherence:0:0.5:2"), dict(fixed, sz=0.0))
        with self.assertRaises(ParameterError):
            ScanGrid("jc", coherence, Axis.parse("eta:0.1:1:3"), dict(fixed, sz=0.0))
        with self.assertRaises(ParameterError):
            ScanGrid("jc", coherence, sz, {"lambda": 15.0, "gamma0": 5.0})
        with self.assertRaises(ParameterError):
            ScanGrid("jc", coherence, sz, dict(fixed, sz=0.0))
        with self.assertRaises(ParameterError):
            ScanGrid("jc", coherence, sz, dict(fixed, temperature=1.0))
        with self.assertRaises(ValueError):
            ScanGrid("spin-boson", coherence, sz, fixed)
        # unset optional values are dropped
        grid = ScanGrid("jc", coherence, sz, dict(fixed, omega0=None))
        self.assertNotIn("omega0", grid.fixed)
        self.assertEqual(grid.to_dict()["model"], "jc")


class RunScanTestCase(unittest.TestCase):

    def test_feasibility_flags(self):

        from qslkit import run_scan, scan_summary

        records = run_scan(_jc_grid(), fast_quad(), threads=1)
        self.assertEqual(len(records), 9)
        infeasible = [(rec.axis1_value, rec.axis2_value) for rec in records if rec.infeasible]
        self.assertEqual(infeasible, [(0.5, 1.0), (1.0, 0.5), (1.0, 1.0)])
        for rec in records:
            self.assertEqual(rec.regime, "NonMarkovian")
            self.assertIsNone(rec.error)
            if rec.infeasible:
                self.assertIsNone(rec.result)
            else:
                self.assertLessEqual(rec.result.tau_qsl_unified, 1.0 + 1e-6)
        summary = scan_summary(records, 1.5)
        self.assertTrue(summary.startswith("cells=9 feasible=6 tau_qsl_min=0 "))
        self.assertTrue(summary.endswith(" wall=1.500s"))

    def test_failed_cells(self):

        from qslkit import ScanGrid, Axis, run_scan, emit_json

        grid = ScanGrid("jc", Axis.parse("gamma0:0:5:2"), Axis.parse("coherence:0:0.5:2"),
                        {"lambda": 15.0, "sz": 0.0, "tau": 1.0})
        with self.assertLogs("qslkit.scan", level="WARNING"):
            records = run_scan(grid, fast_quad(), threads=1)
        self.assertIn("gamma0", records[0].error)
        self.assertIsNone(records[0].result)
        self.assertIsNone(records[0].regime)
        self.assertIsNone(records[2].error)
        self.assertEqual(records[2].regime, "Markovian")
        stream = io.BytesIO()
        emit_json(records, stream)
        document = json.loads(stream.getvalue())
        self.assertIn("error", document["records"][0])
        self.assertNotIn("error", document["records"][2])

    def test_dephasing_linear_in_coherence(self):

        from qslkit import ScanGrid, Axis, run_scan

        grid = ScanGrid("dephasing", Axis.parse("tau:1:3:3"), Axis.parse("coherence:0.2:1:5"),
                        {"eta": 0.5, "s": 3.0, "sz": 0.0})
        records = run_scan(grid, fast_quad(), threads=1)
        for row in range(3):
            ratios = [rec.result.tau_qsl_unified / rec.axis2_value
                      for rec in records[5 * row:5 * row + 5]]
            with self.subTest(tau=records[5 * row].axis1_value):
                for ratio in ratios[1:]:
                    self.assertAlmostEqual(ratio / ratios[0], 1.0, delta=1e-6)

    def test_deterministic_output(self):

        from qslkit import run_scan, emit_csv

        grid = _jc_grid()
        outputs = []
        for threads in (1, 2, 1):
            stream = io.BytesIO()
            emit_csv(run_scan(grid, fast_quad(), threads=threads), stream)
            outputs.append(stream.getvalue())
        self.assertEqual(outputs[0], outputs[1])
        self.assertEqual(outputs[0], outputs[2])

    def test_thread_resolution(self):

        from qslkit import resolve_threads, ParameterError

        self.assertEqual(resolve_threads(3), 3)
        self.assertEqual(resolve_threads(0), os.cpu_count() or 1)
        with mock.patch.dict(os.environ, {"QSLKIT_THREADS": "5"}):
            self.assertEqual(resolve_threads(), 5)
            self.assertEqual(resolve_threads(2), 2)
        with mock.patch.dict(os.environ, {"QSLKIT_THREADS": "many"}):
            with self.assertRaises(ParameterError):
                resolve_threads()
        with self.assertRaises(ParameterError):
            resolve_threads(-1)


class EmitTestCase(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        from qslkit import run_scan
        cls.grid = _jc_grid()
        cls.quad = fast_quad()
        cls.records = run_scan(cls.grid, cls.quad, threads=1)

    def test_csv(self):

        from qslkit import emit_csv, CSV_COLUMNS

        stream = io.BytesIO()
        size = emit_csv(self.records, stream)
        data = stream.getvalue()
        self.assertEqual(size, len(data))
        self.assertNotIn(b"\r", data)
        lines = data.decode("utf-8").split("\n")
        self.assertEqual(lines[-1], "")
        self.assertEqual(len(lines) - 1, 1 + len(self.records))
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual(lines[0].split(",")[:5],
                         ["model", "axis1_name", "axis1_value", "axis2_name", "axis2_value"])
        first = lines[1].split(",")
        self.assertEqual(first[:2], ["jc", "coherence"])
        self.assertEqual(first[CSV_COLUMNS.index("eta")], "")
        self.assertEqual(first[CSV_COLUMNS.index("infeasible")], "false")
        self.assertEqual(first[CSV_COLUMNS.index("regime")], "NonMarkovian")

    def test_text_stream(self):

        from qslkit import emit_csv

        binary, text = io.BytesIO(), io.StringIO()
        emit_csv(self.records, binary)
        size = emit_csv(self.records, text)
        self.assertEqual(text.getvalue().encode("utf-8"), binary.getvalue())
        self.assertEqual(size, len(binary.getvalue()))

    def test_csv_floats_round_trip(self):

        from qslkit import emit_csv

        stream = io.BytesIO()
        emit_csv(self.records, stream)
        rows = list(csv.DictReader(io.StringIO(stream.getvalue().decode("utf-8"))))
        for rec, row in zip(self.records, rows):
            if rec.result is None:
                self.assertEqual(row["tau_qsl_unified"], "")
                self.assertEqual(row["infeasible"], "true")
                continue
            self.assertEqual(float(row["tau_qsl_unified"]), rec.result.tau_qsl_unified)
            self.assertEqual(float(row["theta"]), rec.result.theta)

    def test_json_envelope(self):

        import qslkit
        from qslkit import emit_json

        stream = io.BytesIO()
        emit_json(self.records, stream, grid=self.grid, quad=self.quad)
        document = json.loads(stream.getvalue())
        self.assertEqual(document["tool"], "qslkit")
        self.assertEqual(document["version"], qslkit.__version__)
        self.assertEqual(document["model"], "jc")
        self.assertEqual(document["grid"]["axis1"]["name"], "coherence")
        self.assertEqual(document["quadrature"], self.quad.to_dict())
        self.assertEqual(len(document["records"]), len(self.records))

    def test_csv_and_json_agree(self):

        from qslkit import emit_csv, emit_json

        csv_stream, json_stream = io.BytesIO(), io.BytesIO()
        emit_csv(self.records, csv_stream)
        emit_json(self.records, json_stream)
        from_csv = [_typed(row) for row in
                    csv.DictReader(io.StringIO(csv_stream.getvalue().decode("utf-8")))]
        from_json = json.loads(json_stream.getvalue())["records"]
        self.assertEqual(DeepDiff(from_csv, from_json), {})

    def test_files(self):

        from qslkit import emit_csv, emit_json, QslError, QSL_EIO

        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "scan.csv")
            size = emit_csv(self.records, path)
            self.assertEqual(path.stat().st_size, size)
            size = emit_json(self.records, str(Path(tmp, "scan.json")))
            self.assertEqual(Path(tmp, "scan.json").stat().st_size, size)
            with self.assertRaises(QslError) as ctx:
                emit_csv(self.records, Path(tmp, "missing", "scan.csv"))
            self.assertEqual(ctx.exception.error, QSL_EIO)

    def test_empty(self):

        from qslkit import emit_csv, emit_json, ParameterError

        with self.assertRaises(ParameterError):
            emit_csv([], io.BytesIO())
        with self.assertRaises(ParameterError):
            emit_json([], io.BytesIO())


if __name__ == "__main__":
    unittest.main()
