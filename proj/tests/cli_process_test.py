# Copyright 2026 The Relworks Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Drives the relworks executable as a separate process.

Usage: cli_process_test.py <relworks binary> <source dir>
"""

import json
import os
import pathlib
import signal
import subprocess
import sys
import tempfile
import unittest
import urllib.error
import urllib.request

import jsonschema

BINARY = ""
SOURCE = pathlib.Path(".")


def run(*args, env=None):
    return subprocess.run([BINARY, *args], capture_output=True, text=True,
                          env=env, timeout=120)


class PipelineTest(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.tmp = tempfile.TemporaryDirectory()
        cls.work = cls.tmp.name
        data = SOURCE / "data"
        steps = [
            ["ingest", "--input", str(data / "mini_corpus"), "--work", cls.work,
             "--min-citations", "2"],
            ["index", "--work", cls.work],
            ["derive-plans", "--work", cls.work, "--annotations",
             str(data / "segments")],
            ["train-planner", "--work", cls.work],
            ["plan", "--work", cls.work, "--setting", "full", "--n", "4"],
            ["realize", "--work", cls.work, "--plans",
             os.path.join(cls.work, "plans_full.jsonl")],
            ["evaluate", "--work", cls.work, "--setting", "full", "--outputs",
             os.path.join(cls.work, "outputs_full.jsonl")],
            ["update", "--work", cls.work, "--cases",
             str(data / "update_cases.jsonl")],
            ["evaluate", "--work", cls.work, "--setting", "update", "--outputs",
             os.path.join(cls.work, "updates_segment.jsonl")],
        ]
        for step in steps:
            r = run(*step)
            if r.returncode != 0:
                raise AssertionError(f"{step[0]} exited {r.returncode}: {r.stderr}")
        with open(SOURCE / "schemas" / "report.schema.json") as f:
            cls.schema = json.load(f)

    @classmethod
    def tearDownClass(cls):
        cls.tmp.cleanup()

    def test_reports_match_the_schema(self):
        for name in ["report_outputs_full.json", "report_updates_segment.json"]:
            with open(os.path.join(self.work, name)) as f:
                report = json.load(f)
            jsonschema.Draft202012Validator(self.schema).validate(report)
            self.assertEqual(len(report["aggregate"]["copy_fraction"]), 4)

    def test_schema_rejects_a_broken_report(self):
        with open(os.path.join(self.work, "report_outputs_full.json")) as f:
            report = json.load(f)
        del report["aggregate"]["sari"]
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate(report, self.schema)
        with open(os.path.join(self.work, "report_outputs_full.json")) as f:
            report = json.load(f)
        report["setting"] = "sideways"
        with self.assertRaises(jsonschema.ValidationError):
            jsonschema.validate(report, self.schema)

    def test_manifests_record_hashes(self):
        with open(os.path.join(self.work, "plans_full.jsonl.manifest.json")) as f:
            m = json.load(f)
        self.assertEqual(m["command"], "plan")
        self.assertTrue(all(len(o["sha256"]) == 64 for o in m["outputs"]))

    def test_exit_codes(self):
        self.assertEqual(run("plan", "--work", self.work, "--bogus").returncode, 2)
        self.assertEqual(run("plan", "--work", self.work, "--setting", "full").returncode, 2)
        self.assertEqual(run("plan", "--work", self.work, "--paper", "p99").returncode, 1)
        self.assertEqual(run("evaluate", "--work", self.work).returncode, 2)
        empty = tempfile.mkdtemp(dir=self.work)
        self.assertEqual(run("index", "--work", empty).returncode, 1)
        r = run("plan", "--work", self.work, "--paper", "p17")
        self.assertEqual(r.returncode, 0)
        self.assertEqual(json.loads(r.stdout)["paper_id"], "p17")

    def test_serve_over_http(self):
        env = dict(os.environ, RELWORKS_ADDR="127.0.0.1:0")
        proc = subprocess.Popen([BINARY, "serve", "--work", self.work],
                                stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                text=True, env=env)
        try:
            line = proc.stdout.readline()
            self.assertTrue(line.startswith("listening on 127.0.0.1:"), line)
            base = "http://" + line.split()[-1]
            with urllib.request.urlopen(base + "/health", timeout=10) as r:
                health = json.load(r)
            self.assertEqual(health["papers"], 20)
            with self.assertRaises(urllib.error.HTTPError) as missing:
                urllib.request.urlopen(base + "/papers/p99", timeout=10)
            self.assertEqual(missing.exception.code, 404)
            body = json.dumps({"version": 1, "paper_id": "p18"}).encode()
            req = urllib.request.Request(base + "/plan", data=body,
                                         headers={"Content-Type": "application/json"})
            with urllib.request.urlopen(req, timeout=10) as r:
                plan = json.load(r)
            body = json.dumps({"version": 1, "paper_id": "p18",
                               "plan": plan["plan"]}).encode()
            req = urllib.request.Request(base + "/realize", data=body,
                                         headers={"Content-Type": "application/json"})
            with urllib.request.urlopen(req, timeout=10) as r:
                doc = json.load(r)
            self.assertEqual(len(doc["segments"]), len(plan["plan"]["branches"]))
            bad = json.dumps({"version": 1, "paper_id": "p18",
                              "setting": "sideways"}).encode()
            req = urllib.request.Request(base + "/plan", data=bad,
                                         headers={"Content-Type": "application/json"})
            with self.assertRaises(urllib.error.HTTPError) as invalid:
                urllib.request.urlopen(req, timeout=10)
            self.assertEqual(invalid.exception.code, 422)
        finally:
            proc.send_signal(signal.SIGTERM)
            self.assertEqual(proc.wait(timeout=10), 0)
            proc.stdout.close()
            proc.stderr.close()


if __name__ == "__main__":
    BINARY = sys.argv[1]
    SOURCE = pathlib.Path(sys.argv[2])
    unittest.main(argv=sys.argv[:1], verbosity=2)
