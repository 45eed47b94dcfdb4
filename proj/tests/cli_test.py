"""End-to-end checks of the evac command line: exit codes and file outputs."""

import json
import shutil
import subprocess
import sys
from pathlib import Path

EVAC = sys.argv[1]
WORK = Path(sys.argv[2])

NETWORK = {
    "dt_seconds": 30,
    "nodes": [
        {"id": "a", "lat": 0.0, "lon": 0.0, "supply": 12},
        {"id": "b", "lat": 0.001, "lon": 0.0},
        {"id": "c", "lat": 0.001, "lon": 0.001, "demand": 20},
    ],
    "edges": [
        {"u": "a", "v": "b", "speed_mps": 5.0, "lanes": 1, "oneway": True, "name": "north"},
        {"u": "b", "v": "c", "speed_mps": 5.0, "lanes": 1, "oneway": True, "name": "east"},
        {"u": "a", "v": "c", "speed_mps": 2.0, "lanes": 1, "oneway": True, "name": "diagonal"},
    ],
}


def circles(lat, lon, r0, growth, **extra):
    doc = {"type": "circles", "circles": [{"lat": lat, "lon": lon, "r0_m": r0, "growth_m_per_instance": growth}]}
    doc.update(extra)
    return doc


failures = []


def check(name, ok, detail=""):
    print(("PASS " if ok else "FAIL ") + name + ("" if ok else "  " + detail))
    if not ok:
        failures.append(name)


def run(*args):
    p = subprocess.run([EVAC, *map(str, args)], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def write(name, doc):
    path = WORK / name
    path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return path


if WORK.exists():
    shutil.rmtree(WORK)
WORK.mkdir(parents=True)

net = write("network.json", NETWORK)
far = write("far.json", circles(-0.003, -0.003, 100, 2))
plan = WORK / "plan.json"
report = WORK / "report.json"

code, _, err = run("plan", "--network", net, "--fire", far, "--tmax", 40, "--out", plan, "--report", report)
check("plan exits 0", code == 0, err)
doc = json.loads(plan.read_text())
check("plan is complete", doc["complete"] and doc["evacuated"] == 12, str(doc.get("evacuated")))
check("plan text is canonical", plan.read_text() == json.dumps(doc, indent=2, sort_keys=True) + "\n")

on_sink = write("on_sink.json", circles(0.001, 0.001, 50, 1))
code, _, err = run("plan", "--network", net, "--fire", on_sink, "--tmax", 40, "--out", WORK / "x.json")
check("fire on every sink exits 2", code == 2, f"code {code}: {err}")

broken = write("broken.json", "{ not json")
code, _, err = run("plan", "--network", broken, "--fire", far, "--tmax", 40, "--out", WORK / "x.json")
check("malformed network exits 1", code == 1, f"code {code}")
check("malformed network names the file", "broken.json" in err, err)

code, _, _ = run("plan", "--network", WORK / "nope.json", "--fire", far, "--tmax", 40, "--out", WORK / "x.json")
check("missing file exits 1", code == 1, f"code {code}")

code, _, _ = run("plan", "--network", net, "--fire", far, "--tmax", 1, "--out", WORK / "x.json")
check("tmax below the initial horizon exits 1", code == 1, f"code {code}")

same = write("same.json", circles(-0.003, -0.003, 100, 2, t_fire=2))
upd = WORK / "update.json"
code, _, err = run("update", "--network", net, "--plan", plan, "--fire-update", same, "--t-reopt", 1, "--out", upd)
check("identity update exits 0", code == 0, err)
if code == 0:
    u = json.loads(upd.read_text())
    check("identity update keeps the value", u["evacuated"] == doc["evacuated"], str(u["evacuated"]))
    before = [f for f in doc["flows"] if f["depart_t"] < 1]
    after = [f for f in u["flows"] if f["depart_t"] < 1]
    check("identity update keeps the prefix", before == after)
    check("update records the fire history", len(u["fire"]["updates"]) == 1)

code, _, _ = run("update", "--network", net, "--plan", plan, "--fire-update", same, "--t-reopt", 3, "--out", upd)
check("t_reopt after t_fire exits 1", code == 1, f"code {code}")

geo = WORK / "flows.geojson"
code, _, err = run("export", "--plan", plan, "--network", net, "--out", geo)
check("export exits 0", code == 0, err)
if code == 0:
    g = json.loads(geo.read_text())
    roads = [f for f in g["features"] if f["properties"]["kind"] == "road"]
    moved = sum(f["properties"]["flow"] for f in roads if f["properties"]["to"] == "c")
    check("export delivers the plan's evacuees", moved == doc["evacuated"], str(moved))
code, _, _ = run("export", "--plan", plan, "--network", net, "--t-to", doc["T_sol"] + 1, "--out", geo)
check("export past T_sol exits 1", code == 1, f"code {code}")
code, _, _ = run("export", "--plan", plan, "--network", net, "--format", "shp", "--out", geo)
check("unknown export format exits 1", code == 1, f"code {code}")

code, out, err = run("stats", report, report)
check("stats exits 0", code == 0, err)
check("stats prints the table", "max flow (s)" in out and "T_sol" in out, out)

(WORK / "nodes.csv").write_text("id,lat,lon,supply,demand\na,0,0,5,\nb,0.001,0,,5\n")
(WORK / "edges.csv").write_text("u,v,speed_mps,lanes\na,b,5,1\n")
code, _, err = run("convert", "--nodes", WORK / "nodes.csv", "--edges", WORK / "edges.csv", "--dt", 30,
                   "--out", WORK / "converted.json")
check("convert exits 0", code == 0, err)
code, _, err = run("plan", "--network", WORK / "converted.json", "--fire", far, "--tmax", 20,
                   "--out", WORK / "converted_plan.json")
check("converted network plans", code == 0, err)

code, _, _ = run("frobnicate")
check("unknown subcommand exits 1", code == 1, f"code {code}")

sys.exit(1 if failures else 0)
