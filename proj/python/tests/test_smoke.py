import json

import pytest

import evac

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

FAR_FIRE = {"type": "circles", "circles": [{"lat": -0.003, "lon": -0.003, "r0_m": 100, "growth_m_per_instance": 2}]}


def test_plan_and_identity_update():
    p, rep = evac.plan(NETWORK, FAR_FIRE, t_max=40, report=True)
    assert p["complete"] and p["evacuated"] == 12
    assert rep["plan"]["T_sol"] == p["T_sol"]
    u = evac.update(NETWORK, p, dict(FAR_FIRE, t_fire=2), t_reopt=1)
    assert u["evacuated"] == p["evacuated"]
    assert [f for f in u["flows"] if f["depart_t"] < 1] == [f for f in p["flows"] if f["depart_t"] < 1]


def test_errors_map_to_python_exceptions():
    on_sink = {"type": "circles", "circles": [{"lat": 0.001, "lon": 0.001, "r0_m": 50}]}
    with pytest.raises(evac.InfeasibleError):
        evac.plan(NETWORK, on_sink, t_max=40)
    with pytest.raises(evac.InputError):
        evac.plan(NETWORK, FAR_FIRE, t_max=1)
    with pytest.raises(ValueError):
        evac.plan("{ nope", FAR_FIRE, t_max=40)


def test_export_sums_match_plan():
    p = evac.plan(NETWORK, FAR_FIRE, t_max=40)
    g = evac.export_geojson(NETWORK, p)
    roads = [f["properties"] for f in g["features"] if f["properties"]["kind"] == "road"]
    assert all(sum(r["flow_by_t"]) == r["flow"] for r in roads)
    assert sum(r["flow"] for r in roads if r["to"] == "c") == p["evacuated"]


def test_stats_table():
    _, rep = evac.plan(NETWORK, FAR_FIRE, t_max=40, report=True)
    table = evac.stats_table({"run": rep})
    assert "T_sol" in table and "run" in table


def test_triangle_ten_and_labels():
    triangle = {
        "dt_seconds": 60,
        "nodes": [
            {"id": "1", "lat": 0.0, "lon": 0.0, "supply": 10},
            {"id": "2", "lat": 0.0005, "lon": 0.0},
            {"id": "3", "lat": 0.0, "lon": 0.0005, "demand": 10},
        ],
        "edges": [
            {"u": "1", "v": "2", "speed_mps": 1.0, "oneway": True},
            {"u": "1", "v": "3", "speed_mps": 1.0, "oneway": True},
            {"u": "2", "v": "3", "speed_mps": 1.0, "oneway": True},
        ],
    }
    arcs = evac.ten_edge_list(triangle, 3)
    assert sum(1 for a in arcs if a[3] == "movement") == 8
    assert sum(1 for a in arcs if a[3] == "holdover") == 6
    assert evac.node_label(2, 3, 3) == 11


def test_max_flow_solvers_agree():
    arcs = [(0, 1, 3), (0, 2, 2), (1, 2, 5), (1, 3, 2), (2, 3, 4)]
    a = evac.max_flow(4, 0, 3, arcs)
    b = evac.max_flow(4, 0, 3, arcs, solver="edmonds-karp")
    assert a[0] == b[0] == 5
    with pytest.raises(evac.InputError):
        evac.max_flow(4, 0, 9, arcs)


def test_capacity_rule():
    assert evac.capacity_fraction(3.0, 3) == 1.0
    assert evac.scaled_capacity(10, 1.5, 3) == 5
    assert evac.scaled_capacity(10, 0.3, 3) == 0


def test_convert_csv(tmp_path):
    (tmp_path / "n.csv").write_text("id,lat,lon,supply,demand\na,0,0,5,\nb,0.001,0,,5\n")
    (tmp_path / "e.csv").write_text("u,v,speed_mps\na,b,5\n")
    doc = evac.convert_csv(tmp_path / "n.csv", tmp_path / "e.csv", 30)
    assert len(doc["nodes"]) == 2 and len(doc["edges"]) == 1
    json.dumps(doc)
