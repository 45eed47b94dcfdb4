"""Wildfire evacuation planning on time-expanded road networks.

Documents (networks, fire scenarios, plans, reports) are plain dicts in the
same JSON layout the command line tool reads and writes.
"""

import json as _json
from pathlib import Path as _Path

from ._evac import InfeasibleError, InputError
from . import _evac

__all__ = [
    "InfeasibleError",
    "InputError",
    "plan",
    "update",
    "export_geojson",
    "stats_table",
    "convert_csv",
    "ten_edge_list",
    "max_flow",
    "node_label",
    "capacity_fraction",
    "scaled_capacity",
]


def _text(doc):
    if isinstance(doc, (str, _Path)) and _Path(doc).is_file():
        return _Path(doc).read_text()
    if isinstance(doc, str):
        return doc
    return _json.dumps(doc)


def plan(network, fire, t_max, tolerance_m=0.0, holdover_all=False, report=False):
    """Initial plan. With report=True returns (plan, run_report)."""
    p, r = _evac.plan(_text(network), _text(fire), t_max, tolerance_m, holdover_all)
    return (_json.loads(p), _json.loads(r)) if report else _json.loads(p)


def update(network, plan, fire_update, t_reopt, t_fire=None, t_max=None, holdover_all=False, report=False):
    """Replan from t_reopt. t_fire defaults to fire_update["t_fire"], t_max to the plan's."""
    p, r = _evac.update(
        _text(network),
        _text(plan),
        _text(fire_update),
        t_reopt,
        -1 if t_fire is None else t_fire,
        -1 if t_max is None else t_max,
        holdover_all,
    )
    return (_json.loads(p), _json.loads(r)) if report else _json.loads(p)


def export_geojson(network, plan, t_from=0, t_to=None):
    return _json.loads(_evac.export_geojson(_text(network), _text(plan), t_from, -1 if t_to is None else t_to))


def stats_table(reports):
    """reports: mapping of column name to run report."""
    return _evac.stats_table([(name, _text(r)) for name, r in reports.items()])


def convert_csv(nodes, edges, dt_seconds=60.0):
    return _json.loads(_evac.convert_csv(str(nodes), str(edges), dt_seconds))


def ten_edge_list(network, T):
    """Movement and holdover arcs of the time-expanded network as (from, to, capacity, kind) tuples."""
    out = []
    for line in _evac.ten_edge_list(_text(network), T).splitlines():
        u, v, cap, kind = line.split()
        out.append((int(u), int(v), int(cap), kind))
    return out


def max_flow(node_count, source, sink, arcs, solver="dinic"):
    """arcs: iterable of (tail, head, capacity). Returns (value, per-arc flows)."""
    arcs = list(arcs)
    return _evac.max_flow(
        node_count, source, sink, [a[0] for a in arcs], [a[1] for a in arcs], [a[2] for a in arcs], solver
    )


node_label = _evac.node_label
capacity_fraction = _evac.capacity_fraction
scaled_capacity = _evac.scaled_capacity
