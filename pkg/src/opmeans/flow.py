"""Integer flow routines on bipartite supply/demand graphs.

Rational weights are brought to a common denominator so every capacity
is an exact integer. Nodes are numbered ``0`` (source), ``1..n`` (rows),
``n+1..n+m`` (columns) and ``n+m+1`` (sink).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np


def common_denominator(*weight_lists: Sequence[Fraction]) -> tuple[int, list[list[int]]]:
    """Scale rational weight lists to integers sharing one denominator."""
    den = 1
    for ws in weight_lists:
        for w in ws:
            den = den * w.denominator // math.gcd(den, w.denominator)
    scaled = [[int(w * den) for w in ws] for ws in weight_lists]
    return den, scaled


@dataclass
class FlowResult:
    value: int
    flow: np.ndarray  # (n, m) object array of ints
    source_side_rows: list[int]
    source_side_cols: list[int]


def max_flow_bipartite(supply: Sequence[int], demand: Sequence[int], allowed: np.ndarray) -> FlowResult:
    """Edmonds-Karp max flow; row-column edges have unbounded capacity.

    On termination the residual-reachable rows and columns form a minimum
    cut, which serves as an infeasibility certificate.
    """
    n, m = len(supply), len(demand)
    allowed = np.asarray(allowed, dtype=bool)
    big = sum(supply) + sum(demand) + 1
    src, snk = 0, n + m + 1
    size = n + m + 2
    cap = [[0] * size for _ in range(size)]
    adj: list[list[int]] = [[] for _ in range(size)]

    def add(u, v, c):
        if cap[u][v] == 0 and cap[v][u] == 0:
            adj[u].append(v)
            adj[v].append(u)
        cap[u][v] += c

    for i, s in enumerate(supply):
        add(src, 1 + i, int(s))
    for j, d in enumerate(demand):
        add(1 + n + j, snk, int(d))
    for i, j in zip(*np.nonzero(allowed)):
        add(1 + int(i), 1 + n + int(j), big)
    orig = [row[:] for row in cap]

    value = 0
    while True:
        parent = [-1] * size
        parent[src] = src
        queue = deque([src])
        while queue and parent[snk] < 0:
            u = queue.popleft()
            for v in adj[u]:
                if parent[v] < 0 and cap[u][v] > 0:
                    parent[v] = u
                    queue.append(v)
        if parent[snk] < 0:
            break
        push = big
        v = snk
        while v != src:
            u = parent[v]
            push = min(push, cap[u][v])
            v = u
        v = snk
        while v != src:
            u = parent[v]
            cap[u][v] -= push
            cap[v][u] += push
            v = u
        value += push

    flow = np.zeros((n, m), dtype=object)
    for i in range(n):
        for j in range(m):
            if allowed[i, j]:
                flow[i, j] = max(orig[1 + i][1 + n + j] - cap[1 + i][1 + n + j], 0)
    reach = [parent[k] >= 0 for k in range(size)]
    rows = [i for i in range(n) if reach[1 + i]]
    cols = [j for j in range(m) if reach[1 + n + j]]
    return FlowResult(value, flow, rows, cols)


def min_cost_transport(supply: Sequence[int], demand: Sequence[int], cost: np.ndarray) -> np.ndarray:
    """Exact integer optimal transport plan by successive shortest paths.

    Each round runs Bellman-Ford on the residual graph (source, rows,
    columns, sink) and saturates the cheapest augmenting path. Costs are
    rescaled to ``[0, 1]`` first so the relaxation threshold is relative.
    """
    cost = np.asarray(cost, dtype=float)
    n, m = cost.shape
    if not np.all(np.isfinite(cost)):
        raise ValueError("costs must be finite")
    top = float(np.max(np.abs(cost))) if cost.size else 0.0
    if top > 0:
        cost = cost / top
    if sum(supply) != sum(demand):
        raise ValueError("supply and demand totals differ")
    flow = np.zeros((n, m), dtype=object)
    rest_s = [int(s) for s in supply]
    rest_d = [int(d) for d in demand]
    src, snk = 0, n + m + 1
    while sum(rest_s) > 0:
        edges = []  # (u, v, cost, kind, i, j)
        for i in range(n):
            if rest_s[i] > 0:
                edges.append((src, 1 + i, 0.0, "s", i, -1))
            for j in range(m):
                edges.append((1 + i, 1 + n + j, cost[i, j], "f", i, j))
                if flow[i, j] > 0:
                    edges.append((1 + n + j, 1 + i, -cost[i, j], "b", i, j))
        for j in range(m):
            if rest_d[j] > 0:
                edges.append((1 + n + j, snk, 0.0, "t", -1, j))
        dist = [math.inf] * (n + m + 2)
        pred: list = [None] * (n + m + 2)
        dist[src] = 0.0
        for _ in range(n + m + 1):
            changed = False
            for e in edges:
                u, v, c = e[0], e[1], e[2]
                if dist[u] + c < dist[v] - 1e-14:
                    dist[v] = dist[u] + c
                    pred[v] = e
                    changed = True
            if not changed:
                break
        path = []
        v = snk
        while v != src:
            e = pred[v]
            if e is None or len(path) > n + m + 1:
                raise RuntimeError("no augmenting path; residual graph is inconsistent")
            path.append(e)
            v = e[0]
        limits = []
        for _, _, _, kind, i, j in path:
            if kind == "s":
                limits.append(rest_s[i])
            elif kind == "t":
                limits.append(rest_d[j])
            elif kind == "b":
                limits.append(flow[i, j])
        push = min(limits)
        for _, _, _, kind, i, j in path:
            if kind == "s":
                rest_s[i] -= push
            elif kind == "t":
                rest_d[j] -= push
            elif kind == "f":
                flow[i, j] += push
            else:
                flow[i, j] -= push
    return flow


def bottleneck_threshold(supply: Sequence[int], demand: Sequence[int], cost: np.ndarray) -> tuple[float, np.ndarray]:
    """Smallest cost value ``c`` such that edges with cost ``<= c`` carry a full transport.

    Binary search over the sorted distinct entries of ``cost``; the
    returned value is always one of them.
    """
    cost = np.asarray(cost, dtype=float)
    total = sum(int(s) for s in supply)
    levels = np.unique(cost)
    lo, hi = 0, len(levels) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        res = max_flow_bipartite(supply, demand, cost <= levels[mid])
        if res.value == total:
            best = (levels[mid], res.flow)
            hi = mid - 1
        else:
            lo = mid + 1
    return float(best[0]), best[1]
