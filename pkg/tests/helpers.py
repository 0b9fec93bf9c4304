"""Shared instance builders for the test suite."""

from __future__ import annotations

import math
import random

import twinopt as t


def cut_instance(n, seed, p_edge=0.5, h=2, cap=2):
    """Random weighted-cut instance with a random partition matroid."""
    graph = t.assign_weights_uniform(t.gen_er(n, p_edge, seed), 0.0, 1.0, seed + 7)
    parts = t.assign_groups(n, h, seed + 13)
    ground = t.GroundSet(n)

    def oracle():
        return t.CutMonitorObjective(graph)

    def constraint():
        return t.PartitionMatroid(parts, cap)

    return graph, ground, oracle, constraint


def cut_instance_dyadic(n, seed, p_edge=0.5, h=2, cap=2):
    """Cut instance with weights in {0/8..63/8}: all sums are exact in
    binary floating point, so algorithm runs are free of rounding noise."""
    import numpy as np

    base = t.gen_er(n, p_edge, seed)
    rng = np.random.default_rng(seed + 7)
    edges = [(u, v, float(rng.integers(0, 64)) / 8.0) for u, v, _ in base.edges]
    graph = t.WeightedGraph(n, edges)
    parts = t.assign_groups(n, h, seed + 13)
    ground = t.GroundSet(n)

    def oracle():
        return t.CutMonitorObjective(graph)

    def constraint():
        return t.PartitionMatroid(parts, cap)

    return graph, ground, oracle, constraint


def psystem_instance(n, seed, p=2, p_edge=0.5, h=2, cap=2):
    """Random weighted-cut instance under an intersection of p partition matroids."""
    graph = t.assign_weights_uniform(t.gen_er(n, p_edge, seed), 0.0, 1.0, seed + 7)
    ground = t.GroundSet(n)
    groups = [t.assign_groups(n, h, seed + 17 + i) for i in range(p)]

    def oracle():
        return t.CutMonitorObjective(graph)

    def constraint():
        return t.IntersectionSystem([t.PartitionMatroid(g, cap) for g in groups])

    return graph, ground, oracle, constraint


def coverage_instance(n, seed, universe=14):
    """Random monotone coverage objective with a uniform matroid."""
    rng = random.Random(seed)
    weights = [rng.uniform(0.1, 1.0) for _ in range(universe)]
    covers = [t.bitmask(rng.sample(range(universe), rng.randint(1, 4))) for _ in range(n)]
    ground = t.GroundSet(n)
    k = rng.randint(2, 4)

    def oracle():
        return t.CoverageObjective(weights, covers)

    def constraint():
        return t.UniformMatroid(n, k)

    return ground, oracle, constraint


def twin_budget(n, s1_size, s2_size):
    return 2 * n * (s1_size + s2_size + 1) + n


def fast_budget(n, r, eps):
    passes = math.ceil(math.log((1.0 + eps) * r / eps) / math.log(1.0 + eps))
    return n + 2 * n * (passes + 1)


def naive_cut(graph, mask):
    """Independent double-loop edge scan used as a value oracle of record."""
    total = 0.0
    for u, v, w in graph.edges:
        if ((mask >> u) & 1) != ((mask >> v) & 1):
            total += w
    return total
