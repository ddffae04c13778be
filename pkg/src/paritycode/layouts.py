"""Built-in physical layouts: the square-face lattice, the triangular lattice and tree codes.

Spin ``(i, j)`` with ``0 <= i < j <= N`` is the spin whose label is expected to
be ``{i, j}``; ``(0, k)`` is the vertex spin carrying logical ``Z_k``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from typing import Union

import networkx as nx

from .codes import ParityCode, Stabiliser, build_code
from .errors import InvalidGraphError, InvalidParameterError
from .gf2 import SupportVector

NuPolicy = Union[str, int, Mapping]


def _nu_for(policy: NuPolicy, face: tuple[int, int]) -> int:
    if isinstance(policy, str):
        p = policy.lower()
        if p in ("all_even", "even", "positive", "+"):
            return 1
        if p in ("all_odd", "odd", "negative", "-"):
            return -1
        raise InvalidParameterError(f"unknown nu policy {policy!r}")
    if isinstance(policy, int):
        if policy not in (1, -1):
            raise InvalidParameterError(f"nu must be +-1, got {policy}")
        return policy
    nu = policy.get(face, policy.get(f"[{face[0]},{face[1]}]", 1))
    if nu not in (1, -1):
        raise InvalidParameterError(f"nu for face {face} must be +-1, got {nu}")
    return nu


def _policy_name(policy: NuPolicy) -> str:
    if isinstance(policy, str):
        return {1: "all_even", -1: "all_odd"}[_nu_for(policy, (0, 0))]
    if isinstance(policy, int):
        return "all_even" if policy == 1 else "all_odd"
    return "per_face"


def square_faces(n_logical: int) -> list[tuple[int, int]]:
    """Faces ``[i, j]`` (named by their top-corner spin), top to bottom then left to right."""
    return [(i, i + d) for d in range(n_logical, 1, -1) for i in range(0, n_logical - d + 1)]


def pair_spins(n_logical: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n_logical) for j in range(i + 1, n_logical + 1)]


def _finish(n_logical, spins, faces, name, metadata) -> ParityCode:
    index = {s: k for k, s in enumerate(spins)}
    n = len(spins)
    stabs = [
        Stabiliser(SupportVector.from_indices(n, [index[s] for s in members]), nu, f"[{i},{j}]")
        for (i, j), members, nu in faces
    ]
    logical_z = [index[(0, k)] for k in range(1, n_logical + 1)]
    return build_code(n_logical, spins, stabs, logical_z, name=name, metadata=metadata)


def build_square_lattice(n_logical: int, nu_policy: NuPolicy = "all_even") -> ParityCode:
    """Square-face lattice of ``N(N+1)/2`` spins; the bottom row of faces is triangular."""
    if n_logical < 2:
        raise InvalidParameterError("square lattice needs n_logical >= 2")
    spins = pair_spins(n_logical)
    faces = []
    for i, j in square_faces(n_logical):
        members = [(i, j), (i, j - 1), (i + 1, j)]
        if i + 2 < j:
            members.append((i + 1, j - 1))
        faces.append(((i, j), members, _nu_for(nu_policy, (i, j))))
    return _finish(
        n_logical, spins, faces, f"square-{n_logical}",
        {"layout": "square", "nu_policy": _policy_name(nu_policy)},
    )


def build_triangular_lattice(n_logical: int, nu_policy: NuPolicy = "all_even") -> ParityCode:
    """All-to-all layout built only from three-spin stabilisers.

    Face ``[i, j]`` (``i + 2 <= j``) is ``{(i, j-1), (j-1, j), (i, j)}``; with
    ``(0, k)`` read as the vertex spin this is the triangle of pair labels
    ``{i, j-1}, {j-1, j}, {i, j}``.  The three faces ``[i, i+2]``,
    ``[i, i+3]`` ... multiply out to corner triangles such as
    ``(0, i), (0, j), (i, j)`` with every edge midpoint cancelling.
    """
    if n_logical < 2:
        raise InvalidParameterError("triangular lattice needs n_logical >= 2")
    spins = pair_spins(n_logical)
    faces = []
    for j in range(2, n_logical + 1):
        for i in range(0, j - 1):
            faces.append(((i, j), [(i, j - 1), (j - 1, j), (i, j)], _nu_for(nu_policy, (i, j))))
    return _finish(
        n_logical, spins, faces, f"triangular-{n_logical}",
        {"layout": "triangular", "nu_policy": _policy_name(nu_policy)},
    )


def _tree_edges(tree: Mapping[int, Iterable[int]] | Iterable[tuple[int, int]]) -> tuple[int, list[tuple[int, int]]]:
    g = nx.Graph()
    if isinstance(tree, Mapping):
        for u, nbrs in tree.items():
            g.add_node(u)
            for v in nbrs:
                g.add_edge(u, v)
    else:
        g.add_edges_from(tree)
    n = g.number_of_nodes()
    if n < 2:
        raise InvalidGraphError("tree needs at least two logical spins")
    if set(g.nodes) != set(range(1, n + 1)):
        raise InvalidGraphError(f"logical spins must be labelled 1..{n}, got {sorted(g.nodes)}")
    if any(u == v for u, v in g.edges):
        raise InvalidGraphError("self-loop in logical graph")
    if not nx.is_connected(g):
        raise InvalidGraphError("logical graph is not connected")
    if not nx.is_tree(g):
        cycle = nx.find_cycle(g)
        raise InvalidGraphError(f"logical graph has a cycle through {[u for u, _ in cycle]}")
    return n, sorted((min(u, v), max(u, v)) for u, v in g.edges)


def build_tree_code(
    tree: Mapping[int, Iterable[int]] | Iterable[tuple[int, int]],
    nu_policy: NuPolicy = "all_even",
) -> ParityCode:
    """``2N - 1`` spins: one vertex spin per logical spin and one edge spin per tree edge.

    Each edge ``(i, j)`` carries the three-spin stabiliser ``(0, i)(0, j)(i, j)``.
    """
    n, edges = _tree_edges(tree)
    spins = [(0, k) for k in range(1, n + 1)] + edges
    faces = [((i, j), [(0, i), (0, j), (i, j)], _nu_for(nu_policy, (i, j))) for i, j in edges]
    return _finish(n, spins, faces, f"tree-{n}", {"layout": "tree", "nu_policy": _policy_name(nu_policy)})


def square_mu_block(n_logical: int, nu: Mapping[tuple[int, int], int]) -> dict[tuple[int, int], int]:
    """Closed-form sign of every edge spin: the product of nu over the block of
    faces ``[i', j']`` with ``i' < i`` and ``i < j' <= j``."""
    out = {}
    for i, j in pair_spins(n_logical):
        mu = 1
        for ip in range(i):
            for jp in range(i + 1, j + 1):
                mu *= nu[(ip, jp)]
        out[(i, j)] = mu
    return out


def face_nu(code: ParityCode) -> dict[tuple[int, int], int]:
    """nu keyed by ``(i, j)`` for built-in codes whose face ids are ``"[i,j]"``."""
    out = {}
    for s in code.stabilisers:
        i, j = (int(t) for t in s.face_id.strip("[]").split(","))
        out[(i, j)] = s.nu
    return out
