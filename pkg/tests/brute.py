"""Independent brute-force oracles the test suite checks the package against.

Deliberately naive: explicit path enumeration for d-separation, raw
orientation scans for DAG enumeration, and per-node accumulation for
parameter counting.  None of these share code paths with the package
implementations they validate.
"""

from itertools import combinations, product

from pbnet import Dag, ExactOracle


def simple_paths(dag, u, v):
    """All simple u..v paths in the undirected skeleton, as vertex tuples."""
    adjacency = [set() for _ in range(dag.n)]
    for a, b in dag.edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    out = []
    stack = [(u, (u,))]
    while stack:
        node, path = stack.pop()
        if node == v:
            out.append(path)
            continue
        for nxt in sorted(adjacency[node]):
            if nxt not in path:
                stack.append((nxt, path + (nxt,)))
    return out


def path_is_active(dag, path, z):
    """Active iff colliders have a descendant in z (or are in z) and
    non-colliders are outside z."""
    zset = set(z)
    for t in range(1, len(path) - 1):
        prev, node, nxt = path[t - 1], path[t], path[t + 1]
        is_collider = dag.has_edge(prev, node) and dag.has_edge(nxt, node)
        if is_collider:
            closure = {node} | set(dag.descendants(node))
            if not (closure & zset):
                return False
        else:
            if node in zset:
                return False
    return True


def d_separated_paths(dag, u, v, z=()):
    """Path-enumeration oracle for d-separation."""
    ui, vi = dag.index(u), dag.index(v)
    zi = [dag.index(w) for w in z]
    return not any(path_is_active(dag, path, zi) for path in simple_paths(dag, ui, vi))


def markov_by_definition_paths(table, dag, tol=1e-9):
    """Definition-level Markov test with path-enumeration d-separation."""
    oracle = ExactOracle(table, tol)
    n = dag.n
    for u in range(n):
        for v in range(u + 1, n):
            rest = [x for x in range(n) if x != u and x != v]
            for mask in range(1 << len(rest)):
                z = tuple(rest[j] for j in range(len(rest)) if (mask >> j) & 1)
                if d_separated_paths(dag, u, v, z) and not oracle.query(u, v, z):
                    return False
    return True


def parameter_count_loop(dag):
    """Per-node accumulation of the free-parameter count."""
    total = 0
    for i in range(dag.n):
        rows = 1
        for parent in dag.parents(i):
            rows = rows * dag.variables[parent].alphabet_size
        total += rows * (dag.variables[i].alphabet_size - 1)
    return total


def _has_cycle(n, edges):
    color = [0] * n  # 0 new, 1 active, 2 done
    children = [[] for _ in range(n)]
    for a, b in edges:
        children[a].append(b)

    def visit(x):
        color[x] = 1
        for c in children[x]:
            if color[c] == 1:
                return True
            if color[c] == 0 and visit(c):
                return True
        color[x] = 2
        return False

    return any(color[x] == 0 and visit(x) for x in range(n))


def all_dag_edge_sets(n):
    """Edge sets of every labeled DAG on n vertices, via orientation scan."""
    pairs = list(combinations(range(n), 2))
    out = []
    for choice in product((0, 1, 2), repeat=len(pairs)):
        edges = []
        for (a, b), c in zip(pairs, choice):
            if c == 1:
                edges.append((a, b))
            elif c == 2:
                edges.append((b, a))
        if not _has_cycle(n, edges):
            out.append(frozenset(edges))
    return out


def all_dags_on(variables):
    """Every labeled DAG on the given variables, via the orientation scan."""
    return [Dag(variables, edges) for edges in all_dag_edge_sets(len(variables))]
