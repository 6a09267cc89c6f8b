"""Finite posets, open intervals, order complexes, and homotopy-safe reduction.

The order relation is stored as dense bitmask rows (Python ints), which keeps
interval extraction and transitive-reduction computations cheap at the sizes
that occur here (up to a few thousand elements).
"""

from __future__ import annotations


__all__ = [
    "PosetError",
    "FinitePoset",
    "OrderComplex",
    "open_interval",
    "closed_interval",
    "height",
    "order_complex",
    "product",
    "dismantle",
    "poset_isomorphic",
    "parse_poset_text",
    "poset_to_text",
    "hasse_dot",
]


class PosetError(Exception):
    pass


class FinitePoset:
    """Elements 0..n-1 with a reflexive, antisymmetric, transitive relation.

    up[i] is the bitmask of j with i <= j; down[i] the bitmask of j <= i.
    """

    __slots__ = ("n", "labels", "up", "down", "_covers", "_height")

    def __init__(self, n, labels, up, validate=True):
        self.n = n
        self.labels = tuple(labels)
        self.up = tuple(up)
        if len(self.labels) != n or len(self.up) != n:
            raise PosetError("label/relation size mismatch")
        down = [0] * n
        for i in range(n):
            row = self.up[i]
            while row:
                j = (row & -row).bit_length() - 1
                down[j] |= 1 << i
                row &= row - 1
        self.down = tuple(down)
        self._covers = None
        self._height = None
        if validate:
            self._validate()

    def _validate(self):
        n = self.n
        up = self.up
        for i in range(n):
            if not (up[i] >> i) & 1:
                raise PosetError(f"relation not reflexive at {self.labels[i]}")
        for i in range(n):
            row = up[i]
            mask = row & ~(1 << i)
            while mask:
                j = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                if (up[j] >> i) & 1:
                    raise PosetError(
                        f"antisymmetry fails: {self.labels[i]} <> {self.labels[j]}"
                    )
                if up[j] & ~row:
                    raise PosetError(
                        f"transitivity fails above {self.labels[i]} via {self.labels[j]}"
                    )

    @classmethod
    def from_leq(cls, labels, leq_pairs, validate=True):
        """Build from an iterable of (i, j) index pairs meaning i <= j."""
        labels = list(labels)
        n = len(labels)
        up = [1 << i for i in range(n)]
        for i, j in leq_pairs:
            up[i] |= 1 << j
        return cls(n, labels, up, validate=validate)

    @classmethod
    def from_covers(cls, labels, cover_pairs):
        """Build from Hasse covers; the transitive closure is computed."""
        labels = list(labels)
        n = len(labels)
        up = [1 << i for i in range(n)]
        succ = [[] for _ in range(n)]
        for a, b in cover_pairs:
            succ[a].append(b)
        # closure by iterative DFS; cycle detection via colouring
        state = [0] * n
        for root in range(n):
            if state[root] == 2:
                continue
            stack = [(root, 0)]
            state[root] = 1
            while stack:
                i, k = stack[-1]
                if k < len(succ[i]):
                    stack[-1] = (i, k + 1)
                    j = succ[i][k]
                    if state[j] == 1:
                        raise PosetError("cover relation has a cycle")
                    if state[j] == 0:
                        state[j] = 1
                        stack.append((j, 0))
                else:
                    for j in succ[i]:
                        up[i] |= up[j]
                    state[i] = 2
                    stack.pop()
        return cls(n, labels, up)

    def leq(self, i, j):
        return (self.up[i] >> j) & 1 == 1

    def lt(self, i, j):
        return i != j and (self.up[i] >> j) & 1 == 1

    def covers(self):
        """Transitive reduction as a sorted list of (lower, upper) pairs."""
        if self._covers is None:
            out = []
            for i in range(self.n):
                strict = self.up[i] & ~(1 << i)
                mask = strict
                while mask:
                    j = (mask & -mask).bit_length() - 1
                    mask &= mask - 1
                    # j covers i iff nothing lies strictly between
                    between = strict & (self.down[j] & ~(1 << j))
                    if between == 0:
                        out.append((i, j))
            self._covers = sorted(out)
        return self._covers

    def height(self):
        """Length in edges of the longest strict chain; 0 if discrete/empty."""
        if self._height is None:
            n = self.n
            order = sorted(range(n), key=lambda i: bin(self.down[i]).count("1"))
            h = [0] * n
            for i in order:
                mask = self.down[i] & ~(1 << i)
                best = 0
                while mask:
                    j = (mask & -mask).bit_length() - 1
                    mask &= mask - 1
                    if h[j] + 1 > best:
                        best = h[j] + 1
                h[i] = best
            self._height = max(h) if n else 0
        return self._height

    def restrict(self, indices):
        """Induced sub-poset on the given indices (kept in the given order)."""
        indices = list(indices)
        pos = {v: k for k, v in enumerate(indices)}
        keep_mask = 0
        for v in indices:
            keep_mask |= 1 << v
        up = []
        for v in indices:
            row = self.up[v] & keep_mask
            new = 0
            while row:
                j = (row & -row).bit_length() - 1
                row &= row - 1
                new |= 1 << pos[j]
            up.append(new)
        return FinitePoset(
            len(indices), [self.labels[v] for v in indices], up, validate=False
        )

    def maximal_elements(self):
        return [i for i in range(self.n) if self.up[i] == (1 << i)]

    def minimal_elements(self):
        return [i for i in range(self.n) if self.down[i] == (1 << i)]

    def index_of(self, label):
        try:
            return self.labels.index(label)
        except ValueError:
            raise PosetError(f"no element labelled {label!r}") from None

    def __repr__(self):
        return f"FinitePoset({self.n} elements)"

    def __eq__(self, other):
        return (
            isinstance(other, FinitePoset)
            and self.labels == other.labels
            and self.up == other.up
        )

    def __hash__(self):
        return hash((self.labels, self.up))

    def relation_key(self):
        """Label-free canonical key of the relation (for deduplication)."""
        return (self.n,) + self.up


class OrderComplex:
    """Strict chains of a poset, grouped by dimension.

    simplices_by_dim[d] lists the chains with d+1 elements, each as a tuple
    of indices ordered along the chain, the lists in lexicographic order.
    """

    __slots__ = ("simplices_by_dim",)

    def __init__(self, simplices_by_dim):
        self.simplices_by_dim = [list(level) for level in simplices_by_dim]
        while self.simplices_by_dim and not self.simplices_by_dim[-1]:
            self.simplices_by_dim.pop()

    @property
    def empty(self):
        return not self.simplices_by_dim

    def dimension(self):
        return len(self.simplices_by_dim) - 1

    def total_simplices(self):
        return sum(len(level) for level in self.simplices_by_dim)

    def counts(self):
        return [len(level) for level in self.simplices_by_dim]


def order_complex(P, max_simplices=None):
    """All strict chains of P, deterministic lexicographic order per dimension."""
    n = P.n
    levels = []
    if n == 0:
        return OrderComplex([])
    chains = [(i,) for i in range(n)]
    levels.append(chains)
    total = n
    while True:
        nxt = []
        for chain in levels[-1]:
            last = chain[-1]
            mask = P.up[last] & ~(1 << last)
            while mask:
                j = (mask & -mask).bit_length() - 1
                mask &= mask - 1
                nxt.append(chain + (j,))
        if not nxt:
            break
        nxt.sort()
        total += len(nxt)
        if max_simplices is not None and total > max_simplices:
            raise PosetError(f"order complex exceeds {max_simplices} simplices")
        levels.append(nxt)
    return OrderComplex(levels)


def open_interval(P, x, y):
    """Induced sub-poset on {z : y < z < x}; empty when y is not below x."""
    if not (0 <= x < P.n and 0 <= y < P.n):
        raise PosetError("interval endpoint out of range")
    mask = P.down[x] & P.up[y] & ~(1 << x) & ~(1 << y)
    indices = []
    m = mask
    while m:
        j = (m & -m).bit_length() - 1
        m &= m - 1
        indices.append(j)
    return P.restrict(indices)


def closed_interval(P, x, y):
    if not (0 <= x < P.n and 0 <= y < P.n):
        raise PosetError("interval endpoint out of range")
    mask = P.down[x] & P.up[y]
    indices = []
    m = mask
    while m:
        j = (m & -m).bit_length() - 1
        m &= m - 1
        indices.append(j)
    return P.restrict(indices)


def height(P):
    return P.height()


def product(P, Q, label_sep="|"):
    """Componentwise order on pairs; labels concatenated with a separator."""
    labels = []
    up = []
    nq = Q.n
    for i in range(P.n):
        for j in range(Q.n):
            labels.append(f"{P.labels[i]}{label_sep}{Q.labels[j]}")
            rowp = P.up[i]
            row = 0
            mp = rowp
            while mp:
                a = (mp & -mp).bit_length() - 1
                mp &= mp - 1
                row |= Q.up[j] << (a * nq)
            up.append(row)
    return FinitePoset(P.n * Q.n, labels, up, validate=False)


def dismantle(P):
    """Remove irreducible points until none remain; homotopy type preserved.

    A point is removable when its strict up-set has a minimum or its strict
    down-set has a maximum (the retraction onto the rest moves every element
    in one direction, so the order complexes are homotopy equivalent).
    """
    n = P.n
    alive = (1 << n) - 1 if n else 0
    up = list(P.up)
    down = list(P.down)

    def unique_extreme(mask, rows):
        # does `mask` have an element comparable below/above all others?
        m = mask
        while m:
            j = (m & -m).bit_length() - 1
            m &= m - 1
            if mask & ~rows[j] == 0:
                return j
        return None

    changed = True
    while changed:
        changed = False
        m = alive
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            upset = up[i] & alive & ~(1 << i)
            if upset and unique_extreme(upset, up) is not None:
                alive &= ~(1 << i)
                changed = True
                continue
            downset = down[i] & alive & ~(1 << i)
            if downset and unique_extreme(downset, down) is not None:
                alive &= ~(1 << i)
                changed = True
    indices = [i for i in range(n) if (alive >> i) & 1]
    if len(indices) == n:
        return P
    return P.restrict(indices)


def _iso_invariant(P):
    """Per-element invariant used to cut the isomorphism search space."""
    inv = []
    for i in range(P.n):
        inv.append(
            (
                bin(P.down[i]).count("1"),
                bin(P.up[i]).count("1"),
            )
        )
    # refine by multiset of neighbour invariants, twice
    for _ in range(2):
        new = []
        for i in range(P.n):
            dn = sorted(
                inv[j]
                for j in range(P.n)
                if (P.down[i] >> j) & 1 and j != i
            )
            un = sorted(
                inv[j] for j in range(P.n) if (P.up[i] >> j) & 1 and j != i
            )
            new.append((inv[i], tuple(dn), tuple(un)))
        inv = new
    return inv


def poset_isomorphic(P, Q):
    """Backtracking isomorphism test (test helper; correctness over speed)."""
    if P.n != Q.n:
        return False
    ip = _iso_invariant(P)
    iq = _iso_invariant(Q)
    if sorted(ip) != sorted(iq):
        return False
    candidates = [[j for j in range(Q.n) if iq[j] == ip[i]] for i in range(P.n)]
    order = sorted(range(P.n), key=lambda i: len(candidates[i]))
    assignment = [-1] * P.n
    used = [False] * Q.n

    def ok(i, j, depth):
        for k in order[:depth]:
            jk = assignment[k]
            if P.leq(i, k) != Q.leq(j, jk) or P.leq(k, i) != Q.leq(jk, j):
                return False
        return True

    def backtrack(depth):
        if depth == P.n:
            return True
        i = order[depth]
        for j in candidates[i]:
            if used[j] or not ok(i, j, depth):
                continue
            assignment[i] = j
            used[j] = True
            if backtrack(depth + 1):
                return True
            used[j] = False
            assignment[i] = -1
        return False

    return backtrack(0)


# ---------------------------------------------------------------------------
# Text format and DOT export
# ---------------------------------------------------------------------------


def parse_poset_text(text):
    """Poset file format: one `elements:` line, then `cover: a < b` lines."""
    labels = None
    covers = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("elements:"):
            if labels is not None:
                raise PosetError(f"line {lineno}: repeated elements line")
            labels = line[len("elements:") :].split()
            if len(set(labels)) != len(labels):
                raise PosetError(f"line {lineno}: duplicate labels")
        elif line.startswith("cover:"):
            if labels is None:
                raise PosetError(f"line {lineno}: cover before elements")
            body = line[len("cover:") :]
            parts = [p.strip() for p in body.split("<")]
            if len(parts) != 2 or not all(parts):
                raise PosetError(f"line {lineno}: expected `cover: a < b`")
            idx = {lab: k for k, lab in enumerate(labels)}
            for p in parts:
                if p not in idx:
                    raise PosetError(f"line {lineno}: unknown element {p!r}")
            covers.append((idx[parts[0]], idx[parts[1]]))
        else:
            raise PosetError(f"line {lineno}: unrecognised line {line!r}")
    if labels is None:
        raise PosetError("missing elements line")
    return FinitePoset.from_covers(labels, covers)


def poset_to_text(P):
    lines = ["elements: " + " ".join(P.labels)]
    for a, b in P.covers():
        lines.append(f"cover: {P.labels[a]} < {P.labels[b]}")
    return "\n".join(lines) + "\n"


def hasse_dot(P, name="poset"):
    """Hasse diagram as DOT, edges pointing from smaller to larger element."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i, lab in enumerate(P.labels):
        lines.append(f'  n{i} [label="{lab}"];')
    for a, b in P.covers():
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
