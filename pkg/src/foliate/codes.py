"""Code library: planar and twisted surface codes, surgery merges, Bacon-Shor.

Surface codes use doubled coordinates: qubits sit at integer points (x, y)
with x + y even.  X-type stabilizers live at (odd x, even y) and Z-type at
(even x, odd y); each acts on the in-range neighbours (x +- 1, y), (x, y +- 1).
Xbar runs up the column x = 0 and Zbar along the row y = 0.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .pauli import (
    GaugeGroup,
    PauliOperator,
    PauliSpan,
    centralizer,
)

__all__ = [
    "CodeInstance",
    "planar_surface",
    "rect_surface",
    "merged_rect",
    "init_arbitrary_input",
    "twisted_surface",
    "twisted_identity_spec",
    "dislocation_rect",
    "bacon_shor",
    "check_code",
    "min_logical_weight",
    "direct_sum",
]


@dataclass(frozen=True)
class CodeInstance:
    name: str
    n: int
    stabilizers: PauliSpan
    logicals: tuple[tuple[PauliOperator, PauliOperator], ...]
    layout: dict = field(default_factory=dict, compare=False)  # qubit -> (x, y)
    distance: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def k(self) -> int:
        return len(self.logicals)

    @property
    def xbar(self) -> PauliOperator:
        return self.logicals[0][0]

    @property
    def zbar(self) -> PauliOperator:
        return self.logicals[0][1]

    def ybar(self, j: int = 0) -> PauliOperator:
        """i Xbar Zbar, Hermitian and signed like Y = iXZ on the overlap."""
        x, z = self.logicals[j]
        return (x * z).scaled(1)


def check_code(code: CodeInstance) -> None:
    """Commutation, consistency and symplectic pairing of the logicals."""
    s = code.stabilizers
    if not s.is_abelian:
        raise AssertionError(f"{code.name}: stabilizers do not commute")
    s.check_consistent()
    for x, z in code.logicals:
        for op in (x, z):
            if not op.is_hermitian:
                raise AssertionError(f"{code.name}: logical {op} is not Hermitian")
            if not all(op.commutes(g) for g in s.generators):
                raise AssertionError(f"{code.name}: logical {op} anticommutes with a stabilizer")
    for a, (xa, za) in enumerate(code.logicals):
        for b, (xb, zb) in enumerate(code.logicals):
            if xa.commutes(zb) == (a == b):
                raise AssertionError(f"{code.name}: pairing broken at {a},{b}")
            if not xa.commutes(xb) or not za.commutes(zb):
                raise AssertionError(f"{code.name}: logicals of one type anticommute")
    if code.n - s.rank != code.k:
        raise AssertionError(f"{code.name}: k = {code.k} but n - rank = {code.n - s.rank}")


def min_logical_weight(code: CodeInstance, max_weight: int | None = None) -> int:
    """Brute-force distance: least weight of a centralizer element outside the stabilizer."""
    n = code.n
    s = code.stabilizers
    cent = centralizer(s)
    limit = max_weight or n
    for w in range(1, limit + 1):
        for qubits in itertools.combinations(range(n), w):
            for letters in itertools.product("XYZ", repeat=w):
                p = PauliOperator.from_sparse(n, zip(qubits, letters))
                if cent.contains(p) and not s.contains(p):
                    return w
    return limit + 1


# ---------------------------------------------------------------------------
# planar surface codes


def _lattice(width: int, height: int, extra=()) -> tuple[list[tuple[int, int]], dict]:
    """Qubit coordinates of a width x height planar patch (in data-qubit units)."""
    coords = [(x, y) for y in range(2 * height - 1) for x in range(2 * width - 1) if (x + y) % 2 == 0]
    coords += list(extra)
    return coords, {c: i for i, c in enumerate(coords)}


def _faces(coords, index, width: int, height: int, y0: int = 0) -> tuple[list[PauliOperator], list[tuple]]:
    n = len(coords)
    gens, where = [], []
    for y in range(y0, y0 + 2 * height - 1):
        for x in range(2 * width - 1):
            if (x + y) % 2 == 0:
                continue
            letter = "X" if x % 2 == 1 else "Z"
            nb = [index[c] for c in ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1)) if c in index]
            gens.append(PauliOperator.from_sparse(n, {q: letter for q in nb}))
            where.append((x, y))
    return gens, where


def rect_surface(width: int, height: int, name: str | None = None) -> CodeInstance:
    """Planar code with `width` qubits along Zbar and `height` along Xbar."""
    if width < 2 or height < 2:
        raise ValueError("planar codes need at least 2 x 2")
    coords, index = _lattice(width, height)
    n = len(coords)
    gens, where = _faces(coords, index, width, height)
    xbar = PauliOperator.from_sparse(n, {index[(0, y)]: "X" for y in range(0, 2 * height - 1, 2)})
    zbar = PauliOperator.from_sparse(n, {index[(x, 0)]: "Z" for x in range(0, 2 * width - 1, 2)})
    code = CodeInstance(
        name or f"rect_{width}x{height}",
        n,
        PauliSpan(n, tuple(gens)),
        ((xbar, zbar),),
        {i: c for i, c in enumerate(coords)},
        min(width, height),
        {"faces": where},
    )
    check_code(code)
    return code


def planar_surface(d: int) -> CodeInstance:
    """Unrotated planar code: n = d^2 + (d-1)^2, one logical qubit."""
    if d < 2:
        raise ValueError("planar_surface needs d >= 2")
    return rect_surface(d, d, f"planar_{d}")


def direct_sum(a: CodeInstance, b: CodeInstance, name: str | None = None) -> CodeInstance:
    """Two codes side by side on a + b qubits (a first)."""
    n = a.n + b.n
    ea = list(range(a.n))
    eb = list(range(a.n, n))
    gens = tuple(g.embed(n, ea) for g in a.stabilizers.generators) + tuple(
        g.embed(n, eb) for g in b.stabilizers.generators
    )
    logicals = tuple((x.embed(n, ea), z.embed(n, ea)) for x, z in a.logicals) + tuple(
        (x.embed(n, eb), z.embed(n, eb)) for x, z in b.logicals
    )
    layout = dict(a.layout)
    shift = max((c[1] for c in a.layout.values()), default=0) + 2
    for q, (x, y) in b.layout.items():
        layout[a.n + q] = (x, y + shift)
    return CodeInstance(name or f"{a.name}+{b.name}", n, PauliSpan(n, gens), logicals, layout)


def merged_rect(a: CodeInstance, b: CodeInstance, gap: int = 1) -> CodeInstance:
    """Extended rectangular code joining two planar patches along Zbar.

    Patch b is stacked above patch a; `gap` rows of fresh qubits fill the
    seam.  The register is a's qubits, then b's, then the seam qubits.
    ZbarA ZbarB lies in the merged stabilizer group.
    """
    if gap < 1:
        raise ValueError("merged_rect needs gap >= 1")
    coords_a = [a.layout[q] for q in range(a.n)]
    coords_b = [b.layout[q] for q in range(b.n)]
    xa = max(c[0] for c in coords_a)
    xb = max(c[0] for c in coords_b)
    if xa != xb:
        raise ValueError("patches must have equal width")
    width = xa // 2 + 1
    ha = max(c[1] for c in coords_a) // 2 + 1
    hb = max(c[1] for c in coords_b) // 2 + 1
    shift = 2 * ha + 2 * (gap - 1)
    height = ha + hb + gap - 1  # a, the seam rows and b
    rows = 2 * height - 1
    all_coords = [(x, y) for y in range(rows) for x in range(2 * width - 1) if (x + y) % 2 == 0]
    a_set = set(coords_a)
    b_set = {(x, y + shift) for x, y in coords_b}
    seam = [c for c in all_coords if c not in a_set and c not in b_set]
    coords = coords_a + [(x, y + shift) for x, y in coords_b] + seam
    index = {c: i for i, c in enumerate(coords)}
    if len(index) != len(all_coords):
        raise ValueError("patches overlap")
    n = len(coords)
    gens, where = _faces(coords, index, width, height)
    ea, eb = list(range(a.n)), list(range(a.n, a.n + b.n))
    zz = a.zbar.embed(n, ea) * b.zbar.embed(n, eb)
    span = PauliSpan(n, tuple(gens))
    if not span.contains(zz):
        raise ValueError("merged code does not contain ZbarA ZbarB; check patch orientation")
    xbar = PauliOperator.from_sparse(n, {index[(0, y)]: "X" for y in range(0, rows, 2)})
    zbar = a.zbar.embed(n, ea)
    code = CodeInstance(
        f"merged({a.name},{b.name})",
        n,
        span,
        ((xbar, zbar),),
        {i: c for i, c in enumerate(coords)},
        None,
        {"seam": list(range(a.n + b.n, n)), "faces": where, "zz": zz},
    )
    check_code(code)
    return code


def init_arbitrary_input(d: int) -> tuple[PauliSpan, int, dict]:
    """Product input that encodes the central qubit's state into planar_surface(d).

    Qubits on the central column (and the vertical wedge around it) start in
    |+>, those on the central row's horizontal wedge in |0>.  Returns
    (span of rank n - 1, free qubit index, region map qubit -> "X" | "Z").
    """
    if d < 3 or d % 2 == 0:
        raise ValueError("init_arbitrary_input needs odd d >= 3")
    code = planar_surface(d)
    c = d - 1
    centre = None
    region = {}
    gens = []
    for q, (x, y) in code.layout.items():
        if (x, y) == (c, c):
            centre = q
            continue
        vertical = abs(x - c) < abs(y - c) or (abs(x - c) == abs(y - c) and y != c and (x - c) * (y - c) > 0)
        region[q] = "X" if vertical else "Z"
        gens.append(PauliOperator.single(code.n, q, region[q]))
    return PauliSpan(code.n, tuple(gens)), centre, region


def central_logicals(d: int) -> tuple[PauliOperator, PauliOperator]:
    """Xbar on the central column and Zbar on the central row of planar_surface(d)."""
    code = planar_surface(d)
    idx = {v: k for k, v in code.layout.items()}
    c = d - 1
    xbar = PauliOperator.from_sparse(code.n, {idx[(c, y)]: "X" for y in range(0, 2 * d - 1, 2)})
    zbar = PauliOperator.from_sparse(code.n, {idx[(x, c)]: "Z" for x in range(0, 2 * d - 1, 2)})
    return xbar, zbar


# ---------------------------------------------------------------------------
# subsystem codes


def bacon_shor(m: int) -> GaugeGroup:
    """m x m Bacon-Shor: XX on horizontal neighbours, ZZ on vertical ones."""
    if m < 2:
        raise ValueError("bacon_shor needs m >= 2")
    n = m * m

    def q(r: int, c: int) -> int:
        return r * m + c

    gens = []
    for r in range(m):
        for c in range(m - 1):
            gens.append(PauliOperator.from_sparse(n, {q(r, c): "X", q(r, c + 1): "X"}))
    for r in range(m - 1):
        for c in range(m):
            gens.append(PauliOperator.from_sparse(n, {q(r, c): "Z", q(r + 1, c): "Z"}))
    return GaugeGroup(PauliSpan(n, tuple(gens)))


# defect codes live in twisted.py; re-exported here
from .twisted import dislocation_rect, twisted_identity_spec, twisted_surface  # noqa: E402
