"""Surface codes with a twist defect and with a full-width dislocation.

twisted_surface uses a cone lattice in doubled coordinates: start from the
square [-M, M]^2 (qubits at x + y even, faces at x + y odd, as in codes.py),
delete the wedge x > |y| and glue the ray (k, -k) onto (k, k).  The centre
qubit then touches three faces, an odd cycle that a CSS colouring cannot
accommodate.  Faces just below the glued seam form the defect line: each
keeps its usual letter on its two off-seam qubits and takes the other letter
on its seam qubits.  The terminal face at (0, -1) carries Y on the centre.
"""

from __future__ import annotations

from .pauli import PauliOperator, PauliSpan, conjugate, logical_pairs

__all__ = ["twisted_surface", "twisted_identity_spec", "dislocation_rect", "cone_lattice"]


def _flip(letter: str) -> str:
    return "Z" if letter == "X" else "X"


def cone_lattice(M: int) -> tuple[list[tuple[int, int]], list[tuple[int, int]], dict]:
    """(qubit coords, face coords, face -> sorted neighbour coords) of the cone."""

    def kept(x: int, y: int) -> bool:
        return abs(x) <= M and abs(y) <= M and not x > abs(y)

    def canon(x: int, y: int) -> tuple[int, int]:
        return (x, x) if x > 0 and y == -x else (x, y)

    pts = {canon(x, y) for x in range(-M, M + 1) for y in range(-M, M + 1) if kept(x, y)}
    qubits = sorted(p for p in pts if (p[0] + p[1]) % 2 == 0)
    faces = sorted(p for p in pts if (p[0] + p[1]) % 2 == 1)
    nbrs = {}
    for x, y in faces:
        cand = ((x - 1, y), (x + 1, y), (x, y - 1), (x, y + 1))
        nbrs[(x, y)] = sorted({canon(a, b) for a, b in cand if kept(a, b)})
    return qubits, faces, nbrs


def _short_logicals(stab: PauliSpan, xbar: PauliOperator, zbar: PauliOperator,
                    candidates: list[PauliOperator]) -> tuple[PauliOperator, PauliOperator]:
    """Replace each logical by the lightest candidate equal to it up to a stabilizer."""

    def best(op: PauliOperator) -> PauliOperator:
        pool = []
        for c in candidates:
            k = stab.phase_of(c * op)
            if k == 0:
                pool.append(c)
            elif k == 2:
                pool.append(-c)
        return min(pool, key=lambda c: c.weight, default=op)

    return best(xbar), best(zbar)


def twisted_surface(d: int):
    """Twisted surface code on the cone lattice of radius d - 1 (one logical qubit)."""
    from .codes import CodeInstance, check_code

    if d < 3 or d % 2 == 0:
        raise ValueError("twisted_surface needs odd d >= 3")
    M = d - 1
    qubits, faces, nbrs = cone_lattice(M)
    index = {q: i for i, q in enumerate(qubits)}
    n = len(qubits)
    line = [(k, -k - 1) for k in range(M)]
    seam = {(k, k) for k in range(M + 1)}
    ordered = line + [f for f in faces if f not in line]
    gens = []
    for f in ordered:
        usual = "X" if f[0] % 2 else "Z"
        letters = {}
        for q in nbrs[f]:
            if f in line and q == (0, 0):
                letters[index[q]] = "Y"
            elif f in line and q in seam:
                letters[index[q]] = _flip(usual)
            else:
                letters[index[q]] = usual
        gens.append(PauliOperator.from_sparse(n, letters))
    stab = PauliSpan(n, tuple(gens))
    (xbar, zbar), = logical_pairs(stab)
    # prefer straight boundary strings as representatives
    strings = []
    for letter in "XZ":
        strings.append(PauliOperator.from_sparse(n, {index[q]: letter for q in qubits if q[0] == -M}))
        strings.append(PauliOperator.from_sparse(n, {index[q]: letter for q in qubits if q[1] == M}))
        strings.append(PauliOperator.from_sparse(n, {index[q]: letter for q in qubits if q[1] == -M}))
    xbar, zbar = _short_logicals(stab, xbar, zbar, strings)
    code = CodeInstance(
        f"twisted_{d}",
        n,
        stab,
        ((xbar, zbar),),
        {i: q for i, q in enumerate(qubits)},
        None,
        {
            "faces": ordered,
            "defect_line": list(range(len(line))),  # generator indices, twist first
            "twist": 0,
            "radius": M,
        },
    )
    check_code(code)
    return code


def twisted_identity_spec(d: int, D: int = 2, lifted: bool = False):
    """Identity channel of twisted_surface(d).

    lifted=True is the bounded-degree variant: odd defect-line generators
    couple their Z targets one interval later and the centre wire is TypeII,
    so no V edges are needed and the twist ancilla is measured in X.
    """
    from .foliation import ChannelSpec

    code = twisted_surface(d)
    G = code.stabilizers
    if not lifted:
        return ChannelSpec(code.n, G, G.generators, D, name=f"identity_{code.name}")
    line = set(code.meta["defect_line"])
    lifts = tuple(frozenset(g.support) if (i in line and i % 2 == 1) else frozenset() for i, g in enumerate(G.generators))
    centre = next(q for q, xy in code.layout.items() if xy == (0, 0))
    kinds = tuple("TypeII" if j == centre else "TypeI" for j in range(code.n))
    return ChannelSpec(code.n, G, G.generators, D, wire_kinds=kinds, lift_targets=lifts,
                       name=f"identity_{code.name}_lifted")


def dislocation_rect(d: int, width: int | None = None):
    """Rectangular planar code with a diagonal dislocation through its middle.

    Qubits with x - y > c are Hadamard-conjugated, so every face the line
    crosses becomes two X terms and two Z terms.  meta["clifford"] lists the
    Hadamard qubits, a single-qubit witness of local equivalence to CSS.
    """
    from .codes import CodeInstance, check_code, rect_surface

    if d < 3 or d % 2 == 0:
        raise ValueError("dislocation_rect needs odd d >= 3")
    w = width or d
    base = rect_surface(w, d)
    c = (w - d)
    c -= c % 2
    flipped = [q for q, (x, y) in base.layout.items() if x - y > c]

    def h(op: PauliOperator) -> PauliOperator:
        out = op
        for q in flipped:
            out = _hadamard(out, q)
        return out

    gens = tuple(h(g) for g in base.stabilizers.generators)
    xbar, zbar = (h(p) for p in base.logicals[0])
    code = CodeInstance(
        f"dislocation_{w}x{d}",
        base.n,
        PauliSpan(base.n, gens),
        ((xbar, zbar),),
        dict(base.layout),
        base.distance,
        {
            "faces": base.meta["faces"],
            "clifford": [("H", q) for q in flipped],
            "defect": [i for i, g in enumerate(gens) if g.xbits and g.zbits],
        },
    )
    code.meta["ybar"] = code.ybar()
    check_code(code)
    return code


def _hadamard(op: PauliOperator, q: int) -> PauliOperator:
    return conjugate(op, ("H", q))
