"""Constructors for the catalog of narrow graded Lie algebras.

Every constructor returns the algebra in its natural (Carnot) grading,
except the width-one presentations (``*_w1``, ``m2``, ``wplus``) whose
grading is by basis index.  All catalog output is Jacobi-validated at
construction time.

Family parameters are the Carnot length except where the customary name of
the family carries a different label; see the individual docstrings.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import GradedLieAlgebra, StructureError
from .scalars import FIELD_Q

# Structure constants of the second width-one Kac-Moody positive part,
# indexed by basis-index residues mod 8 (row q mod 8, column l mod 8;
# residue 0 stands for indices 8, 16, ...).  The matrix is skew-symmetric.
# The residue-(5,7) entry is +1: that is the unique sign making the mod-8
# periodic constants satisfy the Jacobi identity, and the resulting algebra
# matches the twisted loop realization of the second affine family exactly.
N2_TABLE = (
    (0, 1, -2, -1, 0, 1, 2, -1),
    (-1, 0, 1, 1, -3, -2, 0, 1),
    (2, -1, 0, 0, 0, 1, -1, 0),
    (1, -1, 0, 0, 3, -1, 1, -2),
    (0, 3, 0, -3, 0, 3, 0, -3),
    (-1, 2, -1, 1, -3, 0, 0, 1),
    (-2, 0, 1, -1, 0, 0, 0, 1),
    (1, -1, 0, 2, 3, -1, -1, 0),
)


class CatalogError(ValueError):
    """Unknown family name or invalid family parameters."""


def n1_constant(i: int, j: int) -> int:
    """Width-one constant for the first Kac-Moody family: [e_i,e_j]=c*e_{i+j}."""
    r = (j - i) % 3
    if r == 1:
        return 1
    if r == 2:
        return -1
    return 0


def n2_constant(q: int, l: int) -> int:
    return N2_TABLE[q % 8][l % 8]


def n1_degree(idx: int) -> int:
    """Natural degree of basis vector e_idx in the first Kac-Moody family."""
    k, s = divmod(idx - 1, 3)
    return 2 * k + 1 if s in (0, 1) else 2 * k + 2


def n2_degree(idx: int) -> int:
    """Natural degree of basis vector e_idx in the second Kac-Moody family."""
    k, s = divmod(idx - 1, 8)
    s += 1
    if s in (1, 2):
        return 6 * k + 1
    if s in (3, 4, 5):
        return 6 * k + s - 1
    if s in (6, 7):
        return 6 * k + 5
    return 6 * k + 6


def _chain_key(index: int):
    """(component, position) of e_index in a filiform-style natural grading."""
    if index in (1, 2):
        return (1, index - 1)
    return (index - 1, 0)


def m0(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """The filiform chain algebra of the given Carnot length.

    Basis e1..e_{length+1} with [e1, e_i] = e_{i+1}; the first component is
    <e1, e2>, every later component is one-dimensional.  m0(2) is the
    three-dimensional Heisenberg algebra that seeds the classification.
    """
    if length < 2:
        raise CatalogError("m0 needs length >= 2")
    comps = [("e1", "e2")] + [(f"e{i + 1}",) for i in range(2, length + 1)]
    table = {}
    for i in range(2, length + 1):
        table[((1, 0), _chain_key(i))] = (Fraction(1),)
    return GradedLieAlgebra(
        field, comps, table, name=f"m0({length})",
        provenance={"family": "m0", "length": length},
    )


def m0S(length: int, S, field: str = FIELD_Q) -> GradedLieAlgebra:
    """The chain algebra with one extra central vector z_r per r in S.

    S is a set of odd integers with 3 <= r <= length; z_r sits in grading r
    and is hit by [e_l, e_{r-l+2}] = (-1)^{l+1} z_r for 2 <= l <= (r+1)/2.
    """
    if length < 2:
        raise CatalogError("m0S needs length >= 2")
    S = tuple(sorted(set(int(r) for r in S)))
    if not S:
        raise CatalogError("m0S needs a nonempty set of gradings")
    for r in S:
        if r % 2 == 0 or r < 3:
            raise CatalogError(f"m0S gradings must be odd and >= 3, got {r}")
        if r > length:
            raise CatalogError(f"m0S grading {r} exceeds length {length}")
    comps = [["e1", "e2"]] + [[f"e{i + 1}"] for i in range(2, length + 1)]
    for r in S:
        comps[r - 1].append(f"z{r}")
    dims = [len(c) for c in comps]
    table = {}
    for i in range(2, length + 1):
        out = [Fraction(0)] * dims[i - 1]
        out[0] = Fraction(1)
        table[((1, 0), _chain_key(i))] = tuple(out)
    for r in S:
        z_pos = comps[r - 1].index(f"z{r}")
        for l in range(2, (r + 1) // 2 + 1):
            out = [Fraction(0)] * dims[r - 1]
            out[z_pos] = Fraction((-1) ** (l + 1))
            table[(_chain_key(l), _chain_key(r - l + 2))] = tuple(out)
    sname = ",".join(str(r) for r in S)
    return GradedLieAlgebra(
        field, [tuple(c) for c in comps], table, name=f"m0^{{{sname}}}({length})",
        provenance={"family": "m0S", "length": length, "S": list(S)},
    )


def m1(label: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """The non-extendable even-dimensional filiform family m1(2m+1).

    The parameter is the customary odd label 2m+1, which is also the Carnot
    length.  Basis e1..e_{2m+1}, z with the chain stopping at e_{2m+1}
    ([e1, e_{2m+1}] = 0) and the top vector generated by the alternating
    pairs [e_q, e_{2m+3-q}] = (-1)^{q+1} z, 2 <= q <= m+1.
    """
    if label < 3 or label % 2 == 0:
        raise CatalogError("m1 needs an odd label 2m+1 >= 3")
    m = (label - 1) // 2
    comps = [("e1", "e2")] + [(f"e{i + 1}",) for i in range(2, 2 * m + 1)] + [("z",)]
    table = {}
    for i in range(2, 2 * m + 1):
        table[((1, 0), _chain_key(i))] = (Fraction(1),)
    for q in range(2, m + 2):
        table[(_chain_key(q), _chain_key(2 * m + 3 - q))] = (
            Fraction((-1) ** (q + 1)),
        )
    return GradedLieAlgebra(
        field, comps, table, name=f"m1({label})",
        provenance={"family": "m1", "label": label, "length": label},
    )


def m03(label: int, S=(), field: str = FIELD_Q) -> GradedLieAlgebra:
    """The dead-end family with a re-routed chain through z_{2m-1}.

    Parameter is the odd label 2m+1 (= Carnot length, m >= 2).  Basis
    e1..e_{2m+2}, z_r for r in S, z_{2m-1}; the chain [e1,.] stops at e_{2m}
    and continues through [e1, z_{2m-1}] = e_{2m+1}, [e1, e_{2m+1}] =
    e_{2m+2}, with correction pairs feeding e_{2m+1} and e_{2m+2}.
    S must consist of odd integers in [3, 2m-3].
    """
    if label < 5 or label % 2 == 0:
        raise CatalogError("m03 needs an odd label 2m+1 >= 5")
    m = (label - 1) // 2
    S = tuple(sorted(set(int(r) for r in S)))
    for r in S:
        if r % 2 == 0 or not 3 <= r <= 2 * m - 3:
            raise CatalogError(
                f"m03 extra gradings must be odd in [3, {2 * m - 3}], got {r}"
            )
    comps = [["e1", "e2"]] + [[f"e{i + 1}"] for i in range(2, 2 * m + 2)]
    for r in S:
        comps[r - 1].append(f"z{r}")
    comps[2 * m - 2].append(f"z{2 * m - 1}")
    dims = [len(c) for c in comps]

    def key(index: int):
        return _chain_key(index)

    def unit(comp: int, pos: int, value):
        out = [Fraction(0)] * dims[comp - 1]
        out[pos] = Fraction(value)
        return tuple(out)

    table = {}
    for i in range(2, 2 * m):
        table[((1, 0), key(i))] = unit(i, 0, 1)
    z_main = (2 * m - 1, comps[2 * m - 2].index(f"z{2 * m - 1}"))
    table[((1, 0), z_main)] = unit(2 * m, 0, 1)
    table[((1, 0), key(2 * m + 1))] = unit(2 * m + 1, 0, 1)
    for q in range(2, m + 1):
        k1, k2 = key(q), key(2 * m + 1 - q)
        table[(k1, k2)] = unit(2 * m - 1, z_main[1], (-1) ** (q + 1))
    for r in S:
        z_pos = comps[r - 1].index(f"z{r}")
        for q in range(2, (r + 1) // 2 + 1):
            table[(key(q), key(r + 2 - q))] = unit(r, z_pos, (-1) ** (q + 1))
    for q in range(2, m + 1):
        table[(key(q), key(2 * m + 2 - q))] = unit(
            2 * m, 0, Fraction((-1) ** (q + 1)) * (m + 1 - q)
        )
    for p in range(3, m + 2):
        coeff = Fraction((-1) ** p) * (p - 2) * (Fraction(m) - Fraction(p - 1, 2))
        if coeff != 0:
            table[(key(p), key(2 * m + 3 - p))] = unit(2 * m + 1, 0, coeff)
    sname = ",".join(str(r) for r in S)
    nm = f"m03^{{{sname}}}({label})" if S else f"m03({label})"
    return GradedLieAlgebra(
        field, [tuple(c) for c in comps], table, name=nm,
        provenance={"family": "m03", "label": label, "S": list(S)},
    )


def n1_table(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """First Kac-Moody positive part with the mod-3 structure constants,
    graded naturally: odd components <e_{3k+1}, e_{3k+2}>, even <e_{3k+3}>."""
    if length < 2:
        raise CatalogError("n1 needs length >= 2")
    return _kac_moody(length, n1_degree, n1_constant, f"n1({length})", "n1", field)


def n2(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """Second Kac-Moody positive part from the mod-8 table of constants,
    graded naturally with two-dimensional components at degrees 6k+1, 6k+5."""
    if length < 2:
        raise CatalogError("n2 needs length >= 2")
    return _kac_moody(length, n2_degree, n2_constant, f"n2({length})", "n2", field)


def _kac_moody(length, degree, constant, name, family, field):
    degrees = {}
    idx = 1
    while degree(idx) <= length:
        degrees[idx] = degree(idx)
        idx += 1
    comps = [[] for _ in range(length)]
    for i in sorted(degrees):
        comps[degrees[i] - 1].append(f"e{i}")
    pos = {}
    for d, labels in enumerate(comps, start=1):
        for a, lab in enumerate(labels):
            pos[int(lab[1:])] = (d, a)
    table = {}
    indices = sorted(degrees)
    for x in indices:
        for y in indices:
            if y <= x:
                continue
            c = constant(x, y)
            if c == 0:
                continue
            d = degrees[x] + degrees[y]
            if d > length:
                continue
            target = x + y
            if target not in degrees or degrees[target] != d:
                raise StructureError(
                    f"structure constant [{x},{y}] breaks the natural grading"
                )
            out = [Fraction(0)] * len(comps[d - 1])
            out[pos[target][1]] = Fraction(c)
            table[(pos[x], pos[y])] = tuple(out)
    return GradedLieAlgebra(
        field, [tuple(c) for c in comps], table, name=name,
        provenance={"family": family, "length": length},
    )


def n23(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """One-dimensional central extension of the second Kac-Moody family by
    the interior grading-3 class: an extra central z with [e2, e3] = z."""
    if length < 3:
        raise CatalogError("n23 needs length >= 3")
    base = n2(length, field)
    comps = [list(c) for c in base.components]
    comps[2].append("z")
    dims = [len(c) for c in comps]
    z_pos = dims[2] - 1
    table = {}
    for key, out in base.brackets.items():
        (i, a), (j, b) = key
        if i + j == 3:
            table[key] = tuple(list(out) + [Fraction(0)])
        else:
            table[key] = out
    e23 = ((1, 1), (2, 0))
    out = list(table.get(e23, [Fraction(0)] * dims[2]))
    out[z_pos] = Fraction(1)
    table[e23] = tuple(out)
    return GradedLieAlgebra(
        field, [tuple(c) for c in comps], table, name=f"n2^3({length})",
        provenance={"family": "n23", "length": length},
    )


def _so3_bracket(x: str, y: str, sign: int):
    """Fiber bracket of the compact/split three-dimensional form:
    [u,v]=w, [v,w]=sign*u, [w,u]=v.  Returns (symbol, coefficient)."""
    rules = {
        ("u", "v"): ("w", 1),
        ("v", "w"): ("u", sign),
        ("w", "u"): ("v", 1),
    }
    if x == y:
        return None
    if (x, y) in rules:
        return rules[(x, y)]
    sym, c = rules[(y, x)]
    return (sym, -c)


def loop_truncate(form: str, max_grading: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """Truncated positive loop algebra over the compact (plus) or split
    (minus) real form, graded by t-degree.

    Odd components are <u_d, v_d> (u, v tensored with t^d), even components
    are <w_d>.  The bracket is [a@P, b@Q] = [a,b]@PQ, truncated above
    max_grading.
    """
    if form not in ("plus", "minus"):
        raise CatalogError("loop form must be 'plus' or 'minus'")
    if max_grading < 2:
        raise CatalogError("loop truncation needs max_grading >= 2")
    sign = 1 if form == "plus" else -1
    comps = []
    for d in range(1, max_grading + 1):
        comps.append((f"u{d}", f"v{d}") if d % 2 == 1 else (f"w{d}",))
    syms = {}
    for d, labels in enumerate(comps, start=1):
        for a, lab in enumerate(labels):
            syms[(d, a)] = (lab[0], d)
    table = {}
    keys = sorted(syms)
    for p, k1 in enumerate(keys):
        for k2 in keys[p + 1:]:
            d = k1[0] + k2[0]
            if d > max_grading:
                continue
            res = _so3_bracket(syms[k1][0], syms[k2][0], sign)
            if res is None:
                continue
            sym, c = res
            labels = comps[d - 1]
            out = [Fraction(0)] * len(labels)
            out[labels.index(f"{sym}{d}")] = Fraction(c)
            table[(k1, k2)] = tuple(out)
    nm = f"n1{'+' if sign > 0 else '-'}({max_grading})"
    return GradedLieAlgebra(
        field, comps, table, name=nm,
        provenance={"family": "n1loop", "form": form, "length": max_grading},
    )


def n1plus(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    return loop_truncate("plus", length, field)


def n1minus(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    return loop_truncate("minus", length, field)


def _width_one(length, constant, name, family, field, min_len=2):
    if length < min_len:
        raise CatalogError(f"{family} needs length >= {min_len}")
    comps = [(f"e{i}",) for i in range(1, length + 1)]
    table = {}
    for i in range(1, length + 1):
        for j in range(i + 1, length + 1):
            if i + j > length:
                continue
            c = constant(i, j)
            if c == 0:
                continue
            table[((i, 0), (j, 0))] = (Fraction(c),)
    return GradedLieAlgebra(
        field, comps, table, name=name,
        provenance={"family": family, "length": length, "grading": "width-one"},
    )


def wplus(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """Truncated positive part of the Witt algebra, [e_i,e_j] = (j-i)e_{i+j},
    in its width-one grading (it has no Carnot grading)."""
    return _width_one(length, lambda i, j: j - i, f"W+({length})", "wplus", field)


def m2(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """Vergne's second filiform family in its width-one grading:
    [e1,e_i] = e_{i+1} and [e2,e_j] = e_{j+2}."""

    def c(i, j):
        if i == 1 and j >= 2:
            return 1
        if i == 2 and j >= 3:
            return 1
        return 0

    return _width_one(length, c, f"m2({length})", "m2", field)


def m0_w1(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    """The chain algebra in its width-one grading (one basis vector per
    grading); regrading by lower-central-series depth recovers m0."""
    return _width_one(
        length, lambda i, j: 1 if i == 1 and j >= 2 else 0,
        f"m0_w1({length})", "m0_w1", field,
    )


def n1_w1(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    return _width_one(length, n1_constant, f"n1_w1({length})", "n1_w1", field)


def n2_w1(length: int, field: str = FIELD_Q) -> GradedLieAlgebra:
    return _width_one(length, n2_constant, f"n2_w1({length})", "n2_w1", field)


def abelian(dims, field: str = FIELD_Q) -> GradedLieAlgebra:
    """Abelian graded algebra with the given component dimensions."""
    comps = []
    for i, d in enumerate(dims, start=1):
        comps.append(tuple(f"a{i}.{k}" for k in range(d)))
    return GradedLieAlgebra(field, comps, {}, name="abelian")


_FAMILIES = {
    "m0": (m0, ("len",)),
    "m0s": (m0S, ("len", "S")),
    "m1": (m1, ("len",)),
    "m03": (m03, ("len", "S?")),
    "n1": (n1_table, ("len",)),
    "n1_table": (n1_table, ("len",)),
    "n2": (n2, ("len",)),
    "n23": (n23, ("len",)),
    "n2_3": (n23, ("len",)),
    "n1plus": (n1plus, ("len",)),
    "n1minus": (n1minus, ("len",)),
    "n1loop": (loop_truncate, ("form", "len")),
    "wplus": (wplus, ("len",)),
    "m2": (m2, ("len",)),
    "m0_w1": (m0_w1, ("len",)),
    "n1_w1": (n1_w1, ("len",)),
    "n2_w1": (n2_w1, ("len",)),
}


def catalog(name: str, length: int | None = None, S=None, form: str | None = None,
            field: str = FIELD_Q) -> GradedLieAlgebra:
    """Build a catalog algebra by family name.

    Accepted names: m0, m0S, m1, m03, n1 (alias n1_table), n2, n23 (alias
    n2_3), n1plus, n1minus, n1loop, wplus, m2 and the width-one variants
    m0_w1, n1_w1, n2_w1.
    """
    key = name.lower()
    if key not in _FAMILIES:
        raise CatalogError(f"unknown catalog family {name!r}")
    if key == "n1loop":
        if form is None:
            raise CatalogError("n1loop needs form=plus|minus")
        return loop_truncate(form, _need_len(name, length), field)
    if form is not None:
        raise CatalogError(f"family {name!r} does not take a form parameter")
    if key == "m0s":
        if S is None:
            raise CatalogError("m0S needs S=[...]")
        return m0S(_need_len(name, length), S, field)
    if key == "m03":
        return m03(_need_len(name, length), S or (), field)
    if S is not None:
        raise CatalogError(f"family {name!r} does not take an S parameter")
    func = _FAMILIES[key][0]
    return func(_need_len(name, length), field)


def _need_len(name, length):
    if length is None:
        raise CatalogError(f"family {name!r} needs len=<int>")
    return int(length)
