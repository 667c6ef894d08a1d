"""Graded 2-cochains and the cocycle / coboundary / cohomology slices.

A grading-k 2-cochain is a skew bilinear scalar form supported on basis
pairs of total grading k.  Cochain coordinates are always taken in the
lexicographic pair order of :func:`pair_basis`, so kernel bases and chosen
cohomology representatives are canonical.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import GradedLieAlgebra, StructureError, canonical_json
from .linalg import Matrix, Subspace, kernel_basis, rref, solve
from .scalars import as_scalar, format_scalar, is_zero, parse_scalar


class Cochain2:
    """A graded skew 2-cochain with scalar values.

    Stored sparsely on ordered pairs ((i,a),(j,b)) with (i,a) < (j,b) and
    i + j equal to the grading.
    """

    __slots__ = ("algebra", "grading", "coeffs")

    def __init__(self, algebra: GradedLieAlgebra, grading: int, coeffs: dict):
        clean = {}
        for (k1, k2), v in coeffs.items():
            if k1 >= k2:
                raise StructureError("cochain keys must satisfy (i,a) < (j,b)")
            if k1[0] + k2[0] != grading:
                raise StructureError(
                    f"cochain pair {(k1, k2)} has grading {k1[0] + k2[0]}, "
                    f"expected {grading}"
                )
            v = as_scalar(v, algebra.field)
            if not is_zero(v):
                clean[(k1, k2)] = v
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "grading", grading)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Cochain2 is immutable")

    def value(self, k1, k2):
        """Evaluation on a basis pair, with antisymmetry."""
        if k1 == k2:
            return as_scalar(0, self.algebra.field)
        if k1 < k2:
            return self.coeffs.get((k1, k2), as_scalar(0, self.algebra.field))
        return -self.coeffs.get((k2, k1), as_scalar(0, self.algebra.field))

    def evaluate(self, x, y):
        """Bilinear antisymmetric evaluation on two elements."""
        acc = as_scalar(0, self.algebra.field)
        for k1, c1 in x.coeffs.items():
            for k2, c2 in y.coeffs.items():
                acc = acc + c1 * c2 * self.value(k1, k2)
        return acc

    def vector(self, pairs=None):
        """Coordinates in the canonical pair order."""
        if pairs is None:
            pairs = pair_basis(self.algebra, self.grading)
        return tuple(self.coeffs.get(p, as_scalar(0, self.algebra.field)) for p in pairs)

    def is_cocycle(self) -> bool:
        return not cocycle_residuals(self)

    def __eq__(self, other):
        return (
            isinstance(other, Cochain2)
            and other.algebra is self.algebra
            and other.grading == self.grading
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        g = self.algebra
        terms = [
            f"{format_scalar(v, g.field)}*({g.label(*k1)}^{g.label(*k2)})"
            for (k1, k2), v in sorted(self.coeffs.items())
        ]
        return f"Cochain2(k={self.grading}: " + (" + ".join(terms) or "0") + ")"

    # serialization --------------------------------------------------------
    def to_json_dict(self) -> dict:
        terms = []
        for ((i, a), (j, b)), v in sorted(self.coeffs.items()):
            terms.append(
                {"i": i, "a": a, "j": j, "b": b,
                 "coef": format_scalar(v, self.algebra.field)}
            )
        return {"grading": self.grading, "terms": terms}

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, algebra: GradedLieAlgebra, data: dict) -> "Cochain2":
        try:
            grading = int(data["grading"])
            coeffs = {}
            for t in data.get("terms", []):
                key = ((t["i"], t["a"]), (t["j"], t["b"]))
                coeffs[key] = parse_scalar(t["coef"], algebra.field)
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed cochain JSON: {exc}") from exc
        return cls(algebra, grading, coeffs)


def pair_basis(g: GradedLieAlgebra, k: int):
    """Ordered basis pairs of total grading k (lexicographic)."""
    keys = list(g.basis_keys())
    pairs = []
    for p, k1 in enumerate(keys):
        for k2 in keys[p + 1:]:
            if k1[0] + k2[0] == k:
                pairs.append((k1, k2))
    return pairs


def cochain_from_vector(g: GradedLieAlgebra, k: int, vec, pairs=None) -> Cochain2:
    if pairs is None:
        pairs = pair_basis(g, k)
    return Cochain2(g, k, dict(zip(pairs, vec)))


def cocycle_residuals(c: Cochain2):
    """Nonzero Jacobi-type residuals of a cochain over basis triples."""
    g = c.algebra
    out = []
    keys = list(g.basis_keys())
    n = len(keys)
    for p in range(n):
        for q in range(p + 1, n):
            for r in range(q + 1, n):
                t = (keys[p], keys[q], keys[r])
                if t[0][0] + t[1][0] + t[2][0] != c.grading:
                    continue
                res = _triple_residual(c, *t)
                if not is_zero(res):
                    out.append((t, res))
    return out


def _triple_residual(c: Cochain2, k1, k2, k3):
    g = c.algebra
    x, y, z = (g.basis_element(k) for k in (k1, k2, k3))
    acc = c.evaluate(g.bracket(x, y), z)
    acc = acc + c.evaluate(g.bracket(y, z), x)
    acc = acc + c.evaluate(g.bracket(z, x), y)
    return acc


def _cocycle_condition_matrix(g: GradedLieAlgebra, k: int, pairs):
    """Rows: one Jacobi-type condition per basis triple of total grading k;
    columns: cochain coordinates in canonical pair order."""
    keys = list(g.basis_keys())
    n = len(keys)
    pair_index = {p: idx for idx, p in enumerate(pairs)}
    rows = []
    for p in range(n):
        if keys[p][0] * 3 > k:
            break
        for q in range(p + 1, n):
            if keys[p][0] + keys[q][0] * 2 > k:
                break
            for r in range(q + 1, n):
                ka, kb, kc = keys[p], keys[q], keys[r]
                if ka[0] + kb[0] + kc[0] != k:
                    continue
                row = [Fraction(0)] * len(pairs)
                for (u, v, w) in ((ka, kb, kc), (kb, kc, ka), (kc, ka, kb)):
                    vec = g.basis_bracket(u, v)
                    if vec is None:
                        continue
                    comp = u[0] + v[0]
                    for b, coef in enumerate(vec):
                        if is_zero(coef):
                            continue
                        key = (comp, b)
                        if key == w:
                            continue
                        if key < w:
                            idx = pair_index.get((key, w))
                            sgn = 1
                        else:
                            idx = pair_index.get((w, key))
                            sgn = -1
                        if idx is not None:
                            row[idx] = row[idx] + sgn * coef
                if any(not is_zero(x) for x in row):
                    rows.append(row)
    return rows


def z2_basis(g: GradedLieAlgebra, k: int):
    """Canonical basis of the grading-k cocycles (RREF of the kernel)."""
    if k < 2:
        raise StructureError("cocycle grading must be at least 2")
    pairs = pair_basis(g, k)
    if not pairs:
        return []
    rows = _cocycle_condition_matrix(g, k, pairs)
    if not rows:
        space = Subspace.full(len(pairs))
    else:
        space = kernel_basis(Matrix.from_rows(rows))
    return [cochain_from_vector(g, k, v, pairs) for v in space.vectors()]


def b2_basis(g: GradedLieAlgebra, k: int):
    """Canonical basis of the grading-k coboundaries db(x,y) = b([x,y]).

    Functionals live on the grading-k component only; when k exceeds the
    length there is no such component and the space is zero (the
    top-extension case).
    """
    if k < 2:
        raise StructureError("coboundary grading must be at least 2")
    pairs = pair_basis(g, k)
    if not pairs or k > g.length:
        return []
    dim_k = g.component_dim(k)
    rows = []
    for b in range(dim_k):
        row = []
        for (k1, k2) in pairs:
            vec = g.basis_bracket(k1, k2)
            row.append(vec[b] if vec is not None else Fraction(0))
        rows.append(row)
    r = rref(Matrix.from_rows(rows))
    return [
        cochain_from_vector(g, k, r.matrix.entries[i], pairs)
        for i in range(r.rank)
    ]


class CohomologySlice:
    """Z2/B2/H2 data of one grading: bases and chosen representatives."""

    __slots__ = ("algebra", "grading", "z_basis", "b_basis", "h_reps", "pairs")

    def __init__(self, algebra, grading, z_basis, b_basis, h_reps, pairs):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "grading", grading)
        object.__setattr__(self, "z_basis", tuple(z_basis))
        object.__setattr__(self, "b_basis", tuple(b_basis))
        object.__setattr__(self, "h_reps", tuple(h_reps))
        object.__setattr__(self, "pairs", tuple(pairs))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("CohomologySlice is immutable")

    @property
    def dim_z(self):
        return len(self.z_basis)

    @property
    def dim_b(self):
        return len(self.b_basis)

    @property
    def dim_h(self):
        return len(self.h_reps)

    def reduce_mod_b(self, c: Cochain2):
        """Coordinates of the class of ``c`` on the chosen representatives.

        Solves c = sum x_r rep_r + sum y_s db_s exactly; raises if ``c`` is
        not a cocycle of this grading.
        """
        if c.grading != self.grading:
            raise StructureError("cochain grading does not match the slice")
        cols = [r.vector(self.pairs) for r in self.h_reps] + [
            b.vector(self.pairs) for b in self.b_basis
        ]
        if not cols:
            if any(not is_zero(x) for x in c.vector(self.pairs)):
                raise StructureError("nonzero cochain in a zero slice")
            return tuple()
        mat = Matrix.from_rows([list(col) for col in cols]).transpose()
        sol = solve(mat, list(c.vector(self.pairs)))
        if sol is None:
            raise StructureError("cochain is not a cocycle of this grading")
        return tuple(sol[: len(self.h_reps)])

    def __repr__(self):
        return (
            f"CohomologySlice(k={self.grading}, dims Z/B/H = "
            f"{self.dim_z}/{self.dim_b}/{self.dim_h})"
        )


def h2_slice(g: GradedLieAlgebra, k: int) -> CohomologySlice:
    """Cocycles, coboundaries and canonical H2 representatives at grading k.

    Representatives are the RREF rows of Z2 whose pivot is not a pivot of
    B2; with the shared deterministic pair order this is the canonical
    complement of B2 inside Z2.
    """
    pairs = pair_basis(g, k)
    zs = z2_basis(g, k)
    bs = b2_basis(g, k)
    b_pivots = set()
    for c in bs:
        vec = c.vector(pairs)
        for idx, x in enumerate(vec):
            if not is_zero(x):
                b_pivots.add(idx)
                break
    reps = []
    for c in zs:
        vec = c.vector(pairs)
        piv = None
        for idx, x in enumerate(vec):
            if not is_zero(x):
                piv = idx
                break
        if piv is not None and piv not in b_pivots:
            reps.append(c)
    return CohomologySlice(g, k, zs, bs, reps, pairs)


def restrict_to_top(c: Cochain2) -> Matrix:
    """Matrix of the cochain on g_1 x g_length (rows: g_1, cols: g_length).

    Only defined for grading length+1 cochains, the Carnot-extension case.
    """
    g = c.algebra
    if c.grading != g.length + 1:
        raise StructureError(
            f"restriction to the top needs grading {g.length + 1}, "
            f"got {c.grading}"
        )
    q = g.component_dim(1)
    d = g.component_dim(g.length)
    return Matrix(
        q, d,
        [[c.value((1, a), (g.length, b)) for b in range(d)] for a in range(q)],
    )
