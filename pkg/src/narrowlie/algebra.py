"""Positively graded Lie algebras with exact sparse structure constants.

The central data model: a finite list of homogeneous components (grading
indices are 1-based) with labelled bases, and a sparse bracket table keyed
by ordered basis pairs.  Antisymmetry is a storage convention: only keys
((i,a),(j,b)) with (i,a) < (j,b) lexicographically are stored, and a
bracket landing beyond the top grading is zero.

Everything is immutable after construction and safe to share.
"""

from __future__ import annotations

import json
from fractions import Fraction

from . import scalars
from .linalg import Matrix, Subspace, rref, solve
from .scalars import FieldError, as_scalar, format_scalar, is_zero, parse_scalar


class StructureError(ValueError):
    """Invalid grading, bracket key layout or scalar data."""


class JacobiError(ValueError):
    """Construction-time Jacobi validation failed."""


class JacobiViolation:
    """One failing basis triple with its residual element coordinates."""

    __slots__ = ("triple", "residual")

    def __init__(self, triple, residual):
        object.__setattr__(self, "triple", triple)
        object.__setattr__(self, "residual", residual)

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("JacobiViolation is immutable")

    def __repr__(self):
        return f"JacobiViolation(triple={self.triple}, residual={self.residual})"


class GradedLieAlgebra:
    __slots__ = ("field", "components", "brackets", "name", "provenance", "_offsets")

    def __init__(
        self,
        field: str,
        components,
        brackets,
        name: str | None = None,
        provenance: dict | None = None,
        check_jacobi: bool = True,
    ):
        if field not in scalars.FIELDS:
            raise FieldError(f"unknown field tag {field!r}")
        comps = tuple(tuple(str(l) for l in labels) for labels in components)
        seen = set()
        for labels in comps:
            for l in labels:
                if l in seen:
                    raise StructureError(f"duplicate basis label {l!r}")
                seen.add(l)
        length = len(comps)
        table = {}
        for key, out in brackets.items():
            (i, a), (j, b) = key
            if not (1 <= i <= length and 1 <= j <= length):
                raise StructureError(f"bracket key {key} outside grading range")
            if not (0 <= a < len(comps[i - 1]) and 0 <= b < len(comps[j - 1])):
                raise StructureError(f"bracket key {key} has bad basis index")
            if (i, a) >= (j, b):
                raise StructureError(
                    f"bracket key {key} violates the (i,a) < (j,b) storage order"
                )
            if i + j > length:
                raise StructureError(
                    f"bracket key {key} lands beyond grading {length}; "
                    "such brackets are implicitly zero and must not be stored"
                )
            target_dim = len(comps[i + j - 1])
            vec = tuple(as_scalar(x, field) for x in out)
            if len(vec) != target_dim:
                raise StructureError(
                    f"bracket {key} output has length {len(vec)}, "
                    f"component {i + j} has dimension {target_dim}"
                )
            if all(is_zero(x) for x in vec):
                continue  # zero brackets are never materialised
            table[((i, a), (j, b))] = vec
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "brackets", table)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "provenance", dict(provenance or {}))
        offsets = []
        acc = 0
        for labels in comps:
            offsets.append(acc)
            acc += len(labels)
        object.__setattr__(self, "_offsets", tuple(offsets))
        if check_jacobi:
            violations = self.jacobi_check()
            if violations:
                v = violations[0]
                raise JacobiError(
                    f"Jacobi identity fails at basis triple {v.triple} "
                    f"(and {len(violations) - 1} more)"
                )

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("GradedLieAlgebra is immutable")

    # shape ------------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return sum(len(c) for c in self.components)

    def component_dim(self, i: int) -> int:
        return len(self.components[i - 1])

    def component_dims(self) -> tuple:
        return tuple(len(c) for c in self.components)

    def label(self, i: int, a: int) -> str:
        return self.components[i - 1][a]

    def basis_keys(self):
        for i, labels in enumerate(self.components, start=1):
            for a in range(len(labels)):
                yield (i, a)

    def flat_index(self, key) -> int:
        i, a = key
        return self._offsets[i - 1] + a

    def key_of_flat(self, idx: int):
        for i, off in enumerate(self._offsets, start=1):
            if off <= idx < off + len(self.components[i - 1]):
                return (i, idx - off)
        raise IndexError(idx)

    def key_of_label(self, label: str):
        for key in self.basis_keys():
            if self.label(*key) == label:
                return key
        raise KeyError(label)

    # brackets ----------------------------------------------------------
    def basis_bracket(self, key1, key2):
        """[e_key1, e_key2] as a coefficient tuple in component i+j, or None.

        None means the zero bracket (including gradings beyond the length).
        """
        if key1 == key2:
            return None
        (i, _), (j, _) = key1, key2
        if i + j > self.length:
            return None
        if key1 < key2:
            return self.brackets.get((key1, key2))
        vec = self.brackets.get((key2, key1))
        if vec is None:
            return None
        return tuple(-x for x in vec)

    def zero_element(self) -> "Element":
        return Element(self, {})

    def basis_element(self, key) -> "Element":
        if isinstance(key, str):
            key = self.key_of_label(key)
        return Element(self, {key: as_scalar(1, self.field)})

    def element_from_flat(self, vec) -> "Element":
        coeffs = {}
        for idx, x in enumerate(vec):
            if not is_zero(x):
                coeffs[self.key_of_flat(idx)] = as_scalar(x, self.field)
        return Element(self, coeffs)

    def bracket(self, x: "Element", y: "Element") -> "Element":
        if x.algebra is not self or y.algebra is not self:
            raise FieldError("bracket of elements from different algebras")
        out: dict = {}
        for k1, c1 in x.coeffs.items():
            for k2, c2 in y.coeffs.items():
                vec = self.basis_bracket(k1, k2)
                if vec is None:
                    continue
                i = k1[0] + k2[0]
                factor = c1 * c2
                for b, v in enumerate(vec):
                    if is_zero(v):
                        continue
                    key = (i, b)
                    out[key] = out.get(key, as_scalar(0, self.field)) + factor * v
        return Element(self, {k: v for k, v in out.items() if not is_zero(v)})

    # validation ----------------------------------------------------------
    def jacobi_check(self):
        """Exhaustively check all basis triples; returns violations (possibly empty).

        Only triples whose total grading is at most the length can have a
        nonzero residual, so the scan is cut off there.
        """
        violations = []
        keys = list(self.basis_keys())
        n = len(keys)
        for p in range(n):
            kp = keys[p]
            for q in range(p + 1, n):
                kq = keys[q]
                for r in range(q + 1, n):
                    kr = keys[r]
                    if kp[0] + kq[0] + kr[0] > self.length:
                        continue
                    res = self._jacobi_residual(kp, kq, kr)
                    if res:
                        violations.append(JacobiViolation((kp, kq, kr), res))
        return violations

    def _jacobi_residual(self, k1, k2, k3):
        x, y, z = (self.basis_element(k) for k in (k1, k2, k3))
        acc = self.bracket(self.bracket(x, y), z)
        acc = acc + self.bracket(self.bracket(y, z), x)
        acc = acc + self.bracket(self.bracket(z, x), y)
        return dict(acc.coeffs)

    # lower central series ------------------------------------------------
    def lcs(self):
        """Lower central series g^1 >= g^2 >= ... as global Subspaces.

        The returned list starts with the whole space and ends with the zero
        subspace (positively graded algebras are nilpotent).
        """
        n = self.dim
        all_basis = [self.basis_element(k) for k in self.basis_keys()]
        series = [Subspace.full(n)]
        current = series[0]
        while current.dim > 0:
            vecs = []
            for x in all_basis:
                for row in current.vectors():
                    y = self.element_from_flat(row)
                    vecs.append(self.bracket(x, y).flat())
            nxt = Subspace.from_vectors(n, vecs)
            if nxt.dim == current.dim:
                raise StructureError("lower central series does not terminate")
            series.append(nxt)
            current = nxt
        return series

    def is_carnot(self):
        """Whether [g_1, g_i] = g_{i+1} for all i; returns (ok, length).

        The length is the index of the last nonzero component.
        """
        top = 0
        for i in range(self.length, 0, -1):
            if self.component_dim(i) > 0:
                top = i
                break
        if top == 0:
            return False, 0
        if any(self.component_dim(i) == 0 for i in range(1, top + 1)):
            return False, top
        q = self.component_dim(1)
        for i in range(1, top):
            target = self.component_dim(i + 1)
            rows = []
            for a in range(q):
                for b in range(self.component_dim(i)):
                    vec = self.basis_bracket((1, a), (i, b))
                    if vec is None:
                        vec = (as_scalar(0, self.field),) * target
                    rows.append(list(vec))
            if rref(Matrix.from_rows(rows)).rank != target:
                return False, top
        return True, top

    def quotient_by_tail(self, k: int) -> "GradedLieAlgebra":
        """The quotient by components above grading k (Carnot inputs only)."""
        ok, length = self.is_carnot()
        if not ok:
            raise StructureError("quotient_by_tail requires a Carnot algebra")
        if not 1 <= k <= length:
            raise StructureError(f"grading index {k} out of range 1..{length}")
        comps = self.components[:k]
        table = {
            key: out
            for key, out in self.brackets.items()
            if key[0][0] + key[1][0] <= k
        }
        return GradedLieAlgebra(
            self.field,
            comps,
            table,
            name=f"{self.name}/tail>{k}" if self.name else None,
            provenance={"quotient_of": self.name, "kept_up_to": k},
            check_jacobi=False,
        )

    def associated_graded(self) -> "GradedLieAlgebra":
        """The graded algebra on lower-central-series quotients.

        Representatives of g^i / g^{i+1} are the RREF basis rows of g^i whose
        pivot is not a pivot of g^{i+1}; this choice is canonical, and for a
        Carnot algebra it reproduces the original structure constants.
        """
        series = self.lcs()
        n = self.dim
        reps_per_level = []
        for lvl in range(len(series) - 1):
            cur, nxt = series[lvl], series[lvl + 1]
            nxt_pivots = set(_pivot_columns(nxt))
            reps = [
                row
                for row, piv in zip(cur.vectors(), _pivot_columns(cur))
                if piv not in nxt_pivots
            ]
            reps_per_level.append(reps)
        comps = []
        for lvl, reps in enumerate(reps_per_level, start=1):
            labels = []
            for a, rep in enumerate(reps):
                nz = [idx for idx, x in enumerate(rep) if not is_zero(x)]
                if len(nz) == 1 and rep[nz[0]] == 1:
                    labels.append(self.label(*self.key_of_flat(nz[0])))
                else:
                    labels.append(f"w{lvl}.{a}")
            comps.append(tuple(labels))
        depth = len(reps_per_level)
        table = {}
        for i in range(1, depth + 1):
            for j in range(i, depth + 1):
                if i + j > depth:
                    continue
                target_reps = reps_per_level[i + j - 1]
                tail = series[i + j] if i + j < len(series) else Subspace.zero(n)
                basis_cols = [list(r) for r in target_reps] + [
                    list(r) for r in tail.vectors()
                ]
                solve_mat = Matrix.from_rows(basis_cols).transpose()
                for a in range(len(reps_per_level[i - 1])):
                    for b in range(len(reps_per_level[j - 1])):
                        if i == j and b <= a:
                            continue
                        u = self.element_from_flat(reps_per_level[i - 1][a])
                        v = self.element_from_flat(reps_per_level[j - 1][b])
                        w = self.bracket(u, v).flat()
                        coords = solve(solve_mat, list(w))
                        if coords is None:
                            raise StructureError(
                                "bracket left the expected filtration level"
                            )
                        out = tuple(coords[: len(target_reps)])
                        if all(is_zero(x) for x in out):
                            continue
                        table[((i, a), (j, b))] = out
        return GradedLieAlgebra(
            self.field,
            comps,
            table,
            name=f"gr({self.name})" if self.name else None,
            provenance={"associated_graded_of": self.name},
            check_jacobi=False,
        )

    # serialization ---------------------------------------------------------
    def to_json_dict(self) -> dict:
        brackets = []
        for ((i, a), (j, b)), out in sorted(self.brackets.items()):
            brackets.append(
                {
                    "i": i,
                    "a": a,
                    "j": j,
                    "b": b,
                    "out": [format_scalar(x, self.field) for x in out],
                }
            )
        data = {
            "field": self.field,
            "components": [
                {"dim": len(labels), "labels": list(labels)}
                for labels in self.components
            ],
            "brackets": brackets,
        }
        if self.name is not None:
            data["name"] = self.name
        return data

    def to_json(self) -> str:
        return canonical_json(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict, check_jacobi: bool = True):
        try:
            field = data["field"]
            comps = []
            for c in data["components"]:
                labels = tuple(c["labels"])
                if len(labels) != c["dim"]:
                    raise StructureError("component dim does not match labels")
                comps.append(labels)
            table = {}
            for rec in data.get("brackets", []):
                key = ((rec["i"], rec["a"]), (rec["j"], rec["b"]))
                table[key] = tuple(parse_scalar(s, field) for s in rec["out"])
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed algebra JSON: {exc}") from exc
        return cls(
            field,
            comps,
            table,
            name=data.get("name"),
            check_jacobi=check_jacobi,
        )

    @classmethod
    def from_json(cls, text: str, check_jacobi: bool = True):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise StructureError(f"invalid JSON: {exc}") from exc
        return cls.from_json_dict(data, check_jacobi=check_jacobi)

    def to_field(self, field: str) -> "GradedLieAlgebra":
        if field == self.field:
            return self
        table = {k: tuple(as_scalar(x, field) for x in out)
                 for k, out in self.brackets.items()}
        return GradedLieAlgebra(
            field,
            self.components,
            table,
            name=self.name,
            provenance=dict(self.provenance),
            check_jacobi=False,
        )

    def with_name(self, name: str) -> "GradedLieAlgebra":
        return GradedLieAlgebra(
            self.field,
            self.components,
            dict(self.brackets),
            name=name,
            provenance=dict(self.provenance),
            check_jacobi=False,
        )

    def __eq__(self, other):
        return (
            isinstance(other, GradedLieAlgebra)
            and self.field == other.field
            and self.components == other.components
            and self.brackets == other.brackets
            and self.name == other.name
        )

    def __repr__(self):
        nm = self.name or "?"
        return f"GradedLieAlgebra({nm}, field={self.field}, dims={self.component_dims()})"


class Element:
    """A sparse element: algebra reference plus per-basis coefficients."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra: GradedLieAlgebra, coeffs: dict):
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(
            self,
            "coeffs",
            {k: as_scalar(v, algebra.field) for k, v in coeffs.items() if not is_zero(v)},
        )

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("Element is immutable")

    def __add__(self, other: "Element") -> "Element":
        if other.algebra is not self.algebra:
            raise FieldError("elements from different algebras")
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, as_scalar(0, self.algebra.field)) + v
        return Element(self.algebra, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + other.scale(-1)

    def scale(self, s) -> "Element":
        s = as_scalar(s, self.algebra.field)
        return Element(self.algebra, {k: s * v for k, v in self.coeffs.items()})

    def bracket(self, other: "Element") -> "Element":
        return self.algebra.bracket(self, other)

    def flat(self) -> tuple:
        vec = [as_scalar(0, self.algebra.field)] * self.algebra.dim
        for k, v in self.coeffs.items():
            vec[self.algebra.flat_index(k)] = v
        return tuple(vec)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return (
            isinstance(other, Element)
            and other.algebra is self.algebra
            and other.coeffs == self.coeffs
        )

    def __repr__(self):
        if not self.coeffs:
            return "Element(0)"
        parts = [
            f"{format_scalar(v, self.algebra.field)}*{self.algebra.label(*k)}"
            for k, v in sorted(self.coeffs.items())
        ]
        return "Element(" + " + ".join(parts) + ")"


def _pivot_columns(space: Subspace):
    pivots = []
    for row in space.vectors():
        for idx, x in enumerate(row):
            if not is_zero(x):
                pivots.append(idx)
                break
    return pivots


def canonical_json(data) -> str:
    """Deterministic JSON used for round-trip and report byte-stability."""
    return json.dumps(data, sort_keys=True, separators=(",", ":"))
