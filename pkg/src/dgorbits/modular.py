"""Character-basis modular data of the double of a finite group.

Simple-module labels are pairs (c, alpha): a conjugacy class and a character
of the centralizer of its chosen representative.  The T matrix is diagonal
with the twist phases alpha(g_c)/alpha(e); the S matrix is the centralizer
double sum over compatible conjugators.  The gamma basis of the identity
fiber of diconjugacy classes carries the same action by permutation matrices,
and the character expansion chi_(c,alpha) = sum alpha(x_d) gamma_d
intertwines the two exactly, which is the main structural check here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Optional, Sequence

import numpy as np

from dgorbits.characters import CharacterTable, centralizer_character_table, load_builtin_table
from dgorbits.cyclotomic import Cyclotomic
from dgorbits.errors import GroupError, VerificationError
from dgorbits.groups import FiniteGroup
from dgorbits.mcg import ActionCache, Generator
from dgorbits.tuples import ClassTable, enumerate_classes

BUILTIN_TABLE_KEYS = {"S3": "s3", "D4": "d4", "Q8": "q8", "D5": "d5", "A5": "a5"}


@dataclass(frozen=True)
class SimpleLabel:
    class_id: int
    char_index: int


class ModularData:
    """Labels, twists and exact modular matrices for one group."""

    def __init__(self, group: FiniteGroup, whole_group_table: Optional[CharacterTable] = None):
        if whole_group_table is None and not group.is_abelian:
            key = BUILTIN_TABLE_KEYS.get(group.name)
            if key is not None:
                whole_group_table = load_builtin_table(group, key)
        self.group = group
        self.tables: dict[int, CharacterTable] = {}
        for c in group.conjugacy_classes:
            self.tables[c.id] = centralizer_character_table(group, c.id, whole_group_table)
        self.labels: list[SimpleLabel] = [
            SimpleLabel(c.id, row)
            for c in group.conjugacy_classes
            for row in range(self.tables[c.id].n_classes)
        ]
        self.conductor = math.lcm(group.exponent, *[t.conductor for t in self.tables.values()])

    # -- label data -----------------------------------------------------------

    def label_index(self, label: SimpleLabel) -> int:
        return self.labels.index(label)

    def alpha(self, label: SimpleLabel, element: int) -> Cyclotomic:
        return self.tables[label.class_id].value(label.char_index, element)

    def quantum_dimension(self, label: SimpleLabel) -> int:
        cls = self.group.conjugacy_classes[label.class_id]
        return cls.size * self.tables[label.class_id].degree(label.char_index)

    def twist(self, label: SimpleLabel) -> Cyclotomic:
        cls = self.group.conjugacy_classes[label.class_id]
        table = self.tables[label.class_id]
        num = table.value(label.char_index, cls.representative)
        den = Fraction(table.degree(label.char_index))
        return num * Fraction(1, 1) / Cyclotomic.from_rational(den)

    def dual_label(self, label: SimpleLabel) -> SimpleLabel:
        """(c, alpha) -> (cbar, conj(alpha) twisted by iota_c)."""
        G = self.group
        cls = G.conjugacy_classes[label.class_id]
        cbar = G.conjugacy_classes[cls.inverse_class]
        target = self.tables[cbar.id]
        iota = cls.iota
        values = []
        for class_members in target.classes:
            g = class_members[0]
            # alpha^iota(x) = alpha(iota^-1 x iota); dual character conjugates
            values.append(self.alpha(label, G.conj(g, iota)).conjugate())
        return SimpleLabel(cbar.id, target.row_index_of(values))

    def pairing_partner(self, label: SimpleLabel) -> SimpleLabel:
        """The label the Hopf pairing couples to (c, alpha): (cbar, alpha^iota).

        This differs from the dual label by a character conjugation, which is
        why the pairing does not in general pair dual simple characters.
        """
        G = self.group
        cls = G.conjugacy_classes[label.class_id]
        cbar = G.conjugacy_classes[cls.inverse_class]
        target = self.tables[cbar.id]
        iota = cls.iota
        values = []
        for class_members in target.classes:
            g = class_members[0]
            values.append(self.alpha(label, G.conj(g, iota)))
        return SimpleLabel(cbar.id, target.row_index_of(values))

    # -- matrices -----------------------------------------------------------------

    def t_matrix(self) -> list[list[Cyclotomic]]:
        n = len(self.labels)
        zero = Cyclotomic.zero()
        out = [[zero for _ in range(n)] for _ in range(n)]
        for i, lab in enumerate(self.labels):
            out[i][i] = self.twist(lab)
        return out

    def s_matrix(self) -> list[list[Cyclotomic]]:
        G = self.group
        n = len(self.labels)
        out: list[list[Cyclotomic]] = []
        cent_members = {
            c.id: set(G.centralizer(c.representative).members) for c in G.conjugacy_classes
        }
        # Entry = 1/(|Z_1||Z_2|) sum over k with ^k(g_2) in Z_1 and g_1^k in
        # Z_2 of alpha(^k(g_2^-1)) alpha'((g_1^-1)^k).  Shifting k by the
        # inverse-choice element iota_2 on the right re-indexes the same sum,
        # so the matrix does not depend on that choice; this version is the
        # one that the gamma-basis permutation action conjugates into.
        for lab1 in self.labels:
            c1 = G.conjugacy_classes[lab1.class_id]
            g1 = c1.representative
            z1 = cent_members[c1.id]
            row = []
            for lab2 in self.labels:
                c2 = G.conjugacy_classes[lab2.class_id]
                g2 = c2.representative
                z2 = cent_members[c2.id]
                acc = Cyclotomic.zero(self.conductor)
                for k in range(G.order):
                    if G.lconj(k, g2) not in z1 or G.conj(g1, k) not in z2:
                        continue
                    arg1 = G.lconj(k, G.i(g2))
                    arg2 = G.conj(G.i(g1), k)
                    acc = acc + self.alpha(lab1, arg1) * self.alpha(lab2, arg2)
                scale = Fraction(1, len(z1) * len(z2))
                row.append(acc * scale)
            out.append(row)
        return out

    # -- gamma-basis bridge -----------------------------------------------------------

    def character_expansion(self, label: SimpleLabel, table_n1: ClassTable) -> dict[int, Cyclotomic]:
        """Coefficients over the identity-fiber gamma basis."""
        G = self.group
        cls = G.conjugacy_classes[label.class_id]
        gc = cls.representative
        out: dict[int, Cyclotomic] = {}
        for idx in table_n1.fiber_classes(G.class_of[0]):
            ((g, x),) = table_n1.representative(int(idx))
            if int(G.class_of[g]) != cls.id:
                continue
            # find a member with first entry exactly g_c
            x_d = None
            for z in range(G.order):
                if G.conj(g, z) == gc:
                    x_d = G.conj(x, z)
                    break
            if x_d is None:
                raise VerificationError("class member with canonical first entry not found")
            out[int(idx)] = self.alpha(label, x_d)
        return out


# ---------------------------------------------------------------------------
# structural checks


def _mat_mul(a, b):
    n = len(a)
    zero = Cyclotomic.zero()
    out = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for k in range(n):
            if not a[i][k].is_zero():
                aik = a[i][k]
                for j in range(n):
                    if not b[k][j].is_zero():
                        out[i][j] = out[i][j] + aik * b[k][j]
    return out


def _mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def _identity(n):
    one = Cyclotomic.from_rational(1)
    zero = Cyclotomic.zero()
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def verify_modular_relations(md: ModularData) -> dict[str, bool]:
    """(ST)^3 = S^2, S^4 = 1, [S^2, T] = 1 as exact matrix identities."""
    s = md.s_matrix()
    t = md.t_matrix()
    s2 = _mat_mul(s, s)
    s4 = _mat_mul(s2, s2)
    st = _mat_mul(s, t)
    st3 = _mat_mul(_mat_mul(st, st), st)
    return {
        "ST3_eq_S2": _mat_eq(st3, s2),
        "S4_eq_id": _mat_eq(s4, _identity(len(md.labels))),
        "S2_T_commute": _mat_eq(_mat_mul(s2, t), _mat_mul(t, s2)),
        "T_diagonal_roots": all(
            (md.twist(lab) * md.twist(lab).conjugate()) == 1 for lab in md.labels
        ),
        "sum_d_squared": sum(md.quantum_dimension(l) ** 2 for l in md.labels)
        == md.group.order**2,
    }


def gamma_permutation_matrices(table_n1: ClassTable) -> tuple[list[int], np.ndarray, np.ndarray]:
    """Identity-fiber class list plus the T and S images as local index maps."""
    G = table_n1.group
    cache = ActionCache(table_n1)
    fiber = [int(v) for v in table_n1.fiber_classes(int(G.class_of[0]))]
    local = {c: i for i, c in enumerate(fiber)}
    t_img = cache.perm(Generator("T", 1)).image
    s_img = cache.perm(Generator("S", 1)).image
    t_loc = np.array([local[int(t_img[c])] for c in fiber], dtype=np.int64)
    s_loc = np.array([local[int(s_img[c])] for c in fiber], dtype=np.int64)
    return fiber, t_loc, s_loc


def verify_character_bridge(md: ModularData, table_n1: Optional[ClassTable] = None) -> bool:
    """X P_T = T X and X P_S = S X for the expansion matrix X, plus X invertible."""
    G = md.group
    if table_n1 is None:
        table_n1 = enumerate_classes(G, 1)
    fiber, t_loc, s_loc = gamma_permutation_matrices(table_n1)
    local = {c: i for i, c in enumerate(fiber)}
    n = len(md.labels)
    if n != len(fiber):
        raise VerificationError("label count differs from the identity fiber size")
    zero = Cyclotomic.zero()
    X = [[zero for _ in range(n)] for _ in range(n)]
    for i, lab in enumerate(md.labels):
        for cls_idx, coeff in md.character_expansion(lab, table_n1).items():
            X[i][local[cls_idx]] = coeff
    t_char = md.t_matrix()
    s_char = md.s_matrix()

    def apply_perm_right(mat, perm):
        # (M P)[i, perm[d]] = M[i, d]
        out = [[zero for _ in range(n)] for _ in range(n)]
        for i in range(n):
            for d in range(n):
                out[i][int(perm[d])] = mat[i][d]
        return out

    ok_t = _mat_eq(apply_perm_right(X, t_loc), _mat_mul(t_char, X))
    ok_s = _mat_eq(apply_perm_right(X, s_loc), _mat_mul(s_char, X))
    return ok_t and ok_s and _invertible(X)


def _invertible(mat) -> bool:
    n = len(mat)
    m = [row[:] for row in mat]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not m[r][col].is_zero()), None)
        if pivot is None:
            return False
        m[col], m[pivot] = m[pivot], m[col]
        inv = m[col][col].inverse()
        m[col] = [v * inv for v in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return True


def hopf_pairing_on_characters(md: ModularData, table_n1: Optional[ClassTable] = None) -> bool:
    """omega(chi ox chi') = |G| [c' = cbar][alpha' = alpha], via the gamma
    expansion and the pairing's values on gamma_d."""
    G = md.group
    if table_n1 is None:
        table_n1 = enumerate_classes(G, 1)
    fiber = [int(v) for v in table_n1.fiber_classes(int(G.class_of[0]))]
    # gamma pairing: omega(gamma_d ox gamma_d') = |d| [d' = dbar]
    inv_class: dict[int, int] = {}
    for idx in fiber:
        ((g, x),) = table_n1.representative(idx)
        inv_class[idx] = table_n1.class_index(((G.i(g), G.i(x)),))
    expansions = {i: md.character_expansion(lab, table_n1) for i, lab in enumerate(md.labels)}
    for i, lab1 in enumerate(md.labels):
        for j, lab2 in enumerate(md.labels):
            acc = Cyclotomic.zero(md.conductor)
            for d, cd in expansions[i].items():
                dbar = inv_class[d]
                if dbar in expansions[j]:
                    size = int(table_n1.sizes[d])
                    acc = acc + cd * expansions[j][dbar] * Fraction(size)
            partner = md.pairing_partner(lab1)
            want_nonzero = lab2 == partner
            want = Fraction(G.order if want_nonzero else 0)
            if not acc.is_rational() or acc.rational_value() != want:
                return False
    return True


def pairing_on_gamma(table_n1: ClassTable, d1: int, d2: int) -> Fraction:
    """omega(gamma_d1 ox gamma_d2): |d1| when d2 is the inverse-pair class."""
    G = table_n1.group
    ((g, x),) = table_n1.representative(d1)
    dbar = table_n1.class_index(((G.i(g), G.i(x)),))
    return Fraction(int(table_n1.sizes[d1]) if d2 == dbar else 0)


# ---------------------------------------------------------------------------
# side-by-side comparison of two modular data sets


def compare_modular_data(md1: ModularData, md2: ModularData) -> dict:
    """Are the S matrices equal up to a simultaneous label permutation within
    blocks of fixed (class size, character degree)?

    Refines blocks by the twist value first; if the twist multisets already
    differ the answer is 'different' with that certificate, otherwise a
    backtracking search over block-preserving bijections decides.
    """
    def invariants(md):
        out = []
        for lab in md.labels:
            c = md.group.conjugacy_classes[lab.class_id]
            deg = md.tables[lab.class_id].degree(lab.char_index)
            out.append((c.size, deg))
        return out

    inv1, inv2 = invariants(md1), invariants(md2)
    if sorted(inv1) != sorted(inv2):
        return {"equal": False, "certificate": "block invariants (|c|, degree) differ"}
    tw1 = sorted(zip(inv1, [repr(md1.twist(l).reduced()) for l in md1.labels]))
    tw2 = sorted(zip(inv2, [repr(md2.twist(l).reduced()) for l in md2.labels]))
    if tw1 != tw2:
        return {"equal": False, "certificate": "twist multisets differ within (|c|, degree) blocks"}
    s1, s2 = md1.s_matrix(), md2.s_matrix()
    n = len(md1.labels)
    blocks: dict[tuple, tuple[list[int], list[int]]] = {}
    for i, key in enumerate(inv1):
        blocks.setdefault(key, ([], []))[0].append(i)
    for j, key in enumerate(inv2):
        blocks.setdefault(key, ([], []))[1].append(j)

    keys = sorted(blocks)
    assign: dict[int, int] = {}

    def backtrack(k: int) -> bool:
        if k == len(keys):
            return True
        src, dst = blocks[keys[k]]
        for perm in permutations(dst):
            trial = dict(assign)
            trial.update(zip(src, perm))
            ok = True
            for i in src:
                for i2 in trial:
                    if not s1[i][i2] == s2[trial[i]][trial[i2]]:
                        ok = False
                        break
                    if not s1[i2][i] == s2[trial[i2]][trial[i]]:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                assign.update(zip(src, perm))
                if backtrack(k + 1):
                    return True
                for i in src:
                    assign.pop(i, None)
        return False

    equal = backtrack(0)
    return {"equal": equal, "certificate": None if equal else "no block permutation matches S"}
