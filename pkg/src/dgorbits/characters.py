"""Character tables of centralizers: computed for abelian subgroups,
ingested from JSON for non-abelian ones (in practice the whole group, which
is the centralizer of every central element).

A table is realized on a subgroup of a fixed FiniteGroup: members are parent
element indices, classes partition the members under conjugation inside the
subgroup, and each character row holds one Cyclotomic value per class.
Orthogonality is verified on construction and on ingest.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from dgorbits.cyclotomic import Cyclotomic
from dgorbits.errors import GroupError, VerificationError
from dgorbits.groups import FiniteGroup, Subgroup


@dataclass
class CharacterTable:
    group: FiniteGroup                    # ambient group
    members: tuple[int, ...]              # subgroup elements, sorted
    classes: list[tuple[int, ...]]        # partition of members (sorted tuples)
    rows: list[list[Cyclotomic]]          # one row per irreducible character
    conductor: int

    def __post_init__(self):
        self._class_of = {g: i for i, cls in enumerate(self.classes) for g in cls}

    @property
    def order(self) -> int:
        return len(self.members)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def class_of(self, g: int) -> int:
        try:
            return self._class_of[g]
        except KeyError:
            raise GroupError(f"element {g} is not in the subgroup") from None

    def value(self, row: int, g: int) -> Cyclotomic:
        return self.rows[row][self.class_of(g)]

    def degree(self, row: int) -> int:
        v = self.rows[row][self.class_of(0)]
        return int(v.rational_value())

    def verify_orthogonality(self) -> None:
        n = self.order
        sizes = [len(c) for c in self.classes]
        if len(self.rows) != self.n_classes:
            raise VerificationError("character count differs from class count")
        for i, ri in enumerate(self.rows):
            for j, rj in enumerate(self.rows):
                acc = Cyclotomic.zero()
                for k, size in enumerate(sizes):
                    acc = acc + Cyclotomic.from_rational(size) * ri[k] * rj[k].conjugate()
                want = Fraction(n if i == j else 0)
                if not acc.is_rational() or acc.rational_value() != want:
                    raise VerificationError(f"character rows {i},{j} fail orthogonality")
        if sum(self.degree(i) ** 2 for i in range(len(self.rows))) != n:
            raise VerificationError("squared degrees do not sum to the subgroup order")

    def row_index_of(self, values: Sequence[Cyclotomic]) -> int:
        for i, row in enumerate(self.rows):
            if all(a == b for a, b in zip(row, values)):
                return i
        raise VerificationError("no character row matches the requested values")


# ---------------------------------------------------------------------------
# abelian tables


def _cyclic_decomposition(group: FiniteGroup, members: Sequence[int]) -> list[int]:
    """Generators g_1,..,g_k with the subgroup the direct sum of the <g_i>;
    greedy: split off a maximal-order element, then a maximal complement."""
    members = list(members)
    if len(members) == 1:
        return []
    by_order = sorted(members, key=lambda g: (-group.element_order(g), g))
    g = by_order[0]
    cyc = {0}
    cur = g
    while cur != 0:
        cyc.add(cur)
        cur = group.m(cur, g)
    if len(cyc) == len(members):
        return [g]
    comp = {0}
    for h in members:
        if h in comp:
            continue
        trial = set(comp)
        frontier = [h]
        trial.add(h)
        while frontier:
            a = frontier.pop()
            for b in list(trial):
                for c in (group.m(a, b), group.m(b, a)):
                    if c not in trial:
                        trial.add(c)
                        frontier.append(c)
        if len(trial.intersection(cyc)) == 1:
            comp = trial
    if len(comp) * len(cyc) != len(members):
        raise VerificationError("abelian complement construction failed")
    return [g] + _cyclic_decomposition(group, sorted(comp))


def abelian_character_table(group: FiniteGroup, subgroup: Subgroup) -> CharacterTable:
    """All |H| linear characters of an abelian subgroup H."""
    if not subgroup.is_abelian():
        raise GroupError("character table construction needs an abelian subgroup")
    members = list(subgroup.members)
    gens = _cyclic_decomposition(group, members)
    orders = [group.element_order(g) for g in gens]
    conductor = math.lcm(1, *orders)
    # exponent vector of every element in the chosen decomposition
    from itertools import product as iproduct

    exp_of: dict[int, tuple[int, ...]] = {}
    for exps in iproduct(*[range(o) for o in orders]) if gens else [()]:
        el = 0
        for g, e in zip(gens, exps):
            el = group.m(el, group.pow(g, e))
        exp_of[el] = exps
    if len(exp_of) != len(members):
        raise VerificationError("cyclic decomposition does not enumerate the subgroup")
    classes = [(g,) for g in members]
    rows = []
    for chi_exps in iproduct(*[range(o) for o in orders]) if gens else [()]:
        row = []
        for g in members:
            e = exp_of[g]
            k = sum((conductor // o) * ce * ge for o, ce, ge in zip(orders, chi_exps, e))
            row.append(Cyclotomic.root_of_unity(conductor, k % conductor))
        rows.append(row)
    # deterministic row order: by value tuple is awkward; sort by exponent
    # vectors as generated (trivial character first by construction).
    table = CharacterTable(group, tuple(members), classes, rows, conductor)
    table.verify_orthogonality()
    return table


# ---------------------------------------------------------------------------
# ingestion


_WORD_TOKEN = re.compile(r"([A-Za-z][A-Dd-z0-9_]*)(?:\^(-?\d+))?$")


def _resolve_word(group: FiniteGroup, word: str, gen_map: dict[str, int]) -> int:
    word = word.strip()
    if word in ("e", "1", ""):
        return 0
    out = 0
    for token in word.split("*"):
        m = _WORD_TOKEN.match(token.strip())
        if not m:
            raise GroupError(f"cannot parse word token {token!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name not in gen_map:
            raise GroupError(f"unknown generator {name!r} in word {word!r}")
        out = group.m(out, group.pow(gen_map[name], exp))
    return out


def _decode_value(spec: dict, conductor: int) -> Cyclotomic:
    den = int(spec.get("den", 1))
    acc = Cyclotomic.zero(conductor)
    for exp, num in spec.get("coeffs", {}).items():
        term = Cyclotomic.root_of_unity(conductor, int(exp)) * Fraction(int(num), den)
        acc = acc + term
    return acc


def ingest_character_table(group: FiniteGroup, data: dict | str, generator_names: Optional[dict[str, int]] = None) -> CharacterTable:
    """Load a character table of the whole group from the declared format:

    {"group_order": n, "generators": {"x": "...cycle word optional..."},
     "classes": [{"rep_word": "x^2*y", "size": k}, ...],
     "conductor": m,
     "characters": [[{"den": d, "coeffs": {"exp": num}}, ...], ...]}

    Class representatives are resolved as words over the group's declared
    generators (by default the first generators are named x, y, z, ...);
    classes must match the constructed group's classes including sizes, and
    orthogonality is verified.
    """
    if isinstance(data, str):
        with open(data) as fh:
            data = json.load(fh)
    if int(data["group_order"]) != group.order:
        raise GroupError(
            f"table is for a group of order {data['group_order']}, got {group.order}"
        )
    if generator_names is None:
        default_names = ["x", "y", "z", "w"]
        generator_names = {default_names[i]: g for i, g in enumerate(group.generators[:4])}
    conductor = int(data["conductor"])
    class_ids = []
    for cls_spec in data["classes"]:
        rep = _resolve_word(group, cls_spec["rep_word"], generator_names)
        cid = int(group.class_of[rep])
        if group.conjugacy_classes[cid].size != int(cls_spec["size"]):
            raise GroupError(
                f"class of {cls_spec['rep_word']} has size {group.conjugacy_classes[cid].size},"
                f" file says {cls_spec['size']}"
            )
        class_ids.append(cid)
    if sorted(class_ids) != list(range(len(group.conjugacy_classes))):
        raise GroupError("file classes do not biject with the group's classes")
    rows = []
    for char_spec in data["characters"]:
        if len(char_spec) != len(class_ids):
            raise GroupError("character row length differs from the class count")
        row_by_cid = {cid: _decode_value(v, conductor) for cid, v in zip(class_ids, char_spec)}
        rows.append(row_by_cid)
    classes = [tuple(c.members) for c in group.conjugacy_classes]
    table = CharacterTable(
        group,
        tuple(range(group.order)),
        classes,
        [[row[cid] for cid in range(len(classes))] for row in rows],
        conductor,
    )
    table.verify_orthogonality()
    return table


# ---------------------------------------------------------------------------
# builtin table data


def load_builtin_table(group: FiniteGroup, family_key: str) -> CharacterTable:
    from importlib import resources

    path = resources.files("dgorbits.data").joinpath(f"{family_key}_chartable.json")
    with path.open() as fh:
        data = json.load(fh)
    return ingest_character_table(group, data)


def centralizer_character_table(
    group: FiniteGroup,
    class_id: int,
    whole_group_table: Optional[CharacterTable] = None,
) -> CharacterTable:
    """The character table used for the label (c, alpha): the centralizer's.

    Abelian centralizers are computed; the full group's table (needed exactly
    at central classes) must be supplied or ingestible.
    """
    rep = group.conjugacy_classes[class_id].representative
    cent = group.centralizer(rep)
    if cent.is_abelian():
        return abelian_character_table(group, cent)
    if cent.order == group.order:
        if whole_group_table is None:
            raise GroupError(
                f"{group.name}: non-abelian centralizer equals the group; an ingested"
                " character table is required"
            )
        return whole_group_table
    raise GroupError(
        f"{group.name}: class {class_id} has a proper non-abelian centralizer;"
        " supply its character table"
    )
