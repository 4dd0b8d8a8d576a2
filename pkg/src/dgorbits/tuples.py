"""2N-tuples of group elements and their classes under simultaneous conjugation.

A tuple ((g_1|x_1), ..., (g_N|x_N)) is flattened to (g_1, x_1, ..., g_N, x_N)
and encoded as a mixed-radix integer with g_1 the most significant digit, so
that integer comparison of codes is lexicographic comparison of flattened
tuples.  The canonical representative of a class is the minimal code in its
conjugation orbit.

Enumeration is vectorized: the map code -> canonical code is built by one
pass per conjugator, which fits A5 at N=2 (60^4 codes) comfortably.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from dgorbits.errors import ResourceLimitError, VerificationError
from dgorbits.groups import ConjClass, FiniteGroup

DEFAULT_CODE_BUDGET = 20_000_000

Pair = tuple[int, int]
Tuple2N = tuple[Pair, ...]


def flatten(t: Tuple2N) -> tuple[int, ...]:
    return tuple(v for pair in t for v in pair)


def unflatten(flat: Sequence[int]) -> Tuple2N:
    return tuple((int(flat[i]), int(flat[i + 1])) for i in range(0, len(flat), 2))


def multi_commutator(group: FiniteGroup, t: Tuple2N) -> int:
    """Ordered product of the per-pair commutators, left to right."""
    out = 0
    for g, x in t:
        out = group.m(out, group.commutator(g, x))
    return out


def conjugate_tuple(group: FiniteGroup, t: Tuple2N, z: int) -> Tuple2N:
    return tuple((group.conj(g, z), group.conj(x, z)) for g, x in t)


def canonical_form(group: FiniteGroup, t: Tuple2N) -> Tuple2N:
    """Lexicographically minimal simultaneous conjugate (flattened order)."""
    best = flatten(t)
    for z in range(1, group.order):
        cand = flatten(conjugate_tuple(group, t, z))
        if cand < best:
            best = cand
    return unflatten(best)


@dataclass(frozen=True)
class TupleClass:
    canonical: Tuple2N
    size: int
    mu_image: int  # conjugacy class id in the underlying group

    @property
    def genus(self) -> int:
        return len(self.canonical)


class ClassTable:
    """All (or one fiber of) 2N-conjugacy classes of a group.

    Classes are indexed 0.. in increasing order of canonical code.  The table
    keeps a code -> canonical-code array over its enumerated domain so that
    arbitrary tuples can be resolved to class indices in O(log #classes).
    """

    def __init__(
        self,
        group: FiniteGroup,
        genus: int,
        rep_codes: np.ndarray,
        sizes: np.ndarray,
        mu_class: np.ndarray,
        domain_codes: Optional[np.ndarray],
        canon: np.ndarray,
        fiber: Optional[int] = None,
    ):
        self.group = group
        self.genus = genus
        self.rep_codes = rep_codes
        self.sizes = sizes
        self.mu_class = mu_class
        # domain_codes is None for a full table (domain = all codes, canon
        # indexed directly); for a fiber table it is the sorted code subset.
        self.domain_codes = domain_codes
        self.canon = canon
        self.fiber = fiber
        self._fiber_index: Optional[dict[int, np.ndarray]] = None

    # -- basic shape ----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.rep_codes)

    @property
    def n_classes(self) -> int:
        return len(self.rep_codes)

    @property
    def base(self) -> int:
        return self.group.order

    @property
    def width(self) -> int:
        return 2 * self.genus

    # -- code/tuple conversions ------------------------------------------------

    def encode(self, t: Tuple2N) -> int:
        code = 0
        for v in flatten(t):
            code = code * self.base + int(v)
        return code

    def decode(self, code: int) -> Tuple2N:
        flat = []
        for _ in range(self.width):
            flat.append(code % self.base)
            code //= self.base
        return unflatten(flat[::-1])

    def decode_array(self, codes: np.ndarray) -> np.ndarray:
        """(len, 2N) int32 array of digits, most significant first."""
        out = np.empty((len(codes), self.width), dtype=np.int32)
        rest = codes.astype(np.int64)
        for j in range(self.width - 1, -1, -1):
            out[:, j] = rest % self.base
            rest //= self.base
        return out

    def encode_array(self, digits: np.ndarray) -> np.ndarray:
        codes = np.zeros(len(digits), dtype=np.int64)
        for j in range(self.width):
            codes = codes * self.base + digits[:, j].astype(np.int64)
        return codes

    # -- lookups ----------------------------------------------------------------

    def canonical_codes(self, codes: np.ndarray) -> np.ndarray:
        if self.domain_codes is None:
            return self.canon[codes]
        pos = np.searchsorted(self.domain_codes, codes)
        if np.any(pos >= len(self.domain_codes)) or np.any(self.domain_codes[pos] != codes):
            raise VerificationError("code outside the enumerated fiber domain")
        return self.canon[pos]

    def class_indices(self, codes: np.ndarray) -> np.ndarray:
        canon = self.canonical_codes(np.asarray(codes, dtype=np.int64))
        idx = np.searchsorted(self.rep_codes, canon)
        if np.any(idx >= len(self.rep_codes)) or np.any(self.rep_codes[idx] != canon):
            raise VerificationError("canonical code missing from table")
        return idx.astype(np.int64)

    def class_index(self, t: Tuple2N) -> int:
        return int(self.class_indices(np.array([self.encode(t)]))[0])

    def tuple_class(self, index: int) -> TupleClass:
        return TupleClass(
            canonical=self.decode(int(self.rep_codes[index])),
            size=int(self.sizes[index]),
            mu_image=int(self.mu_class[index]),
        )

    def representative(self, index: int) -> Tuple2N:
        return self.decode(int(self.rep_codes[index]))

    def mu(self, index: int) -> ConjClass:
        return self.group.conjugacy_classes[int(self.mu_class[index])]

    @property
    def fiber_index(self) -> dict[int, np.ndarray]:
        if self._fiber_index is None:
            idx: dict[int, np.ndarray] = {}
            for cid in np.unique(self.mu_class):
                idx[int(cid)] = np.flatnonzero(self.mu_class == cid)
            self._fiber_index = idx
        return self._fiber_index

    def fiber_classes(self, conj_class: ConjClass | int) -> np.ndarray:
        cid = conj_class.id if isinstance(conj_class, ConjClass) else int(conj_class)
        return self.fiber_index.get(cid, np.array([], dtype=np.int64))

    # -- export ------------------------------------------------------------------

    def export_jsonl(self, fh: IO[str]) -> None:
        names = self.group.names
        for i in range(self.n_classes):
            t = self.representative(i)
            rec = {
                "index": i,
                "canonical": [[names[g], names[x]] for g, x in t],
                "size": int(self.sizes[i]),
                "mu_class": names[self.mu(i).representative],
            }
            fh.write(json.dumps(rec) + "\n")


# ---------------------------------------------------------------------------
# enumeration


def _mu_codes(group: FiniteGroup, table_width: int, digits: np.ndarray) -> np.ndarray:
    """Vectorized multi-commutator over digit rows."""
    mul, inv = group.mul, group.inv
    out = np.zeros(len(digits), dtype=np.int32)
    for i in range(0, table_width, 2):
        g = digits[:, i]
        x = digits[:, i + 1]
        com = mul[mul[mul[inv[g], inv[x]], g], x]
        out = mul[out, com]
    return out


def enumerate_classes(
    group: FiniteGroup,
    genus: int,
    fiber: Optional[ConjClass | int] = None,
    budget: int = DEFAULT_CODE_BUDGET,
) -> ClassTable:
    """Enumerate 2N-conjugacy classes (optionally restricted to one fiber).

    Deterministic: class index order is increasing canonical code.
    """
    if genus < 1:
        raise ValueError("genus must be >= 1")
    n = group.order
    width = 2 * genus
    total = n**width
    if total > budget:
        est = total * 3 * 8 // 2**20
        raise ResourceLimitError(
            f"enumeration needs {total} tuple codes (~{est} MiB working set), over the budget of {budget}"
        )
    fiber_id = None if fiber is None else (fiber.id if isinstance(fiber, ConjClass) else int(fiber))

    codes = np.arange(total, dtype=np.int64)
    digits = np.empty((total, width), dtype=np.int16 if n <= 2**15 else np.int32)
    rest = codes.copy()
    for j in range(width - 1, -1, -1):
        digits[:, j] = rest % n
        rest //= n
    del rest

    domain: Optional[np.ndarray] = None
    if fiber_id is not None:
        mu_all = _mu_codes(group, width, digits)
        mask = group.class_of[mu_all] == fiber_id
        del mu_all
        domain = codes[mask]
        digits = digits[mask]
        codes = domain
    del codes

    # conj_digit[z][v] = v^z; build per z to keep memory flat
    canon = (domain if domain is not None else np.arange(total, dtype=np.int64)).copy()
    place = [n ** (width - 1 - j) for j in range(width)]
    for z in range(1, n):
        cz = np.array([group.conj(v, z) for v in range(n)], dtype=np.int64)
        img = np.zeros(len(canon), dtype=np.int64)
        for j in range(width):
            img += cz[digits[:, j]] * place[j]
        np.minimum(canon, img, out=canon)
    del digits

    if domain is None:
        reps = np.flatnonzero(canon == np.arange(total, dtype=np.int64)).astype(np.int64)
        class_ids = np.searchsorted(reps, canon)
    else:
        reps = domain[canon == domain]
        class_ids = np.searchsorted(reps, canon)
    sizes = np.bincount(class_ids, minlength=len(reps)).astype(np.int64)

    table = ClassTable(
        group,
        genus,
        rep_codes=reps,
        sizes=sizes,
        mu_class=np.empty(len(reps), dtype=np.int32),
        domain_codes=domain,
        canon=canon,
        fiber=fiber_id,
    )
    rep_digits = table.decode_array(reps)
    mu_elems = _mu_codes(group, width, rep_digits)
    table.mu_class = group.class_of[mu_elems].astype(np.int32)

    if int(sizes.sum()) != (len(canon)):
        raise VerificationError("class sizes do not partition the enumerated domain")
    return table


# ---------------------------------------------------------------------------
# counting oracles (no table construction)


def count_classes_burnside(group: FiniteGroup, genus: int) -> int:
    """Number of 2N-conjugacy classes via Burnside's lemma.

    Conjugation by z fixes exactly the tuples with all entries in the
    centralizer of z, so the class count is sum over conjugacy classes c of
    |Z_(g_c)|^(2N-1).
    """
    total = 0
    for c in group.conjugacy_classes:
        zc = group.order // c.size
        total += zc ** (2 * genus - 1)
    return total


def count_fiber_identity(group: FiniteGroup) -> int:
    """|mu_1^-1(c_e)|: sum over classes of the number of conjugacy classes
    of the corresponding centralizer."""
    total = 0
    for c in group.conjugacy_classes:
        sub, _ = group.centralizer(c.representative).as_group()
        total += len(sub.conjugacy_classes)
    return total


def _double_coset_reps(group: FiniteGroup, zc: Sequence[int], candidates: Iterable[int]) -> list[int]:
    """Representatives of Z x Z double cosets among the candidate elements."""
    seen: set[int] = set()
    reps = []
    for x in candidates:
        if x in seen:
            continue
        reps.append(x)
        for z1 in zc:
            z1x = group.m(z1, x)
            for z2 in zc:
                seen.add(group.m(z1x, z2))
    return reps


def count_fiber(group: FiniteGroup, target: ConjClass | int) -> int:
    """|mu_1^-1(c')| via solution double cosets, without a full enumeration.

    For each conjugacy class c with representative g and centralizer Z, the
    elements x with g^-1 (g^x) in c' are split into Z\\G/Z double cosets; each
    coset contributes the diconjugacy classes met by the slice (g | x_i z),
    z in Z.  The naive count of those classes as conjugation orbits of the
    joint centralizer on Z over-counts (conjugators that move x_i within its
    double coset can identify slice members), so the slice is deduplicated by
    canonical forms instead.  Much cheaper than enumerating G x G when
    centralizers are small.
    """
    cid = target.id if isinstance(target, ConjClass) else int(target)
    total = 0
    for c in group.conjugacy_classes:
        gc = c.representative
        zc = group.centralizer(gc).members
        sols = [
            x
            for x in range(group.order)
            if group.class_of[group.m(group.i(gc), group.conj(gc, x))] == cid
        ]
        for xi in _double_coset_reps(group, zc, sols):
            slice_classes = {canonical_form(group, ((gc, group.m(xi, z)),)) for z in zc}
            total += len(slice_classes)
    return total


def count_diconj_in_product(group: FiniteGroup, c1: ConjClass | int, c2: ConjClass | int) -> int:
    """Number of diconjugacy classes inside c1 x c2 (a double coset count)."""
    i1 = c1.id if isinstance(c1, ConjClass) else int(c1)
    i2 = c2.id if isinstance(c2, ConjClass) else int(c2)
    g1 = group.conjugacy_classes[i1].representative
    g2 = group.conjugacy_classes[i2].representative
    z1 = np.asarray(group.centralizer(g1).members)
    z2 = np.asarray(group.centralizer(g2).members)
    z1_mask = np.zeros(group.order, dtype=bool)
    z1_mask[z1] = True
    acc = 0
    for x in range(group.order):
        conj_z2 = group.mul[group.mul[x, z2], group.inv[x]]
        acc += int(z1_mask[conj_z2].sum())
    if acc % (len(z1) * len(z2)) != 0:
        raise VerificationError("double coset count is not integral")
    return acc // (len(z1) * len(z2))


def image_chain_check(group: FiniteGroup, genus: int, budget: int = DEFAULT_CODE_BUDGET) -> list[set[int]]:
    """Images of mu_n for n = 1..genus; verifies the inclusion chain and that
    Im(mu_1) is the set of commutator classes."""
    images: list[set[int]] = []
    for n in range(1, genus + 1):
        table = enumerate_classes(group, n, budget=budget)
        images.append({int(c) for c in np.unique(table.mu_class)})
    comm = {c.id for c in group.commutator_classes()}
    if images[0] != comm:
        raise VerificationError("Im(mu_1) differs from the commutator classes")
    for a, b in zip(images, images[1:]):
        if not a.issubset(b):
            raise VerificationError("mu images do not form an inclusion chain")
    return images
