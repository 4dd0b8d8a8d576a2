"""Mapping class group generators acting on 2N-conjugacy classes.

Generator kinds and the pairs they touch (pairs are stored left to right,
1-based writing order; "paper position" i counts from the right):

* ``T``, ``S``, ``U`` at position i = 1..N act on pair N-i+1;
* ``L`` at position k = 1..N-1 acts on pairs (N-k, N-k+1);
* ``M`` at position k = 2..N acts on pair N-k+1 coupled with the k-1
  trailing pairs.

On a single pair::

    T: (g|x) -> (g | g^-1 x)        S: (g|x) -> (x^-1 | g^x)
    U: (g|x) -> (xg | x)

    L: ((g|x),(h|y)) -> ((g | (^x h) g^-1 x), (^(g^x) h | (g^x) h^-1 y))

    M: ((g|x), t)    -> ((g | x w^-1), ^w t)   with w = (g^x) mu(t),
                        mu(t) the ordered product of commutators of t.

Boundary-twist triviality, Torelli probes, the symplectic model action and
the equivariance checks of the surrounding theory all live here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from dgorbits.errors import GroupError, VerificationError
from dgorbits.groups import FiniteGroup
from dgorbits.tuples import ClassTable, Tuple2N, multi_commutator

GENERATOR_KINDS = ("T", "S", "U", "L", "M")


@dataclass(frozen=True)
class Generator:
    kind: str
    position: int
    inverted: bool = False

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise GroupError(f"unknown generator kind {self.kind!r}")

    def validate(self, genus: int) -> None:
        lo, hi = {
            "T": (1, genus),
            "S": (1, genus),
            "U": (1, genus),
            "L": (1, genus - 1),
            "M": (2, genus),
        }[self.kind]
        if not lo <= self.position <= hi:
            raise GroupError(f"{self.kind}^({self.position}) is out of range for genus {genus}")

    @property
    def inverse(self) -> "Generator":
        return Generator(self.kind, self.position, not self.inverted)

    def __str__(self) -> str:
        return f"{self.kind}{self.position}" + ("'" if self.inverted else "")


@dataclass(frozen=True)
class Word:
    letters: tuple[Generator, ...]

    def __iter__(self):
        return iter(self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(g.inverse for g in reversed(self.letters)))

    def __str__(self) -> str:
        return "*".join(map(str, self.letters)) or "id"


def standard_generators(genus: int, include_u: bool = False) -> list[Generator]:
    """The generator list used for orbit decomposition: T,S at every position,
    L and M everywhere they are defined (U = S T S^-1 is redundant)."""
    gens = [Generator(k, i) for k in ("T", "S") for i in range(1, genus + 1)]
    if include_u:
        gens += [Generator("U", i) for i in range(1, genus + 1)]
    gens += [Generator("L", k) for k in range(1, genus)]
    gens += [Generator("M", k) for k in range(2, genus + 1)]
    return gens


# ---------------------------------------------------------------------------
# tuple-level action


def apply_generator_tuple(group: FiniteGroup, gen: Generator, t: Tuple2N) -> Tuple2N:
    """Apply one generator (or its inverse) to a 2N-tuple of group elements."""
    genus = len(t)
    gen.validate(genus)
    m, inv, conj, lconj = group.m, group.i, group.conj, group.lconj
    pairs = list(t)
    if gen.kind in ("T", "S", "U"):
        j = genus - gen.position
        g, x = pairs[j]
        if gen.kind == "T":
            pairs[j] = (g, m(g, x) if gen.inverted else m(inv(g), x))
        elif gen.kind == "U":
            pairs[j] = (m(inv(x), g), x) if gen.inverted else (m(x, g), x)
        else:  # S
            if gen.inverted:
                pairs[j] = (conj(x, g), inv(g))
            else:
                pairs[j] = (inv(x), conj(g, x))
    elif gen.kind == "L":
        j = genus - gen.position - 1
        (g, x), (h, y) = pairs[j], pairs[j + 1]
        if not gen.inverted:
            gx = conj(g, x)
            pairs[j] = (g, m(m(lconj(x, h), inv(g)), x))
            pairs[j + 1] = (lconj(gx, h), m(m(gx, inv(h)), y))
        else:
            # solve L(p,q,r,s) = (g,x,h,y): w = h x^-1 g x h^-1, then
            # q = x h^-1 w, r = h^w, s = r w^-1 y.
            w = m(m(m(m(h, inv(x)), g), x), inv(h))
            q = m(m(x, inv(h)), w)
            r = conj(h, w)
            s = m(m(r, inv(w)), y)
            pairs[j] = (g, q)
            pairs[j + 1] = (r, s)
    else:  # M
        j = genus - gen.position
        g, x = pairs[j]
        trailing = pairs[j + 1 :]
        if not gen.inverted:
            mu = multi_commutator(group, tuple(trailing))
            w = m(conj(g, x), mu)
            pairs[j] = (g, m(x, inv(w)))
            pairs[j + 1 :] = [(lconj(w, h), lconj(w, y)) for h, y in trailing]
        else:
            mu_img = multi_commutator(group, tuple(trailing))
            w = m(m(m(inv(x), g), x), mu_img)
            pairs[j] = (g, m(x, w))
            pairs[j + 1 :] = [(conj(h, w), conj(y, w)) for h, y in trailing]
    return tuple(pairs)


def apply_word_tuple(group: FiniteGroup, word: Word | Iterable[Generator], t: Tuple2N) -> Tuple2N:
    for gen in word:
        t = apply_generator_tuple(group, gen, t)
    return t


# ---------------------------------------------------------------------------
# class-level permutations


@dataclass
class ClassPermutation:
    table: ClassTable
    image: np.ndarray  # image[class index] = class index

    def __post_init__(self):
        self.image = np.asarray(self.image, dtype=np.int64)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.image, np.arange(len(self.image))))

    def inverse(self) -> "ClassPermutation":
        out = np.empty_like(self.image)
        out[self.image] = np.arange(len(self.image))
        return ClassPermutation(self.table, out)

    def then(self, other: "ClassPermutation") -> "ClassPermutation":
        """Permutation 'self first, then other'."""
        return ClassPermutation(self.table, other.image[self.image])

    def __eq__(self, other) -> bool:
        return isinstance(other, ClassPermutation) and np.array_equal(self.image, other.image)


def _digit_action(table: ClassTable, gen: Generator, digits: np.ndarray) -> np.ndarray:
    """Vectorized forward tuple action on an array of flattened tuples."""
    G = table.group
    MUL, INV = G.mul, G.inv

    def mm(a, b):
        return MUL[a, b]

    def iv(a):
        return INV[a]

    def conj(a, b):  # a^b
        return mm(mm(iv(b), a), b)

    def lconj(b, a):  # ^b a
        return mm(mm(b, a), iv(b))

    genus = table.genus
    out = digits.copy()
    kind, pos = gen.kind, gen.position
    # read columns from the untouched input so writes to `out` cannot alias
    if kind in ("T", "S", "U"):
        j = 2 * (genus - pos)
        g, x = digits[:, j], digits[:, j + 1]
        if kind == "T":
            out[:, j + 1] = mm(iv(g), x)
        elif kind == "U":
            out[:, j] = mm(x, g)
        else:
            out[:, j] = iv(x)
            out[:, j + 1] = conj(g, x)
    elif kind == "L":
        j = 2 * (genus - pos - 1)
        g, x, h, y = digits[:, j], digits[:, j + 1], digits[:, j + 2], digits[:, j + 3]
        gx = conj(g, x)
        out[:, j + 1] = mm(mm(lconj(x, h), iv(g)), x)
        out[:, j + 2] = lconj(gx, h)
        out[:, j + 3] = mm(mm(gx, iv(h)), y)
    else:  # M
        j = 2 * (genus - pos)
        g, x = digits[:, j], digits[:, j + 1]
        mu = np.zeros(len(out), dtype=np.int32)
        for jj in range(j + 2, 2 * genus, 2):
            h, y = digits[:, jj], digits[:, jj + 1]
            mu = mm(mu, mm(mm(mm(iv(h), iv(y)), h), y))
        w = mm(conj(g, x), mu)
        out[:, j + 1] = mm(x, iv(w))
        for jj in range(j + 2, 2 * genus, 2):
            out[:, jj] = lconj(w, digits[:, jj])
            out[:, jj + 1] = lconj(w, digits[:, jj + 1])
    return out


def generator_permutation(table: ClassTable, gen: Generator) -> ClassPermutation:
    """The permutation a generator induces on the class table."""
    gen.validate(table.genus)
    fwd = Generator(gen.kind, gen.position)
    digits = table.decode_array(table.rep_codes)
    img_codes = table.encode_array(_digit_action(table, fwd, digits))
    image = table.class_indices(img_codes)
    perm = ClassPermutation(table, image)
    if gen.inverted:
        perm = perm.inverse()
    return perm


class ActionCache:
    """Lazily built generator permutations for one class table."""

    def __init__(self, table: ClassTable):
        self.table = table
        self._perms: dict[Generator, ClassPermutation] = {}

    def perm(self, gen: Generator) -> ClassPermutation:
        if gen not in self._perms:
            if gen.inverted:
                self._perms[gen] = self.perm(gen.inverse).inverse()
            else:
                self._perms[gen] = generator_permutation(self.table, gen)
        return self._perms[gen]

    def word_permutation(self, word: Word | Iterable[Generator]) -> ClassPermutation:
        """Left-to-right application: the first letter acts first."""
        out = ClassPermutation(self.table, np.arange(self.table.n_classes))
        for gen in word:
            out = out.then(self.perm(gen))
        return out

    def standard_permutations(self) -> list[ClassPermutation]:
        return [self.perm(g) for g in standard_generators(self.table.genus)]


# ---------------------------------------------------------------------------
# orbits


@dataclass
class Orbit:
    id: int
    representative: int  # class index
    length: int


@dataclass
class OrbitDecomposition:
    table: ClassTable
    orbit_id: np.ndarray
    orbits: list[Orbit]

    def members(self, orbit: Orbit | int) -> np.ndarray:
        oid = orbit.id if isinstance(orbit, Orbit) else int(orbit)
        return np.flatnonzero(self.orbit_id == oid)

    def orbit_of_class(self, class_index: int) -> Orbit:
        return self.orbits[int(self.orbit_id[class_index])]

    def lengths_by_fiber(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for orb in self.orbits:
            fib = int(self.table.mu_class[orb.representative])
            out.setdefault(fib, []).append(orb.length)
        return out


def orbits(table: ClassTable, perms: Optional[Sequence[ClassPermutation]] = None) -> OrbitDecomposition:
    """Connected components of the class set under the generator permutations.

    Deterministic: orbit ids follow increasing minimal class index.
    """
    if perms is None:
        perms = ActionCache(table).standard_permutations()
    n = table.n_classes
    parent = np.arange(n, dtype=np.int64)

    def find(a: int) -> int:
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, int(parent[a])
        return root

    for perm in perms:
        for a in range(n):
            ra, rb = find(a), find(int(perm.image[a]))
            if ra != rb:
                if ra < rb:
                    parent[rb] = ra
                else:
                    parent[ra] = rb
    roots = np.array([find(a) for a in range(n)], dtype=np.int64)
    reps = np.unique(roots)
    orbit_id = np.searchsorted(reps, roots).astype(np.int64)
    counts = np.bincount(orbit_id, minlength=len(reps))
    orbs = [Orbit(i, int(reps[i]), int(counts[i])) for i in range(len(reps))]
    # every orbit sits inside one fiber
    for orb in orbs:
        fibs = np.unique(table.mu_class[orbit_id == orb.id])
        if len(fibs) != 1:
            raise VerificationError("orbit crosses a mu fiber")
    return OrbitDecomposition(table, orbit_id, orbs)


# ---------------------------------------------------------------------------
# boundary twist word


def boundary_twist_word(genus: int) -> Word:
    """The boundary Dehn twist as a word in the generator letters
    (d-twists -> T, b-twists -> U, e-twists -> M).

    Built from the star blocks (T_i^3 U_i)^3 for the first handle and
    (M_i^2 T_i U_i)^3 for the others; block i enters inverted when N - i is
    odd.  Each block equals the product of the twists around the separating
    curves enclosing handles 1..i-1 and 1..i, so the alternating product
    telescopes to the boundary twist; the sign pattern is cross-checked
    against the chain relation (T U M)^4 = (T^3 U)^3 * boundary in the test
    suite.  With all blocks taken forward the word is a product of
    separating twists instead and does not act trivially.
    """
    if genus < 1:
        raise GroupError("genus must be >= 1")
    blocks: list[list[Generator]] = [([Generator("T", 1)] * 3 + [Generator("U", 1)]) * 3]
    for i in range(2, genus + 1):
        blocks.append(([Generator("M", i)] * 2 + [Generator("T", i), Generator("U", i)]) * 3)
    letters: list[Generator] = []
    for i, block in enumerate(blocks, start=1):
        if (genus - i) % 2 == 1:
            letters.extend(g.inverse for g in reversed(block))
        else:
            letters.extend(block)
    return Word(tuple(letters))


def check_boundary_trivial(table: ClassTable, cache: Optional[ActionCache] = None) -> dict[str, bool]:
    """Evaluate the boundary word under both orientation conventions.

    Returns {'as_written': bool, 'inverted': bool}; the action factoring
    through the closed surface demands at least one to be the identity.
    """
    cache = cache or ActionCache(table)
    word = boundary_twist_word(table.genus)
    as_written = cache.word_permutation(word).is_identity()
    flipped = Word(tuple(g.inverse for g in word))
    inverted = cache.word_permutation(flipped).is_identity()
    return {"as_written": as_written, "inverted": inverted}


# ---------------------------------------------------------------------------
# Torelli probes


def torelli_genus2_tuple(group: FiniteGroup, t: Tuple2N) -> Tuple2N:
    """Dehn twist along a genus-1 separating curve: acts on the last pair as
    (h|y) -> (h^[y,h] | y^[y,h])."""
    if len(t) < 2:
        raise GroupError("genus-2 Torelli probe needs at least two pairs")
    h, y = t[-1]
    w = group.commutator(y, h)
    return t[:-1] + ((group.conj(h, w), group.conj(y, w)),)


def torelli_bounding_pair_tuple(group: FiniteGroup, t: Tuple2N) -> Tuple2N:
    """Genus-1 bounding pair map on the two right-most pairs:
    ((g|x),(h|y)) -> ((g | g x [y,h] (g^-1)^x), (^(g^x [h,y]) h | ^(g^x [h,y]) y))."""
    if len(t) < 2:
        raise GroupError("bounding-pair probe needs at least two pairs")
    m, inv, conj, lconj = group.m, group.i, group.conj, group.lconj
    g, x = t[-2]
    h, y = t[-1]
    com_yh = group.commutator(y, h)
    new_x = m(m(m(g, x), com_yh), conj(inv(g), x))
    w = m(conj(g, x), group.commutator(h, y))
    return t[:-2] + ((g, new_x), (lconj(w, h), lconj(w, y)))


def torelli_genus2_permutation(table: ClassTable) -> ClassPermutation:
    G = table.group
    MUL, INV = G.mul, G.inv
    digits = table.decode_array(table.rep_codes)
    h, y = digits[:, -2], digits[:, -1]
    w = MUL[MUL[MUL[INV[y], INV[h]], y], h]
    wi = INV[w]
    digits[:, -2] = MUL[MUL[wi, h], w]
    digits[:, -1] = MUL[MUL[wi, y], w]
    return ClassPermutation(table, table.class_indices(table.encode_array(digits)))


def torelli_bounding_pair_permutation(table: ClassTable) -> ClassPermutation:
    G = table.group
    MUL, INV = G.mul, G.inv
    digits = table.decode_array(table.rep_codes)
    g, x = digits[:, -4], digits[:, -3]
    h, y = digits[:, -2], digits[:, -1]
    com_yh = MUL[MUL[MUL[INV[y], INV[h]], y], h]
    digits[:, -3] = MUL[MUL[MUL[g, x], com_yh], MUL[MUL[INV[x], INV[g]], x]]
    w = MUL[MUL[MUL[INV[x], g], x], MUL[MUL[MUL[INV[h], INV[y]], h], y]]
    wi = INV[w]
    digits[:, -2] = MUL[MUL[w, h], wi]
    digits[:, -1] = MUL[MUL[w, y], wi]
    return ClassPermutation(table, table.class_indices(table.encode_array(digits)))


def torelli_trivial_predicted(group: FiniteGroup, genus: int) -> bool:
    """Group-data prediction for the Torelli action being trivial."""
    if genus <= 1:
        return True
    if genus >= 3:
        return group.is_abelian
    for g in range(group.order):
        for x in range(group.order):
            c = group.commutator(g, x)
            if group.m(c, g) != group.m(g, c) or group.m(c, x) != group.m(x, c):
                return False
    return True


def torelli_trivial_observed(table: ClassTable) -> bool:
    if table.genus <= 1:
        return True
    if table.genus == 2:
        return torelli_genus2_permutation(table).is_identity()
    return torelli_bounding_pair_permutation(table).is_identity()


# ---------------------------------------------------------------------------
# power-tuple orbits and the symplectic model


def power_tuple_orbit_invariant(group: FiniteGroup, t: Tuple2N, g: int) -> int:
    """gcd of the exponents of a tuple of powers of g, together with o(g)."""
    order = group.element_order(g)
    powers = {}
    h = 0
    for k in range(order):
        powers[h] = k
        h = group.m(h, g)
    exps = []
    for a, b in t:
        if a not in powers or b not in powers:
            raise GroupError("tuple entries are not all powers of the given element")
        exps += [powers[a], powers[b]]
    return math.gcd(order, *exps)


def _sp_generators(k: int, genus: int) -> list[Callable[[tuple[int, ...]], tuple[int, ...]]]:
    gens: list[Callable[[tuple[int, ...]], tuple[int, ...]]] = []

    def per_pair(i, fn):
        def act(state):
            s = list(state)
            s[2 * i], s[2 * i + 1] = fn(s[2 * i], s[2 * i + 1])
            return tuple(s)

        return act

    for i in range(genus):
        gens.append(per_pair(i, lambda m, n: ((m + n) % k, n)))
        gens.append(per_pair(i, lambda m, n: (n, (-m) % k)))
    for i in range(genus - 1):
        def mix(state, i=i):
            s = list(state)
            s[2 * i] = (s[2 * i] - s[2 * i + 3]) % k
            s[2 * i + 2] = (s[2 * i + 2] - s[2 * i + 1]) % k
            return tuple(s)

        def swap(state, i=i):
            s = list(state)
            s[2 * i], s[2 * i + 1], s[2 * i + 2], s[2 * i + 3] = (
                s[2 * i + 2],
                s[2 * i + 3],
                s[2 * i],
                s[2 * i + 1],
            )
            return tuple(s)

        gens.append(mix)
        gens.append(swap)
    return gens


def symplectic_model_orbits(
    k: int, genus: int, power_quotient: Optional[int] = None
) -> list[list[tuple[int, ...]]]:
    """Orbits of the integer symplectic generators on (Z/kZ)^2N, optionally
    after identifying states under one power map p_m."""
    if k < 1:
        raise GroupError("modulus must be >= 1")
    gens = _sp_generators(k, genus)
    if power_quotient is not None:
        if math.gcd(power_quotient, k) != 1:
            raise GroupError("power map exponent must be coprime to the modulus")
        m = power_quotient

        def pm(state):
            return tuple(v * m % k for v in state)

        gens = gens + [pm]
    seen: set[tuple[int, ...]] = set()
    orbit_list: list[list[tuple[int, ...]]] = []
    from itertools import product as iproduct

    for state in iproduct(range(k), repeat=2 * genus):
        if state in seen:
            continue
        frontier = [state]
        seen.add(state)
        members = [state]
        while frontier:
            cur = frontier.pop()
            for gen in gens:
                nxt = gen(cur)
                if nxt not in seen:
                    seen.add(nxt)
                    members.append(nxt)
                    frontier.append(nxt)
        orbit_list.append(sorted(members))
    return orbit_list


def model_orbit_of(k: int, genus: int, state: tuple[int, ...]) -> list[tuple[int, ...]]:
    """BFS orbit of one exponent vector under the symplectic generators."""
    gens = _sp_generators(k, genus)
    seen = {state}
    frontier = [state]
    members = [state]
    while frontier:
        cur = frontier.pop()
        for gen in gens:
            nxt = gen(cur)
            if nxt not in seen:
                seen.add(nxt)
                members.append(nxt)
                frontier.append(nxt)
    return members


@dataclass
class OrbitClassification:
    orbit: Orbit
    torelli_trivial: bool
    symplectic: bool
    power_tuple_generator: Optional[int] = None
    power_tuple_invariant: Optional[int] = None
    model_matches: Optional[bool] = None


def _cyclic_generator_containing(group: FiniteGroup, elements: Iterable[int]) -> Optional[int]:
    sub = group.subgroup(set(elements))
    order = sub.order
    for g in sub.members:
        if group.element_order(g) == order:
            return g
    return None


def classify_orbits(
    table: ClassTable,
    decomposition: OrbitDecomposition,
    probes: Optional[list[ClassPermutation]] = None,
) -> list[OrbitClassification]:
    """Per-orbit Torelli flag plus the power-tuple symplectic-model match."""
    genus = table.genus
    if probes is None:
        probes = []
        if genus == 2:
            probes = [torelli_genus2_permutation(table)]
        elif genus >= 3:
            probes = [torelli_bounding_pair_permutation(table), torelli_genus2_permutation(table)]
    out = []
    for orb in decomposition.orbits:
        members = decomposition.members(orb)
        trivial = all(bool(np.all(p.image[members] == members)) for p in probes)
        cls = OrbitClassification(orbit=orb, torelli_trivial=trivial, symplectic=trivial)
        rep = table.representative(orb.representative)
        gen = _cyclic_generator_containing(table.group, [v for pair in rep for v in pair])
        if gen is not None and gen != 0:
            cls.power_tuple_generator = gen
            cls.power_tuple_invariant = power_tuple_orbit_invariant(table.group, rep, gen)
            order = table.group.element_order(gen)
            powers = [0]
            for _ in range(order - 1):
                powers.append(table.group.m(powers[-1], gen))
            exps = tuple(
                v
                for g, x in rep
                for v in (powers.index(g), powers.index(x))
            )
            model = model_orbit_of(order, genus, exps)
            codes = np.asarray(
                [
                    table.encode(tuple((powers[s[2 * i]], powers[s[2 * i + 1]]) for i in range(genus)))
                    for s in model
                ],
                dtype=np.int64,
            )
            image_classes = set(int(v) for v in table.class_indices(codes))
            cls.model_matches = image_classes == {int(v) for v in members}
        elif gen == 0:
            # all-identity tuple: the fixed point of the whole action
            cls.power_tuple_generator = 0
            cls.power_tuple_invariant = 1
            cls.model_matches = orb.length == 1
        out.append(cls)
    return out


# ---------------------------------------------------------------------------
# center, Out, power-map and abelianization interplay


def center_action_permutation(table: ClassTable, ztuple: Tuple2N) -> ClassPermutation:
    """Left multiplication of a central 2N-tuple on classes."""
    G = table.group
    center = set(G.center().members)
    for a, b in ztuple:
        if a not in center or b not in center:
            raise GroupError("center action needs central entries")
    digits = table.decode_array(table.rep_codes)
    out = digits.copy()
    for i, (a, b) in enumerate(ztuple):
        out[:, 2 * i] = G.mul[a, digits[:, 2 * i]]
        out[:, 2 * i + 1] = G.mul[b, digits[:, 2 * i + 1]]
    return ClassPermutation(table, table.class_indices(table.encode_array(out)))


def center_conjugation(group: FiniteGroup, gen: Generator, ztuple: Tuple2N) -> Tuple2N:
    """The automorphism of Z(G)^2N implementing conjugation by a generator:
    (a|b)^T = (a|ab), (a|b)^S = (b|a^-1), (a|b)^U = (ab^-1|b),
    ((a|b),(c|d))^L = ((a|abc^-1),(c|a^-1 cd)), and M twists only its own pair
    by the T rule."""
    genus = len(ztuple)
    gen.validate(genus)
    if gen.inverted:
        # invert the forward automorphism by brute composition of the forward
        # map's order; central tuples form a small abelian group.
        fwd = Generator(gen.kind, gen.position)
        seen = [ztuple]
        cur = center_conjugation(group, fwd, ztuple)
        while cur != ztuple:
            seen.append(cur)
            cur = center_conjugation(group, fwd, cur)
        return seen[-1]
    m, inv = group.m, group.i
    pairs = list(ztuple)
    if gen.kind in ("T", "S", "U"):
        j = genus - gen.position
        a, b = pairs[j]
        if gen.kind == "T":
            pairs[j] = (a, m(a, b))
        elif gen.kind == "S":
            pairs[j] = (b, inv(a))
        else:
            pairs[j] = (m(a, inv(b)), b)
    elif gen.kind == "L":
        j = genus - gen.position - 1
        (a, b), (c, d) = pairs[j], pairs[j + 1]
        pairs[j] = (a, m(m(a, b), inv(c)))
        pairs[j + 1] = (c, m(m(inv(a), c), d))
    else:  # M
        j = genus - gen.position
        a, b = pairs[j]
        pairs[j] = (a, m(a, b))
    return tuple(pairs)


def verify_center_action(table: ClassTable, cache: Optional[ActionCache] = None) -> bool:
    """z(X(d)) == X(z^X(d)) for every generator X and central tuple z."""
    from itertools import product as iproduct

    G = table.group
    cache = cache or ActionCache(table)
    center = G.center().members
    gens = standard_generators(table.genus, include_u=True)
    tuples = [
        tuple((a, b) for a, b in zip(flat[0::2], flat[1::2]))
        for flat in iproduct(center, repeat=2 * table.genus)
    ]
    for gen in gens:
        perm = cache.perm(gen)
        for z in tuples:
            lhs = center_action_permutation(table, z).image[perm.image]
            zx = center_conjugation(G, gen, z)
            rhs = perm.image[center_action_permutation(table, zx).image]
            if not np.array_equal(lhs, rhs):
                return False
    return True


def automorphism_class_permutation(table: ClassTable, phi: Sequence[int]) -> ClassPermutation:
    """Diagonal action of a verified automorphism on classes."""
    G = table.group
    phi = np.asarray(phi, dtype=np.int64)
    if sorted(int(v) for v in phi) != list(range(G.order)) or phi[0] != 0:
        raise GroupError("phi is not a bijection fixing the identity")
    if not np.array_equal(G.mul[phi[:, None], phi[None, :]], phi[G.mul]):
        raise GroupError("phi is not a homomorphism")
    digits = table.decode_array(table.rep_codes)
    return ClassPermutation(table, table.class_indices(table.encode_array(phi[digits])))


def out_equivariance(
    table: ClassTable,
    decomposition: OrbitDecomposition,
    phi: Sequence[int],
    cache: Optional[ActionCache] = None,
) -> dict[int, int]:
    """Check that phi's class permutation commutes with every generator and
    map orbits to orbits; returns the induced orbit bijection."""
    cache = cache or ActionCache(table)
    perm_phi = automorphism_class_permutation(table, phi)
    for gen in standard_generators(table.genus):
        p = cache.perm(gen)
        if not np.array_equal(perm_phi.image[p.image], p.image[perm_phi.image]):
            raise VerificationError(f"automorphism does not commute with {gen}")
    pairing: dict[int, int] = {}
    for orb in decomposition.orbits:
        image_orbit = int(decomposition.orbit_id[perm_phi.image[orb.representative]])
        if decomposition.orbits[image_orbit].length != orb.length:
            raise VerificationError("automorphism pairs orbits of different lengths")
        pairing[orb.id] = image_orbit
    return pairing


def power_map_permutation(table: ClassTable, m: int) -> ClassPermutation:
    pmap = table.group.power_map(m)
    digits = table.decode_array(table.rep_codes)
    return ClassPermutation(table, table.class_indices(table.encode_array(pmap[digits])))


@dataclass
class PowerEquivarianceReport:
    m: int
    qualifying: np.ndarray          # class indices with [x,g] central in the pair
    t_equivariant_on_qualifying: bool
    s_equivariant_everywhere: bool
    t_witnesses: list[int] = field(default_factory=list)  # failures outside


def power_map_equivariance(table: ClassTable, m: int, cache: Optional[ActionCache] = None) -> PowerEquivarianceReport:
    """p_m vs the genus-1 action: equivariant for S everywhere and for T on
    pairs whose commutator centralizes the pair."""
    if table.genus != 1:
        raise GroupError("power-map equivariance is a genus-1 check")
    G = table.group
    cache = cache or ActionCache(table)
    perm_p = power_map_permutation(table, m)
    perm_t = cache.perm(Generator("T", 1))
    perm_s = cache.perm(Generator("S", 1))

    def qualifies(idx: int) -> bool:
        ((g, x),) = table.representative(idx)
        c = G.commutator(x, g)
        return G.m(c, g) == G.m(g, c) and G.m(c, x) == G.m(x, c)

    quals = np.asarray([i for i in range(table.n_classes) if qualifies(i)], dtype=np.int64)
    t_ok = bool(np.array_equal(perm_t.image[perm_p.image[quals]], perm_p.image[perm_t.image[quals]]))
    s_ok = bool(np.array_equal(perm_s.image[perm_p.image], perm_p.image[perm_s.image]))
    witnesses = [
        int(i)
        for i in range(table.n_classes)
        if i not in set(int(q) for q in quals)
        and perm_t.image[perm_p.image[i]] != perm_p.image[perm_t.image[i]]
    ]
    return PowerEquivarianceReport(m, quals, t_ok, s_ok, witnesses)


def abelianization_projection(
    table: ClassTable, ab_table: ClassTable, proj: Sequence[int]
) -> np.ndarray:
    """Class map induced by G -> G^ab; verified surjective and equivariant."""
    proj = np.asarray(proj, dtype=np.int64)
    digits = table.decode_array(table.rep_codes)
    class_map = ab_table.class_indices(ab_table.encode_array(proj[digits]))
    if len(np.unique(class_map)) != ab_table.n_classes:
        raise VerificationError("abelianization class map is not surjective")
    cache_g = ActionCache(table)
    cache_a = ActionCache(ab_table)
    for gen in standard_generators(table.genus, include_u=True):
        pg = cache_g.perm(gen)
        pa = cache_a.perm(gen)
        if not np.array_equal(class_map[pg.image], pa.image[class_map]):
            raise VerificationError(f"abelianization map does not intertwine {gen}")
    return class_map


# ---------------------------------------------------------------------------
# SL(2,Z) on almost-commuting diconjugacy classes


def sl2_check_hypothesis(group: FiniteGroup, g: int, x: int) -> bool:
    c = group.commutator(x, g)
    return group.m(c, g) == group.m(g, c) and group.m(c, x) == group.m(x, c)


def sl2_matrix_action_commuting(
    table: ClassTable, matrix: Sequence[Sequence[int]], pair: tuple[int, int]
) -> int:
    """(a b; c d): (g|x) -> class of (g^a x^b | g^c x^d); requires [x,g] to
    commute with both g and x."""
    if table.genus != 1:
        raise GroupError("the matrix action lives on diconjugacy classes")
    (a, b), (c, d) = matrix
    if a * d - b * c != 1:
        raise GroupError("matrix must be in SL(2,Z)")
    g, x = pair
    G = table.group
    if not sl2_check_hypothesis(G, g, x):
        raise GroupError("commutator of the pair does not centralize it; the closed formula does not apply")
    new = ((G.m(G.pow(g, a), G.pow(x, b)), G.m(G.pow(g, c), G.pow(x, d))),)
    return table.class_index(new)


def sl2_word(matrix: Sequence[Sequence[int]]) -> Word:
    """Express an SL(2,Z) matrix as a word in the letters S and T.

    The identification is S -> (0 -1; 1 0) and T -> (1 0; -1 1), matching the
    genus-1 class action; the word is returned in application order (first
    letter acts first).
    """
    (a, b), (c, d) = (list(r) for r in matrix)
    if a * d - b * c != 1:
        raise GroupError("matrix must be in SL(2,Z)")
    S = Generator("S", 1)
    T = Generator("T", 1)

    # Row-reduce M to the identity by left multiplications with generator
    # matrices; the original matrix is then the product of the op inverses in
    # reverse order.  T^k = (1 0; -k 1), S = (0 -1; 1 0), U^k = S T^k S^-1.
    ops: list[Generator] = []  # letters applied, in order, to the left of M

    def left_T(k: int):
        nonlocal a, b, c, d
        c -= k * a
        d -= k * b
        ops.extend([T] * k if k >= 0 else [T.inverse] * (-k))

    def left_S():
        nonlocal a, b, c, d
        a, b, c, d = -c, -d, a, b
        ops.append(S)

    def left_U(k: int):
        nonlocal a, b, c, d
        a += k * c
        b += k * d
        ops.append(S.inverse)
        ops.extend([T] * k if k >= 0 else [T.inverse] * (-k))
        ops.append(S)

    while c != 0:
        if a == 0 or abs(c) < abs(a):
            left_S()
            continue
        k = round(c / a)
        if k == 0:
            k = 1 if c * a > 0 else -1
        left_T(k)
    if a == -1:
        left_S()
        left_S()
    if b != 0:
        left_U(-b)
    if (a, b, c, d) != (1, 0, 0, 1):
        raise VerificationError("matrix decomposition did not terminate at the identity")
    letters = tuple(gen.inverse for gen in reversed(ops))
    return Word(letters)


def sl2_matrix_of_word(word: Word | Iterable[Generator]) -> tuple[tuple[int, int], tuple[int, int]]:
    """Integer matrix of a genus-1 word (first letter acts first)."""
    mat = ((1, 0), (0, 1))

    def mul(m1, m2):
        (a, b), (c, d) = m1
        (p, q), (r, s) = m2
        return ((a * p + b * r, a * q + b * s), (c * p + d * r, c * q + d * s))

    for gen in word:
        if gen.kind == "T":
            g = ((1, 0), (-1, 1))
        elif gen.kind == "S":
            g = ((0, -1), (1, 0))
        elif gen.kind == "U":
            g = ((1, 1), (0, 1))
        else:
            raise GroupError("genus-1 words may only use T, S, U")
        if gen.inverted:
            (a, b), (c, d) = g
            g = ((d, -b), (-c, a))
        mat = mul(g, mat)  # later letters act on the left
    return mat
