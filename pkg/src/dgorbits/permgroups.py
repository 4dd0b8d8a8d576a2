"""Schreier-Sims stabilizer chains over numpy permutations.

Permutations are int32 image arrays p with p[x] the image of x; composition
uses ``compose(p, q) = p[q]`` ("apply q first, then p").  The chain is built
with the randomized (product-replacement) variant and then checked: original
and strong generators must sift to the identity, random words must be
members, and a deterministic Schreier-generator sweep runs in full when its
estimated cost is below ``verify_work_cap`` (above the cap a seeded sample of
Schreier generators is sifted instead; the cheap levels are always swept in
full).  The construction is deterministic for a fixed seed and generator
order; bases are chosen as first moved points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from dgorbits.errors import GroupError, ResourceLimitError, VerificationError

UNVISITED = np.int64(-2)
ROOT = np.int64(-1)

Perm = np.ndarray


def identity_perm(degree: int) -> Perm:
    return np.arange(degree, dtype=np.int32)


def is_identity(p: Perm) -> bool:
    return bool(np.array_equal(p, np.arange(len(p), dtype=p.dtype)))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply q first, then p."""
    return p[q]


def inverse(p: Perm) -> Perm:
    out = np.empty_like(p)
    out[p] = np.arange(len(p), dtype=p.dtype)
    return out


def perm_order(p: Perm) -> int:
    seen = np.zeros(len(p), dtype=bool)
    out = 1
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = int(p[x])
            length += 1
        out = math.lcm(out, length)
    return out


def cycle_type(p: Perm) -> tuple[tuple[int, int], ...]:
    """Sorted (cycle length, multiplicity) pairs, fixed points included."""
    seen = np.zeros(len(p), dtype=bool)
    counts: dict[int, int] = {}
    for start in range(len(p)):
        if seen[start]:
            continue
        length = 0
        x = start
        while not seen[x]:
            seen[x] = True
            x = int(p[x])
            length += 1
        counts[length] = counts.get(length, 0) + 1
    return tuple(sorted(counts.items()))


class _Rattle:
    """Product-replacement random element generator (deterministic seed)."""

    def __init__(self, gens: Sequence[Perm], seed: int, slots: int = 10, scramble: int = 60):
        degree = len(gens[0])
        self.rng = np.random.default_rng(seed)
        self.reservoir = [g.copy() for g in gens]
        while len(self.reservoir) < slots:
            self.reservoir.append(self.reservoir[len(self.reservoir) % len(gens)].copy())
        self.accu = identity_perm(degree)
        for _ in range(scramble):
            self.stir()

    def stir(self) -> Perm:
        # i != j keeps the reservoir generating the whole group
        i = int(self.rng.integers(0, len(self.reservoir)))
        j = int(self.rng.integers(0, len(self.reservoir) - 1))
        if j >= i:
            j += 1
        p = self.reservoir[i]
        if self.rng.integers(0, 2):
            p = inverse(p)
        self.reservoir[j] = compose(self.reservoir[j], p)
        self.accu = compose(self.accu, self.reservoir[j])
        return self.accu

    def sample(self) -> Perm:
        return self.stir()


@dataclass
class _Level:
    base: int
    own: list[tuple[Perm, Perm]] = field(default_factory=list)
    tree: Optional[np.ndarray] = None  # edge code per point, UNVISITED/ROOT
    edges: list[tuple[Perm, Perm]] = field(default_factory=list)

    @property
    def orbit_size(self) -> int:
        return int(np.count_nonzero(self.tree != UNVISITED))


class PermGroup:
    """A permutation group with a verified base and strong generating set."""

    def __init__(self, generators: Sequence[Perm], seed: int = 0):
        gens = [np.asarray(g, dtype=np.int32) for g in generators]
        if not gens:
            raise GroupError("need at least one permutation")
        degree = len(gens[0])
        for g in gens:
            if len(g) != degree:
                raise GroupError("generators must share one degree")
            if sorted(int(v) for v in g) != list(range(degree)):
                raise GroupError("not a permutation")
        self.degree = degree
        self.generators = [g for g in gens if not is_identity(g)]
        self.levels: list[_Level] = []
        self._gen_keys: set[bytes] = set()
        self.seed = seed
        self.verification: dict = {}

    # -- chain plumbing -------------------------------------------------------

    def _suffix_edges(self, i: int) -> list[tuple[Perm, Perm]]:
        out: list[tuple[Perm, Perm]] = []
        for lvl in self.levels[i:]:
            out.extend(lvl.own)
        return out

    def _rebuild(self, i: int) -> None:
        lvl = self.levels[i]
        lvl.edges = self._suffix_edges(i)
        tree = np.full(self.degree, UNVISITED, dtype=np.int64)
        tree[lvl.base] = ROOT
        frontier = np.array([lvl.base], dtype=np.int64)
        while len(frontier):
            nxt = []
            for k, (g, ginv) in enumerate(lvl.edges):
                for pol, perm in ((0, g), (1, ginv)):
                    img = perm[frontier]
                    fresh = img[tree[img] == UNVISITED]
                    if len(fresh):
                        fresh = np.unique(fresh)
                        fresh = fresh[tree[fresh] == UNVISITED]
                        tree[fresh] = 2 * k + pol
                        nxt.append(fresh)
            frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
        lvl.tree = tree

    def _edge_inverse(self, lvl: _Level, code: int) -> Perm:
        g, ginv = lvl.edges[code // 2]
        return ginv if code % 2 == 0 else g

    def _reduce_through(self, p: Perm, i: int) -> tuple[Perm, int]:
        """Sift p through levels i.., returning (residue, stop_level)."""
        for j in range(i, len(self.levels)):
            lvl = self.levels[j]
            beta = int(p[lvl.base])
            if lvl.tree[beta] == UNVISITED:
                return p, j
            while beta != lvl.base:
                back = self._edge_inverse(lvl, int(lvl.tree[beta]))
                p = compose(back, p)
                beta = int(back[beta])
        return p, len(self.levels)

    def sift(self, p: Perm) -> Perm:
        """Residue of p against the chain; identity residue means membership."""
        residue, _ = self._reduce_through(np.asarray(p, dtype=np.int32), 0)
        return residue

    def contains(self, p: Perm) -> bool:
        return is_identity(self.sift(p))

    def _insert(self, residue: Perm, level: int) -> None:
        key = residue.tobytes()
        if key in self._gen_keys:
            return
        self._gen_keys.add(key)
        if level == len(self.levels):
            moved = int(np.flatnonzero(residue != np.arange(self.degree))[0])
            self.levels.append(_Level(base=moved))
        lvl = self.levels[level]
        lvl.own.append((residue, inverse(residue)))
        self._rebuild(level)
        pair = lvl.own[-1]
        for j in range(level - 1, -1, -1):
            up = self.levels[j]
            up.edges.append(pair)
            orbit_pts = np.flatnonzero(up.tree != UNVISITED)
            if np.all(up.tree[pair[0][orbit_pts]] != UNVISITED) and np.all(
                up.tree[pair[1][orbit_pts]] != UNVISITED
            ):
                continue
            self._rebuild(j)

    def add_element(self, p: Perm) -> bool:
        """Sift and insert if new; True when the chain grew."""
        residue, level = self._reduce_through(np.asarray(p, dtype=np.int32), 0)
        if level == len(self.levels) and is_identity(residue):
            return False
        self._insert(residue, level)
        return True

    # -- construction ----------------------------------------------------------

    def build(self, stall_rounds: int = 48) -> "PermGroup":
        if self.levels or not self.generators:
            return self
        for g in self.generators:
            self.add_element(g)
        rng = _Rattle(self.generators, self.seed)
        quiet = 0
        while quiet < stall_rounds:
            if self.add_element(rng.sample()):
                quiet = 0
            else:
                quiet += 1
        self._fixpoint()
        return self

    def _fixpoint(self) -> None:
        """Re-expand orbits until stable and re-sift every generator."""
        changed = True
        while changed:
            changed = False
            for i in range(len(self.levels)):
                before = self.levels[i].orbit_size
                self._rebuild(i)
                if self.levels[i].orbit_size != before:
                    changed = True
            for g in self.generators:
                if self.add_element(g):
                    changed = True

    # -- order and friends -------------------------------------------------------

    @property
    def order(self) -> int:
        if not self.levels:
            return 1
        out = 1
        for lvl in self.levels:
            out *= lvl.orbit_size
        return out

    def base(self) -> list[int]:
        return [lvl.base for lvl in self.levels]

    def strong_generators(self) -> list[Perm]:
        return [g for lvl in self.levels for g, _ in lvl.own]

    def coset_representative(self, level: int, point: int) -> Perm:
        """u with u[base_level] == point, from the Schreier tree."""
        lvl = self.levels[level]
        if lvl.tree[point] == UNVISITED:
            raise GroupError("point outside the basic orbit")
        u = identity_perm(self.degree)
        beta = point
        while beta != lvl.base:
            code = int(lvl.tree[beta])
            g, ginv = lvl.edges[code // 2]
            fwd = g if code % 2 == 0 else ginv
            back = ginv if code % 2 == 0 else g
            u = compose(fwd, u)
            beta = int(back[beta])
        return u

    def random_member(self, rng: np.random.Generator, words: int = 12) -> Perm:
        out = identity_perm(self.degree)
        for _ in range(words):
            g = self.generators[int(rng.integers(0, len(self.generators)))]
            out = compose(out, inverse(g) if rng.integers(0, 2) else g)
        return out

    # -- verification -------------------------------------------------------------

    def _verify_work_estimate(self) -> int:
        total = 0
        for i, lvl in enumerate(self.levels):
            remaining = len(self.levels) - i
            total += lvl.orbit_size * 2 * len(lvl.edges) * remaining * self.degree
        return total

    def verify(
        self,
        mode: str = "auto",
        work_cap: int = 2_000_000_000,
        sample_budget: int = 1500,
        random_words: int = 200,
    ) -> dict:
        """Check the strong generating set; incomplete chains are repaired by
        inserting the witness and re-running.  Returns a report dict."""
        report: dict = {"mode": mode, "repairs": 0}
        while True:
            witness = self._verify_once(mode, work_cap, sample_budget, random_words, report)
            if witness is None:
                break
            report["repairs"] += 1
            self._insert(witness, self._reduce_through(witness, 0)[1])
            self._fixpoint()
        self.verification = report
        return report

    def _verify_once(self, mode, work_cap, sample_budget, random_words, report) -> Optional[Perm]:
        for g in self.generators + self.strong_generators():
            if not self.contains(g):
                return self.sift(g)
        rng = np.random.default_rng(self.seed + 1)
        if self.generators:
            for _ in range(random_words):
                w = self.random_member(rng)
                if not self.contains(w):
                    return self.sift(w)
        full = mode == "full" or (mode == "auto" and self._verify_work_estimate() <= work_cap)
        report["schreier_sweep"] = "full" if full else "sampled"
        n_levels = max(1, len(self.levels))
        per_level_budget = max(4, sample_budget // n_levels)
        for i, lvl in enumerate(self.levels):
            orbit_pts = [int(v) for v in np.flatnonzero(lvl.tree != UNVISITED)]
            pairs = lvl.edges
            level_work = len(orbit_pts) * 2 * len(pairs) * (len(self.levels) - i) * self.degree
            if not full and level_work > work_cap // n_levels:
                picks = min(per_level_budget, len(orbit_pts) * len(pairs))
                combos = {
                    (int(rng.integers(0, len(orbit_pts))), int(rng.integers(0, len(pairs))))
                    for _ in range(picks)
                }
            else:
                combos = {(a, k) for a in range(len(orbit_pts)) for k in range(len(pairs))}
            for a_idx, k in sorted(combos):
                a = orbit_pts[a_idx]
                g, _ = pairs[k]
                u_a = self.coset_representative(i, a)
                u_b = self.coset_representative(i, int(g[a]))
                schreier = compose(inverse(u_b), compose(g, u_a))
                residue, stop = self._reduce_through(schreier, i)
                if not (stop == len(self.levels) and is_identity(residue)):
                    return residue
        return None


def schreier_sims(
    generators: Sequence[Perm],
    seed: int = 0,
    stall_rounds: int = 48,
    verify_mode: str = "auto",
    verify_work_cap: int = 2_000_000_000,
    sample_budget: int = 1500,
) -> PermGroup:
    """Build and verify a stabilizer chain for the given permutations."""
    group = PermGroup(generators, seed=seed)
    group.build(stall_rounds=stall_rounds)
    group.verify(mode=verify_mode, work_cap=verify_work_cap, sample_budget=sample_budget)
    return group


def group_order(group: PermGroup) -> int:
    return group.order


def membership(group: PermGroup, p: Perm) -> bool:
    return group.contains(np.asarray(p, dtype=np.int32))


def element_order(p: Perm) -> int:
    return perm_order(np.asarray(p, dtype=np.int32))


def stabilizer_order(group: PermGroup, orbit_length: int) -> int:
    """Order of a point stabilizer via orbit-stabilizer; the quotient is
    transitive on its orbit so the division must be exact."""
    if orbit_length <= 0 or group.order % orbit_length != 0:
        raise VerificationError(
            f"orbit length {orbit_length} does not divide the group order {group.order}"
        )
    return group.order // orbit_length


def derived_subgroup_index(group: PermGroup, closure_cap: int = 100_000) -> int:
    """Index of the derived subgroup: normal closure of generator commutators."""
    gens = group.generators
    if not gens:
        return 1
    degree = group.degree
    derived = PermGroup([identity_perm(degree)], seed=group.seed + 7)
    derived.generators = []
    queue: list[Perm] = []
    for a in gens:
        for b in gens:
            c = compose(inverse(a), compose(inverse(b), compose(a, b)))
            if not is_identity(c):
                queue.append(c)
    steps = 0
    while queue:
        w = queue.pop()
        if derived.levels and derived.contains(w):
            continue
        if not derived.levels and is_identity(w):
            continue
        derived.generators.append(w)
        derived.add_element(w)
        # keep the randomized closure honest on each growth step
        rng = _Rattle(derived.generators, derived.seed)
        quiet = 0
        while quiet < 24:
            quiet = 0 if derived.add_element(rng.sample()) else quiet + 1
        steps += 1
        if steps > closure_cap:
            raise ResourceLimitError("derived subgroup closure exceeded its cap")
        for g in gens:
            queue.append(compose(inverse(g), compose(w, g)))
    derived._fixpoint()
    derived.verify(mode="auto")
    if group.order % derived.order != 0:
        raise VerificationError("derived subgroup order does not divide the group order")
    return group.order // derived.order


# ---------------------------------------------------------------------------
# SL(2, Z/kZ) factoring


def sl2_group_size(k: int) -> int:
    if k == 1:
        return 1
    out = k**3
    for p in {f for f in _prime_factors(k)}:
        out = out // (p * p) * (p * p - 1)
    return out


def _prime_factors(k: int) -> list[int]:
    out = []
    d = 2
    while d * d <= k:
        if k % d == 0:
            out.append(d)
            while k % d == 0:
                k //= d
        d += 1
    if k > 1:
        out.append(k)
    return out


def sl2_factoring_test(sigma: Perm, tau: Perm, k: int, cap: int = 10_000_000) -> bool:
    """Does S -> sigma, T -> tau extend to SL(2, Z/kZ) -> Sym(orbit)?

    The identification is S = (0 -1; 1 0) and T = (1 0; -1 1) mod k.  BFS
    labels every matrix with a permutation; any label conflict kills the
    homomorphism.  Labels compose as functions (later matrix factors of a
    product act first on the orbit).
    """
    sigma = np.asarray(sigma, dtype=np.int32)
    tau = np.asarray(tau, dtype=np.int32)
    if k == 1:
        return is_identity(sigma) and is_identity(tau)
    if k < 1:
        raise GroupError("level must be >= 1")
    if sl2_group_size(k) > cap:
        raise ResourceLimitError(f"|SL(2,Z/{k})| = {sl2_group_size(k)} exceeds the cap {cap}")

    def mat_mul(m1, m2):
        a, b, c, d = m1
        p, q, r, s = m2
        return ((a * p + b * r) % k, (a * q + b * s) % k, (c * p + d * r) % k, (c * q + d * s) % k)

    s_mat = (0, (-1) % k, 1, 0)
    t_mat = (1, 0, (-1) % k, 1)
    ident = (1, 0, 0, 1)

    label_ids: dict[bytes, int] = {}
    label_perms: list[Perm] = []

    def intern(p: Perm) -> int:
        key = p.tobytes()
        if key not in label_ids:
            label_ids[key] = len(label_perms)
            label_perms.append(p)
        return label_ids[key]

    labels: dict[tuple[int, int, int, int], int] = {ident: intern(identity_perm(len(sigma)))}
    frontier = [ident]
    while frontier:
        nxt = []
        for mat in frontier:
            base_perm = label_perms[labels[mat]]
            for gen_mat, gen_perm in ((s_mat, sigma), (t_mat, tau)):
                new_mat = mat_mul(mat, gen_mat)
                new_perm = compose(base_perm, gen_perm)
                lid = intern(new_perm)
                if new_mat in labels:
                    if labels[new_mat] != lid:
                        return False
                else:
                    labels[new_mat] = lid
                    nxt.append(new_mat)
        frontier = nxt
    return True


def admissible_levels(tau: Perm, bound: int) -> list[int]:
    """Candidate congruence levels: multiples of the T-image's order."""
    t_ord = perm_order(np.asarray(tau, dtype=np.int32))
    return [k for k in range(t_ord, bound + 1, t_ord)]


def congruence_scan(sigma: Perm, tau: Perm, levels: Iterable[int], cap: int = 10_000_000) -> dict[int, bool]:
    return {int(k): sl2_factoring_test(sigma, tau, int(k), cap=cap) for k in levels}
