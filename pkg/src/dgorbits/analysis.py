"""Per-orbit analysis reports: quotient orders, stabilizers, congruence tests.

This is the glue between the class-table action and the permutation-group
machinery, and the home of the JSON/DOT emitters used by the CLI.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from dgorbits import mcg, permgroups
from dgorbits.errors import GroupError
from dgorbits.mcg import ActionCache, Generator, Orbit, OrbitDecomposition
from dgorbits.permgroups import PermGroup
from dgorbits.tuples import ClassTable

SCHEMA_VERSION = "dgorbits-report-1"


def restrict_to_orbit(
    table: ClassTable, decomposition: OrbitDecomposition, orbit: Orbit, perms: Sequence[mcg.ClassPermutation]
) -> list[np.ndarray]:
    """Generator permutations relabeled to 0..len(orbit)-1 (sorted members)."""
    members = decomposition.members(orbit)
    local = np.full(table.n_classes, -1, dtype=np.int64)
    local[members] = np.arange(len(members))
    out = []
    for p in perms:
        img = local[p.image[members]]
        if np.any(img < 0):
            raise GroupError("permutation does not preserve the orbit")
        out.append(img.astype(np.int32))
    return out


def orbit_quotient(
    table: ClassTable,
    decomposition: OrbitDecomposition,
    orbit: Orbit,
    cache: Optional[ActionCache] = None,
    seed: int = 0,
    verify_mode: str = "auto",
) -> PermGroup:
    """The image of the generator action restricted to one orbit."""
    cache = cache or ActionCache(table)
    perms = cache.standard_permutations()
    gens = restrict_to_orbit(table, decomposition, orbit, perms)
    dedup: dict[bytes, np.ndarray] = {}
    for g in gens:
        dedup.setdefault(g.tobytes(), g)
    return permgroups.schreier_sims(list(dedup.values()), seed=seed, verify_mode=verify_mode)


@dataclass
class OrbitReport:
    orbit_id: int
    representative: list[list[str]]
    length: int
    fiber: str
    torelli_trivial: Optional[bool] = None
    symplectic: Optional[bool] = None
    power_tuple_invariant: Optional[int] = None
    model_matches: Optional[bool] = None
    quotient_order: Optional[int] = None
    stabilizer_order: Optional[int] = None
    derived_index: Optional[int] = None
    congruence: Optional[dict[int, bool]] = None
    generator_cycle_types: Optional[dict[str, list[list[int]]]] = None

    def to_json(self) -> dict:
        out: dict = {
            "orbit": self.orbit_id,
            "representative": self.representative,
            "length": self.length,
            "fiber": self.fiber,
        }
        if self.torelli_trivial is not None:
            out["torelli_trivial"] = self.torelli_trivial
            out["symplectic"] = self.symplectic
        if self.power_tuple_invariant is not None:
            out["power_tuple_invariant"] = self.power_tuple_invariant
            out["model_matches"] = self.model_matches
        if self.quotient_order is not None:
            out["quotient_order"] = str(self.quotient_order)
            out["stabilizer_order"] = str(self.stabilizer_order)
        if self.derived_index is not None:
            out["derived_index"] = str(self.derived_index)
        if self.congruence is not None:
            out["congruence"] = {str(k): v for k, v in self.congruence.items()}
        if self.generator_cycle_types is not None:
            out["generator_cycle_types"] = self.generator_cycle_types
        return out


@dataclass
class TableAnalysis:
    table: ClassTable
    decomposition: OrbitDecomposition
    cache: ActionCache
    reports: list[OrbitReport]

    def report_for_length(self, length: int) -> list[OrbitReport]:
        return [r for r in self.reports if r.length == length]

    def to_json(self) -> dict:
        group = self.table.group
        fibers = {
            group.names[group.conjugacy_classes[int(cid)].representative]: int(len(members))
            for cid, members in self.table.fiber_index.items()
        }
        return {
            "schema": SCHEMA_VERSION,
            "group": group.name,
            "group_order": group.order,
            "genus": self.table.genus,
            "classes": int(self.table.n_classes),
            "fibers": fibers,
            "boundary_word_trivial": mcg.check_boundary_trivial(self.table, self.cache),
            "orbits": [r.to_json() for r in self.reports],
        }


def analyze_table(
    table: ClassTable,
    quotient_max_degree: int = 512,
    derived_index_max_degree: int = 0,
    congruence_levels: Optional[Sequence[int]] = None,
    classify: bool = True,
    cycle_types: bool = False,
    seed: int = 0,
    verify_mode: str = "auto",
) -> TableAnalysis:
    """Decompose a class table into orbits and analyze each one.

    Quotient and stabilizer orders are computed for orbits whose length is at
    most ``quotient_max_degree``; congruence verdicts (genus 1 only) for the
    supplied levels.
    """
    cache = ActionCache(table)
    perms = cache.standard_permutations()
    dec = mcg.orbits(table, perms)
    group = table.group
    classifications = mcg.classify_orbits(table, dec) if classify else None
    reports: list[OrbitReport] = []
    for orb in dec.orbits:
        rep = table.representative(orb.representative)
        fiber_name = group.names[table.mu(orb.representative).representative]
        report = OrbitReport(
            orbit_id=orb.id,
            representative=[[group.names[g], group.names[x]] for g, x in rep],
            length=orb.length,
            fiber=fiber_name,
        )
        if classifications is not None:
            cls = classifications[orb.id]
            report.torelli_trivial = cls.torelli_trivial
            report.symplectic = cls.symplectic
            report.power_tuple_invariant = cls.power_tuple_invariant
            report.model_matches = cls.model_matches
        if 1 < orb.length <= quotient_max_degree:
            quotient = orbit_quotient(table, dec, orb, cache, seed=seed, verify_mode=verify_mode)
            report.quotient_order = quotient.order
            report.stabilizer_order = permgroups.stabilizer_order(quotient, orb.length)
            if orb.length <= derived_index_max_degree:
                report.derived_index = permgroups.derived_subgroup_index(quotient)
            if cycle_types:
                report.generator_cycle_types = {
                    str(gen): [list(ct) for ct in permgroups.cycle_type(arr)]
                    for gen, arr in zip(
                        mcg.standard_generators(table.genus),
                        restrict_to_orbit(table, dec, orb, perms),
                    )
                }
            if congruence_levels and table.genus == 1:
                local = restrict_to_orbit(
                    table, dec, orb, [cache.perm(Generator("S", 1)), cache.perm(Generator("T", 1))]
                )
                report.congruence = permgroups.congruence_scan(local[0], local[1], congruence_levels)
        elif orb.length == 1:
            report.quotient_order = 1
            report.stabilizer_order = 1
        reports.append(report)
    return TableAnalysis(table, dec, cache, reports)


# ---------------------------------------------------------------------------
# DOT emitter (genus 1)


def dot_graph(table: ClassTable, fiber: Optional[int] = None, cache: Optional[ActionCache] = None) -> str:
    """Genus-1 action graph: dashed edges for T images, dotted for S images."""
    if table.genus != 1:
        raise GroupError("graphs are emitted for genus 1 only")
    cache = cache or ActionCache(table)
    group = table.group
    t_img = cache.perm(Generator("T", 1)).image
    s_img = cache.perm(Generator("S", 1)).image
    if fiber is None:
        indices = list(range(table.n_classes))
    else:
        indices = [int(v) for v in table.fiber_classes(fiber)]
    keep = set(indices)

    def label(i: int) -> str:
        ((g, x),) = table.representative(i)
        return f"({group.names[g]}|{group.names[x]})"

    lines = [f'digraph "{group.name}-genus1" {{']
    lines.append(f'  // schema={SCHEMA_VERSION}')
    lines.append("  node [shape=box];")
    for i in indices:
        lines.append(f'  n{i} [label="{label(i)}"];')
    for i in indices:
        if int(t_img[i]) in keep:
            lines.append(f"  n{i} -> n{int(t_img[i])} [style=dashed];")
        if int(s_img[i]) in keep:
            lines.append(f"  n{i} -> n{int(s_img[i])} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_report(analysis: TableAnalysis, fh) -> None:
    json.dump(analysis.to_json(), fh, indent=2)
    fh.write("\n")
