"""Array topologies of trimerized chains coupled through their A/C edges.

A chain of length L (L divisible by 3) is a line of sites l = 1..L.  Site 1 is
the A edge, site L the C edge.  Chains are joined only through these edges and
every inter-chain bond must connect one A edge to one C edge.  Sites are mapped
to a flat basis index by listing chains in ascending id and sites in ascending
l within each chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class TopologyError(ValueError):
    """Raised when chains or couplings violate the construction rules."""


EDGE_A = "A"
EDGE_C = "C"


@dataclass(frozen=True)
class ChainSpec:
    """One trimerized chain: id, number of sites and modulation phase."""

    id: int
    length: int
    theta: float = math.pi / 3

    def __post_init__(self):
        if self.id < 1:
            raise TopologyError(f"chain id must be >= 1, got {self.id}")
        if self.length < 3 or self.length % 3 != 0:
            raise TopologyError(
                f"chain {self.id}: length must be a positive multiple of 3, got {self.length}"
            )

    @property
    def n_trimers(self) -> int:
        return self.length // 3


@dataclass(frozen=True)
class EdgeCoupling:
    """Bond of strength K between an edge of one chain and an edge of another."""

    chain_a: int
    edge_a: str
    chain_b: int
    edge_b: str
    strength: float = 1.0

    def __post_init__(self):
        if self.chain_a == self.chain_b:
            raise TopologyError(f"coupling on chain {self.chain_a} is a self-loop")
        for edge in (self.edge_a, self.edge_b):
            if edge not in (EDGE_A, EDGE_C):
                raise TopologyError(f"edge label must be 'A' or 'C', got {edge!r}")
        if self.edge_a == self.edge_b:
            raise TopologyError(
                f"{self.edge_a} edge coupled to {self.edge_b} edge "
                f"(chains {self.chain_a}, {self.chain_b}); couplings must join A to C"
            )

    def key(self) -> frozenset:
        """Unordered identity of the physical link."""
        return frozenset([(self.chain_a, self.edge_a), (self.chain_b, self.edge_b)])


@dataclass(frozen=True)
class RegionSpec:
    """Named set of flat site indices used for population bookkeeping."""

    name: str
    sites: frozenset[int]

    @staticmethod
    def from_chains(name: str, topology: "ArrayTopology", chain_ids) -> "RegionSpec":
        sites = []
        for mu in chain_ids:
            chain = topology.chain(mu)
            sites.extend(topology.flatten(mu, l) for l in range(1, chain.length + 1))
        return RegionSpec(name, frozenset(sites))


@dataclass(frozen=True)
class ArrayTopology:
    """Validated, immutable array of chains plus edge couplings."""

    chains: tuple[ChainSpec, ...]
    couplings: tuple[EdgeCoupling, ...]
    _offsets: dict[int, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        offset = 0
        for chain in self.chains:
            self._offsets[chain.id] = offset
            offset += chain.length

    @property
    def n_sites(self) -> int:
        return sum(c.length for c in self.chains)

    @property
    def n_trimers(self) -> int:
        return sum(c.n_trimers for c in self.chains)

    def chain(self, mu: int) -> ChainSpec:
        for c in self.chains:
            if c.id == mu:
                return c
        raise TopologyError(f"no chain with id {mu}")

    def flatten(self, mu: int, l: int) -> int:
        """Flat basis index of site l (1-based) of chain mu."""
        chain = self.chain(mu)
        if not 1 <= l <= chain.length:
            raise TopologyError(f"site {l} out of range for chain {mu} (length {chain.length})")
        return self._offsets[mu] + (l - 1)

    def unflatten(self, i: int) -> tuple[int, int]:
        """Inverse of :meth:`flatten`."""
        for chain in self.chains:
            start = self._offsets[chain.id]
            if start <= i < start + chain.length:
                return chain.id, i - start + 1
        raise TopologyError(f"flat index {i} out of range (N={self.n_sites})")

    def edge_site(self, mu: int, edge: str) -> int:
        """Flat index of the A (site 1) or C (site L) edge of chain mu."""
        chain = self.chain(mu)
        return self.flatten(mu, 1 if edge == EDGE_A else chain.length)

    def bonds(self) -> list[tuple[int, int, float]]:
        """All bonds as (i, j, amplitude) with i < j: intra-chain J=1 plus couplings."""
        out = []
        for chain in self.chains:
            for l in range(1, chain.length):
                out.append((self.flatten(chain.id, l), self.flatten(chain.id, l + 1), 1.0))
        for cpl in self.couplings:
            i = self.edge_site(cpl.chain_a, cpl.edge_a)
            j = self.edge_site(cpl.chain_b, cpl.edge_b)
            out.append((min(i, j), max(i, j), cpl.strength))
        return out

    def site_phases(self, b: float) -> "list[float]":
        """Spatial part of the modulation phase, 2*pi*(l-1)*b + theta_mu, per flat site."""
        phases = []
        for chain in self.chains:
            for l in range(1, chain.length + 1):
                phases.append(2.0 * math.pi * (l - 1) * b + chain.theta)
        return phases


def build_topology(chains, couplings) -> ArrayTopology:
    """Validate chains and couplings and return an immutable topology."""
    chains = tuple(chains)
    couplings = tuple(couplings)
    ids = [c.id for c in chains]
    if len(set(ids)) != len(ids):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise TopologyError(f"duplicate chain ids {dupes}")
    known = set(ids)
    seen = set()
    for cpl in couplings:
        for mu in (cpl.chain_a, cpl.chain_b):
            if mu not in known:
                raise TopologyError(f"coupling references unknown chain {mu}")
        if cpl.key() in seen:
            raise TopologyError(
                f"duplicate coupling between ({cpl.chain_a},{cpl.edge_a}) "
                f"and ({cpl.chain_b},{cpl.edge_b})"
            )
        seen.add(cpl.key())
    return ArrayTopology(chains, couplings)


def fig1c_topology(theta: float = math.pi / 3) -> ArrayTopology:
    """Seven chains of six sites in the branching layout 1 -> {2,3}, 2 -> {4,6}, 3 -> {5,7}.

    Every link joins the C edge of the upstream chain to the A edge of the
    downstream chain with strength K = J = 1.
    """
    chains = [ChainSpec(mu, 6, theta) for mu in range(1, 8)]
    links = [(1, 2), (1, 3), (3, 5), (3, 7), (2, 6), (2, 4)]
    couplings = [EdgeCoupling(up, EDGE_C, down, EDGE_A, 1.0) for up, down in links]
    return build_topology(chains, couplings)


def bethe_topology(depth: int, length: int = 6, theta: float = math.pi / 3) -> ArrayTopology:
    """Tree of chains whose junction graph is a Bethe lattice with coordination 3.

    Each link of the tree is one chain; every junction joins exactly one C edge
    to two A edges.  ``depth`` counts link generations: depth 1 is the central
    junction with its three chains, each further generation adds two chains at
    the outer end of every chain of the previous generation.
    """
    if depth < 1:
        raise TopologyError(f"depth must be >= 1, got {depth}")
    chains: list[ChainSpec] = []
    couplings: list[EdgeCoupling] = []
    next_id = 1

    def new_chain() -> int:
        nonlocal next_id
        chains.append(ChainSpec(next_id, length, theta))
        next_id += 1
        return next_id - 1

    # (chain id, edge presented at its outer junction, generation)
    frontier: list[tuple[int, str, int]] = []

    # Central junction: chain 1 presents its C edge, chains 2 and 3 their A edges.
    root = new_chain()
    for _ in range(2):
        child = new_chain()
        couplings.append(EdgeCoupling(root, EDGE_C, child, EDGE_A, 1.0))
        frontier.append((child, EDGE_C, 1))
    # The free end of the root chain grows outward too (its A edge).
    frontier.append((root, EDGE_A, 1))

    while frontier:
        mu, edge, gen = frontier.pop(0)
        if gen >= depth:
            continue
        if edge == EDGE_C:
            # this chain supplies the junction's C edge; two children supply A edges
            for _ in range(2):
                child = new_chain()
                couplings.append(EdgeCoupling(mu, EDGE_C, child, EDGE_A, 1.0))
                frontier.append((child, EDGE_C, gen + 1))
        else:
            # this chain supplies an A edge; one child supplies the junction's C
            # edge, the other the second A edge
            c_child = new_chain()
            a_child = new_chain()
            couplings.append(EdgeCoupling(c_child, EDGE_C, mu, EDGE_A, 1.0))
            couplings.append(EdgeCoupling(c_child, EDGE_C, a_child, EDGE_A, 1.0))
            frontier.append((c_child, EDGE_A, gen + 1))
            frontier.append((a_child, EDGE_C, gen + 1))
    return build_topology(chains, couplings)
