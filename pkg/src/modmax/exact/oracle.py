"""Exhaustive optimum and independent certificate checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..graph import GAMMA_ONE, ModularityValue, modularity_numerator, modularity_scale
from ..partition import ENUMERATION_LIMIT, PartitionError, canonicalize, enumerate_partitions
from .search import Certificate, OptimaSet, Status


def brute_force_optimum(g, params=GAMMA_ONE, limit=ENUMERATION_LIMIT):
    """Evaluate every set partition and keep all maximisers."""
    if g.n > limit:
        raise PartitionError(f"brute force is limited to n <= {limit} (got {g.n})")
    scale = modularity_scale(g, params)
    if g.n == 0:
        raise PartitionError("graph has no nodes")
    best = None
    winners = []
    count = 0
    for part in enumerate_partitions(g.n, limit=limit):
        count += 1
        num = modularity_numerator(g, part.membership, params)
        if best is None or num > best:
            best, winners = num, [part]
        elif num == best:
            winners.append(part)
    cert = Certificate(best=best, bound=best, scale=scale, nodes=count, mode="brute_force",
                       wall_time=0.0, status=Status.OPTIMAL, exhaustive=True,
                       bound_method="enumeration")
    return OptimaSet(ModularityValue(best, scale), tuple(winners), cert)


@dataclass
class VerificationReport:
    ok: bool = True
    failures: list = field(default_factory=list)

    def fail(self, msg):
        self.ok = False
        self.failures.append(msg)

    def __bool__(self):
        return self.ok


def verify_certificate(g, params, result):
    """Recompute every claimed optimum from scratch and check the certificate."""
    rep = VerificationReport()
    cert = result.certificate
    scale = modularity_scale(g, params)
    if result.q_star.scale != scale:
        rep.fail(f"scale {result.q_star.scale} does not match 4m^2q = {scale}")
    if not result.partitions:
        rep.fail("no partitions in result")
    seen = set()
    for idx, part in enumerate(result.partitions):
        memb = getattr(part, "membership", part)
        if len(memb) != g.n:
            rep.fail(f"partition {idx} covers {len(memb)} nodes, graph has {g.n}")
            continue
        num = modularity_numerator(g, memb, params)
        if num != result.q_star.numerator:
            rep.fail(f"partition {idx}: numerator mismatch {num} != {result.q_star.numerator}")
        key = canonicalize(memb).membership
        if key in seen:
            rep.fail(f"partition {idx} duplicates an earlier member")
        seen.add(key)
    if cert.best != result.q_star.numerator:
        rep.fail("certificate best differs from q_star")
    if cert.bound < cert.best:
        rep.fail(f"bound {cert.bound} below best {cert.best}")
    if cert.status is Status.OPTIMAL and cert.bound != cert.best:
        rep.fail("status OPTIMAL but bound and best differ")
    if cert.status is not Status.OPTIMAL and cert.exhaustive:
        rep.fail("incomplete search flagged exhaustive")
    return rep
