"""
The check suite behind ``cli.py check`` and ``/api/check``.

Every section produces a Report. A failed identity raised while a
structure is built becomes a failure of its section, so one broken
identity does not hide the others.
"""

import logging
import random
from contextlib import contextmanager
from typing import Dict, Iterator, List, Optional, Tuple, Union

from .cdga import PDModel, cohomology_dimensions, flip_orientation, mu_A, theta, validate
from .exceptions import ChainIdentityError, LoopBVError
from .hochschild import build_chain_complex, build_cochain_complex, filtration_report, gerstenhaber_report, hh_algebra
from .model_service import ModelPair
from .report import Report
from .stringtop import (
    LoopAlgebra,
    bracket_transport_report,
    loop_algebra,
    phi,
    phi_filtration_report,
    transport_to_hh,
    verify_bv,
)
from .sullivan import (
    SullivanModel,
    build_free_loop_model,
    f_map_report,
    hodge_shift_report,
    hodge_table,
    product_filtration_report,
)

logger = logging.getLogger(__name__)

GERSTENHABER_SAMPLES = 12


@contextmanager
def section(report: Report, name: str) -> Iterator[Report]:
    """Record exceptions raised while building a structure as failures of the report"""
    try:
        yield report
    except ChainIdentityError as e:
        logger.warning("%s: %s", report.title, e)
        report.fail(e.identity, str(e.witness), e.detail)
    except LoopBVError as e:
        logger.warning("%s: %s", report.title, e)
        report.fail(name, "", str(e))


def validation_report(model: Union[PDModel, SullivanModel]) -> Report:
    kind = "sullivan" if isinstance(model, SullivanModel) else "pd-cdga"
    report = Report(f"validation of {model.name} ({kind})")
    report.ran("model axioms")
    for violation in validate(model):
        report.fail(violation.axiom, ", ".join(violation.witness), violation.detail)
    return report


def cochain_bound(p: PDModel, N: int) -> int:
    """Cochain degrees ≥ -(N - m) carry the transport of ℍ_{≤ N - m}"""
    return max(N - p.dimension, 0)


def hochschild_report(p: PDModel, N: int) -> Report:
    """∂∘∂, B∘B, B∂ + ∂B, δ∘δ and the word-length filtration"""
    report = Report(f"Hochschild identities for {p.name} through degree {N}")
    with section(report, "Hochschild chains"):
        h = build_chain_complex(p, N)
        report.ran("∂∘∂ = 0")
        h.connes
        report.ran("B∘B = 0")
        report.ran("B∂ + ∂B = 0")
        filtration_report(h, report)
    with section(report, "Hochschild cochains"):
        build_cochain_complex(p, cochain_bound(p, N))
        report.ran("δ∘δ = 0")
    return report


def duality_report(p: PDModel, N: int) -> Report:
    """θ, μ_A and Φ as chain maps"""
    report = Report(f"duality maps for {p.name} through degree {N}")
    with section(report, "duality maps"):
        theta(p)
        report.ran("θ is a chain isomorphism")
        mu = mu_A(p)
        report.ran("μ_A is a bimodule chain map")
        phimap = phi(build_chain_complex(p, N), mu)
        report.ran("Φ is a chain map")
        phi_filtration_report(phimap, report)
    return report


def loop_report(p: PDModel, N: int, seed: int = 0) -> Tuple[List[Report], Optional[LoopAlgebra]]:
    """BV axioms, their robustness under ∫ ↦ -∫, the transport and the Gerstenhaber sample"""
    reports: List[Report] = []
    m = p.dimension
    if N < m:
        skipped = Report(f"loop algebra of {p.name}")
        skipped.fail("degree bound covers the unit", str(N), f"needs N ≥ {m}")
        return [skipped], None

    la = None
    bv = Report(f"BV axioms for {p.name} through degree {N}")
    with section(bv, "loop algebra"):
        la = loop_algebra(p, N)
        bv.extend(verify_bv(la))
    reports.append(bv)

    flipped = Report(f"BV axioms for {p.name} with ∫ ↦ -∫")
    with section(flipped, "loop algebra"):
        flipped.extend(verify_bv(loop_algebra(flip_orientation(p), N)))
    reports.append(flipped)

    hh = None
    gerstenhaber = Report(f"Gerstenhaber structure for {p.name} (seed {seed})")
    with section(gerstenhaber, "Hochschild cochains"):
        hh = hh_algebra(p, cochain_bound(p, N))
        labels = [label for names in hh.labels.values() for label in names]
        rng = random.Random(seed)
        samples = [tuple(rng.choice(labels) for _ in range(3)) for _ in range(GERSTENHABER_SAMPLES)] if labels else []
        gerstenhaber_report(hh, samples, gerstenhaber)

    if la is not None and hh is not None:
        transport = Report(f"loop product vs cup product for {p.name} through degree {N}")
        with section(transport, "transport"):
            transport.extend(transport_to_hh(p, N, la, hh))
        reports.append(transport)
        brackets = Report(f"BV bracket vs Gerstenhaber bracket for {p.name} through degree {N}")
        with section(brackets, "transport"):
            brackets.extend(bracket_transport_report(p, N, la, hh))
        reports.append(brackets)
    reports.append(gerstenhaber)
    return reports, la


def sullivan_reports(s: SullivanModel, N: int, pd: Optional[PDModel] = None) -> List[Report]:
    """d̄∘d̄, S identities, the Hodge splitting, the comparison map f and the weight shift"""
    free_report = Report(f"free loop model of {s.name} through degree {N}")
    reports = [free_report]
    with section(free_report, "free loop model"):
        free = build_free_loop_model(s, N)
        free_report.ran("d̄∘d̄ = 0")
        free.s_map
        free_report.ran("S∘S = 0")
        free_report.ran("S d̄ + d̄ S = 0")
        table = hodge_table(free, N)
        for n, total in table.totals.items():
            free_report.expect(
                "Hodge pieces sum to the whole", table.row_sums()[n] == total, f"degree {n}",
                f"{table.row_sums()[n]} vs {total}",
            )
        shift = Report(f"Hodge weight shift for {s.name} through degree {N}")
        with section(shift, "weight shift"):
            shift.extend(hodge_shift_report(free, N, pd))
        reports.append(shift)
    comparison = Report(f"comparison map f for {s.name} through degree {N}")
    with section(comparison, "comparison map"):
        f_map_report(s, N, comparison)
    reports.append(comparison)
    return reports


def betti_comparison(p: PDModel, s: SullivanModel, N: int) -> Tuple[Dict[int, Tuple[int, int]], Report]:
    """Per-degree dim H^n(LM) from both pipelines"""
    report = Report(f"Betti numbers of L{p.name}: Hochschild vs Sullivan through degree {N}")
    hochschild = build_chain_complex(p, N).betti()
    table = hodge_table(build_free_loop_model(s, N), N)
    rows = {}
    for n in range(0, N + 1):
        rows[n] = (hochschild[n], table.totals[n])
        report.expect("both pipelines agree", hochschild[n] == table.totals[n], f"degree {n}", f"{rows[n][0]} vs {rows[n][1]}")
    return rows, report


def base_cohomology_check(p: PDModel, s: SullivanModel, N: int) -> Report:
    """H^n_[0](LM) agrees with H^n(M)"""
    report = Report(f"weight-zero Hodge column of L{p.name} vs H*({p.name})")
    table = hodge_table(build_free_loop_model(s, N), N)
    base = cohomology_dimensions(p)
    for n in range(0, N + 1):
        expected = base.get(n, 0)
        report.expect("H_[0] is the cohomology of the base", table.dim(n, 0) == expected, f"degree {n}",
                      f"{table.dim(n, 0)} vs {expected}")
    return report


def run_checks(model: Union[ModelPair, PDModel, SullivanModel], N: int, seed: int = 0) -> List[Report]:
    """Every identity of every module on the given model through degree N"""
    pair = model if isinstance(model, ModelPair) else ModelPair.of(model)
    pd, sullivan = pair.pd, pair.sullivan

    reports: List[Report] = []
    for candidate in (pd, sullivan):
        if candidate is not None:
            reports.append(validation_report(candidate))
    if not all(r.passed for r in reports):
        return reports

    la = None
    if pd is not None:
        reports.append(hochschild_report(pd, N))
        reports.append(duality_report(pd, N))
        loop_reports, la = loop_report(pd, N, seed)
        reports.extend(loop_reports)
    if sullivan is not None:
        reports.extend(sullivan_reports(sullivan, N, pd))
    if pd is not None and sullivan is not None:
        cross = Report(f"cross-pipeline checks for {pd.name} through degree {N}")
        with section(cross, "cross-pipeline"):
            cross.extend(betti_comparison(pd, sullivan, N)[1])
            cross.extend(base_cohomology_check(pd, sullivan, N))
        reports.append(cross)
        if la is not None:
            weights = Report(f"loop product vs Hodge weights for {pd.name} through degree {N}")
            with section(weights, "product filtration"):
                weights.extend(product_filtration_report(pd, sullivan, N, dict(pair.formality) or None, la))
            reports.append(weights)
    passed = sum(1 for r in reports if r.passed)
    logger.info("check suite for %s through degree %d: %d/%d reports passed", pair.name, N, passed, len(reports))
    return reports
