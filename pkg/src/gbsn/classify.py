"""Top-level verdicts: quasi-isometry subclass, analytic properties,
pairwise comparison, and equivariant Lp-compression exponents.

The quasi-isometry trichotomy for groups whose tree has infinitely many ends:
(2a) semidirect products Z^n x| F with F a free subgroup of GL_n(Z) --
detected through unimodular inclusions and integral discrete holonomy;
(2b) virtually ascending HNN extensions -- exactly the amenable ones,
detected in the literal single-loop ascending form; (2c) everything else,
a single quasi-isometry class within a Hausdorff equivalence class of
holonomy. The Haagerup property, weak amenability and the Cowling-Haagerup
constant are all decided by amenability of the closure of the holonomy
image, which for subgroups of GL_2(R) is equivalent to virtual solvability;
the equivalence of the four properties makes the reports self-consistent by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .gog import GoGSpec, bass_serre_degrees, ensure_valid, underlying_rank
from .holonomy import HolonomyData, compute_holonomy, non_discreteness_witness
from .linalg import QMat, spectral_radius_gt_one, sublattice_index
from .matgroups import (
    TitsResult,
    cartan_hausdorff_samples,
    closure_describe,
    coarse_density,
    verify_certificate,
    virtually_solvable,
)
from .words import Word

Q = Fraction


@dataclass(frozen=True)
class Evidence:
    label: str
    detail: str
    payload: object = field(default=None, compare=False)


@dataclass(frozen=True)
class ClassificationReport:
    ends: str
    amenable: Optional[bool]
    amenable_reason: str
    whyte_case: str  # '2a' | '2b' | '2c' | 'out-of-scope(ends)' | 'undetermined'
    haagerup: Optional[bool]
    weakly_amenable: Optional[bool]
    cowling_haagerup: str  # '1' | 'not-weakly-amenable' | 'undetermined'
    evidence: tuple = ()

    def decided(self) -> bool:
        return self.whyte_case != "undetermined" and self.haagerup is not None


def _tri(value: Optional[bool]) -> str:
    return {True: "yes", False: "no", None: "undetermined"}[value]


def _stable_letter_relation(hd: HolonomyData, max_len: int = 6) -> Optional[Word]:
    """Shortest nontrivial reduced stable-letter word with identity image."""
    names = sorted(hd.stable)
    steps = []
    for name in names:
        steps.append(((name, 1), hd.stable[name]))
        steps.append(((name, -1), hd.stable[name].inverse()))
    identity = QMat.identity(hd.rank)
    frontier = [(Word(), identity)]
    for _ in range(max_len):
        nxt = []
        for w, m in frontier:
            for letter, mat in steps:
                w2 = w * Word([letter])
                if len(w2) != len(w) + 1:
                    continue
                m2 = m * mat
                if m2 == identity:
                    return w2
                nxt.append((w2, m2))
        frontier = nxt
    return None


def whyte_classify(
    spec: GoGSpec,
    witness_epsilon=Q(1, 1000),
    witness_max_length: int = 11,
) -> ClassificationReport:
    """Ends, amenability, and the quasi-isometry subclass of the group."""
    ensure_valid(spec)
    local = bass_serre_degrees(spec)
    evidence = [
        Evidence(
            "bass-serre-degrees",
            ", ".join(f"{v}: {d}" for v, d in sorted(local.degrees.items()))
            + f"; ends: {local.ends}",
            local,
        )
    ]
    if local.ends != "infinitely-many-ends":
        return ClassificationReport(
            local.ends,
            None,
            "not decided: the trichotomy applies to trees with infinitely many ends",
            "out-of-scope(ends)",
            None,
            None,
            "undetermined",
            tuple(evidence),
        )

    rank = underlying_rank(spec)
    evidence.append(Evidence("underlying-rank", f"#edges - #vertices + 1 = {rank}"))
    amenable: Optional[bool]
    if rank >= 2:
        amenable = False
        reason = (
            f"killing all vertex generators leaves a free group of rank {rank} >= 2"
        )
    elif rank == 1:
        loop = spec.loop_edges()[0]
        ia, io = sublattice_index(loop.alpha), sublattice_index(loop.omega)
        if len(spec.vertices) == 1 and (ia == 1 or io == 1):
            amenable = True
            reason = f"ascending HNN extension (edge indices {ia} and {io})"
        elif ia >= 2 and io >= 2:
            amenable = False
            reason = (
                f"HNN extension with both edge inclusions proper "
                f"(indices {ia}, {io}) contains a free subgroup"
            )
        else:
            amenable = None
            reason = (
                "virtually-ascending detection beyond the single-loop form "
                "is not implemented"
            )
    else:
        # rank 0 (a tree of groups): left out of scope by the degree-based
        # classification even though the ends count says infinitely many
        return ClassificationReport(
            local.ends,
            None,
            "not decided: amalgams (no stable letters) are outside the decision scope",
            "out-of-scope(ends)",
            None,
            None,
            "undetermined",
            tuple(evidence),
        )
    evidence.append(Evidence("amenability", f"{_tri(amenable)}: {reason}"))

    if amenable is True:
        whyte = "2b"
        evidence.append(
            Evidence("whyte-case", "2b: virtually ascending HNN extensions are the amenable ones")
        )
    elif amenable is False:
        hd = compute_holonomy(spec)
        unimodular = all(
            sublattice_index(e.alpha) == 1 and sublattice_index(e.omega) == 1
            for e in spec.edges
        )
        if unimodular:
            relation = _stable_letter_relation(hd)
            if relation is None:
                whyte = "2a"
                evidence.append(
                    Evidence(
                        "whyte-case",
                        "2a: unimodular inclusions, holonomy in GL_n(Z) (discrete), "
                        "no stable-letter relation up to length 6",
                    )
                )
            else:
                whyte = "undetermined"
                evidence.append(
                    Evidence(
                        "whyte-case",
                        f"ambiguous 2a form: holonomy kills the stable-letter word {relation}",
                        relation,
                    )
                )
        else:
            witness = non_discreteness_witness(hd, witness_epsilon, witness_max_length)
            if witness.kind == "witness":
                whyte = "2c"
                evidence.append(
                    Evidence(
                        "non-discreteness-witness",
                        f"word {witness.word} has image within {witness_epsilon} of the "
                        "identity (exact entrywise comparison)",
                        witness,
                    )
                )
                evidence.append(
                    Evidence("whyte-case", "2c: nonamenable with non-discrete holonomy image")
                )
            elif witness.kind == "discrete (integral)":
                whyte = "undetermined"
                evidence.append(
                    Evidence(
                        "whyte-case",
                        "holonomy image is integral-discrete but inclusions are not "
                        "unimodular; the 2a form is not established",
                    )
                )
            else:
                whyte = "undetermined"
                evidence.append(
                    Evidence(
                        "whyte-case",
                        f"no non-discreteness witness within word length {witness_max_length}; "
                        "bounded search only",
                    )
                )
    else:
        whyte = "undetermined"

    return ClassificationReport(
        local.ends,
        amenable,
        reason,
        whyte,
        None,
        None,
        "undetermined",
        tuple(evidence),
    )


def cv_properties(spec: GoGSpec) -> ClassificationReport:
    """Haagerup property, weak amenability and the Cowling-Haagerup constant.

    All three are decided together by virtual solvability of the holonomy
    image (equivalently, amenability of its closure in GL_n(R)); the
    attached certificate re-verifies exactly before it is reported.
    """
    ensure_valid(spec)
    hd = compute_holonomy(spec)
    names = sorted(hd.stable)
    gens = [hd.stable[n] for n in names]
    evidence = []
    if not gens:
        result = TitsResult(True, None, "trivial holonomy image")
    else:
        result = virtually_solvable(gens, names)
    if result.certificate is not None:
        ok = verify_certificate(gens, result.certificate, names)
        if not ok:
            raise AssertionError("certificate failed re-verification")
        evidence.append(
            Evidence(
                f"tits-certificate ({result.certificate.kind()})",
                result.detail + "; re-verified exactly",
                result.certificate,
            )
        )
    else:
        evidence.append(Evidence("tits-alternative", result.detail))
    verdict = result.virtually_solvable
    cowling = {True: "1", False: "not-weakly-amenable", None: "undetermined"}[verdict]
    return ClassificationReport(
        "",
        None,
        "",
        "",
        verdict,
        verdict,
        cowling,
        tuple(evidence),
    )


def classify(
    spec: GoGSpec,
    witness_epsilon=Q(1, 1000),
    witness_max_length: int = 11,
) -> ClassificationReport:
    """Combined report: Whyte subclass plus the holonomy-closure properties."""
    w = whyte_classify(spec, witness_epsilon, witness_max_length)
    c = cv_properties(spec)
    return ClassificationReport(
        w.ends,
        w.amenable,
        w.amenable_reason,
        w.whyte_case,
        c.haagerup,
        c.weakly_amenable,
        c.cowling_haagerup,
        w.evidence + c.evidence,
    )


@dataclass(frozen=True)
class QIVerdict:
    verdict: str  # 'quasi-isometric' | 'not-quasi-isometric' | 'undetermined'
    reasons: tuple
    sampled: bool = False
    evidence: tuple = ()


def qi_compare(a: GoGSpec, b: GoGSpec) -> QIVerdict:
    """Compare two specs up to quasi-isometry.

    Exact positive path: both of class (2c) with both holonomy images
    coarsely dense in SL_2(R) -- then both are Hausdorff equivalent to
    SL_2(R) itself and (2c) is a single quasi-isometry class. Exact negative
    path: the quasi-isometry-invariant data (amenability, subclass) differ.
    A sampled Cartan comparison provides labeled evidence otherwise.
    """
    ensure_valid(a)
    ensure_valid(b)
    if a.rank != b.rank:
        raise ValueError("dimension mismatch: specs have different ranks")
    ra, rb = classify(a), classify(b)
    reasons = [
        f"first: case {ra.whyte_case}, amenable {_tri(ra.amenable)}",
        f"second: case {rb.whyte_case}, amenable {_tri(rb.amenable)}",
    ]
    if ra.amenable is not None and rb.amenable is not None and ra.amenable != rb.amenable:
        reasons.append("amenability is a quasi-isometry invariant and differs")
        return QIVerdict("not-quasi-isometric", tuple(reasons))
    cases = {ra.whyte_case, rb.whyte_case}
    if cases <= {"2a", "2b", "2c"} and ra.whyte_case != rb.whyte_case:
        reasons.append("the subclasses are quasi-isometry invariant and differ")
        return QIVerdict("not-quasi-isometric", tuple(reasons))
    if ra.whyte_case == rb.whyte_case == "2c":
        hda, hdb = compute_holonomy(a), compute_holonomy(b)
        gens_a = [hda.stable[n] for n in sorted(hda.stable)]
        gens_b = [hdb.stable[n] for n in sorted(hdb.stable)]
        if a.rank == 2:
            cda = coarse_density(gens_a, sorted(hda.stable))
            cdb = coarse_density(gens_b, sorted(hdb.stable))
            if cda.verdict == cdb.verdict == "coarsely-dense":
                reasons.append(
                    "both holonomy images are coarsely dense in SL_2(R), hence "
                    "Hausdorff equivalent; class (2c) within a Hausdorff class is a "
                    "single quasi-isometry class"
                )
                return QIVerdict(
                    "quasi-isometric",
                    tuple(reasons),
                    sampled=cda.sampled or cdb.sampled,
                    evidence=(cda, cdb),
                )
        samples = cartan_hausdorff_samples(gens_a, gens_b, radii=(4, 6, 8))
        if samples and all(dist <= 1.0 for _, dist in samples):
            reasons.append(
                "sampled Cartan value sets stay Hausdorff-close at radii "
                + ", ".join(str(r) for r, _ in samples)
                + " (sampled evidence, not a proof)"
            )
            return QIVerdict("quasi-isometric", tuple(reasons), sampled=True, evidence=tuple(samples))
        reasons.append("no exact Hausdorff-equivalence evidence within bounds")
        return QIVerdict("undetermined", tuple(reasons), evidence=tuple(samples))
    if ra.whyte_case == rb.whyte_case == "2b":
        reasons.append(
            "both are ascending HNN extensions; their finer comparison is not implemented"
        )
        return QIVerdict("undetermined", tuple(reasons))
    reasons.append("comparison undetermined for these subclasses")
    return QIVerdict("undetermined", tuple(reasons))


@dataclass(frozen=True)
class CompressionReport:
    """Equivariant Lp-compression exponent report.

    alpha_kind is 'value' (alpha holds max(1/p, 1/2)), 'zero', or
    'undetermined'. The checklist records the three conditions behind the
    positive formula: amenable holonomy closure, closure cocompact in a
    closed connected subgroup (established in the triangular case through a
    nontrivial cyclic diagonal value group), and an exponential-distortion
    witness (a holonomy generator with spectral radius > 1).
    """

    p: Q
    alpha_kind: str
    alpha: Optional[Q]
    checklist: tuple
    detail: str = ""


def compression_report(spec: GoGSpec, p) -> CompressionReport:
    p = Q(p)
    if p < 1:
        raise ValueError("p must be >= 1")
    ensure_valid(spec)
    if spec.rank != 2:
        return CompressionReport(
            p, "undetermined", None, (), "compression decision implemented for rank 2"
        )
    cv = cv_properties(spec)
    if cv.haagerup is False:
        if p <= 2:
            return CompressionReport(
                p,
                "zero",
                Q(0),
                (("haagerup", "no"),),
                "no Haagerup property: a positive exponent would give a proper "
                "affine isometric action on L^p with 1 <= p <= 2",
            )
        return CompressionReport(
            p,
            "undetermined",
            None,
            (("haagerup", "no"),),
            "the vanishing argument applies to 1 <= p <= 2 only",
        )
    if cv.haagerup is None:
        return CompressionReport(p, "undetermined", None, (), "holonomy decision undetermined")

    hd = compute_holonomy(spec)
    names = sorted(hd.stable)
    gens = [hd.stable[n] for n in names]
    desc = closure_describe(gens, names)
    cocompact = desc.status == "triangular" and desc.diag_kind == "cyclic"
    distortion = any(spectral_radius_gt_one(g) for g in gens)
    checklist = (
        ("amenable-closure", "yes"),
        (
            "cocompact-in-connected-subgroup",
            "yes (diagonal value group is infinite cyclic; closure cocompact in "
            "the upper triangular subgroup)" if cocompact else "not established",
        ),
        (
            "exponential-distortion-witness",
            "yes (a holonomy generator has spectral radius > 1)"
            if distortion
            else "not established",
        ),
    )
    if cocompact and distortion:
        return CompressionReport(p, "value", max(1 / p, Q(1, 2)), checklist)
    return CompressionReport(
        p, "undetermined", None, checklist, "positive-exponent conditions not established"
    )
