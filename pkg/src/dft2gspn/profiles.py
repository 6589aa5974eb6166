"""The five selectable semantics, expressed as net-level knobs.

Every profile uses the same net structure; they differ only in how the
per-node priority variables are constrained, how immediate transitions are
partitioned, which spare claiming discipline applies by default, and which
tree features they accept at all.
"""

from __future__ import annotations

from dataclasses import dataclass


# Failure propagation ordering.
BOTTOM_UP = "bottom-up"          # gate priority strictly below its children
ARBITRARY = "arbitrary"          # every node shares one priority

# Dependency forwarding relative to gate evaluation.
FDEP_FIRST = "first"
FDEP_LAST = "last"
FDEP_INTERLEAVED = "interleaved"
FDEP_LOCAL = "local"             # trigger >= dependency >= dependents

# Partitioning of immediate transitions.
ALL_IN_ONE = "all-in-one"
SINGLETONS = "singletons"

# Spare claiming disciplines.
CLAIM_EARLY = "early"
CLAIM_LATE = "late"
CLAIM_LATE_EARLY_FAIL = "late-early-fail"

ORDERED = "ordered"
ARBITRARY_ORDER = "arbitrary"

# Feature keys used by the per-profile support matrix.
SHARE_SPARES = "share-spares"
SPARE_SUBTREE = "spare-with-subtree"
SHARED_PRIMARY = "shared-primary"
POR_GATES = "por-gates"
DOWNWARD_DEPS = "downward-dependencies"
PROBABILISTIC_DEPS = "probabilistic-dependencies"


@dataclass(frozen=True)
class SemanticsProfile:
    name: str
    propagation: str                 # BOTTOM_UP or ARBITRARY
    fdep_order: str                  # FDEP_FIRST / FDEP_LAST / FDEP_INTERLEAVED / FDEP_LOCAL
    static_nonstrict: bool           # AND/OR children only need >= instead of >
    partitioning: str                # ALL_IN_ONE or SINGLETONS
    default_claim_mode: str          # CLAIM_EARLY or CLAIM_LATE
    literature_variant: str          # priority-gate variant the original tool used
    supports: frozenset

    def supports_feature(self, feature: str) -> bool:
        return feature in self.supports


MONOLITHIC_CTMC = SemanticsProfile(
    name="monolithic-ctmc",
    propagation=BOTTOM_UP,
    fdep_order=FDEP_FIRST,
    static_nonstrict=False,
    partitioning=ALL_IN_ONE,
    default_claim_mode=CLAIM_EARLY,
    literature_variant="inclusive",
    supports=frozenset({SHARE_SPARES}),
)

IOIMC = SemanticsProfile(
    name="ioimc",
    propagation=ARBITRARY,
    fdep_order=FDEP_INTERLEAVED,
    static_nonstrict=False,
    partitioning=SINGLETONS,
    default_claim_mode=CLAIM_LATE,
    literature_variant="exclusive",
    supports=frozenset({SHARE_SPARES, SPARE_SUBTREE, SHARED_PRIMARY}),
)

MONOLITHIC_MA = SemanticsProfile(
    name="monolithic-ma",
    propagation=BOTTOM_UP,
    fdep_order=FDEP_LAST,
    static_nonstrict=False,
    partitioning=SINGLETONS,
    default_claim_mode=CLAIM_EARLY,
    literature_variant="inclusive",
    supports=frozenset(
        {SHARE_SPARES, SPARE_SUBTREE, POR_GATES, PROBABILISTIC_DEPS}
    ),
)

ORIGINAL_GSPN = SemanticsProfile(
    name="gspn-orig",
    propagation=ARBITRARY,
    fdep_order=FDEP_INTERLEAVED,
    static_nonstrict=False,
    partitioning=ALL_IN_ONE,
    default_claim_mode=CLAIM_EARLY,
    literature_variant="exclusive",
    supports=frozenset(),
)

NEW_GSPN = SemanticsProfile(
    name="gspn-new",
    propagation=BOTTOM_UP,
    fdep_order=FDEP_LOCAL,
    static_nonstrict=True,
    partitioning=SINGLETONS,
    default_claim_mode=CLAIM_EARLY,
    literature_variant="both",
    supports=frozenset(
        {
            SHARE_SPARES,
            SPARE_SUBTREE,
            SHARED_PRIMARY,
            POR_GATES,
            DOWNWARD_DEPS,
            PROBABILISTIC_DEPS,
        }
    ),
)

# Fixed presentation order, also used by the differential report.
PROFILES = (MONOLITHIC_CTMC, IOIMC, MONOLITHIC_MA, ORIGINAL_GSPN, NEW_GSPN)

_ALIASES = {
    "monolithic-ctmc": MONOLITHIC_CTMC,
    "monolithicctmc": MONOLITHIC_CTMC,
    "ioimc": IOIMC,
    "monolithic-ma": MONOLITHIC_MA,
    "monolithicma": MONOLITHIC_MA,
    "gspn-orig": ORIGINAL_GSPN,
    "originalgspn": ORIGINAL_GSPN,
    "gspn-new": NEW_GSPN,
    "newgspn": NEW_GSPN,
}


def profile_by_name(name: str) -> SemanticsProfile:
    key = name.strip().lower().replace("_", "-")
    try:
        return _ALIASES[key]
    except KeyError:
        known = ", ".join(p.name for p in PROFILES)
        raise KeyError(f"unknown semantics profile {name!r} (known: {known})") from None
