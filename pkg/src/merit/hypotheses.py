"""Enumeration of null/alternative dose-rate configurations.

With J ordered doses and elicited rate pairs, every hypothesis assigns
each dose one of four (toxicity, efficacy) rate combinations, subject to
monotone nondecreasing rates across doses:

* null ``H0(s, k)``: doses 1..s safe-futile, s+1..k toxic-futile,
  k+1..J toxic-efficacious — no dose is both safe and efficacious;
* alternative ``H1(u, v)``: doses 1..u safe-futile, u+1..v admissible
  (safe and efficacious), v+1..J toxic-efficacious;
* least favorable set ``LFS(j) = H1(j-1, j)``: exactly one admissible
  dose, the J configurations that bound global power from below.
"""

from __future__ import annotations

from dataclasses import dataclass

#: Truth codes for a dose's (pi_T, pi_E) combination.
SAFE_FUTILE = 0
ADMISSIBLE = 1
TOXIC_EFFICACIOUS = 2
TOXIC_FUTILE = 3


@dataclass(frozen=True)
class DesignRates:
    """Elicited null/alternative toxicity and efficacy rates.

    ``phi_t0`` is the unacceptably high toxicity rate, ``phi_t1`` the
    acceptable one (phi_t0 > phi_t1); ``phi_e0`` is the unacceptably low
    efficacy rate, ``phi_e1`` the acceptable one (phi_e0 < phi_e1).
    """

    phi_t0: float
    phi_t1: float
    phi_e0: float
    phi_e1: float

    def __post_init__(self) -> None:
        for name in ("phi_t0", "phi_t1", "phi_e0", "phi_e1"):
            val = getattr(self, name)
            if not (0.0 < val < 1.0):
                raise ValueError(f"{name} must lie strictly inside (0, 1), got {val}")
        if not self.phi_t0 > self.phi_t1:
            raise ValueError(
                f"phi_t0 must exceed phi_t1, got phi_t0={self.phi_t0}, phi_t1={self.phi_t1}"
            )
        if not self.phi_e0 < self.phi_e1:
            raise ValueError(
                f"phi_e0 must be below phi_e1, got phi_e0={self.phi_e0}, phi_e1={self.phi_e1}"
            )

    def dose_truth(self, pi_t: float, pi_e: float) -> int:
        """Truth code of a dose whose rates come from the elicited grid."""
        safe = pi_t == self.phi_t1
        efficacious = pi_e == self.phi_e1
        if safe and efficacious:
            return ADMISSIBLE
        if safe:
            return SAFE_FUTILE
        if efficacious:
            return TOXIC_EFFICACIOUS
        return TOXIC_FUTILE


@dataclass(frozen=True)
class HypothesisConfig:
    """One hypothesis: a label plus per-dose (pi_T, pi_E) rate pairs."""

    kind: str  # "null" | "alt" | "lfs"
    index: tuple[int, ...]  # (s, k) for null, (u, v) for alt, (j,) for lfs
    doses: tuple[tuple[float, float], ...]
    rates: DesignRates

    def __post_init__(self) -> None:
        if self.kind not in ("null", "alt", "lfs"):
            raise ValueError(f"unknown hypothesis kind {self.kind!r}")
        r = self.rates
        for pi_t, pi_e in self.doses:
            if pi_t not in (r.phi_t0, r.phi_t1) or pi_e not in (r.phi_e0, r.phi_e1):
                raise ValueError(f"dose rates ({pi_t}, {pi_e}) not on the elicited grid")
        tox = [d[0] for d in self.doses]
        eff = [d[1] for d in self.doses]
        if tox != sorted(tox) or eff != sorted(eff):
            raise ValueError("per-dose rates must be nondecreasing with dose")

    @property
    def n_doses(self) -> int:
        return len(self.doses)

    @property
    def label(self) -> str:
        if self.kind == "null":
            return "H0({},{})".format(*self.index)
        if self.kind == "alt":
            return "H1({},{})".format(*self.index)
        return "LFS({})".format(*self.index)

    @property
    def truth(self) -> tuple[int, ...]:
        """Per-dose truth codes (see module constants)."""
        return tuple(self.rates.dose_truth(pi_t, pi_e) for pi_t, pi_e in self.doses)

    @property
    def admissible_doses(self) -> tuple[int, ...]:
        """0-based indices of truly safe-and-efficacious doses."""
        return tuple(i for i, code in enumerate(self.truth) if code == ADMISSIBLE)


def _null_doses(J: int, s: int, k: int, r: DesignRates) -> tuple[tuple[float, float], ...]:
    doses = []
    for j in range(1, J + 1):
        pi_t = r.phi_t1 if j <= s else r.phi_t0
        pi_e = r.phi_e0 if j <= k else r.phi_e1
        doses.append((pi_t, pi_e))
    return tuple(doses)


def _alt_doses(J: int, u: int, v: int, r: DesignRates) -> tuple[tuple[float, float], ...]:
    doses = []
    for j in range(1, J + 1):
        pi_t = r.phi_t1 if j <= v else r.phi_t0
        pi_e = r.phi_e0 if j <= u else r.phi_e1
        doses.append((pi_t, pi_e))
    return tuple(doses)


def enumerate_null(J: int, rates: DesignRates) -> list[HypothesisConfig]:
    """All (J+1)(J+2)/2 null configurations, ordered by (s, k)."""
    if J < 1:
        raise ValueError(f"need at least one dose, got J={J}")
    return [
        HypothesisConfig(kind="null", index=(s, k), doses=_null_doses(J, s, k, rates), rates=rates)
        for s in range(J + 1)
        for k in range(s, J + 1)
    ]


def enumerate_alternative(J: int, rates: DesignRates) -> list[HypothesisConfig]:
    """All J(J+1)/2 alternative configurations, ordered by (u, v)."""
    if J < 1:
        raise ValueError(f"need at least one dose, got J={J}")
    return [
        HypothesisConfig(kind="alt", index=(u, v), doses=_alt_doses(J, u, v, rates), rates=rates)
        for u in range(J)
        for v in range(u + 1, J + 1)
    ]


def least_favorable_set(J: int, rates: DesignRates) -> list[HypothesisConfig]:
    """The J single-admissible-dose configurations LFS(j) = H1(j-1, j)."""
    if J < 1:
        raise ValueError(f"need at least one dose, got J={J}")
    return [
        HypothesisConfig(
            kind="lfs", index=(j,), doses=_alt_doses(J, j - 1, j, rates), rates=rates
        )
        for j in range(1, J + 1)
    ]


# Scenario numbering used in reports: for J=2 the nulls are scenarios 1-6
# and alternatives 17-19; for J=3 nulls are 7-16 and alternatives 20-25
# (the conventional 25-scenario layout for two- and three-dose designs).
# Other J fall back to sequential numbering: nulls 1..K, alternatives
# K+1..K+J(J+1)/2.
_NULL_OFFSET = {2: 1, 3: 7}
_ALT_OFFSET = {2: 17, 3: 20}


def scenario_number(config: HypothesisConfig) -> int:
    """Report-table scenario id of a configuration."""
    J = config.n_doses
    if config.kind == "null":
        rank = [ (s, k) for s in range(J + 1) for k in range(s, J + 1) ].index(config.index)
        return _NULL_OFFSET.get(J, 1) + rank
    if config.kind == "lfs":
        u, v = config.index[0] - 1, config.index[0]
    else:
        u, v = config.index
    rank = [(a, b) for a in range(J) for b in range(a + 1, J + 1)].index((u, v))
    default = (J + 1) * (J + 2) // 2 + 1
    return _ALT_OFFSET.get(J, default) + rank
