"""Risk scores used to set decision-constraint targets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError


def _check_prob(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number") from None
    if not math.isfinite(value) or not 0.0 <= value <= 1.0:
        raise InputError(f"{name} must be a probability in [0, 1]")
    return value


def _check_nonneg(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number") from None
    if not math.isfinite(value) or value < 0.0:
        raise InputError(f"{name} must be finite and nonnegative")
    return value


@dataclass(frozen=True)
class EconomicRiskParams:
    """Threat frequency, vulnerability, and cost of impact."""

    threat_rate: float
    vulnerability: float
    cost: float

    def __post_init__(self):
        object.__setattr__(self, "threat_rate", _check_nonneg(self.threat_rate, "threat_rate"))
        object.__setattr__(self, "vulnerability", _check_prob(self.vulnerability, "vulnerability"))
        object.__setattr__(self, "cost", _check_nonneg(self.cost, "cost"))

    @classmethod
    def from_dict(cls, doc: dict) -> "EconomicRiskParams":
        try:
            return cls(doc["threat_rate"], doc["vulnerability"], doc["cost"])
        except (TypeError, KeyError) as exc:
            raise InputError(f"economic risk document missing field: {exc}") from None


@dataclass(frozen=True)
class MitigatingRiskParams:
    """Attack, interruption, and neutralization probabilities with consequence.

    pa defaults to the worst case of 1.0; override it to discriminate among
    targets.
    """

    pi: float
    pn: float
    ce: float
    pa: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "pa", _check_prob(self.pa, "pa"))
        object.__setattr__(self, "pi", _check_prob(self.pi, "pi"))
        object.__setattr__(self, "pn", _check_prob(self.pn, "pn"))
        object.__setattr__(self, "ce", _check_nonneg(self.ce, "ce"))

    @classmethod
    def from_dict(cls, doc: dict) -> "MitigatingRiskParams":
        try:
            return cls(pi=doc["pi"], pn=doc["pn"], ce=doc["ce"], pa=doc.get("pa", 1.0))
        except (TypeError, KeyError) as exc:
            raise InputError(f"mitigating risk document missing field: {exc}") from None

    def to_dict(self) -> dict:
        return {"pa": self.pa, "pi": self.pi, "pn": self.pn, "ce": self.ce}


def risk_economic(params: EconomicRiskParams) -> float:
    """Threat rate times vulnerability times cost."""
    return params.threat_rate * params.vulnerability * params.cost


def risk_mitigating(params: MitigatingRiskParams) -> float:
    """pa * (1 - pe) * ce with system effectiveness pe = pi * pn."""
    return params.pa * (1.0 - params.pi * params.pn) * params.ce
