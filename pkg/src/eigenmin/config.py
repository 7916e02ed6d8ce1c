"""Run configuration and default tolerances.

Each default is marked with where it comes from:

* ``forced``   the value the verification contract fixes;
* ``measured`` a documented gate chosen from observed behaviour, where the
  mathematics only asserts positivity or zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ConstraintError
from .groups import SPACE_MIN_N, SPACES

DEFAULT_TOLERANCES = {
    "eigen_rel": 1e-8,  # forced: |tau - lam phi| <= tol (1 + |lam phi|), same for kappa
    "pairing_rel": 1e-8,  # forced
    "backend_rel": 1e-5,  # forced: FD vs exact, relative to max(1, |exact|)
    "invariance": 1e-10,  # forced
    "vertical": 1e-9,  # forced
    "zero": 1e-10,  # forced
    "membership": 1e-8,  # forced
    "margin_gate": 1e-3,  # measured
    "H_norm": 1e-4,  # measured
    "control_factor": 10.0,  # measured: control must exceed factor * H_norm tolerance
    "critical_margin": 1e-6,  # measured
    "appendix_rel": 1e-10,  # forced
}

TOLERANCE_PROVENANCE = {
    "margin_gate": "measured",
    "H_norm": "measured",
    "control_factor": "measured",
    "critical_margin": "measured",
}


def parse_space(text: str) -> str:
    sid = text.upper()
    if sid not in SPACES:
        raise ConstraintError(f"unknown space {text!r}; choose from {', '.join(s.lower() for s in SPACES)}")
    return sid


@dataclass
class RunConfig:
    space: str = "SUSO"
    n: int = 2
    seed: int = 0
    samples: int = 20
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    backend: str = "exact"
    output_path: str | None = None
    params_path: str | None = None

    def validate(self) -> "RunConfig":
        self.space = parse_space(self.space)
        if self.n < SPACE_MIN_N[self.space]:
            raise ConstraintError(f"{self.space.lower()} needs n >= {SPACE_MIN_N[self.space]}, got {self.n}")
        if self.samples < 1:
            raise ConstraintError("samples must be at least 1")
        if self.backend not in ("exact", "fd"):
            raise ConstraintError(f"unknown backend {self.backend!r}")
        for name, val in self.tolerances.items():
            if name not in DEFAULT_TOLERANCES:
                raise ConstraintError(f"unknown tolerance {name!r}")
            if not val > 0:
                raise ConstraintError(f"tolerance {name} must be positive")
        return self

    def echo(self) -> dict:
        return {
            "space": self.space,
            "n": self.n,
            "seed": self.seed,
            "samples": self.samples,
            "backend": self.backend,
            "tolerances": dict(sorted(self.tolerances.items())),
            "params": self.params_path,
        }
