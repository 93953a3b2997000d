"""Run reports shared by both solvers: traces, stop reason, serialization."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import grid
from .levelset import EnergyBreakdown

STOP_TOL = "tol"
STOP_MAX_ITERS = "max_iters"


@dataclass
class RunReport:
    phi: np.ndarray
    iters: int
    stop: str
    energy_trace: list[EnergyBreakdown] = field(default_factory=list)
    phi_change_trace: list[float] = field(default_factory=list)
    residual_trace: list[tuple[float, float, float]] | None = None

    @property
    def final_energy(self) -> float:
        if not self.energy_trace:
            return float("nan")
        return self.energy_trace[-1].total

    def energies(self) -> np.ndarray:
        return np.array([e.total for e in self.energy_trace])

    def summary_line(self) -> str:
        return (f'{{"iters":{self.iters},"stop":"{self.stop}",'
                f'"final_energy":{self.final_energy!r}}}')

    def write_energy_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("iter,distance_term,curvature_term,total\n")
            for k, e in enumerate(self.energy_trace, start=1):
                fh.write(f"{k},{e.distance_term!r},{e.curvature_term!r},"
                         f"{e.total!r}\n")

    def write_residuals_csv(self, path) -> None:
        if self.residual_trace is None:
            raise ValueError("this run recorded no constraint residuals")
        with open(path, "w") as fh:
            fh.write("iter,res_p,res_q,res_n\n")
            for k, (rp, rq, rn) in enumerate(self.residual_trace, start=1):
                fh.write(f"{k},{rp!r},{rq!r},{rn!r}\n")

    def write_phi(self, path) -> None:
        grid.write_field(path, self.phi)
