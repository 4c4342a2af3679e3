"""
ElimPy Optomechanical Sweep

Steady mean phonon number of a driven optomechanical mirror across the laser
detuning, from the full mirror-cavity master equation, from the effective
mirror-only equation and from the weak-coupling formula. One file per
(omega0, g) pair.

The mirror cutoff is chosen per row: the effective occupation is walked up
a ladder of cutoffs until it settles, and the full model runs at the cutoff
found. Rows where the formula misses the effective value by more than
formula_tol are listed in the manifest; near resonance with a soft mirror
the higher-order terms the formula drops are not small.
"""

import numpy as np

from analytics import NoCoolingBalanceError, mbar_weak
from base_experiment import BaseExperiment
from configuration_manager import ConfigError
from dynamics import expect, steady_state
from eliminate import (alpha_optomech_closed, alpha_optomech_weak,
                       solve_alpha_steady, validity_report)
from liouville import build_effective_liouvillian, build_full_liouvillian
from models import OptomechParams, fock_state, make_optomech
from opalg import bosonic_ops, embed_system, kron
from utilities import parameter_tag

COLUMNS = ["delta_over_kappa", "mbar_full", "mbar_eff", "mbar_weak_formula",
           "mirror_cutoff", "mirror_converged", "cavity_cutoff",
           "commutator_ratio", "alpha_residual", "error"]


class OptomechSweep(BaseExperiment):
    name = "optomech-sweep"
    description = ("Steady phonon number versus detuning: full model, "
                   "effective model and weak-coupling formula.")
    version = "0.3"
    default_config = {
        "model": {"omega0": [0.5, 3.0],
                  "g": [0.1, 0.4],
                  "eta": 0.1,
                  "kappa": 1.0},
        "numerics": {"delta_grid": {"start": -3.0, "stop": -0.3, "num": 12},
                     "mirror_cutoffs": [20, 30, 40],
                     "mirror_tol": 0.01,
                     "cavity_cutoff": 4,
                     "alpha_method": "closed",
                     "formula_tol": 0.15},
        "large_run": {"numerics": {"mirror_cutoffs": [30, 45, 60],
                                   "cavity_cutoff": 6}}
    }

    def validate(self):
        grid = self.numerics.delta_grid
        if int(grid.num) < 1:
            raise ConfigError("delta_grid must hold at least one point.")
        if not self._as_list(self.model.omega0) or not self._as_list(
                self.model.g):
            raise ConfigError("omega0 and g lists must not be empty.")
        if self.numerics.alpha_method not in ("closed", "generic", "weak"):
            raise ConfigError("alpha_method must be closed, generic or "
                              "weak.")
        ladder = self.mirror_cutoffs()
        if not ladder:
            raise ConfigError("mirror_cutoffs must not be empty.")
        if ladder != sorted(set(ladder)):
            raise ConfigError("mirror_cutoffs must be strictly increasing.")
        self.check_budget("cavity cutoff", self.numerics.cavity_cutoff,
                          self.budgets.max_cutoff)
        self.check_budget("mirror cutoff", ladder[-1],
                          self.budgets.max_cutoff)

    @staticmethod
    def _as_list(value):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(value)]

    def mirror_cutoffs(self):
        return [int(M) for M in self._as_list(self.numerics.mirror_cutoffs)]

    def deltas(self):
        grid = self.numerics.delta_grid
        return np.linspace(float(grid.start), float(grid.stop),
                           int(grid.num))

    def _alpha(self, p):
        method = self.numerics.alpha_method
        if method == "generic":
            return solve_alpha_steady(make_optomech(p),
                                      dense_cap=self.numerics.dense_cap,
                                      cond_limit=self.numerics.cond_limit)
        solver = alpha_optomech_weak if method == "weak" else \
            alpha_optomech_closed
        return solver(p.omega0, p.Delta, p.g, p.eta, p.kappa, p.M)

    def _steady(self, generator, p, rho0):
        tol = self.numerics.steady_tol
        if p.g == 0:
            # decoupled mirror keeps its initial vacuum
            return steady_state(generator, route="evolve", tol=tol,
                                rho0=rho0)
        return steady_state(generator, tol=tol,
                            null_space_cap=self.numerics.null_space_cap)

    def _effective_point(self, point, M):
        p = OptomechParams(omega0=point["omega0"], Delta=point["Delta"],
                           g=point["g"], eta=float(self.model.eta),
                           kappa=float(self.model.kappa), M=M)
        spec = make_optomech(p)
        solution = self._alpha(p)
        effective, _ = build_effective_liouvillian(
            spec, solution, residual_tol=self.numerics.residual_tol)
        _, _, n = bosonic_ops(M, "mirror")
        rho = self._steady(effective, p, fock_state(0, M, "mirror"))
        return {"params": p, "spec": spec, "solution": solution,
                "mbar": expect(n, rho).real}

    def _converge_mirror(self, point):
        """
        Walk the mirror ladder until the effective occupation changes by at
        most mirror_tol (relative) between neighbouring cutoffs.

        :return: (effective point, converged) with converged None for a
                 one-cutoff ladder.
        """
        tol = float(self.numerics.mirror_tol)
        ladder = self.mirror_cutoffs()
        previous = None
        for M in ladder:
            current = self._effective_point(point, M)
            if previous is not None:
                change = abs(current["mbar"] - previous["mbar"])
                if change <= tol * max(abs(current["mbar"]), 1e-12):
                    return current, True
                self.logger.debug("Delta=%g: mirror cutoff %d changes "
                                  "mbar by %.3e.", point["Delta"], M, change)
            previous = current
        return previous, (None if len(ladder) == 1 else False)

    def compute_point(self, point):
        L = int(self.numerics.cavity_cutoff)
        current, converged = self._converge_mirror(point)
        p, spec, solution = (current["params"], current["spec"],
                             current["solution"])
        M = p.M
        row = {"delta_over_kappa": p.Delta / p.kappa, "mirror_cutoff": M,
               "mirror_converged": converged, "cavity_cutoff": L,
               "mbar_eff": current["mbar"]}
        try:
            row["mbar_weak_formula"] = mbar_weak(p.omega0, p.Delta, p.kappa)
        except NoCoolingBalanceError:
            row["mbar_weak_formula"] = None

        report = validity_report(spec, solution)
        row["commutator_ratio"] = report.commutator_ratio
        row["alpha_residual"] = solution.residual
        full = build_full_liouvillian(spec, L)
        rho0 = kron(fock_state(0, M, "mirror"), fock_state(0, L, "cavity"))
        _, _, n = bosonic_ops(M, "mirror")
        row["mbar_full"] = expect(embed_system(n, L, spec.mode),
                                  self._steady(full, p, rho0)).real
        self.logger.info("omega0=%g g=%g Delta=%g M=%d: mbar full %.6g, "
                         "eff %.6g", p.omega0, p.g, p.Delta, M,
                         row["mbar_full"], row["mbar_eff"])
        return row

    @staticmethod
    def _relative(row, a, b):
        if row.get(a) is None or row.get(b) in (None, 0):
            return None
        return abs(row[a] - row[b]) / abs(row[b])

    def _max_relative(self, rows, a, b):
        values = [v for v in (self._relative(row, a, b) for row in rows)
                  if v is not None]
        return max(values, default=None)

    async def run(self):
        deltas = self.deltas()
        formula_tol = float(self.numerics.formula_tol)
        for omega0 in self._as_list(self.model.omega0):
            for g in self._as_list(self.model.g):
                points = [{"omega0": omega0, "g": g, "Delta": float(d),
                           "delta_over_kappa": float(d) /
                           float(self.model.kappa)} for d in deltas]
                rows = await self.sweep(self.compute_point, points,
                                        keys=("delta_over_kappa",))
                outliers = [
                    row["delta_over_kappa"] for row in rows
                    if (self._relative(row, "mbar_eff", "mbar_weak_formula")
                        or 0.0) > formula_tol]
                unconverged = [row["delta_over_kappa"] for row in rows
                               if row.get("mirror_converged") is False]
                if unconverged:
                    self.note("omega0={:g} g={:g}: mirror cutoff not "
                              "converged at Delta/kappa {}.".format(
                                  omega0, g, unconverged))
                self.write(
                    "optomech_{}.csv".format(parameter_tag(w=omega0, g=g)),
                    COLUMNS, rows,
                    point={"omega0": omega0, "g": g},
                    max_rel_eff_vs_full=self._max_relative(
                        rows, "mbar_eff", "mbar_full"),
                    max_rel_eff_vs_formula=self._max_relative(
                        rows, "mbar_eff", "mbar_weak_formula"),
                    formula_tol=formula_tol,
                    formula_outliers=outliers,
                    mirror_unconverged=unconverged)
        return self.written
