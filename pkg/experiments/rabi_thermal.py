"""
ElimPy Rabi Thermal Scan

Steady-state <σz> of the dissipative Rabi model as a function of the
thermal occupation of the cavity: the closed form, the effective generator
and the full atom-cavity model. The full model walks a ladder of cutoffs
per row and records where it converged.
"""

from analytics import rabi_steady_sz
from base_experiment import BaseExperiment
from configuration_manager import ConfigError
from dynamics import cutoff_convergence, expect, steady_state
from eliminate import alpha_rabi
from liouville import build_effective_liouvillian, build_full_liouvillian
from models import RabiParams, atom_pauli, make_rabi
from opalg import embed_system
from utilities import ElimPyError, parameter_tag

COLUMNS = ["nbar", "sz_formula", "sz_eff", "sz_full", "converged",
           "converged_cutoff", "cutoff_ladder", "last_difference", "error"]


class RabiThermal(BaseExperiment):
    name = "rabi-thermal"
    description = ("Steady <σz> of the dissipative Rabi model versus "
                   "thermal occupation.")
    version = "0.3"
    default_config = {
        "model": {"omega0": 3.0, "omega_c": 2.5, "kappa": 1.0,
                  "g": [0.1, 3.0]},
        "numerics": {"nbar_grid": [0.0, 1.0, 2.0, 4.0],
                     "cutoffs": [10, 20, 30, 40],
                     "convergence_tol": 1e-4,
                     "defect_samples": 100},
        "large_run": {"numerics": {"cutoffs": [10, 20, 30, 40, 50, 60,
                                               70, 80]}}
    }

    def validate(self):
        if not self.numerics.nbar_grid:
            raise ConfigError("nbar_grid must not be empty.")
        if len(self.numerics.cutoffs) < 2:
            raise ConfigError("The cutoff ladder needs at least two "
                              "cutoffs.")
        if any(float(n) < 0 for n in self.numerics.nbar_grid):
            raise ConfigError("nbar values must be nonnegative.")
        for L in self.numerics.cutoffs:
            self.check_budget("cutoff", int(L), self.budgets.max_cutoff)

    def _couplings(self):
        g = self.model.g
        return [float(v) for v in (g if isinstance(g, list) else [g])]

    def _params(self, g, nbar):
        m = self.model
        return RabiParams(omega0=float(m.omega0), omega_c=float(m.omega_c),
                          g=g, kappa=float(m.kappa), nbar=nbar)

    def _effective(self, p):
        solution = alpha_rabi(p.omega0, p.omega_c, p.g, p.kappa)
        effective, _ = build_effective_liouvillian(
            make_rabi(p), solution, residual_tol=self.numerics.residual_tol)
        return effective

    def _defects(self, g):
        """Defects of the generators at the hottest grid point."""
        p = self._params(g, max(float(n) for n in self.numerics.nbar_grid))
        L = min(int(L) for L in self.numerics.cutoffs)
        try:
            generators = {"effective": self._effective(p),
                          "full_L{}".format(L):
                              build_full_liouvillian(make_rabi(p), L)}
        except ElimPyError as e:
            self.note("Generator defects not recorded: {}".format(e))
            return None
        return self.generator_defects(generators,
                                      int(self.numerics.defect_samples))

    def compute_point(self, point):
        nbar = point["nbar"]
        p = self._params(point["g"], nbar)
        spec = make_rabi(p)
        sz = atom_pauli("z")
        tol = self.numerics.steady_tol
        cap = self.numerics.null_space_cap

        sz_eff = expect(sz, steady_state(self._effective(p), tol=tol,
                                         null_space_cap=cap)).real

        table = cutoff_convergence(
            lambda L: build_full_liouvillian(spec, L),
            lambda L: embed_system(sz, L, spec.mode),
            self.numerics.cutoffs,
            tol=float(self.numerics.convergence_tol),
            solve=lambda generator: steady_state(generator, tol=tol,
                                                 null_space_cap=cap))
        if not table.converged:
            self.logger.warning("g=%g nbar=%g: <σz> not converged over "
                                "cutoffs %s (last difference %.3e).",
                                p.g, nbar, list(table.cutoffs),
                                table.differences[-1])
        return {"nbar": nbar,
                "sz_formula": rabi_steady_sz(p.omega0, p.omega_c, p.kappa,
                                             nbar),
                "sz_eff": sz_eff,
                "sz_full": table.value,
                "converged": table.converged,
                "converged_cutoff": table.converged_cutoff,
                "cutoff_ladder": ";".join(str(L) for L in table.cutoffs),
                "last_difference": table.differences[-1]}

    async def run(self):
        for g in self._couplings():
            points = [{"g": g, "nbar": float(n)}
                      for n in self.numerics.nbar_grid]
            rows = await self.sweep(self.compute_point, points,
                                    keys=("nbar",))
            unconverged = [row["nbar"] for row in rows
                           if not row.get("error") and not row["converged"]]
            self.write("rabi_thermal_{}.csv".format(parameter_tag(g=g)),
                       COLUMNS, rows, g=g, unconverged_nbar=unconverged,
                       generator_defects=self._defects(g))
        return self.written
