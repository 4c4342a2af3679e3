"""
ElimPy Ising Cooling

Cavity cooling of a transverse-field Ising chain. The cavity is tuned to the
gap between the ground manifold and the first excited level, the chain
starts fully polarized, and the mean energy <H_S> is tracked in time under
the effective equation and, when the composite space fits the budget, the
full chain-cavity equation.

The long-time limit of the effective equation is solved for as well. Its
energy is the floor the trajectory relaxes to. It sits above E0 because the
jump operator that removes energy at the tuned transition also carries weak
excitation terms, detuned by about twice the cavity frequency.
"""

import numpy as np

from base_experiment import BaseExperiment
from configuration_manager import ConfigError
from dynamics import asymptotic_state, evolve, expect
from eliminate import solve_alpha_steady, validity_report
from liouville import build_effective_liouvillian, build_full_liouvillian
from models import (IsingCavityParams, fock_state, ising_gap, ising_spectrum,
                    make_ising_cavity, polarized_state)
from opalg import embed_system, kron
from utilities import ElimPyError

COLUMNS = ["t_kappa", "energy_full", "energy_eff", "E0"]


class IsingCool(BaseExperiment):
    name = "ising-cool"
    description = ("Cooling of a transverse-field Ising chain by a damped "
                   "cavity tuned to its gap.")
    version = "0.3"
    default_config = {
        "model": {"N": 4, "h": 1.0, "J": 5.0, "g": 0.3, "omega_c": None,
                  "kappa": 1.0},
        "numerics": {"cavity_cutoff": 3,
                     "t_max": 200.0,
                     "num_times": 401,
                     "ground_levels": 2,
                     "defect_samples": 100},
        "large_run": {"model": {"N": 9},
                      "numerics": {"defect_samples": 5},
                      "budgets": {"max_composite_dim": 1536}}
    }

    def validate(self):
        if int(self.numerics.num_times) < 2:
            raise ConfigError("Time grid needs at least two points.")
        if not float(self.numerics.t_max) > 0:
            raise ConfigError("t_max must be positive.")
        self.check_budget("N", int(self.model.N), self.budgets.max_spins)
        self.check_budget("cavity cutoff", int(self.numerics.cavity_cutoff),
                          self.budgets.max_cutoff)

    def _params(self, omega_c):
        m = self.model
        return IsingCavityParams(N=int(m.N), h=float(m.h), J=float(m.J),
                                 g=float(m.g), omega_c=omega_c,
                                 kappa=float(m.kappa))

    def _evolve(self, job):
        trajectory = evolve(job["generator"], job["rho0"], job["times"],
                            rtol=self.numerics.rtol,
                            atol=self.numerics.atol,
                            observables={"energy": job["energy"]},
                            keep_states=False)
        return {"kind": job["kind"], "trajectory": trajectory}

    def _steady_floor(self, effective, rho0, energy, E0):
        """
        Energy above E0 of the long-time limit reached from rho0. The
        chain reflection commutes with H_eff and with α, so the kernel is
        degenerate and the limit depends on the symmetry sector of rho0.
        """
        try:
            rho = asymptotic_state(effective, rho0,
                                   tol=self.numerics.steady_tol,
                                   dense_cap=self.numerics.dense_cap)
        except ElimPyError as e:
            self.note("Effective long-time state unavailable: {}".format(e))
            return None
        return float(expect(energy, rho).real - E0)

    async def run(self):
        m = self.model
        N = int(m.N)
        L = int(self.numerics.cavity_cutoff)
        gap = ising_gap(N, float(m.h), float(m.J),
                        ground_levels=int(self.numerics.ground_levels))
        omega_c = gap.gap if m.omega_c is None else float(m.omega_c)
        self.logger.info("Ising N=%d: E0=%.10g E1=%.10g gap=%.10g, "
                         "omega_c=%.10g", N, gap.E0, gap.E1, gap.gap,
                         omega_c)
        spec = make_ising_cavity(self._params(omega_c))
        solution = solve_alpha_steady(spec,
                                      dense_cap=self.numerics.dense_cap,
                                      cond_limit=self.numerics.cond_limit)
        report = validity_report(spec, solution)
        effective, model = build_effective_liouvillian(
            spec, solution, residual_tol=self.numerics.residual_tol)
        generators = {"effective": effective}

        times = np.linspace(0.0, float(self.numerics.t_max),
                            int(self.numerics.num_times)) / float(m.kappa)
        rho0 = polarized_state(N)
        jobs = [{"kind": "effective", "generator": effective, "rho0": rho0,
                 "times": times, "energy": spec.H_S}]
        composite = spec.dim * L
        if composite <= int(self.budgets.max_composite_dim):
            full = build_full_liouvillian(spec, L)
            generators["full_L{}".format(L)] = full
            jobs.append({"kind": "full",
                         "generator": full,
                         "rho0": kron(rho0, fock_state(0, L, spec.mode)),
                         "times": times,
                         "energy": embed_system(spec.H_S, L, spec.mode)})
        else:
            self.note("Composite dimension {} exceeds {}; full-model "
                      "columns omitted.".format(
                          composite, self.budgets.max_composite_dim))

        results = await self.sweep(self._evolve, jobs, keys=("kind",))
        trajectories = {r["kind"]: r["trajectory"] for r in results
                        if "error" not in r}
        if "effective" not in trajectories:
            return self.written
        energy_eff = trajectories["effective"].values("energy")
        energy_full = None
        if "full" in trajectories:
            energy_full = trajectories["full"].values("energy")

        rows = []
        for i, t in enumerate(times):
            rows.append({"t_kappa": t * float(m.kappa),
                         "energy_eff": energy_eff[i],
                         "energy_full": (None if energy_full is None
                                         else energy_full[i]),
                         "E0": gap.E0})
        drop = energy_eff[0] - gap.E0
        deviation = None
        if energy_full is not None and drop:
            deviation = float(np.max(np.abs(energy_eff - energy_full))
                              / abs(drop))
        self.write("ising_cool.csv", COLUMNS, rows,
                   gap={"E0": gap.E0, "E1": gap.E1, "gap": gap.gap},
                   omega_c=omega_c, cavity_cutoff=L,
                   alpha={"method": solution.method.value,
                          "route": solution.route,
                          "residual": solution.residual,
                          "condition": solution.condition},
                   validity=report.as_dict(),
                   alpha_norm_sq=model.meta["alpha_norm_sq"],
                   final_gap_eff=float(energy_eff[-1] - gap.E0),
                   steady_gap_eff=self._steady_floor(effective, rho0,
                                                     spec.H_S, gap.E0),
                   max_deviation_over_drop=deviation,
                   generator_defects=self.generator_defects(
                       generators, int(self.numerics.defect_samples)),
                   integration={kind: t.meta
                                for kind, t in trajectories.items()})

        levels = ising_spectrum(N, float(m.h), float(m.J))
        self.write("ising_spectrum.csv", ["index", "energy"],
                   [{"index": i, "energy": e} for i, e in enumerate(levels)],
                   N=N, h=float(m.h), J=float(m.J))
        return self.written
