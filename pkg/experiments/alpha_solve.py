"""
ElimPy Alpha Solve

Solves the elimination condition for one configured model and writes α, its
residual and the validity diagnostics as a JSON document. For models with a
closed form the document also carries the distance to it.
"""

import numpy as np

from analytics import rabi_alpha_norm
from base_experiment import BaseExperiment
from configuration_manager import ConfigError
from eliminate import (alpha_optomech_closed, alpha_rabi, interior_block,
                       solve_alpha_steady, validity_report)
from models import (IsingCavityParams, OptomechParams, RabiParams,
                    ising_gap, make_ising_cavity, make_optomech, make_rabi)
from opalg import spectral_norm

DEFAULT_PARAMS = {
    "rabi": {"omega0": 3.0, "omega_c": 2.5, "g": 0.1, "kappa": 1.0},
    "optomech": {"omega0": 0.5, "Delta": -1.0, "g": 0.1, "eta": 0.1,
                 "kappa": 1.0, "M": 12},
    "ising": {"N": 4, "h": 1.0, "J": 5.0, "g": 0.3, "omega_c": None,
              "kappa": 1.0},
}


class AlphaSolve(BaseExperiment):
    name = "alpha-solve"
    description = "Effective-field operator α and its validity diagnostics."
    version = "0.2"
    default_config = {
        "model": {"kind": "rabi", "params": {}},
        "numerics": {"route": "auto", "ground_levels": 2}
    }

    def validate(self):
        kind = self.model.kind
        if kind not in DEFAULT_PARAMS:
            raise ConfigError("model.kind must be one of {}.".format(
                ", ".join(DEFAULT_PARAMS)))
        if kind == "ising":
            self.check_budget("N", int(self.params()["N"]),
                              self.budgets.max_spins)

    def params(self):
        """Built-in parameters of the kind, updated by the config."""
        params = dict(DEFAULT_PARAMS[self.model.kind])
        params.update(self.model.get("params") or {})
        return params

    def _spec(self):
        kind, params = self.model.kind, self.params()
        try:
            if kind == "rabi":
                return make_rabi(RabiParams(**params))
            if kind == "optomech":
                return make_optomech(OptomechParams(**params))
            if params.get("omega_c") is None:
                params["omega_c"] = ising_gap(
                    int(params["N"]), float(params["h"]),
                    float(params["J"]),
                    ground_levels=int(self.numerics.ground_levels)).gap
            return make_ising_cavity(IsingCavityParams(**params))
        except TypeError as e:
            raise ConfigError("Bad {} parameters: {}".format(kind, e)) \
                from None

    def _reference(self, solution):
        """Distance of the generic α to the closed form, where one exists."""
        p = self.params()
        if self.model.kind == "rabi":
            exact = alpha_rabi(p["omega0"], p["omega_c"], p["g"], p["kappa"])
            return {"method": exact.method.value,
                    "max_abs_difference": float(np.max(np.abs(
                        exact.alpha.data - solution.alpha.data)))}
        if self.model.kind == "optomech":
            buffer = int(self.numerics.boundary_buffer)
            exact = alpha_optomech_closed(p["omega0"], p["Delta"], p["g"],
                                          p["eta"], p["kappa"], p["M"],
                                          buffer=buffer)
            difference = interior_block(exact.alpha - solution.alpha, buffer)
            return {"method": exact.method.value,
                    "interior_max_abs_difference":
                        float(np.max(np.abs(difference))),
                    "closed_form_residual": exact.residual}
        return None

    async def run(self):
        spec = self._spec()
        solution = solve_alpha_steady(spec, route=self.numerics.route,
                                      dense_cap=self.numerics.dense_cap,
                                      cond_limit=self.numerics.cond_limit)
        report = validity_report(spec, solution)
        bound = float(self.numerics.residual_tol) * spectral_norm(spec.S)
        certified = solution.residual <= max(bound, 1e-13)
        if not certified:
            self.note("Residual {:.3e} above {:.3e}.".format(
                solution.residual, bound))
            self.failures += 1
        self.logger.info("alpha (%s, %s route): residual %.3e, |alpha| "
                         "%.6g, commutator ratio %.3e", self.model.kind,
                         solution.route, solution.residual,
                         report.alpha_norm, report.commutator_ratio)
        document = {
            "alpha": {"real": solution.alpha.data.real,
                      "imag": solution.alpha.data.imag},
            "params": self.params(),
            "space": solution.alpha.space,
            "method": solution.method.value,
            "route": solution.route,
            "residual": solution.residual,
            "condition": solution.condition,
            "certified": certified,
            "validity": report.as_dict(),
            "reference": self._reference(solution),
        }
        if self.model.kind == "rabi":
            p = self.params()
            document["alpha_norm"] = {
                "spectral": report.alpha_norm,
                "coefficient": rabi_alpha_norm(p["omega_c"], p["omega0"],
                                               p["g"], p["kappa"])}
        self.write_json("alpha_{}.json".format(self.model.kind), document)
        return self.written
