"""
ElimPy Rabi Spectrum

Liouvillian spectra of the dissipative Rabi model in a thermal cavity: the
four eigenvalues of the effective generator, the full composite spectrum at
each requested cutoff, the nearest-match table between them and the drift of
the near-zero full eigenvalues between two cutoffs.
"""

from base_experiment import BaseExperiment
from configuration_manager import ConfigError
from dynamics import match_spectra, spectral_drift, spectrum
from eliminate import alpha_rabi
from liouville import build_effective_liouvillian, build_full_liouvillian
from models import RabiParams, make_rabi

SPECTRUM_COLUMNS = ["index", "re", "im"]
MATCH_COLUMNS = ["cutoff", "effective_re", "effective_im", "nearest_re",
                 "nearest_im", "distance", "error"]
DRIFT_COLUMNS = ["cutoff", "index", "re", "im"]


def _spectrum_rows(values):
    return [{"index": i, "re": v.real, "im": v.imag}
            for i, v in enumerate(values)]


class RabiSpectrum(BaseExperiment):
    name = "rabi-spectrum"
    description = ("Effective versus full Liouvillian spectra of the "
                   "dissipative Rabi model.")
    version = "0.3"
    default_config = {
        "model": {"omega0": 3.0, "omega_c": 2.5, "g": 0.1, "kappa": 1.0,
                  "nbar": 1.0},
        "numerics": {"cutoffs": [30],
                     "k": 12,
                     "defect_samples": 100,
                     "drift": {"nbar": 4.0, "cutoffs": [20, 40], "k": 6}},
        "large_run": {"numerics": {"cutoffs": [30, 80],
                                   "drift": {"cutoffs": [20, 80]}}}
    }

    def validate(self):
        if not self.numerics.cutoffs:
            raise ConfigError("cutoffs must not be empty.")
        drift = self.numerics.get("drift")
        if drift and len(drift.cutoffs) != 2:
            raise ConfigError("drift.cutoffs must hold exactly two cutoffs.")
        wanted = list(self.numerics.cutoffs)
        if drift:
            wanted += list(drift.cutoffs)
        for L in wanted:
            self.check_budget("cutoff", int(L), self.budgets.max_cutoff)

    def _spec(self, nbar):
        m = self.model
        return make_rabi(RabiParams(omega0=float(m.omega0),
                                    omega_c=float(m.omega_c), g=float(m.g),
                                    kappa=float(m.kappa), nbar=float(nbar)))

    def _full_spectrum(self, job):
        full = build_full_liouvillian(job["spec"], job["cutoff"])
        k = None
        if full.liouville_dim > int(self.numerics.dense_cap):
            k = int(job["k"])
        values = spectrum(full, k, dense_cap=self.numerics.dense_cap)
        self.logger.info("Full spectrum at L=%d (nbar=%g): %d eigenvalues.",
                         job["cutoff"], job["spec"].nbar, len(values))
        defects = self.generator_defects(
            {"full": full}, int(self.numerics.defect_samples))["full"]
        return {"cutoff": job["cutoff"], "values": values,
                "mode": "dense" if k is None else "nearest-{}".format(k),
                "defects": defects}

    def _near_zero(self, job):
        full = build_full_liouvillian(job["spec"], job["cutoff"])
        values = spectrum(full, int(job["k"]),
                          dense_cap=self.numerics.dense_cap)
        return {"cutoff": job["cutoff"], "values": values}

    async def run(self):
        m = self.model
        spec = self._spec(m.nbar)
        solution = alpha_rabi(float(m.omega0), float(m.omega_c), float(m.g),
                              float(m.kappa))
        effective, _ = build_effective_liouvillian(
            spec, solution, residual_tol=self.numerics.residual_tol)
        eff_values = spectrum(effective)
        self.write("rabi_spectrum_effective.csv", SPECTRUM_COLUMNS,
                   _spectrum_rows(eff_values), nbar=spec.nbar,
                   generator_defects=self.generator_defects(
                       {"effective": effective},
                       int(self.numerics.defect_samples))["effective"])

        jobs = [{"spec": spec, "cutoff": int(L), "k": self.numerics.k}
                for L in self.numerics.cutoffs]
        results = await self.sweep(self._full_spectrum, jobs,
                                   keys=("cutoff",))
        match_rows = []
        for job, result in zip(jobs, results):
            L = job["cutoff"]
            if "error" in result:
                match_rows.append({"cutoff": L, "error": result["error"]})
                continue
            self.write("rabi_spectrum_full_L{}.csv".format(L),
                       SPECTRUM_COLUMNS, _spectrum_rows(result["values"]),
                       nbar=spec.nbar, cutoff=L, mode=result["mode"],
                       reduction_factor=L ** 2,
                       generator_defects=result["defects"])
            for match in match_spectra(eff_values, result["values"]):
                match_rows.append({
                    "cutoff": L,
                    "effective_re": match.eigenvalue.real,
                    "effective_im": match.eigenvalue.imag,
                    "nearest_re": match.nearest.real,
                    "nearest_im": match.nearest.imag,
                    "distance": match.distance})
        worst = max((r["distance"] for r in match_rows if "distance" in r),
                    default=None)
        self.write("rabi_spectrum_match.csv", MATCH_COLUMNS, match_rows,
                   nbar=spec.nbar, max_distance=worst,
                   reduction_factors={str(job["cutoff"]): job["cutoff"] ** 2
                                      for job in jobs})

        drift = self.numerics.get("drift")
        if drift:
            await self._drift(drift)
        return self.written

    async def _drift(self, drift):
        spec = self._spec(drift.nbar)
        jobs = [{"spec": spec, "cutoff": int(L), "k": drift.k}
                for L in drift.cutoffs]
        results = await self.sweep(self._near_zero, jobs, keys=("cutoff",))
        rows = []
        for job, result in zip(jobs, results):
            if "error" in result:
                rows.append({"cutoff": job["cutoff"]})
                continue
            for i, v in enumerate(result["values"]):
                rows.append({"cutoff": job["cutoff"], "index": i,
                             "re": v.real, "im": v.imag})
        value = None
        if not any("error" in r for r in results):
            value = spectral_drift(results[0]["values"],
                                   results[1]["values"])
            self.logger.info("Near-zero drift L=%d -> L=%d at nbar=%g: "
                             "%.3e", jobs[0]["cutoff"], jobs[1]["cutoff"],
                             spec.nbar, value)
        self.write("rabi_spectrum_drift.csv", DRIFT_COLUMNS, rows,
                   nbar=spec.nbar, drift=value)
