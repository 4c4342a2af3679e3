import time
from collections import abc
from pathlib import Path

from liouville import generator_defects
from results import build_manifest, write_json_result, write_result
from utilities import (DotDict, ElimPyError, recursive_dictionary_update,
                       run_points, to_plain)


class BudgetExceededError(ElimPyError):
    pass


class BaseExperiment:
    """
    Defines an interface for all experiments to inherit from. Setup work
    belongs in activate(); the data-producing work in run(). If you do
    override __init__, remember to super()!

    The experiment manager injects `config` (the ConfigurationManager) and
    `logger` onto each class it loads.

    `name` *must* be defined in child classes; it is the tag used on the
    command line and in experiment config files.
    """

    name = "base-experiment"
    description = "The common class for all experiments to inherit from."
    version = "0.1"
    default_config = None
    config = None
    logger = None

    def __init__(self, *, large_run=False, threads=1, out=None):
        self.large_run = bool(large_run)
        self.threads = max(1, int(threads or 1))
        settings = self.config.get_experiment_config(self.name,
                                                     self.default_config)
        overrides = settings.pop("large_run", None)
        if self.large_run and isinstance(overrides, abc.Mapping):
            settings = DotDict(recursive_dictionary_update(
                to_plain(settings), to_plain(overrides)))
        if out is not None:
            settings.output.directory = str(out)
        self.experiment_config = settings
        self.output_dir = Path(settings.output.directory)
        self.failures = 0
        self.notes = []
        self.written = []
        self._started = None

    def __repr__(self):
        return "<Experiment {} v{}>".format(self.name, self.version)

    @property
    def model(self):
        return self.experiment_config.model

    @property
    def numerics(self):
        return self.experiment_config.numerics

    @property
    def budgets(self):
        return self.experiment_config.budgets

    async def activate(self):
        self.validate()
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._started = time.perf_counter()
        self.logger.info("Running %s into %s", self.name, self.output_dir)

    async def run(self):
        raise NotImplementedError

    async def deactivate(self):
        if self.failures:
            self.logger.warning("%s finished with %d failed rows.",
                                self.name, self.failures)
        else:
            self.logger.info("%s finished, %d files written.", self.name,
                             len(self.written))

    def validate(self):
        """
        Check the merged configuration before anything runs. Raise
        ConfigError on problems.
        """

    def check_budget(self, what, value, limit):
        """
        Refuse runs above a desk-scale budget unless --large-run was given.
        """
        if value > limit and not self.large_run:
            raise BudgetExceededError(
                "{} = {} exceeds the budget of {}; use --large-run to "
                "allow it.".format(what, value, limit))

    def note(self, message):
        self.logger.warning(message)
        self.notes.append(message)

    async def sweep(self, fn, points, keys=()):
        """
        Run fn over points on the worker pool. A point that raises becomes
        a row holding its key fields and the error message; the sweep goes
        on and the failure is counted.

        :param fn: Callable point -> row dict.
        :param points: Sequence of point dicts.
        :param keys: Point fields copied into error rows.
        :return: Rows in the order of points.
        """
        def guarded(point):
            try:
                return fn(point)
            except Exception as e:
                self.logger.exception("Row failed at %s", point)
                row = {key: point.get(key) for key in keys}
                row["error"] = "{}: {}".format(type(e).__name__, e)
                return row

        rows = await run_points(guarded, list(points), self.threads)
        self.failures += sum(1 for row in rows
                             if isinstance(row, abc.Mapping)
                             and row.get("error"))
        return rows

    def generator_defects(self, generators, samples=100):
        """
        Trace and Hermiticity-preservation defects of built generators,
        keyed by label, for the manifest.
        """
        defects = {}
        for label, generator in generators.items():
            found = generator_defects(generator, samples=samples)
            self.logger.debug("%s generator defects: %s", label, found)
            defects[label] = found._asdict()
        return defects

    def manifest(self, **extra):
        wall = None
        if self._started is not None:
            wall = time.perf_counter() - self._started
        config = to_plain(self.experiment_config)
        config.pop("budgets", None)
        return build_manifest(config=config, experiment=self.name,
                              experiment_version=self.version,
                              large_run=self.large_run, wall_time=wall,
                              notes=list(self.notes), **extra)

    def write(self, filename, columns, rows, **manifest_extra):
        path = write_result(self.output_dir / filename, columns, rows,
                            self.manifest(**manifest_extra))
        self.written.append(path)
        return path

    def write_json(self, filename, document, **manifest_extra):
        path = write_json_result(self.output_dir / filename, document,
                                 self.manifest(**manifest_extra))
        self.written.append(path)
        return path
