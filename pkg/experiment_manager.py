import importlib.util
import inspect
import logging
import pathlib
import sys
from types import ModuleType

from base_experiment import BaseExperiment
from configuration_manager import ConfigError, ConfigurationManager


class ExperimentManager:
    def __init__(self, config: ConfigurationManager, *, base=BaseExperiment):
        self.base = base
        self.config = config
        self.failed = {}
        self._experiments = {}
        self.logger = logging.getLogger("elimpy.experiment_manager")

    def list_experiments(self):
        return self._experiments

    def load_from_path(self, experiment_path: pathlib.Path):
        blacklist = ["__init__", "__pycache__"]
        loaded = set()
        for file in sorted(pathlib.Path(experiment_path).iterdir()):
            if file.stem in blacklist:
                continue
            if (file.suffix == ".py" or file.is_dir()) and str(
                    file) not in loaded:
                try:
                    loaded.add(str(file))
                    self.load_experiment(file)
                except (SyntaxError, ImportError) as e:
                    self.failed[file.stem] = str(e)
                    self.logger.error("Could not load experiment %s: %s",
                                      file.stem, e)
                except FileNotFoundError:
                    self.logger.warning("File not found in experiment "
                                        "loader.")

    @staticmethod
    def _load_module(file_path: pathlib.Path):
        """
        Attempts to load a module, either from a straight python file or from
        a python package, by appending __init__.py to the end of the path if it
        is a directory.
        """
        file_path = pathlib.Path(file_path)
        search = None
        if file_path.is_dir():
            search = [str(file_path)]
            file_path /= '__init__.py'
        if not file_path.exists():
            raise FileNotFoundError("{0} doesn't exist.".format(file_path))
        stem = file_path.parent.name if search else file_path.stem
        name = "experiments.%s" % stem
        spec = importlib.util.spec_from_file_location(
            name, str(file_path), submodule_search_locations=search)
        module = importlib.util.module_from_spec(spec)
        sys.modules[name] = module
        try:
            spec.loader.exec_module(module)
        except BaseException:
            del sys.modules[name]
            raise
        return module

    def load_experiment(self, experiment_path: pathlib.Path):
        module = self._load_module(experiment_path)
        for candidate in self.get_classes(module):
            if candidate.name in self._experiments:
                self.logger.warning("Experiment %s defined twice; keeping "
                                    "the first.", candidate.name)
                continue
            self._experiments[candidate.name] = candidate

    def get_classes(self, module: ModuleType):
        """
        Uses the inspect module to find all classes in a given module that
        are subclassed from `self.base`, but are not actually `self.base`.
        """
        class_list = []
        for _, obj in inspect.getmembers(module):
            if inspect.isclass(obj):
                if issubclass(obj, self.base) and obj is not self.base:
                    obj.config = self.config
                    obj.logger = logging.getLogger("elimpy.experiment.%s" %
                                                   obj.name)
                    class_list.append(obj)

        return class_list

    def create(self, name, **kwargs):
        try:
            cls = self._experiments[name]
        except KeyError:
            raise ConfigError("Unknown experiment {!r}; available: "
                              "{}".format(name, ", ".join(
                                  sorted(self._experiments)))) from None
        return cls(**kwargs)

    async def run(self, name, **kwargs):
        """
        Instantiate, activate and run one experiment.

        :return: The finished experiment instance.
        """
        return await self.execute(self.create(name, **kwargs))

    async def execute(self, experiment):
        """
        Activate and run a created experiment.

        :return: The finished experiment instance.
        """
        await experiment.activate()
        try:
            await experiment.run()
        finally:
            await experiment.deactivate()
        return experiment
