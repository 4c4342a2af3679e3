import copy
import json
import logging
from pathlib import Path

from utilities import ElimPyError, recursive_dictionary_update, DotDict

logger = logging.getLogger("elimpy.configuration_manager")

SHARED_SECTIONS = ("numerics", "budgets", "output")
EXPERIMENT_SECTIONS = ("model", "numerics", "output", "large_run")


class ConfigError(ElimPyError):
    pass


class ConfigurationManager:
    def __init__(self):
        self._raw_config = None
        self._raw_default_config = None
        self._config = {}
        self._dot_dict = None
        self._path = None
        self._experiment = None

    def __repr__(self):
        return "<ConfigurationManager: {}>".format(json.dumps(self.config))

    @property
    def config(self):
        if self._dot_dict is None:
            self._dot_dict = DotDict(self._config)
        return self._dot_dict

    @property
    def experiment_tag(self):
        if self._experiment is None:
            return None
        return self._experiment["experiment"]

    @staticmethod
    def _parse(raw, path):
        try:
            data = json.loads(raw)
        except ValueError as e:
            raise ConfigError("Error while loading {}:\n\t{}".format(path, e))\
                from None
        if not isinstance(data, dict):
            raise ConfigError("{} must hold a JSON object.".format(path))
        return data

    def load_config(self, path, default=False):
        """
        Load a global configuration file, merged over `<path>.default` when
        default is set. A missing file is only tolerated when its defaults
        were loaded.
        """
        if not isinstance(path, Path):
            path = Path(path)
        if default:
            self.load_defaults(path)
        try:
            with path.open(encoding="utf-8") as f:
                self._raw_config = f.read()
        except FileNotFoundError:
            if not default:
                raise ConfigError("Config file {} not found.".format(path)) \
                    from None
            self._raw_config = "{}"
        self._path = path
        recursive_dictionary_update(self._config,
                                    self._parse(self._raw_config, path))
        self._dot_dict = None

    def load_defaults(self, path):
        path = Path(str(path) + ".default")
        try:
            with path.open(encoding="utf-8") as f:
                self._raw_default_config = f.read()
        except FileNotFoundError:
            raise ConfigError("Default config {} not found.".format(path)) \
                from None
        recursive_dictionary_update(self._config,
                                    self._parse(self._raw_default_config,
                                                path))
        self._dot_dict = None

    def load_experiment(self, path):
        """
        Load an experiment config: a JSON object with an `experiment` tag
        and optional model, numerics, output and large_run sections.

        :return: The experiment tag.
        """
        path = Path(path)
        try:
            with path.open(encoding="utf-8") as f:
                data = self._parse(f.read(), path)
        except FileNotFoundError:
            raise ConfigError("Experiment config {} not found.".format(path)) \
                from None
        if "experiment" not in data:
            raise ConfigError("{} has no 'experiment' tag.".format(path))
        unknown = set(data) - set(EXPERIMENT_SECTIONS) - {"experiment"}
        if unknown:
            raise ConfigError("Unknown sections in {}: {}".format(
                path, ", ".join(sorted(unknown))))
        self._experiment = data
        logger.debug("Loaded experiment config %s (%s).", path,
                     data["experiment"])
        return data["experiment"]

    def save_config(self, path=None):
        if path is None:
            path = self._path
        path = Path(path)
        temp_path = Path(str(path) + "_")
        with temp_path.open("w", encoding="utf-8") as f:
            json.dump(self.config, f, sort_keys=True, indent=4,
                      separators=(',', ': '), ensure_ascii=False)
        temp_path.replace(path)
        logger.debug("Config file saved.")

    def get_experiment_config(self, name, defaults=None):
        """
        Effective configuration of one experiment: its class defaults, then
        the global numerics, budgets and output sections, then the sections
        of a loaded experiment config carrying the same tag.

        :param name: Experiment tag.
        :param defaults: The experiment's default_config.
        :return: DotDict with at least model, numerics, budgets and output.
        """
        merged = copy.deepcopy(dict(defaults or {}))
        for section in ("model", "numerics", "budgets", "output"):
            merged.setdefault(section, {})
        for section in SHARED_SECTIONS:
            if section in self._config:
                recursive_dictionary_update(
                    merged[section], copy.deepcopy(self._config[section]))
        if self._experiment is not None:
            if self._experiment["experiment"] != name:
                raise ConfigError(
                    "Config is for experiment {!r}, not {!r}.".format(
                        self._experiment["experiment"], name))
            for section in EXPERIMENT_SECTIONS:
                if section in self._experiment:
                    merged.setdefault(section, {})
                    recursive_dictionary_update(
                        merged[section],
                        copy.deepcopy(self._experiment[section]))
        merged["experiment"] = name
        return DotDict(merged)
