"""
ElimPy bench: run the elimination experiments and write their data files.

Usage:
  bench.py list [--config <path>]
  bench.py <experiment> [--config <path>] [--out <dir>] [--threads <n>]
           [--large-run] [--verbose]
  bench.py (-h | --help)
  bench.py --version

Options:
  --config <path>  Experiment config: JSON with an "experiment" tag and
                   optional model, numerics and output sections.
  --out <dir>      Output directory, overrides output.directory.
  --threads <n>    Worker pool size for sweep points [default: 1].
  --large-run      Lift the desk-scale budgets and apply the experiment's
                   large-run settings.
  --verbose        Debug logging, also written to debug.log in the
                   output directory.
  -h --help        Show this screen.
  --version        Show the engine version.
"""

import asyncio
import logging
import sys
from pathlib import Path

from docopt import docopt

from base_experiment import BudgetExceededError
from configuration_manager import ConfigError, ConfigurationManager
from experiment_manager import ExperimentManager
from utilities import ENGINE_VERSION, ElimPyError, ExitStatus, path

logger = logging.getLogger("elimpy")

FORMAT = '%(asctime)s - %(levelname)s - %(name)s # %(message)s'
DATEFMT = '%Y-%m-%d %H:%M:%S'


def setup_logging(verbose=False):
    """
    Attach the console handler.

    :return: List of handlers attached, for removal on exit.
    """
    loglevel = logging.DEBUG if verbose else logging.INFO
    logger.setLevel(loglevel)
    ch = logging.StreamHandler()
    ch.setLevel(loglevel)
    ch.setFormatter(logging.Formatter(FORMAT, datefmt=DATEFMT))
    logger.addHandler(ch)
    return [ch]


def attach_debug_log(out):
    """
    Debug file handler writing out/debug.log, once the output directory of
    the experiment is known.
    """
    Path(out).mkdir(parents=True, exist_ok=True)
    fh_d = logging.FileHandler(str(Path(out) / "debug.log"))
    fh_d.setLevel(logging.DEBUG)
    fh_d.setFormatter(logging.Formatter(FORMAT, datefmt=DATEFMT))
    logger.addHandler(fh_d)
    return fh_d


def load_configuration(config_path=None, base=path):
    """
    Global configuration from config/config.json (over its .default), plus
    an optional experiment config.
    """
    configuration_manager = ConfigurationManager()
    configuration_manager.load_config(base / "config" / "config.json",
                                      default=True)
    if config_path:
        configuration_manager.load_experiment(config_path)
    return configuration_manager


def load_experiments(configuration_manager, base=path):
    manager = ExperimentManager(configuration_manager)
    manager.load_from_path(base / configuration_manager.config.experiment_path)
    for name, reason in manager.failed.items():
        logger.warning("Experiment module %s failed to load: %s", name,
                       reason)
    return manager


def _threads(value):
    try:
        threads = int(value)
    except (TypeError, ValueError):
        raise ConfigError("--threads must be an integer, got "
                          "{!r}.".format(value)) from None
    if threads < 1:
        raise ConfigError("--threads must be at least 1.")
    return threads


async def run(args, handlers=None):
    configuration_manager = load_configuration(args["--config"])
    manager = load_experiments(configuration_manager)
    if args["list"]:
        for name, cls in sorted(manager.list_experiments().items()):
            print("{:<16} {}".format(name, cls.description))
        return ExitStatus.OK

    name = args["<experiment>"]
    tag = configuration_manager.experiment_tag
    if tag is not None and tag != name:
        raise ConfigError("Config {} is for experiment {!r}, not "
                          "{!r}.".format(args["--config"], tag, name))
    experiment = manager.create(name, large_run=args["--large-run"],
                                threads=_threads(args["--threads"]),
                                out=args["--out"])
    if args["--verbose"]:
        handler = attach_debug_log(experiment.output_dir)
        if handlers is not None:
            handlers.append(handler)
    await manager.execute(experiment)
    for written in experiment.written:
        logger.debug("Output: %s", written)
    if experiment.failures:
        return ExitStatus.ROW_FAILURES
    return ExitStatus.OK


def main(argv=None):
    args = docopt(__doc__, argv=argv,
                  version="ElimPy {}".format(ENGINE_VERSION))
    handlers = setup_logging(args["--verbose"])
    try:
        return int(asyncio.run(run(args, handlers)))
    except (ConfigError, BudgetExceededError) as e:
        logger.error("%s", e)
        return int(ExitStatus.CONFIG_ERROR)
    except ElimPyError:
        logger.exception("Experiment aborted.")
        return int(ExitStatus.ROW_FAILURES)
    except KeyboardInterrupt:
        logger.info("Exited due to interrupt.")
        return int(ExitStatus.ROW_FAILURES)
    finally:
        for handler in handlers:
            logger.removeHandler(handler)
            handler.close()


if __name__ == "__main__":
    sys.exit(main())
