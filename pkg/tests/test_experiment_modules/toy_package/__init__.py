from base_experiment import BaseExperiment

from .toy_helpers import cube


class ToyPackaged(BaseExperiment):
    name = "toy-package"
    description = "Experiment living in a package."
    default_config = {"model": {"x": 2.0}}

    async def run(self):
        self.write_json("toy_package.json", {"cube": cube(self.model.x)})
