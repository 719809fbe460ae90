# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
import json
import logging
from pathlib import Path
from typing import Any, Optional, Union

from dcb_allocation_core.core.exceptions import ScenarioError
from dcb_allocation_core.core.models.params import MacPhyParams
from dcb_allocation_core.core.models.scenario import ScenarioFile, SweepSpec
from dcb_allocation_core.core.scenarios import PRESETS, preset_dict
from dcb_allocation_core.utils.file_ops import FileOperations

logger = logging.getLogger(__name__)


class ConfigService:

    def __init__(self, params_path: Optional[Path] = None):
        self.params_path = Path(params_path) if params_path is not None else None
        self._params: Optional[MacPhyParams] = None

    def load_parameters(self) -> MacPhyParams:
        if self.params_path is None:
            self._params = MacPhyParams()
        else:
            data = self._read(self.params_path)
            self._params = self._parse(MacPhyParams.from_dict, data, self.params_path)
            logger.info("loaded parameters from %s", self.params_path)
        return self._params

    def get_parameters(self) -> MacPhyParams:
        if self._params is None:
            return self.load_parameters()
        return self._params

    def explicit_parameters(self) -> Optional[MacPhyParams]:
        """Parameters from --params, or None so scenario-embedded ones apply."""
        if self.params_path is None:
            return None
        return self.get_parameters()

    def load_scenario(self, source: Union[str, Path]) -> ScenarioFile:
        """Scenario from a JSON file, or from a preset name such as "bonding-pair"."""
        text = str(source)
        if text in PRESETS and not Path(text).exists():
            return ScenarioFile.from_dict(preset_dict(text), source=text)
        path = Path(text)
        data = self._read(path)
        scenario = self._parse(lambda d: ScenarioFile.from_dict(d, source=str(path)), data, path)
        logger.info("loaded scenario %s with %d WLANs", path, len(scenario.wlans))
        return scenario

    def load_sweep(self, path: Path) -> SweepSpec:
        data = self._read(Path(path))
        return self._parse(SweepSpec.from_dict, data, Path(path))

    @staticmethod
    def _read(path: Path) -> Any:
        data, error = FileOperations.read_json(path)
        if error is None:
            return data
        if isinstance(error, json.JSONDecodeError):
            raise ScenarioError(f"{path}: invalid JSON: {error.msg}", line=error.lineno)
        raise ScenarioError(f"cannot read {path}: {error}")

    @staticmethod
    def _parse(parser, data: Any, path: Path):
        try:
            return parser(data)
        except ScenarioError as e:
            raise ScenarioError(f"{path}: {e.message}", field=e.field, line=e.line)
