# config/model_loading.py
import json
from pathlib import Path
from typing import Any, Dict, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from volume.errors import ConfigError


ModelT = TypeVar("ModelT", bound=BaseModel)


def _read_source(source: Union[str, Path, Dict[str, Any], None]) -> Dict[str, Any]:
    if source is None:
        return {}
    if isinstance(source, dict):
        return source
    if isinstance(source, Path):
        return json.loads(source.read_text())

    text = str(source).strip()
    # JSON string input
    if text.startswith("{"):
        return json.loads(text)
    path = Path(text)
    if not path.is_file():
        raise ConfigError(f"config source is neither JSON nor an existing file: {text!r}")
    return json.loads(path.read_text())


def load_model(model_cls: Type[ModelT], source: Union[str, Path, Dict[str, Any], BaseModel, None]) -> ModelT:
    """Build a pydantic config model from flexible input

    Args:
        model_cls: Target model class
        source: Model instance, dict, JSON string, path to a JSON file, or
            None for defaults

    Returns:
        Validated model instance

    Raises:
        ConfigError: On invalid JSON or failed validation
    """
    if isinstance(source, model_cls):
        return source
    try:
        data = _read_source(source)
        return model_cls.model_validate(data)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{model_cls.__name__}: invalid JSON: {e}") from e
    except ValidationError as e:
        raise ConfigError(f"{model_cls.__name__}: {e}") from e


def validate_range(value, name: str, low_bound: float = None):
    """Check a (low, high) pair is ordered and above an optional bound"""
    low, high = value
    if low > high:
        raise ValueError(f"{name} must be ordered low <= high, got ({low}, {high})")
    if low_bound is not None and low < low_bound:
        raise ValueError(f"{name} must be >= {low_bound}, got {low}")
    return value
