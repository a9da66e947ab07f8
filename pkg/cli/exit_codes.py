# cli/exit_codes.py
import json
from enum import IntEnum

from pydantic import ValidationError

from volume.errors import ConfigError, GeometryError, MhaFormatError, PairingError, VolumeValueError


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    IO = 2
    VALIDATION = 3
    PAIRING = 4
    CONFIG = 5


def exit_code_for(error: BaseException) -> ExitCode:
    """Stable exit code of an exception raised by a command"""
    if isinstance(error, PairingError):
        return ExitCode.PAIRING
    if isinstance(error, (ConfigError, json.JSONDecodeError, ValidationError)):
        return ExitCode.CONFIG
    if isinstance(error, (MhaFormatError, OSError)):
        return ExitCode.IO
    if isinstance(error, (GeometryError, VolumeValueError)):
        return ExitCode.VALIDATION
    return ExitCode.FAILED
