# config/logging_config.py
import logging
import structlog
from pathlib import Path
import sys


TRACE_LOGGER_NAME = "descent_trace"


def setup_logging(
    log_level: str = "INFO",
    log_dir: str = "logs",
    enable_file_logging: bool = False,
    enable_console_logging: bool = True
) -> None:
    """Setup structured logging for the loss bench

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_dir: Directory to store log files
        enable_file_logging: Whether to log to files
        enable_console_logging: Whether to log to the console (stderr)
    """
    level = getattr(logging, log_level.upper(), logging.INFO)

    if enable_file_logging:
        Path(log_dir).mkdir(parents=True, exist_ok=True)

    # Clear existing handlers to prevent duplicate logging
    root_logger = logging.getLogger()
    root_logger.handlers.clear()

    # Descent trace gets its own file and never reaches the console
    trace_logger = logging.getLogger(TRACE_LOGGER_NAME)
    trace_logger.handlers.clear()
    trace_logger.setLevel(level)
    trace_logger.propagate = False
    if enable_file_logging:
        trace_handler = logging.FileHandler(f"{log_dir}/{TRACE_LOGGER_NAME}.log")
        trace_handler.setFormatter(logging.Formatter('%(asctime)s - %(message)s'))
        trace_logger.addHandler(trace_handler)
    else:
        trace_logger.addHandler(logging.NullHandler())

    # Configure structlog
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="ISO"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer()
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    # Configure standard library logging; stdout is reserved for CLI results
    handlers = []

    if enable_console_logging:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        handlers.append(console_handler)

    if enable_file_logging:
        file_handler = logging.FileHandler(f"{log_dir}/loss_bench.log")
        file_handler.setLevel(level)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        ))
        handlers.append(file_handler)

    if not handlers:
        handlers.append(logging.NullHandler())

    logging.basicConfig(
        level=level,
        handlers=handlers,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        force=True  # Force reconfiguration even if basicConfig was called before
    )


def get_logger(name: str):
    """Get a logger

    Args:
        name: Logger name

    Returns:
        A structlog logger, or the plain standard logger for the descent trace
    """
    if name == TRACE_LOGGER_NAME:
        return logging.getLogger(name)

    return structlog.get_logger(name)
