"""Unit tests for the error hierarchy and logging helpers."""

import json
import logging

import pytest

from simplehom.config import LoggingConfig
from simplehom.exceptions import (
    BudgetExceededError,
    ErrorContext,
    ErrorSeverity,
    InvalidParameterError,
    SimplehomError,
    VerificationFailure,
    WordSyntaxError,
    format_exception_chain,
)
from simplehom.logging import LoggingContext, StructuredFormatter, get_logger, log_function_call, setup_logging


class TestExceptions:
    """Tests for exception classes."""

    def test_budget_carries_partial_count(self):
        err = BudgetExceededError("too many", partial_count=12, context={"level": 3})
        assert err.partial_count == 12
        assert err.context == {"level": 3, "partial_count": 12}
        assert err.severity is ErrorSeverity.LOW

    def test_word_syntax_is_usage_error(self):
        err = WordSyntaxError("bad", position=4, text="a b x")
        assert isinstance(err, InvalidParameterError)
        assert err.context["position"] == 4

    def test_error_context(self):
        """Context is merged into errors leaving the block."""
        with pytest.raises(VerificationFailure) as exc_info:
            with ErrorContext(check="depth_law"):
                raise VerificationFailure("broken", context={"k": 2})
        assert exc_info.value.context == {"k": 2, "check": "depth_law"}

    def test_format_chain(self):
        """Causes are rendered below the error."""
        err = SimplehomError("outer", cause=ValueError("inner"), context={"p": 7})
        text = format_exception_chain(err)
        assert "SimplehomError: outer" in text
        assert "Context: {'p': 7}" in text
        assert "ValueError: inner" in text


class TestLogging:
    """Tests for logging setup."""

    def test_console_goes_to_stderr(self):
        """Reports own stdout; logs use stderr."""
        import sys

        setup_logging(LoggingConfig(level="INFO"))
        handlers = logging.getLogger().handlers
        assert len(handlers) == 1
        assert handlers[0].stream is sys.stderr

    def test_file_handler(self, tmp_path):
        """A log file gets JSON lines."""
        path = tmp_path / "logs" / "run.log"
        setup_logging(LoggingConfig(level="INFO", file_path=str(path), console_output=False))
        logger = get_logger("simplehom.test")
        with LoggingContext(logger, check="trace_identity"):
            logger.info("hello", extra={"k": 3})
        for handler in logging.getLogger().handlers:
            handler.flush()
        record = json.loads(path.read_text().splitlines()[-1])
        assert record["message"] == "hello"
        assert record["k"] == 3
        assert record["check"] == "trace_identity"
        for handler in logging.getLogger().handlers:
            handler.close()
        logging.getLogger().handlers.clear()

    def test_structured_formatter(self):
        record = logging.LogRecord("x", logging.INFO, "f.py", 1, "msg %s", ("a",), None)
        data = json.loads(StructuredFormatter().format(record))
        assert data["message"] == "msg a"
        assert data["level"] == "INFO"

    def test_log_function_call(self):
        """Wrapped functions keep their result and name."""

        @log_function_call
        def double(n):
            return 2 * n

        assert double(4) == 8
        assert double.__name__ == "double"
