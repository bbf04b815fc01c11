"""Tests for logging and worker pool helpers."""

import logging
import logging.handlers
from unittest.mock import MagicMock

import pytest
import tistar.utils.logging as logging_module
from tistar.utils.logging import (
    DEFAULT_FILE_FORMAT,
    log_error_with_context,
    setup_logging,
    timed,
)
from tistar.utils.parallel import chunk_bounds, chunked_map, configure_workers, get_workers


class TestSetupLogging:
    """Test handler installation."""

    def setup_method(self):
        """Remember the root logger state."""
        self.root = logging.getLogger()
        self.saved_handlers = self.root.handlers[:]
        self.saved_level = self.root.level

    def teardown_method(self):
        """Restore the root logger state."""
        for handler in self.root.handlers[:]:
            self.root.removeHandler(handler)
            if handler not in self.saved_handlers:
                handler.close()
        for handler in self.saved_handlers:
            self.root.addHandler(handler)
        self.root.setLevel(self.saved_level)

    def _file_handler(self) -> logging.handlers.RotatingFileHandler:
        handlers = [
            h for h in self.root.handlers if isinstance(h, logging.handlers.RotatingFileHandler)
        ]
        assert len(handlers) == 1
        return handlers[0]

    def test_file_format_and_backups(self, tmp_path, monkeypatch):
        """Test the file handler uses the given format and backup count."""
        monkeypatch.setattr(logging_module, "_configured", False)
        log_file = tmp_path / "logs" / "run.log"
        setup_logging(log_file=str(log_file), fmt="%(levelname)s|%(message)s", backup_count=7)

        handler = self._file_handler()
        assert handler.backupCount == 7
        logging.getLogger("tistar.test").warning("hello")
        handler.flush()
        assert log_file.read_text().strip() == "WARNING|hello"

    def test_defaults(self, tmp_path, monkeypatch):
        """Test the default file format and backup count."""
        monkeypatch.setattr(logging_module, "_configured", False)
        setup_logging(log_file=str(tmp_path / "run.log"), level="warning")

        handler = self._file_handler()
        assert handler.backupCount == 3
        assert handler.formatter._fmt == DEFAULT_FILE_FORMAT
        assert self.root.level == logging.WARNING

    def test_configured_once(self, tmp_path, monkeypatch):
        """Test later calls leave the first configuration in place."""
        monkeypatch.setattr(logging_module, "_configured", False)
        setup_logging(level="ERROR")
        setup_logging(log_file=str(tmp_path / "late.log"), level="DEBUG")
        assert self.root.level == logging.ERROR
        assert not (tmp_path / "late.log").exists()


class TestLoggingHelpers:
    """Test timing and error context helpers."""

    def test_timed_logs_duration(self, caplog):
        """Test a timed block is reported on the performance logger."""
        caplog.set_level(logging.INFO, logger="performance")
        with timed("star", grid="2,9,0.5"):
            pass
        records = [r for r in caplog.records if r.name == "performance"]
        assert len(records) == 1
        assert records[0].getMessage().startswith("star took ")
        assert records[0].getMessage().endswith("grid=2,9,0.5")

    def test_timed_logs_on_error(self, caplog):
        """Test the duration is logged even when the block raises."""
        caplog.set_level(logging.INFO, logger="performance")
        with pytest.raises(RuntimeError):
            with timed("graph amplitude"):
                raise RuntimeError("boom")
        assert any("graph amplitude took" in r.getMessage() for r in caplog.records)

    def test_error_with_context(self):
        """Test errors are logged with type, context and traceback."""
        logger = MagicMock()
        error = RuntimeError("overflow in loop sum")
        log_error_with_context(logger, error, {"action": "Loop scan", "points": 3})

        logger.error.assert_called_once()
        message = logger.error.call_args.args[0]
        assert message == "RuntimeError: overflow in loop sum | action=Loop scan points=3"
        assert logger.error.call_args.kwargs["exc_info"] is error


class TestWorkers:
    """Test the worker cap and chunked map."""

    def test_worker_cap(self):
        """Test configure_workers sets the cap and rejects zero."""
        configure_workers(3)
        assert get_workers() == 3
        with pytest.raises(ValueError):
            configure_workers(0)
        assert get_workers() == 3

    def test_chunk_bounds(self):
        """Test slices cover the range in order."""
        assert chunk_bounds(7, 3) == [(0, 3), (3, 6), (6, 7)]
        assert chunk_bounds(0, 3) == []

    @pytest.mark.parametrize("threads", [1, 4])
    def test_chunked_map_keeps_order(self, threads):
        """Test results come back in slice order for any worker cap."""
        configure_workers(threads)
        result = chunked_map(lambda start, stop: list(range(start, stop)), 10, chunk_size=3)
        assert result == [[0, 1, 2], [3, 4, 5], [6, 7, 8], [9]]
