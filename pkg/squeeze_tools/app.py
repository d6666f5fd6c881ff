"""Command line application: scenarios, flags, exit codes."""

from __future__ import annotations

import logging
import os
from argparse import ArgumentParser, Namespace
from dataclasses import dataclass
from inspect import isclass
from pathlib import Path
from time import perf_counter
from typing import TYPE_CHECKING, Dict, List, Mapping, Optional, Sequence, Type

from .config import (
    SCENARIOS,
    RunConfig,
    build_config,
    dump_config,
    env_overrides,
    load_config,
    parse_value,
)
from .errors import ConfigError, SqueezeError
from .logs import logger
from .presets import PRESETS, preset
from .results import Result, ResultText, parse_results

if TYPE_CHECKING:
    from .types import TCommand, TErrorHandler, TVCommand, TVErrorHandler

CONFIG_DUMP = "run"


@dataclass(frozen=True)
class Invocation:
    """A resolved run: the config and how to execute it."""

    config: RunConfig
    threads: int = 1
    logger: logging.Logger = logger

    @property
    def out(self) -> Path:
        return Path(self.config.out)


class App:
    """A helper to run the simulation scenarios from the command line.

    Features:

    * Scenario commands
    * Layered configuration (defaults, preset, file, environment, flags)
    * Exception management with exit codes

    :param debug: Enable debug mode (more logging, raise unhandled exceptions)
    :type debug: bool, False

    :param logger: Custom logger for the application
    :type logger: logging.Logger
    """

    exception_handlers: Dict[Type[BaseException], TErrorHandler]

    def __init__(self, *, debug: bool = False, logger: logging.Logger = logger):
        self.commands: Dict[str, TCommand] = {}
        self.logger = logger
        self.debug = debug

        def handle_squeeze_error(_: Invocation, exc: BaseException) -> int:
            self.logger.error("%s: %s", type(exc).__name__, exc)
            return exc.exit_code  # type: ignore[attr-defined]

        self.exception_handlers = {SqueezeError: handle_squeeze_error}

        # Handle unknown exceptions
        if not debug:

            def handle_unknown_exception(_: Invocation, exc: BaseException) -> int:
                self.logger.exception(exc)
                return SqueezeError.exit_code

            self.exception_handlers[Exception] = handle_unknown_exception

    def command(self, name: str):
        """Register a scenario command.

        .. code-block::

            @app.command("params")
            def params(invocation):
                return ResultJSON({...}, name="params")

        """
        if name not in SCENARIOS:
            raise ConfigError(f"Unknown scenario {name!r}, expected one of {SCENARIOS}")

        def recorder(fn: TVCommand) -> TVCommand:
            self.commands[name] = fn
            return fn

        return recorder

    def on_error(self, etype: Type[BaseException]):
        """Register an exception handler returning the exit code.

        .. code-block::

            @app.on_error(MemoryError)
            def out_of_memory(invocation, exc):
                return 4

        """
        assert isclass(etype), f"Invalid exception type: {etype}"
        assert issubclass(etype, BaseException), f"Invalid exception type: {etype}"

        def recorder(handler: TVErrorHandler) -> TVErrorHandler:
            self.exception_handlers[etype] = handler
            return handler

        return recorder

    def parser(self) -> ArgumentParser:
        parser = ArgumentParser(
            prog="squeeze-tools",
            description="Spin squeezing simulations of lattice clocks and magnets.",
        )
        subparsers = parser.add_subparsers(dest="scenario", required=True)
        for name in SCENARIOS:
            sub = subparsers.add_parser(name)
            sub.add_argument("--config", type=Path, help="key = value config file")
            sub.add_argument("--preset", choices=sorted(PRESETS), help="named scenario")
            sub.add_argument("--seed", type=int)
            sub.add_argument("--threads", type=int, default=1)
            sub.add_argument("--out", type=Path, help="output directory")
            sub.add_argument(
                "--set",
                dest="overrides",
                action="append",
                default=[],
                metavar="KEY=VALUE",
                help="override a config key",
            )
            sub.add_argument("--verbose", "-v", action="store_true")
            if name == "analyze":
                sub.add_argument("input", type=Path, nargs="?", help="raw trajectory dump")

        return parser

    def resolve(self, args: Namespace, environ: Mapping[str, str]) -> Invocation:
        """Layer the configuration sources of parsed arguments."""
        flags = {"scenario": args.scenario}
        for item in args.overrides:
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"Expected KEY=VALUE, got {item!r}")
            key = key.strip().lower().replace("-", "_")
            flags[key] = parse_value(key, value)

        for key in ("seed", "out", "input"):
            value = getattr(args, key, None)
            if value is not None:
                flags[key] = str(value) if isinstance(value, Path) else value

        if args.threads < 1:
            raise ConfigError(f"Threads must be positive: {args.threads}")

        config = build_config(
            preset(args.preset) if args.preset else None,
            load_config(args.config) if args.config else None,
            env_overrides(environ),
            flags,
        )
        return Invocation(config, threads=args.threads, logger=self.logger)

    def invoke(self, invocation: Invocation) -> List[Path]:
        """Run a resolved invocation and write its results."""
        config = invocation.config.check()
        command = self.commands.get(config.scenario)
        if command is None:
            raise ConfigError(f"No command registered for {config.scenario!r}")

        self.logger.info(
            "Start %s: seed=%d threads=%d", config.scenario, config.seed, invocation.threads
        )
        started = perf_counter()
        results: List[Result] = parse_results(command(invocation))
        results.append(ResultText(dump_config(config), name=CONFIG_DUMP))
        paths = [result.write(invocation.out) for result in results]
        self.logger.info(
            "Finish %s in %.2fs: %s",
            config.scenario,
            perf_counter() - started,
            ", ".join(path.name for path in paths),
        )
        return paths

    def run(self, invocation: Invocation) -> int:
        """Run and map exceptions to exit codes."""
        try:
            self.invoke(invocation)
        except Exception as exc:  # noqa: BLE001
            return self.handle(invocation, exc)
        return 0

    def handle(self, invocation: Optional[Invocation], exc: BaseException) -> int:
        for etype in type(exc).mro():
            if etype in self.exception_handlers:
                return self.exception_handlers[etype](invocation, exc)  # type: ignore[arg-type]
        raise exc

    def __call__(
        self,
        argv: Optional[Sequence[str]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> int:
        """Parse the arguments, run the scenario and return the exit code."""
        args = self.parser().parse_args(argv)
        if args.verbose:
            self.logger.setLevel(logging.DEBUG)

        try:
            invocation = self.resolve(args, os.environ if environ is None else environ)
        except Exception as exc:  # noqa: BLE001
            return self.handle(None, exc)

        return self.run(invocation)
