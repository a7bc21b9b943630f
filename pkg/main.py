#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
AttractorKit - Main Entry Point
"""

import argparse
import sys
from typing import List, Optional

from dotenv import load_dotenv

from attractorkit import __version__
from attractorkit.controller import PipelineController
from attractorkit.errors import EXIT_OK, AttractorKitError, ConfigError
from attractorkit.schemas import build_run_config
from attractorkit.utils.report_writer import ReportWriter
from config.settings import get_config
from utils.logging_utils import get_logger, setup_logging

SUBCOMMANDS = ("roots", "decompose", "certify", "simulate", "squeeze-verify", "cover", "boxdim", "report")


class ArgumentParser(argparse.ArgumentParser):
    """argparse that raises instead of exiting, so usage errors share the failure line"""

    def error(self, message):
        raise ConfigError(message, field_path="argv")


def parse_ladder(text: Optional[str]) -> Optional[List[float]]:
    if text is None:
        return None
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise ConfigError(f"eps ladder {text!r} is not a comma-separated list of numbers",
                          field_path="eps_ladder") from e


def parse_arguments(argv=None):
    """Parse command line arguments"""
    parser = ArgumentParser(prog="attractorkit",
                            description="Fractal-dimension bounds for exponential attractors of delay equations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=SUBCOMMANDS, help="Pipeline stage to run")
    parser.add_argument("--model", required=True, help="Path to the JSON model file")
    parser.add_argument("--out", default=None, help="Output directory")
    parser.add_argument("--seed", type=int, default=None, help="Base random seed")
    parser.add_argument("--alpha", type=float, default=None, help="Free parameter alpha (optimized if omitted)")
    parser.add_argument("--cut-m", type=int, default=None, help="Cut index m")
    parser.add_argument("--eps-ladder", default=None, help="Comma-separated box-counting scales")
    parser.add_argument("--format", choices=("json", "csv"), default=None, help="Format of tabular output")
    parser.add_argument("--config", default=None, help="Path to custom configuration file")
    return parser.parse_args(argv)


def execute(controller: PipelineController, writer: ReportWriter, subcommand: str, alpha: Optional[float]):
    """Run one subcommand and write its artifacts."""
    run = controller.echo()

    if subcommand == "roots":
        writer.write_json("roots.json", writer.envelope("roots", controller.roots(), run))

    elif subcommand == "decompose":
        decomp = controller.decomposition()
        payload = {"decomposition": decomp.to_dict()}
        if controller.kind == "rrd":
            payload["mode_spectrum"] = controller.memory.get("mode_spectrum").to_dict()
        writer.write_json("decomposition.json", writer.envelope("decomposition", payload, run))

    elif subcommand == "certify":
        controller.certificate(alpha)
        writer.write_json("certificate.json",
                          writer.envelope("certificate", controller.certification_summary(), run))

    elif subcommand == "simulate":
        frame = controller.simulate()
        writer.write_csv("trajectory.csv", frame)
        series = [column for column in frame.columns if column != "t"]
        writer.write_plot_manifest("plots.json", [
            {"title": "trajectory", "data": "trajectory.csv", "x": "t", "series": series}])

    elif subcommand == "squeeze-verify":
        controller.certificate(alpha)
        report = controller.squeezing_verification()
        writer.write_json("squeezing.json", writer.envelope("squeezing", {"verification": report.to_dict()}, run))
        writer.write_table("squeezing_rows", report.rows)

    elif subcommand == "cover":
        controller.certificate(alpha)
        result = controller.covering_experiment()
        payload = {"tree": result["tree"].to_dict(), "attraction": result["attraction"].to_dict()}
        writer.write_json("covering.json", writer.envelope("covering", payload, run))
        writer.write_table("attraction_rows", result["attraction"].rows)

    elif subcommand == "boxdim":
        result = controller.box_dimension()
        writer.write_json("boxdim.json", writer.envelope("boxdim", {"box_counting": result.to_dict()}, run))
        writer.write_csv("boxdim.csv", result.to_frame())
        writer.write_plot_manifest("plots.json", [
            {"title": "box counting", "data": "boxdim.csv", "x": "eps", "series": ["count"],
             "log_x": True, "log_y": True}])

    elif subcommand == "report":
        controller.certificate(alpha)
        writer.write_json("report.json", writer.envelope("report", controller.certification_report(), run))


def main(argv=None) -> int:
    """Main entry point for AttractorKit"""
    load_dotenv()
    try:
        args = parse_arguments(argv)
        config = get_config(args.config)
    except AttractorKitError as e:
        print(e.failure_line(), file=sys.stderr)
        return e.exit_status

    setup_logging(config["logging"]["level"], config["logging"].get("file"))
    logger = get_logger("main")

    try:
        settings = build_run_config(
            subcommand=args.subcommand,
            model=args.model,
            out=args.out or config["output"]["directory"],
            seed=args.seed if args.seed is not None else config["run"]["seed"],
            alpha=args.alpha,
            cut_m=args.cut_m,
            eps_ladder=parse_ladder(args.eps_ladder),
            format=args.format or config["output"]["format"],
        )
        logger.info(f"Starting AttractorKit {__version__}: {settings.subcommand} on {settings.model}")
        controller = PipelineController(config, settings.seed)
        controller.load(settings.model)
        controller.set_overrides(settings.cut_m, settings.eps_ladder)
        writer = ReportWriter(settings.out, settings.format, config["toolkit"]["schema_version"], __version__)
        execute(controller, writer, settings.subcommand, settings.alpha)
    except AttractorKitError as e:
        print(e.failure_line(), file=sys.stderr)
        return e.exit_status

    for path in writer.written:
        print(path)
    logger.info("AttractorKit run complete")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
