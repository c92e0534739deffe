import math
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Tuple

import torch

from lib import data, entanglement, metrology, minunc, operators, regions, states
from lib.config import config
from lib.structures import QuantumState
from lib.utils import logger, split_seed
from lib.utils.exceptions import ConfigError, FiniteQPError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

COMMANDS: Dict[str, Tuple[Optional[str], ...]] = {
    "ops": (None,),
    "region": ("trace-det", "extremes"),
    "jnr": ("support", "cross"),
    "minunc": ("solve",),
    "metrology": ("scan", "sim"),
    "mom-sim": (None,),
    "entangle": ("witness", "thermal"),
}


class RunConfig(NamedTuple):
    """One CLI invocation. Numeric settings live in the global config; `options` holds per-command flags."""
    command: str
    action: Optional[str] = None
    dims: Tuple[int, ...] = (3,)
    options: Dict = {}

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError("command", f"unknown command {self.command!r}")
        if self.action not in COMMANDS[self.command]:
            raise ConfigError("action", f"{self.command} expects one of {COMMANDS[self.command]}, got {self.action!r}")
        if len(self.dims) == 0:
            raise ConfigError("dim", "no dimension given")
        for d in self.dims:
            if d < 2 or d > config.OPERATORS.MAX_DIM:
                raise ConfigError("dim", f"dimension {d} outside [2, {config.OPERATORS.MAX_DIM}]")
        if config.OUTPUT.FORMAT not in ("csv", "json"):
            raise ConfigError("OUTPUT.FORMAT", f"expected csv or json, got {config.OUTPUT.FORMAT!r}")
        if config.SOLVER.RESTARTS < 1:
            raise ConfigError("SOLVER.RESTARTS", "need at least one restart")

    @property
    def name(self) -> str:
        return self.command if self.action is None else f"{self.command} {self.action}"


class Runner:
    """Dispatches a RunConfig to the owning module and writes its artifacts."""

    def __init__(self, run_config: RunConfig):
        self.run_config = run_config
        self.output_path = Path(config.OUTPUT_DIR)
        self.logger = logger
        self.artifacts: List[Path] = []
        self.handlers: Dict[Tuple[str, Optional[str]], Callable[[], bool]] = {
            ("ops", None): self.do_ops,
            ("region", "trace-det"): self.do_region_trace_det,
            ("region", "extremes"): self.do_region_extremes,
            ("jnr", "support"): self.do_jnr_support,
            ("jnr", "cross"): self.do_jnr_cross,
            ("minunc", "solve"): self.do_minunc_solve,
            ("metrology", "scan"): self.do_metrology_scan,
            ("metrology", "sim"): self.do_metrology_sim,
            ("mom-sim", None): self.do_metrology_sim,
            ("entangle", "witness"): self.do_entangle_witness,
            ("entangle", "thermal"): self.do_entangle_thermal,
        }

    @property
    def options(self) -> Dict:
        return self.run_config.options

    @property
    def seed(self) -> int:
        return config.RUNTIME.SEED

    def run(self) -> int:
        try:
            self.run_config.validate()
        except ConfigError as error:
            self.logger.error(f"invalid configuration: {error}")
            return EXIT_INVALID

        self.output_path.mkdir(parents=True, exist_ok=True)
        handler = self.handlers[(self.run_config.command, self.run_config.action)]
        try:
            converged = handler()
        except (ConfigError, FiniteQPError) as error:
            self.logger.error(f"{self.run_config.name}: {error}")
            return EXIT_INVALID

        for artifact in self.artifacts:
            self.logger.info(f"wrote {artifact}")
        if not converged:
            self.logger.warning(f"{self.run_config.name}: some results did not converge, see the converged column")
            return EXIT_NOT_CONVERGED
        return EXIT_OK

    # ------------------------------------------------------------------ output
    def _target(self, stem: str) -> Path:
        return self.output_path / stem

    def write_table(self, stem: str, columns, rows) -> None:
        self.artifacts.append(data.write_table(self._target(stem), columns, rows, config.OUTPUT.FORMAT, config,
                                               self.run_config.name))

    def write_json(self, stem: str, payload) -> None:
        target = data.write_json(self._target(stem).with_suffix(".json"), payload)
        data.write_sidecar(target, config, self.run_config.name)
        self.artifacts.append(target)

    # ---------------------------------------------------------------- commands
    def do_ops(self) -> bool:
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            quadratics = operators.build_quadratics(pair)
            payload = {
                "dim": d,
                "index_offsets": pair.index_offsets,
                "q": pair.q,
                "p": pair.p,
                "fourier": pair.fourier,
                "commutator": operators.commutator_qp(pair),
                "t": quadratics.t,
                "g1": quadratics.g1,
                "g2": quadratics.g2,
                "g3": quadratics.g3,
                "p_closed_form_error": (pair.p.matrix - operators.closed_form_momentum(d)).abs().max().item(),
                "oscillator_levels": operators.oscillator_levels(pair),
            }
            if self.options.get("dump", False):
                self.logger.info(f"Q (d={d}):\n{pair.q.matrix}")
                self.logger.info(f"P (d={d}):\n{pair.p.matrix}")
            self.write_json(f"operators_d{d}", payload)
        return True

    def do_region_trace_det(self) -> bool:
        columns = [("d", ""), ("rank", ""), ("t_target", "1"), ("trace", "1"), ("det", "1"), ("direction", ""),
                   ("converged", ""), ("restarts_used", ""), ("boundary", "")]
        rank = self.options.get("rank", 1)
        samples = self.options.get("samples", 40)
        quantity = self.options.get("quantity", "hermitian")

        rows, converged = [], True
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            if quantity == "hermitian":
                results = regions.trace_det_region(pair, samples, rank, seed=self.seed)
            else:
                tau_min, tau_max = regions.trace_bounds(pair)
                results = [regions.extremize_det_at_trace(pair, t, rank, direction, seed=split_seed(self.seed, i, j),
                                                          quantity=quantity)
                           for i, t in enumerate(torch.linspace(tau_min, tau_max, samples, dtype=torch.float64).tolist())
                           for j, direction in enumerate(regions.DIRECTIONS)]
            for s in results:
                rows.append((d, s.rank, s.t_target, s.trace, s.det, s.direction, s.converged, s.restarts_used,
                             s.boundary))
                converged &= s.converged
        self.write_table(f"region_{quantity}_rank{rank}", columns, rows)
        return converged

    def do_region_extremes(self) -> bool:
        columns = [("d", ""), ("kind", ""), ("value", "1"), ("q_center", "1"), ("p_center", "1"),
                   ("orbit_size", ""), ("converged", "")]
        rows, converged = [], True
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            for kind, extremum in (("min", regions.min_sum_variances(pair)), ("max", regions.max_sum_variances(pair))):
                for point in extremum.multiplicity_orbit:
                    rows.append((d, kind, extremum.value, point.centers[0], point.centers[1],
                                 len(extremum.multiplicity_orbit), extremum.converged))
                converged &= extremum.converged
        self.write_table("extremes", columns, rows)
        return converged

    def do_jnr_support(self) -> bool:
        count = self.options.get("directions", 200)
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            quadratics = operators.build_quadratics(pair)
            ops = [pair.q, pair.p, quadratics.t]
            points = [regions.jnr_support(ops, direction)
                      for direction in regions.random_directions(count, len(ops), self.seed)]
            self.write_json(f"jnr_support_d{d}", {
                "dim": d,
                "operators": ["Q", "P", "T"],
                "directions": torch.stack([p.direction for p in points]),
                "points": torch.stack([p.expectation_tuple for p in points]),
                "degenerate": [p.degenerate for p in points],
            })
        return True

    def do_jnr_cross(self) -> bool:
        converged = True
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            t = self.options.get("t")
            if t is None:
                tau_min, tau_max = regions.trace_bounds(pair)
                t = 0.5 * (tau_min + tau_max)
            section = regions.jnr_cross_section(pair, t, self.options.get("directions", 64), self.seed)
            converged &= section.converged
            self.write_json(f"jnr_cross_d{d}", {
                "dim": d,
                "t": section.t,
                "points": section.points,
                "dets": section.dets,
                "det_min": section.det_min,
                "det_max": section.det_max,
                "origin_inside": section.origin_inside,
                "converged": section.converged,
            })
        return converged

    def do_minunc_solve(self) -> bool:
        lam = complex(self.options.get("lam_re", 1.0), self.options.get("lam_im", 0.0))
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            report = minunc.minunc_report(pair.q, pair.p, lam)
            solutions = []
            for solution in report.solutions:
                solutions.append({
                    "z": solution.eigenvalue_z,
                    "state": solution.state,
                    "var_a": solution.covariances[0],
                    "var_b": solution.covariances[1],
                    "cov_ab": solution.covariances[2],
                    "commutator_expectation": solution.commutator_expectation,
                    "residual": solution.residual,
                    "parallelism_residual": minunc.verify_parallelism(solution),
                    "saturation_relations": minunc.saturation_relations(solution),
                    "eigenstate_of": solution.eigenstate_of,
                })
            self.write_json(f"minunc_d{d}", {
                "dim": d,
                "lambda": lam,
                "solutions": solutions,
                "discarded": report.discarded,
                "rejected": report.rejected,
                "defective": report.defective,
            })
        return True

    def do_metrology_scan(self) -> bool:
        scan = metrology.accuracy_scan(self.run_config.dims, seed=self.seed)
        columns = [("d", ""), ("A_d", "1"), ("A_d_c", "1"), ("A_d_M", "1"), ("delta", "1"), ("slope", "1"),
                   ("saturability_residual", "1"), ("converged", "")]
        rows = [(r.dim, r.a_d, r.a_d_c, r.a_d_m, r.gap_delta, scan.slope, r.saturability_residual, r.converged)
                for r in scan.reports]
        self.write_table("metrology_scan", columns, rows)
        if not math.isnan(scan.slope):
            self.logger.info(f"log-log slope of A_d: {scan.slope:.6f}")
        return all(r.converged for r in scan.reports)

    def _input_state(self, pair) -> QuantumState:
        if pair.dim == 3 and self.options.get("state", "vacuum3") == "vacuum3":
            return states.vacuum_d3()
        return regions.min_sum_variances(pair).state

    def do_metrology_sim(self) -> bool:
        columns = [("d", ""), ("nu", ""), ("trials", ""), ("empirical_mse", "rad^2"), ("predicted_mse", "rad^2"),
                   ("ratio", "1")]
        nu = self.options.get("shots") or config.METROLOGY.SHOTS
        trials = self.options.get("trials") or config.METROLOGY.TRIALS

        rows = []
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            state = self._input_state(pair)
            if self.options.get("multi", False):
                result = metrology.mom_simulate_multi(state, pair, (self.options.get("theta", 0.0), 0.0), nu, trials,
                                                      self.seed)
            else:
                measured = pair.q if self.options.get("measured", "q") == "q" else pair.p
                generator = pair.p if self.options.get("generator", "p") == "p" else pair.q
                result = metrology.mom_simulate_single(state, measured, generator, self.options.get("theta", 0.0),
                                                       nu, trials, self.seed)
            rows.append((d, result.nu, result.trials, result.empirical_mse, result.predicted_mse, result.ratio))
            self.logger.info(f"d={d}: empirical/predicted MSE ratio {result.ratio:.4f}")
        self.write_table("mom_sim", columns, rows)
        return True

    def do_entangle_witness(self) -> bool:
        columns = [("d", ""), ("a", "1"), ("b", "1"), ("delta_tilde", "1"), ("verdict", "")]
        b_values = None
        if self.options.get("b_min") is not None and self.options.get("b_max") is not None:
            b_values = torch.linspace(self.options["b_min"], self.options["b_max"],
                                      config.ENTANGLEMENT.SQUEEZING_SAMPLES, dtype=torch.float64).tolist()
        rows = []
        for d in self.run_config.dims:
            for row in entanglement.squeezing_scan(d, self.options.get("a"), b_values):
                rows.append(tuple(row))
        self.write_table("witness_squeezing", columns, rows)
        return True

    def do_entangle_thermal(self) -> bool:
        columns = [("d", ""), ("T", "1"), ("delta_tilde", "1"), ("verdict", "")]
        rows = []
        for d in self.run_config.dims:
            pair = operators.build_canonical_pair(d)
            scan = entanglement.thermal_scan(pair, step=self.options.get("step"))
            rows.extend(tuple(row) for row in scan)
            detected = [row.temperature for row in scan if row.verdict == entanglement.ENTANGLED]
            threshold = f"{max(detected):.2f}" if detected else "none detected"
            self.logger.info(f"thermal threshold d={d}: {threshold}")
        self.write_table("thermal_scan", columns, rows)
        return True

