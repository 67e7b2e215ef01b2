"""
Provides loading and validation of JSON project configurations.

A configuration is one JSON object with the blocks ``family``, ``bounds``,
``certificate``, ``simulation`` and ``signal``. Only ``family`` is required.
Every problem found is collected with its field path and raised together
as a :class:`~psiss.exceptions.ConfigError`.

.. code-block:: python

    from psiss.config import load_config

    config = load_config("example_sec4")   # bundled, or a path to a file
    print(config.family.lam(1))            # 1.75

"""

import json
import math
from collections import namedtuple
from importlib import resources
from pathlib import Path

from .exceptions import ConfigError, PSISSException
from .family import ClassKInfinity, SubsystemSpec, SwitchedFamily
from .ratefn import RateFunction, RateTerm
from .signal import RateBound, RateBoundSet, SwitchingSignal
from .validators import Validators

BUNDLED_PACKAGE = "psiss.data"
GENERATORS = ("admissible", "worst_case", "adt")

ProjectConfig = namedtuple(
    "ProjectConfig",
    ["family", "bounds", "certificate", "simulation", "signal", "source"],
)
CertificateConfig = namedtuple(
    "CertificateConfig",
    [
        "rho",
        "c1",
        "horizons",
        "horizon",
        "grid_step",
        "s_max",
        "stated_lhs",
        "state_box",
        "input_box",
        "n_samples",
    ],
)
SimulationConfig = namedtuple(
    "SimulationConfig",
    ["inputs", "t_end", "dt", "box", "n_runs", "seed", "x0"],
)
SignalConfig = namedtuple("SignalConfig", ["signal", "generator", "params"])


def bundled_configs() -> list:
    """Names of the configurations shipped in ``psiss/data``."""

    folder = resources.files(BUNDLED_PACKAGE)
    return sorted(
        entry.name[: -len(".json")]
        for entry in folder.iterdir()
        if entry.name.endswith(".json")
    )


def _read(source) -> str:
    path = Path(source)
    if path.is_file():
        try:
            return path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError([f"{source}: {e.strerror}"]) from None

    if str(source) in bundled_configs():
        entry = resources.files(BUNDLED_PACKAGE).joinpath(f"{source}.json")
        return entry.read_text(encoding="utf-8")

    raise ConfigError([f"{source}: no such file or bundled configuration"])


def load_config(source) -> "ProjectConfig":
    """
    Load and validate a configuration file or bundled configuration name.

    :raises ConfigError: with every error found, each prefixed by its field
        path (``signal.modes[2]: ...``).
    """

    text = _read(source)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError([f"document: invalid JSON ({e.msg} at line {e.lineno})"])

    if not isinstance(document, dict):
        raise ConfigError(["document: expected a JSON object"])

    loader = _Loader()
    config = loader.load(document, str(source))
    if loader.errors:
        raise ConfigError(loader.errors)

    return config


class _Loader:
    """Walks a configuration document, collecting errors instead of stopping."""

    def __init__(self):
        self.errors = []

    def error(self, path, message):
        self.errors.append(f"{path}: {message}")

    def block(self, document, key, required=False):
        value = document.get(key)
        if value is None:
            if required:
                self.error(key, "missing")
            return None
        if not isinstance(value, dict):
            self.error(key, "expected an object")
            return None
        return value

    def field(self, data, key, path, default=None, required=True):
        if key in data and data[key] is not None:
            return data[key]
        if required:
            self.error(f"{path}.{key}", "missing")
        return default

    def number(self, value, path, minimum=None, strict=False, nonzero=False):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.error(path, "expected a number")
            return None
        if not math.isfinite(value):
            self.error(path, "expected a finite number")
            return None
        if minimum is not None and (value <= minimum if strict else value < minimum):
            self.error(path, f"expected {'>' if strict else '>='} {minimum!r}")
            return None
        if nonzero and value == 0:
            self.error(path, "expected a nonzero number")
            return None
        return float(value)

    def integer(self, value, path, minimum=None):
        if isinstance(value, bool) or not isinstance(value, int):
            self.error(path, "expected an integer")
            return None
        if minimum is not None and value < minimum:
            self.error(path, f"expected >= {minimum}")
            return None
        return value

    def listing(self, value, path):
        if not isinstance(value, list):
            self.error(path, "expected a list")
            return []
        return value

    def load(self, document, source) -> ProjectConfig:
        family = self.family(self.block(document, "family", required=True))

        bounds_block = self.block(document, "bounds")
        bounds = self.bounds(bounds_block, family) if bounds_block else None

        certificate_block = self.block(document, "certificate")
        certificate = None
        if certificate_block is not None:
            certificate = self.certificate(certificate_block)

        simulation_block = self.block(document, "simulation")
        simulation = None
        if simulation_block is not None:
            simulation = self.simulation(simulation_block, family)

        signal_block = self.block(document, "signal")
        signal = self.signal(signal_block, family) if signal_block else None

        return ProjectConfig(family, bounds, certificate, simulation, signal, source)

    def family(self, data):
        if data is None:
            return None

        state_dim = self.integer(
            self.field(data, "state_dim", "family"), "family.state_dim", minimum=1
        )
        input_dim = self.integer(
            self.field(data, "input_dim", "family", default=0, required=False),
            "family.input_dim",
            minimum=0,
        )
        count = len(self.errors)

        subsystems = []
        modes = self.listing(self.field(data, "modes", "family"), "family.modes")
        for k, mode in enumerate(modes):
            path = f"family.modes[{k}]"
            if not isinstance(mode, dict):
                self.error(path, "expected an object")
                continue
            index = self.integer(self.field(mode, "index", path), f"{path}.index")
            f = self.listing(self.field(mode, "f", path), f"{path}.f")
            V = self.field(mode, "V", path)
            lam = self.number(
                self.field(mode, "lambda", path), f"{path}.lambda", nonzero=True
            )
            if None in (index, V, lam, state_dim, input_dim):
                continue
            if not all(isinstance(text, str) for text in f) or not isinstance(V, str):
                self.error(path, "f and V expected to be expression strings")
                continue
            try:
                sub = SubsystemSpec.parse(index, f, V, lam, state_dim, input_dim)
                subsystems.append(sub)
            except PSISSException as e:
                self.error(path, str(e))

        transitions = {}
        entries = self.field(data, "transitions", "family", default=[], required=False)
        for k, entry in enumerate(self.listing(entries, "family.transitions")):
            path = f"family.transitions[{k}]"
            if not isinstance(entry, dict):
                self.error(path, "expected an object")
                continue
            m = self.integer(self.field(entry, "from", path), f"{path}.from")
            n = self.integer(self.field(entry, "to", path), f"{path}.to")
            mu = self.number(
                self.field(entry, "mu", path), f"{path}.mu", 0, strict=True
            )
            if None in (m, n, mu):
                continue
            if (m, n) in transitions:
                self.error(path, f"transition ({m}, {n}) declared twice")
            transitions[(m, n)] = mu

        alphas = {}
        for key in ("alpha_lower", "alpha_upper"):
            entry = data.get(key)
            if entry is None:
                continue
            path = f"family.{key}"
            if not isinstance(entry, dict):
                self.error(path, "expected an object with a and p")
                continue
            a = self.number(self.field(entry, "a", path), f"{path}.a", 0, strict=True)
            p = self.number(self.field(entry, "p", path), f"{path}.p", 0, strict=True)
            if a is not None and p is not None:
                alphas[key] = ClassKInfinity(a, p)

        gamma = self.field(data, "gamma", "family", default="0", required=False)
        if not isinstance(gamma, str):
            self.error("family.gamma", "expected an expression string")

        if len(self.errors) > count or state_dim is None or input_dim is None:
            return None

        try:
            return SwitchedFamily(
                subsystems,
                state_dim,
                input_dim,
                transitions=transitions,
                gamma=gamma,
                **alphas,
            )
        except PSISSException as e:
            self.error("family", str(e))
            return None

    def rate(self, data, path):
        if not isinstance(data, dict):
            self.error(path, "expected an object with terms and offset")
            return None

        count = len(self.errors)
        terms = []
        for k, term in enumerate(self.listing(data.get("terms", []), f"{path}.terms")):
            term_path = f"{path}.terms[{k}]"
            if not isinstance(term, dict):
                self.error(term_path, "expected an object with coef and power")
                continue
            coef = self.number(
                self.field(term, "coef", term_path), f"{term_path}.coef", 0
            )
            power = self.number(
                self.field(term, "power", term_path),
                f"{term_path}.power",
                0,
                strict=True,
            )
            terms.append(RateTerm(coef, power))
        offset = self.number(data.get("offset", 0.0), f"{path}.offset", 0)

        if len(self.errors) > count:
            return None
        return RateFunction(tuple(terms), offset)

    def bound_entries(self, data, condition, family):
        entries = {}
        listing = self.listing(data.get(condition, []), f"bounds.{condition}")
        for k, entry in enumerate(listing):
            path = f"bounds.{condition}[{k}]"
            if not isinstance(entry, dict):
                self.error(path, "expected an object")
                continue

            if condition == "switches":
                m = self.integer(self.field(entry, "from", path), f"{path}.from")
                n = self.integer(self.field(entry, "to", path), f"{path}.to")
                key = (m, n) if None not in (m, n) else None
                if key and family is not None and key not in family.transitions:
                    self.error(path, f"transition {key!r} is not in the family")
            else:
                key = self.integer(self.field(entry, "mode", path), f"{path}.mode")
                group = getattr(family, condition, None)
                if key is not None and group is not None and key not in group:
                    kind = "an ISS" if condition == "stable" else "a non-ISS"
                    message = f"mode {key} is not {kind} mode of the family"
                    self.error(f"{path}.mode", message)

            rate = self.rate(
                self.field(entry, "rate", path, default={}), f"{path}.rate"
            )
            offset = self.number(
                self.field(entry, "bound_offset", path),
                f"{path}.bound_offset",
                0,
                strict=True,
            )
            if None not in (key, rate, offset):
                entries[key] = RateBound(rate, offset)

        return entries

    def bounds(self, data, family):
        count = len(self.errors)
        entries = {
            condition: self.bound_entries(data, condition, family)
            for condition in ("stable", "unstable", "switches")
        }
        if len(self.errors) > count:
            return None

        bounds = RateBoundSet(**entries)
        if family is not None:
            try:
                bounds.validate_against(family)
            except PSISSException as e:
                self.error("bounds", str(e))
                return None

        return bounds

    def certificate(self, data):
        count = len(self.errors)
        rho = self.rate(
            self.field(data, "rho", "certificate", default={}), "certificate.rho"
        )
        c1 = self.number(data.get("c1", 0.0), "certificate.c1")
        horizon = data.get("horizon")
        if horizon is not None:
            horizon = self.number(horizon, "certificate.horizon", 0, strict=True)
        grid_step = self.number(
            data.get("grid_step", 0.01), "certificate.grid_step", 0, strict=True
        )
        s_max = self.number(
            data.get("s_max", 100.0), "certificate.s_max", 0, strict=True
        )

        horizons = self.horizons(data.get("horizons"))
        if not horizons and horizon is not None:
            count = int(math.floor(horizon))
            horizons = [float(t) for t in range(1, count + 1)] or [horizon]
        elif horizons and horizon is None and None not in horizons:
            horizon = max(horizons)
        elif not horizons and "horizon" not in data:
            self.error("certificate", "horizon or horizons required")

        stated_lhs = None
        entries = data.get("stated_lhs")
        if entries is not None:
            stated_lhs = {}
            for k, entry in enumerate(self.listing(entries, "certificate.stated_lhs")):
                path = f"certificate.stated_lhs[{k}]"
                if not isinstance(entry, dict):
                    self.error(path, "expected an object with coef and power")
                    continue
                power = self.number(
                    self.field(entry, "power", path), f"{path}.power", 0
                )
                coef = self.number(self.field(entry, "coef", path), f"{path}.coef")
                if None not in (power, coef):
                    stated_lhs[power] = coef

        boxes = {}
        for key in ("state_box", "input_box"):
            box = data.get(key)
            if box is not None and not Validators._validate_box(box):
                self.error(f"certificate.{key}", "expected (low, high) pairs")
            boxes[key] = box
        n_samples = self.integer(
            data.get("n_samples", 1000), "certificate.n_samples", 1
        )

        if rho is not None and rho.offset != 0:
            self.error("certificate.rho.offset", "expected 0, rho(0, 0) must vanish")
        if len(self.errors) > count:
            return None

        return CertificateConfig(
            rho,
            c1,
            horizons,
            horizon,
            grid_step,
            s_max,
            stated_lhs,
            boxes["state_box"],
            boxes["input_box"],
            n_samples,
        )

    def horizons(self, entries):
        """Horizon list, given explicitly or as ``{"stop": T, "step": h}``."""

        if entries is None:
            return []
        if isinstance(entries, dict):
            stop = self.number(
                self.field(entries, "stop", "certificate.horizons"),
                "certificate.horizons.stop",
                0,
                strict=True,
            )
            step = self.number(
                entries.get("step", 1.0), "certificate.horizons.step", 0, strict=True
            )
            if stop is None or step is None:
                return []
            count = int(math.floor(stop / step + 1e-9))
            return [step * k for k in range(1, count + 1)] or [stop]

        horizons = []
        for k, t in enumerate(self.listing(entries, "certificate.horizons")):
            path = f"certificate.horizons[{k}]"
            horizons.append(self.number(t, path, 0, strict=True))
        return horizons

    def simulation(self, data, family):
        count = len(self.errors)

        inputs = self.listing(data.get("inputs", []), "simulation.inputs")
        if not all(isinstance(text, str) for text in inputs):
            self.error("simulation.inputs", "expected expression strings over t")
        if family is not None and len(inputs) != family.input_dim:
            self.error("simulation.inputs", f"expected {family.input_dim} expressions")

        t_end = self.number(
            self.field(data, "t_end", "simulation"), "simulation.t_end", 0, strict=True
        )
        dt = self.number(data.get("dt", 1e-3), "simulation.dt", 0, strict=True)
        n_runs = self.integer(data.get("n_runs", 1), "simulation.n_runs", minimum=1)
        seed = self.integer(data.get("seed", 0), "simulation.seed", minimum=0)

        box = data.get("box")
        dim = family.state_dim if family is not None else None
        if box is not None and not Validators._validate_box(box, dim):
            self.error("simulation.box", "expected (low, high) pairs, one per state")

        x0 = data.get("x0")
        if x0 is not None:
            coordinates = self.listing(x0, "simulation.x0")
            for k, value in enumerate(coordinates):
                self.number(value, f"simulation.x0[{k}]")
            if dim is not None and len(coordinates) != dim:
                self.error("simulation.x0", f"expected {dim} coordinates")
        elif box is None:
            self.error("simulation", "either box or x0 is required")

        if len(self.errors) > count:
            return None

        return SimulationConfig(inputs, t_end, dt, box, n_runs, seed, x0)

    def signal(self, data, family):
        modes = set(family.modes) if family is not None else None

        if "generator" in data:
            generator = data["generator"]
            if generator not in GENERATORS:
                expected = ", ".join(GENERATORS)
                self.error("signal.generator", f"expected one of {expected}")
                return None
            count = len(self.errors)
            params = {key: value for key, value in data.items() if key != "generator"}

            if "t" in params:
                params["t"] = self.number(params["t"], "signal.t", 0, strict=True)
            if generator == "adt":
                params["tau_a"] = self.number(
                    self.field(params, "tau_a", "signal"),
                    "signal.tau_a",
                    0,
                    strict=True,
                )
                params["n0"] = self.number(
                    self.field(params, "n0", "signal"), "signal.n0", 0
                )
                self.field(params, "mode_cycle", "signal")
            elif generator == "worst_case" and "n0" in params:
                params["n0"] = self.integer(params["n0"], "signal.n0", minimum=0)
            if "seed" in params:
                self.integer(params["seed"], "signal.seed", minimum=0)

            cycle = params.get("mode_cycle")
            if cycle is not None:
                for k, mode in enumerate(self.listing(cycle, "signal.mode_cycle")):
                    if modes is not None and mode not in modes:
                        self.error(
                            f"signal.mode_cycle[{k}]",
                            f"mode {mode!r} is not in the family",
                        )

            if len(self.errors) > count:
                return None
            return SignalConfig(None, generator, params)

        count = len(self.errors)
        taus = self.listing(self.field(data, "tau", "signal", default=[]), "signal.tau")
        sequence = self.listing(
            self.field(data, "modes", "signal", default=[]), "signal.modes"
        )
        for k, tau in enumerate(taus):
            self.number(tau, f"signal.tau[{k}]", 0)
        for k, mode in enumerate(sequence):
            if modes is not None and mode not in modes:
                self.error(f"signal.modes[{k}]", f"mode {mode!r} is not in the family")
        if len(self.errors) > count:
            return None

        try:
            signal = SwitchingSignal(taus, sequence)
            if family is not None:
                signal.check_transitions(family.transitions)
        except PSISSException as e:
            self.error("signal", str(e))
            return None

        return SignalConfig(signal, None, {})
