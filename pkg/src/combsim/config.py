"""Configuration loading: a flat sectioned key-value file (INI syntax) plus
dotted-key overrides from the command line.  Every value is a decimal literal
or plain word, so pinned configurations diff cleanly and rerun bit-identically.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, fields

from .combing import CIRCUIT, EMULATE, CombingConfig, RANDOM_STATE
from .errors import ConfigError
from .models import ONE_BODY_X, RANDOM_PATTERN, IsingParams, uniform_phis

_DEFAULTS = {
    "model": {
        "nt": "3",
        "h": "1.0",
        "b": "0.0",
        "periodic": "true",
    },
    "comb": {
        "nc": "3",
        "nu0": "6.0",
        "kappa": "0.1",
        "tf": "20.0",
        "phi": "1.0",
        # phi_seed: seeded per-triple couplings in [0.5, 1.5]; overrides phi
    },
    "interaction": {
        "g": "0.2",
        "coupling": ONE_BODY_X,
        "coupling_seed": "0",
    },
    "run": {
        "mode": EMULATE,
        "n_iters": "4",
        "steps_per_iter": "500",
        # dt: alternative to steps_per_iter; tf/dt must be an integer
        "eta": "0.6",
        "seed": "",
        "initial_state": RANDOM_STATE,
        "k_overlaps": "",
        "measure_last": "false",
    },
    "output": {
        "dir": "out",
    },
}


@dataclass
class QaaSection:
    n_steps: int = 1000
    dt: float = 0.1


@dataclass
class AppConfig:
    ising: IsingParams
    combing: CombingConfig
    qaa: QaaSection
    out_dir: str
    seed_given: bool  # False when the seed must be drawn from entropy

    def as_dict(self) -> dict:
        return {
            "model": {f.name: getattr(self.ising, f.name) for f in fields(self.ising)},
            "run": {
                f.name: getattr(self.combing, f.name) for f in fields(self.combing)
            },
            "qaa": {"n_steps": self.qaa.n_steps, "dt": self.qaa.dt},
        }


def _parse_typed(section: str, key: str, raw: str, kind):
    try:
        if kind is bool:
            lowered = raw.strip().lower()
            if lowered in ("true", "1", "yes"):
                return True
            if lowered in ("false", "0", "no"):
                return False
            raise ValueError(raw)
        return kind(raw)
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {kind.__name__}")


def parse_config(path: str | None = None, overrides: dict[str, str] | None = None) -> AppConfig:
    """Load defaults, then the file, then dotted-key overrides like
    ``run.eta=0.5``; validate cross-field constraints."""
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    parser.read_dict(_DEFAULTS)
    parser.read_dict({"qaa": {"n_steps": "1000", "dt": "0.1"}})
    if path is not None:
        read = parser.read(path)
        if not read:
            raise ConfigError(f"config file {path!r} not found")
    for dotted, value in (overrides or {}).items():
        if "." not in dotted:
            raise ConfigError(f"override {dotted!r} must look like section.key=value")
        section, key = dotted.split(".", 1)
        if not parser.has_section(section):
            raise ConfigError(f"unknown config section {section!r}")
        parser.set(section, key, value)

    get = parser.get

    ising = IsingParams(
        nt=_parse_typed("model", "nt", get("model", "nt"), int),
        h=_parse_typed("model", "h", get("model", "h"), float),
        b=_parse_typed("model", "b", get("model", "b"), float),
        periodic=_parse_typed("model", "periodic", get("model", "periodic"), bool),
    )

    nc = _parse_typed("comb", "nc", get("comb", "nc"), int)
    tf = _parse_typed("comb", "tf", get("comb", "tf"), float)
    if parser.has_option("comb", "phis") and get("comb", "phis").strip():
        try:
            phis = tuple(float(p) for p in get("comb", "phis").split(","))
        except ValueError:
            raise ConfigError(f"comb.phis: cannot parse {get('comb', 'phis')!r}")
    elif parser.has_option("comb", "phi_seed") and get("comb", "phi_seed").strip():
        phis = uniform_phis(nc, _parse_typed("comb", "phi_seed", get("comb", "phi_seed"), int))
    else:
        phis = (_parse_typed("comb", "phi", get("comb", "phi"), float),)

    n_iters = _parse_typed("run", "n_iters", get("run", "n_iters"), int)
    steps = _steps_per_iter(parser, tf, n_iters)

    seed_raw = get("run", "seed").strip()
    seed_given = bool(seed_raw)
    seed = _parse_typed("run", "seed", seed_raw, int) if seed_given else 0

    k_raw = get("run", "k_overlaps").strip()
    k_overlaps = _parse_typed("run", "k_overlaps", k_raw, int) if k_raw else None

    mode = get("run", "mode").strip()
    coupling = get("interaction", "coupling").strip()
    if mode == CIRCUIT and coupling == RANDOM_PATTERN:
        raise ConfigError(
            "run.mode=circuit cannot be combined with interaction.coupling="
            "random_pattern: the gate decomposition only exists for one_body_x"
        )

    try:
        combing = CombingConfig(
            nu0=_parse_typed("comb", "nu0", get("comb", "nu0"), float),
            tf=tf,
            kappa=_parse_typed("comb", "kappa", get("comb", "kappa"), float),
            g=_parse_typed("interaction", "g", get("interaction", "g"), float),
            eta=_parse_typed("run", "eta", get("run", "eta"), float),
            n_iters=n_iters,
            steps_per_iter=steps,
            nc=nc,
            mode=mode,
            coupling=coupling,
            coupling_seed=_parse_typed(
                "interaction", "coupling_seed", get("interaction", "coupling_seed"), int
            ),
            phis=phis,
            seed=seed,
            initial_state=get("run", "initial_state").strip(),
            k_overlaps=k_overlaps,
            measure_last=_parse_typed(
                "run", "measure_last", get("run", "measure_last"), bool
            ),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc))

    qaa = QaaSection(
        n_steps=_parse_typed("qaa", "n_steps", get("qaa", "n_steps"), int),
        dt=_parse_typed("qaa", "dt", get("qaa", "dt"), float),
    )
    return AppConfig(
        ising=ising,
        combing=combing,
        qaa=qaa,
        out_dir=get("output", "dir"),
        seed_given=seed_given,
    )


def _steps_per_iter(parser, tf: float, n_iters: int) -> tuple[int, ...]:
    if parser.has_option("run", "dt") and parser.get("run", "dt").strip():
        dt = _parse_typed("run", "dt", parser.get("run", "dt"), float)
        ratio = tf / dt
        if abs(ratio - round(ratio)) > 1e-9 or ratio < 1:
            raise ConfigError(
                f"run.dt={dt} does not divide comb.tf={tf} into a whole number of steps"
            )
        return (int(round(ratio)),) * n_iters
    raw = parser.get("run", "steps_per_iter")
    try:
        steps = tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise ConfigError(f"run.steps_per_iter: cannot parse {raw!r}")
    return steps


def format_config(app: AppConfig) -> str:
    """Render an AppConfig back to the sectioned key-value format."""
    c = app.combing
    phis = c.resolved_phis()
    if len(set(phis)) <= 1:
        phi_line = f"phi = {(phis[0] if phis else 1.0):.17g}"
    else:
        phi_line = "phis = " + ",".join(f"{p:.17g}" for p in phis)
    lines = [
        "[model]",
        f"nt = {app.ising.nt}",
        f"h = {app.ising.h:.17g}",
        f"b = {app.ising.b:.17g}",
        f"periodic = {str(app.ising.periodic).lower()}",
        "",
        "[comb]",
        f"nc = {c.nc}",
        f"nu0 = {c.nu0:.17g}",
        f"kappa = {c.kappa:.17g}",
        f"tf = {c.tf:.17g}",
        phi_line,
        "",
        "[interaction]",
        f"g = {c.g:.17g}",
        f"coupling = {c.coupling}",
        f"coupling_seed = {c.coupling_seed or 0}",
        "",
        "[run]",
        f"mode = {c.mode}",
        f"n_iters = {c.n_iters}",
        "steps_per_iter = " + ",".join(str(s) for s in c.steps_per_iter),
        f"eta = {c.eta:.17g}",
        f"seed = {c.seed}",
        f"initial_state = {c.initial_state}",
        f"k_overlaps = {'' if c.k_overlaps is None else c.k_overlaps}",
        f"measure_last = {str(c.measure_last).lower()}",
        "",
        "[qaa]",
        f"n_steps = {app.qaa.n_steps}",
        f"dt = {app.qaa.dt:.17g}",
        "",
        "[output]",
        f"dir = {app.out_dir}",
    ]
    return "\n".join(lines) + "\n"
