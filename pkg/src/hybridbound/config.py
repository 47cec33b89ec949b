"""Experiment configuration: TOML (or JSON) in, validated dataclasses out."""
from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import asdict, dataclass, field, fields

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

import tomli_w

from .bounds import BoundParams
from .classical_net import Activation
from .errors import ConfigError
from .hybrid import LossSpec
from .qcore import MAX_QUBITS


@dataclass(frozen=True)
class CircuitConfig:
    qubits: int = 3
    T: int = 4
    M_rep: int = 1
    gates: tuple = None
    slots: tuple = None
    measured: tuple = None

    @property
    def layout(self):
        if self.gates is not None:
            return [tuple(g) for g in self.gates]
        pairs = [(i, i + 1) for i in range(self.qubits - 1)]
        return [pairs[g % len(pairs)] for g in range(self.T * self.M_rep)]

    @property
    def slot_list(self):
        if self.slots is not None:
            return list(self.slots)
        if self.gates is not None:
            return list(range(len(self.gates)))
        return [t for _ in range(self.M_rep) for t in range(self.T)]

    @property
    def measured_list(self):
        return list(range(self.qubits)) if self.measured is None else list(self.measured)


@dataclass(frozen=True)
class NetConfig:
    dims: tuple = None
    alpha: float = 1.0
    activation: str = "tanh"


@dataclass(frozen=True)
class LossConfig:
    clip: float = 4.0
    lipschitz: float = None


@dataclass(frozen=True)
class DataConfig:
    input_radius: float = math.pi
    noise: float = 0.1
    n_train: tuple = (50, 100, 200, 400)
    test_multiplier: int = 20

    @property
    def test_size(self):
        return self.test_multiplier * max(self.n_train)


@dataclass(frozen=True)
class TrainingConfig:
    steps: int = 100
    lr: float = 0.5
    init: str = "random"


@dataclass(frozen=True)
class BoundConfig:
    delta: float = 0.05
    c_conf: float = None
    N: int = None


@dataclass(frozen=True)
class ExperimentConfig:
    circuit: CircuitConfig = field(default_factory=CircuitConfig)
    net: NetConfig = field(default_factory=NetConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    data: DataConfig = field(default_factory=DataConfig)
    training: TrainingConfig = field(default_factory=TrainingConfig)
    bound: BoundConfig = field(default_factory=BoundConfig)
    seeds: tuple = (0,)
    output: str = None
    workers: int = 1

    def loss_spec(self):
        return LossSpec(self.loss.clip, self.loss.lipschitz, self.net.dims[-1])

    def bound_params(self, N=None):
        """Bound symbols for this architecture at sample size ``N``."""
        dims = self.net.dims
        if N is None:
            N = self.bound.N if self.bound.N is not None else max(self.data.n_train)
        n_meas = len(self.circuit.measured_list)
        loss = self.loss_spec()
        slots = self.circuit.slot_list
        return BoundParams(
            T=len(set(slots)),
            M_rep=max(self.circuit.M_rep, max(slots.count(s) for s in set(slots))),
            k=len(dims) - 1,
            m=max(dims[1:]),
            n=max(n_meas, max(dims[:-1])),
            alpha=self.net.alpha,
            beta=1.0,
            L=Activation.parse(self.net.activation).lipschitz,
            N=N,
            delta=self.bound.delta,
            L_loss=loss.lipschitz,
            M_loss=loss.clip,
            c_conf=self.bound.c_conf,
        )

    def to_dict(self):
        """Plain nested dict with ``None`` entries dropped."""
        def clean(obj):
            if isinstance(obj, dict):
                return {k: clean(v) for k, v in obj.items() if v is not None}
            if isinstance(obj, (list, tuple)):
                return [clean(v) for v in obj]
            return obj
        return clean(asdict(self))

    def hash(self):
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()


_SECTIONS = {
    "circuit": CircuitConfig,
    "net": NetConfig,
    "loss": LossConfig,
    "data": DataConfig,
    "training": TrainingConfig,
    "bound": BoundConfig,
}
_TOP_LEVEL = {"seeds", "output", "workers"}


def _load(text):
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"JSON syntax error: {exc.msg}", line=exc.lineno) from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"TOML syntax error: {exc}", line=int(m.group(1)) if m else None) from None


def _is_int(v):
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v):
    return (isinstance(v, (int, float)) and not isinstance(v, bool)) and math.isfinite(v)


def _tuplify(v):
    if isinstance(v, list):
        return tuple(_tuplify(x) for x in v)
    return v


def parse_config(text):
    """Parse and validate a TOML or JSON experiment document.

    Raises :class:`ConfigError` listing every violation found.
    """
    raw = _load(text)
    problems = []
    if not isinstance(raw, dict):
        raise ConfigError("top level must be a table")

    for key in raw:
        if key not in _SECTIONS and key not in _TOP_LEVEL:
            problems.append(f"unknown key {key!r}")

    sections = {}
    for name, cls in _SECTIONS.items():
        table = raw.get(name, {})
        if not isinstance(table, dict):
            problems.append(f"{name} must be a table")
            table = {}
        allowed = {f.name for f in fields(cls)}
        for key in table:
            if key not in allowed:
                problems.append(f"unknown key {name}.{key}")
        sections[name] = {k: _tuplify(v) for k, v in table.items() if k in allowed}

    c = sections["circuit"]
    qubits = c.get("qubits", CircuitConfig.qubits)
    if not _is_int(qubits) or qubits < 2:
        problems.append(f"circuit.qubits must be an integer >= 2, got {qubits!r}")
        qubits = None
    elif qubits > MAX_QUBITS:
        problems.append(f"circuit.qubits = {qubits} violates qubits ≤ {MAX_QUBITS}")
        qubits = None
    for key in ("T", "M_rep"):
        if key in c and (not _is_int(c[key]) or c[key] < 1):
            problems.append(f"circuit.{key} must be a positive integer, got {c[key]!r}")
    gates = c.get("gates")
    if gates is not None:
        ok = isinstance(gates, tuple) and len(gates) > 0 and all(
            isinstance(g, tuple) and len(g) == 2 and all(_is_int(t) for t in g) for g in gates)
        if not ok:
            problems.append("circuit.gates must be a non-empty list of [a, b] qubit pairs")
        elif qubits is not None:
            for g in gates:
                if g[0] == g[1] or not all(0 <= t < qubits for t in g):
                    problems.append(f"circuit.gates entry {list(g)} invalid for {qubits} qubits")
    slots = c.get("slots")
    if slots is not None:
        if gates is None:
            problems.append("circuit.slots requires circuit.gates")
        elif not all(_is_int(s) for s in slots) or len(slots) != len(gates):
            problems.append("circuit.slots must list one integer slot per gate")
        elif sorted(set(slots)) != list(range(max(slots) + 1)):
            problems.append("circuit.slots must use every slot index 0..T-1")
        else:
            T_used = max(slots) + 1
            reps = max(slots.count(s) for s in set(slots))
            if "T" in c and c["T"] != T_used:
                problems.append(f"circuit.T = {c['T']} but circuit.slots uses {T_used} slots")
            if "M_rep" in c and c["M_rep"] < reps:
                problems.append(f"circuit.M_rep = {c['M_rep']} but a slot is used {reps} times")
            c.setdefault("M_rep", reps)
    elif gates is not None and "T" in c and c["T"] != len(gates):
        problems.append(f"circuit.T = {c['T']} but circuit.gates lists {len(gates)} unshared gates")
    if gates is not None and slots is None and c.get("M_rep", 1) != 1:
        problems.append("circuit.M_rep > 1 with explicit gates requires circuit.slots")
    if gates is not None and "T" not in c:
        c["T"] = (max(slots) + 1) if slots is not None and all(_is_int(s) for s in slots) else len(gates)
    measured = c.get("measured")
    n_meas = qubits
    if measured is not None:
        if not all(_is_int(m) for m in measured) or len(set(measured)) != len(measured):
            problems.append("circuit.measured must list distinct qubit indices")
        elif qubits is not None and not all(0 <= m < qubits for m in measured):
            problems.append(f"circuit.measured {list(measured)} out of range for {qubits} qubits")
        n_meas = len(measured)

    n = sections["net"]
    dims = n.get("dims")
    if dims is None:
        if n_meas is not None:
            n["dims"] = (n_meas, n_meas, 1)
    elif not (isinstance(dims, tuple) and len(dims) >= 2 and all(_is_int(d) and d >= 1 for d in dims)):
        problems.append("net.dims must list at least two positive integers")
    elif n_meas is not None and dims[0] != n_meas:
        problems.append(f"net.dims[0] = {dims[0]} must equal the measurement count "
                        f"len(circuit.measured) = {n_meas}")
    if "alpha" in n and not (_is_num(n["alpha"]) and n["alpha"] > 0):
        problems.append(f"net.alpha must be positive, got {n['alpha']!r}")
    if "activation" in n:
        try:
            Activation.parse(n["activation"])
        except ValueError as exc:
            problems.append(f"net.activation: {exc}")

    lo = sections["loss"]
    for key in ("clip", "lipschitz"):
        if key in lo and not (_is_num(lo[key]) and lo[key] > 0):
            problems.append(f"loss.{key} must be positive, got {lo[key]!r}")

    d = sections["data"]
    if "input_radius" in d and not (_is_num(d["input_radius"]) and d["input_radius"] > 0):
        problems.append("data.input_radius must be positive")
    if "noise" in d and not (_is_num(d["noise"]) and d["noise"] >= 0):
        problems.append("data.noise must be non-negative")
    if "n_train" in d:
        nt = d["n_train"]
        if not (isinstance(nt, tuple) and nt and all(_is_int(v) and v >= 1 for v in nt)):
            problems.append("data.n_train must be a non-empty list of positive integers")
        elif any(a >= b for a, b in zip(nt, nt[1:])):
            problems.append("data.n_train must be strictly ascending")
    if "test_multiplier" in d and not (_is_int(d["test_multiplier"]) and d["test_multiplier"] >= 1):
        problems.append("data.test_multiplier must be a positive integer")

    t = sections["training"]
    if "steps" in t and not (_is_int(t["steps"]) and t["steps"] >= 0):
        problems.append("training.steps must be a non-negative integer")
    if "lr" in t and not (_is_num(t["lr"]) and t["lr"] > 0):
        problems.append("training.lr must be positive")
    if "init" in t and t["init"] not in ("random", "teacher"):
        problems.append("training.init must be 'random' or 'teacher'")

    b = sections["bound"]
    if "delta" in b and not (_is_num(b["delta"]) and 0 < b["delta"] <= 1):
        problems.append("bound.delta must lie in (0, 1]")
    if "c_conf" in b and not (_is_num(b["c_conf"]) and b["c_conf"] >= 0):
        problems.append("bound.c_conf must be non-negative")
    if "N" in b and not (_is_int(b["N"]) and b["N"] >= 1):
        problems.append("bound.N must be a positive integer")

    seeds = _tuplify(raw.get("seeds", [0]))
    if not (isinstance(seeds, tuple) and seeds and all(_is_int(s) and s >= 0 for s in seeds)):
        problems.append("seeds must be a non-empty list of non-negative integers")
    output = raw.get("output")
    if output is not None and not isinstance(output, str):
        problems.append("output must be a string path")
    workers = raw.get("workers", 1)
    if not (_is_int(workers) and workers >= 1):
        problems.append("workers must be a positive integer")

    if problems:
        raise ConfigError(problems)

    return ExperimentConfig(
        circuit=CircuitConfig(**c),
        net=NetConfig(**n),
        loss=LossConfig(**lo),
        data=DataConfig(**d),
        training=TrainingConfig(**t),
        bound=BoundConfig(**b),
        seeds=seeds,
        output=output,
        workers=workers,
    )


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config, fmt="toml"):
    data = config.to_dict()
    if fmt == "json":
        return json.dumps(data, indent=2, sort_keys=True) + "\n"
    return tomli_w.dumps(data)
