"""Problem descriptions for the batch front end.

A problem is a TOML file; polynomial values are strings in the grammar of
`starquant.parsing`.  Example:

    dimension = 3
    variables = ["x1", "x2", "x3"]   # optional, defaults to x1..xn
    truncation = 3                   # N >= 1
    degree = 4                       # sweep / presentation degree bound
    order = "grevlex"                # lex | grlex | grevlex
    priority = [1, 2, 3]             # optional variable priority (1-based)
    engine = "gutt"                  # moyal | gutt | custom

    [poisson.alpha]                  # entries {x_i, x_j}, 1-based, i < j
    "1,2" = "x3"                     # (the mirror of an i > j key must be
    "2,3" = "x1"                     #  consistent with antisymmetry)
    "3,1" = "x2"

    [[star.corrections]]             # custom engine only: B_k for k >= 2
    order = 2
    coeff = "1/8"
    left = [2, 0, 0]
    right = [0, 2, 0]

    [ideal]                          # optional: quotient block
    generators = ["x1^2 + x2^2 + x3^2 - 1"]
    lifting = "identity"             # identity | weyl
    table_degree = 1                 # optional, default degree // 2

    [output]                         # optional default report paths
    json = "report.json"
    text = "report.txt"
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .algebra import MonomialOrder, Poly, default_variables
from .parsing import ParseError, parse_poly
from .poisson import PoissonStructure
from .star import BidiffOperator, StarProductSpec


class ConfigError(ValueError):
    """Invalid problem description, with the offending key in the message."""


def _require(table, key, types, where):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in {where}")
    value = table[key]
    if not isinstance(value, types):
        raise ConfigError(f"key {key!r} in {where} has the wrong type")
    return value


class ProblemConfig:
    """Validated problem description."""

    __slots__ = ("dimension", "variables", "truncation", "degree", "order",
                 "engine", "structure", "corrections", "ideal_generators",
                 "lifting_strategy", "table_degree", "output_json",
                 "output_text")

    def __init__(self, dimension, variables, truncation, degree, order,
                 engine, structure, corrections, ideal_generators,
                 lifting_strategy, table_degree, output_json, output_text):
        self.dimension = dimension
        self.variables = variables
        self.truncation = truncation
        self.degree = degree
        self.order = order
        self.engine = engine
        self.structure = structure
        self.corrections = corrections
        self.ideal_generators = ideal_generators
        self.lifting_strategy = lifting_strategy
        self.table_degree = table_degree
        self.output_json = output_json
        self.output_text = output_text

    # -- loading --------------------------------------------------------------

    @classmethod
    def load(cls, path):
        with open(path, "rb") as handle:
            try:
                data = tomllib.load(handle)
            except tomllib.TOMLDecodeError as err:
                raise ConfigError(f"{path}: {err}") from err
        return cls.from_dict(data)

    @classmethod
    def loads(cls, text):
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(str(err)) from err
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data):
        n = _require(data, "dimension", int, "the top level")
        if n < 1:
            raise ConfigError("dimension must be >= 1")
        variables = data.get("variables", default_variables(n))
        if (not isinstance(variables, list) or len(variables) != n
                or not all(isinstance(v, str) for v in variables)):
            raise ConfigError("variables must list one name per dimension")
        if len(set(variables)) != n:
            raise ConfigError("variable names must be distinct")

        trunc = _require(data, "truncation", int, "the top level")
        if trunc < 1:
            raise ConfigError("truncation must be >= 1")
        degree = _require(data, "degree", int, "the top level")
        if degree < 0:
            raise ConfigError("degree must be >= 0")

        kind = data.get("order", "grevlex")
        if kind not in MonomialOrder.KINDS:
            raise ConfigError(f"unknown monomial order {kind!r}")
        priority = data.get("priority")
        if priority is not None:
            if sorted(priority) != list(range(1, n + 1)):
                raise ConfigError("priority must permute 1..n")
            priority = [p - 1 for p in priority]
        order = MonomialOrder(kind, priority)

        engine = _require(data, "engine", str, "the top level")
        if engine not in ("moyal", "gutt", "custom"):
            raise ConfigError(f"unknown engine {engine!r}")

        def parse(text, where):
            try:
                return parse_poly(text, variables)
            except ParseError as err:
                raise ConfigError(f"{where}: {err}") from err

        alpha = data.get("poisson", {}).get("alpha", {})
        if not isinstance(alpha, dict):
            raise ConfigError("poisson.alpha must be a table")
        entries = {}
        for key, text in alpha.items():
            try:
                i, j = (int(part) for part in key.split(","))
            except ValueError:
                raise ConfigError(f"poisson.alpha key {key!r} is not 'i,j'")
            if not (1 <= i <= n and 1 <= j <= n):
                raise ConfigError(f"poisson.alpha key {key!r} out of range")
            if not isinstance(text, str):
                raise ConfigError(f"poisson.alpha.{key} must be a string")
            entries[(i - 1, j - 1)] = parse(text, f"poisson.alpha.{key}")
        try:
            structure = PoissonStructure(n, entries)
        except ValueError as err:
            raise ConfigError(f"poisson.alpha: {err}") from err

        p = structure.degree
        if engine == "moyal" and not structure.is_constant():
            raise ConfigError("moyal engine needs a constant structure "
                              f"(degree 0), got degree {p}")
        if engine == "gutt" and (not structure.is_linear() or p != 1):
            raise ConfigError("gutt engine needs a linear structure (degree 1)")

        corrections = {}
        for idx, block in enumerate(data.get("star", {}).get("corrections", [])):
            where = f"star.corrections[{idx}]"
            k = _require(block, "order", int, where)
            if k < 2:
                raise ConfigError(f"{where}: correction order must be >= 2")
            coeff = parse(_require(block, "coeff", str, where), where)
            left = _require(block, "left", list, where)
            right = _require(block, "right", list, where)
            for vec in (left, right):
                if len(vec) != n or not all(isinstance(e, int) and e >= 0 for e in vec):
                    raise ConfigError(f"{where}: exponent vectors need n "
                                      "non-negative integers")
            corrections.setdefault(k, []).append((coeff, tuple(left), tuple(right)))
        if corrections and engine != "custom":
            raise ConfigError("star.corrections require the custom engine")
        operators = {k: BidiffOperator(n, terms)
                     for k, terms in corrections.items()}

        ideal_generators = None
        lifting = "identity"
        table_degree = None
        if "ideal" in data:
            block = data["ideal"]
            texts = _require(block, "generators", list, "ideal")
            if not texts or not all(isinstance(t, str) for t in texts):
                raise ConfigError("ideal.generators must be a nonempty string list")
            ideal_generators = [parse(t, f"ideal.generators[{i}]")
                                for i, t in enumerate(texts)]
            lifting = block.get("lifting", "identity")
            if lifting not in ("identity", "weyl"):
                raise ConfigError(f"unknown lifting strategy {lifting!r}")
            table_degree = block.get("table_degree")
            if table_degree is not None and (not isinstance(table_degree, int)
                                             or table_degree < 0):
                raise ConfigError("ideal.table_degree must be a non-negative integer")

        output = data.get("output", {})
        return cls(n, list(variables), trunc, degree, order, engine,
                   structure, operators, ideal_generators, lifting,
                   table_degree, output.get("json"), output.get("text"))

    # -- derived objects --------------------------------------------------------

    def star_spec(self, validate=True):
        """Build the configured star product.  With validate=False a custom
        engine skips its associativity gate (used by diagnostic commands,
        which re-run the verifiers and report instead of refusing)."""
        if self.engine == "moyal":
            return StarProductSpec.moyal(self.structure, self.truncation)
        if self.engine == "gutt":
            return StarProductSpec.gutt(self.structure, self.truncation)
        return StarProductSpec.custom(
            self.structure, self.truncation,
            corrections=self.corrections, validate=validate,
            validate_degree=min(self.degree, 2))
