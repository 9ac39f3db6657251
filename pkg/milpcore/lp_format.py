"""
LP text format writer and reader.

A CPLEX-style subset with deterministic ordering (variables by id, rows in
insertion order) and %.17g numbers, so files round-trip exactly:

    \\ Model <name>
    Minimize
     obj: +1 x +2 y +0.5
    Subject To
     c1: +1 x +2 y >= 2
    Bounds
     0 <= x <= +inf
     y free
    Generals
     n
    Binaries
     b
    SOS
     s1: S2:: lam1:1 lam2:2 lam3:3
    End
"""

import io
import logging
import math
from typing import Dict, List, Optional, TextIO, Union

from milpcore.errors import LpFormatError
from milpcore.model import MilpModel, Relation, VarKind

logger = logging.getLogger(__name__)

SECTIONS = ('minimize', 'subject to', 'bounds', 'generals', 'binaries', 'sos', 'end')
RELATIONS = {'<=': Relation.LE, '=<': Relation.LE, '>=': Relation.GE, '=>': Relation.GE, '=': Relation.EQ}


def _num(value: float) -> str:
    if math.isinf(value):
        return '+inf' if value > 0 else '-inf'
    return '%.17g' % value


def _signed(value: float) -> str:
    text = _num(value)
    return text if text.startswith(('-', '+')) else '+' + text


def _terms(model: MilpModel, terms) -> str:
    return ' '.join(f"{_signed(coef)} {model.variables[var_id].name}" for var_id, coef in terms)


def write_lp(model: MilpModel, target: Union[str, TextIO]):
    """
    Write a model in LP text format.

    Args:
        model: Model to serialize
        target: File path or writable text stream
    """
    lines = [f"\\ Model {model.name}", 'Minimize']
    objective = _terms(model, sorted(model.objective.items()))
    if model.objective_constant:
        objective = (objective + ' ' if objective else '') + _signed(model.objective_constant)
    lines.append(f" obj: {objective}".rstrip())

    lines.append('Subject To')
    for row in model.constraints:
        body = _terms(model, row.terms) or '0'
        lines.append(f" {row.name}: {body} {row.relation.value} {_num(row.rhs)}")

    lines.append('Bounds')
    for var in model.variables:
        if math.isinf(var.lower) and var.lower < 0 and math.isinf(var.upper):
            lines.append(f" {var.name} free")
        else:
            lines.append(f" {_num(var.lower)} <= {var.name} <= {_num(var.upper)}")

    generals = [var.name for var in model.variables if var.kind is VarKind.INTEGER]
    binaries = [var.name for var in model.variables if var.kind is VarKind.BINARY]
    if generals:
        lines.append('Generals')
        lines.extend(f" {name}" for name in generals)
    if binaries:
        lines.append('Binaries')
        lines.extend(f" {name}" for name in binaries)
    if model.sos2_sets:
        lines.append('SOS')
        for sos in model.sos2_sets:
            members = ' '.join(f"{model.variables[m].name}:{_num(w)}" for m, w in zip(sos.members, sos.weights))
            lines.append(f" {sos.name}: S2:: {members}")
    lines.append('End')
    text = '\n'.join(lines) + '\n'

    if isinstance(target, str):
        with open(target, 'w', encoding='utf-8') as handle:
            handle.write(text)
        logger.info(f"Model written to {target}")
    else:
        target.write(text)


def model_to_lp_string(model: MilpModel) -> str:
    buffer = io.StringIO()
    write_lp(model, buffer)
    return buffer.getvalue()


def _parse_float(token: str, line_number: int) -> float:
    lowered = token.lower()
    if lowered in ('+inf', 'inf', '+infinity', 'infinity'):
        return math.inf
    if lowered in ('-inf', '-infinity'):
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise LpFormatError(f"Expected a number, got '{token}'", line_number) from None


class _LpReader:
    def __init__(self, text: str, name: Optional[str]):
        self.text = text
        self.name = name
        self.order: List[str] = []
        self.bounds: Dict[str, tuple] = {}
        self.kinds: Dict[str, VarKind] = {}
        self.objective: List[tuple] = []
        self.constant = 0.0
        self.rows: List[tuple] = []
        self.sos: List[tuple] = []
        self.bound_order: List[str] = []

    def _see(self, name: str):
        if name not in self.bounds:
            self.order.append(name)
            self.bounds[name] = (0.0, math.inf)

    def _parse_terms(self, tokens: List[str], line_number: int):
        terms, constant, position = [], 0.0, 0
        while position < len(tokens):
            token = tokens[position]
            if token in RELATIONS:
                break
            coef = _parse_float(token, line_number)
            nxt = tokens[position + 1] if position + 1 < len(tokens) else None
            if nxt is None or nxt in RELATIONS:
                constant += coef
                position += 1
                continue
            self._see(nxt)
            terms.append((nxt, coef))
            position += 2
        return terms, constant, tokens[position:]

    def parse(self) -> MilpModel:
        section = None
        for line_number, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith('\\'):
                if line.lower().startswith('\\ model ') and self.name is None:
                    self.name = line[len('\\ model '):].strip()
                continue
            if line.lower() in SECTIONS:
                section = line.lower()
                continue
            if section is None:
                raise LpFormatError(f"Content before the first section: '{line}'", line_number)
            getattr(self, f"_line_{section.replace(' ', '_')}")(line, line_number)
        if section != 'end':
            raise LpFormatError("Missing End section")
        return self._build()

    def _split_label(self, line: str, line_number: int):
        if ':' not in line:
            raise LpFormatError(f"Expected 'name: ...', got '{line}'", line_number)
        label, body = line.split(':', 1)
        return label.strip(), body.split()

    def _line_minimize(self, line, line_number):
        _, tokens = self._split_label(line, line_number)
        terms, constant, rest = self._parse_terms(tokens, line_number)
        if rest:
            raise LpFormatError("Relation in objective", line_number)
        self.objective.extend(terms)
        self.constant += constant

    def _line_subject_to(self, line, line_number):
        label, tokens = self._split_label(line, line_number)
        if len(tokens) == 3 and tokens[0] == '0':
            tokens = tokens[1:]
            terms = []
        else:
            terms, constant, tokens = self._parse_terms(tokens, line_number)
            if constant:
                raise LpFormatError(f"Constant on the left-hand side of '{label}'", line_number)
        if len(tokens) != 2 or tokens[0] not in RELATIONS:
            raise LpFormatError(f"Constraint '{label}' needs '<relation> <rhs>'", line_number)
        self.rows.append((label, terms, RELATIONS[tokens[0]], _parse_float(tokens[1], line_number)))

    def _line_bounds(self, line, line_number):
        tokens = line.split()
        # Bounds list every variable in id order
        name = {2: 0, 3: 0, 5: 2}.get(len(tokens))
        if name is not None and tokens[name] not in self.bound_order:
            self.bound_order.append(tokens[name])
        if len(tokens) == 2 and tokens[1].lower() == 'free':
            self._see(tokens[0])
            self.bounds[tokens[0]] = (-math.inf, math.inf)
        elif len(tokens) == 5 and tokens[1] == '<=' and tokens[3] == '<=':
            self._see(tokens[2])
            self.bounds[tokens[2]] = (_parse_float(tokens[0], line_number), _parse_float(tokens[4], line_number))
        elif len(tokens) == 3 and tokens[1] in ('<=', '>=', '='):
            self._see(tokens[0])
            lower, upper = self.bounds[tokens[0]]
            value = _parse_float(tokens[2], line_number)
            if tokens[1] == '<=':
                upper = value
            elif tokens[1] == '>=':
                lower = value
            else:
                lower = upper = value
            self.bounds[tokens[0]] = (lower, upper)
        else:
            raise LpFormatError(f"Unrecognized bound '{line}'", line_number)

    def _line_generals(self, line, line_number):
        for name in line.split():
            self._see(name)
            self.kinds[name] = VarKind.INTEGER

    def _line_binaries(self, line, line_number):
        for name in line.split():
            self._see(name)
            self.kinds[name] = VarKind.BINARY

    def _line_sos(self, line, line_number):
        label, tokens = self._split_label(line, line_number)
        if not tokens or tokens[0] != 'S2::':
            raise LpFormatError(f"Only S2 sets are supported: '{line}'", line_number)
        members = []
        for token in tokens[1:]:
            name, _, weight = token.rpartition(':')
            if not name:
                raise LpFormatError(f"SOS member '{token}' needs 'name:weight'", line_number)
            self._see(name)
            members.append((name, _parse_float(weight, line_number)))
        self.sos.append((label, members))

    def _line_end(self, line, line_number):
        raise LpFormatError(f"Content after End: '{line}'", line_number)

    def _build(self) -> MilpModel:
        model = MilpModel(self.name or 'model')
        listed = set(self.bound_order)
        self.order = self.bound_order + [name for name in self.order if name not in listed]
        for name in self.order:
            lower, upper = self.bounds[name]
            kind = self.kinds.get(name, VarKind.CONTINUOUS)
            model.add_variable(name, kind, lower, upper)
        ids = {name: model.var_id(name) for name in self.order}
        model.add_objective_terms([(ids[name], coef) for name, coef in self.objective])
        model.objective_constant = self.constant
        for label, terms, relation, rhs in self.rows:
            model.add_constraint(label, [(ids[name], coef) for name, coef in terms], relation, rhs)
        for label, members in self.sos:
            model.add_sos2(label, [ids[name] for name, _ in members], [w for _, w in members])
        return model


def read_lp(source: Union[str, TextIO], name: Optional[str] = None) -> MilpModel:
    """
    Parse an LP text file written by write_lp (or a compatible subset).

    Args:
        source: File path, LP text, or readable stream. A string containing a
            newline is treated as LP text.
        name: Optional model name override

    Returns:
        MilpModel: Parsed (unfrozen) model

    Raises:
        LpFormatError: On malformed input
    """
    if hasattr(source, 'read'):
        text = source.read()
    elif '\n' in source:
        text = source
    else:
        with open(source, 'r', encoding='utf-8') as handle:
            text = handle.read()
    return _LpReader(text, name).parse()
