"""
多项式模块

职责：
- 有理系数稀疏多元多项式 Poly（指数向量 → 系数）
- 精确求值（有理点 / 同一二次域中的点）与 numpy 浮点求值
- 梯度、圆多项式、规范文本与结构化 JSON 的序列化/解析
"""

import re
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .errors import MixedFieldError, ParseError
from .exact_arith import QuadExt, as_quad, format_rat, parse_rat

logger = logging.getLogger("momentforge")

Exponents = Tuple[int, ...]

_VAR_RE = re.compile(r"^(?:x(\d+)|y_(\d+)_(\d+))$")


def x_names(n: int) -> List[str]:
    return [f"x{k}" for k in range(1, n + 1)]


def y_name(group: int, slot: int) -> str:
    return f"y_{group}_{slot}"


def variable_sort_key(name: str):
    """x1..xn 在前，随后 y_i_k 按 (i, k)；其他名字按字典序排在最后"""
    m = _VAR_RE.match(name)
    if not m:
        return (2, 0, 0, name)
    if m.group(1) is not None:
        return (0, int(m.group(1)), 0, name)
    return (1, int(m.group(2)), int(m.group(3)), name)


class Poly:
    """
    稀疏多元多项式。

    terms 不保存零系数；变量顺序由 variables 固定，指数向量与之对齐。
    运算要求两侧变量表一致（不一致时先 extend 到同一变量表）。
    """

    __slots__ = ("variables", "terms", "_compiled")

    def __init__(self, variables: Sequence[str], terms: Optional[Mapping[Exponents, Fraction]] = None):
        self.variables: Tuple[str, ...] = tuple(variables)
        self.terms: Dict[Exponents, Fraction] = {}
        self._compiled = None
        if terms:
            for exps, coeff in terms.items():
                self.add_term(exps, coeff)

    # --- 构造 ---

    @classmethod
    def constant(cls, variables: Sequence[str], c) -> "Poly":
        p = cls(variables)
        p.add_term((0,) * len(p.variables), c)
        return p

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Poly":
        p = cls(variables)
        exps = [0] * len(p.variables)
        exps[p.variables.index(name)] = 1
        p.add_term(tuple(exps), 1)
        return p

    def add_term(self, exps: Iterable[int], coeff) -> None:
        """累加一项；系数变为 0 时删除"""
        exps = tuple(int(e) for e in exps)
        if len(exps) != len(self.variables):
            raise ValueError(f"exponent vector {exps} does not match variables {self.variables}")
        coeff = Fraction(coeff)
        if coeff == 0:
            return
        total = self.terms.get(exps, Fraction(0)) + coeff
        if total == 0:
            self.terms.pop(exps, None)
        else:
            self.terms[exps] = total
        self._compiled = None

    def extend(self, variables: Sequence[str]) -> "Poly":
        """重排/扩充到更大的变量表"""
        variables = tuple(variables)
        missing = [v for v in self.variables if v not in variables]
        if missing:
            raise ValueError(f"cannot drop variables {missing}")
        index = [variables.index(v) for v in self.variables]
        out = Poly(variables)
        for exps, coeff in self.terms.items():
            new = [0] * len(variables)
            for k, e in zip(index, exps):
                new[k] = e
            out.add_term(new, coeff)
        return out

    # --- 代数运算 ---

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise ValueError(f"variable mismatch: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return Poly.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = Poly(self.variables, self.terms)
        for exps, coeff in other.terms.items():
            out.add_term(exps, coeff)
        return out

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = Poly(self.variables)
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                out.add_term(tuple(a + b for a, b in zip(e1, e2)), c1 * c2)
        return out

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Poly.constant(self.variables, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def sorted_terms(self) -> List[Tuple[Exponents, Fraction]]:
        """规范顺序：总次数升序，同次数内指数向量字典序降序"""
        return sorted(self.terms.items(), key=lambda item: (sum(item[0]), tuple(-e for e in item[0])))

    def __str__(self):
        return poly_to_text(self)

    def __repr__(self):
        return f"Poly({poly_to_text(self)!r})"

    # --- 浮点 ---

    def compiled(self) -> Tuple[np.ndarray, np.ndarray]:
        if self._compiled is None:
            items = self.sorted_terms()
            if items:
                exps = np.array([e for e, _ in items], dtype=np.int64)
                coeffs = np.array([float(c) for _, c in items], dtype=np.float64)
            else:
                exps = np.zeros((0, len(self.variables)), dtype=np.int64)
                coeffs = np.zeros(0, dtype=np.float64)
            self._compiled = (exps, coeffs)
        return self._compiled


def poly_eval(poly: Poly, point: Sequence) -> QuadExt:
    """
    精确求值。

    Args:
        poly: 多项式
        point: 与变量表等长的 Fraction/int/QuadExt 序列，非有理分量须在同一二次域

    Returns:
        QuadExt

    Raises:
        MixedFieldError: 分量属于不同的二次域
    """
    if len(point) != len(poly.variables):
        raise ValueError(f"point arity {len(point)} != {len(poly.variables)}")
    values = [as_quad(v) for v in point]
    fields = {v.d for v in values if v.d}
    if len(fields) > 1:
        raise MixedFieldError(f"point mixes quadratic fields {sorted(fields)}")
    powers: Dict[Tuple[int, int], QuadExt] = {}

    def power(k: int, e: int) -> QuadExt:
        key = (k, e)
        if key not in powers:
            powers[key] = values[k] ** e
        return powers[key]

    total = QuadExt(0)
    for exps, coeff in poly.terms.items():
        term = QuadExt(coeff)
        for k, e in enumerate(exps):
            if e:
                term = term * power(k, e)
        total = total + term
    return total


def poly_evalf(poly: Poly, point) -> Union[float, np.ndarray]:
    """
    numpy 浮点求值；point 形状 (nvars,) 或 (N, nvars)。
    """
    exps, coeffs = poly.compiled()
    x = np.asarray(point, dtype=np.float64)
    if x.ndim == 1:
        if coeffs.size == 0:
            return 0.0
        return float(coeffs @ np.prod(x[None, :] ** exps, axis=1))
    if coeffs.size == 0:
        return np.zeros(x.shape[0])
    monomials = np.prod(x[:, None, :] ** exps[None, :, :], axis=2)
    return monomials @ coeffs


def poly_abs_terms(poly: Poly, point) -> float:
    """各项绝对值之和，用作相对残差的尺度"""
    exps, coeffs = poly.compiled()
    x = np.asarray(point, dtype=np.float64)
    if coeffs.size == 0:
        return 0.0
    return float(np.abs(coeffs) @ np.abs(np.prod(x[None, :] ** exps, axis=1)))


def poly_grad(poly: Poly) -> List[Poly]:
    """
    梯度：第 k 个分量为对第 k 个变量的偏导。
    """
    grads = []
    for k in range(len(poly.variables)):
        g = Poly(poly.variables)
        for exps, coeff in poly.terms.items():
            e = exps[k]
            if e == 0:
                continue
            new = list(exps)
            new[k] = e - 1
            g.add_term(new, coeff * e)
        grads.append(g)
    return grads


def circle_poly(circle) -> Poly:
    """
    圆的定义多项式（变量 x1, x2）。

    orientation == "outside": (x1-p1)² + (x2-p2)² - r²；"inside" 取其相反数，
    使正值一侧与区域 D 所在一侧一致。
    """
    vars2 = ("x1", "x2")
    p1, p2 = circle.center
    x1 = Poly.variable(vars2, "x1")
    x2 = Poly.variable(vars2, "x2")
    poly = (x1 - p1) ** 2 + (x2 - p2) ** 2 - circle.radius ** 2
    return -poly if circle.orientation == "inside" else poly


# --- 序列化 ---

def _monomial_text(variables: Sequence[str], exps: Exponents) -> str:
    parts = []
    for name, e in zip(variables, exps):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


def poly_to_text(poly: Poly) -> str:
    """
    规范文本形式，例如 "1 - 1*x1^2 - 1*x2^2"；系数总是写出。
    """
    items = poly.sorted_terms()
    if not items:
        return "0"
    out = []
    for idx, (exps, coeff) in enumerate(items):
        mono = _monomial_text(poly.variables, exps)
        body = format_rat(abs(coeff))
        if mono:
            body = f"{body}*{mono}"
        if idx == 0:
            out.append(f"-{body}" if coeff < 0 else body)
        else:
            out.append(f" - {body}" if coeff < 0 else f" + {body}")
    return "".join(out)


def parse_poly(text: str, variables: Optional[Sequence[str]] = None, field: str = "polynomial") -> Poly:
    """
    解析多项式文本（"^" 或 "**" 表示幂）。

    Args:
        text: 多项式文本
        variables: 变量表；不给时从文本中推断并按 x、y 规则排序
        field: 出错时报告的字段名

    Raises:
        ParseError: 语法错误、非有理系数或出现未声明的变量
    """
    names = list(variables) if variables is not None else None
    try:
        if names is None:
            found = set(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", text))
            names = sorted(found, key=variable_sort_key)
        symbols = {name: sympy.Symbol(name) for name in names}
        expr = parse_expr(
            text,
            local_dict=symbols,
            transformations=standard_transformations + (convert_xor,),
            evaluate=True,
        )
    except Exception as e:  # parse_expr 可能抛出 TokenError 等多种异常
        raise ParseError(f"cannot parse {text!r}: {e}", field=field)

    extra = {str(s) for s in expr.free_symbols} - set(names)
    if extra:
        raise ParseError(f"undeclared variables {sorted(extra)} in {text!r}", field=field)
    gens = [symbols[name] for name in names]
    try:
        sym_poly = sympy.Poly(expr, *gens, domain="QQ") if gens else None
    except (sympy.PolynomialError, sympy.polys.polyerrors.CoercionFailed) as e:
        raise ParseError(f"not a polynomial with rational coefficients: {text!r} ({e})", field=field)

    poly = Poly(names)
    if sym_poly is None:
        if not expr.is_Rational:
            raise ParseError(f"constant {text!r} is not rational", field=field)
        value = sympy.Rational(expr)
        poly.add_term((), Fraction(int(value.p), int(value.q)))
        return poly
    for monom, coeff in sym_poly.terms():
        value = sympy.Rational(coeff)
        poly.add_term(monom, Fraction(int(value.p), int(value.q)))
    return poly


def poly_to_json(poly: Poly) -> Dict:
    return {
        "variables": list(poly.variables),
        "terms": [{"coeff": format_rat(c), "exponents": list(e)} for e, c in poly.sorted_terms()],
    }


def poly_from_json(doc: Mapping, field: str = "polynomial") -> Poly:
    try:
        variables = list(doc["variables"])
        terms = doc["terms"]
    except (KeyError, TypeError) as e:
        raise ParseError(f"missing key {e}", field=field)
    poly = Poly(variables)
    for k, term in enumerate(terms):
        exps = term.get("exponents")
        if not isinstance(exps, list) or len(exps) != len(variables):
            raise ParseError("exponent vector does not match variables", field=f"{field}.terms[{k}]")
        poly.add_term(exps, parse_rat(term.get("coeff"), f"{field}.terms[{k}].coeff"))
    return poly
