"""
精确算术模块

职责：
- 有理数（fractions.Fraction）的解析与格式化
- 实二次域元素 QuadExt = a + b·√d 的算术、符号判定与比较
- 在两个二次数之间选取分母尽量小的有理数（扫描线切片采样点）
- 高精度十进制近似（mpmath），仅用于显示和测试对照
"""

import re
import math
import logging
from enum import IntEnum
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Tuple, Union

import mpmath
from sympy.ntheory.factor_ import core

from .errors import MixedFieldError, ParseError

logger = logging.getLogger("momentforge")

Rat = Fraction
Number = Union[int, Fraction, "QuadExt"]

_RAT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")
_QUAD_RE = re.compile(
    r"^\s*([+-]?\d+(?:/\d+)?)\s*([+-])\s*(\d+(?:/\d+)?)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*$"
)


class Ordering(IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def parse_rat(text: Union[str, int, Fraction], field: str = "") -> Fraction:
    """
    解析 "p/q" 形式的有理数字符串。

    Args:
        text: "p/q"、"p" 字符串，或已经是 int/Fraction
        field: 出错时报告的字段名

    Returns:
        Fraction

    Raises:
        ParseError: 格式错误或分母为 0
    """
    if isinstance(text, bool):
        raise ParseError(f"expected a rational string, got {text!r}", field=field)
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ParseError(f"expected a rational string like \"p/q\", got {text!r}", field=field)
    m = _RAT_RE.match(text)
    if not m:
        raise ParseError(f"malformed rational {text!r}", field=field)
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}", field=field)
    return Fraction(int(m.group(1)), den)


def format_rat(q: Fraction) -> str:
    """Fraction → "p/q"（整数时省略分母）"""
    return str(Fraction(q))


@lru_cache(maxsize=4096)
def squarefree_decompose(n: int) -> Tuple[int, int]:
    """
    把非负整数分解为 n = s²·d，d 无平方因子。

    Returns:
        (s, d)；n = 0 时返回 (0, 0)
    """
    if n < 0:
        raise ValueError(f"squarefree_decompose expects n >= 0, got {n}")
    if n == 0:
        return 0, 0
    d = int(core(n, 2))
    s = math.isqrt(n // d)
    return s, d


@total_ordering
class QuadExt:
    """
    实二次域元素 a + b·√d。

    规范形：d 为 0 或 ≥ 2 的无平方因子整数；b = 0 时 d = 0，反之亦然。
    不可变；可哈希。
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a: Union[int, Fraction] = 0, b: Union[int, Fraction] = 0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        d = int(d)
        if d < 0:
            raise ValueError(f"QuadExt requires d >= 0, got {d}")
        if d == 1:
            a, b, d = a + b, Fraction(0), 0
        if b == 0 or d == 0:
            b, d = Fraction(0), 0
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "d", d)

    def __setattr__(self, key, value):
        raise AttributeError("QuadExt is immutable")

    @classmethod
    def make(cls, a: Union[int, Fraction], b: Union[int, Fraction], d: int) -> "QuadExt":
        """构造并把 d 化为无平方因子（√(s²d) = s√d）"""
        s, core_d = squarefree_decompose(int(d))
        return cls(a, Fraction(b) * s, core_d)

    @classmethod
    def sqrt_of(cls, r: Union[int, Fraction]) -> "QuadExt":
        """
        有理数的精确平方根。

        Args:
            r: 非负有理数

        Returns:
            √r 作为 QuadExt（完全平方时为有理数）
        """
        r = Fraction(r)
        if r < 0:
            raise ValueError(f"sqrt of negative rational {r}")
        # √(p/q) = √(p·q) / q
        s, d = squarefree_decompose(r.numerator * r.denominator)
        return cls(0, Fraction(s, r.denominator), d) if d else cls(Fraction(s, r.denominator))

    # --- 基本属性 ---

    @property
    def is_rational(self) -> bool:
        return self.d == 0

    def conjugate(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    # --- 算术 ---

    def _field_with(self, other: "QuadExt") -> int:
        if self.d == 0:
            return other.d
        if other.d == 0 or other.d == self.d:
            return self.d
        raise MixedFieldError(f"cannot combine Q(sqrt({self.d})) with Q(sqrt({other.d}))")

    def __add__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._field_with(other)
        return QuadExt(self.a + other.a, self.b + other.b, d)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        d = self._field_with(other)
        if self.d == 0:
            return QuadExt(self.a * other.a, self.a * other.b, d)
        if other.d == 0:
            return QuadExt(self.a * other.a, self.b * other.a, d)
        return QuadExt(
            self.a * other.a + self.b * other.b * d,
            self.a * other.b + self.b * other.a,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt division by zero")
        return QuadExt(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = QuadExt(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # --- 比较 ---

    def __eq__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __lt__(self, other):
        other = as_quad(other)
        if other is NotImplemented:
            return NotImplemented
        return quad_cmp(self, other) is Ordering.LT

    def __hash__(self):
        if self.d == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    # --- 转换 ---

    def __float__(self):
        if self.d == 0:
            return float(self.a)
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def to_mpf(self, dps: int = 60):
        """在 dps 位精度下计算 mpmath 值"""
        with mpmath.workdps(dps):
            value = mpmath.mpf(self.a.numerator) / self.a.denominator
            if self.d:
                value += mpmath.mpf(self.b.numerator) / self.b.denominator * mpmath.sqrt(self.d)
            return +value

    def to_decimal(self, digits: int = 12) -> str:
        return mpmath.nstr(self.to_mpf(digits + 10), digits)

    def __str__(self):
        if self.d == 0:
            return format_rat(self.a)
        sign = "-" if self.b < 0 else "+"
        return f"{format_rat(self.a)} {sign} {format_rat(abs(self.b))}*sqrt({self.d})"

    def __repr__(self):
        return f"QuadExt({self})"


def as_quad(value) -> "QuadExt":
    """把 int/Fraction/QuadExt 统一为 QuadExt；无法转换时返回 NotImplemented"""
    if isinstance(value, QuadExt):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return QuadExt(value)
    return NotImplemented


def parse_quad(text: str, field: str = "") -> QuadExt:
    """解析 "p/q" 或 "p/q + r/s*sqrt(d)" 文本"""
    text = str(text)
    m = _QUAD_RE.match(text)
    if m:
        a = parse_rat(m.group(1), field)
        b = parse_rat(m.group(3), field)
        if m.group(2) == "-":
            b = -b
        return QuadExt.make(a, b, int(m.group(4)))
    return QuadExt(parse_rat(text, field))


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def quad_sign(q: QuadExt) -> int:
    """
    a + b√d 的精确符号。

    先看 a、b 的符号；异号时比较 a² 与 b²d。

    Returns:
        -1 / 0 / +1
    """
    q = as_quad(q)
    sa = _sign(q.a)
    if q.d == 0:
        return sa
    sb = _sign(q.b)
    if sa == 0:
        return sb
    if sa == sb:
        return sa
    diff = q.a * q.a - q.b * q.b * q.d
    if diff > 0:
        return sa
    if diff < 0:
        return sb
    return 0


def quad_cmp(q1: Number, q2: Number) -> Ordering:
    """
    两个二次数的精确比较，允许不同的 d。

    同域时直接判定差的符号；不同域时写成 X + Y，X = A + B√d1，Y = C√d2，
    比较 X² 与 Y²（最多两次平方）。

    Returns:
        Ordering.LT / EQ / GT
    """
    q1 = as_quad(q1)
    q2 = as_quad(q2)
    if q1.d == 0 or q2.d == 0 or q1.d == q2.d:
        return Ordering(quad_sign(q1 - q2))

    x = QuadExt(q1.a - q2.a, q1.b, q1.d)
    c = -q2.b
    sx = quad_sign(x)
    sy = _sign(c)
    if sx == 0:
        return Ordering(sy)
    if sy == 0:
        return Ordering(sx)
    if sx == sy:
        return Ordering(sx)
    # X² - Y² = A² + B²d1 - C²d2 + 2AB√d1
    t = quad_sign(QuadExt(x.a * x.a + x.b * x.b * x.d - c * c * q2.d, 2 * x.a * x.b, x.d))
    if t > 0:
        return Ordering(sx)
    if t < 0:
        return Ordering(sy)
    return Ordering.EQ


def quad_bounds(q: QuadExt, bits: int = 16) -> Tuple[Fraction, Fraction]:
    """
    有理区间 [lo, hi] 包含 q，宽度约为 |b|·2^-bits。
    """
    q = as_quad(q)
    if q.d == 0:
        return q.a, q.a
    scale = 1 << bits
    s = math.isqrt(q.d * scale * scale)
    root_lo = Fraction(s, scale)
    root_hi = Fraction(s + 1, scale)
    if q.b > 0:
        return q.a + q.b * root_lo, q.a + q.b * root_hi
    return q.a + q.b * root_hi, q.a + q.b * root_lo


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """
    开区间 (lo, hi) 内分母最小的有理数（连分数 / Stern-Brocot）。
    """
    lo = Fraction(lo)
    hi = Fraction(hi)
    if not lo < hi:
        raise ValueError(f"empty interval ({lo}, {hi})")
    fl = math.floor(lo)
    if fl + 1 < hi:
        # 区间内有整数，取绝对值最小的一个
        if lo < 0 < hi:
            return Fraction(0)
        if hi <= 0:
            return Fraction(math.ceil(hi) - 1)
        return Fraction(fl + 1)
    lo_frac = lo - fl
    hi_frac = hi - fl
    if lo_frac == 0:
        y = Fraction(math.floor(1 / hi_frac) + 1)
    else:
        y = simplest_between(1 / hi_frac, 1 / lo_frac)
    return fl + 1 / y


def rational_between(q1: Number, q2: Number) -> Fraction:
    """
    严格位于 q1 < q2 之间的简单有理数。

    Raises:
        ValueError: q1 >= q2
    """
    q1 = as_quad(q1)
    q2 = as_quad(q2)
    if quad_cmp(q1, q2) is not Ordering.LT:
        raise ValueError(f"rational_between requires {q1} < {q2}")
    bits = 8
    while True:
        _, hi1 = quad_bounds(q1, bits)
        lo2, _ = quad_bounds(q2, bits)
        if hi1 < lo2:
            return simplest_between(hi1, lo2)
        bits *= 2


def rational_below(q: Number) -> Fraction:
    """严格小于 q 的整数"""
    lo, _ = quad_bounds(as_quad(q), 8)
    return Fraction(math.floor(lo) - 1)


def rational_above(q: Number) -> Fraction:
    """严格大于 q 的整数"""
    _, hi = quad_bounds(as_quad(q), 8)
    return Fraction(math.ceil(hi) + 1)
