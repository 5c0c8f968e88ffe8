"""
错误与校验记录模块

职责：
- 定义统一的异常层级（全部继承 ValueError，调用方可以按 ValueError 捕获）
- 定义校验问题记录 ValidationIssue 与汇总 ValidationReport
- 校验函数只收集问题，不逐条抛出；需要异常时调用 report.raise_for_issues()
- 各类校验问题对应 ValidationError 的子类，异常上总带有 report
"""

import logging
from typing import Any, Dict, List, Optional, Union

logger = logging.getLogger("momentforge")


class MomentForgeError(ValueError):
    """所有 momentforge 异常的基类"""
    error_type = "error"


class ValidationError(MomentForgeError):
    """
    校验未通过，report 为完整的 ValidationReport。

    直接给出说明文字时，report 只含一条本类型的问题。
    """
    error_type = "validation"

    def __init__(self, report: Union["ValidationReport", str], witness: Any = None):
        if isinstance(report, str):
            message = report
            report = ValidationReport([ValidationIssue(self.error_type, message, witness)])
        else:
            message = (f"Validation failed with {len(report.issues)} issue(s): "
                       + "; ".join(str(i) for i in report.issues[:3]))
        super().__init__(message)
        self.report = report


class MixedFieldError(MomentForgeError):
    error_type = "mixed_field"


class TangencyError(ValidationError):
    error_type = "tangency"


class GenericityError(ValidationError):
    error_type = "genericity"


class TriplePointError(ValidationError):
    error_type = "triple_point"


class PoleOnCircleError(ValidationError):
    error_type = "pole_on_circle"


class BoundaryMissError(ValidationError):
    error_type = "boundary_miss"


class NotSurjectiveError(ValidationError):
    error_type = "not_surjective"


class InjectivityViolation(ValidationError):
    error_type = "injectivity"


class SeedOutsideError(MomentForgeError):
    error_type = "seed_outside"


class UnboundedRegionError(MomentForgeError):
    error_type = "unbounded_region"


class DegenerateRegionError(MomentForgeError):
    """区域存在相切等退化，无法进行扫描"""
    error_type = "degenerate_region"


class OutsideError(MomentForgeError):
    error_type = "outside"


class DimensionError(MomentForgeError):
    error_type = "dimension"


class DisconnectedFiberError(MomentForgeError):
    error_type = "disconnected_fiber"


class NotConnectedError(MomentForgeError):
    error_type = "not_connected"


class ArityError(MomentForgeError):
    error_type = "arity"


class UnknownEdgeError(MomentForgeError):
    error_type = "unknown_edge"


class PreconditionError(MomentForgeError):
    error_type = "precondition"


class PlacementFailure(MomentForgeError):
    error_type = "placement_failure"


class NotInteriorError(MomentForgeError):
    error_type = "not_interior"


class ToleranceError(MomentForgeError):
    """数值检查超出容差，diagnostics 中保存主角度等诊断信息"""
    error_type = "tolerance"

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ResolutionError(MomentForgeError):
    error_type = "resolution"


class ParseError(MomentForgeError):
    """输入文档解析失败，field 指出出错字段，line 为可选行号"""
    error_type = "parse"

    def __init__(self, message: str, field: str = "", line: Optional[int] = None):
        location = field
        if line is not None:
            location = f"{field} (line {line})" if field else f"line {line}"
        super().__init__(f"{location}: {message}" if location else message)
        self.field = field
        self.line = line


# 校验问题类型 → 异常类，按优先级排列：共点、相切会连带造成横坐标重合，横坐标重合排最后
ERROR_CLASSES = {
    cls.error_type: cls
    for cls in (
        TriplePointError, TangencyError, PoleOnCircleError, BoundaryMissError,
        InjectivityViolation, NotSurjectiveError, GenericityError,
    )
}


class ValidationIssue:
    """单条校验问题：类型 + 说明 + 见证对象（点、圆对等）"""

    def __init__(self, error_type: str, message: str, witness: Any = None):
        self.error_type = error_type
        self.message = message
        self.witness = witness

    def __str__(self):
        label = self.error_type.upper()
        if self.witness is None:
            return f"[{label}] {self.message}"
        return f"[{label}] {self.message}\n  Witness: {self.witness}"

    def __repr__(self):
        return f"ValidationIssue({self.error_type!r}, {self.message!r})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error_type": self.error_type,
            "message": self.message,
            "witness": str(self.witness) if self.witness is not None else "",
        }


class ValidationReport:
    """校验结果汇总，issues 为空即通过"""

    def __init__(self, issues: Optional[List[ValidationIssue]] = None, flags: Optional[Dict[str, Any]] = None):
        self.issues: List[ValidationIssue] = list(issues or [])
        self.flags: Dict[str, Any] = dict(flags or {})

    @property
    def passed(self) -> bool:
        return not self.issues

    def add(self, error_type: str, message: str, witness: Any = None) -> None:
        issue = ValidationIssue(error_type, message, witness)
        logger.debug(f"Validation issue: {issue.error_type}: {message}")
        self.issues.append(issue)

    def extend(self, other: "ValidationReport") -> None:
        self.issues.extend(other.issues)
        self.flags.update(other.flags)

    def of_type(self, error_type: str) -> List[ValidationIssue]:
        return [i for i in self.issues if i.error_type == error_type]

    def has(self, error_type: str) -> bool:
        return any(i.error_type == error_type for i in self.issues)

    def raise_for_issues(self) -> None:
        """
        有问题时抛出异常，异常的 report 即完整的本报告。

        Raises:
            ValidationError: ERROR_CLASSES 中优先级最高的已出现问题类型对应的子类
        """
        if not self.issues:
            return
        kinds = {i.error_type for i in self.issues}
        cls = next((c for kind, c in ERROR_CLASSES.items() if kind in kinds), ValidationError)
        raise cls(self)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "issues": [i.to_dict() for i in self.issues],
            "flags": dict(self.flags),
        }

    def __str__(self):
        if self.passed:
            return "Validation passed"
        return "\n".join(str(i) for i in self.issues)
