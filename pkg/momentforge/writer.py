"""
输出模块

职责：
- 格式化输出到 JSON/JSONL/CSV/XLSX/纯文本
- 统一输出接口，不包含业务逻辑
"""

import json
import logging
import os
from typing import Any, Dict, List

import pandas as pd

logger = logging.getLogger("momentforge")


def write_json(data: Any, file_path: str) -> None:
    """
    输出 JSON 文件。

    Args:
        data: 要输出的数据
        file_path: 输出文件路径

    Raises:
        IOError: 写入失败
    """
    with open(file_path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
        f.write("\n")
    logger.info(f"Wrote JSON: {file_path}")


def write_jsonl(rows: List[Dict], file_path: str) -> None:
    """
    输出 JSONL 文件（每行一个 JSON 对象）。

    Args:
        rows: 要输出的行列表
        file_path: 输出文件路径
    """
    with open(file_path, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    logger.info(f"Wrote JSONL: {file_path} ({len(rows)} rows)")


def _frame(rows: List[Dict], fieldnames: List[str] = None) -> pd.DataFrame:
    # 列表值（圆 id、纤维维数）展开为空格分隔文本
    flat = [
        {k: " ".join(str(x) for x in v) if isinstance(v, (list, tuple)) else v for k, v in r.items()}
        for r in rows
    ]
    df = pd.DataFrame(flat)
    if fieldnames is not None:
        df = df.reindex(columns=fieldnames)
    return df


def write_csv(rows: List[Dict], file_path: str, fieldnames: List[str] = None) -> None:
    """
    输出 CSV 文件。

    Args:
        rows: 要输出的行列表
        file_path: 输出文件路径
        fieldnames: 列名列表，不指定则自动从行推断
    """
    if not rows:
        logger.warning(f"No data to write to CSV: {file_path}")
        return
    _frame(rows, fieldnames).to_csv(file_path, index=False, encoding="utf-8")
    logger.info(f"Wrote CSV: {file_path} ({len(rows)} rows)")


def write_xlsx(rows: List[Dict], file_path: str, sheet_name: str = "strata") -> None:
    """输出 XLSX 文件（openpyxl 引擎）"""
    if not rows:
        logger.warning(f"No data to write to XLSX: {file_path}")
        return
    _frame(rows).to_excel(file_path, index=False, sheet_name=sheet_name, engine="openpyxl")
    logger.info(f"Wrote XLSX: {file_path} ({len(rows)} rows)")


def write_text(text: str, file_path: str) -> None:
    with open(file_path, "w", encoding="utf-8") as f:
        f.write(text)
    logger.info(f"Wrote text: {file_path}")


def print_json(data: Any) -> None:
    """
    输出 JSON 到 stdout。

    Args:
        data: 要输出的数据
    """
    print(json.dumps(data, ensure_ascii=False, indent=2))


def print_jsonl(rows: List[Dict], limit: int = 50) -> None:
    """
    输出 JSONL 到 stdout（预览模式）。

    Args:
        rows: 要输出的行列表
        limit: 最多输出行数
    """
    for r in rows[:limit]:
        print(json.dumps(r, ensure_ascii=False))

    if len(rows) > limit:
        print(f"... ({len(rows) - limit} more rows, use --output to save all)")


def write_auto(data: Any, file_path: str) -> None:
    """
    根据文件扩展名自动选择输出格式。

    Args:
        data: 要输出的数据
        file_path: 输出文件路径

    Raises:
        ValueError: 不支持的文件格式
    """
    ext = os.path.splitext(file_path)[1].lower()

    if ext == ".json":
        write_json(data, file_path)
    elif ext in (".jsonl", ".csv", ".xlsx"):
        if not isinstance(data, list):
            raise ValueError(f"{ext[1:].upper()} format requires list data, got {type(data)}")
        if ext == ".jsonl":
            write_jsonl(data, file_path)
        elif ext == ".csv":
            write_csv(data, file_path)
        else:
            write_xlsx(data, file_path)
    elif ext in (".txt", ".dot", ".svg"):
        if not isinstance(data, str):
            raise ValueError(f"{ext[1:].upper()} format requires text data, got {type(data)}")
        write_text(data, file_path)
    else:
        raise ValueError(f"Unsupported file format: {ext}")


def print_auto(data: Any, mode: str = "json") -> None:
    """
    根据模式自动选择输出格式到 stdout。

    Args:
        data: 要输出的数据
        mode: "json"、"jsonl" 或 "text"
    """
    if mode == "text" and isinstance(data, str):
        print(data, end="" if data.endswith("\n") else "\n")
    elif mode == "jsonl" and isinstance(data, list):
        print_jsonl(data)
    else:
        print_json(data)
