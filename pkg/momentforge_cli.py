"""
momentforge 命令行入口

用法：
    python momentforge_cli.py reeb --input annulus --format json
    python momentforge_cli.py construct mt6 --nprime 2 --j1 1 --j2 1
    python momentforge_cli.py verify --input disk --samples 100 --seed 7
    python momentforge_cli.py demo
"""

import sys

from momentforge.cli import main

if __name__ == "__main__":
    sys.exit(main())
