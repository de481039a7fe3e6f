#!/usr/bin/env python3
"""
Launcher script for the mkit command line
Runs from any directory: python launch_mkit.py classify --alpha alpha.json -f f.json
"""

import os
import sys


def main():
    # Get the project root directory
    project_root = os.path.dirname(os.path.abspath(__file__))
    if project_root not in sys.path:
        sys.path.insert(0, project_root)

    from mkit.main import main as mkit_main
    try:
        return mkit_main(sys.argv[1:])
    except KeyboardInterrupt:
        print("\nmkit stopped by user", file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
