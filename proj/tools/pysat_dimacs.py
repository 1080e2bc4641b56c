#!/usr/bin/env python3
"""Solve a DIMACS file with python-sat and print the result in competition format."""
import sys

from pysat.formula import CNF
from pysat.solvers import Solver


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: pysat_dimacs.py FILE.cnf", file=sys.stderr)
        return 2
    cnf = CNF(from_file=sys.argv[1])
    with Solver(name="cadical153", bootstrap_with=cnf.clauses) as s:
        if s.solve():
            print("s SATISFIABLE")
            print("v " + " ".join(str(l) for l in s.get_model()) + " 0")
            return 10
        print("s UNSATISFIABLE")
        return 20


if __name__ == "__main__":
    sys.exit(main())
