#!/usr/bin/env python3
"""Reference external MILP backend for the hsched solver adapter.

Reads a (fixed or free form) MPS model, solves it with scipy's HiGHS wrapper
and writes one `<varname> <value>` line per variable to the solution file.
The warm-start file is accepted for interface compatibility but ignored:
scipy's milp() exposes no MIP-start hook, and hints are non-binding by
contract.

Usage:
  milp_solve.py --model M.mps --solution OUT [--start S] [--timelimit SEC]
"""

import argparse
import sys

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import csr_matrix


def parse_mps(path):
    var_names = []
    var_index = {}
    var_int = []
    var_lb = []
    var_ub = []
    var_obj = []
    rows = []  # (sense, name)
    row_index = {}
    entries = []  # (row, col, coeff)
    rhs = {}

    def var_id(name, integer):
        if name in var_index:
            return var_index[name]
        idx = len(var_names)
        var_index[name] = idx
        var_names.append(name)
        var_int.append(1 if integer else 0)
        var_lb.append(0.0)
        var_ub.append(1.0 if integer else np.inf)
        var_obj.append(0.0)
        return idx

    section = None
    integer_block = False
    with open(path) as handle:
        for raw in handle:
            if raw.startswith("*"):
                continue
            tok = raw.split()
            if not tok:
                continue
            if not raw[0].isspace():
                head = tok[0]
                if head == "ENDATA":
                    break
                if head in ("ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "NAME"):
                    section = head
                    continue
                section = None
                continue
            if section == "ROWS":
                sense, name = tok
                if sense == "N":
                    row_index[name] = None  # objective row
                else:
                    row_index[name] = len(rows)
                    rows.append((sense, name))
            elif section == "COLUMNS":
                if len(tok) >= 3 and tok[1] == "'MARKER'":
                    integer_block = tok[2] == "'INTORG'"
                    continue
                col = var_id(tok[0], integer_block)
                for k in range(1, len(tok) - 1, 2):
                    row, coeff = tok[k], float(tok[k + 1])
                    if row_index.get(row, "missing") is None:
                        var_obj[col] = coeff
                    else:
                        entries.append((row_index[row], col, coeff))
            elif section == "RHS":
                for k in range(1, len(tok) - 1, 2):
                    rhs[row_index[tok[k]]] = float(tok[k + 1])
            elif section == "BOUNDS":
                kind, _, name = tok[0], tok[1], tok[2]
                value = float(tok[3]) if len(tok) > 3 else 0.0
                idx = var_index[name]
                if kind == "BV":
                    var_int[idx], var_lb[idx], var_ub[idx] = 1, 0.0, 1.0
                elif kind == "FX":
                    var_lb[idx] = var_ub[idx] = value
                elif kind == "LO":
                    var_lb[idx] = value
                elif kind == "UP":
                    var_ub[idx] = value
                elif kind == "MI":
                    var_lb[idx] = -np.inf
                elif kind == "PL":
                    var_ub[idx] = np.inf
                elif kind == "UI":
                    var_int[idx], var_ub[idx] = 1, value
            elif section == "RANGES":
                raise SystemExit("RANGES sections are not supported")

    n = len(var_names)
    m = len(rows)
    if m:
        data = np.array([e[2] for e in entries])
        ij = ([e[0] for e in entries], [e[1] for e in entries])
        A = csr_matrix((data, ij), shape=(m, n))
        lower = np.full(m, -np.inf)
        upper = np.full(m, np.inf)
        for r, (sense, _) in enumerate(rows):
            b = rhs.get(r, 0.0)
            if sense in ("L", "E"):
                upper[r] = b
            if sense in ("G", "E"):
                lower[r] = b
        constraints = LinearConstraint(A, lower, upper)
    else:
        constraints = None
    return (
        var_names,
        np.array(var_int),
        np.array(var_lb),
        np.array(var_ub),
        np.array(var_obj),
        constraints,
    )


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--model", required=True)
    ap.add_argument("--solution", required=True)
    ap.add_argument("--start", default=None)
    ap.add_argument("--timelimit", type=float, default=None)
    args = ap.parse_args()

    if args.start:
        print("note: MIP start file ignored (no scipy warm-start hook)",
              file=sys.stderr)

    names, integrality, lb, ub, obj, constraints = parse_mps(args.model)
    options = {}
    if args.timelimit:
        options["time_limit"] = args.timelimit
    result = milp(
        c=obj,
        constraints=constraints,
        integrality=integrality,
        bounds=Bounds(lb, ub),
        options=options,
    )
    if result.x is None:
        print(f"no solution: status={result.status} {result.message}",
              file=sys.stderr)
        return 2
    with open(args.solution, "w") as out:
        for name, value in zip(names, result.x):
            out.write(f"{name} {value:.17g}\n")
    print(f"objective {result.fun:.17g} status {result.status}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
