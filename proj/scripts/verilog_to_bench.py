#!/usr/bin/env python3
"""Convert a flat gate-primitive Verilog netlist (ISCAS style) into bench format.

Usage: verilog_to_bench.py in.v out.bench [--drop-feedthrough]

--drop-feedthrough removes PI/PO pairs connected only by `assign out = in;`
(the c2670 distribution carries 76 such pairs).
"""
import re
import sys

PRIMS = {"and": "AND", "nand": "NAND", "or": "OR", "nor": "NOR", "xor": "XOR",
         "xnor": "XNOR", "not": "NOT", "buf": "BUFF"}


def main():
    src, dst = sys.argv[1], sys.argv[2]
    drop = "--drop-feedthrough" in sys.argv
    text = re.sub(r"//.*", "", open(src).read())
    stmts = [s.strip() for s in text.split(";") if s.strip()]
    inputs, outputs, gates, assigns = [], [], [], []
    for s in stmts:
        s = " ".join(s.split())
        kw = s.split(" ", 1)[0]
        if kw == "input":
            inputs += [x.strip() for x in s[6:].split(",")]
        elif kw == "output":
            outputs += [x.strip() for x in s[7:].split(",")]
        elif kw in PRIMS:
            m = re.match(r"\w+\s*\w*\s*\((.*)\)", s)
            pins = [p.strip() for p in m.group(1).split(",")]
            gates.append((pins[0], PRIMS[kw], pins[1:]))
        elif kw == "assign":
            lhs, rhs = [x.strip() for x in s[7:].split("=")]
            assigns.append((lhs, rhs))
    used = {}
    for _, _, fis in gates:
        for f in fis:
            used[f] = used.get(f, 0) + 1
    for _, r in assigns:
        used[r] = used.get(r, 0) + 1
    dropped_in, dropped_out = set(), set()
    if drop:
        for lhs, rhs in assigns:
            if rhs in inputs and lhs in outputs and used.get(rhs) == 1:
                dropped_in.add(rhs)
                dropped_out.add(lhs)
    with open(dst, "w") as out:
        out.write("# %s\n" % src.rsplit("/", 1)[-1].replace(".v", ""))
        for i in inputs:
            if i not in dropped_in:
                out.write("INPUT(%s)\n" % i)
        for o in outputs:
            if o not in dropped_out:
                out.write("OUTPUT(%s)\n" % o)
        for name, kind, fis in gates:
            out.write("%s = %s(%s)\n" % (name, kind, ", ".join(fis)))
        for lhs, rhs in assigns:
            if lhs in dropped_out:
                continue
            if rhs in ("1'b0", "1'b1"):
                kind = "XOR" if rhs == "1'b0" else "XNOR"
                out.write("%s = %s(%s, %s)\n" % (lhs, kind, inputs[0], inputs[0]))
            else:
                out.write("%s = BUFF(%s)\n" % (lhs, rhs))


if __name__ == "__main__":
    main()
