"""Normal bundle of the line (t, -t, 1, -1, 0) on the Fermat quintic.

Prints the splitting type, h0/h1 of the twists and both routes to h1(N).
"""
from cjl.algebra import QQ, fermat, pullback
from cjl.curvespace import RationalCurve
from cjl.incidence import IncidencePoint
from cjl.normalbundle import jf_kernel, normal_sheaf, serre_dual_h1


def main():
    line = RationalCurve.from_coeffs(QQ, 1, ([0, 1], [0, -1], [1], [-1], []))
    F = fermat(QQ)
    print("pullback of the Fermat quintic is zero:", pullback(F, line.components).is_zero())
    p = IncidencePoint(line, F)
    S = normal_sheaf(p)
    K = jf_kernel(p)
    print("splitting type:", S.degrees, "torsion:", S.torsion)
    print("kernel twists:", sorted(K.source))
    for m in sorted(S.h0):
        print(f"  m={m:3d}  h0(N(m))={S.h0[m]}  h1(N(m))={S.h1[m]}")
    print("h1(N) from the cokernel:", S.h1[0], " from the dual twists:", serre_dual_h1(K))


if __name__ == "__main__":
    main()
